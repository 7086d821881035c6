"""Lie algebras presented by structure equations on a coframe.

The sign convention is de^k(e_i, e_j) = -a^k_{ij} for the brackets
[e_i, e_j] = sum_k a^k_{ij} e_k, so that a literal like 'e12' in slot k
means de^k = e^1 ^ e^2. Jacobi is enforced as d o d = 0 at parse time.
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .exterior import (Coframe, DimensionError, KForm, Vector,
                       _sort_indices, invert_matrix, kernel_basis,
                       parse_form, rref, scalar_is_zero, wedge)


class NotLieAlgebraError(ValueError):
    """d^2 != 0, i.e. the Jacobi identity fails; names the generator."""


class Subspace:
    """A subspace stored by a reduced-echelon basis, canonical under equality."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient, vectors):
        rows = []
        for v in vectors:
            comps = list(getattr(v, "components", v))
            if len(comps) != ambient:
                raise DimensionError("vector of length %d in ambient %d"
                                     % (len(comps), ambient))
            if not all(scalar_is_zero(c) for c in comps):
                rows.append(comps)
        if rows:
            red, pivots = rref(rows)
            basis = tuple(tuple(r) for r in red[:len(pivots)])
        else:
            basis = ()
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, vector):
        comps = list(getattr(vector, "components", vector))
        if len(comps) != self.ambient:
            raise DimensionError("vector of length %d in ambient %d"
                                 % (len(comps), self.ambient))
        for row in self.basis:
            piv = next(i for i, c in enumerate(row) if not scalar_is_zero(c))
            if not scalar_is_zero(comps[piv]):
                f = comps[piv]
                comps = [x - f * y for x, y in zip(comps, row)]
        return all(scalar_is_zero(c) for c in comps)

    def __le__(self, other):
        if not isinstance(other, Subspace) or self.ambient != other.ambient:
            raise TypeError("incomparable subspaces")
        return all(other.contains(row) for row in self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return "Subspace(dim %d of %d)" % (self.dim, self.ambient)


def span(*vectors):
    """Subspace spanned by Vector instances (at least one)."""
    vecs = list(vectors)
    if not vecs:
        raise DimensionError("span() needs at least one vector")
    return Subspace(vecs[0].space.n, vecs)


class LieAlgebra:
    """A coframe together with the differentials de^1 .. de^n."""

    __slots__ = ("space", "d1", "constants")

    def __init__(self, space, d1, _validate=True):
        d1 = tuple(d1)
        if len(d1) != space.n:
            raise DimensionError("expected %d differentials, got %d"
                                 % (space.n, len(d1)))
        for f in d1:
            if f.space != space or f.degree != 2:
                raise DimensionError("differentials must be 2-forms on the coframe")
        constants = {}
        for k, f in enumerate(d1, start=1):
            for (i, j), c in f.items():
                constants.setdefault((i, j), {})[k] = -c
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "constants", constants)
        if _validate:
            for k in range(1, space.n + 1):
                dd = self.d(self.d1[k - 1])
                if not dd.is_zero():
                    raise NotLieAlgebraError(
                        "d^2(%s) != 0 (got %r), not a Lie algebra"
                        % (space.labels[k - 1], dd))

    def __setattr__(self, name, value):
        raise AttributeError("LieAlgebra is immutable")

    @property
    def n(self):
        return self.space.n

    def d(self, a):
        """Chevalley-Eilenberg differential, extended as an antiderivation."""
        if a.space != self.space:
            raise DimensionError("form lives on a different coframe")
        n = self.space.n
        deg = a.degree + 1
        if deg > n:
            return KForm(self.space, n, {})
        out = {}
        for idx, c in a.coeffs.items():
            for pos, i in enumerate(idx):
                di = self.d1[i - 1]
                if di.is_zero():
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                rest_set = set(rest)
                psign = -1 if pos % 2 else 1
                for dkey, dv in di.items():
                    if rest_set & set(dkey):
                        continue
                    key, sign = _sort_indices(dkey + rest)
                    term = c * dv * (psign * sign)
                    acc = out.get(key)
                    out[key] = term if acc is None else acc + term
        return KForm(self.space, deg, out)

    def bracket(self, u, v):
        """Lie bracket of two vectors expressed in the frame."""
        if u.space != self.space or v.space != self.space:
            raise DimensionError("vector lives on a different coframe")
        n = self.space.n
        out = [Fraction(0)] * n
        for (i, j), targets in self.constants.items():
            coef = (u.components[i - 1] * v.components[j - 1]
                    - u.components[j - 1] * v.components[i - 1])
            if scalar_is_zero(coef):
                continue
            for k, a in targets.items():
                out[k - 1] = out[k - 1] + coef * a
        return Vector(self.space, out)

    def ad_matrix(self, i):
        """Matrix of ad(e_i) on the frame; column j holds [e_i, e_j]."""
        n = self.space.n
        out = [[Fraction(0)] * n for _ in range(n)]
        ei = Vector.basis(self.space, i)
        for j in range(1, n + 1):
            w = self.bracket(ei, Vector.basis(self.space, j))
            for k in range(n):
                out[k][j - 1] = w.components[k]
        return out

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.space == other.space and self.d1 == other.d1

    def __hash__(self):
        return hash((self.space, self.d1))

    def __repr__(self):
        return "LieAlgebra(%s)" % ", ".join(repr(f) for f in self.d1)


# a digit run not followed by '*' or '/' is an index token, not a coefficient
_BARE_INDICES = re.compile(r"(\d+)(?![\d*/])")


def parse_structure(text, labels=None):
    """Build a LieAlgebra from comma-separated 2-form literals.

    Each slot k gives de^k; '0' marks a closed generator. Index digits
    refer to the default single-letter coframe unless labels are given.
    Parts in bare-index shorthand ('16+23') get the letter filled in.
    """
    parts = [p.strip() for p in text.split(",")]
    n = len(parts)
    if n < 1:
        raise DimensionError("empty structure string")
    space = Coframe(n, labels)
    d1 = []
    for p in parts:
        if p != "0" and not any(ch.isalpha() for ch in p):
            p = _BARE_INDICES.sub(space.letter + r"\1", p)
        d1.append(parse_form(p, space, degree=2))
    return LieAlgebra(space, d1)


def ce_differential(L, a):
    """d(a) for a k-form on the coframe of L."""
    return L.d(a)


@dataclass(frozen=True)
class StructureReport:
    center: Subspace
    derived: Subspace
    nilpotent: bool
    step: int
    unimodular: bool
    killing_zero: bool


def _bracket_span(L, left, right):
    """Span of [x, y] for x in a basis of left, y in a basis of right."""
    vecs = []
    for lrow in left.basis:
        for rrow in right.basis:
            vecs.append(L.bracket(Vector(L.space, lrow), Vector(L.space, rrow)))
    return Subspace(L.n, vecs)


def structure_report(L):
    """Center, derived algebra, nilpotency data, unimodularity, Killing form."""
    n = L.n
    rows = []
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            row = [Fraction(0)] * n
            for i in range(1, n + 1):
                lo, hi = (i, j) if i < j else (j, i)
                if lo == hi:
                    continue
                a = L.constants.get((lo, hi), {}).get(k, Fraction(0))
                if i > j:
                    a = -a
                row[i - 1] = a
            rows.append(row)
    center = Subspace(n, kernel_basis(rows))

    whole = Subspace(n, [[Fraction(1 if i == j else 0) for i in range(n)]
                         for j in range(n)])
    derived = _bracket_span(L, whole, whole)

    term = derived
    step = 1
    nilpotent = True
    while term.dim > 0:
        nxt = _bracket_span(L, whole, term)
        if nxt.dim == term.dim:
            nilpotent = False
            break
        term = nxt
        step += 1

    ads = [L.ad_matrix(i) for i in range(1, n + 1)]
    unimodular = all(
        scalar_is_zero(sum((ad[k][k] for k in range(n)), Fraction(0)))
        for ad in ads)

    killing_zero = True
    for i in range(n):
        for j in range(i, n):
            tr = Fraction(0)
            for r in range(n):
                for c in range(n):
                    tr += ads[i][r][c] * ads[j][c][r]
            if not scalar_is_zero(tr):
                killing_zero = False
                break
        if not killing_zero:
            break

    return StructureReport(center=center, derived=derived, nilpotent=nilpotent,
                           step=step if nilpotent else 0,
                           unimodular=unimodular, killing_zero=killing_zero)


@dataclass(frozen=True)
class NiceBasisReport:
    nice: bool
    multiple_targets: tuple
    index_overlaps: tuple


def is_nice_basis(L):
    """Check the two combinatorial conditions for a nice basis.

    A basis is nice when each [e_i, e_j] is a multiple of a single e_k,
    and no two distinct bracket pairs hitting the same e_k share an index.
    """
    multi = []
    for (i, j), targets in sorted(L.constants.items()):
        ks = tuple(sorted(k for k, a in targets.items()
                          if not scalar_is_zero(a)))
        if len(ks) > 1:
            multi.append(((i, j), ks))

    by_target = {}
    for (i, j), targets in L.constants.items():
        for k, a in targets.items():
            if not scalar_is_zero(a):
                by_target.setdefault(k, []).append((i, j))
    overlaps = []
    for k, pairs in sorted(by_target.items()):
        pairs = sorted(pairs)
        for x in range(len(pairs)):
            for y in range(x + 1, len(pairs)):
                if set(pairs[x]) & set(pairs[y]):
                    overlaps.append((k, pairs[x], pairs[y]))

    return NiceBasisReport(nice=not multi and not overlaps,
                           multiple_targets=tuple(multi),
                           index_overlaps=tuple(overlaps))


def derivations_traceless(L):
    """Whether every derivation of L has trace zero."""
    n = L.n
    nn = n * n

    def a_const(i, j, k):
        if i == j:
            return Fraction(0)
        lo, hi = (i, j) if i < j else (j, i)
        a = L.constants.get((lo, hi), {}).get(k, Fraction(0))
        return a if i < j else -a

    rows = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(1, n + 1):
                row = [Fraction(0)] * nn
                # D[e_i,e_j] = [De_i,e_j] + [e_i,De_j], coefficient of e_k
                for m in range(1, n + 1):
                    row[(k - 1) * n + (m - 1)] += a_const(i, j, m)
                    row[(m - 1) * n + (i - 1)] -= a_const(m, j, k)
                    row[(m - 1) * n + (j - 1)] -= a_const(i, m, k)
                rows.append(row)
    for vec in kernel_basis(rows):
        tr = sum((vec[d * n + d] for d in range(n)), Fraction(0))
        if not scalar_is_zero(tr):
            return False
    return True


def substitute_coframe(form, matrix, new_space):
    """Rewrite a form in a new coframe, old^a = sum_b matrix[a][b] new^b."""
    n = form.space.n
    if new_space.n != n:
        raise DimensionError("coframe dimensions differ")
    out = KForm(new_space, form.degree, {})
    for idx, c in form.items():
        piece = KForm(new_space, 0, {(): c})
        for a in idx:
            one = KForm(new_space, 1,
                        {(b + 1,): matrix[a - 1][b] for b in range(n)})
            piece = wedge(piece, one)
        out = out + piece
    return out


def change_of_basis(L, matrix, labels=None):
    """Restate L on a new coframe f^a = sum_b matrix[a][b] e^b."""
    n = L.n
    if len(matrix) != n or any(len(r) != n for r in matrix):
        raise DimensionError("change of basis needs an %dx%d matrix" % (n, n))
    minv = invert_matrix([list(r) for r in matrix])
    new_space = Coframe(n, labels if labels is not None
                        else tuple("f%d" % (i + 1) for i in range(n)))
    new_d1 = []
    for a in range(n):
        de_in_e = KForm(L.space, 2, {})
        for b in range(n):
            de_in_e = de_in_e + matrix[a][b] * L.d1[b]
        new_d1.append(substitute_coframe(de_in_e, minv, new_space))
    return LieAlgebra(new_space, new_d1)


def to_json(L):
    """Serialize to the {dim, labels, differentials} wire format."""
    return json.dumps({
        "dim": L.n,
        "labels": list(L.space.labels),
        "differentials": [repr(f) for f in L.d1],
    })


def from_json(text):
    """Inverse of to_json."""
    doc = json.loads(text)
    space = Coframe(int(doc["dim"]), tuple(doc["labels"]))
    d1 = [parse_form(s, space, degree=2) for s in doc["differentials"]]
    return LieAlgebra(space, d1)
