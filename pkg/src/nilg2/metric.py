"""Left-invariant pseudo-metrics: curvature, Einstein check, obstructions.

All tensors are taken in the frame dual to the algebra's coframe, where the
Gram matrix is constant. Curvature follows R(X,Y)Z = [nabla_X, nabla_Y]Z -
nabla_[X,Y] Z with Ric_jl = g^{ik} R_ijkl.
"""

from dataclasses import dataclass
from fractions import Fraction

from .exterior import (DimensionError, KForm, NinthRoot, Polynomial,
                       PreconditionError, SingularMetricError, Vector,
                       adjugate, det_matrix, form_inner, invert_matrix,
                       kernel_basis, rref, scalar_is_zero, scalar_sign)
from .liealg import structure_report


def _div(a, b):
    if isinstance(b, NinthRoot):
        return b.inverse() * a
    if isinstance(a, Polynomial) or isinstance(b, Polynomial):
        raise TypeError("no exact division for polynomial scalars here")
    return a / b


def _signature_of(gram):
    """(p, q) of a symmetric matrix by exact congruence diagonalization."""
    n = len(gram)
    m = [list(r) for r in gram]
    p = q = 0
    for t in range(n):
        piv = None
        for r in range(t, n):
            if not scalar_is_zero(m[r][r]):
                piv = r
                break
        if piv is None:
            # zero diagonal: make a pivot from an off-diagonal pair
            pair = None
            for r in range(t, n):
                for c in range(r + 1, n):
                    if not scalar_is_zero(m[r][c]):
                        pair = (r, c)
                        break
                if pair:
                    break
            if pair is None:
                break
            r, c = pair
            for i in range(n):
                m[r][i] = m[r][i] + m[c][i]
            for i in range(n):
                m[i][r] = m[i][r] + m[i][c]
            piv = r
        if piv != t:
            m[piv], m[t] = m[t], m[piv]
            for row in m:
                row[piv], row[t] = row[t], row[piv]
        d = m[t][t]
        if scalar_sign(d) > 0:
            p += 1
        else:
            q += 1
        for r in range(t + 1, n):
            if scalar_is_zero(m[r][t]):
                continue
            f = _div(m[r][t], d)
            for i in range(n):
                m[r][i] = m[r][i] - f * m[t][i]
            for i in range(n):
                m[i][r] = m[i][r] - f * m[i][t]
    return (p, q)


class PseudoMetric:
    """A symmetric Gram matrix on the frame, with exact signature."""

    __slots__ = ("space", "gram", "_signature")

    def __init__(self, space, gram):
        n = space.n
        gram = tuple(tuple(r) for r in gram)
        if len(gram) != n or any(len(r) != n for r in gram):
            raise DimensionError("Gram matrix must be %dx%d" % (n, n))
        for i in range(n):
            for j in range(i + 1, n):
                if not scalar_is_zero(gram[i][j] - gram[j][i]):
                    raise DimensionError("Gram matrix must be symmetric")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "_signature", None)

    def __setattr__(self, name, value):
        raise AttributeError("PseudoMetric is immutable")

    @classmethod
    def diagonal(cls, space, entries):
        entries = list(entries)
        if len(entries) != space.n:
            raise DimensionError("expected %d diagonal entries" % space.n)
        return cls(space, [[entries[i] if i == j else Fraction(0)
                            for j in range(space.n)] for i in range(space.n)])

    @property
    def signature(self):
        sig = self._signature
        if sig is None:
            sig = _signature_of(self.gram)
            object.__setattr__(self, "_signature", sig)
        return sig

    def is_degenerate(self):
        return scalar_is_zero(det_matrix([list(r) for r in self.gram]))

    def inner(self, u, v):
        if u.space != self.space or v.space != self.space:
            raise DimensionError("vector lives on a different coframe")
        acc = Fraction(0)
        for i, ui in enumerate(u.components):
            if scalar_is_zero(ui):
                continue
            for j, vj in enumerate(v.components):
                acc = acc + ui * self.gram[i][j] * vj
        return acc

    def __eq__(self, other):
        if not isinstance(other, PseudoMetric):
            return NotImplemented
        return self.space == other.space and self.gram == other.gram

    def __hash__(self):
        return hash((self.space, self.gram))

    def __repr__(self):
        return "PseudoMetric(%d-dim, signature %r)" % (self.space.n,
                                                       self._signature)


def musical_flat(g, v):
    """v-flat = iota_v g as a 1-form on the coframe."""
    if v.space != g.space:
        raise DimensionError("vector lives on a different coframe")
    n = g.space.n
    coeffs = {}
    for i in range(n):
        acc = Fraction(0)
        for j in range(n):
            acc = acc + v.components[j] * g.gram[j][i]
        coeffs[(i + 1,)] = acc
    return KForm(g.space, 1, coeffs)


def dual_metric(g):
    """Metric induced on the coframe: the inverse Gram matrix.

    Over polynomial scalars the adjugate is returned instead, every entry
    then carries the common factor det(gram) left undivided.
    """
    rows = [list(r) for r in g.gram]
    if any(isinstance(x, Polynomial) for r in rows for x in r):
        return PseudoMetric(g.space, adjugate(rows))
    det = det_matrix(rows)
    if scalar_is_zero(det):
        raise SingularMetricError("metric is degenerate")
    adj = adjugate(rows)
    inv = [[_div(x, det) for x in r] for r in adj]
    return PseudoMetric(g.space, inv)


@dataclass(frozen=True)
class Connection:
    """Levi-Civita coefficients: gamma[i][j][k] is Gamma^k_ij."""

    space: object
    gamma: tuple

    def coeff(self, i, j, k):
        return self.gamma[i - 1][j - 1][k - 1]

    def nabla(self, i, j):
        return Vector(self.space, list(self.gamma[i - 1][j - 1]))


def levi_civita(L, g):
    """Koszul formula in the left-invariant frame."""
    if g.space != L.space:
        raise DimensionError("metric lives on a different coframe")
    n = L.n
    ginv = dual_metric(g).gram

    def bk(i, j, k):
        # g([e_i, e_j], e_k)
        w = L.bracket(Vector.basis(L.space, i), Vector.basis(L.space, j))
        acc = Fraction(0)
        for m in range(n):
            if not scalar_is_zero(w.components[m]):
                acc = acc + w.components[m] * g.gram[m][k - 1]
        return acc

    half = Fraction(1, 2)
    gamma = []
    for i in range(1, n + 1):
        rows = []
        for j in range(1, n + 1):
            rhs = [half * (bk(i, j, k) - bk(j, k, i) + bk(k, i, j))
                   for k in range(1, n + 1)]
            rows.append(tuple(
                sum((ginv[k][m] * rhs[m] for m in range(n)), Fraction(0))
                for k in range(n)))
        gamma.append(tuple(rows))
    return Connection(space=L.space, gamma=tuple(gamma))


class CurvatureTensor:
    """R_ijkl with the pair symmetries stored once per orbit."""

    __slots__ = ("space", "entries")

    def __init__(self, space, entries):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "entries", dict(entries))

    def __setattr__(self, name, value):
        raise AttributeError("CurvatureTensor is immutable")

    def get(self, i, j, k, l):
        sign = 1
        if i == j or k == l:
            return Fraction(0)
        if i > j:
            i, j, sign = j, i, -sign
        if k > l:
            k, l, sign = l, k, -sign
        if (i, j) > (k, l):
            i, j, k, l = k, l, i, j
        val = self.entries.get((i, j, k, l))
        if val is None:
            return Fraction(0)
        return val if sign > 0 else -val

    def nonzero(self):
        return sorted(self.entries.items())

    def is_zero(self):
        return not self.entries


def riemann(L, g):
    """Curvature tensor of the Levi-Civita connection, all lower indices."""
    n = L.n
    conn = levi_civita(L, g)
    gam = conn.gamma

    def a_const(i, j, k):
        lo, hi = (i, j) if i < j else (j, i)
        a = L.constants.get((lo, hi), {}).get(k, Fraction(0))
        return a if i < j else -a

    entries = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            # R(e_i, e_j) e_k as a vector, then lower the last index
            for k in range(1, n + 1):
                comp = [Fraction(0)] * n
                for m in range(n):
                    cjm = gam[j - 1][k - 1][m]
                    cim = gam[i - 1][k - 1][m]
                    for l in range(n):
                        comp[l] = (comp[l] + cjm * gam[i - 1][m][l]
                                   - cim * gam[j - 1][m][l])
                for m in range(1, n + 1):
                    am = a_const(i, j, m)
                    if scalar_is_zero(am):
                        continue
                    for l in range(n):
                        comp[l] = comp[l] - am * gam[m - 1][k - 1][l]
                for l in range(k, n + 1):
                    if (i, j) > (k, l):
                        continue
                    acc = Fraction(0)
                    for m in range(n):
                        if not scalar_is_zero(comp[m]):
                            acc = acc + comp[m] * g.gram[m][l - 1]
                    if not scalar_is_zero(acc):
                        entries[(i, j, k, l)] = acc
    return CurvatureTensor(L.space, entries)


def ricci(L, g, mode="general"):
    """Ricci tensor as a symmetric matrix on the frame."""
    if mode == "general":
        return _ricci_general(L, g)
    if mode == "nilpotent":
        return _ricci_nilpotent(L, g)
    raise ValueError("mode must be 'general' or 'nilpotent'")


def _ricci_general(L, g):
    # Ric(Y,Z) = trace of X -> R(X,Y)Z, i.e. g^{il} R_ijkl
    n = L.n
    R = riemann(L, g)
    ginv = dual_metric(g).gram
    out = [[Fraction(0)] * n for _ in range(n)]
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            acc = Fraction(0)
            for i in range(1, n + 1):
                for l in range(1, n + 1):
                    gil = ginv[i - 1][l - 1]
                    if scalar_is_zero(gil):
                        continue
                    acc = acc + gil * R.get(i, j, k, l)
            out[j - 1][k - 1] = acc
            out[k - 1][j - 1] = acc
    return tuple(tuple(r) for r in out)


def _ricci_nilpotent(L, g):
    rep = structure_report(L)
    if not rep.unimodular or not rep.killing_zero:
        raise PreconditionError(
            "nilpotent Ricci mode needs a unimodular algebra "
            "with zero Killing form")
    n = L.n
    h = dual_metric(g)

    dflat = [L.d(musical_flat(g, Vector.basis(L.space, i)))
             for i in range(1, n + 1)]
    ads = [L.ad_matrix(i) for i in range(1, n + 1)]

    def ad_inner(A, B):
        # metric on h* tensor h: <a^j ox e_i, a^l ox e_k> = h^jl g_ik
        acc = Fraction(0)
        for i in range(n):
            for j in range(n):
                if scalar_is_zero(A[i][j]):
                    continue
                for k in range(n):
                    for l in range(n):
                        if scalar_is_zero(B[k][l]):
                            continue
                        acc = acc + h.gram[j][l] * g.gram[i][k] \
                            * A[i][j] * B[k][l]
        return acc

    half = Fraction(1, 2)
    out = [[Fraction(0)] * n for _ in range(n)]
    for u in range(n):
        for v in range(u, n):
            val = half * (form_inner(h, dflat[u], dflat[v])
                          - ad_inner(ads[u], ads[v]))
            out[u][v] = val
            out[v][u] = val
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class EinsteinResult:
    einstein: bool
    lam: object
    scal: object
    ricci: tuple

    @property
    def verdict(self):
        return "Einstein(%s)" % (self.lam,) if self.einstein else "NotEinstein"


def einstein_check(L, g, mode="general"):
    """Decide Ric = lambda g exactly; report lambda and scal = g^ij Ric_ij."""
    n = L.n
    ric = ricci(L, g, mode=mode)
    ginv = dual_metric(g).gram
    scal = Fraction(0)
    for i in range(n):
        for j in range(n):
            if not scalar_is_zero(ginv[i][j]):
                scal = scal + ginv[i][j] * ric[i][j]

    lam = None
    for i in range(n):
        for j in range(n):
            if not scalar_is_zero(g.gram[i][j]):
                lam = _div(ric[i][j], g.gram[i][j])
                break
        if lam is not None:
            break
    if lam is None:
        raise SingularMetricError("metric is zero")
    einstein = all(
        scalar_is_zero(ric[i][j] - lam * g.gram[i][j])
        for i in range(n) for j in range(n))
    if not einstein:
        lam = None
    elif scalar_is_zero(lam):
        lam = Fraction(0)
    return EinsteinResult(einstein=einstein, lam=lam, scal=scal, ricci=ric)


@dataclass(frozen=True)
class ObstructionReport:
    dimM: int
    dimN: int
    dimDerived: int
    dimCenter: int
    inequality_holds: bool


def _radical_dim(gram_rows):
    """dim of the radical of a symmetric bilinear form given by its Gram."""
    if not gram_rows:
        return 0
    return len(kernel_basis(gram_rows))


def obstruction_dims(L, g):
    """Radicals of the metric restricted to ad-images and to exact 2-forms.

    dimM is the radical dimension on span{ad(e_i)} under the product
    metric, dimN the radical dimension on span{de^k} under the induced
    2-form metric; the verdict compares dimM + dimN against
    dim[h,h] - dim z(h).
    """
    n = L.n
    rep = structure_report(L)
    h = dual_metric(g)

    flat_ads = []
    for i in range(1, n + 1):
        A = L.ad_matrix(i)
        flat = [A[r][c] for r in range(n) for c in range(n)]
        if not all(scalar_is_zero(x) for x in flat):
            flat_ads.append((A, flat))
    basis_ads = []
    if flat_ads:
        red, pivots = rref([f for _, f in flat_ads])
        # pick an independent subset of the original ad matrices
        seen = []
        for A, f in flat_ads:
            trial = seen + [f]
            r2, p2 = rref(trial)
            if len(p2) == len(trial):
                seen.append(f)
                basis_ads.append(A)
        assert len(basis_ads) == len(pivots)

    def ad_inner(A, B):
        acc = Fraction(0)
        for i in range(n):
            for j in range(n):
                if scalar_is_zero(A[i][j]):
                    continue
                for k in range(n):
                    for l in range(n):
                        if scalar_is_zero(B[k][l]):
                            continue
                        acc = acc + h.gram[j][l] * g.gram[i][k] \
                            * A[i][j] * B[k][l]
        return acc

    gram_m = [[ad_inner(a, b) for b in basis_ads] for a in basis_ads]
    dim_m = _radical_dim(gram_m)

    exacts = [f for f in L.d1 if not f.is_zero()]
    basis_forms = []
    seen = []
    for f in exacts:
        vec = [f.get((i, j))
               for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        trial = seen + [vec]
        r2, p2 = rref(trial)
        if len(p2) == len(trial):
            seen.append(vec)
            basis_forms.append(f)
    gram_n = [[form_inner(h, a, b) for b in basis_forms] for a in basis_forms]
    dim_n = _radical_dim(gram_n)

    gap = rep.derived.dim - rep.center.dim
    return ObstructionReport(dimM=dim_m, dimN=dim_n,
                             dimDerived=rep.derived.dim,
                             dimCenter=rep.center.dim,
                             inequality_holds=dim_m + dim_n >= gap)
