"""Exact multilinear algebra over a fixed coframe.

Scalars form a small tower with decidable zero testing: arbitrary
precision rationals (fractions.Fraction), the ninth-root extension
Q[d]/(d^9 - D), and sparse multivariate polynomials over Q. Alternating
forms are sparse maps from strictly increasing index tuples to scalars.
The Hodge star is fixed by b ^ star(a) = <b, a> vol for any
nondegenerate metric, definite or not.

Everything here is immutable after construction and safe to share.
"""

from fractions import Fraction
from itertools import combinations

Rational = Fraction

MAX_DIM = 31


class DimensionError(ValueError):
    """Mismatched coframe spaces, degrees or index ranges."""


class RingMismatchError(TypeError):
    """Scalars from incompatible rings were combined."""


class ZeroDivisorError(ZeroDivisionError):
    """Inversion hit a zero divisor in a reducible ninth-root ring."""


class SingularMetricError(ValueError):
    """A nondegenerate metric was required."""


class PreconditionError(ValueError):
    """An operation was called outside its stated hypotheses."""


class FormParseError(ValueError):
    """Malformed form or structure literal; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


# ---------------------------------------------------------------------------
# scalars


def as_fraction(x):
    """Coerce an int, Fraction or 'p/q' string to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise RingMismatchError("cannot coerce %r to a rational" % (x,))


def _iroot(a, k):
    """Floor of the k-th root of a nonnegative integer."""
    if a < 2:
        return a
    x = 1 << -(-a.bit_length() // k)
    while True:
        y = ((k - 1) * x + a // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _rational_kth_root(q, k):
    """The exact rational k-th root of q for odd k, or None (sign-preserving)."""
    q = as_fraction(q)
    sign = -1 if q < 0 else 1
    p, d = abs(q.numerator), q.denominator
    rp, rd = _iroot(p, k), _iroot(d, k)
    if rp ** k == p and rd ** k == d:
        return Fraction(sign * rp, rd)
    return None


def rational_ninth_root(q):
    """The exact rational ninth root of q, or None (sign-preserving)."""
    return _rational_kth_root(q, 9)


_NINE_ZEROS = (Fraction(0),) * 9

# (step, base) of the minimal polynomial x^step - base of the real ninth
# root of D, keyed by D; degree 1 and 3 occur when D is a perfect power
_NR_REDUCTION = {}


def _nr_reduction(modulus):
    red = _NR_REDUCTION.get(modulus)
    if red is None:
        r = _rational_kth_root(modulus, 9)
        if r is not None:
            red = (1, r)
        else:
            c = _rational_kth_root(modulus, 3)
            red = (3, c) if c is not None else (9, modulus)
        _NR_REDUCTION[modulus] = red
    return red


class NinthRoot:
    """An element sum a_i d^i of Q[d]/(d^9 - D), d the real ninth root of D.

    Elements are kept reduced by the minimal polynomial of the real root
    (degree 3 when D is a cube, so d^3 - cbrt(D) also vanishes), which
    makes the ring a field; inversion still raises ZeroDivisorError if a
    nonzero zero divisor ever slips through.
    """

    __slots__ = ("coeffs", "modulus", "_step", "_base")

    def __init__(self, coeffs, modulus):
        modulus = as_fraction(modulus)
        if modulus == 0:
            raise ValueError("ninth-root modulus must be nonzero")
        step, base = _nr_reduction(modulus)
        cs = [as_fraction(c) for c in coeffs]
        while len(cs) > step:
            c = cs.pop()
            cs[len(cs) - step] += c * base
        cs.extend([Fraction(0)] * (9 - len(cs)))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "_step", step)
        object.__setattr__(self, "_base", base)

    def __setattr__(self, name, value):
        raise AttributeError("NinthRoot is immutable")

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def _other_coeffs(self, other):
        if isinstance(other, NinthRoot):
            if other.modulus != self.modulus:
                raise RingMismatchError("ninth-root moduli differ: %s vs %s"
                                        % (self.modulus, other.modulus))
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (as_fraction(other),) + _NINE_ZEROS[1:]
        if isinstance(other, Polynomial):
            raise RingMismatchError("cannot mix ninth-root and polynomial scalars")
        return None

    def __add__(self, other):
        oc = self._other_coeffs(other)
        if oc is None:
            return NotImplemented
        return _nr_make([a + b for a, b in zip(self.coeffs, oc)], self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._other_coeffs(other)
        if oc is None:
            return NotImplemented
        return _nr_make([a - b for a, b in zip(self.coeffs, oc)], self.modulus)

    def __rsub__(self, other):
        oc = self._other_coeffs(other)
        if oc is None:
            return NotImplemented
        return _nr_make([b - a for a, b in zip(self.coeffs, oc)], self.modulus)

    def __neg__(self):
        return NinthRoot(tuple(-c for c in self.coeffs), self.modulus)

    def __mul__(self, other):
        oc = self._other_coeffs(other)
        if oc is None:
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            f = as_fraction(other)
            return _nr_make([c * f for c in self.coeffs], self.modulus)
        out = [Fraction(0)] * 9
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(oc):
                if b == 0:
                    continue
                k = i + j
                if k >= self._step:
                    out[k - self._step] += a * b * self._base
                else:
                    out[k] += a * b
        return _nr_make(out, self.modulus)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse mod the minimal polynomial of the root."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        mod = [-self._base] + [Fraction(0)] * (self._step - 1) + [Fraction(1)]
        g, s = _poly_half_ext_gcd(list(self.coeffs), mod)
        if len(g) != 1:
            raise ZeroDivisorError(
                "zero divisor in Q[d]/(d^9 - %s): %r" % (self.modulus, self))
        c = g[0]
        return _nr_make([x / c for x in s], self.modulus)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = as_fraction(other)
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return _nr_make([c / f for c in self.coeffs], self.modulus)
        if isinstance(other, NinthRoot):
            return self * other.inverse()
        if isinstance(other, Polynomial):
            raise RingMismatchError("cannot mix ninth-root and polynomial scalars")
        return NotImplemented

    def __rtruediv__(self, other):
        inv = self.inverse()
        return inv * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Fraction(1)
        for _ in range(n):
            out = self * out
        return out

    def __eq__(self, other):
        if isinstance(other, NinthRoot):
            return self.modulus == other.modulus and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.coeffs, self.modulus))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "d" if i == 1 else "d^%d" % i
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append("-" + mono)
                else:
                    parts.append("%s*%s" % (c, mono))
        return " + ".join(parts).replace("+ -", "- ")


def _nr_make(coeffs, modulus):
    """Build a NinthRoot, demoting pure-rational values to Fraction."""
    nr = NinthRoot(coeffs, modulus)
    if nr.is_rational():
        return nr.coeffs[0]
    return nr


def ninth_root(modulus):
    """The real ninth root of a nonzero rational, exact over the tower.

    Returns a Fraction when the modulus is a perfect ninth power,
    otherwise the generator of Q[d]/(d^9 - modulus).
    """
    m = as_fraction(modulus)
    if m == 0:
        raise ValueError("ninth root of zero is degenerate here")
    r = rational_ninth_root(m)
    if r is not None:
        return r
    return NinthRoot((0, 1), m)


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_half_ext_gcd(a, b):
    """gcd g and s with s*a = g mod b, over Q[x] as dense Fraction lists."""
    r0, r1 = _poly_trim(list(b)), _poly_trim(list(a))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    return r0, s0


def _poly_divmod(a, b):
    a = list(a)
    out = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and _poly_trim(a):
        shift = len(a) - len(b)
        c = a[-1] / lead
        out[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
        _poly_trim(a)
    return _poly_trim(out), a


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1 if a and b else 0)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)


class Polynomial:
    """Sparse multivariate polynomial over Q with a fixed variable tuple.

    Terms map exponent tuples to nonzero rational coefficients; the zero
    polynomial is the empty map.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms):
        object.__setattr__(self, "vars", tuple(variables))
        nv = len(self.vars)
        clean = {}
        for mono, c in terms.items():
            mono = tuple(mono)
            if len(mono) != nv:
                raise ValueError("monomial arity %d != %d variables"
                                 % (len(mono), nv))
            c = as_fraction(c)
            if c != 0:
                clean[mono] = clean.get(mono, Fraction(0)) + c
        object.__setattr__(self, "terms",
                           {m: c for m, c in clean.items() if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def constant(cls, variables, c):
        c = as_fraction(c)
        if c == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        i = variables.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {mono: Fraction(1)})

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def _coerced(self, other):
        if isinstance(other, Polynomial):
            if other.vars != self.vars:
                raise RingMismatchError("polynomial variable sets differ")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.vars, other)
        if isinstance(other, NinthRoot):
            raise RingMismatchError("cannot mix ninth-root and polynomial scalars")
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(self.vars, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, Fraction(0)) - c
        return Polynomial(self.vars, out)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Polynomial(self.vars, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = as_fraction(other)
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return Polynomial(self.vars,
                              {m: c / f for m, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Polynomial.constant(self.vars, 1)
        for _ in range(n):
            out = out * self
        return out

    def exact_div(self, other):
        """Exact division by another polynomial; raises if not divisible."""
        o = self._coerced(other)
        if o is None or o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        okey = max(o.terms, key=lambda m: (sum(m), m))
        oc = o.terms[okey]
        rem = dict(self.terms)
        out = {}
        while rem:
            m = max(rem, key=lambda k: (sum(k), k))
            q = tuple(a - b for a, b in zip(m, okey))
            if any(e < 0 for e in q):
                raise ValueError("polynomial division is not exact")
            c = rem[m] / oc
            out[q] = out.get(q, Fraction(0)) + c
            for m2, c2 in o.terms.items():
                mm = tuple(a + b for a, b in zip(q, m2))
                v = rem.get(mm, Fraction(0)) - c * c2
                if v == 0:
                    rem.pop(mm, None)
                else:
                    rem[mm] = v
        return Polynomial(self.vars, out)

    def subs(self, assignment):
        """Fully evaluate at rational values, one per variable."""
        vals = [as_fraction(assignment[v]) for v in self.vars]
        out = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                for _ in range(e):
                    t *= v
            out += t
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if self.is_zero():
                return other == 0
            zero = (0,) * len(self.vars)
            return set(self.terms) == {zero} and self.terms[zero] == other
        return NotImplemented

    def __hash__(self):
        if self.is_zero():
            return hash(Fraction(0))
        zero = (0,) * len(self.vars)
        if set(self.terms) == {zero}:
            return hash(self.terms[zero])
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda k: (-sum(k), k)):
            c = self.terms[m]
            factors = []
            for v, e in zip(self.vars, m):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append("%s^%d" % (v, e))
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("%s*%s" % (c, "*".join(factors)))
        return " + ".join(parts).replace("+ -", "- ")


def scalar_is_zero(x):
    """Exact zero test across the scalar tower."""
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, (NinthRoot, Polynomial)):
        return x.is_zero()
    raise RingMismatchError("not a scalar: %r" % (x,))


def _interval_mul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def scalar_sign(x):
    """Sign (-1, 0, 1) of a rational or ninth-root scalar, exactly.

    Ninth-root signs come from interval refinement of the real root;
    refinement is capped defensively so a hypothetical element that is
    ring-nonzero yet zero as a real number raises instead of looping.
    """
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, Polynomial):
        raise RingMismatchError("polynomial scalars are not ordered")
    if not isinstance(x, NinthRoot):
        raise RingMismatchError("not a scalar: %r" % (x,))
    if x.is_zero():
        return 0
    if x.is_rational():
        return scalar_sign(x.coeffs[0])
    mag = abs(x.modulus)
    neg = x.modulus < 0
    lo, hi = (mag, Fraction(1)) if mag < 1 else (Fraction(1), mag)
    for _ in range(60):
        for _ in range(6):
            mid = (lo + hi) / 2
            if mid ** 9 <= mag:
                lo = mid
            else:
                hi = mid
        root = (-hi, -lo) if neg else (lo, hi)
        val = (x.coeffs[8], x.coeffs[8])
        for i in range(7, -1, -1):
            val = _interval_mul(val, root)
            val = (val[0] + x.coeffs[i], val[1] + x.coeffs[i])
        if val[0] > 0:
            return 1
        if val[1] < 0:
            return -1
    raise ArithmeticError(
        "sign of %r undecided after refinement; the element may evaluate "
        "to zero in a reducible ninth-root ring" % (x,))


# ---------------------------------------------------------------------------
# coframes, forms, vectors


class Coframe:
    """A fixed n-dimensional coframe with printable labels."""

    __slots__ = ("n", "labels")

    def __init__(self, n, labels=None, letter="e"):
        if not 1 <= n <= MAX_DIM:
            raise DimensionError("dimension must be in 1..%d" % MAX_DIM)
        if labels is None:
            labels = tuple("%s%d" % (letter, i) for i in range(1, n + 1))
        labels = tuple(labels)
        if len(labels) != n:
            raise DimensionError("expected %d labels" % n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("Coframe is immutable")

    @property
    def letter(self):
        return self.labels[0].rstrip("0123456789")

    def __eq__(self, other):
        return (isinstance(other, Coframe) and self.n == other.n
                and self.labels == other.labels)

    def __hash__(self):
        return hash((self.n, self.labels))

    def __repr__(self):
        return "Coframe(%d, %s..%s)" % (self.n, self.labels[0], self.labels[-1])


def _sort_indices(idx):
    """Sort an index tuple, returning (tuple, sign); sign 0 on repeats."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return tuple(idx), 0
    return tuple(idx), sign


def _perm_sign(seq):
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def _ring_key(x):
    if isinstance(x, (int, Fraction)):
        return None
    if isinstance(x, NinthRoot):
        return ("ninth-root", x.modulus)
    if isinstance(x, Polynomial):
        return ("polynomial", x.vars)
    raise RingMismatchError("not a scalar: %r" % (x,))


class KForm:
    """A degree-k alternating form over a coframe, sparse and exact."""

    __slots__ = ("space", "degree", "coeffs")

    def __init__(self, space, degree, coeffs=None):
        if not isinstance(space, Coframe):
            raise DimensionError("space must be a Coframe")
        if not 0 <= degree <= space.n:
            raise DimensionError("degree %d out of range 0..%d"
                                 % (degree, space.n))
        clean = {}
        ring = None
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DimensionError("index tuple %r has wrong length" % (idx,))
            if any(not 1 <= i <= space.n for i in idx):
                raise DimensionError("index out of range in %r" % (idx,))
            key, sign = _sort_indices(idx)
            if sign == 0:
                raise DimensionError("repeated index in %r" % (idx,))
            if isinstance(c, int):
                c = Fraction(c)
            k = _ring_key(c)
            if k is not None:
                if ring is not None and k != ring:
                    raise RingMismatchError("mixed scalar rings in one form")
                ring = k
            if sign < 0:
                c = -c
            if key in clean:
                c = clean[key] + c
            if scalar_is_zero(c):
                clean.pop(key, None)
            else:
                clean[key] = c
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("KForm is immutable")

    @classmethod
    def zero(cls, space, degree):
        return cls(space, degree, {})

    @classmethod
    def basis(cls, space, idx):
        return cls(space, len(tuple(idx)), {tuple(idx): Fraction(1)})

    def is_zero(self):
        return not self.coeffs

    def get(self, idx):
        key, sign = _sort_indices(tuple(idx))
        c = self.coeffs.get(key, Fraction(0))
        return -c if sign < 0 else c

    def items(self):
        return self.coeffs.items()

    def _check_same(self, other):
        if not isinstance(other, KForm):
            raise DimensionError("expected a KForm")
        if other.space != self.space:
            raise DimensionError("coframe spaces differ")
        if other.degree != self.degree:
            raise DimensionError("degrees differ: %d vs %d"
                                 % (self.degree, other.degree))

    def __add__(self, other):
        self._check_same(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return KForm(self.space, self.degree, out)

    def __sub__(self, other):
        self._check_same(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) - c
        return KForm(self.space, self.degree, out)

    def __neg__(self):
        return KForm(self.space, self.degree,
                     {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, KForm):
            raise TypeError("use wedge() for form products")
        return KForm(self.space, self.degree,
                     {k: c * scalar for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return KForm(self.space, self.degree,
                     {k: c / scalar for k, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (self.space == other.space and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.space, self.degree,
                     frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        letter = self.space.letter
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            mono = letter + "".join(str(i) for i in idx) if idx else "1"
            if isinstance(c, Fraction):
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append("-" + mono)
                else:
                    parts.append("%s*%s" % (c, mono))
            else:
                parts.append("(%r)*%s" % (c, mono))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


class Vector:
    """A frame vector: n scalar components against the dual frame."""

    __slots__ = ("space", "components")

    def __init__(self, space, components):
        if not isinstance(space, Coframe):
            raise DimensionError("space must be a Coframe")
        comps = tuple(Fraction(c) if isinstance(c, int) else c
                      for c in components)
        if len(comps) != space.n:
            raise DimensionError("expected %d components" % space.n)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("Vector is immutable")

    @classmethod
    def basis(cls, space, i):
        if not 1 <= i <= space.n:
            raise DimensionError("basis index out of range")
        return cls(space, tuple(Fraction(1 if j == i else 0)
                                for j in range(1, space.n + 1)))

    def __add__(self, other):
        if not isinstance(other, Vector) or other.space != self.space:
            raise DimensionError("vector spaces differ")
        return Vector(self.space, tuple(a + b for a, b in
                                        zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, Vector) or other.space != self.space:
            raise DimensionError("vector spaces differ")
        return Vector(self.space, tuple(a - b for a, b in
                                        zip(self.components, other.components)))

    def __neg__(self):
        return Vector(self.space, tuple(-c for c in self.components))

    def __mul__(self, scalar):
        return Vector(self.space, tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def is_zero(self):
        return all(scalar_is_zero(c) for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, self.components))

    def __repr__(self):
        parts = []
        for lbl, c in zip(self.space.labels, self.components):
            if scalar_is_zero(c):
                continue
            if c == 1:
                parts.append(lbl)
            elif c == -1:
                parts.append("-" + lbl)
            elif isinstance(c, Fraction):
                parts.append("%s*%s" % (c, lbl))
            else:
                parts.append("(%r)*%s" % (c, lbl))
        return (" + ".join(parts)).replace("+ -", "- ") if parts else "0"


# ---------------------------------------------------------------------------
# operations


def wedge(a, b):
    """Exterior product a ^ b with exact sign bookkeeping."""
    if not isinstance(a, KForm) or not isinstance(b, KForm):
        raise DimensionError("wedge expects two KForms")
    if a.space != b.space:
        raise DimensionError("coframe spaces differ")
    n = a.space.n
    deg = a.degree + b.degree
    if deg > n:
        return KForm(a.space, n, {})
    out = {}
    for ia, ca in a.coeffs.items():
        sa = set(ia)
        for ib, cb in b.coeffs.items():
            if sa & set(ib):
                continue
            key, sign = _sort_indices(ia + ib)
            c = ca * cb
            if sign < 0:
                c = -c
            v = out.get(key, Fraction(0)) + c
            if scalar_is_zero(v):
                out.pop(key, None)
            else:
                out[key] = v
    return KForm(a.space, deg, out)


def contract(v, a):
    """Interior product of a vector into a form of degree >= 1."""
    if not isinstance(v, Vector) or not isinstance(a, KForm):
        raise DimensionError("contract expects (Vector, KForm)")
    if v.space != a.space:
        raise DimensionError("coframe spaces differ")
    if a.degree == 0:
        raise DimensionError("cannot contract a 0-form")
    out = {}
    for idx, c in a.coeffs.items():
        for pos, i in enumerate(idx):
            comp = v.components[i - 1]
            if scalar_is_zero(comp):
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = comp * c
            if pos % 2:
                term = -term
            val = out.get(rest, Fraction(0)) + term
            if scalar_is_zero(val):
                out.pop(rest, None)
            else:
                out[rest] = val
    return KForm(a.space, a.degree - 1, out)


def _gram_rows(g):
    rows = getattr(g, "gram", g)
    return [list(r) for r in rows]


def _det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def det_matrix(m):
    """Determinant over the scalar tower; division-free for polynomials."""
    k = len(m)
    if k == 0:
        return Fraction(1)
    if k == 1:
        return m[0][0]
    if k == 2:
        return _det2(m)
    if k == 3:
        return _det3(m)
    if any(isinstance(c, Polynomial) for row in m for c in row):
        return _det_expand(m)
    try:
        return _det_gauss(m)
    except ZeroDivisorError:
        return _det_expand(m)


def _det_gauss(m):
    m = [row[:] for row in m]
    k = len(m)
    det = Fraction(1)
    for col in range(k):
        piv = None
        for r in range(col, k):
            if not scalar_is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det = det * pv
        for r in range(col + 1, k):
            if scalar_is_zero(m[r][col]):
                continue
            f = m[r][col] / pv
            for c in range(col, k):
                m[r][c] = m[r][c] - f * m[col][c]
    return det


def _det_expand(m, _cols=None, _row=0, _memo=None):
    if _cols is None:
        _cols = tuple(range(len(m)))
        _memo = {}
    if not _cols:
        return Fraction(1)
    key = _cols
    if key in _memo:
        return _memo[key]
    out = Fraction(0)
    row = len(m) - len(_cols)
    for pos, c in enumerate(_cols):
        a = m[row][c]
        if scalar_is_zero(a):
            continue
        sub = _det_expand(m, _cols[:pos] + _cols[pos + 1:], row + 1, _memo)
        term = a * sub
        out = out - term if pos % 2 else out + term
    _memo[key] = out
    return out


def form_inner(g, a, b):
    """Inner product on k-forms induced by the dual Gram matrix g.

    Extends the metric by the Gram determinant rule
    <a1^..^ak, b1^..^bk> = det(<ai, bj>).
    """
    if not isinstance(a, KForm) or not isinstance(b, KForm):
        raise DimensionError("form_inner expects KForms")
    if a.space != b.space:
        raise DimensionError("coframe spaces differ")
    if a.degree != b.degree:
        raise DimensionError("degrees differ: %d vs %d" % (a.degree, b.degree))
    gram = _gram_rows(g)
    out = Fraction(0)
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sub = [[gram[i - 1][j - 1] for j in ib] for i in ia]
            d = det_matrix(sub)
            if scalar_is_zero(d):
                continue
            out = out + ca * cb * d
    return out


def hodge_star(g, vol, a, _skip_check=False):
    """Hodge dual: the unique (n-k)-form with b ^ star(a) = <b, a> vol."""
    if not isinstance(a, KForm):
        raise DimensionError("hodge_star expects a KForm")
    space = a.space
    n = space.n
    if not isinstance(vol, KForm) or vol.degree != n or vol.space != space:
        raise DimensionError("vol must be an n-form on the same coframe")
    full = tuple(range(1, n + 1))
    volc = vol.coeffs.get(full)
    if volc is None:
        raise DimensionError("vol must be nonzero")
    gram = _gram_rows(g)
    if not _skip_check and scalar_is_zero(det_matrix(gram)):
        raise SingularMetricError("metric is degenerate")
    k = a.degree
    out = {}
    for idx in combinations(full, k):
        val = Fraction(0)
        for ib, cb in a.coeffs.items():
            sub = [[gram[i - 1][j - 1] for j in ib] for i in idx]
            d = det_matrix(sub)
            if not scalar_is_zero(d):
                val = val + cb * d
        if scalar_is_zero(val):
            continue
        comp = tuple(i for i in full if i not in idx)
        sign = _perm_sign(idx + comp)
        c = val * volc
        if sign < 0:
            c = -c
        out[comp] = c
    return KForm(space, n - k, out)


# ---------------------------------------------------------------------------
# form literals


def parse_form(text, space, degree=None):
    """Parse a form literal like 'e123 + 1/2*e257 - 2*e157'.

    Terms follow [sign][coeff*]<letter><digits> with single-digit
    indices; '0' denotes the zero form (degree taken from the degree
    argument, default 0).
    """
    letter = space.letter
    s = text
    pos = 0

    def skip_ws(p):
        while p < len(s) and s[p] in " \t":
            p += 1
        return p

    pos = skip_ws(pos)
    if pos < len(s) and s[pos] == "0":
        tail = skip_ws(pos + 1)
        if tail == len(s):
            return KForm(space, degree or 0, {})
        raise FormParseError("unexpected text after '0'", tail)
    terms = {}
    first = True
    seen_degree = None
    while pos < len(s):
        sign = 1
        if s[pos] == "+":
            pos = skip_ws(pos + 1)
        elif s[pos] == "-":
            sign = -1
            pos = skip_ws(pos + 1)
        elif not first:
            raise FormParseError("expected '+' or '-'", pos)
        first = False
        start = pos
        while pos < len(s) and (s[pos].isdigit() or s[pos] == "/"):
            pos += 1
        coeff = Fraction(1)
        if pos > start:
            try:
                coeff = Fraction(s[start:pos])
            except (ValueError, ZeroDivisionError):
                raise FormParseError("bad coefficient %r" % s[start:pos], start)
            if pos >= len(s) or s[pos] != "*":
                raise FormParseError("expected '*' after coefficient", pos)
            pos += 1
        if not s.startswith(letter, pos):
            raise FormParseError("expected %r term" % letter, pos)
        pos += len(letter)
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        digits = s[start:pos]
        if not digits:
            raise FormParseError("expected indices after %r" % letter, start)
        idx = tuple(int(ch) for ch in digits)
        if any(not 1 <= i <= space.n for i in idx):
            raise FormParseError("index out of range in %r" % digits, start)
        key, ssign = _sort_indices(idx)
        if ssign == 0:
            raise FormParseError("repeated index in %r" % digits, start)
        if seen_degree is None:
            seen_degree = len(idx)
        elif seen_degree != len(idx):
            raise FormParseError("mixed degrees in one literal", start)
        terms[key] = terms.get(key, Fraction(0)) + sign * ssign * coeff
        pos = skip_ws(pos)
    if seen_degree is None:
        raise FormParseError("empty literal", 0)
    if degree is not None and seen_degree != degree:
        raise FormParseError("literal has degree %d, expected %d"
                             % (seen_degree, degree), 0)
    return KForm(space, seen_degree, terms)


# ---------------------------------------------------------------------------
# exact linear algebra over the tower (shared by the sibling modules)


def mat_identity(n):
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, mid, cols = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * cols for _ in range(rows)]
    for i in range(rows):
        for k in range(mid):
            x = a[i][k]
            if scalar_is_zero(x):
                continue
            for j in range(cols):
                out[i][j] = out[i][j] + x * b[k][j]
    return out


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for rr in range(r, nrows):
            if not scalar_is_zero(m[rr][c]):
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for rr in range(nrows):
            if rr != r and not scalar_is_zero(m[rr][c]):
                f = m[rr][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r] + [[Fraction(0)] * ncols for _ in range(nrows - r)], pivots


def kernel_basis(a):
    """Basis of the right kernel of a matrix over a field scalar ring."""
    if not a:
        return []
    ncols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        out.append(v)
    return out


def solve_linear(a, b):
    """One exact solution x of a x = b, or None when inconsistent."""
    if not a:
        return [] if all(scalar_is_zero(x) for x in b) else None
    ncols = len(a[0])
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def invert_matrix(a):
    """Exact inverse over a field scalar ring; raises when singular."""
    n = len(a)
    aug = [list(row) + list(idrow) for row, idrow in zip(a, mat_identity(n))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMetricError("matrix is singular")
    return [row[n:] for row in red[:n]]


def adjugate(a):
    """Adjugate matrix over any scalar ring (division-free cofactors)."""
    n = len(a)
    if n == 1:
        return [[Fraction(1)]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = det_matrix(minor)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof
    return out
