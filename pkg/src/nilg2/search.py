"""Multi-start Newton search for Einstein pseudo-metrics, with exact
certification of the survivors.

The ansatz is a triangular change of frame f_k = e_k + sum_{i>k} p_k^i e_i
together with a diagonal Gram g(f_k, f_k) = d_k whose signs are prescribed.
Einstein then means the off-diagonal Ricci entries vanish and the ratios
Ric_kk / d_k agree, which is a square system once the overall scale is fixed
by pinning the last diagonal value to its sign. Roots are hunted in floats,
polished in high precision, rounded to rationals, and finally re-checked by
the exact curvature of the metric module; only candidates that survive the
exact check are reported as Einstein.
"""

from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath
import numpy as np

from .exterior import DimensionError, PreconditionError, SingularMetricError, \
    invert_matrix
from .liealg import change_of_basis
from .metric import PseudoMetric, einstein_check

DEGENERATE = "Degenerate"
NON_EINSTEIN = "NonEinstein"
EINSTEIN_NUMERIC = "EinsteinNumeric"
EINSTEIN_CERTIFIED = "EinsteinCertified"


@dataclass(frozen=True)
class FrameParametrization:
    """Unknown slots of the triangular frame ansatz on a fixed algebra."""

    algebra: object
    names: tuple
    positions: tuple

    @property
    def p_count(self):
        return len(self.names)

    @property
    def unknown_count(self):
        # frame unknowns plus one diagonal Gram value per frame vector
        return len(self.names) + self.algebra.n

    def frame_matrix(self, p):
        """Rows of f_1, ..., f_n in the original frame for concrete p."""
        n = self.algebra.n
        if len(p) != len(self.names):
            raise DimensionError("expected %d frame unknowns" % len(self.names))
        m = [[Fraction(1) if a == b else Fraction(0) for b in range(n)]
             for a in range(n)]
        for val, (k, i) in zip(p, self.positions):
            m[k - 1][i - 1] = val
        return m


def parametrize(L):
    """Triangular ansatz f_k = e_k + sum_{i>k} p_k^i e_i for the algebra L."""
    n = L.n
    fmt = "p%d_%d" if n > 9 else "p%d%d"
    names, positions = [], []
    for k in range(1, n + 1):
        for i in range(k + 1, n + 1):
            names.append(fmt % (k, i))
            positions.append((k, i))
    return FrameParametrization(L, tuple(names), tuple(positions))


@dataclass(frozen=True)
class Candidate:
    """One point of the search space together with its classification."""

    p: tuple
    diag: tuple
    residual: float
    status: str
    lam: object = None
    exact_p: tuple = None
    exact_diag: tuple = None
    note: str = ""


@dataclass(frozen=True)
class NewtonOptions:
    max_iter: int = 80
    damping: float = 1.0
    residual_tol: float = 1e-11


@dataclass(frozen=True)
class ReconstructionOptions:
    max_denominator_bits: int = 64
    precision_dps: int = 70
    frame_snap_denominator: int = 10000


@dataclass(frozen=True)
class SearchConfig:
    """Search space and numeric budgets; identical configs replay bitwise."""

    algebra: object
    sign_pattern: tuple
    seeds: tuple = (0, 1, 2, 3, 4, 5, 6, 7)
    newton: NewtonOptions = NewtonOptions()
    reconstruction: ReconstructionOptions = ReconstructionOptions()
    degeneracy_tol: float = 1e-8

    def __post_init__(self):
        n = self.algebra.n
        signs = tuple(int(s) for s in self.sign_pattern)
        if len(signs) != n:
            raise DimensionError("sign pattern needs %d entries" % n)
        if any(s not in (1, -1) for s in signs):
            raise ValueError("sign pattern entries must be +1 or -1")
        if self.newton.max_iter < 0:
            raise ValueError("iteration budget must be nonnegative")
        if self.newton.damping <= 0 or self.newton.residual_tol <= 0:
            raise ValueError("Newton damping and tolerance must be positive")
        if self.reconstruction.max_denominator_bits <= 0 \
                or self.reconstruction.precision_dps <= 0 \
                or self.reconstruction.frame_snap_denominator <= 0:
            raise ValueError("reconstruction budgets must be positive")
        if self.degeneracy_tol <= 0:
            raise ValueError("degeneracy tolerance must be positive")
        object.__setattr__(self, "sign_pattern", signs)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


def _structure_tensor(L):
    """Dense [e_i, e_j] = A[i, j, k] e_k as a float array."""
    n = L.n
    A = np.zeros((n, n, n))
    for (i, j), targets in L.constants.items():
        for k, c in targets.items():
            A[i - 1, j - 1, k - 1] = float(c)
            A[j - 1, i - 1, k - 1] = -float(c)
    return A


def _ricci_float(A, M, diag):
    """Ricci matrix in the frame with rows M and constant diagonal Gram."""
    Minv = np.linalg.inv(M)
    Af = np.einsum('ai,bj,ijk,kc->abc', M, M, A, Minv)
    # Koszul for a constant Gram: 2 g(nabla_a f_b, f_c) = B_abc - B_bca + B_cab
    B = Af * diag[np.newaxis, np.newaxis, :]
    rhs = 0.5 * (B - np.transpose(B, (2, 0, 1)) + np.transpose(B, (1, 2, 0)))
    Gamma = rhs / diag[np.newaxis, np.newaxis, :]
    t1 = np.einsum('bcm,ame->abce', Gamma, Gamma)
    t2 = np.einsum('acm,bme->abce', Gamma, Gamma)
    t3 = np.einsum('abm,mce->abce', Af, Gamma)
    return np.einsum('abca->bc', t1 - t2 - t3)


def _residual_vector(A, M, diag):
    """Off-diagonal Ricci entries, then consecutive proportionality gaps."""
    n = len(diag)
    ric = _ricci_float(A, M, diag)
    off = [ric[a, b] for a in range(n) for b in range(a + 1, n)]
    cross = [ric[k, k] * diag[k + 1] - ric[k + 1, k + 1] * diag[k]
             for k in range(n - 1)]
    return np.array(off + cross), ric


@dataclass(frozen=True)
class ResidualReport:
    offdiagonal: tuple
    ratios: tuple
    spread: float
    degenerate: bool


def residual_system(L, candidate):
    """Float residuals of a candidate: off-diagonal Ricci entries and the
    spread of the would-be Einstein ratios Ric_kk / d_k."""
    par = parametrize(L)
    if len(candidate.diag) != L.n:
        raise DimensionError("expected %d diagonal values" % L.n)
    M = np.array(par.frame_matrix([float(v) for v in candidate.p]), float)
    diag = np.array([float(v) for v in candidate.diag])
    dmax = np.max(np.abs(diag))
    if dmax == 0.0 or np.min(np.abs(diag)) < 1e-150 * dmax:
        return ResidualReport((), (), np.inf, True)
    with np.errstate(all="ignore"):
        ric = _ricci_float(_structure_tensor(L), M, diag)
    if not np.all(np.isfinite(ric)):
        return ResidualReport((), (), np.inf, True)
    n = L.n
    off = tuple(ric[a, b] for a in range(n) for b in range(a + 1, n))
    ratios = tuple(ric[k, k] / diag[k] for k in range(n))
    return ResidualReport(off, ratios, max(ratios) - min(ratios), False)


def _classify(par, A, x, resid, config):
    """Candidate for a final iterate, applying both discard rules: a Gram
    diagonal value near zero, or a Ricci diagonal entry near zero."""
    n = par.algebra.n
    pc = par.p_count
    p = tuple(float(v) for v in x[:pc])
    diag = tuple(float(v) for v in x[pc:]) + (float(config.sign_pattern[-1]),)
    dg = np.array(diag)
    dmax = np.max(np.abs(dg))
    degenerate = dmax == 0.0 \
        or np.min(np.abs(dg)) < config.degeneracy_tol * dmax
    if not degenerate:
        M = np.eye(n)
        for val, (k, i) in zip(p, par.positions):
            M[k - 1, i - 1] = val
        with np.errstate(all="ignore"):
            ric = _ricci_float(A, M, dg)
        if not np.all(np.isfinite(ric)):
            degenerate = True
        else:
            rd = np.abs(np.diagonal(ric))
            degenerate = np.min(rd) < config.degeneracy_tol \
                * max(1.0, float(np.max(rd)))
    if degenerate:
        status = DEGENERATE
    elif resid < config.newton.residual_tol:
        status = EINSTEIN_NUMERIC
    else:
        status = NON_EINSTEIN
    return Candidate(p=p, diag=diag, residual=float(resid), status=status)


def _cs_jacobian(fun, x, m):
    """Complex-step Jacobian; exact to machine precision for our rational
    residual chain, so Newton keeps its quadratic tail."""
    J = np.empty((m, len(x)))
    h = 1e-20
    for j in range(len(x)):
        xp = x.astype(complex)
        xp[j] += 1j * h
        J[:, j] = fun(xp).imag / h
    return J


def _norm(F):
    return float(np.max(np.abs(F))) if np.all(np.isfinite(F)) else np.inf


def _newton(fun, x0, opts):
    """Damped Gauss-Newton with min-norm steps and a backtracking max-norm
    line search; min-norm keeps gauge-degenerate solution manifolds stable."""
    x = np.asarray(x0, float)
    with np.errstate(all="ignore"):
        F = fun(x)
        best = _norm(F)
        for _ in range(opts.max_iter):
            if best < opts.residual_tol or not np.isfinite(best):
                break
            J = _cs_jacobian(fun, x, len(F))
            if not np.all(np.isfinite(J)):
                break
            dx = np.linalg.lstsq(J, -F, rcond=1e-12)[0]
            if not np.all(np.isfinite(dx)):
                break
            step = opts.damping
            improved = False
            for _ in range(40):
                xn = x + step * dx
                Fn = fun(xn)
                fn = _norm(Fn)
                if fn < best:
                    x, F, best = xn, Fn, fn
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
    return x, best


def _start_vector(obj, par):
    """Flatten a warm start: a Candidate or a raw unknown vector."""
    n = par.algebra.n
    if isinstance(obj, Candidate):
        vals = [float(v) for v in obj.p] + [float(v) for v in obj.diag[:n - 1]]
    else:
        vals = [float(v) for v in obj]
    if len(vals) != par.p_count + n - 1:
        raise DimensionError(
            "expected %d unknowns" % (par.p_count + n - 1))
    return np.array(vals)


def solve(config, starts=None):
    """Hunt for Einstein candidates from warm starts, then seeded random
    starts; deterministic and order-stable in the seed list."""
    L = config.algebra
    n = L.n
    par = parametrize(L)
    if config.newton.max_iter == 0:
        return []
    A = _structure_tensor(L)
    signs = np.array(config.sign_pattern, float)
    pc = par.p_count

    def fun(x):
        M = np.eye(n, dtype=x.dtype)
        for val, (k, i) in zip(x[:pc], par.positions):
            M[k - 1, i - 1] = val
        dg = np.empty(n, dtype=x.dtype)
        dg[:n - 1] = x[pc:]
        dg[n - 1] = signs[n - 1]
        return _residual_vector(A, M, dg)[0]

    out = []
    for start in list(starts) if starts is not None else []:
        x, resid = _newton(fun, _start_vector(start, par), config.newton)
        out.append(_classify(par, A, x, resid, config))
    for seed in config.seeds:
        rng = np.random.default_rng(seed)
        p0 = rng.uniform(-2.0, 2.0, pc)
        mag = rng.uniform(0.25, 4.0, n - 1)
        x0 = np.concatenate([p0, signs[:n - 1] * mag])
        x, resid = _newton(fun, x0, config.newton)
        out.append(_classify(par, A, x, resid, config))
    return out


def _mpf_to_fraction(x):
    if not hasattr(x, "_mpf_"):
        x = mpmath.mpf(x)
    # read the raw mantissa; mpf(x) would re-round to the ambient precision
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(float(v))


def _mp_fun(L, par):
    """Residual closure in the current mpmath precision; takes the full
    unknown vector with the last diagonal value appended by the caller."""
    n = L.n
    pc = par.p_count
    zero = mpmath.mpf(0)
    consts = [(i - 1, j - 1, k - 1, mpmath.mpf(c.numerator) / c.denominator)
              for (i, j), targets in L.constants.items()
              for k, c in targets.items()]

    def fun(x, last):
        M = mpmath.eye(n)
        for val, (k, i) in zip(x[:pc], par.positions):
            M[k - 1, i - 1] = val
        Minv = M ** -1
        d = list(x[pc:]) + [last]
        Af = [[[zero] * n for _ in range(n)] for _ in range(n)]
        for i, j, k, c in consts:
            for a in range(n):
                for b in range(n):
                    coef = M[a, i] * M[b, j] - M[a, j] * M[b, i]
                    if coef:
                        cc = coef * c
                        row = Af[a][b]
                        for e in range(n):
                            if Minv[k, e]:
                                row[e] += cc * Minv[k, e]
        rhs = [[[(Af[a][b][c2] * d[c2] - Af[b][c2][a] * d[a]
                  + Af[c2][a][b] * d[b]) / 2
                 for c2 in range(n)] for b in range(n)] for a in range(n)]
        Gam = [[[rhs[a][b][c2] / d[c2] for c2 in range(n)]
                for b in range(n)] for a in range(n)]
        tr = [sum(Gam[a][m][a] for a in range(n)) for m in range(n)]
        ric = [[zero] * n for _ in range(n)]
        for b in range(n):
            for c2 in range(n):
                acc = sum(Gam[b][c2][m] * tr[m] for m in range(n))
                for a in range(n):
                    for m in range(n):
                        acc -= Gam[a][c2][m] * Gam[b][m][a]
                        acc -= Af[a][b][m] * Gam[m][c2][a]
                ric[b][c2] = acc
        out = [ric[a][b] for a in range(n) for b in range(a + 1, n)]
        out += [ric[k][k] * d[k + 1] - ric[k + 1][k + 1] * d[k]
                for k in range(n - 1)]
        return out

    return fun


def _polish(L, par, base, free, sign_last, options):
    """Levenberg-Marquardt refinement of the coordinates listed in free,
    the rest of base held fixed; returns the refined free values and the
    final and target residual norms."""
    with mpmath.workdps(options.precision_dps):
        fun = _mp_fun(L, par)
        last = mpmath.mpf(sign_last)
        x = [_to_mpf(v) for v in base]
        target = mpmath.mpf(10) ** -(options.precision_dps * 2 // 3)
        hstep = mpmath.mpf(10) ** -(options.precision_dps // 2)
        try:
            F = fun(x, last)
            fn = max(abs(v) for v in F)
            for _ in range(16):
                if fn < target:
                    break
                m = len(F)
                J = mpmath.zeros(m, len(free))
                for col, idx in enumerate(free):
                    xp = list(x)
                    h = hstep * max(1, abs(xp[idx]))
                    xp[idx] += h
                    Fp = fun(xp, last)
                    for row in range(m):
                        J[row, col] = (Fp[row] - F[row]) / h
                # normal equations damped by the residual norm itself, so
                # null directions of a gauge-degenerate system stay put
                A = J.T * J
                for t in range(len(free)):
                    A[t, t] += fn
                rhs = J.T * mpmath.matrix([-v for v in F])
                dx = mpmath.lu_solve(A, rhs)
                step = mpmath.mpf(1)
                improved = False
                for _ in range(20):
                    xn = list(x)
                    for col, idx in enumerate(free):
                        xn[idx] += step * dx[col]
                    Fn = fun(xn, last)
                    fnn = max(abs(v) for v in Fn)
                    if fnn < fn:
                        x, F, fn = xn, Fn, fnn
                        improved = True
                        break
                    step /= 2
                if not improved:
                    break
        except ZeroDivisionError:
            # a step crossed a null Gram value; report the miss upstream
            fn = target + 1
        return [x[idx] for idx in free], fn, target


def _mp_residual_ok(L, par, full, sign_last, options):
    """High-precision residual filter for an exact candidate point; cheap
    insurance before committing to exact curvature arithmetic."""
    with mpmath.workdps(options.precision_dps):
        fun = _mp_fun(L, par)
        try:
            F = fun([_to_mpf(v) for v in full], mpmath.mpf(sign_last))
        except ZeroDivisionError:
            return False
        fn = max(abs(v) for v in F)
        # true rational solutions sit at precision noise; a wrong snap of an
        # on-manifold point is off the variety by about its denominator bound
        return fn < mpmath.mpf(10) ** -(options.precision_dps - 15)


def _exact_verdict(L, par, exact_p, exact_d, sign_last, rec, candidate,
                   resid):
    """Exact Einstein check of a reconstructed rational point, or None."""
    n = L.n
    exact_p = tuple(exact_p)
    if not _mp_residual_ok(L, par, list(exact_p) + list(exact_d), sign_last,
                           rec):
        return None
    exact_diag = tuple(exact_d) + (Fraction(sign_last),)
    if any(v == 0 for v in exact_diag):
        return None
    # restate the algebra in the candidate frame, where the Gram is diagonal
    M = par.frame_matrix(exact_p)
    Minv = invert_matrix([list(r) for r in M])
    cob = [[Minv[b][a] for b in range(n)] for a in range(n)]
    Lf = change_of_basis(L, cob)
    try:
        g = PseudoMetric.diagonal(Lf.space, exact_diag)
        result = einstein_check(Lf, g, mode="general")
    except (SingularMetricError, ZeroDivisionError):
        return None
    if not result.einstein:
        return None
    return replace(candidate, residual=float(resid),
                   status=EINSTEIN_CERTIFIED, lam=result.lam,
                   exact_p=exact_p, exact_diag=exact_diag, note="")


def certify(L, candidate, reconstruction=None, residual_tol=1e-9):
    """Promote a numeric candidate to an exact Einstein verdict, or downgrade
    it honestly. Success means a reconstructed rational metric at the
    candidate passes the exact curvature check; the reported lambda is exact.

    Two reconstructions are tried: polishing every unknown, which suits
    isolated solutions, and snapping the frame to small rationals before
    polishing the Gram alone, which suits solutions that sit on a gauge
    orbit of frame symmetries."""
    rec = reconstruction if reconstruction is not None \
        else ReconstructionOptions()
    if residual_tol <= 0:
        raise ValueError("certification tolerance must be positive")
    n = L.n
    par = parametrize(L)
    report = residual_system(L, candidate)
    if report.degenerate:
        return replace(candidate, status=DEGENERATE, note="singular Gram")
    resid = max([abs(v) for v in report.offdiagonal] + [abs(report.spread)])
    if not resid < residual_tol:
        return replace(candidate, residual=float(resid),
                       status=EINSTEIN_NUMERIC,
                       note="residual above certification tolerance")

    sign_last = 1 if float(candidate.diag[-1]) > 0 else -1
    scale = abs(float(candidate.diag[-1]))
    # rescale so the pinned slot is exactly +-1; Einstein survives scaling
    base = [float(v) for v in candidate.p] \
        + [float(v) / scale for v in candidate.diag[:n - 1]]
    pc = par.p_count
    limit = 1 << rec.max_denominator_bits
    d_idx = list(range(pc, pc + n - 1))

    values, fn, target = _polish(L, par, base, list(range(pc + n - 1)),
                                 sign_last, rec)
    if fn < target:
        exact = [_mpf_to_fraction(v).limit_denominator(limit) for v in values]
        out = _exact_verdict(L, par, exact[:pc], exact[pc:], sign_last, rec,
                             candidate, resid)
        if out is not None:
            return out

    snapped_p = [Fraction(v).limit_denominator(rec.frame_snap_denominator)
                 for v in base[:pc]]
    values, fn, target = _polish(L, par, snapped_p + base[pc:], d_idx,
                                 sign_last, rec)
    if fn < target:
        exact_d = [_mpf_to_fraction(v).limit_denominator(limit)
                   for v in values]
        out = _exact_verdict(L, par, snapped_p, exact_d, sign_last, rec,
                             candidate, resid)
        if out is not None:
            return out
    return replace(candidate, residual=float(resid), status=EINSTEIN_NUMERIC,
                   note="no exact reconstruction within budget")


def certified_gram(L, candidate):
    """Exact Gram of a certified candidate on the original coframe."""
    if candidate.exact_p is None or candidate.exact_diag is None:
        raise PreconditionError("candidate carries no exact data")
    n = L.n
    par = parametrize(L)
    M = par.frame_matrix(candidate.exact_p)
    Minv = invert_matrix([list(r) for r in M])
    d = candidate.exact_diag
    gram = [[sum(Minv[i][k] * d[k] * Minv[j][k] for k in range(n))
             for j in range(n)] for i in range(n)]
    return PseudoMetric(L.space, gram)
