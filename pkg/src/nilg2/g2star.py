"""Stable 3-forms, induced pseudo-metrics and torsion of G2*-structures.

A 3-form phi on a 7-space determines the volume-valued symmetric form
6 b(v,w) e^{1..7} = iota_v phi ^ iota_w phi ^ phi. When det b != 0 the
metric is g = b/delta with delta the real ninth root of det b, the volume
is delta e^{1..7}, and the signature is (3,4) up to the definite case.
"""

from dataclasses import dataclass
from fractions import Fraction

from .exterior import (DimensionError, KForm, PreconditionError, Vector,
                       adjugate, contract, det_matrix, form_inner,
                       hodge_star, ninth_root, rational_ninth_root,
                       scalar_is_zero, scalar_sign, solve_linear, wedge)
from .metric import PseudoMetric

ORBIT_POSITIVE = "PositiveDefinite"
ORBIT_INDEFINITE = "Indefinite"
ORBIT_DEGENERATE = "Degenerate"

# coefficients of the adapted-coframe 3-form, used by standard_phi
_STANDARD = {
    (1, 2, 7): Fraction(-1), (3, 4, 7): Fraction(-1), (5, 6, 7): Fraction(1),
    (1, 3, 5): Fraction(1), (1, 4, 6): Fraction(-1), (2, 3, 6): Fraction(-1),
    (2, 4, 5): Fraction(-1),
}


class InstabilityError(ValueError):
    """The 3-form is not stable: b is degenerate."""


def _check_phi(phi):
    if not isinstance(phi, KForm) or phi.degree != 3:
        raise DimensionError("expected a 3-form")
    if phi.space.n != 7:
        raise DimensionError("G2* structures live on 7-dimensional spaces")


def standard_phi(space):
    """The adapted-coframe 3-form on a labeled 7-dimensional coframe."""
    if space.n != 7:
        raise DimensionError("G2* structures live on 7-dimensional spaces")
    return KForm(space, 3, dict(_STANDARD))


def b_form(phi):
    """The symmetric matrix b with 6 b_ij e^{1..7} = i_ei phi ^ i_ej phi ^ phi."""
    _check_phi(phi)
    space = phi.space
    full = tuple(range(1, 8))
    sixth = Fraction(1, 6)
    contractions = [contract(Vector.basis(space, i), phi) for i in range(1, 8)]
    rows = []
    for i in range(7):
        row = []
        for j in range(7):
            if j < i:
                row.append(rows[j][i])
                continue
            w = wedge(wedge(contractions[i], contractions[j]), phi)
            row.append(sixth * w.get(full))
        rows.append(row)
    return [list(r) for r in rows]


def stability_class(phi):
    """Degenerate, PositiveDefinite or Indefinite by the Hitchin criterion."""
    b = b_form(phi)
    D = det_matrix([list(r) for r in b])
    if scalar_is_zero(D):
        return ORBIT_DEGENERATE
    p, q = PseudoMetric(phi.space, b).signature
    if scalar_sign(D) < 0:
        p, q = q, p
    return ORBIT_POSITIVE if p == 7 else ORBIT_INDEFINITE


class G2StarStructure:
    """A stable 3-form with its induced metric, volume and Hodge star."""

    __slots__ = ("phi", "bmatrix", "D", "vol", "metric", "dual",
                 "orbit_class", "algebra", "_star_phi")

    def __init__(self, phi, bmatrix, D, vol, metric, dual, orbit_class,
                 algebra):
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "bmatrix", bmatrix)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "vol", vol)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "dual", dual)
        object.__setattr__(self, "orbit_class", orbit_class)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "_star_phi", None)

    def __setattr__(self, name, value):
        raise AttributeError("G2StarStructure is immutable")

    @property
    def space(self):
        return self.phi.space

    def star(self, a):
        return hodge_star(self.dual, self.vol, a, _skip_check=True)

    @property
    def star_phi(self):
        sp = self._star_phi
        if sp is None:
            sp = self.star(self.phi)
            object.__setattr__(self, "_star_phi", sp)
        return sp

    def d(self, a):
        if self.algebra is None:
            raise PreconditionError("structure has no Lie algebra attached")
        return self.algebra.d(a)

    def inner(self, a, b):
        return form_inner(self.dual, a, b)

    def __repr__(self):
        return "G2StarStructure(%s, %r)" % (self.orbit_class, self.phi)


def induce(phi, algebra=None):
    """Build the full structure from a stable 3-form.

    The scalar ring stays rational when det b is a ninth power; otherwise
    the metric lives in Q[delta]/(delta^9 - det b).
    """
    _check_phi(phi)
    if algebra is not None and algebra.space != phi.space:
        raise DimensionError("form and algebra live on different coframes")
    space = phi.space
    b = b_form(phi)
    D = det_matrix([list(r) for r in b])
    if scalar_is_zero(D):
        raise InstabilityError("b is degenerate, the form is not stable")
    root = rational_ninth_root(D)
    delta = root if root is not None else ninth_root(D)
    gram = [[x / delta for x in row] for row in b]
    adj = adjugate([list(r) for r in b])
    scale = delta / D
    dual = [[x * scale for x in row] for row in adj]
    metric = PseudoMetric(space, gram)
    dualm = PseudoMetric(space, dual)
    vol = KForm(space, 7, {tuple(range(1, 8)): delta})
    p, q = PseudoMetric(space, b).signature
    if scalar_sign(D) < 0:
        p, q = q, p
    orbit = ORBIT_POSITIVE if p == 7 else ORBIT_INDEFINITE
    return G2StarStructure(phi=phi, bmatrix=tuple(tuple(r) for r in b),
                           D=D, vol=vol, metric=metric, dual=dualm,
                           orbit_class=orbit, algebra=algebra)


def decompose2(S, beta):
    """Split a 2-form into its 7- and 14-dimensional type components."""
    if beta.degree != 2 or beta.space != S.space:
        raise DimensionError("expected a 2-form on the structure's coframe")
    space = S.space
    sph = S.star_phi
    # omega7 = star(alpha ^ star phi); unknowns alpha_1..alpha_7 are fixed
    # by (beta - omega7) ^ star phi = 0, one equation per 6-form component
    keys = [tuple(k for k in range(1, 8) if k != miss)
            for miss in range(7, 0, -1)]
    cols = []
    for i in range(1, 8):
        w = wedge(S.star(wedge(KForm.basis(space, (i,)), sph)), sph)
        cols.append([w.get(k) for k in keys])
    rhs_form = wedge(beta, sph)
    rhs = [rhs_form.get(k) for k in keys]
    rows = [[cols[j][r] for j in range(7)] for r in range(7)]
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise ArithmeticError("type decomposition system is inconsistent")
    alpha = KForm(space, 1, {(i + 1,): sol[i] for i in range(7)})
    omega7 = S.star(wedge(alpha, sph))
    omega14 = beta - omega7
    assert wedge(omega14, sph).is_zero()
    return omega7, omega14


def decompose3(S, gamma):
    """Split a 3-form into f*phi + star(alpha ^ phi) + pure 27-part."""
    if gamma.degree != 3 or gamma.space != S.space:
        raise DimensionError("expected a 3-form on the structure's coframe")
    space = S.space
    phi = S.phi
    sph = S.star_phi
    keys6 = [tuple(k for k in range(1, 8) if k != miss)
             for miss in range(7, 0, -1)]
    full = tuple(range(1, 8))
    # unknowns: f, alpha_1..alpha_7; conditions: residual ^ phi = 0 (7),
    # residual ^ star phi = 0 (1)
    basis_forms = [phi] + [S.star(wedge(KForm.basis(space, (i,)), phi))
                           for i in range(1, 8)]
    rows = []
    rhs = []
    for key in keys6:
        rows.append([wedge(bf, phi).get(key) for bf in basis_forms])
        rhs.append(wedge(gamma, phi).get(key))
    rows.append([wedge(bf, sph).get(full) for bf in basis_forms])
    rhs.append(wedge(gamma, sph).get(full))
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise ArithmeticError("type decomposition system is inconsistent")
    f = sol[0]
    alpha = KForm(space, 1, {(i,): sol[i] for i in range(1, 8)})
    g27 = gamma - f * phi - S.star(wedge(alpha, phi))
    assert wedge(g27, phi).is_zero() and wedge(g27, sph).is_zero()
    return f, alpha, g27


@dataclass(frozen=True)
class TorsionForms:
    tau0: object
    tau1: KForm
    tau2: KForm
    tau3: KForm


def torsion_forms(S):
    """Solve the torsion equations for (tau0, tau1, tau2, tau3) exactly."""
    phi = S.phi
    sph = S.star_phi
    dphi = S.d(phi)
    dsph = S.d(sph)
    tau0, three_tau1, tau3 = decompose3(S, S.star(dphi))
    tau1 = Fraction(1, 3) * three_tau1
    tau2 = -S.star(dsph - 4 * wedge(tau1, sph))
    lhs1 = tau0 * sph + 3 * wedge(tau1, phi) + S.star(tau3)
    if lhs1 != dphi:
        raise ArithmeticError("torsion equation for d(phi) failed")
    lhs2 = 4 * wedge(tau1, sph) - S.star(tau2)
    if lhs2 != dsph:
        raise ArithmeticError("torsion equation for d(star phi) failed")
    if not wedge(tau2, sph).is_zero():
        raise ArithmeticError("tau2 escaped the 14-dimensional type")
    return TorsionForms(tau0=tau0, tau1=tau1, tau2=tau2, tau3=tau3)


def torsion_closed(S):
    """Torsion 2-form of a closed structure: tau = -star d star phi."""
    phi = S.phi
    if not S.d(phi).is_zero():
        raise PreconditionError("structure is not closed")
    sph = S.star_phi
    dsph = S.d(sph)
    tau = -S.star(dsph)
    if not wedge(tau, sph).is_zero():
        raise ArithmeticError("closed torsion escaped the 14-dim type")
    if wedge(tau, phi) != dsph:
        raise ArithmeticError("tau ^ phi != d star phi")
    return tau


@dataclass(frozen=True)
class HarmonicReport:
    closed: bool
    coclosed: bool
    delta_phi: KForm
    laplacian_phi: KForm
    harmonic: bool


def harmonic_report(S):
    """Codifferential and Hodge Laplacian of phi over the attached algebra."""
    phi = S.phi
    dphi = S.d(phi)
    # delta on 3-forms is -star d star, on 4-forms +star d star (n = 7)
    delta_phi = -S.star(S.d(S.star_phi))
    delta_dphi = S.star(S.d(S.star(dphi)))
    lap = S.d(delta_phi) + delta_dphi
    return HarmonicReport(closed=dphi.is_zero(),
                          coclosed=delta_phi.is_zero(),
                          delta_phi=delta_phi,
                          laplacian_phi=lap,
                          harmonic=lap.is_zero())


def scal_from_torsion(S):
    """Scalar curvature of a closed structure: -1/2 g(tau, tau)."""
    tau = torsion_closed(S)
    return Fraction(-1, 2) * form_inner(S.dual, tau, tau)
