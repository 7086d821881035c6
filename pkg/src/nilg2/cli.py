"""Command-line front end: structure reports, curvature, G2*-structure
analysis, identity verification, Einstein search, and a data-driven
checklist that re-runs the published computations."""

import argparse
import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from time import perf_counter

from .exterior import (Coframe, DimensionError, FormParseError, NinthRoot,
                       PreconditionError, invert_matrix, mat_mul,
                       mat_transpose, parse_form, wedge)
from .generic import FAILS, lemma_suite
from .g2star import (InstabilityError, harmonic_report, induce,
                     scal_from_torsion, stability_class, standard_phi,
                     torsion_closed, torsion_forms)
from .liealg import (NotLieAlgebraError, change_of_basis, from_json,
                     is_nice_basis, parse_structure, structure_report,
                     substitute_coframe)
from .metric import (PseudoMetric, einstein_check, obstruction_dims, ricci,
                     riemann)
from .search import (EINSTEIN_CERTIFIED, EINSTEIN_NUMERIC, NewtonOptions,
                     SearchConfig, certify, parametrize, solve)

G_STRUCT = "0,0,e12,e13,e14,e15+e23,e16+e23+e24"
N_STRUCT = "0,0,e12,0,0,e13+e24,e15"
NICE_STRUCT = "0,0,12,13,14,15,16+23"

EINSTEIN_LAMBDA = Fraction(48661191875666868481, 659081523200000000000)
EINSTEIN_DIAG = (Fraction(71639296000000000, 168377826559400929),
                 Fraction(-1946720000000, 2015993900449),
                 Fraction(-2116000000, 6975757441),
                 Fraction(21160000, 24137569),
                 Fraction(-115000, 250563),
                 Fraction(-600, 289),
                 Fraction(1))
EINSTEIN_SIGNS = (1, -1, -1, 1, -1, -1, 1)

# rows give e^b in terms of the diagonalizing coframe f^a
_Q = Fraction
EINSTEIN_COFRAME = (
    (1, 0, 0, 0, 0, 0, 0),
    (0, 1, 0, 0, 0, 0, 0),
    (0, _Q(-26, 51), 1, 0, 0, 0, 0),
    (0, _Q(-2300, 2601), _Q(-26, 51), 1, 0, 0, 0),
    (0, 0, _Q(-2300, 2601), _Q(46, 51), 1, 0, 0),
    (0, 0, 0, _Q(-2300, 2601), 0, 1, 0),
    (0, 0, 0, 0, 0, _Q(-50, 51), 1),
)

CLOSED_PHI = "e137+2*e156-2*e157+e235-e237+e246+e345"
HARMONIC_PSI = "e123+1/2*e257+e167+e347-e456"
TORSION_PHI = "-5/2*e12+3/2*e13-e14-e15+e23"

# rows give e^a in terms of the adapted coframe h^b
ADAPTED_COFRAME = (
    (0, _Q(-1, 2), 0, 0, 0, _Q(1, 2), 0),
    (0, 0, 0, -1, 0, 0, 1),
    (0, 0, 1, 0, 0, 0, 0),
    (_Q(-1, 2), 0, 1, -1, _Q(1, 2), 0, 1),
    (1, 0, _Q(1, 2), 0, 1, 0, 0),
    (0, 1, 0, -2, 0, 1, 2),
    (0, 2, 0, _Q(-3, 2), 0, 0, _Q(5, 2)),
)

# rows give the orthonormal x^a in terms of e^b
ORTHONORMAL_X = (
    (0, 0, 0, 0, 0, 0, -1),
    (1, 0, 0, 0, 0, _Q(-1, 2), 0),
    (0, 0, 1, _Q(-1, 2), 0, 0, 0),
    (0, _Q(1, 4), 0, 0, -1, 0, 0),
    (0, 0, -1, _Q(-1, 2), 0, 0, 0),
    (0, _Q(1, 4), 0, 0, 1, 0, 0),
    (1, 0, 0, 0, 0, _Q(1, 2), 0),
)

RICCI_ADAPTED = (
    (0, 0, 0, 0, 0, 0, 0),
    (0, _Q(1, 4), 0, 0, 0, _Q(-1, 4), 0),
    (0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, _Q(-1, 2), 0, 0, _Q(1, 2)),
    (0, 0, 0, 0, 0, 0, 0),
    (0, _Q(-1, 4), 0, 0, 0, _Q(1, 4), 0),
    (0, 0, 0, _Q(1, 2), 0, 0, _Q(-1, 2)),
)

CURVATURE_X = {
    (2, 4, 2, 4): _Q(-3, 64), (2, 4, 2, 6): _Q(3, 64),
    (2, 4, 4, 7): _Q(3, 64), (2, 4, 6, 7): _Q(-3, 64),
    (2, 6, 2, 6): _Q(-3, 64), (2, 6, 4, 7): _Q(-3, 64),
    (2, 6, 6, 7): _Q(3, 64), (4, 7, 4, 7): _Q(-3, 64),
    (4, 7, 6, 7): _Q(3, 64), (6, 7, 6, 7): _Q(-3, 64),
}

ETA34 = (-1, -1, -1, -1, 1, 1, 1)


class UsageError(Exception):
    pass


def scalar_json(x):
    """Exact scalar to a JSON value; floats pass through unchanged."""
    if isinstance(x, NinthRoot):
        return {"coeffs": [str(c) for c in x.coeffs],
                "modulus": str(x.modulus)}
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, float):
        return x
    return str(x)


def json_safe(x):
    if isinstance(x, dict):
        return {str(k): json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [json_safe(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, int):
        return x
    return scalar_json(x)


def matrix_json(rows):
    return [[scalar_json(x) for x in row] for row in rows]


def load_algebra(text):
    """Structure equations from a literal, a file, or the JSON format."""
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    text = text.strip()
    if text.startswith("{"):
        return from_json(text)
    return parse_structure(text)


def load_metric(L, diag, gram):
    if (diag is None) == (gram is None):
        raise UsageError("give exactly one of --diag or --gram")
    if diag is not None:
        return PseudoMetric.diagonal(
            L.space, [Fraction(tok) for tok in diag.split(",")])
    path = Path(gram)
    text = path.read_text() if path.is_file() else gram
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("--gram is not valid JSON: %s" % exc)
    return PseudoMetric(L.space,
                        [[Fraction(x) for x in row] for row in rows])


def parse_signs(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("+", "+1", "1"):
            out.append(1)
        elif tok in ("-", "-1"):
            out.append(-1)
        else:
            raise UsageError("sign entries must be + or -, got %r" % tok)
    return tuple(out)


def parse_seeds(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if ".." in tok:
            a, b = tok.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return tuple(out)


def emit(args, report, lines):
    if args.json:
        print(json.dumps(json_safe(report), indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- published computations, one check per row

@dataclass(frozen=True)
class ReproCheck:
    id: str
    description: str
    expected: str
    verdict: str
    observed: str
    runtime_ms: float


def _eta_matrix(space):
    return [[_Q(ETA34[i]) if i == j else _Q(0) for j in range(7)]
            for i in range(7)]


def _qmat(rows):
    return [[_Q(x) for x in row] for row in rows]


def _einstein_setting():
    L = parse_structure(G_STRUCT)
    M = invert_matrix(_qmat(EINSTEIN_COFRAME))
    Lf = change_of_basis(L, M)
    return L, Lf, PseudoMetric.diagonal(Lf.space, EINSTEIN_DIAG)


_SUITE_LOCK = threading.Lock()


@lru_cache(maxsize=None)
def _suite_uncached(method):
    return lemma_suite(parse_structure(G_STRUCT), method=method)


def _suite(method="expand"):
    with _SUITE_LOCK:
        return _suite_uncached(method)


def _identity_row(names, method="expand"):
    suite = _suite(method)
    results = {name: suite.identities[name].status for name in names}
    ok = all(status == "holds" for status in results.values())
    return ok, ", ".join("%s: %s" % kv for kv in sorted(results.items()))


def _check_einstein_metric():
    _, Lf, g = _einstein_setting()
    general = einstein_check(Lf, g, mode="general")
    nilpotent = einstein_check(Lf, g, mode="nilpotent")
    ok = (general.einstein and nilpotent.einstein
          and general.lam == EINSTEIN_LAMBDA
          and nilpotent.lam == EINSTEIN_LAMBDA
          and g.signature == (3, 4)
          and general.scal == 7 * EINSTEIN_LAMBDA)
    return ok, ("general %s, nilpotent %s, signature %s, scal %s"
                % (general.verdict, nilpotent.verdict, g.signature,
                   general.scal))


def _check_trace_identity():
    tr = sum(EINSTEIN_DIAG)
    return tr == Fraction(-1), "sum of diagonal entries = %s" % tr


def _check_lemma_quadruple():
    return _identity_row(("b77", "b76", "b75", "b66"))


def _check_lemma_minors():
    return _identity_row(("minor_rows_2to7", "minor_not_row1_not_col2"))


def _check_lemma_offdiag():
    return _identity_row(("b56_plus_twice_b47", "b47_factored",
                          "b37_factored"))


def _check_lemma_structure():
    return _identity_row(("adjoint_images", "derived_minus_center"))


def _check_obstruction():
    _, Lf, g = _einstein_setting()
    obs = obstruction_dims(Lf, g)
    abelian = parse_structure("0,0,0,0,0,0,0")
    flat = obstruction_dims(
        abelian, PseudoMetric.diagonal(abelian.space, [_Q(1)] * 7))
    ok = (not obs.inequality_holds
          and obs.dimDerived - obs.dimCenter == 4
          and flat.inequality_holds)
    return ok, ("Einstein metric: dimM + dimN = %d against gap %d "
                "(inequality %s); abelian control inequality %s"
                % (obs.dimM + obs.dimN, obs.dimDerived - obs.dimCenter,
                   "holds" if obs.inequality_holds else "fails",
                   "holds" if flat.inequality_holds else "fails"))


def _closed_structure():
    L = parse_structure(G_STRUCT)
    phi = parse_form(CLOSED_PHI, L.space, degree=3)
    return L, phi, induce(phi, L)


def _check_closed_existence():
    L, phi, S = _closed_structure()
    closed = S.d(phi).is_zero()
    Ch = _qmat(ADAPTED_COFRAME)
    Gh = mat_mul(mat_transpose(Ch),
                 mat_mul([list(r) for r in S.metric.gram], Ch))
    adapted = Gh == _eta_matrix(L.space)
    ok = closed and S.orbit_class == "Indefinite" and adapted
    return ok, ("d(phi) = %s, class %s, adapted coframe Gram %s"
                % (S.d(phi), S.orbit_class,
                   "diag(-1,-1,-1,-1,1,1,1)" if adapted else "wrong"))


def _check_example_torsion():
    L, phi, S = _closed_structure()
    tau = torsion_closed(S)
    want = parse_form(TORSION_PHI, L.space)
    rep = harmonic_report(S)
    null = wedge(tau, S.star(tau)).is_zero()
    ok = (tau == want and null and rep.closed and rep.harmonic
          and not rep.coclosed)
    return ok, ("tau = %s, tau ^ star tau %s, closed %s, coclosed %s, "
                "harmonic %s" % (tau, "= 0" if null else "!= 0",
                                 rep.closed, rep.coclosed, rep.harmonic))


def _check_example_ricci():
    L, phi, S = _closed_structure()
    res = einstein_check(L, S.metric)
    ric = ricci(L, S.metric, mode="nilpotent")
    Ch = _qmat(ADAPTED_COFRAME)
    ric_h = mat_mul(mat_transpose(Ch), mat_mul([list(r) for r in ric], Ch))
    want = [[_Q(x) for x in row] for row in RICCI_ADAPTED]
    ok = ric_h == want and not res.einstein and res.scal == 0
    return ok, ("adapted-frame Ricci %s, %s, scal = %s"
                % ("matches" if ric_h == want else "differs",
                   res.verdict, res.scal))


def _ricci_flat_structure():
    N = parse_structure(N_STRUCT)
    psi = parse_form(HARMONIC_PSI, N.space, degree=3)
    return N, psi, induce(psi, N)


def _check_ricci_flat_example():
    N, psi, S = _ricci_flat_structure()
    X = Coframe(7, tuple("x%d" % i for i in range(1, 8)))
    built = substitute_coframe(standard_phi(X),
                               _qmat(ORTHONORMAL_X), N.space)
    dsp = S.d(S.star_phi)
    rep = harmonic_report(S)
    res = einstein_check(N, S.metric)
    ok = (built == psi
          and dsp == parse_form("-e13457", N.space)
          and S.star(dsp) == parse_form("e15", N.space)
          and rep.closed and rep.harmonic and not rep.coclosed
          and res.einstein and res.lam == 0)
    return ok, ("d star psi = %s, star d star psi = %s, harmonic %s, %s"
                % (dsp, S.star(dsp), rep.harmonic, res.verdict))


def _check_curvature_table():
    N = parse_structure(N_STRUCT)
    nx = change_of_basis(N, _qmat(ORTHONORMAL_X),
                         labels=tuple("x%d" % i for i in range(1, 8)))
    eta = PseudoMetric.diagonal(nx.space, [_Q(s) for s in ETA34])
    R = riemann(nx, eta)
    got = dict(R.nonzero())
    res = einstein_check(nx, eta)
    ok = (got == CURVATURE_X and not R.is_zero()
          and res.einstein and res.lam == 0)
    return ok, ("%d nonzero orbit entries, table %s, R %s, %s"
                % (len(got), "matches" if got == CURVATURE_X else "differs",
                   "nonzero" if not R.is_zero() else "zero", res.verdict))


def _check_scal_formula():
    parts = []
    ok = True
    for label, (L, _, S) in (("first", _closed_structure()),
                             ("second", _ricci_flat_structure())):
        from_torsion = scal_from_torsion(S)
        contracted = einstein_check(L, S.metric).scal
        ok = ok and from_torsion == contracted
        parts.append("%s: torsion %s vs contraction %s"
                     % (label, from_torsion, contracted))
    return ok, "; ".join(parts)


def _harmonic_deformations():
    """Closed stable 3-forms near phi that stay harmonic, deterministically."""
    L, phi, _ = _closed_structure()
    out = [(L, phi)]
    for scale in (_Q(1, 2), _Q(3)):
        out.append((L, scale * phi))
    N, psi, _ = _ricci_flat_structure()
    out.append((N, psi))
    return out


def _check_harmonic_scal_zero():
    checked = 0
    for L, form in _harmonic_deformations():
        S = induce(form, L)
        rep = harmonic_report(S)
        if not (rep.closed and rep.harmonic):
            continue
        tau = torsion_closed(S)
        if not scal_from_torsion(S) == 0:
            return False, "nonzero scal on a closed harmonic structure"
        if not S.d(tau).is_zero():
            return False, "torsion of a closed harmonic structure not closed"
        checked += 1
    return checked >= 3, ("%d closed harmonic structures: scal = 0 and "
                          "d(tau) = 0 on each" % checked)


def _check_search_replication():
    L = parse_structure(G_STRUCT)
    par = parametrize(L)
    pvals = {"p23": _Q(-26, 51), "p24": _Q(-2300, 2601),
             "p34": _Q(-26, 51), "p35": _Q(-2300, 2601),
             "p45": _Q(46, 51), "p46": _Q(-2300, 2601),
             "p67": _Q(-50, 51)}
    start = ([float(pvals.get(nm, 0)) for nm in par.names]
             + [float(v) for v in EINSTEIN_DIAG[:6]])
    cfg = SearchConfig(algebra=L, sign_pattern=EINSTEIN_SIGNS, seeds=())
    cands = solve(cfg, starts=[start])
    if not cands or cands[0].status != EINSTEIN_NUMERIC:
        return False, "warm start did not converge"
    cert = certify(L, cands[0])
    ok = cert.status == EINSTEIN_CERTIFIED and cert.lam == EINSTEIN_LAMBDA
    return ok, "certified %s, lambda = %s" % (cert.status, cert.lam)


def _check_nice_consistency():
    nice = parse_structure(NICE_STRUCT)
    verdict = is_nice_basis(nice)
    cfg = SearchConfig(algebra=nice, sign_pattern=EINSTEIN_SIGNS,
                       seeds=(0, 1, 2, 3))
    nonflat = []
    for cand in solve(cfg):
        if cand.status == EINSTEIN_NUMERIC:
            out = certify(nice, cand)
            if out.status == EINSTEIN_CERTIFIED and out.lam != 0:
                nonflat.append(out)
    ok = verdict.nice and not nonflat
    return ok, ("nice basis %s; %d certified non-Ricci-flat candidates"
                % (verdict.nice, len(nonflat)))


MANIFEST = (
    ("thm-2.2",
     "the certified diagonal metric is Einstein in both Ricci modes",
     "lambda = %s, signature (3, 4), scal = 7*lambda" % EINSTEIN_LAMBDA,
     _check_einstein_metric),
    ("trace-identity",
     "sum of the seven diagonal Gram entries",
     "-1",
     _check_trace_identity),
    ("lemma-3.1",
     "b(e7,e7), b(e7,e6), b(e7,e5), b(e6,e6) vanish for every closed 3-form",
     "all four entries identically zero in the 18 parameters",
     _check_lemma_quadruple),
    ("lemma-3.2",
     "the two 6x6 minors of the b-matrix vanish identically",
     "both determinants identically zero",
     _check_lemma_minors),
    ("lemma-3.3",
     "b(e5,e6) = -2 b(e4,e7) and the factored forms of b(e4,e7), b(e3,e7)",
     "all three identities hold",
     _check_lemma_offdiag),
    ("lemma-3.4",
     "adjoint images match the structure table; dim[g,g] - dim z(g) = 4",
     "both structural facts hold",
     _check_lemma_structure),
    ("prop-3.5",
     "null-space obstruction: the certified Einstein metric must violate "
     "the inequality, a flat control must satisfy it",
     "inequality fails on the Einstein metric, holds on the abelian control",
     _check_obstruction),
    ("thm-3.6",
     "the displayed 3-form is a closed G2*-structure with adapted coframe",
     "d(phi) = 0, class Indefinite, adapted Gram diag(-1,-1,-1,-1,1,1,1)",
     _check_closed_existence),
    ("ex-4.1",
     "torsion of the closed harmonic structure on the filiform algebra",
     "tau = %s, tau ^ star tau = 0, closed and harmonic, not coclosed"
     % TORSION_PHI,
     _check_example_torsion),
    ("ex-4.1-ricci",
     "Ricci of the first example in the adapted frame",
     "the displayed matrix with entries 0, +-1/4, +-1/2; NotEinstein, "
     "scal = 0",
     _check_example_ricci),
    ("ex-4.2",
     "the second structure is closed, harmonic, not coclosed, Ricci-flat",
     "d star psi = -e13457, star d star psi = e15, Einstein(0)",
     _check_ricci_flat_example),
    ("ex-4.2-curvature",
     "curvature table of the Ricci-flat metric in the orthonormal frame",
     "ten orbit entries of magnitude 3/64, R != 0, Einstein(0)",
     _check_curvature_table),
    ("prop-4.4",
     "scal from the torsion 2-form equals the metric contraction",
     "-1/2 g(tau, tau) = g^ij Ric_ij on both closed structures",
     _check_scal_formula),
    ("thm-4.5",
     "closed and harmonic forces scal = 0 and d(tau) = 0",
     "holds on every closed harmonic structure in the suite",
     _check_harmonic_scal_zero),
    ("search-replication",
     "warm-started search certifies the Einstein metric exactly",
     "EinsteinCertified with lambda = %s" % EINSTEIN_LAMBDA,
     _check_search_replication),
    ("prop-2.1",
     "nothing non-Ricci-flat certifies on a nice-basis algebra",
     "nice basis; no certified candidate with lambda != 0",
     _check_nice_consistency),
)


def run_check(entry):
    cid, description, expected, fun = entry
    t0 = perf_counter()
    try:
        ok, observed = fun()
    except Exception as exc:
        ok, observed = False, "raised %s: %s" % (type(exc).__name__, exc)
    ms = (perf_counter() - t0) * 1000.0
    return ReproCheck(id=cid, description=description, expected=expected,
                      verdict="pass" if ok else "fail", observed=observed,
                      runtime_ms=round(ms, 3))


# --- subcommand handlers

def cmd_algebra_check(args):
    L = load_algebra(args.algebra)
    rep = structure_report(L)
    nice = is_nice_basis(L)
    report = {
        "dim": L.n,
        "labels": list(L.space.labels),
        "differentials": [repr(f) for f in L.d1],
        "nilpotent": rep.nilpotent,
        "step": rep.step,
        "center_dim": rep.center.dim,
        "derived_dim": rep.derived.dim,
        "unimodular": rep.unimodular,
        "killing_zero": rep.killing_zero,
        "nice_basis": nice.nice,
    }
    lines = [
        "dimension: %d" % L.n,
        "differentials: %s" % "; ".join(repr(f) for f in L.d1),
        "nilpotent: %s (step %d)" % (rep.nilpotent, rep.step),
        "center dim: %d" % rep.center.dim,
        "derived dim: %d" % rep.derived.dim,
        "unimodular: %s" % rep.unimodular,
        "killing form zero: %s" % rep.killing_zero,
        "nice basis: %s" % nice.nice,
    ]
    emit(args, report, lines)
    return 0


def cmd_metric_ricci(args):
    L = load_algebra(args.algebra)
    g = load_metric(L, args.diag, args.gram)
    ric = ricci(L, g, mode=args.mode)
    report = {"gram": matrix_json(g.gram), "signature": list(g.signature),
              "ricci": matrix_json(ric), "mode": args.mode}
    lines = ["signature: %s" % (g.signature,)]
    for i, row in enumerate(ric):
        lines.append("Ric[%d]: %s" % (i + 1, " ".join(str(x) for x in row)))
    emit(args, report, lines)
    return 0


def cmd_metric_einstein(args):
    L = load_algebra(args.algebra)
    g = load_metric(L, args.diag, args.gram)
    res = einstein_check(L, g, mode=args.mode)
    report = {"gram": matrix_json(g.gram), "signature": list(g.signature),
              "ricci": matrix_json(res.ricci), "einstein": res.einstein,
              "scal": scalar_json(res.scal)}
    if res.einstein:
        report["lambda"] = scalar_json(res.lam)
    lines = ["signature: %s" % (g.signature,),
             "verdict: %s" % res.verdict,
             "scal: %s" % res.scal]
    emit(args, report, lines)
    return 0 if res.einstein else 1


def _g2_structure(args, need_algebra):
    L = load_algebra(args.algebra) if args.algebra else None
    if need_algebra and L is None:
        raise UsageError("this subcommand needs --algebra")
    space = L.space if L is not None else Coframe(7)
    phi = parse_form(args.phi, space, degree=3)
    return L, phi


def _g2_report(S, L):
    report = {
        "stable": True,
        "class": S.orbit_class,
        "gram": matrix_json(S.metric.gram),
        "signature": list(S.metric.signature),
        "vol_coefficient": scalar_json(S.vol.get(tuple(range(1, 8)))),
        "closed": None, "coclosed": None, "harmonic": None,
        "torsion": None, "scal": None,
    }
    if L is not None:
        rep = harmonic_report(S)
        tf = torsion_forms(S)
        report.update({
            "closed": rep.closed, "coclosed": rep.coclosed,
            "harmonic": rep.harmonic,
            "torsion": {"tau0": scalar_json(tf.tau0), "tau1": repr(tf.tau1),
                        "tau2": repr(tf.tau2), "tau3": repr(tf.tau3)},
            "scal": scalar_json(einstein_check(L, S.metric).scal),
        })
    return report


def cmd_g2_induce(args):
    L, phi = _g2_structure(args, need_algebra=False)
    kind = stability_class(phi)
    if kind == "Degenerate":
        emit(args, {"stable": False, "class": kind},
             ["class: %s" % kind, "the form is not stable"])
        return 1
    S = induce(phi, L)
    report = _g2_report(S, L)
    lines = ["class: %s" % S.orbit_class,
             "signature: %s" % (S.metric.signature,),
             "vol coefficient: %s" % (S.vol.get(tuple(range(1, 8))),)]
    for i, row in enumerate(S.metric.gram):
        lines.append("g[%d]: %s" % (i + 1, " ".join(str(x) for x in row)))
    if L is not None:
        lines.append("closed: %s" % report["closed"])
        lines.append("scal: %s" % (einstein_check(L, S.metric).scal,))
    emit(args, report, lines)
    return 0


def cmd_g2_torsion(args):
    L, phi = _g2_structure(args, need_algebra=True)
    S = induce(phi, L)
    tf = torsion_forms(S)
    report = _g2_report(S, L)
    lines = ["tau0: %s" % (tf.tau0,), "tau1: %r" % tf.tau1,
             "tau2: %r" % tf.tau2, "tau3: %r" % tf.tau3]
    if S.d(phi).is_zero():
        lines.append("closed: true, torsion 2-form tau = %r"
                     % torsion_closed(S))
        lines.append("scal from torsion: %s" % (scal_from_torsion(S),))
    emit(args, report, lines)
    return 0


def cmd_g2_harmonic(args):
    L, phi = _g2_structure(args, need_algebra=True)
    S = induce(phi, L)
    rep = harmonic_report(S)
    report = _g2_report(S, L)
    lines = ["closed: %s" % rep.closed,
             "coclosed: %s" % rep.coclosed,
             "harmonic: %s" % rep.harmonic,
             "delta phi: %r" % rep.delta_phi,
             "laplacian phi: %r" % rep.laplacian_phi]
    emit(args, report, lines)
    return 0 if rep.harmonic else 1


def cmd_lemmas_verify(args):
    L = load_algebra(args.algebra)
    rep = lemma_suite(L, method=args.method, seed=args.seed)
    identities = {
        name: {"status": res.status,
               "certificate": json_safe(res.certificate)}
        for name, res in rep.identities.items()
    }
    report = {"dimension": rep.dimension, "b_zero": rep.b_zero,
              "degenerate": rep.degenerate, "target_table": rep.target,
              "method": args.method, "identities": identities}
    lines = ["closed 3-form family dimension: %d" % rep.dimension,
             "b identically zero: %s" % rep.b_zero]
    for name in sorted(rep.identities):
        lines.append("%s: %s" % (name, rep.identities[name].status))
    emit(args, report, lines)
    failed = any(res.status == FAILS for res in rep.identities.values())
    return 1 if failed else 0


def cmd_search_einstein(args):
    L = load_algebra(args.algebra)
    signs = parse_signs(args.signs)
    seeds = parse_seeds(args.seeds)
    cfg = SearchConfig(algebra=L, sign_pattern=signs, seeds=seeds,
                       newton=NewtonOptions(residual_tol=args.tol))
    cands = solve(cfg)
    if not args.no_certify:
        cands = [certify(L, c) if c.status == EINSTEIN_NUMERIC else c
                 for c in cands]
    rows = []
    lines = []
    for k, c in enumerate(cands):
        row = {"status": c.status, "residual": c.residual,
               "p": list(c.p), "diag": list(c.diag), "note": c.note,
               "lambda": scalar_json(c.lam) if c.lam is not None else None,
               "exact_p": ([scalar_json(v) for v in c.exact_p]
                           if c.exact_p else None),
               "exact_diag": ([scalar_json(v) for v in c.exact_diag]
                              if c.exact_diag else None)}
        rows.append(row)
        extra = " lambda=%s" % c.lam if c.lam is not None else ""
        note = " (%s)" % c.note if c.note else ""
        lines.append("#%d %s residual=%.3e%s%s"
                     % (k, c.status, c.residual, extra, note))
    emit(args, rows, lines or ["no candidates"])
    return 0


def cmd_paper_reproduce(args):
    wanted = set(args.check or [])
    known = {entry[0] for entry in MANIFEST}
    unknown = wanted - known
    if unknown:
        raise UsageError("unknown check id(s): %s; known: %s"
                         % (", ".join(sorted(unknown)),
                            ", ".join(e[0] for e in MANIFEST)))
    selected = [e for e in MANIFEST if not wanted or e[0] in wanted]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        futures = [pool.submit(run_check, entry) for entry in selected]
        results = [f.result() for f in futures]
    passed = sum(1 for r in results if r.verdict == "pass")
    report = {"checks": [vars(r) for r in results],
              "passed": passed, "failed": len(results) - passed}
    lines = []
    for r in results:
        lines.append("%-4s %-19s %9.1f ms  %s"
                     % (r.verdict, r.id, r.runtime_ms, r.description))
        if r.verdict == "fail":
            lines.append("     expected: %s" % r.expected)
            lines.append("     observed: %s" % r.observed)
    lines.append("%d passed, %d failed (%d run)"
                 % (passed, len(results) - passed, len(results)))
    emit(args, report, lines)
    return 0 if passed == len(results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nilg2",
        description="Exact pseudo-Riemannian geometry and G2*-structures "
                    "on nilpotent Lie algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="structure-equation reports")
    asub = p.add_subparsers(dest="subcommand", required=True)
    pc = asub.add_parser("check", help="classify a structure-equation table")
    pc.set_defaults(func=cmd_algebra_check)
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--algebra", required=True,
                    help="literal like '0,0,e12,...' or a file")

    p = sub.add_parser("metric", help="curvature of a frame metric")
    msub = p.add_subparsers(dest="subcommand", required=True)
    for name, func in (("ricci", cmd_metric_ricci),
                       ("einstein", cmd_metric_einstein)):
        pm = msub.add_parser(name)
        pm.set_defaults(func=func)
        pm.add_argument("--json", action="store_true")
        pm.add_argument("--algebra", required=True)
        pm.add_argument("--diag", help="comma-separated rational diagonal")
        pm.add_argument("--gram", help="JSON matrix of rationals, or a file")
        pm.add_argument("--mode", choices=("general", "nilpotent"),
                        default="general")

    p = sub.add_parser("g2", help="G2*-structure analysis of a 3-form")
    gsub = p.add_subparsers(dest="subcommand", required=True)
    for name, func in (("induce", cmd_g2_induce),
                       ("torsion", cmd_g2_torsion),
                       ("harmonic", cmd_g2_harmonic)):
        pg = gsub.add_parser(name)
        pg.set_defaults(func=func)
        pg.add_argument("--json", action="store_true")
        pg.add_argument("--phi", required=True, help="3-form literal")
        pg.add_argument("--algebra",
                        required=name != "induce",
                        help="structure equations the differential runs on")

    p = sub.add_parser("lemmas", help="vanishing identities of the closed "
                                      "3-form family")
    lsub = p.add_subparsers(dest="subcommand", required=True)
    pl = lsub.add_parser("verify")
    pl.set_defaults(func=cmd_lemmas_verify)
    pl.add_argument("--json", action="store_true")
    pl.add_argument("--algebra", required=True)
    pl.add_argument("--method", choices=("expand", "randomized"),
                    default="expand")
    pl.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("search", help="numeric Einstein-metric search")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    ps = ssub.add_parser("einstein")
    ps.set_defaults(func=cmd_search_einstein)
    ps.add_argument("--json", action="store_true")
    ps.add_argument("--algebra", required=True)
    ps.add_argument("--signs", default=",".join(
        "+" if s > 0 else "-" for s in EINSTEIN_SIGNS),
        help="target diagonal signs, e.g. +,-,-,+,-,-,+")
    ps.add_argument("--seeds", default="0..7",
                    help="comma list and inclusive ranges, e.g. 0..63")
    ps.add_argument("--tol", type=float, default=1e-11,
                    help="Newton residual tolerance")
    ps.add_argument("--no-certify", action="store_true",
                    help="skip exact certification of numeric survivors")

    p = sub.add_parser("paper", help="re-run the published computations")
    psub = p.add_subparsers(dest="subcommand", required=True)
    pp = psub.add_parser("reproduce")
    pp.set_defaults(func=cmd_paper_reproduce)
    pp.add_argument("--json", action="store_true")
    pp.add_argument("--all", action="store_true",
                    help="run the full checklist (default when no --check)")
    pp.add_argument("--check", action="append",
                    help="run one check by id; repeatable")
    pp.add_argument("--jobs", type=int, default=4,
                    help="worker threads for the checklist")

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except NotLieAlgebraError as exc:
        print("not a Lie algebra: %s" % exc, file=sys.stderr)
        return 1
    except (InstabilityError, PreconditionError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (FormParseError, DimensionError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
