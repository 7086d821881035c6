"""Exact left-invariant pseudo-Riemannian geometry and G2*-structures
on nilpotent Lie algebras, with a numeric Einstein-metric search whose
survivors are certified by exact rational arithmetic."""

from .exterior import (Coframe, DimensionError, FormParseError, KForm,
                       NinthRoot, Polynomial, PreconditionError,
                       RingMismatchError, SingularMetricError, Vector,
                       ZeroDivisorError, contract, det_matrix, form_inner,
                       hodge_star, ninth_root, parse_form,
                       rational_ninth_root, wedge)
from .liealg import (LieAlgebra, NiceBasisReport, NotLieAlgebraError,
                     StructureReport, Subspace, ce_differential,
                     change_of_basis, derivations_traceless, from_json,
                     is_nice_basis, parse_structure, span, structure_report,
                     substitute_coframe, to_json)
from .metric import (Connection, CurvatureTensor, EinsteinResult,
                     ObstructionReport, PseudoMetric, dual_metric,
                     einstein_check, levi_civita, musical_flat,
                     obstruction_dims, ricci, riemann)
from .g2star import (G2StarStructure, HarmonicReport, InstabilityError,
                     TorsionForms, b_form, decompose2, decompose3,
                     harmonic_report, induce, scal_from_torsion,
                     stability_class, standard_phi, torsion_closed,
                     torsion_forms)
from .generic import (FAILS, HOLDS, NOT_APPLICABLE, IdentityResult,
                      LemmaReport, ParametrizedForm, VerifyResult,
                      closed_form_space, lemma_suite, polynomial_b_matrix,
                      specialize, verify_identity)
from .search import (DEGENERATE, EINSTEIN_CERTIFIED, EINSTEIN_NUMERIC,
                     NON_EINSTEIN, Candidate, FrameParametrization,
                     NewtonOptions, ReconstructionOptions, ResidualReport,
                     SearchConfig, certified_gram, certify, parametrize,
                     residual_system, solve)

__version__ = "0.1.0"

__all__ = [
    "Candidate", "Coframe", "Connection", "CurvatureTensor", "DEGENERATE",
    "DimensionError", "EINSTEIN_CERTIFIED", "EINSTEIN_NUMERIC",
    "EinsteinResult", "FAILS", "FormParseError", "FrameParametrization",
    "G2StarStructure", "HOLDS", "HarmonicReport", "IdentityResult",
    "InstabilityError", "KForm", "LemmaReport", "LieAlgebra",
    "NON_EINSTEIN", "NOT_APPLICABLE", "NewtonOptions", "NiceBasisReport",
    "NinthRoot", "NotLieAlgebraError", "ObstructionReport",
    "ParametrizedForm", "Polynomial", "PreconditionError", "PseudoMetric",
    "ReconstructionOptions", "ResidualReport", "RingMismatchError",
    "SearchConfig", "SingularMetricError", "StructureReport", "Subspace",
    "TorsionForms", "Vector", "VerifyResult", "ZeroDivisorError", "b_form",
    "ce_differential", "certified_gram", "certify", "change_of_basis",
    "closed_form_space", "contract", "decompose2", "decompose3",
    "derivations_traceless", "det_matrix", "dual_metric", "einstein_check",
    "form_inner", "from_json", "harmonic_report", "hodge_star", "induce",
    "is_nice_basis", "lemma_suite", "levi_civita", "musical_flat",
    "ninth_root", "obstruction_dims", "parametrize", "parse_form",
    "parse_structure", "polynomial_b_matrix", "rational_ninth_root",
    "residual_system", "ricci", "riemann", "scal_from_torsion", "solve",
    "span", "specialize", "stability_class", "standard_phi",
    "structure_report", "substitute_coframe", "to_json", "torsion_closed",
    "torsion_forms", "verify_identity", "wedge",
]
