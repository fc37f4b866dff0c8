"""starnogo: exact invariant-star-product feasibility on the symplectic plane.

Builds bidifferential-operator ansatz terms over Q(i), derives Lie-derivative
invariance constraints of a polynomial Hamiltonian action, expands truncated
associativity residuals, and decides feasibility by exact elimination,
emitting machine-checkable certificates with an independent replay checker.
"""

from .assoc import (
    AssocReport,
    FormalStarProduct,
    ResidualTarget,
    assoc_check_numeric,
    assoc_residual,
    extract,
    star_series,
)
from .certificate import (
    Certificate,
    CheckReport,
    Contradiction,
    ENGINE_VERSION,
    ForcedZero,
    STATUS_INFEASIBLE,
    STATUS_UNDECIDED,
    TargetRecord,
    ZeroFact,
    check_certificate,
)
from .constraints import (
    ConstraintSystem,
    Elimination,
    Provenance,
    Row,
    Substitution,
    ansatz_unknowns,
    build_ansatz,
    eliminate,
    invariance_rows,
    prop1_oracle,
    substitute,
    systems_equivalent,
)
from .operators import (
    BiDiffOp,
    TriDiffOp,
    VectorField,
    compose_left,
    compose_right,
    hamiltonian_vf,
    lie_derivative,
    lift_product,
    moyal_term,
    poisson,
)
from .pipeline import (
    DEFAULT_TARGETS,
    MoyalControlReport,
    NogoConfig,
    Prop1Report,
    default_hamiltonians,
    moyal_valuation,
    run_moyal_controls,
    run_nogo,
    run_prop1,
)
from .poly import Poly, PolyParseError, X, Y, parse_poly
from .scalars import I, MINUS_I, ONE, Scalar, ZERO
from .unknowns import Unknown, UnknownExpr

__version__ = ENGINE_VERSION

__all__ = [
    "AssocReport",
    "BiDiffOp",
    "Certificate",
    "CheckReport",
    "ConstraintSystem",
    "Contradiction",
    "DEFAULT_TARGETS",
    "ENGINE_VERSION",
    "Elimination",
    "ForcedZero",
    "FormalStarProduct",
    "I",
    "MINUS_I",
    "MoyalControlReport",
    "NogoConfig",
    "ONE",
    "Poly",
    "PolyParseError",
    "Prop1Report",
    "Provenance",
    "ResidualTarget",
    "Row",
    "STATUS_INFEASIBLE",
    "STATUS_UNDECIDED",
    "Scalar",
    "Substitution",
    "TargetRecord",
    "TriDiffOp",
    "Unknown",
    "UnknownExpr",
    "VectorField",
    "X",
    "Y",
    "ZERO",
    "ZeroFact",
    "ansatz_unknowns",
    "assoc_check_numeric",
    "assoc_residual",
    "build_ansatz",
    "check_certificate",
    "compose_left",
    "compose_right",
    "default_hamiltonians",
    "eliminate",
    "extract",
    "hamiltonian_vf",
    "invariance_rows",
    "lie_derivative",
    "lift_product",
    "moyal_term",
    "moyal_valuation",
    "parse_poly",
    "poisson",
    "prop1_oracle",
    "run_moyal_controls",
    "run_nogo",
    "run_prop1",
    "star_series",
    "substitute",
    "systems_equivalent",
]
