"""Exact computations of cotangent cohomology, finite-determinacy bounds and
certified order-by-order lifts of isomorphisms between families over Q[t]."""

__version__ = "0.1.0"

from .cotangent import (  # noqa: E402
    CoefficientModule,
    CotangentComplexData,
    ModulePresentation,
    Presentation,
    annihilator,
    is_zero_module,
    ls_complex,
    t0,
    t1,
    t2,
)
from .determinacy import (  # noqa: E402
    DeterminacyReport,
    DivisorReport,
    check_t1_support,
    determinacy_report,
    divisor_report,
    t2_stable_index,
    t_power_annihilating_t1,
)
from .errors import (  # noqa: E402
    BoxTooSmallError,
    ContextMismatchError,
    DetkitError,
    HypothesisError,
    ParseError,
    ResourceLimitError,
    VerificationError,
)
from .groebner import (  # noqa: E402
    DivisionCertificate,
    GroebnerBasis,
    ModuleElement,
    SyzygyBasis,
    buchberger,
    membership_certificate,
    module_kernel,
    normal_form,
    radical_membership,
    syzygy_basis,
)
from .lifting import (  # noqa: E402
    Divisor,
    FamilyPair,
    LiftCertificate,
    MapTruncation,
    PolynomialSystem,
    emit_artin_system,
    formal_lift,
    lift_equations,
    lift_iso_step,
    lift_relation,
    verify_lift,
)
from .oracle import TruncationBox, brute_membership, truncated_iso_search, truncated_t1_dimension  # noqa: E402
from .problem import ProblemSpec, parse_problem  # noqa: E402
from .rings import MonomialOrder, Polynomial, Ring, compare_monomials, poly_arith, truncate  # noqa: E402
