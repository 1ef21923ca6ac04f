"""Numerical laboratory for the linear dynamics of weighted shift operators.

The package instantiates weighted shifts on finitely supported vectors of
compactly supported functions, multiplication-composition operators on
single functions, evaluates the sup-over-compact-set weight products whose
decay certifies transitivity and mixing, and constructs the transitivity
witnesses and Segal-algebra machinery (series norms, Urysohn bumps,
approximate identities) behind those certificates.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    EmptyRegion,
    HyperdynError,
    InvalidParameters,
    NonInvertibleWeight,
    NonInvertibleWeights,
    NormDepthExceeded,
    NotInAlgebra,
    NotInDenseSet,
    SetsNotSeparated,
    ZeroInput,
)
from .funcspace import (  # noqa: F401
    BoundedFunction,
    ClampedAffine,
    CompactSet,
    CompactlySupportedFunction,
    Constant,
    Homeomorphism,
    PiecewiseLinear,
    Product,
    Reciprocal,
    Sum,
    compose_homeo,
    evaluate,
    pointwise_product,
    pointwise_sum,
    region_abs_ge,
    region_abs_le,
    sup_norm,
    sup_over_set,
)
from .hilbert import (  # noqa: F401
    ModuleVector,
    WeightSequence,
    WitnessResult,
    apply_inverse_multiplier,
    apply_inverse_shift,
    apply_multiplier,
    apply_shift,
    module_norm,
    product_of,
    transitivity_witness,
)
from .criteria import (  # noqa: F401
    CriterionReport,
    RunawayResult,
    TraceRow,
    backward_product,
    check_mixing,
    find_subsequence,
    forward_product,
    mixing_weights,
    multiplier_products,
    multiplier_scan,
    runaway_check,
    scan_products,
    witness_decay_bounds,
)
from .segal import (  # noqa: F401
    ApproximateIdentityResult,
    BumpSpec,
    MembershipResult,
    SegalElement,
    SegalNormResult,
    SegalWeight,
    approximate_identity,
    dense_sample,
    is_invariant_under,
    membership_check,
    segal_norm,
    shifted_norm,
    urysohn_bump,
)
from .c0space import (  # noqa: F401
    C0TauVector,
    apply_shift_c0,
    c0_norm,
    c0_witness,
)
