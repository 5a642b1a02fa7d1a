"""Exact lattice counting in a definite-or-indefinite quaternion algebra.

The package builds rational quaternion algebras with a certified maximal
order, manipulates full-rank sublattices exactly, and counts lattice points
of bounded reduced norm near a point of the upper half plane, checking the
count against a closed-form bound derived from the lattice's elementary
divisors.  Side calculators cover coprime-combination selection, balanced
conjugates of orders, short amplifier combinations of Hecke operators, and
the resulting exponent bookkeeping.
"""

__version__ = "0.1.0"

from .amplifier import (
    AmplifierSpec,
    Cx,
    ExponentReport,
    HeckeCombo,
    SatakeSample,
    amplifier_spec,
    build_amplifier,
    convolve,
    eigenvalue_lower_bound,
    exponent_bound,
    hecke_mul,
    kappa,
    local_bound_pow24,
    microlocal_profile,
    minimal_type_profile,
    newform_bound,
    smallest_root_cover,
)
from .balance import (
    BalanceSearchSpec,
    balanced_search,
    eichler_invariant_profile,
    smith_condition,
)
from .coprime import (
    CombinationProblem,
    auto_bound,
    sieve_count,
    sieve_lower_bound,
    solve,
)
from .counting import (
    CountQuery,
    CountReport,
    InjectionWitness,
    SmallNormReport,
    build_injection,
    enumerate_norm_ball,
    explicit_bound,
    in_ball,
    order_small_norm_check,
    project_alpha,
    reduce_into_box,
    square_norm_factor_check,
    sweep_counts,
    verify_congruences,
)
from .errors import (
    ContainmentError,
    DegenerateLatticeError,
    InfeasibleError,
    QuatlatError,
    SearchExhausted,
    TheoremViolation,
    UsageError,
)
from .lattice import (
    InvariantFactors,
    Lattice4,
    MaximalOrder,
    Shape,
    default_maximal_order,
    eichler_order,
    ideal_power_order,
    intersect,
    lattice_product,
    lattice_sum,
    norm_elements,
    saturate_to_maximal,
    traceless_slices,
    two_sided_prime_ideal,
    z_plus_f_order,
    z_plus_zw_order,
)
from .quat import (
    BoxConstant,
    Quat,
    QuatAlg,
    UpperHalfPoint,
    ZBox,
    apply_quat,
    box_constant,
    hilbert_symbol,
    iota_inf,
    u_dist,
)

__all__ = [
    "AmplifierSpec",
    "BalanceSearchSpec",
    "BoxConstant",
    "CombinationProblem",
    "ContainmentError",
    "CountQuery",
    "CountReport",
    "Cx",
    "DegenerateLatticeError",
    "ExponentReport",
    "HeckeCombo",
    "InfeasibleError",
    "InjectionWitness",
    "InvariantFactors",
    "Lattice4",
    "MaximalOrder",
    "Quat",
    "QuatAlg",
    "QuatlatError",
    "SatakeSample",
    "SearchExhausted",
    "Shape",
    "SmallNormReport",
    "TheoremViolation",
    "UpperHalfPoint",
    "UsageError",
    "ZBox",
    "amplifier_spec",
    "apply_quat",
    "auto_bound",
    "balanced_search",
    "box_constant",
    "build_amplifier",
    "build_injection",
    "convolve",
    "default_maximal_order",
    "eichler_invariant_profile",
    "eichler_order",
    "eigenvalue_lower_bound",
    "enumerate_norm_ball",
    "explicit_bound",
    "exponent_bound",
    "hecke_mul",
    "hilbert_symbol",
    "ideal_power_order",
    "in_ball",
    "intersect",
    "iota_inf",
    "kappa",
    "lattice_product",
    "lattice_sum",
    "local_bound_pow24",
    "microlocal_profile",
    "minimal_type_profile",
    "newform_bound",
    "norm_elements",
    "order_small_norm_check",
    "project_alpha",
    "reduce_into_box",
    "saturate_to_maximal",
    "sieve_count",
    "sieve_lower_bound",
    "smallest_root_cover",
    "smith_condition",
    "solve",
    "square_norm_factor_check",
    "sweep_counts",
    "traceless_slices",
    "two_sided_prime_ideal",
    "u_dist",
    "verify_congruences",
    "z_plus_f_order",
    "z_plus_zw_order",
]
