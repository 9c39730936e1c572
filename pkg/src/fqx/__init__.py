"""Arithmetic and statistics over F_q[x]."""

from .errors import BudgetExceeded, ClosedFormNotAvailable, FqxError, PreconditionError
from .field import FieldCtx, make_field, quadratic_character
from .polyring import (
    CycleType,
    Factorization,
    Poly,
    cycle_type,
    discriminant,
    divisor_k,
    divrem,
    factor,
    gcd,
    is_irreducible,
    mobius,
    poly_from_string,
    poly_to_string,
    powmod,
    von_mangoldt,
    von_mangoldt2,
)
from .ensembles import (
    IntervalSpec,
    ResidueClass,
    enumerate_monic,
    index_to_monic,
    interval_members,
    interval_representatives,
    interval_to_ap,
    monic_index,
    reversal,
    sample_monic,
    verify_interval_ap_bijection,
)
from .batch import (
    batch_cycle_types,
    batch_disc,
    batch_divisor_k,
    batch_divisor_r_small,
    batch_exponent_counts,
    batch_is_irreducible,
    batch_lambda2,
    batch_mobius,
    batch_von_mangoldt,
    block_index,
    divisor_k_from_counts,
    monic_block,
    proper_prime_power_indices,
    reduce_mod,
)
from .rmt import (
    PowerTraceSquared,
    ProductTraceStatistic,
    SecularCoefficientSquared,
    SymPowerTraceSquared,
    UnitarySpectrum,
    divisor_integral,
    haar_spectrum,
    mc_integral,
    rodgers_integral,
    sample_angles,
)
from .dirichlet import (
    DirichletCharacter,
    DirichletGroup,
    LPolynomial,
    build_unit_group,
    char_eval,
    explicit_formula_check,
    frobenius_angles_even_primitive,
    generating_identity_error,
    katz_average,
    l_polynomial,
    list_characters,
    m_sum,
    trivial_character,
    weighted_character_sums,
)
from .experiments import (
    ExperimentReport,
    ShiftTuple,
    cauchy_probability,
    euler_phi_poly,
    exp_ap_primes,
    exp_chowla,
    exp_cycle_census,
    exp_divisor_corr,
    exp_interval_cycles,
    exp_interval_primes,
    exp_joint_cycles,
    exp_prime_count,
    exp_twin,
    exp_var_G,
    exp_var_divisor,
    exp_var_lambda2,
    exp_var_mobius,
    exp_var_psi,
    necklace_count,
    partitions,
)

__version__ = "0.1.0"
