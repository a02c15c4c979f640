"""Likelihood degrees, Euler characteristics and homotopy continuation for very affine varieties."""

from .family import (
    FamilyParams,
    FamilyReport,
    MonomialMap,
    build_Cm_model,
    build_U,
    build_Vm_param,
    chi_IC_transverse,
    chi_Um,
    chi_Vm,
    monomial_matrix,
    off_H_certificate,
    singular_points,
    verify_family,
)
from .likelihood import (
    MLReport,
    ModelError,
    NotCertifiedError,
    TorusModel,
    assemble,
    euler_char_smooth,
    load_model,
    ml_degree,
    model_from_dict,
    sample_generic_data,
)
from .polyrat import (
    Polynomial,
    RationalFunction,
    clear_denominators,
    parse_polynomial,
    parse_rational,
    univariate_gcd,
    variables,
)
from .solver import (
    SolutionSet,
    SquareSystem,
    TrackerConfig,
    newton_refine,
    solve_square,
    track_path,
)

__version__ = "0.1.0"
