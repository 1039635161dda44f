from .functions import (
    LocalisationFunction,
    LocalisationKind,
    characteristic_ball,
    product_smooth,
    radial_smooth,
)
from .pairs import (
    half_difference_integral,
    half_difference_sum,
    pair_inner_continuous,
    pair_inner_discrete,
    pair_limit_continuous,
    pair_limit_discrete,
)
from .rfunc import check_homogeneity, eval_Rf, grad_Rf

__all__ = [
    "LocalisationFunction",
    "LocalisationKind",
    "characteristic_ball",
    "product_smooth",
    "radial_smooth",
    "eval_Rf",
    "grad_Rf",
    "check_homogeneity",
    "half_difference_integral",
    "half_difference_sum",
    "pair_inner_continuous",
    "pair_inner_discrete",
    "pair_limit_continuous",
    "pair_limit_discrete",
]
