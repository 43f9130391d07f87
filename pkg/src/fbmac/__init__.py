"""Rate regions for the two-user Gaussian multiple-access channel with feedback.

All rates are in nats per channel use unless a function says otherwise.
"""

from .channel import ChannelConfig, FeedbackCov, FeedbackModel, kw_matrix, validate
from .classic import (
    RateTriple,
    carleial_grid_max,
    cover_leung_boundary_point,
    cover_leung_region,
    fixed_point_map,
    no_feedback_region,
    ozarow_rects,
    ozarow_region,
    rho_star,
    willems_grid_max,
)
from .errors import FbmacError, UnknownCheck
from .geometry import Frontier, RateRegion, approx_subset, contains, from_triple, support, union_frontier
from .innovation import innovation_rates
from .kernels import BACKEND
from .presets import (
    choice1_params,
    choice2_params,
    choice3_params_si,
    corollary_regions,
    partial_choice1_params,
    perfect_fb_eta_region,
)
from .scheme import (
    SchemeParams,
    Variant,
    lmmse_matrix,
    power_usage,
    rate_bounds,
    rate_bounds_noisy,
    rate_bounds_partial,
    rate_bounds_si,
    simple_scheme_rates,
)
from .search import SearchConfig, SearchResult, optimize
from .simulate import analytic_joint_cov, mc_sample
from .splitting import prop6_feasible, prop7_feasible, rs1_region, split_for_rho
from .verify import run_verify

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChannelConfig",
    "FbmacError",
    "FeedbackCov",
    "FeedbackModel",
    "Frontier",
    "RateRegion",
    "RateTriple",
    "SchemeParams",
    "SearchConfig",
    "SearchResult",
    "UnknownCheck",
    "Variant",
    "analytic_joint_cov",
    "approx_subset",
    "carleial_grid_max",
    "choice1_params",
    "choice2_params",
    "choice3_params_si",
    "contains",
    "corollary_regions",
    "cover_leung_boundary_point",
    "cover_leung_region",
    "fixed_point_map",
    "from_triple",
    "innovation_rates",
    "kw_matrix",
    "lmmse_matrix",
    "mc_sample",
    "no_feedback_region",
    "optimize",
    "ozarow_rects",
    "ozarow_region",
    "partial_choice1_params",
    "perfect_fb_eta_region",
    "power_usage",
    "prop6_feasible",
    "prop7_feasible",
    "rate_bounds",
    "rate_bounds_noisy",
    "rate_bounds_partial",
    "rate_bounds_si",
    "rho_star",
    "rs1_region",
    "run_verify",
    "simple_scheme_rates",
    "split_for_rho",
    "support",
    "union_frontier",
    "validate",
    "willems_grid_max",
]
