"""Semi-parametric extreme value analysis toolkit."""

from .asymptotics import (
    ConvergenceReport,
    ParentModel,
    TopIPoint,
    convergence_distance,
    penultimate_fit,
    top_i_cdf,
    top_i_pdf,
)
from .cluster import EiEstimate, armax_sample, blocks_ei, ei_probability_ratio, empirical_threshold
from .distributions import (
    GevParams,
    HallWelshModel,
    MssParams,
    NormalizingConstants,
    gev_cdf,
    gev_pdf,
    gev_quantile,
    gev_sample,
    hall_welsh_quantile,
    hall_welsh_sample,
    max_stable_constants,
    max_stability_defect,
    mss_cdf,
    normal_attraction_constants,
    pareto_sample,
)
from .errors import (
    ConvergenceError,
    DomainError,
    EstimationError,
    EstimatorOverflowError,
    EVTError,
    InvalidModelError,
    NoExceedanceError,
    SelectionError,
    SingularityError,
)
from .estimators import (
    EviEstimate,
    Method,
    gumbel_statistic,
    hill,
    hill_path,
    mean_order_p_evi,
    mixed_moment,
    moment,
    power_mean_evi,
)
from .port import PortBase, PortConfig, port_evi, port_excesses
from .reduced_bias import SecondOrderEstimate, estimate_second_order, mvrb_hill, mvrb_path
from .resampling import (
    BootstrapPlan,
    BootstrapResult,
    BootstrapTarget,
    bootstrap_osf,
    generalized_jackknife,
    gj_hill,
    jackknife_pseudo_values,
    pure_jackknife,
)
from .tail_stats import OrderedSample, excess_ratios, log_excess_moment, ratio_excess_moment

__version__ = "0.1.0"
