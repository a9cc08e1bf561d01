"""Finite-blocklength covert communication over AWGN channels.

Exact total variation distance at an energy-detecting adversary, the full
family of divergence bounds, admissible-power design, normal-approximation
throughput brackets, series expansions of the TVD, convergence-rate fits,
and Monte Carlo / quadrature oracles that certify all of it.
"""

from .backend import BACKEND_NAME
from .channel_metrics import (
    ChannelPoint,
    DivergenceReport,
    ErrorPair,
    Thresholds,
    alpha_beta,
    bound_family,
    hellinger_sq,
    kl_pair,
    thresholds,
    tvd_exact,
)
from .covert_design import (
    CovertBudget,
    PowerBracket,
    ThroughputReport,
    capacity_bits,
    dispersion_bits_sq,
    power_bracket,
    power_exact,
    power_necessary,
    power_sufficient,
    second_order_probe,
    throughput_bounds,
    throughput_normal,
)
from .expansions import (
    AOffset,
    Branch,
    ExpansionConfig,
    ExpansionResult,
    TruncationRule,
    gamma_half_n_prefactor,
    tvd_expansion,
)
from .asymptotics import (
    Quantity,
    RateFit,
    SweepSpec,
    fit_subhalf,
    fit_superhalf,
    kl_asymptote_check,
    sweep,
)
from .oracle import McConfig, McEstimate, mc_tvd, quad_tvd
from .specfun import GammaArgs, erfc, gauss_q, gauss_q_inv, ln_gamma, reg_gamma_pair

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND_NAME",
    # specfun
    "GammaArgs", "ln_gamma", "reg_gamma_pair", "erfc", "gauss_q", "gauss_q_inv",
    # channel metrics
    "ChannelPoint", "Thresholds", "DivergenceReport", "ErrorPair",
    "thresholds", "tvd_exact", "hellinger_sq", "kl_pair", "bound_family", "alpha_beta",
    # covert design
    "CovertBudget", "PowerBracket", "ThroughputReport",
    "power_necessary", "power_sufficient", "power_exact", "power_bracket",
    "capacity_bits", "dispersion_bits_sq", "throughput_normal", "throughput_bounds",
    "second_order_probe",
    # expansions
    "Branch", "TruncationRule", "AOffset", "ExpansionConfig", "ExpansionResult",
    "gamma_half_n_prefactor", "tvd_expansion",
    # asymptotics
    "Quantity", "SweepSpec", "RateFit", "sweep", "fit_subhalf", "fit_superhalf",
    "kl_asymptote_check",
    # oracle
    "McConfig", "McEstimate", "mc_tvd", "quad_tvd",
]
