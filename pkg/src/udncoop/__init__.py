"""Monte Carlo study of base-station cooperation in ultra-dense networks.

Simulates downlink joint transmission — single nearest-transmitter service,
non-coherent power combining, and coherent combining under perfect or delayed
channel knowledge — over Poisson deployments on a torus with a bounded
dual-slope path loss, and reports spectral-efficiency and energy-efficiency
statistics with standard errors.
"""

__version__ = "0.1.0"

from .analysis import (ApproxInputs, RegimeError, approx_delta_se,
                       approx_gain, rc_independence_check)
from .channel import (ChannelRealization, Correlation, bessel_j0,
                      correlation_coefficient, path_loss, realize_channels)
from .config import (ConfigError, CsiMode, CsiParams, PathLossParams,
                     PowerParams, SimulationConfig, figure_preset,
                     load_config, save_config, validate)
from .geometry import (CooperationAssignment, Deployment, DeploymentError,
                       TorusMetric, assign_cooperation, sample_deployment,
                       toroidal_distance)
from .link import LinkBudget, compute_link_budgets
from .metrics import (DropSummary, MetricsError, MetricsReport,
                      UndefinedGainError, aggregate, area_power,
                      energy_efficiency, se_gain, spectral_efficiency)
from .simulate import collect_summaries, run_drop, run_simulation

__all__ = [
    "__version__",
    "ApproxInputs", "RegimeError", "approx_delta_se", "approx_gain",
    "rc_independence_check",
    "ChannelRealization", "Correlation", "bessel_j0",
    "correlation_coefficient", "path_loss", "realize_channels",
    "ConfigError", "CsiMode", "CsiParams", "PathLossParams", "PowerParams",
    "SimulationConfig", "figure_preset", "load_config", "save_config",
    "validate",
    "CooperationAssignment", "Deployment", "DeploymentError", "TorusMetric",
    "assign_cooperation", "sample_deployment", "toroidal_distance",
    "LinkBudget", "compute_link_budgets",
    "DropSummary", "MetricsError", "MetricsReport", "UndefinedGainError",
    "aggregate", "area_power", "energy_efficiency", "se_gain",
    "spectral_efficiency",
    "collect_summaries", "run_drop", "run_simulation",
]
