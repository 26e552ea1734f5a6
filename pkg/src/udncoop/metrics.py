"""Spectral efficiency, cooperation gain, area power, and energy efficiency.

Aggregation pools user samples across drops (user-count weighted) and
attaches standard errors from drop-level batching: drops are independent by
construction, so each drop is one batch and a ratio-estimator variance covers
the unequal user counts. Gains are ratios of pooled means, not means of
per-user ratios.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

from .channel import correlation_coefficient
from .config import SimulationConfig

__all__ = [
    "MetricsError",
    "UndefinedGainError",
    "spectral_efficiency",
    "se_gain",
    "area_power_density",
    "AreaPower",
    "area_power",
    "energy_efficiency",
    "DropSummary",
    "summarize_drop",
    "aggregate",
    "MetricsReport",
]

LOG2 = math.log(2.0)


class MetricsError(RuntimeError):
    pass


class UndefinedGainError(MetricsError):
    """A gain ratio against a zero baseline has no value worth inventing."""


def spectral_efficiency(sir):
    """log2(1 + SIR) in bit/s/Hz; scalar in, float out; array in, array out."""
    sir_arr = np.asarray(sir, dtype=float)
    out = np.log1p(sir_arr) / LOG2
    return float(out) if sir_arr.ndim == 0 else out


def se_gain(se_coop: float, se_base: float) -> float:
    """Relative rate gain (se_coop - se_base) / se_base."""
    if se_base == 0.0:
        raise UndefinedGainError("baseline spectral efficiency is zero, gain undefined")
    return (se_coop - se_base) / se_base


def area_power_density(lambda_b: float, lambda_u: float, p_t: float,
                       theta: float, n: float) -> float:
    """Mean consumed power per unit area, W/m^2.

    n * lambda_u BSs per m^2 run their transmit chain at p_t, the rest sleep
    at theta * p_t. n above lambda_b / lambda_u would mean more serving BSs
    than BSs, which is an accounting bug, not a parameter choice.
    """
    if n < 0 or n * lambda_u > lambda_b:
        raise MetricsError(
            f"active density n*lambda_u = {n * lambda_u:.6g} per m2 is outside "
            f"[0, lambda_b = {lambda_b:.6g}]; serving-count bookkeeping is inconsistent"
        )
    return p_t * (n * lambda_u + theta * (lambda_b - n * lambda_u))


@dataclass(frozen=True)
class AreaPower:
    literal: float   # closed form at the configured cooperation target
    realized: float  # same form with the measured mean serving count


def area_power(config: SimulationConfig, n_effective: float) -> AreaPower:
    pw = config.power
    return AreaPower(
        literal=area_power_density(config.lambda_b, config.lambda_u,
                                   pw.p_t, pw.theta, config.n_coop),
        realized=area_power_density(config.lambda_b, config.lambda_u,
                                    pw.p_t, pw.theta, n_effective),
    )


def energy_efficiency(lambda_u: float, se_mean: float, p_area: float) -> float:
    """Area spectral efficiency per unit area power, bit/s/Hz/W."""
    return lambda_u * se_mean / p_area


@dataclass(frozen=True)
class DropSummary:
    """Value-passed reduction of one drop; everything aggregate() needs."""
    n_users: int
    n_eligible: int
    n_empty: int
    sum_se_single: float
    sum_se_nj: float
    sum_se_cj: float
    n_active_coop: int
    n_active_base: int
    n_sir_clamps: int = 0
    n_zero_interference: int = 0
    n_mrt_degenerate: int = 0
    n_resamples: int = 0
    n_nearest_mismatch: int = 0
    n_approx: int = 0
    sum_delta_sim: float = 0.0
    sum_delta_approx: float = 0.0
    sum_abs_gap: float = 0.0


def summarize_drop(budget, n_users: int, n_active_coop: int, n_active_base: int,
                   n_resamples: int = 0, n_nearest_mismatch: int = 0,
                   approx: tuple[int, float, float, float] = (0, 0.0, 0.0, 0.0),
                   ) -> DropSummary:
    """Reduce one LinkBudget (plus drop-level counters) to a DropSummary."""
    mask = budget.eligible
    n_eligible = int(np.count_nonzero(mask))
    return DropSummary(
        n_users=int(n_users),
        n_eligible=n_eligible,
        n_empty=int(n_users) - n_eligible,
        sum_se_single=float(np.sum(spectral_efficiency(budget.sir_single[mask]))),
        sum_se_nj=float(np.sum(spectral_efficiency(budget.sir_nj[mask]))),
        sum_se_cj=float(np.sum(spectral_efficiency(budget.sir_cj[mask]))),
        n_active_coop=int(n_active_coop),
        n_active_base=int(n_active_base),
        n_sir_clamps=budget.n_sir_clamps,
        n_zero_interference=budget.n_zero_interference,
        n_mrt_degenerate=budget.n_mrt_degenerate,
        n_resamples=int(n_resamples),
        n_nearest_mismatch=int(n_nearest_mismatch),
        n_approx=approx[0],
        sum_delta_sim=approx[1],
        sum_delta_approx=approx[2],
        sum_abs_gap=approx[3],
    )


@dataclass(frozen=True)
class MetricsReport:
    n_drops: int
    n_users: int
    n_eligible: int
    n_empty_cells: int
    rho: float
    rho_clamped: int
    se_single: float
    se_single_stderr: float
    se_nj: float
    se_nj_stderr: float
    se_cj: float
    se_cj_stderr: float
    gain_nj: float
    gain_nj_stderr: float
    gain_cj: float
    gain_cj_stderr: float
    diff_nj: float
    diff_nj_stderr: float
    diff_cj: float
    diff_cj_stderr: float
    n_active_per_user: float
    p_area_w_per_m2: float
    p_area_baseline_w_per_m2: float
    p_area_realized_w_per_m2: float
    ee_single: float
    ee_coop: float
    ee_gain: float
    ee_gain_stderr: float
    n_sir_clamps: int
    n_zero_interference: int
    n_zero_interference_drops: int
    n_mrt_degenerate: int
    n_resamples: int
    n_nearest_mismatch: int
    n_approx_users: int
    delta_se_sim_mean: float
    delta_se_approx_mean: float
    delta_se_gap_mean: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _pooled_stderr(per_drop_sums: np.ndarray, per_drop_counts: np.ndarray) -> float:
    """Standard error of sum(sums)/sum(counts) from drop batching.

    Taylor-linearized ratio estimator; collapses to std(batch means)/sqrt(D)
    for equal counts. A single drop gives no variance information and
    reports 0.0 (documented limitation, keeps stderr >= 0 everywhere).
    """
    d = per_drop_sums.size
    total = float(per_drop_counts.sum())
    if d < 2 or total == 0:
        return 0.0
    mean = per_drop_sums.sum() / total
    resid = per_drop_sums - mean * per_drop_counts
    return math.sqrt(float(np.sum(resid * resid)) * d / (d - 1)) / total


def _ratio_stderr(num_sums: np.ndarray, den_sums: np.ndarray) -> float:
    """Standard error of sum(num)/sum(den) over paired per-drop sums."""
    d = num_sums.size
    den_total = float(den_sums.sum())
    if d < 2 or den_total == 0:
        return 0.0
    ratio = num_sums.sum() / den_total
    resid = num_sums - ratio * den_sums
    return math.sqrt(float(np.sum(resid * resid)) * d / (d - 1)) / abs(den_total)


def aggregate(summaries, config: SimulationConfig) -> MetricsReport:
    """Pool drop summaries into one report under the given config.

    Raises MetricsError when no drop produced an eligible user, because every
    downstream ratio would be 0/0.
    """
    summaries = list(summaries)
    if not summaries:
        raise MetricsError("aggregate needs at least one drop summary")
    counts = np.array([s.n_eligible for s in summaries], dtype=float)
    # Plain-float total keeps every derived report field a Python scalar
    # (numpy's float64 repr would break the CSV exact round-trip contract).
    total = float(counts.sum())
    if total == 0:
        raise MetricsError("no eligible users in any drop (every cell came up empty)")
    sums_single = np.array([s.sum_se_single for s in summaries])
    sums_nj = np.array([s.sum_se_nj for s in summaries])
    sums_cj = np.array([s.sum_se_cj for s in summaries])

    se_single = float(sums_single.sum() / total)
    se_nj = float(sums_nj.sum() / total)
    se_cj = float(sums_cj.sum() / total)

    gain_nj = se_gain(se_nj, se_single)
    gain_cj = se_gain(se_cj, se_single)

    n_active_total = sum(s.n_active_coop for s in summaries)
    n_eff = n_active_total / total
    power = area_power(config, n_eff)
    p_base = area_power_density(config.lambda_b, config.lambda_u,
                                config.power.p_t, config.power.theta, 1.0)
    ee_single = energy_efficiency(config.lambda_u, se_single, p_base)
    ee_coop = energy_efficiency(config.lambda_u, se_cj, power.literal)
    power_ratio = p_base / power.literal
    gain_cj_stderr = _ratio_stderr(sums_cj, sums_single)

    n_approx = sum(s.n_approx for s in summaries)
    approx_scale = float(n_approx) if n_approx else math.nan
    corr = correlation_coefficient(config.csi)

    return MetricsReport(
        n_drops=len(summaries),
        n_users=sum(s.n_users for s in summaries),
        n_eligible=int(total),
        n_empty_cells=sum(s.n_empty for s in summaries),
        rho=corr.rho,
        rho_clamped=int(corr.clamped),
        se_single=se_single,
        se_single_stderr=_pooled_stderr(sums_single, counts),
        se_nj=se_nj,
        se_nj_stderr=_pooled_stderr(sums_nj, counts),
        se_cj=se_cj,
        se_cj_stderr=_pooled_stderr(sums_cj, counts),
        gain_nj=gain_nj,
        gain_nj_stderr=_ratio_stderr(sums_nj, sums_single),
        gain_cj=gain_cj,
        gain_cj_stderr=gain_cj_stderr,
        diff_nj=se_nj - se_single,
        diff_nj_stderr=_pooled_stderr(sums_nj - sums_single, counts),
        diff_cj=se_cj - se_single,
        diff_cj_stderr=_pooled_stderr(sums_cj - sums_single, counts),
        n_active_per_user=float(n_eff),
        p_area_w_per_m2=power.literal,
        p_area_baseline_w_per_m2=p_base,
        p_area_realized_w_per_m2=power.realized,
        ee_single=ee_single,
        ee_coop=ee_coop,
        ee_gain=ee_coop / ee_single,
        ee_gain_stderr=gain_cj_stderr * power_ratio,
        n_sir_clamps=sum(s.n_sir_clamps for s in summaries),
        n_zero_interference=sum(s.n_zero_interference for s in summaries),
        n_zero_interference_drops=sum(1 for s in summaries if s.n_zero_interference),
        n_mrt_degenerate=sum(s.n_mrt_degenerate for s in summaries),
        n_resamples=sum(s.n_resamples for s in summaries),
        n_nearest_mismatch=sum(s.n_nearest_mismatch for s in summaries),
        n_approx_users=n_approx,
        delta_se_sim_mean=sum(s.sum_delta_sim for s in summaries) / approx_scale,
        delta_se_approx_mean=sum(s.sum_delta_approx for s in summaries) / approx_scale,
        delta_se_gap_mean=sum(s.sum_abs_gap for s in summaries) / approx_scale,
    )
