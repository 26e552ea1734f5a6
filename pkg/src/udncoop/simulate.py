"""Monte Carlo driver: independent drops, per-drop reduction, aggregation.

Each drop owns a child RNG spawned from the base seed by drop index, so the
stream a drop consumes never depends on how many workers ran it or in what
order drops finished. Workers return DropSummary values that are reduced in
drop order, which makes parallel runs bit-identical to serial ones.
"""

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analysis import approx_delta_se_batch
from .channel import correlation_coefficient, realize_channels
from .config import SimulationConfig
from .geometry import assign_cooperation, nearest_bs_indices, sample_deployment
from .link import compute_link_budgets
from .metrics import (DropSummary, MetricsReport, aggregate,
                      spectral_efficiency, summarize_drop)

__all__ = [
    "drop_rng",
    "run_drop",
    "collect_summaries",
    "run_simulation",
    "default_jobs",
]

JOBS_ENV_VAR = "UDNCOOP_JOBS"


def drop_rng(seed: int, drop_index: int) -> np.random.Generator:
    """Independent per-drop generator; same (seed, index) -> same stream."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(drop_index,)))


def default_jobs() -> int:
    """Worker count from the environment, else every core."""
    raw = os.environ.get(JOBS_ENV_VAR, "").strip()
    if raw:
        jobs = int(raw)
        if jobs < 1:
            raise ValueError(f"{JOBS_ENV_VAR} must be a positive integer, got {raw!r}")
        return jobs
    return os.cpu_count() or 1


def run_drop(config: SimulationConfig, drop_index: int) -> DropSummary:
    """Simulate one deployment snapshot and reduce it to a DropSummary."""
    rng = drop_rng(config.seed, drop_index)
    deployment = sample_deployment(config, rng)
    assignment = assign_cooperation(deployment, config.n_coop)
    baseline = assignment.truncated(1)
    correlation = correlation_coefficient(config.csi)
    channels = realize_channels(deployment, assignment, config.path_loss,
                                correlation, rng)
    budget = compute_link_budgets(assignment, channels, config.sir_cap,
                                  baseline=baseline)

    users = np.flatnonzero(budget.eligible)
    mismatch = 0
    approx = (0, 0.0, 0.0, 0.0)
    if users.size:
        nearest = nearest_bs_indices(deployment)
        serving = np.array([assignment.coop_sets[u][0] for u in users])
        mismatch = int(np.count_nonzero(serving != nearest[users]))

        sizes = np.array([assignment.coop_sets[u].size for u in users])
        offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        flat_users = np.repeat(users, sizes)
        flat_rows = np.searchsorted(
            assignment.active_bs,
            np.concatenate([assignment.coop_sets[u] for u in users]))
        d_flat = np.concatenate([assignment.coop_dists[u] for u in users])
        m_flat = np.abs(channels.h_true[flat_rows, flat_users])
        delta_approx, valid = approx_delta_se_batch(
            sizes, offsets, d_flat, m_flat, config.path_loss)
        if np.any(valid):
            picked = users[valid]
            delta_sim = (spectral_efficiency(budget.sir_cj[picked])
                         - spectral_efficiency(budget.sir_single[picked]))
            approx = (
                int(np.count_nonzero(valid)),
                float(np.sum(delta_sim)),
                float(np.sum(delta_approx[valid])),
                float(np.sum(np.abs(delta_sim - delta_approx[valid]))),
            )

    return summarize_drop(
        budget,
        n_users=deployment.n_users,
        n_active_coop=assignment.n_active,
        n_active_base=baseline.n_active,
        n_resamples=deployment.resample_count,
        n_nearest_mismatch=mismatch,
        approx=approx,
    )


def _drop_task(args) -> DropSummary:
    config, drop_index = args
    return run_drop(config, drop_index)


def collect_summaries(config: SimulationConfig, jobs: int = 1) -> list[DropSummary]:
    """All drop summaries, in drop order regardless of worker scheduling."""
    if jobs < 1:
        raise ValueError(f"jobs must be positive, got {jobs}")
    indices = range(config.n_drops)
    if jobs == 1 or config.n_drops == 1:
        return [run_drop(config, i) for i in indices]
    tasks = [(config, i) for i in indices]
    chunk = max(1, config.n_drops // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_drop_task, tasks, chunksize=chunk))


def run_simulation(config: SimulationConfig, jobs: int = 1) -> MetricsReport:
    """End to end: drops -> summaries -> pooled metrics report."""
    return aggregate(collect_summaries(config, jobs), config)
