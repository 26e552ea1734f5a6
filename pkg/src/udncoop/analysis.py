"""Closed-form estimate of the coherent-combining rate delta.

In the interference-limited, high-SIR regime the SE advantage of coherently
combining the n nearest in-cell transmitters over the strongest one alone
reduces to log2 of a signal-power ratio: the squared sum of amplitude-weighted
slope terms against n times the strongest term. The estimate only makes sense
outside the bounded core (nearest distance beyond the saturation radius), so
the functions refuse saturated inputs instead of quietly extrapolating.
These are diagnostics: headline metrics always come from exact SIR evaluation.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import PathLossParams

__all__ = [
    "RegimeError",
    "ApproxInputs",
    "approx_delta_se",
    "approx_delta_se_batch",
    "approx_gain",
    "rc_independence_check",
]

LOG2 = math.log(2.0)


class RegimeError(ValueError):
    """Raised when the slope-regime approximation does not apply."""


@dataclass(frozen=True)
class ApproxInputs:
    """Per-user link geometry the estimate consumes.

    distances and fading_mags are ordered nearest-first and paired
    elementwise; k_near counts how many links sit at or inside the corner
    radius of `law` (a prefix, since distances are sorted).
    """
    distances: np.ndarray
    fading_mags: np.ndarray
    k_near: int
    law: PathLossParams

    @classmethod
    def from_arrays(cls, distances, fading_mags, law: PathLossParams) -> "ApproxInputs":
        d = np.asarray(distances, dtype=float)
        m = np.asarray(fading_mags, dtype=float)
        if d.ndim != 1 or d.shape != m.shape:
            raise ValueError("distances and fading_mags must be 1-D and equal length")
        if d.size == 0:
            raise ValueError("at least one serving transmitter is required")
        if np.any(d <= 0) or np.any(np.diff(d) < 0):
            raise ValueError("distances must be positive and sorted nearest-first")
        if np.any(m < 0):
            raise ValueError("fading_mags are magnitudes and cannot be negative")
        return cls(distances=d, fading_mags=m,
                   k_near=int(np.count_nonzero(d <= law.r_c)), law=law)


def _checked(inputs: ApproxInputs):
    """Common regime guards; returns (d, m, law) for the formula body."""
    d, m, law = inputs.distances, inputs.fading_mags, inputs.law
    if inputs.k_near != int(np.count_nonzero(d <= law.r_c)):
        raise ValueError(
            f"k_near={inputs.k_near} disagrees with the distances/corner-radius "
            "split; build ApproxInputs via from_arrays")
    if d[0] <= law.r_b:
        raise RegimeError(
            f"nearest transmitter at {d[0]:.6g} m is inside the saturation "
            f"radius {law.r_b:.6g} m; the slope approximation does not apply")
    if m[0] == 0.0:
        raise RegimeError("strongest-link amplitude is zero; reference power vanishes")
    return d, m, law


def approx_delta_se(inputs: ApproxInputs) -> float:
    """Closed-form SE delta (bit/s/Hz) of coherent joint transmission.

    delta = log2( (sum_j m_j sqrt(loss_j))^2 / (n * m_1^2 loss_1) ): the first
    k_near links contribute d^(-alpha1/2), the rest sqrt(tau) * d^(-alpha2/2).
    """
    d, m, law = _checked(inputs)
    k = inputs.k_near
    amp = float(np.sum(m[:k] * d[:k] ** (-law.alpha1 / 2.0)))
    amp += float(np.sum(m[k:] * d[k:] ** (-law.alpha2 / 2.0))) * math.sqrt(law.tau)
    strongest = m[0] ** 2 * d[0] ** (-law.alpha1)
    return math.log(amp * amp / (d.size * strongest)) / LOG2


def approx_delta_se_batch(sizes: np.ndarray, offsets: np.ndarray,
                          d_flat: np.ndarray, m_flat: np.ndarray,
                          law: PathLossParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized approx_delta_se over ragged per-user groups.

    sizes[u] serving links for user u start at offsets[u] in the flat arrays
    (nearest-first within each group). Users whose nearest link is saturated,
    whose strongest amplitude is zero, or whose group is empty get
    valid=False and delta=NaN rather than an exception, so callers can tally
    them. Tests enforce agreement with the scalar form.
    """
    n_users = sizes.size
    delta = np.full(n_users, np.nan)
    valid = sizes > 0
    if d_flat.size == 0 or not np.any(valid):
        return delta, np.zeros(n_users, dtype=bool)
    first = np.where(valid, offsets, 0)
    valid &= (d_flat[first] > law.r_b) & (m_flat[first] > 0.0)
    near = d_flat <= law.r_c
    weights = np.empty_like(d_flat)
    weights[near] = d_flat[near] ** (-law.alpha1 / 2.0)
    weights[~near] = math.sqrt(law.tau) * d_flat[~near] ** (-law.alpha2 / 2.0)
    terms = m_flat * weights
    amp = np.zeros(n_users)
    for size in np.unique(sizes[valid]):
        sel = valid & (sizes == size)
        rows = offsets[sel, None] + np.arange(size)[None, :]
        amp[sel] = np.sum(terms[rows], axis=1)
    strongest = m_flat[first] ** 2 * d_flat[first] ** (-law.alpha1)
    v = valid
    delta[v] = np.log(amp[v] ** 2 / (sizes[v] * strongest[v])) / LOG2
    return delta, valid


def approx_gain(inputs: ApproxInputs, se_baseline: float) -> float:
    """Relative gain implied by the closed-form delta on a baseline SE."""
    if se_baseline <= 0.0:
        raise RegimeError("baseline spectral efficiency must be positive")
    return approx_delta_se(inputs) / se_baseline


def rc_independence_check(inputs: ApproxInputs, r_c_values) -> bool:
    """True when the delta is corner-radius independent across the values.

    Precondition (refused, not papered over): every serving link must sit at
    or inside the smallest tested corner radius, i.e. k_near stays the full
    set for all of them. The delta then contains no corner-radius term and
    any deviation beyond 1e-12 relative would be a formula bug.
    """
    values = [float(v) for v in r_c_values]
    if not values:
        raise ValueError("at least one corner radius is required")
    smallest = min(values)
    if smallest < inputs.law.r_b:
        raise ValueError(f"corner radius {smallest:.6g} below saturation radius")
    if np.any(inputs.distances > smallest):
        raise ValueError(
            "corner-radius independence only holds when every serving link is "
            f"inside the smallest tested radius {smallest:.6g} m")
    base = approx_delta_se(inputs)
    scale = max(abs(base), 1e-300)
    worst = 0.0
    for r_c in values:
        variant = ApproxInputs.from_arrays(
            inputs.distances, inputs.fading_mags, replace(inputs.law, r_c=r_c))
        worst = max(worst, abs(approx_delta_se(variant) - base) / scale)
    return worst <= 1e-12
