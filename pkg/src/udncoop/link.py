"""Per-user link budgets for the three transmission schemes.

Signal terms: single = nearest in-cell BS only; non-coherent = cooperating
BSs add in power; coherent = cooperating BSs precode against the CSI
estimate and add in amplitude. Interference always comes from every other
active BS of the same scenario, so the baseline and the cooperative runs see
different active sets on the same deployment and the same fading draws.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import CooperationAssignment
from .channel import ChannelRealization

__all__ = [
    "LinkBudget",
    "signal_power_noncoherent",
    "signal_power_coherent",
    "interference_power",
    "compute_link_budgets",
]


def signal_power_noncoherent(h_true, loss) -> float:
    """Power-additive combining: sum |h|^2 * loss over the cooperation set."""
    h = np.asarray(h_true)
    return float(np.sum((h.real ** 2 + h.imag ** 2) * np.asarray(loss)))


def signal_power_coherent(h_true, h_est, loss):
    """Amplitude combining under per-BS unit-modulus precoding.

    Each BS applies w = conj(h_est)/|h_est|; an exactly-zero estimate leaves
    that BS unweighted (w = 1) and is reported as degenerate.

    Returns:
        (power, n_degenerate)
    """
    h_true = np.asarray(h_true, dtype=complex)
    h_est = np.asarray(h_est, dtype=complex)
    mag = np.abs(h_est)
    degenerate = mag == 0.0
    w = np.where(degenerate, 1.0 + 0.0j, np.conj(h_est) / np.where(degenerate, 1.0, mag))
    amp = np.sum(h_true * w * np.sqrt(np.asarray(loss)))
    return float(amp.real ** 2 + amp.imag ** 2), int(np.count_nonzero(degenerate))


def interference_power(h_true, loss) -> float:
    """Aggregate power from the given interferer entries (active minus coop)."""
    h = np.asarray(h_true)
    return float(np.sum((h.real ** 2 + h.imag ** 2) * np.asarray(loss)))


@dataclass(frozen=True)
class LinkBudget:
    """Arrays indexed by user; NaN where the user has an empty cell.

    sir_* are clamped into (0, sir_cap]; zero-interference users hit the cap
    and both events are counted.
    """
    eligible: np.ndarray
    s_single: np.ndarray
    i_single: np.ndarray
    sir_single: np.ndarray
    s_nj: np.ndarray
    s_cj: np.ndarray
    i_coop: np.ndarray
    sir_nj: np.ndarray
    sir_cj: np.ndarray
    n_sir_clamps: int
    n_zero_interference: int
    n_mrt_degenerate: int

    @property
    def n_eligible(self) -> int:
        return int(np.count_nonzero(self.eligible))


def _clamped_sir(signal, interference, cap):
    """signal/interference with the zero-interference and cap policies applied.

    Returns (sir, n_clamps, n_zero): n_clamps counts every user pushed onto
    the cap, n_zero the subset caused by an empty interferer sum.
    """
    zero = interference == 0.0
    with np.errstate(divide="ignore"):
        sir = np.where(zero, np.inf, signal / np.where(zero, 1.0, interference))
    over = sir > cap
    return np.where(over, cap, sir), int(np.count_nonzero(over)), int(np.count_nonzero(zero))


def compute_link_budgets(assignment: CooperationAssignment,
                         channels: ChannelRealization,
                         sir_cap: float,
                         baseline: CooperationAssignment | None = None) -> LinkBudget:
    """Evaluate all three schemes for every user of one drop.

    The baseline is the N=1 truncation of `assignment`, which is exactly the
    nearest-in-cell association; because each baseline BS is the first member
    of its user's cooperation set, both scenarios reuse the same fading rows
    (common random numbers). A baseline passed explicitly is checked against
    that truncation rather than trusted.
    """
    if baseline is not None and baseline is not assignment:
        same = baseline.n_users == assignment.n_users and all(
            b.size == min(1, s.size) and (b.size == 0 or b[0] == s[0])
            for b, s in zip(baseline.coop_sets, assignment.coop_sets)
        )
        if not same:
            raise ValueError("baseline must be the n_coop=1 truncation of the "
                             "cooperative assignment (same deployment, same cells)")
    n_users = assignment.n_users
    active = assignment.active_bs
    nan = np.full(n_users, np.nan)
    out = {k: nan.copy() for k in
           ("s_single", "i_single", "sir_single", "s_nj", "s_cj", "i_coop",
            "sir_nj", "sir_cj")}
    eligible = assignment.cell_sizes > 0
    users = np.flatnonzero(eligible)
    if users.size == 0:
        return LinkBudget(eligible=eligible, n_sir_clamps=0,
                          n_zero_interference=0, n_mrt_degenerate=0, **out)

    # Flatten the ragged coop sets once; rows index into the active arrays.
    sizes = np.array([assignment.coop_sets[u].size for u in users])
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    flat_rows = np.searchsorted(active, np.concatenate([assignment.coop_sets[u] for u in users]))
    flat_users = np.repeat(users, sizes)

    power = (channels.h_true.real ** 2 + channels.h_true.imag ** 2) * channels.loss
    coop_vals = power[flat_rows, flat_users]
    s_nj = np.add.reduceat(coop_vals, offsets)

    h_true_f = channels.h_true[flat_rows, flat_users]
    h_est_f = channels.h_est[flat_rows, flat_users]
    mag = np.abs(h_est_f)
    degenerate = mag == 0.0
    w = np.where(degenerate, 1.0 + 0.0j, np.conj(h_est_f) / np.where(degenerate, 1.0, mag))
    amps = np.add.reduceat(h_true_f * w * np.sqrt(channels.loss[flat_rows, flat_users]), offsets)
    s_cj = amps.real ** 2 + amps.imag ** 2

    # Interference by explicit term sums (a total-minus-signal shortcut loses
    # precision exactly when interference is small, the regime that matters).
    masked = power[:, users].copy()
    masked[flat_rows, np.searchsorted(users, flat_users)] = 0.0
    i_coop = masked.sum(axis=0)

    base_rows = np.searchsorted(active, np.array([assignment.coop_sets[u][0] for u in users]))
    s_single = power[base_rows, users]
    base_masked = power[np.ix_(base_rows, users)].copy()
    base_masked[np.arange(users.size), np.arange(users.size)] = 0.0
    i_single = base_masked.sum(axis=0)

    sir_single, c1, z1 = _clamped_sir(s_single, i_single, sir_cap)
    sir_nj, c2, z2 = _clamped_sir(s_nj, i_coop, sir_cap)
    sir_cj, c3, z3 = _clamped_sir(s_cj, i_coop, sir_cap)

    for key, val in (("s_single", s_single), ("i_single", i_single),
                     ("sir_single", sir_single), ("s_nj", s_nj), ("s_cj", s_cj),
                     ("i_coop", i_coop), ("sir_nj", sir_nj), ("sir_cj", sir_cj)):
        out[key][users] = val
    return LinkBudget(
        eligible=eligible,
        n_sir_clamps=c1 + c2 + c3,
        n_zero_interference=z1 + z2 + z3,
        n_mrt_degenerate=int(np.count_nonzero(degenerate)),
        **out,
    )
