"""Toroidal Poisson deployments and user-centric cooperative clustering.

BSs and users are independent PPPs on a square window folded into a torus,
which removes boundary effects without guard zones. Every BS belongs to the
Voronoi cell of its nearest user; a user is then served by the min(M, N)
nearest BSs of its own cell, so no BS ever serves two users.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "DeploymentError",
    "TorusMetric",
    "Deployment",
    "CooperationAssignment",
    "toroidal_distance",
    "sample_deployment",
    "assign_cooperation",
    "nearest_bs_indices",
]

MAX_RESAMPLE_ATTEMPTS = 100


class DeploymentError(RuntimeError):
    pass


def toroidal_distance(a, b, side: float):
    """Wrap-around Euclidean distance between points on a square torus.

    Accepts (..., 2) arrays and broadcasts; the result never exceeds
    side * sqrt(2) / 2.
    """
    delta = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    delta = np.minimum(delta, side - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


@dataclass(frozen=True)
class TorusMetric:
    side: float

    def distance(self, a, b):
        return toroidal_distance(a, b, self.side)

    def pairwise(self, a, b):
        """Distance matrix between point sets a (n,2) and b (m,2)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return toroidal_distance(a[:, None, :], b[None, :, :], self.side)


@dataclass(frozen=True)
class Deployment:
    bs_xy: np.ndarray       # (n_bs, 2) in [0, window_side)
    user_xy: np.ndarray     # (n_users, 2) in [0, window_side)
    window_side: float
    resample_count: int = 0

    @property
    def n_bs(self) -> int:
        return self.bs_xy.shape[0]

    @property
    def n_users(self) -> int:
        return self.user_xy.shape[0]


def sample_deployment(config, rng: np.random.Generator) -> Deployment:
    """Draw one PPP realization of BSs and users on the torus.

    Counts are Poisson with mean density * area, positions uniform. A drop
    with zero users is useless, so it is resampled (counted) up to
    MAX_RESAMPLE_ATTEMPTS before giving up.
    """
    side = config.window_side
    area = side * side
    n_bs = int(rng.poisson(config.lambda_b * area))
    bs_xy = rng.uniform(0.0, side, size=(n_bs, 2))
    resamples = 0
    while True:
        n_users = int(rng.poisson(config.lambda_u * area))
        if n_users > 0:
            break
        resamples += 1
        if resamples >= MAX_RESAMPLE_ATTEMPTS:
            raise DeploymentError(
                f"no users after {MAX_RESAMPLE_ATTEMPTS} resample attempts "
                f"(lambda_u * area = {config.lambda_u * area:.3g})"
            )
    user_xy = rng.uniform(0.0, side, size=(n_users, 2))
    return Deployment(bs_xy=bs_xy, user_xy=user_xy, window_side=side,
                      resample_count=resamples)


@dataclass(frozen=True)
class CooperationAssignment:
    """User-centric clustering of one deployment at a target size n_coop.

    coop_sets[i] holds user i's serving BS indices sorted nearest first
    (length min(cell size, n_coop), possibly empty); coop_dists mirrors it
    with torus distances. active_bs is the union of all coop sets in
    ascending BS-index order, and serving_user maps each active BS back to
    its user. Sets are pairwise disjoint by construction.
    """
    n_coop: int
    coop_sets: tuple
    coop_dists: tuple
    cell_sizes: np.ndarray
    active_bs: np.ndarray
    serving_user: np.ndarray

    @property
    def n_users(self) -> int:
        return len(self.coop_sets)

    @property
    def n_active(self) -> int:
        return self.active_bs.shape[0]

    def truncated(self, n_coop: int) -> "CooperationAssignment":
        """The same clustering at a smaller target (e.g. the N=1 baseline).

        Equals assign_cooperation(deployment, n_coop) because cells do not
        depend on the target and coop sets are nearest-first prefixes.
        """
        if n_coop >= self.n_coop:
            if n_coop == self.n_coop:
                return self
            raise ValueError(f"cannot grow assignment from {self.n_coop} to {n_coop}")
        sets = tuple(s[:n_coop] for s in self.coop_sets)
        dists = tuple(d[:n_coop] for d in self.coop_dists)
        return _finalize_assignment(n_coop, sets, dists, self.cell_sizes)


def _finalize_assignment(n_coop, sets, dists, cell_sizes) -> CooperationAssignment:
    n_users = len(sets)
    if n_users and any(len(s) for s in sets):
        flat_bs = np.concatenate([s for s in sets if len(s)])
        flat_user = np.concatenate(
            [np.full(len(s), u, dtype=np.int64) for u, s in enumerate(sets) if len(s)]
        )
        order = np.argsort(flat_bs, kind="stable")
        active = flat_bs[order]
        serving = flat_user[order]
    else:
        active = np.empty(0, dtype=np.int64)
        serving = np.empty(0, dtype=np.int64)
    return CooperationAssignment(
        n_coop=int(n_coop),
        coop_sets=sets,
        coop_dists=dists,
        cell_sizes=np.asarray(cell_sizes, dtype=np.int64),
        active_bs=active,
        serving_user=serving,
    )


def assign_cooperation(deployment: Deployment, n_coop: int) -> CooperationAssignment:
    """Cluster BSs to users: nearest-user cells, nearest-first coop prefixes.

    Nearest-user queries go through a periodic KD-tree, O(log n) per BS at
    the densities of interest. Ties (measure zero for continuous positions)
    resolve to the lower index through the stable sort below.
    """
    if n_coop < 1:
        raise ValueError(f"n_coop must be >= 1, got {n_coop}")
    side = deployment.window_side
    n_users = deployment.n_users
    n_bs = deployment.n_bs
    if n_users == 0:
        raise DeploymentError("assignment needs at least one user")
    if n_bs == 0:
        empty = tuple(np.empty(0, dtype=np.int64) for _ in range(n_users))
        zeros = tuple(np.empty(0, dtype=float) for _ in range(n_users))
        return _finalize_assignment(n_coop, empty, zeros, np.zeros(n_users))

    tree = cKDTree(deployment.user_xy, boxsize=side)
    dist, owner = tree.query(deployment.bs_xy)

    # Group BSs by owning user, orderly: owner asc, then distance, then index.
    order = np.lexsort((np.arange(n_bs), dist, owner))
    owner_sorted = owner[order]
    starts = np.searchsorted(owner_sorted, np.arange(n_users), side="left")
    ends = np.searchsorted(owner_sorted, np.arange(n_users), side="right")
    cell_sizes = ends - starts

    sets = []
    dists = []
    for u in range(n_users):
        take = min(cell_sizes[u], n_coop)
        rows = order[starts[u]:starts[u] + take]
        sets.append(rows.astype(np.int64))
        dists.append(dist[rows])
    return _finalize_assignment(n_coop, tuple(sets), tuple(dists), cell_sizes)


def nearest_bs_indices(deployment: Deployment) -> np.ndarray:
    """Index of the nearest BS overall (cell membership ignored) per user.

    Used to count how often the plain nearest-BS association would differ
    from the in-cell baseline.
    """
    if deployment.n_bs == 0:
        return np.full(deployment.n_users, -1, dtype=np.int64)
    tree = cKDTree(deployment.bs_xy, boxsize=deployment.window_side)
    _, idx = tree.query(deployment.user_xy)
    return idx.astype(np.int64)
