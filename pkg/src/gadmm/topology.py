"""Worker placement and link-cost models.

Workers live at random positions in a square area.  A link's cost is
either 1 (unit model, the default used for iteration-count accounting) or
the transmit energy needed to sustain a fixed bit rate over a free-space
channel: inverting ``R = B * log2(P / (d^2 * N0 * B))`` gives
``P = d^2 * N0 * B * 2^(R/B)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Placement",
    "EnergyModel",
    "UNIT_MODEL",
    "random_placement",
    "link_energy_cost",
    "cost_matrix",
    "center_worker",
]


@dataclass
class Placement:
    """Positions (meters) of N workers inside a square of side ``area_side``."""

    positions: np.ndarray  # (N, 2)
    area_side: float

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError("positions must be an (N, 2) array")
        if self.area_side <= 0:
            raise ValueError("area_side must be positive")
        if np.any(self.positions < 0) or np.any(self.positions > self.area_side):
            raise ValueError("positions must lie inside the area")

    @property
    def n_workers(self) -> int:
        return self.positions.shape[0]

    def distances(self) -> np.ndarray:
        """Pairwise Euclidean distance matrix."""
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)


@dataclass(frozen=True)
class EnergyModel:
    """Free-space transmit-energy link cost at a fixed target rate."""

    bandwidth_hz: float = 2e6
    noise_density: float = 1e-6
    rate_bps: float = 1e7


UNIT_MODEL = "unit"


def random_placement(n: int, area_side: float, rng_seed: int) -> Placement:
    """Drop ``n`` workers i.i.d. uniformly in the square; deterministic per seed."""
    if n < 2:
        raise ValueError("need at least two workers")
    if area_side <= 0:
        raise ValueError("area_side must be positive")
    rng = np.random.default_rng(rng_seed)
    return Placement(rng.uniform(0.0, area_side, size=(n, 2)), area_side)


def link_energy_cost(
    distance_m: float, bandwidth_hz: float, noise_density: float, rate_bps: float
) -> float:
    """Transmit power needed for ``rate_bps`` over distance ``distance_m``."""
    if bandwidth_hz <= 0 or noise_density <= 0 or rate_bps <= 0:
        raise ValueError("bandwidth, noise density, and rate must be positive")
    return distance_m**2 * noise_density * bandwidth_hz * 2.0 ** (rate_bps / bandwidth_hz)


def cost_matrix(placement: Placement, model: EnergyModel | str = UNIT_MODEL) -> np.ndarray:
    """Symmetric N x N link-cost matrix with zero diagonal.

    ``model="unit"`` sets every off-diagonal entry to 1.  An
    :class:`EnergyModel` prices each link by :func:`link_energy_cost` on the
    pairwise distance.  Co-located distinct workers get a zero-cost (free)
    link under the energy model.
    """
    n = placement.n_workers
    if model == UNIT_MODEL:
        cost = np.ones((n, n))
    elif isinstance(model, EnergyModel):
        d = placement.distances()
        cost = link_energy_cost(
            d, model.bandwidth_hz, model.noise_density, model.rate_bps
        )
    else:
        raise ValueError(f"unknown cost model {model!r}")
    np.fill_diagonal(cost, 0.0)
    return cost


def center_worker(placement: Placement) -> int:
    """1-based id of the worker closest to the area center; ties -> smallest id."""
    center = np.array([placement.area_side / 2.0, placement.area_side / 2.0])
    dist = np.linalg.norm(placement.positions - center, axis=1)
    return int(np.argmin(dist)) + 1
