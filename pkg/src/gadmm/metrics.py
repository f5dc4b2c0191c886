"""Evaluation quantities: objective error, communication cost, consensus violation.

Total communication cost (TC) charges one link-cost term per sender per
round.  A two-receiver local broadcast is attributed by default at the max
of the two link costs (transmit power must reach the farther neighbor); a
sum mode exists for sensitivity studies.  A full broadcast (3+ receivers,
the parameter-server downlink) is always charged at the max link.  Under
unit costs this makes a chain iteration cost exactly N (two rounds of N/2
senders) and a parameter-server iteration cost exactly N + 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .netsim import TransmissionRecord
from .objectives import LocalObjective, eval_loss

__all__ = [
    "TcPolicy",
    "TraceRow",
    "TraceWriter",
    "TRACE_COLUMNS",
    "objective_error",
    "transmission_cost",
    "total_comm_cost",
    "acv",
]

MAX_OVER_RECEIVERS = "max_over_receivers"
SUM_OVER_RECEIVERS = "sum_over_receivers"


@dataclass(frozen=True)
class TcPolicy:
    mode: str = "decentralized"  # or "centralized"
    link_cost_attribution: str = MAX_OVER_RECEIVERS

    def __post_init__(self):
        if self.mode not in ("decentralized", "centralized"):
            raise ValueError(f"unknown TC mode {self.mode!r}")
        if self.link_cost_attribution not in (MAX_OVER_RECEIVERS, SUM_OVER_RECEIVERS):
            raise ValueError(
                f"unknown attribution {self.link_cost_attribution!r}"
            )


def objective_error(
    objs: Sequence[LocalObjective], thetas: Sequence[np.ndarray], f_star: float
) -> float:
    """``|sum_n f_n(theta_n) - f_star|`` against the pooled reference optimum."""
    if len(objs) != len(thetas):
        raise ValueError("one model per objective required")
    total = sum(eval_loss(o, th) for o, th in zip(objs, thetas))
    return abs(total - f_star)


def transmission_cost(
    entry: TransmissionRecord, cost: np.ndarray, policy: TcPolicy
) -> float:
    """Cost charged to one sender for one round."""
    n = cost.shape[0]
    if not 1 <= entry.sender <= n or any(not 1 <= r <= n for r in entry.receivers):
        raise ValueError(f"unknown worker in log entry {entry}")
    links = [float(cost[entry.sender - 1, r - 1]) for r in entry.receivers]
    if len(links) == 1:
        return links[0]
    if len(links) == 2 and policy.link_cost_attribution == SUM_OVER_RECEIVERS:
        return sum(links)
    return max(links)


def total_comm_cost(
    log: Iterable[TransmissionRecord], cost: np.ndarray, policy: TcPolicy
) -> float:
    """Sum of per-sender per-round costs over a transmission log."""
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError("cost matrix must be square")
    return sum(transmission_cost(e, cost, policy) for e in log)


def acv(thetas: Sequence[np.ndarray], norm: str = "l1") -> float:
    """Average consensus constraint violation across chain edges.

    ``sum_{n=1}^{N-1} |theta_n - theta_{n+1}| / N`` with the entrywise l1
    norm by default (l2 available), over models in chain order.
    """
    n = len(thetas)
    if n < 2:
        raise ValueError("need at least two models")
    total = 0.0
    for a, b in zip(thetas[:-1], thetas[1:]):
        diff = np.asarray(a) - np.asarray(b)
        if norm == "l1":
            total += float(np.sum(np.abs(diff)))
        elif norm == "l2":
            total += float(np.linalg.norm(diff))
        else:
            raise ValueError(f"unknown norm {norm!r}")
    return total / n


TRACE_COLUMNS = [
    "iter",
    "objective_error",
    "primal_res",
    "dual_res",
    "lyapunov",
    "contraction",
    "tc_cumulative",
    "acv",
    "wall_ms",
]


@dataclass
class TraceRow:
    """One iteration of any algorithm, in the common trace schema."""

    iter: int
    objective_error: float
    primal_res: float
    dual_res: float
    lyapunov: float | None
    contraction: float
    tc_cumulative: float
    acv: float
    wall_ms: float

    def as_record(self) -> list:
        return [
            self.iter,
            repr(self.objective_error),
            repr(self.primal_res),
            repr(self.dual_res),
            "" if self.lyapunov is None else repr(self.lyapunov),
            repr(self.contraction),
            repr(self.tc_cumulative),
            repr(self.acv),
            repr(self.wall_ms),
        ]


class TraceWriter:
    """Accumulates trace rows; optionally streams them to a CSV file."""

    def __init__(self, path=None):
        self.rows: list[TraceRow] = []
        self._path = path
        self._fh = None
        self._writer = None
        if path is not None:
            self._fh = open(path, "w", newline="")
            self._writer = csv.writer(self._fh)
            self._writer.writerow(TRACE_COLUMNS)

    def emit(self, row: TraceRow):
        self.rows.append(row)
        if self._writer is not None:
            self._writer.writerow(row.as_record())

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None
            self._writer = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
