"""Centralized baselines: parameter-server ADMM and batch gradient descent.

Both talk through a star topology.  Each iteration every worker sends one
uplink message (its model for ADMM, its gradient for GD) and the server
answers with one broadcast, so an iteration costs N + 1 under unit link
costs with a dedicated server.  When one of the workers doubles as the
server (``center`` given, the energy-model setup) that worker has nothing
to upload and an iteration carries N - 1 uplinks plus the broadcast.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .engine import GadmmConfig
from .metrics import TcPolicy, TraceRow, TraceWriter, acv, objective_error, transmission_cost
from .netsim import Message, MessageBus, StarPolicy
from .objectives import (
    LocalObjective,
    NeighborContext,
    NeighborTerm,
    compute_reference_optimum,
    eval_grad,
    solve_local_subproblem,
)

__all__ = [
    "PsAdmmState",
    "BaselineRun",
    "admm_ps_step",
    "gd_step",
    "default_gd_step_size",
    "run_admm_ps",
    "run_gd",
]


@dataclass
class PsAdmmState:
    """Worker models, the server's global model, and one dual per worker."""

    thetas: list[np.ndarray]
    global_theta: np.ndarray
    lambdas: list[np.ndarray]

    def __post_init__(self):
        d = self.global_theta.shape[0]
        if len(self.thetas) != len(self.lambdas):
            raise ValueError("one dual per worker required")
        for v in (*self.thetas, *self.lambdas):
            if v.shape != (d,):
                raise ValueError("all vectors must share the model dimension")

    @classmethod
    def zeros(cls, n_workers: int, dim: int) -> "PsAdmmState":
        return cls(
            [np.zeros(dim) for _ in range(n_workers)],
            np.zeros(dim),
            [np.zeros(dim) for _ in range(n_workers)],
        )


@dataclass
class BaselineRun:
    trace: list[TraceRow]
    converged: bool
    stop_reason: str
    iterations: int
    total_tc: float
    theta_star: np.ndarray
    f_star: float
    final_thetas: list[np.ndarray]


def admm_ps_step(
    state: PsAdmmState,
    objs: list[LocalObjective],
    rho: float,
    inner_tol: float = 1e-10,
) -> PsAdmmState:
    """One parameter-server ADMM iteration.

    Workers minimize ``f_n(theta) + <lambda_n, theta - Theta> +
    (rho/2) ||theta - Theta||^2`` in parallel, the server averages
    ``theta_n + lambda_n / rho``, and every worker then shifts its dual by
    ``rho (theta_n - Theta)``.
    """
    n = len(objs)
    thetas = []
    for obj, lam in zip(objs, state.lambdas):
        ctx = NeighborContext([NeighborTerm(lam, +1, state.global_theta)])
        thetas.append(solve_local_subproblem(obj, rho, ctx, inner_tol))
    global_theta = sum(th + lam / rho for th, lam in zip(thetas, state.lambdas)) / n
    lambdas = [
        lam + rho * (th - global_theta) for th, lam in zip(thetas, state.lambdas)
    ]
    return PsAdmmState(thetas, global_theta, lambdas)


def gd_step(
    global_theta: np.ndarray, objs: list[LocalObjective], step_size: float
) -> np.ndarray:
    """Full-batch descent on the summed loss: ``Theta - eta * sum_n grad f_n``."""
    if step_size <= 0:
        raise ValueError("step_size must be positive")
    grad = sum(eval_grad(o, global_theta) for o in objs)
    return global_theta - step_size * grad


def default_gd_step_size(objs: list[LocalObjective], iters: int = 200) -> float:
    """1/L with L the largest pooled-curvature eigenvalue, by power iteration.

    Linear losses have Hessian ``sum X^T X``; logistic curvature is capped
    by a quarter of that.
    """
    gram = sum(o._gram for o in objs)
    d = gram.shape[0]
    v = np.full(d, 1.0 / np.sqrt(d))
    lam = 1.0
    for _ in range(iters):
        w = gram @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            raise ValueError("zero curvature; cannot pick a step size")
        v = w / lam
    if objs[0].kind == "logistic":
        lam /= 4.0
    return 1.0 / lam


def _star_setup(n: int, center: int | None, cost: np.ndarray | None):
    """Bus, cost matrix, uplink senders, and server id for a star topology.

    ``center=None`` models a dedicated parameter server: an extra node with
    id N+1 whose links cost 1 (any provided worker-to-worker costs are kept
    for completeness).  A worker acting as the server skips its own uplink.
    """
    if center is None:
        server = n + 1
        full = np.ones((server, server))
        if cost is not None:
            full[:n, :n] = np.asarray(cost, dtype=float)
        np.fill_diagonal(full, 0.0)
        senders = list(range(1, n + 1))
        return MessageBus(policy=StarPolicy(server, server)), full, senders, server
    if not 1 <= center <= n:
        raise ValueError("center must be one of the workers")
    mat = np.asarray(cost, dtype=float) if cost is not None else np.ones((n, n))
    senders = [w for w in range(1, n + 1) if w != center]
    return MessageBus(policy=StarPolicy(center, n)), mat, senders, center


def run_admm_ps(
    objs: list[LocalObjective],
    cfg: GadmmConfig,
    center: int | None = None,
    cost: np.ndarray | None = None,
    tc_policy: TcPolicy | None = None,
    sink: TraceWriter | None = None,
    reference: tuple[np.ndarray, float] | None = None,
) -> BaselineRun:
    """Parameter-server ADMM until the objective error hits the target."""
    n = len(objs)
    policy = tc_policy or TcPolicy(mode="centralized")
    bus, mat, senders, server = _star_setup(n, center, cost)
    theta_star, f_star = (
        reference if reference is not None else compute_reference_optimum(objs)
    )
    broadcast_targets = tuple(w for w in range(1, n + 1) if w != server)

    state = PsAdmmState.zeros(n, objs[0].dim)
    trace: list[TraceRow] = []
    tc = 0.0
    converged, stop_reason = False, "max_iters"
    t0 = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        prev_global = state.global_theta
        state = admm_ps_step(state, objs, cfg.rho, cfg.inner_tol)

        # Uplink round: fresh worker models to the server.
        for w in senders:
            bus.post(Message(bus.round, w, (server,), state.thetas[w - 1]))
        _, entries = bus.flush_round()
        tc += sum(transmission_cost(e, mat, policy) for e in entries)
        # Broadcast round: global model back out.
        bus.post(Message(bus.round, server, broadcast_targets, state.global_theta))
        _, entries = bus.flush_round()
        tc += sum(transmission_cost(e, mat, policy) for e in entries)

        row = TraceRow(
            iter=k,
            objective_error=objective_error(objs, state.thetas, f_star),
            primal_res=float(
                np.sqrt(
                    sum(
                        float((th - state.global_theta) @ (th - state.global_theta))
                        for th in state.thetas
                    )
                )
            ),
            dual_res=cfg.rho
            * float(np.sqrt(n))
            * float(np.linalg.norm(state.global_theta - prev_global)),
            lyapunov=None,
            contraction=0.0,
            tc_cumulative=tc,
            acv=acv(state.thetas),
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        trace.append(row)
        if sink is not None:
            sink.emit(row)
        if row.objective_error <= cfg.target_error:
            converged, stop_reason = True, "target_error"
            break

    return BaselineRun(
        trace, converged, stop_reason, len(trace), tc, theta_star, f_star,
        state.thetas,
    )


def run_gd(
    objs: list[LocalObjective],
    cfg: GadmmConfig,
    step_size: float | None = None,
    center: int | None = None,
    cost: np.ndarray | None = None,
    tc_policy: TcPolicy | None = None,
    sink: TraceWriter | None = None,
    reference: tuple[np.ndarray, float] | None = None,
) -> BaselineRun:
    """Batch gradient descent with uplinked gradients and a model broadcast."""
    n = len(objs)
    policy = tc_policy or TcPolicy(mode="centralized")
    bus, mat, senders, server = _star_setup(n, center, cost)
    theta_star, f_star = (
        reference if reference is not None else compute_reference_optimum(objs)
    )
    broadcast_targets = tuple(w for w in range(1, n + 1) if w != server)
    eta = step_size if step_size is not None else default_gd_step_size(objs)

    theta = np.zeros(objs[0].dim)
    trace: list[TraceRow] = []
    tc = 0.0
    converged, stop_reason = False, "max_iters"
    t0 = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        # Uplink round: local gradients at the current global model.
        for w in senders:
            bus.post(Message(bus.round, w, (server,), eval_grad(objs[w - 1], theta)))
        _, entries = bus.flush_round()
        tc += sum(transmission_cost(e, mat, policy) for e in entries)

        theta = gd_step(theta, objs, eta)

        # Broadcast round: updated global model.
        bus.post(Message(bus.round, server, broadcast_targets, theta))
        _, entries = bus.flush_round()
        tc += sum(transmission_cost(e, mat, policy) for e in entries)

        row = TraceRow(
            iter=k,
            objective_error=objective_error(objs, [theta] * n, f_star),
            primal_res=0.0,
            dual_res=float(np.linalg.norm(sum(eval_grad(o, theta) for o in objs))),
            lyapunov=None,
            contraction=0.0,
            tc_cumulative=tc,
            acv=0.0,
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        trace.append(row)
        if sink is not None:
            sink.emit(row)
        if row.objective_error <= cfg.target_error:
            converged, stop_reason = True, "target_error"
            break

    return BaselineRun(
        trace, converged, stop_reason, len(trace), tc, theta_star, f_star,
        [theta] * n,
    )
