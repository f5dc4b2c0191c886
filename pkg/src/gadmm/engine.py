"""Grouped alternating ADMM over a fixed worker chain.

Workers sit on a logical chain and alternate between two roles: *heads*
(odd chain positions) and *tails* (even positions).  Each iteration runs
five phases:

1. every head minimizes its local augmented objective using its
   neighbors' previous-iteration models,
2. heads transmit their new models to their chain neighbors,
3. every tail minimizes using the heads' fresh models,
4. tails transmit,
5. every chain edge updates its dual:
   ``lambda_n += rho * (theta_n - theta_{n+1})``.

Only half of the workers transmit per communication round, and each
transmission reaches at most two neighbors.  The module also provides the
convergence diagnostics used by the test suites: primal and dual residual
norms, the Lyapunov potential that decreases monotonically along runs on
convex losses, and the per-iteration contraction measure whose decay is
faster than 1/k.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .metrics import TcPolicy, TraceRow, TraceWriter, acv, objective_error, transmission_cost
from .netsim import ChainPolicy, Message, MessageBus, TransmissionRecord
from .objectives import (
    LocalObjective,
    NeighborContext,
    NeighborTerm,
    compute_reference_optimum,
    solve_local_subproblem,
)

__all__ = [
    "HEAD",
    "TAIL",
    "WorkerState",
    "GadmmConfig",
    "IterationTrace",
    "GadmmRun",
    "EngineError",
    "assign_groups",
    "init_states",
    "gadmm_step",
    "primal_residuals",
    "dual_residuals",
    "lyapunov",
    "contraction_measure",
    "run_gadmm",
    "reference_duals",
]

HEAD = "head"
TAIL = "tail"


class EngineError(RuntimeError):
    pass


@dataclass
class WorkerState:
    """One worker's view: chain role, model, and the dual on its right edge.

    ``lambda_right`` belongs to the edge between this worker and the next
    one along the chain; it is absent only for the last chain position.
    """

    id: int
    group: str
    theta: np.ndarray
    lambda_right: np.ndarray | None


@dataclass
class GadmmConfig:
    rho: float
    max_iters: int = 5000
    target_error: float = 1e-4
    inner_tol: float = 1e-10
    seed: int = 0
    # Both residual norms below this also stop the run (guards against an
    # imprecise reference optimum making target_error unreachable).
    residual_stop: float = 1e-10
    allow_odd: bool = False

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.target_error < 0:
            raise ValueError("target_error must be >= 0")
        if self.inner_tol <= 0:
            raise ValueError("inner_tol must be positive")


@dataclass
class IterationTrace:
    """Per-iteration record of diagnostics and observed transmissions."""

    iter: int
    objective_error: float
    primal_residual_norm: float
    dual_residual_norm: float
    lyapunov: float | None
    contraction: float
    transmissions: list[TransmissionRecord]
    cumulative_tc: float
    acv: float
    wall_ms: float

    def to_row(self) -> TraceRow:
        return TraceRow(
            iter=self.iter,
            objective_error=self.objective_error,
            primal_res=self.primal_residual_norm,
            dual_res=self.dual_residual_norm,
            lyapunov=self.lyapunov,
            contraction=self.contraction,
            tc_cumulative=self.cumulative_tc,
            acv=self.acv,
            wall_ms=self.wall_ms,
        )


@dataclass
class GadmmRun:
    """Everything a finished run exposes."""

    trace: list[IterationTrace]
    states: list[WorkerState]
    converged: bool
    stop_reason: str
    iterations: int
    total_tc: float
    theta_star: np.ndarray
    f_star: float
    chain_order: list[int]

    @property
    def final_thetas(self) -> list[np.ndarray]:
        return [s.theta for s in self.states]


def assign_groups(n_workers: int) -> list[str]:
    """Alternating roles along the chain: odd positions head, even tail."""
    if n_workers < 2:
        raise ValueError("need at least two workers")
    return [HEAD if p % 2 == 1 else TAIL for p in range(1, n_workers + 1)]


def init_states(order: list[int], dim: int) -> list[WorkerState]:
    """All-zero models and duals along the given chain order."""
    groups = assign_groups(len(order))
    states = []
    for pos, (wid, grp) in enumerate(zip(order, groups)):
        lam = np.zeros(dim) if pos < len(order) - 1 else None
        states.append(WorkerState(wid, grp, np.zeros(dim), lam))
    return states


def _validate_chain(states: list[WorkerState]):
    n = len(states)
    if n < 2:
        raise EngineError("chain needs at least two workers")
    groups = assign_groups(n)
    dims = {s.theta.shape for s in states}
    if len(dims) != 1:
        raise EngineError("workers disagree on the model dimension")
    for pos, s in enumerate(states):
        if s.group != groups[pos]:
            raise EngineError(
                f"worker {s.id} at position {pos + 1} has role {s.group}, "
                f"expected {groups[pos]}"
            )
        has_lam = s.lambda_right is not None
        if pos < n - 1 and not has_lam:
            raise EngineError(f"worker {s.id} is missing its right-edge dual")
        if pos == n - 1 and has_lam:
            raise EngineError(f"last worker {s.id} must not hold a right-edge dual")


def _neighbor_ctx(pos: int, thetas: list[np.ndarray], lambdas: list[np.ndarray]):
    """Subproblem context for the worker at chain position ``pos`` (0-based)."""
    terms = []
    if pos > 0:
        terms.append(NeighborTerm(lambdas[pos - 1], -1, thetas[pos - 1]))
    if pos < len(thetas) - 1:
        terms.append(NeighborTerm(lambdas[pos], +1, thetas[pos + 1]))
    return NeighborContext(terms)


@dataclass
class StepDiagnostics:
    primal: list[np.ndarray]
    dual: list[tuple[int, np.ndarray]]
    transmissions: list[TransmissionRecord]


def gadmm_step(
    states: list[WorkerState],
    objs: dict[int, LocalObjective] | list[LocalObjective],
    cfg: GadmmConfig,
    bus: MessageBus | None = None,
) -> tuple[list[WorkerState], StepDiagnostics]:
    """One full iteration: head solves, head round, tail solves, tail round, duals.

    ``objs`` maps worker id to its objective (a list is treated as ids
    ``1..N``).  When ``bus`` is given, transmissions flow through it (and
    its locality policy); otherwise a throwaway chain-local bus is used.
    Tail solves consume the models actually delivered by the bus.
    """
    _validate_chain(states)
    if isinstance(objs, list):
        objs = {i + 1: o for i, o in enumerate(objs)}
    n = len(states)
    order = [s.id for s in states]
    if bus is None:
        bus = MessageBus(policy=ChainPolicy(order))

    thetas_k = [s.theta for s in states]
    lambdas_k = [s.lambda_right for s in states[:-1]]
    new_thetas: list[np.ndarray | None] = [None] * n
    transmissions: list[TransmissionRecord] = []

    def neighbors_of(pos):
        nbrs = []
        if pos > 0:
            nbrs.append(order[pos - 1])
        if pos < n - 1:
            nbrs.append(order[pos + 1])
        return tuple(nbrs)

    def solve_at(pos, thetas):
        ctx = _neighbor_ctx(pos, thetas, lambdas_k)
        try:
            theta = solve_local_subproblem(objs[order[pos]], cfg.rho, ctx, cfg.inner_tol)
        except ValueError as e:
            raise EngineError(f"worker {order[pos]}: {e}") from e
        if not np.all(np.isfinite(theta)):
            raise EngineError(f"worker {order[pos]} produced a non-finite model")
        return theta

    # Phase 1: heads solve from iteration-k values, in parallel semantics
    # (each reads only the snapshot, so evaluation order is irrelevant).
    for pos in range(0, n, 2):
        new_thetas[pos] = solve_at(pos, thetas_k)

    # Phase 2: head communication round.
    for pos in range(0, n, 2):
        bus.post(Message(bus.round, order[pos], neighbors_of(pos), new_thetas[pos]))
    delivered, entries = bus.flush_round()
    transmissions.extend(entries)
    head_models = {m.sender: m.payload for m in delivered}

    # Phase 3: tails solve from the delivered head models.
    thetas_mid = [
        head_models[order[pos]] if pos % 2 == 0 else thetas_k[pos] for pos in range(n)
    ]
    for pos in range(1, n, 2):
        new_thetas[pos] = solve_at(pos, thetas_mid)

    # Phase 4: tail communication round.
    for pos in range(1, n, 2):
        bus.post(Message(bus.round, order[pos], neighbors_of(pos), new_thetas[pos]))
    delivered, entries = bus.flush_round()
    transmissions.extend(entries)
    tail_models = {m.sender: m.payload for m in delivered}
    for pos in range(1, n, 2):
        new_thetas[pos] = tail_models[order[pos]]

    # Phase 5: every edge updates its dual from the two fresh endpoint models.
    new_states = []
    for pos, s in enumerate(states):
        lam = None
        if pos < n - 1:
            lam = lambdas_k[pos] + cfg.rho * (new_thetas[pos] - new_thetas[pos + 1])
        new_states.append(replace(s, theta=new_thetas[pos], lambda_right=lam))

    diag = StepDiagnostics(
        primal=primal_residuals(new_states),
        dual=dual_residuals(states, new_states, cfg.rho),
        transmissions=transmissions,
    )
    return new_states, diag


def primal_residuals(states: list[WorkerState]) -> list[np.ndarray]:
    """Edge disagreements ``theta_n - theta_{n+1}``, chain-ordered."""
    _validate_chain(states)
    return [a.theta - b.theta for a, b in zip(states[:-1], states[1:])]


def dual_residuals(
    states_prev: list[WorkerState], states_cur: list[WorkerState], rho: float
) -> list[tuple[int, np.ndarray]]:
    """Per-head stationarity slack from the neighbors' movement.

    ``s_n = rho * (theta_left^{k+1} - theta_left^k)
          + rho * (theta_right^{k+1} - theta_right^k)``
    with the left term dropped for the first chain position.
    """
    if [s.id for s in states_prev] != [s.id for s in states_cur]:
        raise EngineError("snapshots belong to different chains")
    n = len(states_cur)
    out = []
    for pos in range(0, n, 2):
        s = np.zeros_like(states_cur[pos].theta)
        if pos > 0:
            s = s + rho * (states_cur[pos - 1].theta - states_prev[pos - 1].theta)
        if pos < n - 1:
            s = s + rho * (states_cur[pos + 1].theta - states_prev[pos + 1].theta)
        out.append((states_cur[pos].id, s))
    return out


def lyapunov(
    states: list[WorkerState],
    theta_star: np.ndarray,
    lambda_star: list[np.ndarray] | None,
    rho: float,
) -> float:
    """Potential ``(1/rho) sum ||lambda - lambda*||^2 + rho sum ||theta_tail - theta*||^2``.

    The tail sum counts each head's left neighbor (first head excluded) and
    each head's right neighbor, so interior tails enter twice.  Requires a
    converged dual reference; refuses to compute without one.
    """
    _validate_chain(states)
    n = len(states)
    if lambda_star is None:
        raise ValueError("lyapunov needs a dual reference (lambda_star)")
    if len(lambda_star) != n - 1:
        raise ValueError(f"lambda_star must have {n - 1} entries")
    v = 0.0
    for s, lam_star in zip(states[:-1], lambda_star):
        diff = s.lambda_right - lam_star
        v += float(diff @ diff) / rho
    for pos in range(0, n, 2):
        if pos > 0:
            diff = states[pos - 1].theta - theta_star
            v += rho * float(diff @ diff)
        if pos < n - 1:
            diff = states[pos + 1].theta - theta_star
            v += rho * float(diff @ diff)
    return v


def contraction_measure(
    states_prev: list[WorkerState], states_cur: list[WorkerState], rho: float
) -> float:
    """Step-to-step movement in the weighted norm that contracts along runs.

    ``(1/rho) sum_edges ||lambda^{k+1} - lambda^k||^2
      + rho sum_tails deg(n) ||theta_n^{k+1} - theta_n^k||^2``
    where ``deg`` is the tail's chain degree.
    """
    if [s.id for s in states_prev] != [s.id for s in states_cur]:
        raise EngineError("snapshots belong to different chains")
    n = len(states_cur)
    m = 0.0
    for prev, cur in zip(states_prev[:-1], states_cur[:-1]):
        diff = cur.lambda_right - prev.lambda_right
        m += float(diff @ diff) / rho
    for pos in range(1, n, 2):
        deg = 2 if 0 < pos < n - 1 else 1
        diff = states_cur[pos].theta - states_prev[pos].theta
        m += rho * deg * float(diff @ diff)
    return m


def _finish_iteration(
    k: int,
    prev: list[WorkerState],
    states: list[WorkerState],
    diag: StepDiagnostics,
    objs_by_id: dict[int, LocalObjective],
    theta_star: np.ndarray,
    f_star: float,
    lambda_star: list[np.ndarray] | None,
    cfg: GadmmConfig,
    tc: float,
    t0: float,
    cost: np.ndarray,
    policy: TcPolicy,
) -> tuple[IterationTrace, float]:
    """Shared per-iteration bookkeeping for the static and dynamic runners."""
    tc += sum(transmission_cost(e, cost, policy) for e in diag.transmissions)
    thetas = [s.theta for s in states]
    rec = IterationTrace(
        iter=k,
        objective_error=objective_error(
            [objs_by_id[s.id] for s in states], thetas, f_star
        ),
        primal_residual_norm=float(
            np.sqrt(sum(float(r @ r) for r in diag.primal))
        ),
        dual_residual_norm=float(
            np.sqrt(sum(float(v @ v) for _, v in diag.dual))
        ),
        lyapunov=(
            lyapunov(states, theta_star, lambda_star, cfg.rho)
            if lambda_star is not None
            else None
        ),
        contraction=contraction_measure(prev, states, cfg.rho),
        transmissions=diag.transmissions,
        cumulative_tc=tc,
        acv=acv(thetas),
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )
    return rec, tc


def _stop_reason(rec: IterationTrace, cfg: GadmmConfig) -> str | None:
    if rec.objective_error <= cfg.target_error:
        return "target_error"
    if (
        rec.primal_residual_norm <= cfg.residual_stop
        and rec.dual_residual_norm <= cfg.residual_stop
    ):
        return "residuals"
    return None


def run_gadmm(
    objs: list[LocalObjective],
    cfg: GadmmConfig,
    chain_order: list[int] | None = None,
    cost: np.ndarray | None = None,
    tc_policy: TcPolicy | None = None,
    sink: TraceWriter | None = None,
    lambda_star: list[np.ndarray] | None = None,
    reference: tuple[np.ndarray, float] | None = None,
) -> GadmmRun:
    """Iterate until the objective error reaches the target or iterations run out.

    ``objs[i]`` belongs to worker ``i + 1``; ``chain_order`` defaults to the
    identity chain ``[1..N]``.  ``cost`` (default all-ones) and ``tc_policy``
    drive the cumulative communication cost.  Passing ``lambda_star`` adds
    the Lyapunov value to every trace record; ``reference`` short-circuits
    the pooled solve when the caller already has ``(theta_star, f_star)``.
    """
    n = len(objs)
    if n < 2:
        raise ValueError("need at least two workers")
    if n % 2 == 1 and not cfg.allow_odd:
        raise ValueError(
            "odd worker counts need allow_odd=True (roles still alternate, "
            "but the analysis assumes an even split)"
        )
    order = list(chain_order) if chain_order is not None else list(range(1, n + 1))
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError("chain_order must be a permutation of 1..N")
    if cost is None:
        cost = np.ones((n, n))
        np.fill_diagonal(cost, 0.0)
    policy = tc_policy or TcPolicy()
    objs_by_id = {i + 1: o for i, o in enumerate(objs)}

    theta_star, f_star = (
        reference if reference is not None else compute_reference_optimum(objs)
    )
    states = init_states(order, objs[0].dim)
    bus = MessageBus(policy=ChainPolicy(order))
    trace: list[IterationTrace] = []
    tc = 0.0
    converged = False
    stop_reason = "max_iters"
    t0 = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        prev = states
        states, diag = gadmm_step(states, objs_by_id, cfg, bus)
        rec, tc = _finish_iteration(
            k, prev, states, diag, objs_by_id, theta_star, f_star,
            lambda_star, cfg, tc, t0, cost, policy,
        )
        trace.append(rec)
        if sink is not None:
            sink.emit(rec.to_row())

        reason = _stop_reason(rec, cfg)
        if reason is not None:
            converged, stop_reason = True, reason
            break

    return GadmmRun(
        trace=trace,
        states=states,
        converged=converged,
        stop_reason=stop_reason,
        iterations=len(trace),
        total_tc=tc,
        theta_star=theta_star,
        f_star=f_star,
        chain_order=order,
    )


def reference_duals(
    objs: list[LocalObjective],
    cfg: GadmmConfig,
    chain_order: list[int] | None = None,
    residual_tol: float = 1e-12,
    max_iters_factor: int = 10,
) -> list[np.ndarray]:
    """Dual variables of a long converged run, usable as ``lambda_star``.

    Runs the same chain for up to ``max_iters_factor * cfg.max_iters``
    iterations, stopping once both residual norms fall below
    ``residual_tol``; any converged dual point serves as the saddle
    reference for the Lyapunov diagnostic.
    """
    long_cfg = replace(
        cfg,
        max_iters=cfg.max_iters * max_iters_factor,
        target_error=0.0,
        residual_stop=residual_tol,
    )
    run = run_gadmm(objs, long_cfg, chain_order=chain_order)
    return [s.lambda_right for s in run.states[:-1]]
