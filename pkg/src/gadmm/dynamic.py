"""Chain refresh for time-varying (or deliberately shuffled) topologies.

Every ``tau`` iterations the workers agree on a fresh logical chain: a
shared pseudorandom draw splits them into new head and tail sets (worker 1
always a head, worker N always a tail), and a greedy pass over the current
link costs threads an alternating chain from worker 1 to worker N.  No
messages are needed to agree on the head set -- each worker derives it
from the shared seed and the epoch counter.

Rebuilding is not free: each refresh charges a configurable number of
extra communication rounds (default 4, i.e. two iterations' worth) in
which every worker transmits once to its new neighbors.  Dual variables
can either follow the worker that owns them, with the new right neighbor
adopting the handed-over value as its left dual, or stay attached to chain
positions (the zero-overhead mode, which still converges in practice).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .engine import (
    GadmmConfig,
    GadmmRun,
    WorkerState,
    _finish_iteration,
    _stop_reason,
    assign_groups,
    gadmm_step,
    init_states,
)
from .metrics import TcPolicy, TraceWriter, transmission_cost
from .netsim import ChainPolicy, Message, MessageBus, TransmissionRecord
from .objectives import LocalObjective, compute_reference_optimum

__all__ = [
    "Chain",
    "RefreshPolicy",
    "generate_head_set",
    "build_chain",
    "dual_handover",
    "run_dgadmm",
]


@dataclass(frozen=True)
class Chain:
    """Visit order over all workers, alternating head/tail from position 1."""

    order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.order)
        if n < 2:
            raise ValueError("a chain needs at least two workers")
        if sorted(self.order) != list(range(1, n + 1)):
            raise ValueError("chain order must be a permutation of 1..N")
        if self.order[0] != 1 or self.order[-1] != n:
            raise ValueError("chain endpoints are fixed: starts at 1, ends at N")

    @property
    def n_workers(self) -> int:
        return len(self.order)

    @property
    def roles(self) -> list[str]:
        return assign_groups(len(self.order))


@dataclass(frozen=True)
class RefreshPolicy:
    """How often to rebuild the chain and what a rebuild costs."""

    tau: int
    handover_duals: bool = False
    rebuild_cost_rounds: int = 4

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.rebuild_cost_rounds < 0:
            raise ValueError("rebuild_cost_rounds must be >= 0")


def generate_head_set(shared_seed: int, epoch: int, n_workers: int) -> frozenset[int]:
    """Deterministic head set of size N/2: worker 1 plus a seeded draw.

    Simulates the shared pseudorandom code all workers run locally: the
    same ``(shared_seed, epoch)`` yields the same set everywhere with no
    communication.  Worker 1 is always a head and worker N never is.
    """
    if n_workers % 2 != 0:
        raise ValueError("the head/tail split needs an even worker count")
    if n_workers < 2:
        raise ValueError("need at least two workers")
    rng = np.random.default_rng([shared_seed, epoch])
    draw = rng.choice(
        np.arange(2, n_workers), size=n_workers // 2 - 1, replace=False
    )
    return frozenset({1, *map(int, draw)})


def build_chain(cost: np.ndarray, heads: set[int], tails: set[int]) -> Chain:
    """Greedy alternating chain over the link costs.

    Starting at worker 1, repeatedly append the cheapest unvisited
    opposite-role worker (ties -> smallest id).  Worker N is reserved for
    the final position so the chain always ends there.  Rejects the build
    when every remaining candidate sits behind an infinite-cost link.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    heads, tails = set(heads), set(tails)
    if heads & tails:
        raise ValueError("head and tail sets must be disjoint")
    if heads | tails != set(range(1, n + 1)):
        raise ValueError("head and tail sets must cover all workers")
    if len(heads) != len(tails):
        raise ValueError("head and tail sets must have equal size")
    if 1 not in heads:
        raise ValueError("worker 1 must be a head")
    if n not in tails:
        raise ValueError(f"worker {n} must be a tail")

    order = [1]
    heads.discard(1)
    current = 1
    want_tail = True
    while heads or tails:
        pool = tails if want_tail else heads
        # Worker N is reserved for the final position.
        if want_tail and len(pool) > 1:
            candidates = sorted(pool - {n})
        else:
            candidates = sorted(pool)
        best, best_cost = None, math.inf
        for w in candidates:
            c = float(cost[current - 1, w - 1])
            if c < best_cost:
                best, best_cost = w, c
        if best is None or not math.isfinite(best_cost):
            raise ValueError(
                f"no finite-cost link from worker {current} to any remaining "
                f"{'tail' if want_tail else 'head'}"
            )
        order.append(best)
        pool.discard(best)
        current = best
        want_tail = not want_tail
    return Chain(tuple(order))


def dual_handover(
    states: list[WorkerState],
    old_chain: Chain,
    new_chain: Chain,
    handover_duals: bool = True,
) -> list[WorkerState]:
    """Re-seat workers on a new chain, carrying models and duals over.

    Models always follow their worker.  With ``handover_duals`` each
    worker keeps the dual of its old right edge and its new right neighbor
    adopts it as a left dual (so both edge endpoints agree); without it,
    dual values stay attached to chain positions.
    """
    if [s.id for s in states] != list(old_chain.order):
        raise ValueError("states are not in old-chain order")
    by_id = {s.id: s for s in states}
    groups = assign_groups(new_chain.n_workers)
    n = new_chain.n_workers
    out = []
    for pos, wid in enumerate(new_chain.order):
        if pos == n - 1:
            lam = None
        elif handover_duals:
            lam = by_id[wid].lambda_right
        else:
            lam = states[pos].lambda_right
        out.append(replace(by_id[wid], group=groups[pos], lambda_right=lam))
    return out


def _charge_rebuild(
    bus: MessageBus,
    states: list[WorkerState],
    rounds: int,
) -> list[TransmissionRecord]:
    """Model broadcast rounds that pay for chain construction and handover.

    Every worker transmits once per round to its new chain neighbors, for
    ``rounds`` rounds (the decentralized chain heuristic needs pilot, cost
    vector, and model exchanges; all are charged at model link cost).
    """
    n = len(states)
    order = [s.id for s in states]
    entries: list[TransmissionRecord] = []
    for _ in range(rounds):
        for pos, s in enumerate(states):
            nbrs = []
            if pos > 0:
                nbrs.append(order[pos - 1])
            if pos < n - 1:
                nbrs.append(order[pos + 1])
            bus.post(Message(bus.round, s.id, tuple(nbrs), s.theta))
        _, new_entries = bus.flush_round()
        entries.extend(new_entries)
    return entries


def run_dgadmm(
    objs: list[LocalObjective],
    cfg: GadmmConfig,
    policy: RefreshPolicy,
    cost_provider=None,
    chain: Chain | None = None,
    tc_policy: TcPolicy | None = None,
    sink: TraceWriter | None = None,
    lambda_star: list[np.ndarray] | None = None,
    reference: tuple[np.ndarray, float] | None = None,
) -> GadmmRun:
    """GADMM over a chain that is regenerated every ``tau`` iterations.

    ``cost_provider(epoch)`` returns the link-cost matrix in force during
    refresh epoch ``epoch`` (epoch 0 covers the initial chain); a static
    matrix may be passed directly.  Refreshes happen before iterations
    ``tau + 1, 2 tau + 1, ...``: the head set is re-drawn from
    ``(cfg.seed, epoch)``, the chain is rebuilt greedily on the current
    costs, the rebuild rounds are charged, and duals are handed over when
    the policy says so.  With ``tau > max_iters`` the run is identical to
    the static engine on the initial chain.
    """
    n = len(objs)
    if n < 2:
        raise ValueError("need at least two workers")
    if n % 2 == 1:
        raise ValueError("chain refresh requires an even worker count")
    if cost_provider is None:
        static = np.ones((n, n))
        np.fill_diagonal(static, 0.0)
        cost_provider = lambda epoch: static
    elif isinstance(cost_provider, np.ndarray):
        static = cost_provider
        cost_provider = lambda epoch: static
    tc_pol = tc_policy or TcPolicy()
    objs_by_id = {i + 1: o for i, o in enumerate(objs)}

    theta_star, f_star = (
        reference if reference is not None else compute_reference_optimum(objs)
    )
    chain = chain or Chain(tuple(range(1, n + 1)))
    cost = np.asarray(cost_provider(0), dtype=float)
    states = init_states(list(chain.order), objs[0].dim)
    bus = MessageBus(policy=ChainPolicy(list(chain.order)))
    trace = []
    tc = 0.0
    converged = False
    stop_reason = "max_iters"
    t0 = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        if k > 1 and (k - 1) % policy.tau == 0:
            epoch = (k - 1) // policy.tau
            cost = np.asarray(cost_provider(epoch), dtype=float)
            heads = generate_head_set(cfg.seed, epoch, n)
            tails = set(range(1, n + 1)) - heads
            new_chain = build_chain(cost, set(heads), tails)
            states = dual_handover(states, chain, new_chain, policy.handover_duals)
            chain = new_chain
            bus.policy = ChainPolicy(list(chain.order))
            rebuild_entries = _charge_rebuild(bus, states, policy.rebuild_cost_rounds)
            tc += sum(transmission_cost(e, cost, tc_pol) for e in rebuild_entries)

        prev = states
        states, diag = gadmm_step(states, objs_by_id, cfg, bus)
        rec, tc = _finish_iteration(
            k, prev, states, diag, objs_by_id, theta_star, f_star,
            lambda_star, cfg, tc, t0, cost, tc_pol,
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
        chain_order=list(chain.order),
    )
