"""Local objective functions and the per-worker subproblem solvers.

Every algorithm in this package minimizes a sum of local losses
``F(theta) = sum_n f_n(theta)`` where each worker ``n`` owns one shard of
data.  Two loss families are supported:

* ``linear``   -- least squares, ``f(theta) = 1/2 ||X theta - y||^2``
* ``logistic`` -- log loss with {0, 1} labels,
  ``f(theta) = sum_i log(1 + exp(-(2 y_i - 1) x_i^T theta))``

Losses are raw sums (no 1/m or 1/2m normalization), so optimal values of
shards add up to the optimal value of the pooled problem.

The central primitive is :func:`solve_local_subproblem`: the argmin of a
local loss plus linear dual terms and quadratic proximity penalties toward
one or two neighbor models.  Linear losses admit a closed form; logistic
losses are solved by a damped Newton iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LocalObjective",
    "NeighborTerm",
    "NeighborContext",
    "SubproblemError",
    "eval_loss",
    "eval_grad",
    "eval_hessian",
    "solve_local_subproblem",
    "compute_reference_optimum",
]

LINEAR = "linear"
LOGISTIC = "logistic"


@dataclass
class LocalObjective:
    """One worker's loss over its data shard.

    Parameters
    ----------
    kind : str
        ``"linear"`` or ``"logistic"``.
    features : ndarray, shape (m, d)
        Design matrix of the shard.
    targets : ndarray, shape (m,)
        Real targets for ``linear``; {0, 1} labels for ``logistic``.
    """

    kind: str
    features: np.ndarray
    targets: np.ndarray
    _gram: np.ndarray = field(init=False, repr=False)
    _xty: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.kind not in (LINEAR, LOGISTIC):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        m, _ = self.features.shape
        if m < 1:
            raise ValueError("shard must contain at least one sample")
        if self.targets.shape != (m,):
            raise ValueError(
                f"targets length {self.targets.shape[0]} != sample count {m}"
            )
        if not np.all(np.isfinite(self.features)) or not np.all(
            np.isfinite(self.targets)
        ):
            raise ValueError("features and targets must be finite")
        if self.kind == LOGISTIC and not np.all(
            (self.targets == 0) | (self.targets == 1)
        ):
            raise ValueError("logistic targets must be exactly 0 or 1")
        # Cached for the linear closed form; cheap for the d <= 50 regime.
        self._gram = self.features.T @ self.features
        self._xty = self.features.T @ self.targets

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def _signs(self) -> np.ndarray:
        # {0, 1} labels mapped to {-1, +1}.
        return 2.0 * self.targets - 1.0


@dataclass
class NeighborTerm:
    """One neighbor's contribution to a worker's subproblem.

    ``dual_sign`` is -1 for the left-edge dual (the Lagrangian carries
    ``<dual, theta_prev - theta>``) and +1 for the right-edge dual
    (``<dual, theta - theta_next>``).
    """

    dual: np.ndarray
    dual_sign: int
    neighbor_theta: np.ndarray


@dataclass
class NeighborContext:
    """The 1 or 2 neighbor terms entering a chain worker's subproblem."""

    terms: list[NeighborTerm]

    def __post_init__(self):
        if not 1 <= len(self.terms) <= 2:
            raise ValueError("a chain worker has one or two neighbors")
        for t in self.terms:
            if t.dual_sign not in (-1, 1):
                raise ValueError("dual_sign must be -1 (left) or +1 (right)")

    @property
    def degree(self) -> int:
        return len(self.terms)


class SubproblemError(RuntimeError):
    """Inner solver failed; carries the last iterate."""

    def __init__(self, message, last_iterate):
        super().__init__(message)
        self.last_iterate = np.asarray(last_iterate)


def _check_dim(obj: LocalObjective, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != obj.dim:
        raise ValueError(
            f"model dimension {theta.shape[0]} != objective dimension {obj.dim}"
        )
    return theta


def eval_loss(obj: LocalObjective, theta: np.ndarray) -> float:
    """Evaluate ``f(theta)`` for one shard."""
    theta = _check_dim(obj, theta)
    if obj.kind == LINEAR:
        resid = obj.features @ theta - obj.targets
        return 0.5 * float(resid @ resid)
    margins = obj._signs() * (obj.features @ theta)
    # log(1 + exp(-t)) computed stably for large |t|
    return float(np.sum(np.logaddexp(0.0, -margins)))


def eval_grad(obj: LocalObjective, theta: np.ndarray) -> np.ndarray:
    """Exact gradient of :func:`eval_loss` at ``theta``."""
    theta = _check_dim(obj, theta)
    if obj.kind == LINEAR:
        return obj._gram @ theta - obj._xty
    z = obj._signs()
    sig = _sigmoid(z * (obj.features @ theta))
    return obj.features.T @ ((sig - 1.0) * z)


def eval_hessian(obj: LocalObjective, theta: np.ndarray) -> np.ndarray:
    """Exact Hessian of :func:`eval_loss` at ``theta``."""
    theta = _check_dim(obj, theta)
    if obj.kind == LINEAR:
        return obj._gram.copy()
    sig = _sigmoid(obj._signs() * (obj.features @ theta))
    w = sig * (1.0 - sig)
    return (obj.features * w[:, None]).T @ obj.features


def _sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def solve_local_subproblem(
    obj: LocalObjective,
    rho: float,
    ctx: NeighborContext,
    tol: float = 1e-10,
    max_inner: int = 100,
) -> np.ndarray:
    """Minimize the worker's augmented local objective.

    The subproblem is::

        f(theta) + sum_t dual_sign_t * <dual_t, theta>
                 + (rho/2) * sum_t ||theta - neighbor_theta_t||^2

    For ``linear`` losses the stationarity system
    ``(X^T X + rho*deg*I) theta = X^T y - sum sign*dual + rho * sum nbr``
    is solved exactly.  For ``logistic`` losses a Newton iteration with
    Armijo backtracking runs until the subproblem gradient norm is <= tol.

    Raises
    ------
    SubproblemError
        If the Newton iteration exceeds ``max_inner`` steps; the exception
        carries the last iterate.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    deg = ctx.degree
    dual_sum = sum(t.dual_sign * t.dual for t in ctx.terms)
    nbr_sum = sum(t.neighbor_theta for t in ctx.terms)

    if obj.kind == LINEAR:
        lhs = obj._gram + rho * deg * np.eye(obj.dim)
        rhs = obj._xty - dual_sum + rho * nbr_sum
        theta = np.linalg.solve(lhs, rhs)
        assert np.all(np.isfinite(theta)), "linear subproblem produced non-finite model"
        return theta

    def sub_value(th):
        quad = sum(np.sum((th - t.neighbor_theta) ** 2) for t in ctx.terms)
        return eval_loss(obj, th) + float(dual_sum @ th) + 0.5 * rho * quad

    def sub_grad(th):
        return eval_grad(obj, th) + dual_sum + rho * (deg * th - nbr_sum)

    theta = np.zeros(obj.dim)
    for _ in range(max_inner):
        g = sub_grad(theta)
        if np.linalg.norm(g) <= tol:
            return theta
        hess = eval_hessian(obj, theta) + rho * deg * np.eye(obj.dim)
        step = np.linalg.solve(hess, -g)
        # Armijo backtracking, shrink factor 0.5, c = 1e-4.  Once the
        # predicted decrease sinks below the float noise of the objective,
        # the sufficient-decrease test is meaningless; take the pure Newton
        # step (we are in its quadratic-convergence basin by then).
        alpha, f0, slope = 1.0, sub_value(theta), float(g @ step)
        if abs(slope) > 1e-14 * max(1.0, abs(f0)):
            while sub_value(theta + alpha * step) > f0 + 1e-4 * alpha * slope:
                alpha *= 0.5
                if alpha < 1e-12:
                    alpha = 1.0
                    break
        theta = theta + alpha * step
    if np.linalg.norm(sub_grad(theta)) <= tol:
        return theta
    raise SubproblemError(
        f"Newton did not reach gradient norm {tol:g} in {max_inner} iterations",
        theta,
    )


def compute_reference_optimum(
    objs: list[LocalObjective], tol: float = 1e-10, max_inner: int = 500
) -> tuple[np.ndarray, float]:
    """Pool all shards and solve the centralized problem.

    Returns ``(theta_star, f_star)`` where ``f_star = sum_n f_n(theta_star)``.
    Linear problems go through the normal equations (least-norm fallback
    when rank deficient); logistic problems through Newton with
    backtracking until the pooled gradient norm is <= tol.
    """
    if not objs:
        raise ValueError("need at least one objective")
    d = objs[0].dim
    kind = objs[0].kind
    for o in objs:
        if o.dim != d:
            raise ValueError("all shards must share the model dimension")
        if o.kind != kind:
            raise ValueError("all shards must share the objective kind")

    pooled = LocalObjective(
        kind,
        np.vstack([o.features for o in objs]),
        np.concatenate([o.targets for o in objs]),
    )

    if kind == LINEAR:
        gram = pooled._gram
        if np.linalg.matrix_rank(gram) < d:
            warnings.warn(
                "pooled linear system is rank deficient; using least-norm solution",
                RuntimeWarning,
            )
            theta, *_ = np.linalg.lstsq(pooled.features, pooled.targets, rcond=None)
        else:
            theta = np.linalg.solve(gram, pooled._xty)
        return theta, eval_loss(pooled, theta)

    theta = np.zeros(d)
    for _ in range(max_inner):
        g = eval_grad(pooled, theta)
        if np.linalg.norm(g) <= tol:
            break
        hess = eval_hessian(pooled, theta)
        try:
            step = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError:
            raise SubproblemError(
                "singular pooled Hessian (separable data?)", theta
            ) from None
        alpha, f0, slope = 1.0, eval_loss(pooled, theta), float(g @ step)
        if abs(slope) > 1e-14 * max(1.0, abs(f0)):
            while eval_loss(pooled, theta + alpha * step) > f0 + 1e-4 * alpha * slope:
                alpha *= 0.5
                if alpha < 1e-12:
                    alpha = 1.0
                    break
        theta = theta + alpha * step
    else:
        raise SubproblemError(
            f"pooled Newton did not reach gradient norm {tol:g}", theta
        )
    return theta, eval_loss(pooled, theta)
