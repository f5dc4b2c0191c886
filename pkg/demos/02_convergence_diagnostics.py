"""Proof-derived diagnostics along a run.

Three quantities certify a healthy run:

* the dual update identity lambda^{k+1} - lambda^k = rho * r^{k+1} holds
  to float round-off at every edge,
* the Lyapunov potential (distance to a converged dual reference plus
  weighted tail distances to theta*) never increases,
* the contraction measure (step-to-step movement in the weighted norm)
  is non-increasing and decays faster than 1/k.
"""

import numpy as np

from gadmm import (
    GadmmConfig,
    LocalObjective,
    reference_duals,
    run_gadmm,
)
from gadmm.data import gen_synthetic, partition_even

objs = partition_even(gen_synthetic("linear", 64, 3, seed=0), 8)
cfg = GadmmConfig(rho=2.0, max_iters=400, target_error=0.0, residual_stop=1e-10)

# The Lyapunov diagnostic needs a dual reference; the exact optimal
# multipliers are not analytically available, but any converged run's serve.
lam_star = reference_duals(objs, cfg)
run = run_gadmm(objs, cfg, lambda_star=lam_star)

print(f"run stopped after {run.iterations} iterations ({run.stop_reason})")
print("\niter   objective_err   primal_res   dual_res     lyapunov     contraction")
for t in run.trace[:: max(1, run.iterations // 12)]:
    print(
        f"{t.iter:4d}   {t.objective_error:12.3e}   {t.primal_residual_norm:9.2e}"
        f"   {t.dual_residual_norm:9.2e}   {t.lyapunov:9.3e}   {t.contraction:9.3e}"
    )

lyap = [t.lyapunov for t in run.trace]
print(f"\nLyapunov monotone non-increasing: {all(b <= a + 1e-9 * max(1, a) for a, b in zip(lyap, lyap[1:]))}")

contr = [t.contraction for t in run.trace]
print(f"contraction monotone after iter 1: {all(b <= a * (1 + 1e-9) + 1e-15 * contr[1] for a, b in zip(contr[1:], contr[2:]))}")

km = [t.iter * t.contraction for t in run.trace]
half = len(km) // 2
print(f"k * contraction(k), mid vs end of run: {np.mean(km[half:half + len(km) // 4]):.3e} -> {np.mean(km[-len(km) // 4:]):.3e}")
