"""Dynamic chains: refresh the logical topology every tau iterations.

All workers re-draw the head set from a shared seed (no communication
needed), rebuild the chain greedily on the current link costs, optionally
hand the edge duals to the new right neighbors, and keep iterating.  With
tau beyond the horizon the run reduces to the static engine bit for bit.
On near-consistent data, re-randomizing the chain every iteration
accelerates convergence well past the static chain.
"""

import numpy as np

from gadmm import GadmmConfig, run_gadmm
from gadmm.data import Dataset, partition_even
from gadmm.dynamic import RefreshPolicy, run_dgadmm

rng = np.random.default_rng(1)
x = rng.standard_normal((80, 5))
y = x @ rng.standard_normal(5)  # noiseless: every chain shares lambda* = 0
objs = partition_even(Dataset(x, y, "linear"), 8)
cfg = GadmmConfig(rho=1.0, max_iters=3000, seed=3)

static = run_gadmm(objs, cfg)
print(f"static chain:               {static.iterations:4d} iterations, TC={static.total_tc:.0f}")

frozen = run_dgadmm(objs, cfg, RefreshPolicy(tau=10_000))
same = all(np.array_equal(a.theta, b.theta) for a, b in zip(static.states, frozen.states))
print(f"tau > horizon (no refresh): {frozen.iterations:4d} iterations, bitwise-identical={same}")

for tau in (15, 1):
    for handover in (False, True):
        run = run_dgadmm(objs, cfg, RefreshPolicy(tau=tau, handover_duals=handover))
        label = "handover" if handover else "positional duals"
        print(
            f"tau={tau:2d}, {label:16s}: {run.iterations:4d} iterations, "
            f"TC={run.total_tc:.0f} (includes 4 rebuild rounds per refresh)"
        )

print("\nfinal chain order after the last refresh:", run.chain_order)
print("note: each refresh re-targets the duals, so on noisy shards the")
print("error floor of very frequent refreshes scales with the local")
print("gradients at the optimum; consistent data keeps it near zero.")
