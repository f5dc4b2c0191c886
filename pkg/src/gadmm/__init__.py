"""Decentralized consensus optimization over worker chains.

Grouped alternating ADMM (GADMM) trains a shared model across workers
connected in a chain, with only half of them transmitting per round; a
dynamic variant (D-GADMM) periodically rebuilds the chain.  Parameter-
server ADMM and batch gradient descent baselines, a round-based network
simulator, and communication-cost accounting round out the benchmark
harness.
"""

from .baselines import (
    BaselineRun,
    PsAdmmState,
    admm_ps_step,
    default_gd_step_size,
    gd_step,
    run_admm_ps,
    run_gd,
)
from .data import Dataset, gen_synthetic, load_csv, partition_even
from .dynamic import (
    Chain,
    RefreshPolicy,
    build_chain,
    dual_handover,
    generate_head_set,
    run_dgadmm,
)
from .engine import (
    GadmmConfig,
    GadmmRun,
    IterationTrace,
    WorkerState,
    assign_groups,
    contraction_measure,
    dual_residuals,
    gadmm_step,
    init_states,
    lyapunov,
    primal_residuals,
    reference_duals,
    run_gadmm,
)
from .metrics import TcPolicy, TraceRow, TraceWriter, acv, objective_error, total_comm_cost
from .netsim import ChainPolicy, Message, MessageBus, StarPolicy, TransmissionRecord
from .objectives import (
    LocalObjective,
    NeighborContext,
    NeighborTerm,
    SubproblemError,
    compute_reference_optimum,
    eval_grad,
    eval_hessian,
    eval_loss,
    solve_local_subproblem,
)
from .topology import (
    EnergyModel,
    Placement,
    center_worker,
    cost_matrix,
    link_energy_cost,
    random_placement,
)

__version__ = "0.1.0"
