"""Mean field games on sparse graphon networks.

Discretizes the agent continuum into equivalence classes, learns equilibria
with Online Mirror Descent, and validates the mean-field approximation by
simulating finite N-agent systems on graphs sampled from the graphon.
"""

from .graphon import (
    ConstantGraphon,
    CutoffPowerLawGraphon,
    DiscretizedGraphon,
    Graphon,
    PowerLawGraphon,
    SmoothedStepGraphon,
    StepGraphon,
    cut_norm_estimate,
    discretize,
    make_graphon,
    smooth_step,
    step_from_graph,
)
from .graphs import GraphSample, degree_histogram, edge_density, sample_graph, write_edge_list
from .mfg import (
    Environment,
    best_response,
    exploitability,
    forward,
    monotonicity_gap,
    neighborhood_mf,
    policy_value,
    q_evaluate,
    uniform_policy,
)
from .envs import (
    BeachParams,
    CyberParams,
    HeteroCyberParams,
    cyber_transition,
    make_beach_env,
    make_cyber_env,
    make_hetero_cyber_env,
    q_infection,
)
from .omd import OmdState, OmdTrace, mirror_map, omd_step, run_omd
from .nagent import SimulationRun, lift_policy, mu_error, simulate_episode, sweep_convergence
from .config import ExperimentConfig, config_hash, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
