"""Private distributed evaluation of a finite-state automaton.

n non-communicating agents jointly track the state of a public automaton
over an unbounded input stream. Each agent holds one label per automaton
state; across agents the labels are secret shares of 1 for the active
state and 0 for every other state, and they are re-randomized at every
clock tick from synchronized PRG seeds, so corrupting agents mid-run
reveals nothing about the state or the inputs (up to the scheme's
corruption threshold).
"""

from ._kernel import backend_name
from .adversary import (
    Corruption,
    CorruptionTimeline,
    IntermediateDeployment,
    View,
    capture,
    exact_view_distribution,
    hypergraph_check,
    intermediate_init,
    validate_timeline,
)
from .automaton import Automaton, parse_automaton, run_direct, serialize_automaton
from .field import GF2, MERSENNE61, FieldSpec, make_field
from .prg import SEED_LEN, Expansion, evolve, expand, random_seed
from .protocol import (
    SCHEME_NN,
    SCHEME_TN,
    SCHEME_TN_NAIVE,
    AgentState,
    Snapshot,
    TickInput,
    agent_tick,
    enumerate_groups,
    rerandomize_agent,
    snapshot,
    transition_sum,
)
from .schemes import (
    Deployment,
    dealer_init_nn,
    dealer_init_tn,
    dealer_init_tn_naive,
    reconstruct_nn,
    reconstruct_tn,
    reconstruct_tn_naive,
)
from .sharing import (
    ShareVector,
    additive_reconstruct,
    additive_share_bit,
    group_zero_poly_eval,
    lagrange_at,
    shamir_share,
    zero_poly_weight,
)

__version__ = "0.1.0"
