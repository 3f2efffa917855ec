"""Round-based WSN lifetime simulator: LEACH, mobile sink with rendezvous
relays, and the weighted four-term cluster-head election."""

from .energy import aggregation_energy, rx_energy, threshold_distance, tx_energy
from .engine import SimulationState, init_simulation, move_sink, run_round, run_simulation
from .metrics import (
    LifetimeSummary,
    RoundRecord,
    first_dead_round,
    quarter_dead_round,
    summarize_replicates,
    summarize_run,
    write_round_csv,
)
from .model import (
    ElectionWeights,
    EnergyParams,
    FieldGeometry,
    NodeRole,
    NodeState,
    ScenarioSpec,
    SinkState,
    Variant,
    default_scenario,
)

__version__ = "0.1.0"
