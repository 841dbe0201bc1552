"""Evolutionary synthesis of reversible circuits from truth-table specifications.

Circuits are cascades of NOT/CNOT/Toffoli and Peres-family gates, encoded as
fixed-length multi-expression chromosomes whose every prefix is a candidate
circuit, and ranked by the lexicographic triple (errors, quantum cost, gates).
"""
from .circuit import (
    DEFAULT_COST_MODEL,
    Circuit,
    CostModel,
    Gate,
    GateKind,
    InvalidGateError,
    apply_gate,
    apply_gate_columns,
    circuit_cost,
    gate_cost,
    simulate,
    truth_table,
    validate_gate,
)
from .encoding import Chromosome, GateLibrary, decode_prefix, get_library, random_chromosome
from .estimator import ReversibleCircuitSynthesizer
from .evolution import EvolConfig, RunResult, run
from .fitness import Evaluation, Fitness, compare, evaluate
from .oracle import SearchBudget, exhaustive_min_qc, verify_circuit
from .spec import FunctionSpec, min_garbage, parse_spec, plan_embedding, target_columns

__version__ = "0.1.0"
