"""Exact minimum-quantum-cost search for small widths, and solution re-checking.

The search is uniform-cost (Dijkstra) over the reachable truth-table states of
the embedded function, which visits costs in the same non-decreasing order as
iterative deepening but expands each state once. Heap keys are
``(cost, gate-index sequence)``, so among all minimum-cost circuits the
witness is the lexicographically smallest gate sequence.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations, permutations

from .circuit import (
    DEFAULT_COST_MODEL,
    Circuit,
    CostModel,
    Gate,
    GateKind,
    _apply_inplace,
    circuit_cost,
    columns_to_values,
    is_bijective,
)
from .encoding import GateLibrary
from .fitness import Fitness
from .spec import Embedding, FunctionSpec, TargetColumns, target_columns


@dataclass(frozen=True)
class SearchBudget:
    qc_limit: int = 20
    node_limit: int = 2_000_000
    width_limit: int = 4

    def __post_init__(self) -> None:
        if self.qc_limit < 0 or self.node_limit < 1 or self.width_limit < 1:
            raise ValueError("search budget values must be positive")


@dataclass(frozen=True)
class OracleResult:
    found: bool
    min_qc: int | None
    witness: Circuit | None
    bound: int
    nodes: int
    exhausted_nodes: bool = False

    @property
    def gate_count(self) -> int | None:
        return None if self.witness is None else len(self.witness)


def enumerate_gates(library: GateLibrary, width: int) -> list[Gate]:
    """Every distinct gate of ``library`` on ``width`` lines in a fixed order.

    Toffoli controls are unordered, so only sorted control tuples are listed.
    """
    lines = range(1, width + 1)
    out: list[Gate] = []
    for kind, controls in library.variants(width):
        if kind is GateKind.NOT:
            out.extend(Gate(kind, (t,)) for t in lines)
        elif kind is GateKind.CNOT or kind is GateKind.TOFFOLI:
            for t in lines:
                rest = [x for x in lines if x != t]
                out.extend(Gate(kind, cs + (t,)) for cs in combinations(rest, controls))
        else:
            out.extend(Gate(kind, ops) for ops in permutations(lines, 3))
    return out


def exhaustive_min_qc(
    spec: FunctionSpec | TargetColumns,
    embedding: Embedding,
    library: GateLibrary,
    budget: SearchBudget = SearchBudget(),
    model: CostModel = DEFAULT_COST_MODEL,
) -> OracleResult:
    """Smallest quantum cost of any ``library`` circuit realising ``spec``.

    Returns ``found=False`` when no circuit of cost ``<= qc_limit`` exists or
    the node budget runs out first; ``bound`` is then the largest cost that
    was fully explored (every circuit cheaper than or equal to it is ruled out).
    """
    if embedding.width > budget.width_limit:
        raise ValueError(f"width {embedding.width} exceeds oracle limit {budget.width_limit}")
    targets = spec if isinstance(spec, TargetColumns) else target_columns(spec, embedding)
    gates = enumerate_gates(library, embedding.width)
    costs = [model.gate_cost(g) for g in gates]
    if any(c <= 0 for c in costs):
        raise ValueError("oracle needs strictly positive gate costs")
    full = (1 << embedding.n_rows) - 1
    care = targets.care
    tcols = targets.columns
    n_out = len(tcols)

    def is_goal(cols: tuple[int, ...]) -> bool:
        return all(not ((cols[k] ^ tcols[k]) & care) for k in range(n_out))

    start = tuple(embedding.initial_columns())
    heap: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = [(0, (), start)]
    settled: set[tuple[int, ...]] = set()
    best_seen = {start: 0}
    nodes = 0
    explored = -1
    while heap:
        cost, seq, cols = heapq.heappop(heap)
        if cols in settled:
            continue
        if cost > budget.qc_limit:
            break
        # every state cheaper than `cost` has been settled
        explored = max(explored, cost - 1)
        if is_goal(cols):
            witness = Circuit(embedding.width, tuple(gates[i] for i in seq))
            return OracleResult(True, cost, witness, cost, nodes)
        settled.add(cols)
        nodes += 1
        if nodes >= budget.node_limit:
            return OracleResult(False, None, None, explored, nodes, exhausted_nodes=True)
        for i, g in enumerate(gates):
            nc = cost + costs[i]
            if nc > budget.qc_limit:
                continue
            nxt = list(cols)
            _apply_inplace(nxt, g.kind, g.operands, full)
            key = tuple(nxt)
            if key in settled or best_seen.get(key, nc + 1) < nc:
                continue
            best_seen[key] = nc
            heapq.heappush(heap, (nc, seq + (i,), key))
    return OracleResult(False, None, None, budget.qc_limit, nodes)


@dataclass(frozen=True)
class VerifyReport:
    errors: int
    quantum_cost: int
    gate_count: int
    valid: bool
    bijective: bool | None
    diffs: tuple[tuple[int, int, int], ...] = field(default=())

    @property
    def fitness(self) -> Fitness:
        return Fitness(self.errors, self.quantum_cost, self.gate_count)

    @property
    def ok(self) -> bool:
        return self.valid and self.errors == 0


def verify_circuit(
    circuit: Circuit,
    spec: FunctionSpec,
    embedding: Embedding,
    model: CostModel = DEFAULT_COST_MODEL,
) -> VerifyReport:
    """Independent re-check of a claimed solution, row by row.

    ``diffs`` lists ``(row, expected, got)`` for every care row whose output
    lines disagree with the spec.
    """
    from .circuit import simulate

    if circuit.width != embedding.width:
        raise ValueError(f"circuit width {circuit.width} != embedding width {embedding.width}")
    out_mask = (1 << spec.n_out) - 1
    errors = 0
    diffs = []
    for r, want in enumerate(spec.outputs):
        got = simulate(circuit, embedding.row_state(r)) & out_mask
        if got != want:
            errors += (got ^ want).bit_count()
            diffs.append((r, want, got))
    bij = is_bijective(circuit) if circuit.width <= 16 else None
    return VerifyReport(
        errors=errors,
        quantum_cost=circuit_cost(circuit, model),
        gate_count=len(circuit),
        valid=True,
        bijective=bij,
        diffs=tuple(diffs),
    )


def output_values(circuit: Circuit, embedding: Embedding) -> list[int]:
    """Output-line values of the circuit for every input row."""
    cols = embedding.initial_columns()
    full = (1 << embedding.n_rows) - 1
    for g in circuit.gates:
        _apply_inplace(cols, g.kind, g.operands, full)
    return columns_to_values(cols[: embedding.n_out], embedding.n_rows)
