"""Reversible gates, circuit simulation and the quantum-cost model.

Lines are numbered from 1. Line ``k`` carries binary weight ``2**(k-1)`` both
in the input row index and in the decimal output value, so line 1 is the least
significant bit.

Two evaluation paths are provided: :func:`apply_gate` works on one state (an
integer whose bit ``k-1`` is line ``k``), and :func:`apply_gate_columns` works
bit-parallel on per-line columns, where bit ``r`` of a column holds that
line's value in truth-table row ``r``. The scalar path is the reference the
column path is tested against.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

MAX_TRUTH_TABLE_WIDTH = 24


class InvalidGateError(ValueError):
    """Raised when a gate breaks the arity, range or fan-out-free rule."""


class CostModelError(KeyError):
    """Raised when a gate kind has no entry in the cost model."""


class GateKind(enum.Enum):
    NOT = "not"
    CNOT = "cnot"
    TOFFOLI = "toffoli"
    PERES = "peres"
    PERES_NEG_FIRST = "peres_neg_first"
    PERES_NEG_SECOND = "peres_neg_second"
    OR_PERES = "or_peres"

    @property
    def is_peres(self) -> bool:
        return self in PERES_FAMILY


PERES_FAMILY = frozenset(
    {GateKind.PERES, GateKind.PERES_NEG_FIRST, GateKind.PERES_NEG_SECOND, GateKind.OR_PERES}
)

_PERES_TOKENS = {
    GateKind.PERES: "P3",
    GateKind.PERES_NEG_FIRST: "P3N1",
    GateKind.PERES_NEG_SECOND: "P3N2",
    GateKind.OR_PERES: "P3OR",
}
_TOKEN_PERES = {v: k for k, v in _PERES_TOKENS.items()}


def arity_of(kind: GateKind, controls: int = 0) -> int:
    """Operand count of ``kind``; ``controls`` only matters for Toffoli."""
    if kind is GateKind.NOT:
        return 1
    if kind is GateKind.CNOT:
        return 2
    if kind is GateKind.TOFFOLI:
        return controls + 1
    return 3


@dataclass(frozen=True)
class Gate:
    """A gate kind with its ordered operand lines (controls first, target last).

    For the Peres family the operands are ``(p, q, t)``: ``q`` receives
    ``p XOR q`` and ``t`` is the AND/OR target.
    """

    kind: GateKind
    operands: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "operands", tuple(int(x) for x in self.operands))

    @property
    def controls(self) -> tuple[int, ...]:
        return self.operands[:-1]

    @property
    def target(self) -> int:
        return self.operands[-1]

    @property
    def n_controls(self) -> int:
        return len(self.operands) - 1

    @property
    def token(self) -> str:
        """Short kind token: ``T1``/``T2``/``T<k+1>`` for NCT, ``P3``... for Peres."""
        if self.kind.is_peres:
            return _PERES_TOKENS[self.kind]
        return f"T{len(self.operands)}"

    @classmethod
    def from_token(cls, token: str, operands: Sequence[int]) -> "Gate":
        token = token.strip().upper()
        if token in _TOKEN_PERES:
            return cls(_TOKEN_PERES[token], tuple(operands))
        if token.startswith("T") and token[1:].isdigit():
            n = int(token[1:])
            if n == 1:
                kind = GateKind.NOT
            elif n == 2:
                kind = GateKind.CNOT
            else:
                kind = GateKind.TOFFOLI
            if len(operands) != n:
                raise InvalidGateError(f"{token} expects {n} operands, got {len(operands)}")
            return cls(kind, tuple(operands))
        raise InvalidGateError(f"unknown gate token {token!r}")

    def __str__(self) -> str:
        return f"{self.token}({','.join(map(str, self.operands))})"


# Convenience constructors, mostly for tests and examples.
def Not(t: int) -> Gate:  # noqa: N802
    return Gate(GateKind.NOT, (t,))


def Cnot(c: int, t: int) -> Gate:  # noqa: N802
    return Gate(GateKind.CNOT, (c, t))


def Toffoli(*operands: int) -> Gate:  # noqa: N802
    return Gate(GateKind.TOFFOLI, operands)


def Peres(p: int, q: int, t: int, kind: GateKind = GateKind.PERES) -> Gate:  # noqa: N802
    return Gate(kind, (p, q, t))


def gate_violation(gate: Gate, width: int) -> str | None:
    """Return a description of the first rule ``gate`` breaks at ``width``, or None."""
    ops = gate.operands
    if gate.kind is GateKind.TOFFOLI:
        if len(ops) < 3:
            return f"Toffoli needs at least 2 controls, got {len(ops) - 1}"
    elif len(ops) != arity_of(gate.kind):
        return f"{gate.kind.value} needs {arity_of(gate.kind)} operands, got {len(ops)}"
    for x in ops:
        if not 1 <= x <= width:
            return f"line {x} out of range [1, {width}]"
    if len(set(ops)) != len(ops):
        return f"duplicate line in operands {ops}"
    return None


def validate_gate(gate: Gate, width: int) -> None:
    """Raise :class:`InvalidGateError` unless ``gate`` is valid at ``width``."""
    problem = gate_violation(gate, width)
    if problem is not None:
        raise InvalidGateError(f"{gate}: {problem}")


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 1:
            raise InvalidGateError(f"circuit width must be positive, got {self.width}")
        for g in self.gates:
            validate_gate(g, self.width)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("cannot concatenate circuits of different widths")
        return Circuit(self.width, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        """Reverse cascade with each gate inverted (Peres <-> mirror Peres)."""
        inv = {GateKind.PERES: GateKind.PERES_NEG_SECOND, GateKind.PERES_NEG_SECOND: GateKind.PERES}
        gates = []
        for g in reversed(self.gates):
            if g.kind in (GateKind.PERES_NEG_FIRST, GateKind.OR_PERES):
                raise NotImplementedError(f"no single-gate inverse for {g.kind.value}")
            gates.append(Gate(inv.get(g.kind, g.kind), g.operands))
        return Circuit(self.width, tuple(gates))


def _bit(state: int, line: int) -> int:
    return (state >> (line - 1)) & 1


def apply_gate(state: int, gate: Gate, width: int | None = None) -> int:
    """Apply ``gate`` to a single state and return the new state."""
    if width is not None:
        validate_gate(gate, width)
    kind = gate.kind
    ops = gate.operands
    if kind is GateKind.NOT:
        return state ^ (1 << (ops[0] - 1))
    if kind is GateKind.CNOT or kind is GateKind.TOFFOLI:
        if all(_bit(state, c) for c in ops[:-1]):
            return state ^ (1 << (ops[-1] - 1))
        return state
    p, q, t = ops
    bp, bq = _bit(state, p), _bit(state, q)
    if kind is GateKind.PERES:
        flip = bp & bq
    elif kind is GateKind.PERES_NEG_FIRST:
        flip = (1 - bp) & bq
    elif kind is GateKind.PERES_NEG_SECOND:
        flip = bp & (1 - bq)
    else:
        flip = bp | bq
    return state ^ (bp << (q - 1)) ^ (flip << (t - 1))


def apply_gate_columns(columns: Sequence[int], gate: Gate, n_rows: int) -> list[int]:
    """Bit-parallel :func:`apply_gate` over all rows at once.

    ``columns[k-1]`` is line ``k``'s column, holding ``n_rows`` bits.
    """
    full = (1 << n_rows) - 1
    for col in columns:
        if col < 0 or col >> n_rows:
            raise ValueError(f"column does not fit in {n_rows} rows")
    validate_gate(gate, len(columns))
    out = list(columns)
    _apply_inplace(out, gate.kind, gate.operands, full)
    return out


def _apply_inplace(cols: list[int], kind: GateKind, ops: tuple[int, ...], full: int) -> None:
    # Hot path of fitness evaluation; no validation here.
    if kind is GateKind.NOT:
        cols[ops[0] - 1] ^= full
    elif kind is GateKind.CNOT:
        cols[ops[1] - 1] ^= cols[ops[0] - 1]
    elif kind is GateKind.TOFFOLI:
        m = cols[ops[0] - 1]
        for c in ops[1:-1]:
            m &= cols[c - 1]
        cols[ops[-1] - 1] ^= m
    else:
        p, q, t = ops
        cp, cq = cols[p - 1], cols[q - 1]
        if kind is GateKind.PERES:
            f = cp & cq
        elif kind is GateKind.PERES_NEG_FIRST:
            f = (cp ^ full) & cq
        elif kind is GateKind.PERES_NEG_SECOND:
            f = cp & (cq ^ full)
        else:
            f = cp | cq
        cols[q - 1] = cq ^ cp
        cols[t - 1] ^= f


def simulate(circuit: Circuit, state: int) -> int:
    """Run ``state`` through the cascade left to right."""
    if not 0 <= state < (1 << circuit.width):
        raise ValueError(f"state {state} does not fit {circuit.width} lines")
    for g in circuit.gates:
        state = apply_gate(state, g)
    return state


def identity_columns(width: int) -> list[int]:
    """Columns of the full 2**width truth table: line k column = bit k-1 of r."""
    n = 1 << width
    cols = []
    for k in range(width):
        block = (1 << (1 << k)) - 1
        pattern = 0
        # bit r set iff bit k of r is set: runs of 2**k zeros then 2**k ones
        for start in range(1 << k, n, 1 << (k + 1)):
            pattern |= block << start
        cols.append(pattern)
    return cols


def columns_to_values(columns: Sequence[int], n_rows: int) -> list[int]:
    """Reassemble per-row integers from per-line columns."""
    values = [0] * n_rows
    for k, col in enumerate(columns):
        r = 0
        while col:
            if col & 1:
                values[r] |= 1 << k
            col >>= 1
            r += 1
    return values


def truth_table(circuit: Circuit, max_width: int = MAX_TRUTH_TABLE_WIDTH) -> list[int]:
    """Output index for every input index ``0 .. 2**width - 1``."""
    if circuit.width > max_width:
        raise ValueError(f"width {circuit.width} exceeds truth-table guard {max_width}")
    n_rows = 1 << circuit.width
    cols = identity_columns(circuit.width)
    full = (1 << n_rows) - 1
    for g in circuit.gates:
        _apply_inplace(cols, g.kind, g.operands, full)
    return columns_to_values(cols, n_rows)


def is_bijective(circuit: Circuit) -> bool:
    table = truth_table(circuit)
    return sorted(table) == list(range(len(table)))


CostKey = tuple[GateKind, int]


def _default_costs() -> dict[CostKey, int]:
    costs = {
        (GateKind.NOT, 0): 1,
        (GateKind.CNOT, 1): 1,
        (GateKind.TOFFOLI, 2): 5,
        (GateKind.TOFFOLI, 3): 13,
        (GateKind.TOFFOLI, 4): 29,
        (GateKind.TOFFOLI, 5): 61,
        (GateKind.TOFFOLI, 6): 125,
    }
    for kind in PERES_FAMILY:
        costs[(kind, 2)] = 4
    return costs


@dataclass(frozen=True)
class CostModel:
    """Quantum cost per ``(kind, control count)``.

    The defaults cover NOT, CNOT, Toffoli with 2..6 controls and the four
    Peres variants.
    """

    costs: Mapping[CostKey, int] = field(default_factory=_default_costs)
    name: str = "default"

    def __post_init__(self) -> None:
        for key, value in self.costs.items():
            if value < 0:
                raise ValueError(f"negative cost for {key}: {value}")

    def gate_cost(self, gate: Gate) -> int:
        try:
            return self.costs[(gate.kind, gate.n_controls)]
        except KeyError:
            raise CostModelError(f"no cost for {gate.kind.value} with {gate.n_controls} controls") from None

    def with_overrides(self, overrides: Mapping[str, int], name: str | None = None) -> "CostModel":
        """Copy with costs replaced by gate token, e.g. ``{"T4": 13, "P3": 4}``."""
        costs = dict(self.costs)
        for token, value in overrides.items():
            tok = token.strip().upper()
            if tok.startswith("T") and tok[1:].isdigit():
                n = int(tok[1:])
                kind = GateKind.NOT if n == 1 else GateKind.CNOT if n == 2 else GateKind.TOFFOLI
                costs[(kind, n - 1)] = int(value)
            elif tok in _TOKEN_PERES:
                costs[(_TOKEN_PERES[tok], 2)] = int(value)
            else:
                raise ValueError(f"unknown gate token {token!r}")
        return CostModel(costs, name or f"{self.name}+overrides")


DEFAULT_COST_MODEL = CostModel()


def gate_cost(gate: Gate, model: CostModel = DEFAULT_COST_MODEL) -> int:
    return model.gate_cost(gate)


def circuit_cost(circuit: Circuit | Iterable[Gate], model: CostModel = DEFAULT_COST_MODEL) -> int:
    gates = circuit.gates if isinstance(circuit, Circuit) else circuit
    return sum(model.gate_cost(g) for g in gates)
