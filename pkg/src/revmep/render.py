"""Circuit rendering and circuit file formats.

Structured documents are JSON::

    {"format": "revmep-circuit", "version": 1, "width": 3,
     "gates": [{"kind": "T1", "operands": [3]}, ...],
     "metadata": {"name": "3_17", ...}}

The revlib-like text form is a small documented subset::

    .version 1.0
    .numvars 3
    .variables x1 x2 x3
    .begin
    t1 x3
    t2 x3 x2
    p3 x1 x2 x3
    .end

``t<n>`` is a Toffoli family gate on ``n`` lines (controls first, target
last), ``p3`` a Peres gate ``(p, q, t)``. A ``-`` before a Peres operand marks
the negated AND control (``p3 -x1 x2 x3`` and ``p3 x1 -x2 x3``) and ``op3`` is
the OR-Peres gate. Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .circuit import Circuit, Gate, GateKind

FORMATS = ("ascii", "structured", "revlib-like")

_REVLIB_PERES = {
    GateKind.PERES: ("p3", ""),
    GateKind.PERES_NEG_FIRST: ("p3", "p"),
    GateKind.PERES_NEG_SECOND: ("p3", "q"),
    GateKind.OR_PERES: ("op3", ""),
}


class CircuitFormatError(ValueError):
    """Unreadable circuit document."""


@dataclass(frozen=True)
class CircuitDocument:
    circuit: Circuit
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": "revmep-circuit",
            "version": 1,
            "width": self.circuit.width,
            "gates": [{"kind": g.token, "operands": list(g.operands)} for g in self.circuit.gates],
            "metadata": dict(self.metadata),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CircuitDocument":
        try:
            width = int(doc["width"])
            gates = tuple(Gate.from_token(g["kind"], g["operands"]) for g in doc["gates"])
        except (KeyError, TypeError) as exc:
            raise CircuitFormatError(f"bad circuit document: {exc}") from exc
        return cls(Circuit(width, gates), dict(doc.get("metadata", {})))


# -- ascii -------------------------------------------------------------------

def _column(gate: Gate, width: int) -> list[str]:
    """Three-character cell per line for one gate."""
    marks: dict[int, str] = {}
    ops = gate.operands
    kind = gate.kind
    if kind.is_peres:
        p, q, t = ops
        marks[p] = "○" if kind is GateKind.PERES_NEG_FIRST else "●"
        marks[q] = "⊖" if kind is GateKind.PERES_NEG_SECOND else "⊕"
        marks[t] = "◎" if kind is GateKind.OR_PERES else "◉"
    else:
        for c in ops[:-1]:
            marks[c] = "●"
        marks[ops[-1]] = "⊕"
    lo, hi = min(ops), max(ops)
    cells = []
    for line in range(1, width + 1):
        if line in marks:
            cells.append(f"─{marks[line]}─")
        elif lo < line < hi:
            cells.append("─┼─")
        else:
            cells.append("───")
    return cells


def render_ascii(circuit: Circuit) -> str:
    """One text row per line (line 1 on top), one column per gate.

    ``●`` control, ``⊕`` XOR target, ``◉`` Peres AND target, ``○`` negated
    first Peres control, ``⊖`` XOR line whose value enters the AND term
    negated, ``◎`` OR-Peres target, ``┼`` a wire crossed by a gate.
    """
    cols = [_column(g, circuit.width) for g in circuit.gates]
    label_w = len(f"x{circuit.width}")
    rows = []
    for line in range(1, circuit.width + 1):
        body = "".join(c[line - 1] for c in cols)
        rows.append(f"{f'x{line}':>{label_w}} ─{body}─")
    return "\n".join(rows)


# -- revlib-like -------------------------------------------------------------

def render_revlib(circuit: Circuit) -> str:
    names = [f"x{i}" for i in range(1, circuit.width + 1)]
    lines = [".version 1.0", f".numvars {circuit.width}", ".variables " + " ".join(names), ".begin"]
    for g in circuit.gates:
        if g.kind.is_peres:
            tok, neg = _REVLIB_PERES[g.kind]
            p, q, t = g.operands
            args = [("-" if neg == "p" else "") + f"x{p}", ("-" if neg == "q" else "") + f"x{q}", f"x{t}"]
            lines.append(f"{tok} " + " ".join(args))
        else:
            lines.append(f"t{len(g.operands)} " + " ".join(f"x{x}" for x in g.operands))
    lines.append(".end")
    return "\n".join(lines) + "\n"


def parse_revlib(text: str) -> Circuit:
    width = None
    names: list[str] = []
    gates = []
    in_body = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].lower()
        if head == ".numvars":
            width = int(parts[1])
        elif head == ".variables":
            names = parts[1:]
        elif head == ".begin":
            in_body = True
        elif head == ".end":
            in_body = False
        elif head.startswith("."):
            continue
        elif in_body:
            if width is None:
                raise CircuitFormatError("gate before .numvars")
            if not names:
                names = [f"x{i}" for i in range(1, width + 1)]
            index = {n: i + 1 for i, n in enumerate(names)}
            negs, ops = [], []
            for arg in parts[1:]:
                neg = arg.startswith("-")
                name = arg[1:] if neg else arg
                if name not in index:
                    raise CircuitFormatError(f"line {lineno}: unknown variable {name!r}")
                negs.append(neg)
                ops.append(index[name])
            if head == "op3":
                kind = GateKind.OR_PERES
            elif head == "p3":
                if len(ops) != 3 or negs[2]:
                    raise CircuitFormatError(f"line {lineno}: bad Peres gate")
                kind = {
                    (False, False): GateKind.PERES,
                    (True, False): GateKind.PERES_NEG_FIRST,
                    (False, True): GateKind.PERES_NEG_SECOND,
                }.get((negs[0], negs[1]))
                if kind is None:
                    raise CircuitFormatError(f"line {lineno}: unsupported Peres polarity")
            elif head.startswith("t") and head[1:].isdigit():
                if any(negs):
                    raise CircuitFormatError(f"line {lineno}: negative controls only allowed on p3")
                gates.append(Gate.from_token(head, ops))
                continue
            else:
                raise CircuitFormatError(f"line {lineno}: unknown gate {head!r}")
            gates.append(Gate(kind, tuple(ops)))
    if width is None:
        raise CircuitFormatError("missing .numvars")
    return Circuit(width, tuple(gates))


# -- dispatch ----------------------------------------------------------------

def render_circuit(circuit: Circuit, fmt: str = "ascii", metadata: Mapping[str, Any] | None = None) -> str:
    if fmt == "ascii":
        return render_ascii(circuit)
    if fmt == "structured":
        return CircuitDocument(circuit, metadata or {}).to_json()
    if fmt == "revlib-like":
        return render_revlib(circuit)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def parse_circuit(text: str) -> CircuitDocument:
    """Read a structured (JSON) or revlib-like circuit."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return CircuitDocument.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CircuitFormatError(f"bad JSON: {exc}") from exc
    return CircuitDocument(parse_revlib(text))


def load_circuit(path: str) -> CircuitDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())
