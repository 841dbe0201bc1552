"""Behavioral target specifications and their embedding into a reversible width.

A :class:`FunctionSpec` lists one decimal output value per input row, in
ascending row order. Specs transcribed from published tables are sometimes
shorter than ``2**n_in``; the missing tail rows are treated as don't-cares and
a :class:`TruncatedSpecWarning` is emitted.

Spec documents are small YAML mappings::

    name: 3_17
    inputs: 3
    outputs: 3
    spec: [7, 1, 4, 3, 0, 2, 6, 5]

``spec`` may also be written as a parenthesised string, ``"(7,1,4,...)"``,
exactly as the decimal specifications are printed in benchmark tables.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import yaml


class SpecError(ValueError):
    """Malformed or inconsistent function specification."""


class TruncatedSpecWarning(UserWarning):
    """Fewer output values than input rows; the tail is don't-care."""


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    n_in: int
    n_out: int
    outputs: tuple[int, ...]
    source: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "outputs", tuple(int(v) for v in self.outputs))
        if self.n_in < 1 or self.n_out < 1:
            raise SpecError(f"{self.name}: input and output counts must be positive")
        if len(self.outputs) > 1 << self.n_in:
            raise SpecError(
                f"{self.name}: {len(self.outputs)} rows given but only {1 << self.n_in} inputs exist"
            )
        for r, v in enumerate(self.outputs):
            if not 0 <= v < 1 << self.n_out:
                raise SpecError(f"{self.name}: row {r} value {v} does not fit {self.n_out} outputs")

    @property
    def rows_specified(self) -> int:
        return len(self.outputs)

    @property
    def n_rows(self) -> int:
        return 1 << self.n_in

    @property
    def is_complete(self) -> bool:
        return self.rows_specified == self.n_rows

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "inputs": self.n_in,
            "outputs": self.n_out,
            "spec": list(self.outputs),
        }
        if self.source:
            d["source"] = self.source
        return d


def _parse_values(raw: Any) -> list[int]:
    if isinstance(raw, str):
        body = raw.strip().strip("()[]")
        if not body:
            return []
        try:
            return [int(tok) for tok in body.replace(";", ",").split(",") if tok.strip()]
        except ValueError as exc:
            raise SpecError(f"bad decimal list {raw!r}") from exc
    if isinstance(raw, (list, tuple)):
        try:
            return [int(v) for v in raw]
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad decimal list {raw!r}") from exc
    raise SpecError(f"spec values must be a list or a '(a,b,...)' string, got {type(raw).__name__}")


def spec_from_mapping(doc: Mapping[str, Any], warn: bool = True) -> FunctionSpec:
    try:
        name = str(doc.get("name", "unnamed"))
        n_in = int(doc["inputs"])
        n_out = int(doc["outputs"])
        values = _parse_values(doc["spec"])
    except KeyError as exc:
        raise SpecError(f"spec document missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad spec document: {exc}") from exc
    spec = FunctionSpec(name, n_in, n_out, tuple(values), source=str(doc.get("source", "")))
    if warn and not spec.is_complete:
        warnings.warn(
            f"{name}: only {spec.rows_specified} of {spec.n_rows} rows specified; "
            "remaining rows are treated as don't-care",
            TruncatedSpecWarning,
            stacklevel=3,
        )
    return spec


def parse_spec(text: str, warn: bool = True) -> FunctionSpec:
    """Parse a YAML spec document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecError(f"malformed spec document: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise SpecError("spec document must be a mapping")
    return spec_from_mapping(doc, warn=warn)


def format_spec(spec: FunctionSpec) -> str:
    return yaml.safe_dump(spec.to_dict(), sort_keys=False, default_flow_style=None)


def load_spec(path: str, warn: bool = True) -> FunctionSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), warn=warn)


def max_multiplicity(values: Sequence[int]) -> int:
    """Largest number of rows sharing one output pattern (0 for no rows)."""
    return max(Counter(values).values(), default=0)


def min_garbage(spec: FunctionSpec) -> int:
    """Minimum number of garbage outputs needed to make ``spec`` reversible.

    ``ceil(log2(M))`` where ``M`` is the largest multiplicity of an output
    pattern among the specified rows.
    """
    m = max_multiplicity(spec.outputs)
    return math.ceil(math.log2(m)) if m > 1 else 0


@dataclass(frozen=True)
class Embedding:
    """Placement of a spec onto ``width`` circuit lines.

    Inputs occupy lines ``1..n_in`` and the remaining lines are constants;
    outputs are read from lines ``1..n_out`` and the rest is garbage.
    """

    width: int
    n_in: int
    n_out: int
    constant_values: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.width < max(self.n_in, self.n_out):
            raise SpecError(
                f"width {self.width} is smaller than max(inputs={self.n_in}, outputs={self.n_out})"
            )
        consts = tuple(self.constant_values) or (0,) * (self.width - self.n_in)
        if len(consts) != self.width - self.n_in or any(c not in (0, 1) for c in consts):
            raise SpecError(f"need {self.width - self.n_in} binary constants, got {consts}")
        object.__setattr__(self, "constant_values", consts)

    @property
    def input_lines(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_in + 1))

    @property
    def constant_lines(self) -> tuple[int, ...]:
        return tuple(range(self.n_in + 1, self.width + 1))

    @property
    def output_lines(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_out + 1))

    @property
    def garbage_lines(self) -> tuple[int, ...]:
        return tuple(range(self.n_out + 1, self.width + 1))

    @property
    def n_rows(self) -> int:
        return 1 << self.n_in

    def initial_columns(self) -> list[int]:
        """Per-line columns over the ``2**n_in`` input rows."""
        from .circuit import identity_columns

        cols = identity_columns(self.n_in)
        full = (1 << self.n_rows) - 1
        cols.extend(full if c else 0 for c in self.constant_values)
        return cols

    def row_state(self, row: int) -> int:
        """Full ``width``-bit state fed to the circuit for input row ``row``."""
        state = row
        for line, c in zip(self.constant_lines, self.constant_values):
            state |= c << (line - 1)
        return state


def plan_embedding(spec: FunctionSpec, width: int | None = None) -> Embedding:
    """Choose a circuit width for ``spec``.

    Without an override the width is ``max(n_in, n_out + min_garbage)``.
    """
    if width is None:
        width = max(spec.n_in, spec.n_out + min_garbage(spec))
    return Embedding(width, spec.n_in, spec.n_out)


@dataclass(frozen=True)
class TargetColumns:
    """Target bit column for each output line plus a mask of cared-for rows."""

    columns: tuple[int, ...]
    care: int
    n_rows: int

    @property
    def n_care(self) -> int:
        return self.care.bit_count()


def target_columns(spec: FunctionSpec, embedding: Embedding | None = None) -> TargetColumns:
    if embedding is not None and (embedding.n_in, embedding.n_out) != (spec.n_in, spec.n_out):
        raise SpecError("embedding does not match spec input/output counts")
    cols = [0] * spec.n_out
    for r, v in enumerate(spec.outputs):
        for k in range(spec.n_out):
            if (v >> k) & 1:
                cols[k] |= 1 << r
    care = (1 << spec.rows_specified) - 1
    return TargetColumns(tuple(cols), care, spec.n_rows)


def count_errors(state_columns: Sequence[int], targets: TargetColumns) -> int:
    """Number of mismatched (care row, output line) bits."""
    care = targets.care
    return sum(((s ^ t) & care).bit_count() for s, t in zip(state_columns, targets.columns))


def spec_to_xy(spec: FunctionSpec) -> tuple[list[list[int]], list[list[int]]]:
    """Specified rows as input-bit rows and output-bit rows (line 1 first)."""
    X = [[(r >> k) & 1 for k in range(spec.n_in)] for r in range(spec.rows_specified)]
    y = [[(v >> k) & 1 for k in range(spec.n_out)] for v in spec.outputs]
    return X, y
