"""Multi-expression chromosomes: fixed-length gene lists whose prefixes are circuits."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import (
    PERES_FAMILY,
    Circuit,
    Gate,
    GateKind,
    InvalidGateError,
    arity_of,
    gate_violation,
)

# A gate "variant" is a kind with a fixed control count: (NOT, 0), (TOFFOLI, 3), ...
Variant = tuple[GateKind, int]


@dataclass(frozen=True)
class GateLibrary:
    """Admissible gate kinds; Toffoli gates get 2..max_toffoli_controls controls."""

    kinds: frozenset[GateKind]
    max_toffoli_controls: int = 2
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kinds", frozenset(self.kinds))
        if not self.kinds:
            raise ValueError("gate library is empty")
        if self.max_toffoli_controls < 2:
            raise ValueError("max_toffoli_controls must be at least 2")

    def variants(self, width: int) -> list[Variant]:
        """Gate variants constructible on ``width`` lines, in a fixed order."""
        out: list[Variant] = []
        for kind in GateKind:
            if kind not in self.kinds:
                continue
            if kind is GateKind.TOFFOLI:
                for c in range(2, min(width - 1, self.max_toffoli_controls) + 1):
                    out.append((kind, c))
            elif kind is GateKind.NOT:
                out.append((kind, 0))
            elif kind is GateKind.CNOT:
                if width >= 2:
                    out.append((kind, 1))
            elif width >= 3:
                out.append((kind, 2))
        return out

    def kinds_at(self, width: int) -> list[GateKind]:
        seen: list[GateKind] = []
        for kind, _ in self.variants(width):
            if kind not in seen:
                seen.append(kind)
        return seen


LIBRARIES = {
    "nct": GateLibrary(frozenset({GateKind.NOT, GateKind.CNOT, GateKind.TOFFOLI}), name="nct"),
    "nct-p": GateLibrary(
        frozenset({GateKind.NOT, GateKind.CNOT, GateKind.TOFFOLI, GateKind.PERES}), name="nct-p"
    ),
    "nct-p-mixed": GateLibrary(
        frozenset({GateKind.NOT, GateKind.CNOT, GateKind.TOFFOLI}) | PERES_FAMILY, name="nct-p-mixed"
    ),
}


def get_library(name: str | GateLibrary, max_toffoli_controls: int | None = None) -> GateLibrary:
    if isinstance(name, GateLibrary):
        lib = name
    else:
        try:
            lib = LIBRARIES[name]
        except KeyError:
            raise ValueError(f"unknown library {name!r}; choose from {sorted(LIBRARIES)}") from None
    if max_toffoli_controls is not None and max_toffoli_controls != lib.max_toffoli_controls:
        lib = GateLibrary(lib.kinds, max_toffoli_controls, lib.name)
    return lib


def random_gene(rng: random.Random, width: int, library: GateLibrary) -> Gate:
    """Uniform kind from the library, then distinct uniform operand lines.

    Toffoli's control count is drawn uniformly from the admissible range.
    """
    kinds = library.kinds_at(width)
    if not kinds:
        raise ValueError(f"library {library.name or sorted(k.value for k in library.kinds)} "
                         f"has no gate constructible on {width} lines")
    kind = rng.choice(kinds)
    controls = 0
    if kind is GateKind.TOFFOLI:
        controls = rng.randint(2, min(width - 1, library.max_toffoli_controls))
    operands = rng.sample(range(1, width + 1), arity_of(kind, controls))
    return Gate(kind, tuple(operands))


@dataclass(frozen=True)
class Chromosome:
    genes: tuple[Gate, ...]
    width: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "genes", tuple(self.genes))

    def __len__(self) -> int:
        return len(self.genes)

    def replace(self, genes: Iterable[Gate]) -> "Chromosome":
        return Chromosome(tuple(genes), self.width)


def random_chromosome(rng: random.Random, length: int, width: int, library: GateLibrary) -> Chromosome:
    if length < 0:
        raise ValueError("chromosome length must be non-negative")
    return Chromosome(tuple(random_gene(rng, width, library) for _ in range(length)), width)


def decode_prefix(chromosome: Chromosome, k: int) -> Circuit:
    """Circuit made of the first ``k`` genes."""
    if not 0 <= k <= len(chromosome):
        raise IndexError(f"prefix {k} out of range for chromosome of length {len(chromosome)}")
    return Circuit(chromosome.width, chromosome.genes[:k])


def chromosome_violations(chromosome: Chromosome) -> list[tuple[int, str]]:
    """``(1-based gene index, problem)`` for every invalid gene."""
    out = []
    for i, g in enumerate(chromosome.genes, start=1):
        problem = gate_violation(g, chromosome.width)
        if problem is not None:
            out.append((i, problem))
    return out


def validate_chromosome(chromosome: Chromosome) -> None:
    problems = chromosome_violations(chromosome)
    if problems:
        detail = "; ".join(f"gene {i}: {p}" for i, p in problems)
        raise InvalidGateError(f"invalid chromosome: {detail}")


def render_genotype(chromosome: Chromosome) -> str:
    """Tabular layout: a header of gene numbers, a row of kind tokens, then one
    row per operand position; ``-`` marks an absent operand."""
    genes = chromosome.genes
    depth = max((len(g.operands) for g in genes), default=0)
    rows = [[str(i) for i in range(1, len(genes) + 1)], [g.token for g in genes]]
    for pos in range(depth):
        rows.append([str(g.operands[pos]) if pos < len(g.operands) else "-" for g in genes])
    return "\n".join("\t".join(r) for r in rows)


def parse_genotype(text: str, width: int) -> Chromosome:
    """Inverse of :func:`render_genotype`; the gene-number header row is optional."""
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    if rows and all(tok.isdigit() for tok in rows[0]):
        rows = rows[1:]
    if not rows:
        return Chromosome((), width)
    tokens = rows[0]
    if any(len(r) != len(tokens) for r in rows):
        raise ValueError("ragged genotype table")
    genes = []
    for j, tok in enumerate(tokens):
        ops = [int(r[j]) for r in rows[1:] if r[j] != "-"]
        genes.append(Gate.from_token(tok, ops))
    chrom = Chromosome(tuple(genes), width)
    validate_chromosome(chrom)
    return chrom


def genes_from_tokens(items: Sequence[tuple[str, Sequence[int]]]) -> list[Gate]:
    return [Gate.from_token(tok, ops) for tok, ops in items]
