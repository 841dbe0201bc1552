"""Lexicographic (errors, quantum cost, gate count) evaluation of chromosomes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .circuit import DEFAULT_COST_MODEL, CostModel, GateKind, _apply_inplace, apply_gate
from .encoding import Chromosome
from .spec import Embedding, TargetColumns


class Fitness(NamedTuple):
    """Minimised lexicographically: errors first, then cost, then gate count.

    Being a tuple, ordinary ``<``/``==`` already implement that order.
    """

    errors: int
    cost: int
    gates: int

    def __str__(self) -> str:
        return f"({self.errors},{self.cost},{self.gates})"


def compare(a: Fitness, b: Fitness) -> int:
    """-1, 0 or 1 as ``a`` is better than, equal to or worse than ``b``."""
    a, b = tuple(a), tuple(b)
    return (a > b) - (a < b)


@dataclass(frozen=True)
class Evaluation:
    fitness: Fitness
    trace: tuple[Fitness, ...] | None = None

    @property
    def prefix_len(self) -> int:
        return self.fitness.gates

    @property
    def perfect(self) -> bool:
        return self.fitness.errors == 0


def _check_widths(chromosome: Chromosome, targets: TargetColumns, embedding: Embedding) -> None:
    if chromosome.width != embedding.width:
        raise ValueError(
            f"chromosome width {chromosome.width} != embedding width {embedding.width}"
        )
    if targets.n_rows != embedding.n_rows or len(targets.columns) != embedding.n_out:
        raise ValueError("target columns do not match the embedding")


def evaluate(
    chromosome: Chromosome,
    targets: TargetColumns,
    embedding: Embedding,
    model: CostModel = DEFAULT_COST_MODEL,
    trace: bool = False,
) -> Evaluation:
    """Fitness of the best prefix, stopping at the first error-free prefix.

    With ``trace=True`` every prefix is still evaluated and returned as a
    diagnostic, but the winner keeps first-perfect-prefix semantics.
    """
    _check_widths(chromosome, targets, embedding)
    cols = embedding.initial_columns()
    full = (1 << embedding.n_rows) - 1
    care = targets.care
    tcols = targets.columns
    n_out = len(tcols)
    line_err = [((cols[k] ^ tcols[k]) & care).bit_count() for k in range(n_out)]
    errors = sum(line_err)
    cost_table = model.costs
    cost = 0
    best: Fitness | None = None
    winner: Fitness | None = None
    history: list[Fitness] = []

    for k, gene in enumerate(chromosome.genes, start=1):
        kind, ops = gene.kind, gene.operands
        _apply_inplace(cols, kind, ops, full)
        try:
            cost += cost_table[(kind, len(ops) - 1)]
        except KeyError:
            cost += model.gate_cost(gene)  # raises CostModelError
        # Only the target (and q for Peres) change.
        touched = (ops[-1], ops[1]) if kind in _TWO_OUTPUT else (ops[-1],)
        for line in touched:
            i = line - 1
            if i < n_out:
                e = ((cols[i] ^ tcols[i]) & care).bit_count()
                errors += e - line_err[i]
                line_err[i] = e
        fit = Fitness(errors, cost, k)
        if trace:
            history.append(fit)
        if winner is None:
            if errors == 0:
                winner = fit
                if not trace:
                    break
            elif best is None or fit < best:
                best = fit

    if winner is None:
        winner = best if best is not None else Fitness(errors, 0, 0)
    return Evaluation(winner, tuple(history) if trace else None)


_TWO_OUTPUT = frozenset(
    {GateKind.PERES, GateKind.PERES_NEG_FIRST, GateKind.PERES_NEG_SECOND, GateKind.OR_PERES}
)


def evaluate_scalar(
    chromosome: Chromosome,
    targets: TargetColumns,
    embedding: Embedding,
    model: CostModel = DEFAULT_COST_MODEL,
) -> Evaluation:
    """Row-by-row reference implementation of :func:`evaluate` (full trace)."""
    _check_widths(chromosome, targets, embedding)
    rows = [r for r in range(embedding.n_rows) if (targets.care >> r) & 1]
    wanted = {
        r: sum(((targets.columns[k] >> r) & 1) << k for k in range(embedding.n_out)) for r in rows
    }
    out_mask = (1 << embedding.n_out) - 1
    states = {r: embedding.row_state(r) for r in rows}
    history = []
    cost = 0
    for k, gene in enumerate(chromosome.genes, start=1):
        cost += model.gate_cost(gene)
        for r in rows:
            states[r] = apply_gate(states[r], gene)
        errors = sum(((states[r] ^ wanted[r]) & out_mask).bit_count() for r in rows)
        history.append(Fitness(errors, cost, k))
    perfect = [f for f in history if f.errors == 0]
    if perfect:
        winner = perfect[0]
    elif history:
        winner = min(history)
    else:
        errors = sum(((embedding.row_state(r) ^ wanted[r]) & out_mask).bit_count() for r in rows)
        winner = Fitness(errors, 0, 0)
    return Evaluation(winner, tuple(history))
