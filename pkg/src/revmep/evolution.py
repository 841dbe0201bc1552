"""Generational evolution loop and the genetic operators.

All random draws happen in the sequential breeding phase, from a single
``random.Random`` owned by the run, so a seed fully determines the result.
"""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field, fields, replace
from typing import Any, Callable, Mapping, Sequence

from .circuit import DEFAULT_COST_MODEL, Circuit, CostModel, Gate, arity_of
from .encoding import (
    Chromosome,
    GateLibrary,
    decode_prefix,
    get_library,
    random_chromosome,
)
from .fitness import Evaluation, Fitness, evaluate
from .spec import Embedding, FunctionSpec, TargetColumns, target_columns

log = logging.getLogger(__name__)

MUTATION_TYPES = ("operator", "address", "rotate", "swap")


@dataclass(frozen=True)
class EvolConfig:
    population_size: int = 100
    max_generations: int = 500
    chromosome_length: int = 10
    crossover_prob: float = 0.7
    mutation_prob: float = 0.01
    tournament_size: int = 2
    library: GateLibrary = field(default_factory=lambda: get_library("nct-p"))
    cost_model: CostModel = DEFAULT_COST_MODEL
    mutation_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    elitism: int = 1
    early_stop: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.library, str):
            object.__setattr__(self, "library", get_library(self.library))
        object.__setattr__(self, "mutation_weights", tuple(float(w) for w in self.mutation_weights))
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.chromosome_length < 1:
            raise ValueError("chromosome_length must be at least 1")
        if self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be at least 1")
        if not 0 <= self.elitism <= self.population_size:
            raise ValueError("elitism must be in [0, population_size]")
        if len(self.mutation_weights) != 4 or any(w < 0 for w in self.mutation_weights):
            raise ValueError("mutation_weights needs four non-negative values")
        if sum(self.mutation_weights) <= 0:
            raise ValueError("mutation_weights must not all be zero")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], cost_model: CostModel | None = None) -> "EvolConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "library" in kwargs:
            kwargs["library"] = get_library(kwargs["library"])
        if "mutation_weights" in kwargs:
            kwargs["mutation_weights"] = tuple(kwargs["mutation_weights"])
        if "cost_model" in kwargs:
            if not isinstance(kwargs["cost_model"], CostModel):
                kwargs["cost_model"] = DEFAULT_COST_MODEL.with_overrides(kwargs["cost_model"], "config")
        elif cost_model is not None:
            kwargs["cost_model"] = cost_model
        return cls(**kwargs)


@dataclass
class Individual:
    chromosome: Chromosome
    evaluation: Evaluation

    @property
    def fitness(self) -> Fitness:
        return self.evaluation.fitness


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: Fitness
    best_ever: Fitness
    mean_errors: float
    evaluations: int


@dataclass(frozen=True)
class RunResult:
    best_chromosome: Chromosome
    best_evaluation: Evaluation
    circuit: Circuit
    generation_found: int
    generations_run: int
    evaluations: int
    seed: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def fitness(self) -> Fitness:
        return self.best_evaluation.fitness

    @property
    def perfect(self) -> bool:
        return self.best_evaluation.perfect


# -- selection ---------------------------------------------------------------

def tournament_select(fitnesses: Sequence[Fitness], rng: random.Random, size: int = 2) -> int:
    """Index of the best of ``size`` uniform draws (with replacement); ties are random."""
    if not fitnesses:
        raise ValueError("cannot select from an empty population")
    if size < 1:
        raise ValueError("tournament size must be at least 1")
    n = len(fitnesses)
    picks = [rng.randrange(n) for _ in range(size)]
    best = min(fitnesses[i] for i in picks)
    winners = [i for i in picks if fitnesses[i] == best]
    return winners[0] if len(winners) == 1 else rng.choice(winners)


# -- crossover ---------------------------------------------------------------

def crossover_at(a: Chromosome, b: Chromosome, cuts: Sequence[int]) -> tuple[Chromosome, Chromosome]:
    """Exchange alternating segments. Cut ``i`` is the boundary after gene ``i``."""
    if len(a) != len(b):
        raise ValueError("parents must have equal length")
    n = len(a)
    bounds = sorted(set(cuts))
    if any(not 1 <= c < n for c in bounds):
        raise ValueError(f"cut points must lie in [1, {n - 1}]")
    ga, gb = list(a.genes), list(b.genes)
    ca, cb = [], []
    start, swap = 0, False
    for end in bounds + [n]:
        src_a, src_b = (gb, ga) if swap else (ga, gb)
        ca.extend(src_a[start:end])
        cb.extend(src_b[start:end])
        start, swap = end, not swap
    return a.replace(ca), b.replace(cb)


def crossover(a: Chromosome, b: Chromosome, rng: random.Random) -> tuple[Chromosome, Chromosome]:
    """Multi-cut crossover with a random number of random cut points."""
    n = len(a)
    if n < 2:
        raise ValueError("crossover needs chromosomes of length at least 2")
    count = rng.randint(1, n - 1)
    cuts = rng.sample(range(1, n), count)
    return crossover_at(a, b, cuts)


# -- mutation ----------------------------------------------------------------

def mutate_operator(gene: Gate, rng: random.Random, library: GateLibrary, width: int) -> Gate:
    """Switch to a different gate variant, keeping the target and existing controls.

    Missing controls are drawn from unused lines and appended after the
    existing ones; surplus controls are dropped from the end.
    """
    current = (gene.kind, gene.n_controls)
    options = [v for v in library.variants(width) if v != current]
    if not options:
        return gene
    kind, controls = rng.choice(options)
    need = arity_of(kind, controls) - 1
    ctrl = list(gene.controls[:need])
    if len(ctrl) < need:
        free = [x for x in range(1, width + 1) if x not in gene.operands]
        ctrl.extend(rng.sample(free, need - len(ctrl)))
    return Gate(kind, tuple(ctrl) + (gene.target,))


def mutate_address(gene: Gate, rng: random.Random, width: int) -> Gate:
    """Replace one operand with a line the gate does not already use."""
    free = [x for x in range(1, width + 1) if x not in gene.operands]
    if not free:
        return gene
    pos = rng.randrange(len(gene.operands))
    ops = list(gene.operands)
    ops[pos] = rng.choice(free)
    return Gate(gene.kind, tuple(ops))


def mutate_rotate(gene: Gate, rng: random.Random | None = None) -> Gate:
    """Rotate operands right by one: ``(a, b, c) -> (c, a, b)``."""
    ops = gene.operands
    if len(ops) < 2:
        return gene
    return Gate(gene.kind, (ops[-1],) + ops[:-1])


def swap_genes(chromosome: Chromosome, i: int, j: int) -> Chromosome:
    """Exchange genes at 0-based positions ``i`` and ``j``."""
    genes = list(chromosome.genes)
    genes[i], genes[j] = genes[j], genes[i]
    return chromosome.replace(genes)


def mutate_swap(chromosome: Chromosome, rng: random.Random) -> Chromosome:
    n = len(chromosome)
    if n < 2:
        return chromosome
    i, j = rng.sample(range(n), 2)
    return swap_genes(chromosome, i, j)


def mutate(chromosome: Chromosome, rng: random.Random, config: EvolConfig) -> Chromosome:
    """Per-gene mutation: each gene mutates with ``mutation_prob`` using a
    type drawn from ``mutation_weights``."""
    pm = config.mutation_prob
    if pm <= 0.0:
        return chromosome
    genes = list(chromosome.genes)
    width = chromosome.width
    n = len(genes)
    changed = False
    for i in range(n):
        if rng.random() >= pm:
            continue
        kind = rng.choices(MUTATION_TYPES, weights=config.mutation_weights)[0]
        if kind == "operator":
            genes[i] = mutate_operator(genes[i], rng, config.library, width)
        elif kind == "address":
            genes[i] = mutate_address(genes[i], rng, width)
        elif kind == "rotate":
            genes[i] = mutate_rotate(genes[i])
        elif n >= 2:
            j = rng.randrange(n - 1)
            j += j >= i
            genes[i], genes[j] = genes[j], genes[i]
        changed = True
    return chromosome.replace(genes) if changed else chromosome


# -- loop --------------------------------------------------------------------

Evaluator = Callable[[Chromosome], Evaluation]


def make_evaluator(targets: TargetColumns, embedding: Embedding, model: CostModel) -> Evaluator:
    def _eval(chrom: Chromosome) -> Evaluation:
        return evaluate(chrom, targets, embedding, model)

    return _eval


def _best_index(population: Sequence[Individual]) -> int:
    return min(range(len(population)), key=lambda i: population[i].fitness)


def step(
    population: Sequence[Individual],
    config: EvolConfig,
    rng: random.Random,
    evaluator: Evaluator,
) -> list[Individual]:
    """Breed one generation: elites survive unchanged, the rest come from
    tournament selection, crossover (or cloning) and mutation."""
    size = len(population)
    order = sorted(range(size), key=lambda i: population[i].fitness)
    nxt = [population[i] for i in order[: config.elitism]]
    fitnesses = [ind.fitness for ind in population]
    offspring: list[Chromosome] = []
    while len(nxt) + len(offspring) < size:
        pa = population[tournament_select(fitnesses, rng, config.tournament_size)].chromosome
        pb = population[tournament_select(fitnesses, rng, config.tournament_size)].chromosome
        if len(pa) >= 2 and rng.random() < config.crossover_prob:
            ca, cb = crossover(pa, pb, rng)
        else:
            ca, cb = pa, pb
        offspring.append(mutate(ca, rng, config))
        if len(nxt) + len(offspring) < size:
            offspring.append(mutate(cb, rng, config))
    nxt.extend(Individual(c, evaluator(c)) for c in offspring)
    return nxt


def initial_population(
    config: EvolConfig, width: int, rng: random.Random, evaluator: Evaluator
) -> list[Individual]:
    chroms = [
        random_chromosome(rng, config.chromosome_length, width, config.library)
        for _ in range(config.population_size)
    ]
    return [Individual(c, evaluator(c)) for c in chroms]


def evolve(
    targets: TargetColumns,
    embedding: Embedding,
    config: EvolConfig,
    on_generation: Callable[[GenerationStats], bool | None] | None = None,
) -> RunResult:
    """Run the evolution against prepared target columns.

    ``on_generation`` is called after every generation (including the initial
    population as generation 0); returning a true value stops the run.
    """
    t0 = time.perf_counter()
    rng = random.Random(config.seed)
    evaluator = make_evaluator(targets, embedding, config.cost_model)
    population = initial_population(config, embedding.width, rng, evaluator)
    evaluations = len(population)

    best = population[_best_index(population)]
    found_at = 0
    gen = 0

    def report(generation: int, pop: Sequence[Individual]) -> bool:
        if on_generation is None:
            return False
        gen_best = min(ind.fitness for ind in pop)
        mean_err = sum(ind.fitness.errors for ind in pop) / len(pop)
        stats = GenerationStats(generation, gen_best, best.fitness, mean_err, evaluations)
        return bool(on_generation(stats))

    stop = report(0, population) or (config.early_stop and best.evaluation.perfect)
    while not stop and gen < config.max_generations:
        gen += 1
        population = step(population, config, rng, evaluator)
        evaluations += len(population) - config.elitism
        cand = population[_best_index(population)]
        if cand.fitness < best.fitness:
            best, found_at = cand, gen
        stop = report(gen, population) or (config.early_stop and best.evaluation.perfect)

    circuit = decode_prefix(best.chromosome, best.evaluation.prefix_len)
    return RunResult(
        best_chromosome=best.chromosome,
        best_evaluation=best.evaluation,
        circuit=circuit,
        generation_found=found_at,
        generations_run=gen,
        evaluations=evaluations,
        seed=config.seed,
        wall_time=time.perf_counter() - t0,
    )


def run(
    spec: FunctionSpec,
    embedding: Embedding,
    config: EvolConfig,
    on_generation: Callable[[GenerationStats], bool | None] | None = None,
) -> RunResult:
    return evolve(target_columns(spec, embedding), embedding, config, on_generation)


def run_many(
    spec: FunctionSpec,
    embedding: Embedding,
    config: EvolConfig,
    seeds: Sequence[int],
    jobs: int = 1,
) -> list[RunResult]:
    """Independent runs, one per seed, optionally in worker processes."""
    configs = [replace(config, seed=s) for s in seeds]
    if jobs <= 1 or len(configs) <= 1:
        return [run(spec, embedding, c) for c in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, [spec] * len(configs), [embedding] * len(configs), configs))


def best_of(results: Sequence[RunResult]) -> RunResult:
    return min(results, key=lambda r: (r.fitness, r.seed))


def stop_when(max_errors: int = 0, max_cost: int | None = None) -> Callable[[GenerationStats], bool]:
    """Callback that stops a run once the best-ever fitness is good enough."""

    def _cb(stats: GenerationStats) -> bool:
        f = stats.best_ever
        return f.errors <= max_errors and (max_cost is None or f.cost <= max_cost)

    return _cb


def progress_logger(every: int = 100) -> Callable[[GenerationStats], None]:
    def _cb(stats: GenerationStats) -> None:
        if stats.generation % every == 0:
            log.info("gen %d best=%s best_ever=%s mean_f1=%.2f evals=%d", stats.generation,
                     stats.best, stats.best_ever, stats.mean_errors, stats.evaluations)

    return _cb

