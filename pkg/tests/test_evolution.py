import random
from collections import Counter
from dataclasses import replace

import pytest

from revmep.circuit import Cnot, GateKind, Not, Peres, Toffoli
from revmep.encoding import Chromosome, chromosome_violations, get_library, random_chromosome
from revmep.evolution import (
    EvolConfig,
    Individual,
    crossover,
    crossover_at,
    make_evaluator,
    mutate,
    mutate_address,
    mutate_operator,
    mutate_rotate,
    mutate_swap,
    run,
    step,
    swap_genes,
    tournament_select,
)
from revmep.fitness import Fitness
from revmep.spec import FunctionSpec, plan_embedding, target_columns


class ScriptedRng(random.Random):
    """Random whose ``choice``/``sample``/``randrange`` follow a script."""

    def __init__(self, choices=(), samples=(), ranges=()):
        super().__init__(0)
        self._choices = list(choices)
        self._samples = list(samples)
        self._ranges = list(ranges)

    def choice(self, seq):
        want = self._choices.pop(0)
        assert want in seq
        return want

    def sample(self, population, k, **kw):
        return self._samples.pop(0)

    def randrange(self, *args):
        return self._ranges.pop(0)


NCTP = get_library("nct-p")


# -- selection ---------------------------------------------------------------

def test_tournament_prefers_lower_errors():
    fits = [Fitness(0, 11, 5), Fitness(3, 4, 2)]
    assert tournament_select(fits, ScriptedRng(ranges=[0, 1]), 2) == 0
    assert tournament_select(fits, ScriptedRng(ranges=[1, 0]), 2) == 0


def test_tournament_prefers_lower_cost():
    fits = [Fitness(2, 9, 3), Fitness(2, 7, 4)]
    assert tournament_select(fits, ScriptedRng(ranges=[0, 1]), 2) == 1


def test_tournament_size_one_uniform():
    rng = random.Random(0)
    fits = [Fitness(i, 0, 1) for i in range(4)]
    counts = Counter(tournament_select(fits, rng, 1) for _ in range(4000))
    assert set(counts) == {0, 1, 2, 3}
    assert min(counts.values()) > 800


def test_tournament_empty():
    with pytest.raises(ValueError):
        tournament_select([], random.Random(0))


# -- crossover ---------------------------------------------------------------

def _chrom(prefix, n=7):
    # distinct, recognisable genes: Not on line 1 vs Cnot on lines (1,2)
    return Chromosome(tuple(Not(1) if prefix == "A" else Cnot(1, 2) for _ in range(n)), 3)


def test_crossover_cut_points_1_3_6():
    a = Chromosome(tuple(Not(1 + i % 3) for i in range(7)), 3)
    b = Chromosome(tuple(Cnot(1 + i % 3, 1 + (i + 1) % 3) for i in range(7)), 3)
    ca, cb = crossover_at(a, b, [1, 3, 6])
    src = ["A", "B", "B", "A", "A", "A", "B"]
    for i, s in enumerate(src):
        assert ca.genes[i] == (a.genes[i] if s == "A" else b.genes[i])
        assert cb.genes[i] == (b.genes[i] if s == "A" else a.genes[i])


def test_crossover_all_cuts_interleaves():
    a, b = _chrom("A"), _chrom("B")
    ca, _ = crossover_at(a, b, range(1, 7))
    assert [g.kind for g in ca.genes] == [GateKind.NOT, GateKind.CNOT] * 3 + [GateKind.NOT]


def test_crossover_identical_parents():
    a = random_chromosome(random.Random(1), 10, 3, NCTP)
    assert crossover(a, a, random.Random(2)) == (a, a)


def test_crossover_errors():
    a = random_chromosome(random.Random(1), 1, 3, NCTP)
    with pytest.raises(ValueError):
        crossover(a, a, random.Random(0))
    with pytest.raises(ValueError):
        crossover_at(_chrom("A", 5), _chrom("B", 6), [1])


def test_crossover_fuzz_preserves_positions_and_validity():
    rng = random.Random(2024)
    lib = get_library("nct-p-mixed", 3)
    for _ in range(10_000):
        n = rng.randint(2, 20)
        width = rng.randint(3, 5)
        a = random_chromosome(rng, n, width, lib)
        b = random_chromosome(rng, n, width, lib)
        ca, cb = crossover(a, b, rng)
        assert len(ca) == len(cb) == n
        for i in range(n):
            assert Counter([ca.genes[i], cb.genes[i]]) == Counter([a.genes[i], b.genes[i]])
        assert not chromosome_violations(ca) and not chromosome_violations(cb)


# -- mutation ----------------------------------------------------------------

def test_mutate_operator_grow():
    rng = ScriptedRng(choices=[(GateKind.PERES, 2)], samples=[[2]])
    assert mutate_operator(Cnot(1, 3), rng, NCTP, 3) == Peres(1, 2, 3)


def test_mutate_operator_shrink():
    assert mutate_operator(Peres(1, 2, 3), ScriptedRng(choices=[(GateKind.NOT, 0)]), NCTP, 3) == Not(3)
    assert mutate_operator(Peres(1, 2, 3), ScriptedRng(choices=[(GateKind.CNOT, 1)]), NCTP, 3) == Cnot(1, 3)


def test_mutate_operator_changes_kind_and_stays_valid():
    rng = random.Random(3)
    lib = get_library("nct-p-mixed", 4)
    for _ in range(2000):
        g = random_chromosome(rng, 1, 5, lib).genes[0]
        m = mutate_operator(g, rng, lib, 5)
        assert (m.kind, m.n_controls) != (g.kind, g.n_controls)
        assert m.target == g.target
        assert not chromosome_violations(Chromosome((m,), 5))


def test_mutate_operator_single_variant_noop():
    lib = get_library("nct")
    assert mutate_operator(Not(1), random.Random(0), lib, 1) == Not(1)


def test_mutate_address():
    assert mutate_address(Cnot(1, 3), ScriptedRng(ranges=[0], choices=[2]), 3) == Cnot(2, 3)
    rng = random.Random(0)
    assert {mutate_address(Not(1), rng, 3) for _ in range(50)} == {Not(2), Not(3)}
    assert mutate_address(Peres(1, 2, 3), rng, 3) == Peres(1, 2, 3)


def test_mutate_rotate():
    assert mutate_rotate(Peres(1, 2, 3)) == Peres(3, 1, 2)
    assert mutate_rotate(Cnot(1, 3)) == Cnot(3, 1)
    g = Toffoli(1, 2, 4)
    assert mutate_rotate(mutate_rotate(mutate_rotate(g))) == g
    assert mutate_rotate(Not(2)) == Not(2)


def test_mutate_swap():
    c = random_chromosome(random.Random(4), 8, 4, NCTP)
    s = swap_genes(c, 1, 4)
    assert s.genes[1] == c.genes[4] and s.genes[4] == c.genes[1]
    assert all(s.genes[i] == c.genes[i] for i in range(8) if i not in (1, 4))
    assert swap_genes(s, 1, 4) == c
    one = random_chromosome(random.Random(4), 1, 4, NCTP)
    assert mutate_swap(one, random.Random(0)) == one
    assert Counter(mutate_swap(c, random.Random(1)).genes) == Counter(c.genes)


def test_mutate_zero_probability():
    c = random_chromosome(random.Random(5), 10, 3, NCTP)
    assert mutate(c, random.Random(0), EvolConfig(mutation_prob=0.0)) == c


def test_mutate_rotate_only():
    c = random_chromosome(random.Random(5), 10, 3, NCTP)
    cfg = EvolConfig(mutation_prob=1.0, mutation_weights=(0, 0, 1, 0))
    assert mutate(c, random.Random(0), cfg).genes == tuple(mutate_rotate(g) for g in c.genes)


def test_mutate_fuzz_validity():
    rng = random.Random(77)
    cfg = EvolConfig(mutation_prob=0.5, library=get_library("nct-p-mixed", 3))
    for _ in range(10_000):
        width = rng.randint(3, 5)
        c = random_chromosome(rng, rng.randint(1, 12), width, cfg.library)
        m = mutate(c, rng, cfg)
        assert len(m) == len(c)
        assert not chromosome_violations(m)


# -- loop --------------------------------------------------------------------

@pytest.fixture
def small_problem():
    spec = FunctionSpec("b2", 3, 3, (7, 0, 1, 2, 3, 4, 5, 6))
    emb = plan_embedding(spec)
    return spec, emb, target_columns(spec, emb)


def _population(cfg, emb, tgt, seed=0):
    rng = random.Random(seed)
    ev = make_evaluator(tgt, emb, cfg.cost_model)
    chroms = [random_chromosome(rng, cfg.chromosome_length, emb.width, cfg.library)
              for _ in range(cfg.population_size)]
    return [Individual(c, ev(c)) for c in chroms], ev


def test_step_elitism_and_size(small_problem):
    _, emb, tgt = small_problem
    cfg = EvolConfig(population_size=21, library="nct")
    pop, ev = _population(cfg, emb, tgt)
    rng = random.Random(1)
    for _ in range(30):
        best = min(i.fitness for i in pop)
        pop = step(pop, cfg, rng, ev)
        assert len(pop) == 21
        assert min(i.fitness for i in pop) <= best


def test_step_without_variation_resamples(small_problem):
    _, emb, tgt = small_problem
    cfg = EvolConfig(population_size=20, crossover_prob=0.0, mutation_prob=0.0, library="nct")
    pop, ev = _population(cfg, emb, tgt)
    before = {i.chromosome for i in pop}
    nxt = step(pop, cfg, random.Random(3), ev)
    assert {i.chromosome for i in nxt} <= before


def test_step_deterministic(small_problem):
    _, emb, tgt = small_problem
    cfg = EvolConfig(population_size=30, library="nct", mutation_prob=0.2)
    pop, ev = _population(cfg, emb, tgt)
    a = step(pop, cfg, random.Random(9), ev)
    b = step(pop, cfg, random.Random(9), ev)
    assert [i.chromosome for i in a] == [i.chromosome for i in b]


def test_run_zero_generations(small_problem):
    spec, emb, tgt = small_problem
    cfg = EvolConfig(max_generations=0, population_size=10, library="nct", seed=4)
    res = run(spec, emb, cfg)
    pop, _ = _population(cfg, emb, tgt, seed=4)
    assert res.fitness == min(i.fitness for i in pop)
    assert res.generations_run == 0 and res.evaluations == 10


def test_run_determinism_and_monotone_best(small_problem):
    spec, emb, _ = small_problem
    cfg = EvolConfig(max_generations=60, population_size=30, library="nct", seed=11)
    history = []
    a = run(spec, emb, cfg, on_generation=lambda s: history.append(s.best_ever))
    b = run(spec, emb, cfg)
    assert a == b
    assert all(history[i + 1] <= history[i] for i in range(len(history) - 1))
    assert a.evaluations == 30 + 60 * 29


def test_run_result_circuit_matches_fitness(small_problem):
    from revmep.circuit import circuit_cost

    spec, emb, _ = small_problem
    res = run(spec, emb, EvolConfig(max_generations=200, library="nct", seed=2))
    assert res.perfect
    assert circuit_cost(res.circuit) == res.fitness.cost
    assert len(res.circuit) == res.fitness.gates


def test_early_stop(small_problem):
    spec, emb, _ = small_problem
    res = run(spec, emb, EvolConfig(max_generations=500, library="nct", seed=2, early_stop=True))
    assert res.perfect and res.generations_run < 500


def test_config_validation():
    with pytest.raises(ValueError):
        EvolConfig(population_size=1)
    with pytest.raises(ValueError):
        EvolConfig(crossover_prob=1.5)
    with pytest.raises(ValueError):
        EvolConfig(mutation_weights=(0, 0, 0, 0))
    with pytest.raises(ValueError):
        EvolConfig.from_mapping({"bogus": 1})
    cfg = EvolConfig.from_mapping({"library": "nct", "population_size": 150, "cost_model": {"T3": 6}})
    assert cfg.library.name == "nct" and cfg.cost_model.gate_cost(Toffoli(1, 2, 3)) == 6
    assert replace(cfg, seed=3).seed == 3
