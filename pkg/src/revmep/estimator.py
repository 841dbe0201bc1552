"""scikit-learn style front end: fit a reversible circuit to truth-table rows."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .circuit import DEFAULT_COST_MODEL, circuit_cost
from .encoding import get_library
from .evolution import EvolConfig, best_of, evolve, stop_when
from .oracle import output_values
from .spec import Embedding, TargetColumns, max_multiplicity
from .validation import check_binary_rows, check_truth_table


class ReversibleCircuitSynthesizer(BaseEstimator):
    """Evolve a reversible circuit reproducing a (partial) truth table.

    ``X`` holds input bits, one column per input line (column 0 is line 1);
    ``y`` holds the wanted output bits the same way. Input patterns absent
    from ``X`` are don't-cares.

    Parameters
    ----------
    library : {"nct", "nct-p", "nct-p-mixed"}
        Gate set to evolve from.
    population_size, max_generations, chromosome_length : int
        Evolution budget.
    crossover_prob, mutation_prob : float
        Crossover rate per pair and mutation rate per gene.
    tournament_size, elitism : int
    width : int or None
        Number of circuit lines; by default the smallest width that fits the
        inputs and the outputs plus the minimum garbage.
    n_restarts : int
        Independent runs (seeds ``random_state + i``); the best is kept.
    stop_cost : int or None
        Stop a run as soon as an exact circuit of at most this cost is found.
    cost_model : CostModel or None
    random_state : int or None

    Attributes
    ----------
    circuit_ : Circuit
    fitness_ : Fitness
    embedding_ : Embedding
    run_result_ : RunResult
    """

    def __init__(
        self,
        library="nct-p",
        population_size=100,
        max_generations=500,
        chromosome_length=10,
        crossover_prob=0.7,
        mutation_prob=0.01,
        tournament_size=2,
        elitism=1,
        width=None,
        n_restarts=1,
        stop_cost=None,
        cost_model=None,
        random_state=None,
    ):
        self.library = library
        self.population_size = population_size
        self.max_generations = max_generations
        self.chromosome_length = chromosome_length
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.tournament_size = tournament_size
        self.elitism = elitism
        self.width = width
        self.n_restarts = n_restarts
        self.stop_cost = stop_cost
        self.cost_model = cost_model
        self.random_state = random_state

    def _config(self, seed: int) -> EvolConfig:
        return EvolConfig(
            population_size=self.population_size,
            max_generations=self.max_generations,
            chromosome_length=self.chromosome_length,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            tournament_size=self.tournament_size,
            library=get_library(self.library),
            cost_model=self.cost_model if self.cost_model is not None else DEFAULT_COST_MODEL,
            elitism=self.elitism,
            seed=seed,
        )

    def fit(self, X, y):
        X, y = check_truth_table(X, y)
        n_in, n_out = X.shape[1], y.shape[1]
        rows = X @ (1 << np.arange(n_in))
        values = y @ (1 << np.arange(n_out))
        m = max_multiplicity(values.tolist())
        garbage = int(np.ceil(np.log2(m))) if m > 1 else 0
        width = self.width if self.width is not None else max(n_in, n_out + garbage)
        if width < n_out + garbage:
            raise ValueError(
                f"width {width} cannot hold {n_out} outputs plus {garbage} garbage lines"
            )
        embedding = Embedding(width, n_in, n_out)
        cols = [0] * n_out
        care = 0
        for r, v in zip(rows.tolist(), values.tolist()):
            care |= 1 << r
            for k in range(n_out):
                if (v >> k) & 1:
                    cols[k] |= 1 << r
        targets = TargetColumns(tuple(cols), care, 1 << n_in)

        if self.random_state is None:
            base = int(np.random.SeedSequence().entropy % (2**31))
        else:
            base = int(self.random_state)
        callback = stop_when(0, self.stop_cost) if self.stop_cost is not None else None
        results = [
            evolve(targets, embedding, self._config(base + i), callback)
            for i in range(max(1, self.n_restarts))
        ]
        self.run_result_ = best_of(results)
        self.circuit_ = self.run_result_.circuit
        self.fitness_ = self.run_result_.fitness
        self.embedding_ = embedding
        self.n_features_in_ = n_in
        self.n_outputs_ = n_out
        return self

    def predict(self, X):
        """Output bits of the fitted circuit for each input row."""
        check_is_fitted(self, "circuit_")
        X = check_binary_rows(X, n_columns=self.n_features_in_)
        table = np.asarray(output_values(self.circuit_, self.embedding_))
        rows = X @ (1 << np.arange(self.n_features_in_))
        vals = table[rows]
        return ((vals[:, None] >> np.arange(self.n_outputs_)) & 1).astype(np.int8)

    def score(self, X, y):
        """Fraction of output bits predicted correctly."""
        y = check_binary_rows(y, n_columns=getattr(self, "n_outputs_", None), name="y")
        return float(np.mean(self.predict(X) == y))

    @property
    def quantum_cost_(self) -> int:
        check_is_fitted(self, "circuit_")
        model = self.cost_model if self.cost_model is not None else DEFAULT_COST_MODEL
        return circuit_cost(self.circuit_, model)
