"""Published benchmark suites, suite execution and improvement reporting."""
from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import Any, Sequence

import yaml

from .evolution import EvolConfig, best_of, run_many
from .oracle import verify_circuit
from .spec import FunctionSpec, TruncatedSpecWarning, plan_embedding, spec_from_mapping

SUITES = ("table5", "table6")


@dataclass(frozen=True)
class Benchmark:
    spec: FunctionSpec
    table: str
    best_known_qc: int | None = None
    best_known_gc: int | None = None
    published_qc: int | None = None
    published_gc: int | None = None
    printed_improvement: Any = None

    @property
    def name(self) -> str:
        return self.spec.name


def _read_suite(name: str) -> dict[str, Any]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    text = resources.files("revmep").joinpath("data").joinpath(f"{name}.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


def load_suite(name: str, warn: bool = True) -> list[Benchmark]:
    """Benchmarks of a stored suite. Truncated rows warn once per benchmark."""
    data = _read_suite(name)
    out = []
    for row in data["benchmarks"]:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", TruncatedSpecWarning)
            spec = spec_from_mapping(row, warn=True)
        if warn:
            for w in caught:
                warnings.warn(str(w.message), TruncatedSpecWarning, stacklevel=2)
        if name == "table5":
            bench = Benchmark(spec, name, best_known_qc=row["best_known_qc"], published_qc=row["published_qc"],
                              printed_improvement=row["printed_improvement"])
        else:
            refs = [r for r in (row.get("ref22"), row.get("ref23")) if r]
            bench = Benchmark(
                spec,
                name,
                best_known_qc=min(r[1] for r in refs) if refs else None,
                best_known_gc=min(r[0] for r in refs) if refs else None,
                published_qc=row["published_qc"],
                published_gc=row["published_gc"],
                printed_improvement=tuple(row["printed_improvement"]),
            )
        out.append(bench)
    return out


def printed_average(name: str) -> Any:
    return _read_suite(name)["printed_average_improvement"]


def improvement_percent(best_known: float, achieved: float) -> float:
    """Relative improvement of ``achieved`` over ``best_known``, in percent."""
    if best_known <= 0:
        raise ValueError(f"best-known value must be positive, got {best_known}")
    return 100.0 * (best_known - achieved) / best_known


def improvement_2dp(best_known: float, achieved: float) -> float:
    return round(improvement_percent(best_known, achieved), 2)


def truncate_2dp(value: float) -> float:
    return math.trunc(round(value * 100, 6)) / 100


def average_percent(values: Sequence[float]) -> float:
    """Mean of per-row percentages, each cut to two decimals as displayed."""
    if not values:
        raise ValueError("no values to average")
    return sum(truncate_2dp(v) for v in values) / len(values)


def improvement_int(best_known: float, achieved: float) -> int:
    """Integer-truncated improvement (the convention of the GC/QC comparison table)."""
    return math.trunc(improvement_percent(best_known, achieved))


@dataclass
class BenchResult:
    name: str
    n_in: int
    n_out: int
    width: int
    errors: int
    qc: int
    gc: int
    seed: int
    verified: bool
    best_known_qc: int | None
    published_qc: int | None
    improvement: float | None
    gap_to_published: int | None
    seeds: list[int] = field(default_factory=list)
    runtime: float = 0.0


@dataclass
class SuiteReport:
    suite: str
    results: list[BenchResult]

    @property
    def average_improvement(self) -> float | None:
        vals = [r.improvement for r in self.results if r.improvement is not None]
        return average_percent(vals) if vals else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "average_improvement": self.average_improvement,
            "results": [asdict(r) for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        header = f"{'benchmark':<10} {'I/O':>5} {'L':>3} {'f1':>4} {'GC':>4} {'QC':>5} " \
                 f"{'known':>6} {'publ':>6} {'impr%':>7} {'gap':>5}"
        lines = [header, "-" * len(header)]
        for r in self.results:
            impr = f"{r.improvement:.2f}" if r.improvement is not None else "-"
            lines.append(
                f"{r.name:<10} {f'{r.n_in}/{r.n_out}':>5} {r.width:>3} {r.errors:>4} {r.gc:>4} {r.qc:>5} "
                f"{_opt(r.best_known_qc):>6} {_opt(r.published_qc):>6} {impr:>7} {_opt(r.gap_to_published):>5}"
            )
        avg = self.average_improvement
        lines.append(f"average improvement: {avg:.2f}%" if avg is not None else "average improvement: -")
        return "\n".join(lines)


def _opt(v: Any) -> str:
    return "-" if v is None else str(v)


def run_benchmark(bench: Benchmark, config: EvolConfig, seeds: Sequence[int], jobs: int = 1,
                  width: int | None = None) -> BenchResult:
    t0 = time.perf_counter()
    emb = plan_embedding(bench.spec, width)
    results = run_many(bench.spec, emb, config, seeds, jobs=jobs)
    best = best_of(results)
    report = verify_circuit(best.circuit, bench.spec, emb, config.cost_model)
    # The independent re-check must agree with the evolved fitness.
    verified = report.fitness == best.fitness or (
        not best.perfect and report.errors == best.fitness.errors
    )
    improvement = None
    if report.errors == 0 and bench.best_known_qc:
        improvement = improvement_percent(bench.best_known_qc, report.quantum_cost)
    gap = report.quantum_cost - bench.published_qc if bench.published_qc is not None else None
    return BenchResult(
        name=bench.name,
        n_in=bench.spec.n_in,
        n_out=bench.spec.n_out,
        width=emb.width,
        errors=report.errors,
        qc=report.quantum_cost,
        gc=report.gate_count,
        seed=best.seed,
        verified=verified,
        best_known_qc=bench.best_known_qc,
        published_qc=bench.published_qc,
        improvement=improvement,
        gap_to_published=gap,
        seeds=list(seeds),
        runtime=time.perf_counter() - t0,
    )


def run_suite(suite: str | Sequence[Benchmark], config: EvolConfig, seeds: Sequence[int],
              jobs: int = 1, names: Sequence[str] | None = None) -> SuiteReport:
    """Best-of-seeds evolution for each benchmark, every result re-verified."""
    if isinstance(suite, str):
        label = suite
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncatedSpecWarning)
            benches = load_suite(suite, warn=False)
    else:
        label, benches = "custom", list(suite)
    if names:
        wanted = set(names)
        benches = [b for b in benches if b.name in wanted]
    results = [run_benchmark(b, config, seeds, jobs=jobs) for b in benches]
    return SuiteReport(label, results)


@dataclass(frozen=True)
class PublishedRow:
    name: str
    known: tuple[int | None, int | None]
    achieved: tuple[int | None, int]
    computed: tuple[float | None, float]
    printed: tuple[float | None, float]


def published_report(suite: str) -> list[PublishedRow]:
    """Recompute the printed improvement column from the stored published values.

    ``table5`` rows carry QC only (2-decimal percentages); ``table6`` rows
    carry GC and QC (integer-truncated percentages).
    """
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncatedSpecWarning)
        benches = load_suite(suite, warn=False)
    for b in benches:
        if suite == "table5":
            rows.append(PublishedRow(b.name, (None, b.best_known_qc), (None, b.published_qc),
                                 (None, improvement_percent(b.best_known_qc, b.published_qc)),
                                 (None, b.printed_improvement)))
        else:
            rows.append(PublishedRow(
                b.name,
                (b.best_known_gc, b.best_known_qc),
                (b.published_gc, b.published_qc),
                (improvement_int(b.best_known_gc, b.published_gc), improvement_int(b.best_known_qc, b.published_qc)),
                tuple(b.printed_improvement),
            ))
    return rows


def format_published_report(suite: str) -> str:
    rows = published_report(suite)
    lines = []
    if suite == "table5":
        lines.append(f"{'benchmark':<10} {'known':>6} {'publ':>6} {'computed':>9} {'printed':>8}")
        for r in rows:
            lines.append(f"{r.name:<10} {r.known[1]:>6} {r.achieved[1]:>6} {r.computed[1]:>9.2f} {r.printed[1]:>8.2f}")
        avg = average_percent([r.computed[1] for r in rows])
        lines.append(f"average computed {avg:.2f}, printed {printed_average(suite)}")
    else:
        lines.append(f"{'#':>3} {'known':>8} {'publ':>8} {'computed':>9} {'printed':>8}")
        for r in rows:
            flag = "" if tuple(r.computed) == tuple(r.printed) else "  <- differs"
            lines.append(f"{r.name:>3} {f'{r.known[0]}/{r.known[1]}':>8} {f'{r.achieved[0]}/{r.achieved[1]}':>8} "
                         f"{f'{r.computed[0]}/{r.computed[1]}':>9} {f'{r.printed[0]}/{r.printed[1]}':>8}{flag}")
    return "\n".join(lines)


def default_bench_config(**overrides: Any) -> EvolConfig:
    return replace(EvolConfig(), **overrides)
