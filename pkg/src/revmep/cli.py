"""Command-line interface.

Results go to standard output, progress and diagnostics to standard error.
Exit status: 0 success, 1 verification failure or no solution, 2 usage or
input errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from dataclasses import replace
from typing import Sequence

import yaml

from .bench import SUITES, format_published_report, run_suite
from .circuit import DEFAULT_COST_MODEL, CostModel, InvalidGateError, is_bijective, truth_table
from .encoding import LIBRARIES, get_library
from .evolution import EvolConfig, best_of, progress_logger, run
from .oracle import SearchBudget, exhaustive_min_qc, verify_circuit
from .render import FORMATS, CircuitFormatError, load_circuit, render_circuit
from .spec import SpecError, load_spec, plan_embedding

log = logging.getLogger("revmep")

COST_MODEL_ENV = "REVMEP_COST_MODEL"


class UsageError(Exception):
    pass


def cost_model_from_env() -> CostModel:
    """Default cost model, with per-token overrides read from the file named by
    ``$REVMEP_COST_MODEL`` (a YAML/JSON mapping such as ``{T4: 13, P3: 4}``)."""
    path = os.environ.get(COST_MODEL_ENV)
    if not path:
        return DEFAULT_COST_MODEL
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise UsageError(f"cannot read cost model {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"cost model file {path} must be a mapping")
    return DEFAULT_COST_MODEL.with_overrides(data, name=os.path.basename(path))


def _add_evol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--library", choices=sorted(LIBRARIES), default=None)
    p.add_argument("--max-controls", type=int, default=None, help="largest Toffoli control count")
    p.add_argument("--pop", type=int, default=None, help="population size")
    p.add_argument("--gens", type=int, default=None, help="maximum generations")
    p.add_argument("--chrom-len", type=int, default=None, help="chromosome length")
    p.add_argument("--pc", type=float, default=None, help="crossover probability")
    p.add_argument("--pm", type=float, default=None, help="per-gene mutation probability")
    p.add_argument("--tournament", type=int, default=None)
    p.add_argument("--early-stop", action="store_true", default=None,
                   help="stop at the first error-free circuit")
    p.add_argument("--config", help="YAML/JSON file with evolution settings")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
    p.add_argument("--progress", type=int, default=0, metavar="N",
                   help="log progress every N generations")


def _build_config(args: argparse.Namespace, model: CostModel) -> EvolConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    flags = {
        "population_size": args.pop,
        "max_generations": args.gens,
        "chromosome_length": args.chrom_len,
        "crossover_prob": args.pc,
        "mutation_prob": args.pm,
        "tournament_size": args.tournament,
        "early_stop": args.early_stop,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if args.library is not None:
        data["library"] = args.library
    data.setdefault("library", "nct-p")
    data["library"] = get_library(data["library"], args.max_controls)
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    try:
        return EvolConfig.from_mapping(data, cost_model=model)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_synth(args: argparse.Namespace) -> int:
    model = cost_model_from_env()
    spec = load_spec(args.specfile)
    emb = plan_embedding(spec, args.width)
    config = _build_config(args, model)
    seeds = [config.seed + i for i in range(max(1, args.runs))]
    callback = progress_logger(args.progress) if args.progress else None
    if args.jobs > 1 and len(seeds) > 1:
        from .evolution import run_many

        results = run_many(spec, emb, config, seeds, jobs=args.jobs)
    else:
        results = [run(spec, emb, replace(config, seed=s), callback) for s in seeds]
    best = best_of(results)
    report = verify_circuit(best.circuit, spec, emb, config.cost_model)
    meta = {
        "name": spec.name,
        "spec": list(spec.outputs),
        "inputs": spec.n_in,
        "outputs": spec.n_out,
        "library": config.library.name,
        "cost_model": config.cost_model.name,
        "seed": best.seed,
        "generation_found": best.generation_found,
        "f1": report.errors,
        "qc": report.quantum_cost,
        "gc": report.gate_count,
    }
    text = render_circuit(best.circuit, args.format, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    print(f"f1={report.errors} QC={report.quantum_cost} GC={report.gate_count} seed={best.seed}",
          file=sys.stderr)
    return 0


def _embedding_for(spec, circuit):
    try:
        return plan_embedding(spec, circuit.width)
    except SpecError as exc:
        raise UsageError(f"circuit width {circuit.width} does not fit spec {spec.name}: {exc}") from exc


def cmd_eval(args: argparse.Namespace) -> int:
    model = cost_model_from_env()
    doc = load_circuit(args.circuitfile)
    spec = load_spec(args.specfile)
    report = verify_circuit(doc.circuit, spec, _embedding_for(spec, doc.circuit), model)
    print(f"f1={report.errors} QC={report.quantum_cost} GC={report.gate_count}")
    for row, want, got in report.diffs:
        print(f"  row {row}: expected {want}, got {got}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        doc = load_circuit(args.circuitfile)
    except InvalidGateError as exc:
        print(f"invalid: {exc}")
        return 1
    circuit = doc.circuit
    print(f"valid: yes (width {circuit.width}, {len(circuit)} gates)")
    ok = True
    if circuit.width <= 16:
        bij = is_bijective(circuit)
        ok &= bij
        print(f"bijective: {'yes' if bij else 'NO'}")
        print("truth table:", ",".join(map(str, truth_table(circuit))))
    else:
        print("bijective: not checked (width > 16)")
    if args.spec:
        spec = load_spec(args.spec)
        report = verify_circuit(circuit, spec, _embedding_for(spec, circuit), cost_model_from_env())
        print(f"f1={report.errors} QC={report.quantum_cost} GC={report.gate_count}")
        ok &= report.errors == 0
    return 0 if ok else 1


def cmd_oracle(args: argparse.Namespace) -> int:
    spec = load_spec(args.specfile)
    emb = plan_embedding(spec, args.width)
    budget = SearchBudget(args.qc_limit, args.node_limit, args.width_limit)
    try:
        res = exhaustive_min_qc(spec, emb, get_library(args.library, args.max_controls), budget,
                                cost_model_from_env())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not res.found:
        why = "node limit" if res.exhausted_nodes else "cost limit"
        print(f"not found: no circuit with QC <= {res.bound} ({why} reached, {res.nodes} states)")
        return 1
    print(f"min QC={res.min_qc} GC={res.gate_count} (states expanded: {res.nodes})")
    print(render_circuit(res.witness, args.format, {"name": spec.name, "qc": res.min_qc}).rstrip("\n"))
    return 0


def cmd_bench_run(args: argparse.Namespace) -> int:
    config = _build_config(args, cost_model_from_env())
    report = run_suite(args.suite, config, args.seeds, jobs=args.jobs, names=args.only)
    print(report.to_text())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 0 if all(r.verified for r in report.results) else 1


def cmd_bench_published(args: argparse.Namespace) -> int:
    print(format_published_report(args.suite))
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    doc = load_circuit(args.circuitfile)
    text = render_circuit(doc.circuit, args.format, doc.metadata)
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revmep", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="evolve a circuit for a spec file")
    p.add_argument("specfile")
    _add_evol_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--runs", type=int, default=1, help="independent runs with consecutive seeds")
    p.add_argument("--width", type=int, default=None, help="override the number of circuit lines")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", choices=FORMATS, default="structured")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="print f1/QC/GC of a circuit against a spec")
    p.add_argument("circuitfile")
    p.add_argument("specfile")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check validity and bijectivity, print the truth table")
    p.add_argument("circuitfile")
    p.add_argument("--spec", help="also require zero errors against this spec")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact minimum quantum cost by exhaustive search")
    p.add_argument("specfile")
    p.add_argument("--qc-limit", type=int, required=True)
    p.add_argument("--library", choices=sorted(LIBRARIES), default="nct")
    p.add_argument("--max-controls", type=int, default=None)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--node-limit", type=int, default=2_000_000)
    p.add_argument("--width-limit", type=int, default=4)
    p.add_argument("--format", choices=FORMATS, default="ascii")
    p.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="benchmark suites")
    bsub = bench.add_subparsers(dest="bench_command", required=True)
    p = bsub.add_parser("run", help="evolve every benchmark of a suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--only", nargs="+", help="benchmark names to run")
    p.add_argument("--json", help="also write the report as JSON")
    _add_evol_args(p)
    p.set_defaults(func=cmd_bench_run)
    p = bsub.add_parser("published", help="recompute the stored published improvement columns")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.set_defaults(func=cmd_bench_published)

    p = sub.add_parser("render", help="draw or convert a circuit file")
    p.add_argument("circuitfile")
    p.add_argument("--format", choices=FORMATS, default="ascii")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    warnings.simplefilter("default")
    try:
        return args.func(args)
    except (UsageError, SpecError, CircuitFormatError, InvalidGateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
