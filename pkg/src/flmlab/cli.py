"""Command-line interface.

Subcommands: ``bounds`` (theorem bounds for a benchmark configuration),
``oracle`` (exact level-chain / full-state values), ``simulate`` (Monte
Carlo runs), ``compare`` (simulate + bounds + oracle + verdict report) and
``path-check`` (build and exhaustively verify a long k-path).

Exit status: 0 success, 1 validation failure, 2 usage error, 3 FAIL verdict
in a comparison report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import benchmarks, bounds, chains, formulas, serialize
from .experiments import (
    ExperimentConfig,
    compare_report,
    default_thread_cap,
    resolve_mutation_rate,
    run_experiment,
)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_FAIL_VERDICT = 3


def _add_common(parser: argparse.ArgumentParser, benchmark: bool = True) -> None:
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0, help="64-bit unsigned master seed")
    parser.add_argument("--out", default=None, help="output file (default: standard output)")
    parser.add_argument("--config", default=None, help="JSON file mirroring the flags")
    if benchmark:
        # required, but checked after parsing so a --config file can supply them
        parser.add_argument(
            "--benchmark", choices=("onemax", "leadingones", "jump", "longpath"), default=None
        )
        parser.add_argument("--n", type=int, default=None)
        parser.add_argument("--k", type=int, default=None)
        parser.add_argument("--p", default="1/n", help="mutation rate: real, fraction, or c/n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flmlab",
        description="Fitness-level runtime bounds, exact chain oracles and Monte Carlo validation for the (1+1) EA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="compute all applicable theorem bounds")
    _add_common(p_bounds)
    p_bounds.add_argument("--from", dest="from_level", type=int, default=None)
    p_bounds.add_argument("--to", dest="to_level", type=int, default=None)
    p_bounds.add_argument("--init", default="random", help="random or arbitrary (jump)")

    p_oracle = sub.add_parser("oracle", help="exact level-chain / full-state values")
    _add_common(p_oracle)
    p_oracle.add_argument("--init", default="random", help="random or level:<int>")
    p_oracle.add_argument(
        "--full-state", action="store_true", help="force the brute-force 2^n-state oracle"
    )

    p_sim = sub.add_parser("simulate", help="run Monte Carlo replicates")
    _add_common(p_sim)
    p_sim.add_argument("--replicates", type=int, default=1000)
    p_sim.add_argument("--init", default="random", help="random, level:<int> or point:<bits>")
    p_sim.add_argument("--max-iterations", type=int, default=10**9)
    p_sim.add_argument("--threads", type=int, default=0, help="0: use FLM_THREADS or 1")

    p_cmp = sub.add_parser("compare", help="simulate, compute bounds and report verdicts")
    _add_common(p_cmp)
    p_cmp.add_argument("--replicates", type=int, default=1000)
    p_cmp.add_argument("--init", default="random")
    p_cmp.add_argument("--max-iterations", type=int, default=10**9)
    p_cmp.add_argument("--threads", type=int, default=0)

    p_path = sub.add_parser("path-check", help="build and exhaustively verify a long k-path")
    _add_common(p_path, benchmark=False)
    p_path.add_argument("--n", type=int, default=None)
    p_path.add_argument("--k", type=int, default=None)

    return parser


def _missing_required(args) -> list[str]:
    missing = []
    if args.command == "path-check":
        needed = ("n", "k")
    else:
        needed = ("benchmark", "n")
    for name in needed:
        if getattr(args, name, None) is None:
            missing.append(f"--{name}")
    return missing


def _apply_config_file(argv: list[str]) -> list[str]:
    """Merge --config FILE values into argv as flags; explicit flags win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    with open(known.config, "r", encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise ValueError("--config file must hold a JSON object")
    merged = list(argv)
    for key, value in values.items():
        flag = "--" + str(key).replace("_", "-")
        if any(arg == flag or arg.startswith(flag + "=") for arg in argv):
            continue
        if isinstance(value, bool):
            if value:
                merged.append(flag)
        else:
            merged.extend([flag, str(value)])
    return merged


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _benchmark_of(args) -> benchmarks.Benchmark:
    return benchmarks.make_benchmark(args.benchmark, args.n, args.k)


def _parse_chain_start(init: str):
    if init == "random":
        return "random"
    if init.startswith("level:"):
        return int(init.split(":", 1)[1])
    raise ValueError(f"chain start must be 'random' or 'level:<int>', got {init!r}")


def _exact_chain(args, p: float):
    """Exact chain for the configured benchmark, or None when unavailable."""
    if args.benchmark == "onemax":
        return chains.onemax_level_matrix(args.n, p, start=_parse_chain_start(args.init))
    if args.benchmark == "jump":
        start = _parse_chain_start(args.init)
        return chains.jump_level_matrix(args.n, args.k, p, start=start)
    if args.benchmark == "longpath":
        path = benchmarks.build_long_k_path(args.n, args.k)
        start = _parse_chain_start(args.init)
        return chains.longpath_level_matrix(path, p, start=0 if start == "random" else start)
    return None  # leadingones: no level matrix by design


def _bound_entry(b: bounds.BoundResult) -> dict:
    return {
        "theorem": b.theorem,
        "kind": b.kind,
        "value": b.value,
        "violated_preconditions": list(b.violated_preconditions),
    }


def _cmd_bounds(args) -> int:
    p = resolve_mutation_rate(args.p, args.n)
    doc: dict = {"benchmark": args.benchmark, "n": args.n}
    results: list[bounds.BoundResult] = []

    if args.benchmark == "onemax":
        k = 0 if args.from_level is None else args.from_level
        l = args.n if args.to_level is None else args.to_level
        om = formulas.onemax_bounds(args.n, k, l)
        doc.update(
            {
                "from": k,
                "to": l,
                "e_n": om.e_n,
                "tilde_T": om.tilde_t,
                "tilde_T_plus": om.tilde_t_plus,
                "tilde_T_minus": om.tilde_t_minus,
                "thm_lower": om.thm_lower,
                "thm_lower_clamped": om.clamped,
            }
        )
        results.append(bounds.BoundResult(om.tilde_t, "upper", "onemax-tilde-T"))
        results.append(bounds.BoundResult(om.tilde_t_plus, "upper", "onemax-tilde-T-plus"))
        results.append(bounds.BoundResult(om.thm_lower, "lower", "onemax-visit-lower"))
    elif args.benchmark == "leadingones":
        exact = formulas.leadingones_exact(args.n, p)
        doc["exact_expected_runtime"] = exact
        results.append(bounds.BoundResult(exact, "lower", "leadingones-exact"))
        results.append(bounds.BoundResult(exact, "upper", "leadingones-exact"))
    elif args.benchmark == "jump":
        if args.k is None:
            raise ValueError("jump bounds require --k")
        init = args.init if args.init in ("random", "arbitrary") else "random"
        jb = formulas.jump_bounds(args.n, args.k, init=init)
        doc.update(
            {
                "k": args.k,
                "init": init,
                "p_k": jb.p_k,
                "skip_bound_arbitrary": jb.skip_bound_arbitrary,
                "skip_bound_random": jb.skip_bound_random,
                "lower_bound": jb.lower_bound,
            }
        )
        results.append(bounds.BoundResult(jb.lower_bound, "lower", f"jump-skip-{init}"))
    else:
        if args.k is None:
            raise ValueError("longpath bounds require --k")
        main_bound = formulas.longpath_lower_bound(args.n, args.k, p)
        reference = formulas.sudholt_reference_bound(args.n, args.k, p)
        doc.update(
            {
                "k": args.k,
                "p": p,
                "lower_bound": main_bound,
                "reference_bound": reference,
                "reference_bound_unproven": True,
                "leave_prob": formulas.longpath_leave_prob(args.n, args.k, p),
                "leave_prob_bound": formulas.longpath_leave_prob_bound(args.n, p),
                "visit_lower": formulas.longpath_visit_lower(p),
            }
        )
        results.append(bounds.BoundResult(main_bound, "lower", "longpath-visit-lower"))

    doc["bounds"] = [_bound_entry(b) for b in results]
    if args.format == "csv":
        lines = ["theorem,kind,value"]
        for b in results:
            lines.append(f"{b.theorem},{b.kind},{repr(b.value)}")
        _write_output("\n".join(lines) + "\n", args.out)
    else:
        _write_output(serialize.dumps(doc), args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    p = resolve_mutation_rate(args.p, args.n)
    use_full_state = args.full_state or args.benchmark == "leadingones"
    if use_full_state:
        benchmark = _benchmark_of(args)
        start = _parse_chain_start(args.init)
        result = chains.full_state_expected_time(benchmark, p, start=start)
        if args.benchmark == "leadingones":
            leave = formulas.leadingones_leave_probs(args.n, p)
        else:
            chain = _exact_chain(args, p)
            leave = chains.summarize(chain).leave_probs
        doc = {
            "levels": len(result.visit_probs),
            "p": [float(x) for x in leave],
            "v": [float(x) for x in result.visit_probs],
            "expected_T": result.expected_time,
            "oracle": "full-state",
        }
    else:
        chain = _exact_chain(args, p)
        summary = chains.summarize(chain)
        doc = {
            "levels": chain.m_levels,
            "p": [float(x) for x in summary.leave_probs],
            "v": [float(x) for x in summary.visit_probs],
            "expected_T": summary.expected_time,
            "oracle": "level-chain",
        }
    if args.format == "csv":
        lines = ["level,p,v"]
        for i, v in enumerate(doc["v"]):
            pv = doc["p"][i] if i < len(doc["p"]) else 0.0
            lines.append(f"{i},{repr(float(pv))},{repr(float(v))}")
        lines.append(f"expected_T,{repr(doc['expected_T'])},")
        _write_output("\n".join(lines) + "\n", args.out)
    else:
        _write_output(serialize.dumps(doc), args.out)
    return EXIT_OK


def _experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        benchmark=args.benchmark,
        n=args.n,
        k=args.k,
        mutation_rate=args.p,
        replicates=args.replicates,
        master_seed=args.seed,
        init=args.init,
        max_iterations=args.max_iterations,
        threads=args.threads if args.threads else default_thread_cap(),
    )


def _simulate_doc(args, stats) -> dict:
    return {
        "benchmark": args.benchmark,
        "n": args.n,
        "k": args.k,
        "p": resolve_mutation_rate(args.p, args.n),
        "seed": args.seed,
        "init": args.init,
        **stats.as_dict(),
        "runtimes": [int(t) for t in stats.runtimes],
        "hit_optimum": [bool(h) for h in stats.hits],
    }


def _levels_csv(stats) -> str:
    levels = np.arange(len(stats.visit_freq))
    return serialize.emit_levels_csv(levels, stats.visit_freq, stats.leave_rate, stats.mean_sojourn)


def _cmd_simulate(args) -> int:
    stats = run_experiment(_experiment_config(args))
    if args.format == "csv":
        replicate_text = serialize.emit_replicates_csv(stats.runtimes, stats.hits)
        levels_text = _levels_csv(stats)
        if args.out is None:
            sys.stdout.write(replicate_text + "\n" + levels_text)
        else:
            Path(args.out).write_text(replicate_text, encoding="utf-8")
            Path(args.out).with_suffix(".levels.csv").write_text(levels_text, encoding="utf-8")
    else:
        _write_output(serialize.dumps(_simulate_doc(args, stats)), args.out)
    return EXIT_OK


def _compare_inputs(args, p: float):
    """Bounds, exact oracle value and proven visit lower bounds for compare."""
    bound_list: list[bounds.BoundResult] = []
    exact = None
    visit_lower: dict[int, float] = {}
    if args.benchmark == "leadingones":
        exact = formulas.leadingones_exact(args.n, p)
        bound_list.append(bounds.BoundResult(exact, "upper", "leadingones-exact"))
        bound_list.append(bounds.BoundResult(exact, "lower", "leadingones-exact"))
        visit_lower = {i: 0.5 for i in range(args.n)}
        if args.init != "random":
            visit_lower = {}
    elif args.benchmark == "onemax":
        chain = _exact_chain(args, p)
        summary = chains.summarize(chain)
        exact = summary.expected_time
        bound_list.append(bounds.BoundResult(float(np.sum(1.0 / summary.leave_probs)), "upper", "flm-upper-classic"))
        bound_list.append(bounds.flm_lower_visit(summary.leave_probs, summary.visit_probs[:-1]))
        visit_lower = {i: float(v) for i, v in enumerate(summary.visit_probs[:-1])}
    elif args.benchmark == "jump":
        chain = _exact_chain(args, p)
        summary = chains.summarize(chain)
        exact = summary.expected_time
        init = "random" if args.init == "random" else "arbitrary"
        if abs(p - 1.0 / args.n) < 1e-15:  # explicit jump bounds are stated for rate 1/n
            jb = formulas.jump_bounds(args.n, args.k, init=init)
            bound_list.append(bounds.BoundResult(jb.lower_bound, "lower", f"jump-skip-{init}"))
            skip = jb.skip_bound_random if init == "random" else jb.skip_bound_arbitrary
            visit_lower[args.k] = 1.0 - float(skip)  # canonical non-gap level
    else:
        chain = _exact_chain(args, p)
        exact = chains.summarize(chain).expected_time
        bound_list.append(
            bounds.BoundResult(formulas.longpath_lower_bound(args.n, args.k, p), "lower", "longpath-visit-lower")
        )
        v_low = formulas.longpath_visit_lower(p)
        visit_lower = {i: v_low for i in range(1, chain.m_levels - 1)}
    return bound_list, exact, visit_lower


def _cmd_compare(args) -> int:
    p = resolve_mutation_rate(args.p, args.n)
    stats = run_experiment(_experiment_config(args))
    bound_list, exact, visit_lower = _compare_inputs(args, p)
    report = compare_report(stats, bound_list, exact=exact, visit_lower=visit_lower)
    if args.format == "csv":
        _write_output(report.to_csv(), args.out)
    else:
        doc = {
            "benchmark": args.benchmark,
            "n": args.n,
            "k": args.k,
            "p": p,
            "seed": args.seed,
            "statistics": stats.as_dict(),
            "bounds": [_bound_entry(b) for b in bound_list],
            "exact": exact,
            "report": report.as_dict(),
        }
        _write_output(serialize.dumps(doc), args.out)
    return EXIT_FAIL_VERDICT if report.failed else EXIT_OK


def _cmd_path_check(args) -> int:
    path = benchmarks.build_long_k_path(args.n, args.k)
    benchmarks.verify_long_k_path(path)
    dump = "\n".join("".join(str(int(b)) for b in pt) for pt in path.points) + "\n"
    if args.out is None:
        sys.stdout.write(dump)
    else:
        Path(args.out).write_text(dump, encoding="utf-8")
    sys.stdout.write(f"points={len(path)}\n")
    return EXIT_OK


_HANDLERS = {
    "bounds": _cmd_bounds,
    "oracle": _cmd_oracle,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "path-check": _cmd_path_check,
}


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with status 2
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    missing = _missing_required(args)
    if missing:
        print(f"usage error: missing {', '.join(missing)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
