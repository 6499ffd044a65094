"""Command-line front end.

Exit codes: 0 success, 2 parse/config errors, 3 assumption failures,
4 empirical-vs-limit comparison failure, 5 runtime errors. stdout carries
machine-readable JSON only; human diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ConvergenceError,
    ExperimentError,
    GspmError,
    GraphonRangeError,
    InvalidKernelError,
    NumericError,
)
from .experiment import (
    MODE_GRAPH,
    MODE_KERNEL_DIAG,
    MODES,
    ExperimentConfig,
    compare,
    histogram_csv,
    run_experiment,
    run_to_csv,
)
from .kernels import (
    GraphonView,
    builtin_kernel,
    is_degenerate,
    read_kernel_file,
    validate_assumptions,
)
from .limits import graph_limit_law, kernel_limit_law, law_moments, sample_limit_law
from .plots import histogram_svg
from .rng import derive_seed
from .sampling import (
    DIAG_INCLUDED,
    DIAG_ZEROED,
    MAGIC,
    build_adjacency_matrix,
    build_kernel_matrix,
    read_matrix_binary,
    read_matrix_csv,
    sample_uniform,
    write_matrix_binary,
    write_matrix_csv,
)
from .spectra import spectrum_json, top_k_eigen

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTIONS = 3
EXIT_COMPARISON = 4
EXIT_RUNTIME = 5


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _load_kernel(args):
    """Resolve --paper/--kernel into (kernel, graphon flag from file)."""
    if getattr(args, "kernel", None):
        return read_kernel_file(args.kernel)
    return builtin_kernel(args.paper), False


def _kernel_options(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--paper", choices=["W1", "W2"], help="bundled kernel")
    group.add_argument("--kernel", metavar="FILE", help="kernel definition JSON")


def cmd_kernel_info(args) -> int:
    kernel, graphon_flag = _load_kernel(args)
    report = validate_assumptions(kernel)
    degenerate = is_degenerate(kernel)
    law, spec = kernel_limit_law(kernel)
    law_mean, law_var = law_moments(law)
    payload = {
        "eigenvalues": list(kernel.eigenvalues()),
        "lambda1": kernel.lambda1,
        "spectral_gap": kernel.spectral_gap,
        "degenerate": degenerate,
        "graphon_declared": bool(graphon_flag),
        "validation": report.to_dict(),
        "limit_law": law.to_dict(),
        "statistic": spec.centering,
        "law_mean": law_mean,
        "law_variance": law_var,
    }
    if not report.range_ok:
        payload["range_warning"] = (
            f"values outside [0,1] on the grid: min {report.range_min:.4f}, "
            f"max {report.range_max:.4f}; graph mode needs --clamp"
        )
        _diag(f"warning: {payload['range_warning']}")
    _emit(payload)
    if not report.passed:
        _diag("assumption checks failed")
        return EXIT_ASSUMPTIONS
    return EXIT_OK


def cmd_validate(args) -> int:
    kernel, graphon_flag = _load_kernel(args)
    target = kernel
    if args.graphon or graphon_flag:
        target = GraphonView(kernel, "clamp" if args.clamp else "strict")
    report = validate_assumptions(target)
    _emit(report.to_dict())
    if not report.passed:
        _diag("assumption checks failed")
        return EXIT_ASSUMPTIONS
    return EXIT_OK


def _read_matrix(path: str):
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_matrix_binary(path)
    return read_matrix_csv(path)


def cmd_spectrum(args) -> int:
    matrix = _read_matrix(args.matrix)
    k = min(args.k, matrix.n)
    pairs = top_k_eigen(matrix, k, tol=args.tol)
    method = "dense" if matrix.n <= 512 else "iterative"
    payload = spectrum_json(pairs, matrix.n, method)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    _emit(payload)
    return EXIT_OK


def cmd_sample(args) -> int:
    kernel, graphon_flag = _load_kernel(args)
    batch = sample_uniform(args.n, args.seed)
    if args.mode == MODE_GRAPH:
        view = GraphonView(kernel, "clamp" if args.clamp else "strict")
        edge_seed = (
            args.edge_seed
            if args.edge_seed is not None
            else derive_seed(args.seed, 0xED6E)
        )
        matrix = build_adjacency_matrix(view, batch, edge_seed)
    else:
        diag = DIAG_INCLUDED if args.mode == MODE_KERNEL_DIAG else DIAG_ZEROED
        matrix = build_kernel_matrix(kernel, batch, diag)
    out = Path(args.out)
    if args.format == "binary":
        write_matrix_binary(matrix, out)
    else:
        write_matrix_csv(matrix, out)
    payload = {
        "path": str(out),
        "format": args.format,
        "n": matrix.n,
        "kind": matrix.kind,
        "diagonal_mode": matrix.diagonal_mode,
        "seed": args.seed,
    }
    if matrix.clip_fraction is not None:
        payload["clip_fraction"] = matrix.clip_fraction
    _emit(payload)
    return EXIT_OK


def cmd_limit(args) -> int:
    kernel, graphon_flag = _load_kernel(args)
    if args.mode == MODE_GRAPH:
        view = GraphonView(kernel, "clamp" if args.clamp else "strict")
        law, spec = graph_limit_law(view)
    else:
        diag = DIAG_INCLUDED if args.mode == MODE_KERNEL_DIAG else DIAG_ZEROED
        law, spec = kernel_limit_law(kernel, diag)
    samples = sample_limit_law(law, args.count, derive_seed(args.seed, 0x11F7))
    mean, variance = law_moments(law)
    payload = {
        "law": law.to_dict(),
        "statistic": spec.centering,
        "law_mean": mean,
        "law_variance": variance,
        "count": int(args.count),
        "seed": args.seed,
        "sample_mean": float(samples.mean()),
        "sample_variance": float(samples.var(ddof=1)) if len(samples) > 1 else 0.0,
    }
    if args.out:
        out = Path(args.out)
        with open(out, "w", encoding="utf-8") as fh:
            for v in samples:
                fh.write(f"{float(v)!r}\n")
        sidecar = out.with_suffix(out.suffix + ".law.json")
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        payload["path"] = str(out)
        payload["sidecar"] = str(sidecar)
    _emit(payload)
    return EXIT_OK


def _experiment_config(args) -> ExperimentConfig:
    base = {}
    if args.config:
        base = ExperimentConfig.from_json_file(args.config).to_dict()
    if args.paper:
        base["kernel"] = args.paper
    if args.kernel:
        base["kernel"] = {"file": args.kernel}
    if args.mode:
        base["mode"] = args.mode
    if args.n is not None:
        base["n"] = args.n
    if args.reps is not None:
        base["replications"] = args.reps
    if args.seed is not None:
        base["master_seed"] = args.seed
    if args.limit_samples is not None:
        base["limit_samples"] = args.limit_samples
    if args.bins is not None:
        base["histogram_bins"] = args.bins
    if args.clamp:
        base["clamp"] = True
    if args.ks_threshold is not None:
        base["ks_threshold"] = args.ks_threshold
    if "kernel" not in base:
        raise InvalidKernelError("no kernel named: pass --config, --paper or --kernel")
    return ExperimentConfig.from_dict(base)


def cmd_experiment(args) -> int:
    config = _experiment_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        run = run_experiment(config, workers=args.workers)
        report = compare(run, run.law, config.master_seed)
    except (ExperimentError, ConvergenceError, NumericError) as exc:
        _diag(f"runtime error: {exc}")
        return EXIT_RUNTIME
    run_to_csv(run, out_dir / "run.csv")
    with open(out_dir / "comparison.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    histogram_csv(report, out_dir / "hist_empirical.csv", "empirical")
    histogram_csv(report, out_dir / "hist_limit.csv", "limit")
    with open(out_dir / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")
    kernel_label = config.kernel_name or Path(config.kernel_file).stem
    histogram_svg(
        report,
        out_dir / "histogram.svg",
        title=f"{kernel_label} {config.mode} n={config.n} R={config.replications}",
    )
    payload = {
        "config": config.to_dict(),
        "ks_distance": report.ks_distance,
        "ks_threshold": report.ks_threshold,
        "empirical_mean": report.empirical_mean,
        "empirical_variance": report.empirical_variance,
        "law_mean": report.law_mean,
        "law_variance": report.law_variance,
        "passed": report.passed,
        "wall_time": run.wall_time,
        "out_dir": str(out_dir),
    }
    _emit(payload)
    if not report.passed:
        _diag(
            f"comparison failed: KS {report.ks_distance:.4f} > "
            f"threshold {report.ks_threshold:.4f}"
        )
        return EXIT_COMPARISON
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspm",
        description="Sample spectral statistics of kernel and graphon matrices "
        "and compare them with their asymptotic laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-info", help="describe a kernel and its limit law")
    _kernel_options(p)
    p.set_defaults(func=cmd_kernel_info)

    p = sub.add_parser("validate", help="run the assumption checks")
    _kernel_options(p)
    p.add_argument("--graphon", action="store_true", help="validate as a graphon")
    p.add_argument("--clamp", action="store_true", help="clamp mode for the graphon")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectrum", help="top eigenvalues of a stored matrix")
    p.add_argument("--matrix", required=True, metavar="FILE")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sample", help="sample one matrix and write it to disk")
    _kernel_options(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-seed", type=int, default=None)
    p.add_argument("--mode", choices=MODES, default="kernel-zeroed")
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--format", choices=["csv", "binary"], default="csv")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("limit", help="sample the asymptotic law")
    _kernel_options(p)
    p.add_argument("--mode", choices=MODES, default="kernel-zeroed")
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("--config", metavar="FILE", help="experiment config JSON")
    _kernel_options(p, required=False)
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--limit-samples", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--clamp", action="store_true")
    p.add_argument("--ks-threshold", type=float, default=None)
    p.add_argument("--out", default="gspm-out", metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, ExperimentError) as exc:
        _diag(f"runtime error: {exc}")
        return EXIT_RUNTIME
    except (GraphonRangeError, InvalidKernelError) as exc:
        _diag(f"invalid input: {exc}")
        return EXIT_CONFIG
    except GspmError as exc:
        _diag(f"error: {exc}")
        return EXIT_CONFIG
    except OSError as exc:
        _diag(f"io error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
