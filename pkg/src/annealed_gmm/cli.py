"""Command-line front end.

Subcommands: ``gen-data`` (dataset CSV + ground-truth JSON), ``fit``
(FitResult JSON), ``benchmark`` (report JSON + table on stdout),
``landscape`` (grid CSV), ``trotter-check`` (slice-count vs error CSV).

Exit codes: 0 success, 1 usage/file/schema error, 2 numerical failure.
``--config FILE`` supplies defaults (see :mod:`annealed_gmm.config`); explicit
flags win.  ``ANNEALED_GMM_JOBS`` sets the default worker count for
``benchmark --jobs``.  A single ``--seed`` derives all sub-streams through
``numpy.random.SeedSequence(seed).spawn`` (trial inits first, fit streams
second), so identical invocations are byte-identical apart from the optional
timestamp field (``--no-timestamp`` drops it).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .config import load_config, section
from .core import Dataset, log_likelihood
from .errors import (
    ConfigError,
    EmptyComponentError,
    EmptyReportError,
    NumericalRangeError,
    SingularCovarianceError,
)
from .estimators import (
    AnnealingSchedule,
    EstimatorConfig,
    default_init_sampler,
    run_fit,
)
from .experiments import ParameterSelector, landscape, run_benchmark
from .presets import default_generator_spec
from .quantum import quantum_weight, trotter_diagonal

# schedule defaults per mode: beta0, gamma0, beta_fixed
_MODE_DEFAULTS = {
    "em": (1.0, 0.0, False),
    "dsaem": (0.7, 0.0, False),
    "dqaem": (1.0, 1.2, True),
}

_NUMERICAL_ERRORS = (
    NumericalRangeError,
    EmptyComponentError,
    EmptyReportError,
    SingularCovarianceError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        config = load_config(args.config) if args.config else None
        return args.handler(args, config)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="annealed-gmm",
                     description="Gaussian mixture estimation with annealed EM")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    gen = sub.add_parser("gen-data", help="sample a synthetic mixture dataset")
    gen.add_argument("--k", type=int, default=None, help="components (default 7)")
    gen.add_argument("--d", type=int, default=None, help="dimension (default 2)")
    gen.add_argument("--n", type=int, default=None, help="sample count (default 700)")
    gen.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    gen.add_argument("-o", "--output", required=True, help="dataset CSV path")
    gen.add_argument("--truth-out", default=None,
                     help="ground-truth JSON path (default: OUTPUT with .truth.json)")
    _common_flags(gen)
    gen.set_defaults(handler=_cmd_gen_data)

    fit = sub.add_parser("fit", help="fit one estimator to a dataset")
    fit.add_argument("-i", "--input", required=True, help="dataset CSV path")
    fit.add_argument("-o", "--output", required=True, help="fit-result JSON path")
    fit.add_argument("--mode", choices=("em", "dsaem", "dqaem"), default=None,
                     help="estimator (default em)")
    fit.add_argument("--k", type=int, default=None,
                     help="components (default: inferred from the label column)")
    _schedule_flags(fit)
    fit.add_argument("--policy", choices=("abort", "reseed"), default=None,
                     help="empty-component policy (default abort)")
    fit.add_argument("--eps-cov", type=float, default=None,
                     help="covariance regularization floor (default 1e-6)")
    fit.add_argument("--seed", type=int, default=None,
                     help="seed for the initialization and fit streams (default 0)")
    _common_flags(fit)
    fit.set_defaults(handler=_cmd_fit)

    bench = sub.add_parser("benchmark",
                           help="success-ratio comparison over shared inits")
    bench.add_argument("-i", "--input", required=True, help="dataset CSV path")
    bench.add_argument("-o", "--output", required=True, help="report JSON path")
    bench.add_argument("--modes", default=None,
                       help="comma list of estimators (default em,dsaem,dqaem)")
    bench.add_argument("--trials", type=int, default=None,
                       help="trials per estimator (default 100)")
    bench.add_argument("--threshold", type=float, default=None,
                       help="success margin in nats (default 1.0)")
    bench.add_argument("--k", type=int, default=None,
                       help="components (default: inferred from the label column)")
    _schedule_flags(bench)
    bench.add_argument("--seed", type=int, default=None, help="top-level seed (default 0)")
    bench.add_argument("--jobs", type=int, default=None,
                       help="parallel workers (default $ANNEALED_GMM_JOBS or 1)")
    _common_flags(bench)
    bench.set_defaults(handler=_cmd_benchmark)

    land = sub.add_parser("landscape",
                          help="negative free energy over a 2-d parameter grid")
    land.add_argument("-i", "--input", required=True, help="dataset CSV path")
    land.add_argument("-o", "--output", required=True, help="grid CSV path")
    land.add_argument("--params", required=True,
                      help="base parameters JSON (e.g. a gen-data truth file)")
    land.add_argument("--axis1", default=None,
                      help="selector kind:component[:index] (default mean:0:0)")
    land.add_argument("--axis2", default=None,
                      help="selector kind:component[:index] (default mean:1:0)")
    land.add_argument("--min1", type=float, default=None, help="axis1 start (default -7)")
    land.add_argument("--max1", type=float, default=None, help="axis1 end (default 9)")
    land.add_argument("--min2", type=float, default=None, help="axis2 start (default -7)")
    land.add_argument("--max2", type=float, default=None, help="axis2 end (default 9)")
    land.add_argument("--steps", type=int, default=None,
                      help="grid points per axis (default 101)")
    land.add_argument("--beta", type=float, default=None, help="beta (default 1.0)")
    land.add_argument("--gamma", type=float, default=None, help="gamma (default 0.0)")
    _common_flags(land)
    land.set_defaults(handler=_cmd_landscape)

    trot = sub.add_parser("trotter-check",
                          help="product-formula error against the exact diagonal")
    trot.add_argument("-o", "--output", required=True, help="table CSV path")
    trot.add_argument("--k", type=int, default=None, help="components (default 3)")
    trot.add_argument("--beta", type=float, default=None, help="beta (default 1.0)")
    trot.add_argument("--gamma", type=float, default=None, help="gamma (default 0.8)")
    trot.add_argument("--seed", type=int, default=None,
                      help="seed for the random energies (default 0)")
    trot.add_argument("--m-values", default=None,
                      help="comma list of slice counts (default 16,64,256,1024)")
    _common_flags(trot)
    trot.set_defaults(handler=_cmd_trotter)

    return parser


def _common_flags(parser) -> None:
    parser.add_argument("--config", default=None, help="run-configuration YAML file")
    parser.add_argument("--timestamp", action=argparse.BooleanOptionalAction,
                        default=True, help="include a timestamp in JSON output")


def _schedule_flags(parser) -> None:
    parser.add_argument("--beta0", type=float, default=None,
                        help="initial beta (default: 1.0 em, 0.7 dsaem, 1.0 dqaem)")
    parser.add_argument("--gamma0", type=float, default=None,
                        help="initial gamma (default: 0 em/dsaem, 1.2 dqaem)")
    parser.add_argument("--tau", type=float, default=None,
                        help="schedule decay constant (default 0.95)")
    parser.add_argument("--beta-fixed", action=argparse.BooleanOptionalAction,
                        default=None, help="pin beta to 1 (default: only for dqaem)")
    parser.add_argument("--max-iters", type=int, default=None,
                        help="iteration cap (default 1000)")
    parser.add_argument("--tol", type=float, default=None,
                        help="relative objective tolerance (default 1e-8)")


def _pick(flag_value, cfg: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in cfg and cfg[key] is not None:
        return cfg[key]
    return default


def _estimator_config(mode: str, args, cfg: dict, seed: int) -> EstimatorConfig:
    beta0_default, gamma0_default, fixed_default = _MODE_DEFAULTS[mode]
    schedule = AnnealingSchedule(
        beta0=float(_pick(args.beta0, cfg, "beta0", beta0_default)),
        gamma0=float(_pick(args.gamma0, cfg, "gamma0", gamma0_default)),
        tau=float(_pick(args.tau, cfg, "tau", 0.95)),
        beta_fixed=bool(_pick(args.beta_fixed, cfg, "beta_fixed", fixed_default)),
    )
    return EstimatorConfig(
        mode=mode,
        schedule=schedule,
        max_iterations=int(_pick(args.max_iters, cfg, "max_iters", 1000)),
        tolerance=float(_pick(args.tol, cfg, "tol", 1e-8)),
        empty_component_policy=_pick(getattr(args, "policy", None), cfg, "policy", "abort"),
        eps_cov=float(_pick(getattr(args, "eps_cov", None), cfg, "eps_cov", 1e-6)),
        seed=seed,
    )


def _infer_components(args, cfg: dict, data: Dataset) -> int:
    k = _pick(args.k, cfg, "k", None)
    if k is not None:
        return int(k)
    if data.labels is not None:
        return int(data.labels.max()) + 1
    raise _UsageError("--k is required when the dataset has no label column")


def _cmd_gen_data(args, config) -> int:
    cfg = section(config, "generator")
    spec = default_generator_spec(
        n_components=int(_pick(args.k, cfg, "k", 7)),
        dim=int(_pick(args.d, cfg, "d", 2)),
        n_samples=int(_pick(args.n, cfg, "n", 700)),
        seed=int(_pick(args.seed, cfg, "seed", 0)),
    )
    from .experiments import generate_dataset

    data = generate_dataset(spec)
    io.write_dataset_csv(args.output, data)
    truth_path = args.truth_out
    if truth_path is None:
        base = args.output[:-4] if args.output.endswith(".csv") else args.output
        truth_path = base + ".truth.json"
    io.write_json(truth_path, io.ground_truth_payload(data.ground_truth),
                  timestamp=args.timestamp)
    return 0


def _cmd_fit(args, config) -> int:
    cfg = section(config, "fit")
    data = io.read_dataset_csv(args.input)
    mode = _pick(args.mode, cfg, "mode", "em")
    if mode not in _MODE_DEFAULTS:
        raise _UsageError(f"unknown mode {mode!r}")
    k = _infer_components(args, cfg, data)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    init_seq, fit_seq = np.random.SeedSequence(seed).spawn(2)
    init = default_init_sampler(data, k, np.random.default_rng(init_seq))
    estimator = _estimator_config(mode, args, cfg,
                                  seed=int(fit_seq.generate_state(1)[0]))
    result = run_fit(data, init, estimator)
    payload = io.fit_result_payload(result, mode)
    payload["final_log_likelihood"] = (
        log_likelihood(data, result.final_params)
        if result.failure_reason is None else None
    )
    io.write_json(args.output, payload, timestamp=args.timestamp)
    if result.failure_reason is not None:
        print(f"fit failed: {result.failure_reason}", file=sys.stderr)
        return 2
    return 0


def _cmd_benchmark(args, config) -> int:
    cfg = section(config, "benchmark")
    data = io.read_dataset_csv(args.input)
    modes = [m.strip() for m in
             str(_pick(args.modes, cfg, "modes", "em,dsaem,dqaem")).split(",")]
    for mode in modes:
        if mode not in _MODE_DEFAULTS:
            raise _UsageError(f"unknown mode {mode!r}")
    k = _infer_components(args, cfg, data)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    jobs = _pick(args.jobs, cfg, "jobs", None)
    if jobs is None:
        jobs = int(os.environ.get("ANNEALED_GMM_JOBS", "1"))
    configs = [_estimator_config(mode, args, cfg, seed=0) for mode in modes]
    report = run_benchmark(
        data,
        configs,
        trials=int(_pick(args.trials, cfg, "trials", 100)),
        success_threshold=float(_pick(args.threshold, cfg, "threshold", 1.0)),
        n_components=k,
        seed=seed,
        n_jobs=int(jobs),
    )
    io.write_json(args.output, io.benchmark_report_payload(report),
                  timestamp=args.timestamp)
    print(io.benchmark_table(report))
    return 0


def _parse_selector(text: str) -> ParameterSelector:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise _UsageError(f"selector must be kind:component[:index], got {text!r}")
    kind = parts[0]
    try:
        component = int(parts[1])
        index = int(parts[2]) if len(parts) == 3 else 0
    except ValueError:
        raise _UsageError(f"selector indices must be integers: {text!r}") from None
    if kind not in ("mean", "covariance"):
        raise _UsageError(f"selector kind must be mean or covariance: {text!r}")
    return ParameterSelector(kind=kind, component=component, index=index)


def _cmd_landscape(args, config) -> int:
    cfg = section(config, "landscape")
    data = io.read_dataset_csv(args.input)
    base = io.params_from_dict(io.read_json(args.params))
    sel1 = _parse_selector(str(_pick(args.axis1, cfg, "axis1", "mean:0:0")))
    sel2 = _parse_selector(str(_pick(args.axis2, cfg, "axis2", "mean:1:0")))
    steps = int(_pick(args.steps, cfg, "steps", 101))
    axis1 = np.linspace(float(_pick(args.min1, cfg, "min1", -7.0)),
                        float(_pick(args.max1, cfg, "max1", 9.0)), steps)
    axis2 = np.linspace(float(_pick(args.min2, cfg, "min2", -7.0)),
                        float(_pick(args.max2, cfg, "max2", 9.0)), steps)
    grid = landscape(
        data, base, (sel1, sel2), (axis1, axis2),
        beta=float(_pick(args.beta, cfg, "beta", 1.0)),
        gamma=float(_pick(args.gamma, cfg, "gamma", 0.0)),
    )
    io.write_landscape_csv(args.output, grid)
    return 0


def _cmd_trotter(args, config) -> int:
    cfg = section(config, "trotter")
    k = int(_pick(args.k, cfg, "k", 3))
    beta = float(_pick(args.beta, cfg, "beta", 1.0))
    gamma = float(_pick(args.gamma, cfg, "gamma", 0.8))
    seed = int(_pick(args.seed, cfg, "seed", 0))
    m_text = str(_pick(args.m_values, cfg, "m_values", "16,64,256,1024"))
    try:
        m_values = [int(m.strip()) for m in m_text.split(",")]
    except ValueError:
        raise _UsageError(f"--m-values must be a comma list of integers: {m_text!r}") from None
    energies = np.random.default_rng(seed).uniform(0.0, 3.0, size=k)
    weight = quantum_weight(energies, beta, gamma)
    exact = np.exp(-beta * weight.shift) * np.diag(weight.matrix)
    rows = []
    for m in m_values:
        approx = trotter_diagonal(energies, beta, gamma, m)
        rows.append((m, float(np.max(np.abs(approx - exact)))))
    io.write_trotter_csv(args.output, rows)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
