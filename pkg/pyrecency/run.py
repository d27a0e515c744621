"""Entry point for the `pyrecency` command"""

import sys
import logging
import pathlib
from argparse import ArgumentParser, Namespace
from typing import Callable, Dict, List, Optional

import numpy as np

from pyrecency.bench import bench
from pyrecency.chain import ChainRun, expected_lag_counts, run_chain_replicas
from pyrecency.config import DEFAULTS, RunConfig
from pyrecency.errors import PyrecencyError
from pyrecency.filtering import run_filter
from pyrecency.kitchensink import HIGHLIGHTS, diagnostic, render
from pyrecency.metrics import REPORT_COLUMNS, evaluate
from pyrecency.mixing import UNBOUNDED, DecaySpec, mixing_weights
from pyrecency.models import ObservationRecord, generate, parse_generator
from pyrecency.oracle import oracle_vs_chain_distance
from pyrecency.streams import comment_header, ingest, write_json, write_records, write_table

LOGGER = logging.getLogger(__name__)

TRACE_COLUMNS = ["t", "mean", "std", "ess", "log_marginal_increment"]
BENCH_GENERATOR = "drift:0.1"


def _header(config: RunConfig, fmt: str) -> List[str]:
    return comment_header(config.command, fmt, config.to_dict())


def cli_weights(config: RunConfig) -> None:
    """Mixing coefficient per beta and lag (closed form, or normalized over --horizon)"""
    rows = []
    for beta in config.betas:
        if config.horizon is None:
            spec = DecaySpec(beta, theta0=config.theta0, horizon=UNBOUNDED)
            weights = mixing_weights(spec, length=config.max_lag)
        else:
            weights = mixing_weights(DecaySpec(beta, theta0=config.theta0, horizon=config.horizon))
        rows.extend((beta, lag, theta) for lag, theta in enumerate(weights, start=1))
    write_table(config.output_path, _header(config, "weights"), ["beta", "lag", "theta"], rows)


def cli_chain(config: RunConfig) -> None:
    """Lag composition after every step per beta, averaged over --runs replicas"""
    columns = ["beta", "t", "lag", "count", "expected_count"]
    columns += ["stderr"] if config.runs > 1 else []

    rows = []
    for beta in config.betas:
        runs = run_chain_replicas(
            config.particles,
            config.prior_distribution(),
            config.transition_kernel(),
            beta,
            config.steps,
            config.seed,
            runs=config.runs,
            jobs=config.jobs,
        )
        rows.extend(_composition_rows(config, beta, runs))
    write_table(config.output_path, _header(config, "chain"), columns, rows)


def _composition_rows(config: RunConfig, beta: float, runs: List[ChainRun]) -> List[tuple]:
    rows = []
    for step in range(1, config.steps + 1):
        lags = min(step + 1, config.max_lag)
        observed = np.array([run.compositions[step - 1].as_array(lags) for run in runs])
        expected = expected_lag_counts(config.particles, beta, step, lags)
        for lag in range(1, lags + 1):
            counts = observed[:, lag - 1]
            if config.runs > 1:
                stderr = float(counts.std(ddof=1) / np.sqrt(config.runs))
                mean = float(counts.mean())
                rows.append((beta, step, lag, mean, float(expected[lag - 1]), stderr))
            else:
                rows.append((beta, step, lag, int(counts[0]), float(expected[lag - 1])))
    return rows


def _observations(config: RunConfig) -> List[ObservationRecord]:
    config.check_single_source()
    if config.input_path is not None:
        return ingest(config.input_path)
    return generate(config.generator_spec())


def cli_filter(config: RunConfig) -> None:
    """Posterior summary per observation; abs_error when the records carry truth"""
    records = _observations(config)
    trace = run_filter(config.filter_config(), records)

    with_truth = any(record.truth is not None for record in records)
    columns = TRACE_COLUMNS + (["abs_error"] if with_truth else [])
    rows = []
    for summary in trace:
        row = [
            summary.t,
            float(summary.mean[0]),
            float(summary.std[0]),
            summary.ess,
            summary.log_marginal_increment,
        ]
        rows.append(row + ([summary.abs_error] if with_truth else []))
    write_table(config.output_path, _header(config, "trace"), columns, rows)

    if config.report is not None:
        report = evaluate(trace, records)
        report_path = pathlib.Path(config.report)
        if report_path.suffix.lower() == ".csv":
            write_table(report_path, _header(config, "report"), REPORT_COLUMNS, report.csv_rows())
        else:
            write_json(report_path, _header(config, "report"), report.to_dict())


def cli_compare_oracle(config: RunConfig) -> None:
    """Per-step W1 distance between the sampler and the explicit mixture"""
    trace = oracle_vs_chain_distance(
        config.steps,
        config.particles,
        config.single_beta,
        config.transition_kernel(),
        config.prior_distribution(),
        config.seed,
    )
    rows = zip(trace.steps, trace.distances, trace.baselines)
    columns = ["t", "distance", "baseline"]
    write_table(config.output_path, _header(config, "distance"), columns, rows)


def cli_bench(config: RunConfig) -> None:
    """Per-step latency in an early and a late window, ensemble and oracle memory"""
    if config.input is None and config.generator is None:
        records = generate(
            parse_generator(BENCH_GENERATOR, config.steps, config.seed, config.obs_std)
        )
    else:
        records = _observations(config)
    report = bench(config.filter_config(), records)
    write_json(config.output_path, _header(config, "bench"), report.to_dict())


def cli_generate(config: RunConfig) -> None:
    """Synthetic observation records as JSONL"""
    records = generate(config.generator_spec())
    write_records(config.output_path, _header(config, "records"), records)


COMMANDS: Dict[str, Callable[[RunConfig], None]] = {
    "weights": cli_weights,
    "chain": cli_chain,
    "filter": cli_filter,
    "compare-oracle": cli_compare_oracle,
    "bench": cli_bench,
    "generate": cli_generate,
}

FLAG_KEYS = tuple(DEFAULTS)


def _parser() -> ArgumentParser:
    parser = ArgumentParser(prog="pyrecency", description="Recency-weighted Markov inference")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=pathlib.Path, default=None)
    parser.add_argument("--beta", type=float, action="append", default=None)
    parser.add_argument("--particles", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--steps", type=int, default=None)
    parser.add_argument("--noise-std", type=float, default=None)
    parser.add_argument("--obs-std", type=float, default=None)
    parser.add_argument("--kernel", default=None)
    parser.add_argument("--model", default=None)
    parser.add_argument("--prior", default=None)
    parser.add_argument("--generator", default=None)
    parser.add_argument("--input", default=None)
    parser.add_argument("--output", default=None)
    parser.add_argument("--report", default=None)
    parser.add_argument("--runs", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--max-lag", type=int, default=None)
    parser.add_argument("--resampling", default=None)
    parser.add_argument("--horizon", type=int, default=None)
    parser.add_argument("--theta0", type=float, default=None)

    parser.add_argument("--highlight-names", dest="highlight", choices=HIGHLIGHTS, default="color")
    parser.add_argument("--debug", action="store_true", default=False)
    return parser


def _flags(args: Namespace) -> Dict:
    return {key: getattr(args, key) for key in FLAG_KEYS}


def main(argv: Optional[List[str]] = None) -> None:
    """Entry point for the `pyrecency` command"""
    args = _parser().parse_args(argv)

    if args.debug:
        logging.basicConfig(
            format="%(levelname)s:%(name)s:%(funcName)s: %(message)s", level=logging.DEBUG
        )

    LOGGER.debug("pyrecency: command %s", args.command)
    try:
        config = RunConfig.from_sources(args.command, _flags(args), args.config)
        COMMANDS[args.command](config)
    except PyrecencyError as error:
        print(render(diagnostic(error, args.command), args.highlight), file=sys.stderr)
        sys.exit(error.exit_code)


if __name__ == "__main__":
    main()
