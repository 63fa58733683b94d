"""Command-line interface: discover, simulate, benchmark."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .dataio import emit_graph, ingest_csv, write_dataset_csv
from .discovery import RcdConfig, alpha_sweep, run_rcd
from .errors import RcdError, ValidationError
from .evaluate import run_benchmark, write_report_csv, write_summary_json
from .plots import save_benchmark_figure
from .simulate import SimConfig, generate_model, sample_data, write_model_json

__all__ = ["main", "build_parser"]


def _add_discover_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha-corr", type=float, default=0.01,
                        help="significance level for correlation gates (default 0.01)")
    parser.add_argument("--alpha-indep", type=float, default=0.01,
                        help="significance level for independence gates (default 0.01)")
    parser.add_argument("--alpha-shapiro", type=float, default=0.01,
                        help="significance level for the non-Gaussianity gate (default 0.01)")
    parser.add_argument("--max-explanatory", type=int, default=2,
                        help="maximum explanatory variables per sink test (default 2)")
    parser.add_argument("--sweep", action="store_true",
                        help="sweep the independence level over 0.1^k and keep the "
                             "result with the fewest confounded pairs")
    parser.add_argument("--sweep-k-max", type=int, default=25,
                        help="largest exponent k for the sweep (default 25)")


def _add_simulate_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--vars", type=int, default=20, help="observed variables (default 20)")
    parser.add_argument("--latents", type=int, default=4, help="latent confounders (default 4)")
    parser.add_argument("--edges", type=int, default=40,
                        help="causal arrows between observed variables (default 40)")
    parser.add_argument("--children-per-latent", type=int, default=2,
                        help="observed children per latent confounder (default 2)")
    parser.add_argument("--samples", type=int, default=300,
                        help="observations per dataset (default 300)")
    parser.add_argument("--seed", type=int, required=True, help="base RNG seed")


def _rcd_config(args: argparse.Namespace) -> RcdConfig:
    return RcdConfig(alpha_corr=args.alpha_corr, alpha_indep=args.alpha_indep,
                     alpha_shapiro=args.alpha_shapiro, max_explanatory=args.max_explanatory,
                     sweep_enabled=args.sweep, sweep_k_max=args.sweep_k_max)


def _sim_config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(num_observed=args.vars, num_latent=args.latents, num_edges=args.edges,
                     children_per_latent=args.children_per_latent,
                     num_samples=args.samples, seed=args.seed)


def _config_dict(cfg: RcdConfig) -> dict:
    return {"alpha_corr": cfg.alpha_corr, "alpha_indep": cfg.alpha_indep,
            "alpha_shapiro": cfg.alpha_shapiro, "max_explanatory": cfg.max_explanatory,
            "sweep_enabled": cfg.sweep_enabled, "sweep_k_max": cfg.sweep_k_max}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcd",
        description="Causal discovery for linear non-Gaussian data with latent confounders.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_disc = sub.add_parser("discover", help="infer a causal graph from a CSV dataset")
    p_disc.add_argument("--input", required=True, help="CSV file: header row, numeric rows")
    _add_discover_options(p_disc)
    p_disc.add_argument("--format", choices=("dot", "json"), default="dot",
                        help="output format (default dot)")
    p_disc.add_argument("--output", help="output path (default: stdout)")

    p_sim = sub.add_parser("simulate", help="generate a synthetic dataset with known truth")
    _add_simulate_options(p_sim)
    p_sim.add_argument("--out", required=True, help="CSV path for the samples")
    p_sim.add_argument("--truth", required=True, help="JSON path for the generating model")

    p_bench = sub.add_parser("benchmark",
                             help="simulate, discover, and score over repeated trials")
    _add_simulate_options(p_bench)
    _add_discover_options(p_bench)
    p_bench.add_argument("--trials", type=int, required=True, help="number of trials")
    p_bench.add_argument("--report", required=True, help="CSV path for per-trial metrics")
    p_bench.add_argument("--summary", required=True, help="JSON path for the summary")
    p_bench.add_argument("--figure", default=None,
                         help="PNG path for metric box plots "
                              "(default: report path with .png suffix)")
    p_bench.add_argument("--no-figure", action="store_true", help="skip the figure")
    return parser


def _cmd_discover(args: argparse.Namespace) -> int:
    dataset = ingest_csv(args.input)
    config = _rcd_config(args)
    info = _config_dict(config)
    if config.sweep_enabled:
        sweep = alpha_sweep(dataset, config)
        graph = sweep.graph
        info["sweep_chosen_k"] = sweep.k
        info["sweep_chosen_alpha_indep"] = sweep.alpha_indep
    else:
        graph = run_rcd(dataset, config)
    text = emit_graph(graph, dataset.names, fmt=args.format, config=info)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _sim_config(args)
    model = generate_model(cfg)
    dataset = sample_data(model, cfg.num_samples, cfg.seed)
    write_dataset_csv(dataset, args.out)
    write_model_json(model, args.truth)
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    sim_cfg = _sim_config(args)
    rcd_cfg = _rcd_config(args)
    result = run_benchmark(sim_cfg, rcd_cfg, args.trials)
    write_report_csv(result, args.report)
    config = {"simulation": {"num_observed": sim_cfg.num_observed,
                             "num_latent": sim_cfg.num_latent,
                             "num_edges": sim_cfg.num_edges,
                             "children_per_latent": sim_cfg.children_per_latent,
                             "num_samples": sim_cfg.num_samples,
                             "seed": sim_cfg.seed},
              "discovery": _config_dict(rcd_cfg)}
    write_summary_json(result, args.summary, config=config)
    if not args.no_figure:
        figure = args.figure or str(Path(args.report).with_suffix(".png"))
        save_benchmark_figure(result, figure)
    return 0


_COMMANDS = {"discover": _cmd_discover, "simulate": _cmd_simulate, "benchmark": _cmd_benchmark}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"rcd: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rcd: {exc}", file=sys.stderr)
        return 2
    except (RcdError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"rcd: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
