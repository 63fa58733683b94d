"""Scoring against ground truth and the multi-trial benchmark runner."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, asdict

import numpy as np

from .discovery import CausalGraph, RcdConfig, alpha_sweep, run_rcd
from .errors import ValidationError
from .simulate import SimConfig, generate_model, ground_truth_graph, sample_data
from .util import parallel_map

__all__ = [
    "EdgeMetrics",
    "TrialMetrics",
    "BenchmarkResult",
    "score_graph",
    "run_benchmark",
    "summarize_trials",
    "random_orientation_baseline",
    "write_report_csv",
    "write_summary_json",
]


@dataclass(frozen=True)
class EdgeMetrics:
    true_positive: int
    num_estimated: int
    num_true: int
    precision: float
    recall: float
    f_measure: float

    @classmethod
    def from_counts(cls, tp: int, num_estimated: int, num_true: int) -> "EdgeMetrics":
        precision = tp / num_estimated if num_estimated else 0.0
        recall = tp / num_true if num_true else 0.0
        f = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(true_positive=tp, num_estimated=num_estimated, num_true=num_true,
                   precision=precision, recall=recall, f_measure=f)


@dataclass(frozen=True)
class TrialMetrics:
    trial: int
    seed: int
    directed: EdgeMetrics
    bidirected: EdgeMetrics


@dataclass(frozen=True)
class BenchmarkResult:
    trials: list
    summary: dict


def score_graph(estimated: CausalGraph, truth: CausalGraph):
    """Precision/recall/F for directed arrows (position and direction both
    right) and for confounded pairs, scored separately.  Unresolved pairs
    count as no estimate."""
    if estimated.n_vars != truth.n_vars:
        raise ValidationError(
            f"graph sizes differ: {estimated.n_vars} vs {truth.n_vars}")
    est_dir = set(estimated.directed_pairs())
    true_dir = set(truth.directed_pairs())
    est_bi = set(estimated.bidirected_pairs())
    true_bi = set(truth.bidirected_pairs())
    directed = EdgeMetrics.from_counts(
        tp=len(est_dir & true_dir), num_estimated=len(est_dir), num_true=len(true_dir))
    bidirected = EdgeMetrics.from_counts(
        tp=len(est_bi & true_bi), num_estimated=len(est_bi), num_true=len(true_bi))
    return directed, bidirected


def random_orientation_baseline(truth: CausalGraph, seed: int) -> CausalGraph:
    """Degenerate reference estimator: takes the true skeleton (adjacency of
    any kind) and orients every edge uniformly at random; claims no
    confounded pairs."""
    rng = np.random.default_rng(seed)
    d = truth.n_vars
    parents = np.zeros((d, d), dtype=bool)
    adjacency = truth.parents | truth.parents.T | truth.confounded
    for i in range(d):
        for j in range(i + 1, d):
            if adjacency[i, j]:
                if rng.random() < 0.5:
                    parents[i, j] = True
                else:
                    parents[j, i] = True
    return CausalGraph(parents=parents, confounded=np.zeros((d, d), dtype=bool),
                       unresolved=set())


def _run_trial(args) -> TrialMetrics:
    sim_cfg, rcd_cfg, trial = args
    seed = sim_cfg.seed + trial
    trial_cfg = SimConfig(num_observed=sim_cfg.num_observed, num_latent=sim_cfg.num_latent,
                          num_edges=sim_cfg.num_edges,
                          children_per_latent=sim_cfg.children_per_latent,
                          num_samples=sim_cfg.num_samples, seed=seed)
    model = generate_model(trial_cfg)
    data = sample_data(model, trial_cfg.num_samples, seed).center()
    if rcd_cfg.sweep_enabled:
        estimated = alpha_sweep(data, rcd_cfg).graph
    else:
        estimated = run_rcd(data, rcd_cfg)
    directed, bidirected = score_graph(estimated, ground_truth_graph(model))
    return TrialMetrics(trial=trial, seed=seed, directed=directed, bidirected=bidirected)


def summarize_trials(trials) -> dict:
    """Median and quartiles of each metric across trials."""
    out = {}
    for kind in ("directed", "bidirected"):
        out[kind] = {}
        for metric in ("precision", "recall", "f_measure"):
            vals = np.array([getattr(getattr(t, kind), metric) for t in trials])
            out[kind][metric] = {
                "median": float(np.median(vals)),
                "lower_quartile": float(np.percentile(vals, 25)),
                "upper_quartile": float(np.percentile(vals, 75)),
            }
    return out


def run_benchmark(sim_cfg: SimConfig, rcd_cfg: RcdConfig, trials: int) -> BenchmarkResult:
    """Run ``trials`` independent generate/sample/discover/score rounds with
    per-trial seeds ``sim_cfg.seed + trial``; trials may run in parallel."""
    sim_cfg.validate()
    rcd_cfg.validate()
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rows = parallel_map(_run_trial, [(sim_cfg, rcd_cfg, t) for t in range(trials)])
    return BenchmarkResult(trials=rows, summary=summarize_trials(rows))


_CSV_FIELDS = ("true_positive", "num_estimated", "num_true",
               "precision", "recall", "f_measure")


def write_report_csv(result: BenchmarkResult, path) -> None:
    """One row per trial with both metric families."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["trial", "seed"]
        for kind in ("directed", "bidirected"):
            header += [f"{kind}_{f}" for f in _CSV_FIELDS]
        writer.writerow(header)
        for t in result.trials:
            row = [t.trial, t.seed]
            for kind in ("directed", "bidirected"):
                m = getattr(t, kind)
                row += [m.true_positive, m.num_estimated, m.num_true,
                        repr(m.precision), repr(m.recall), repr(m.f_measure)]
            writer.writerow(row)


def write_summary_json(result: BenchmarkResult, path, config: dict | None = None) -> None:
    doc = {"trials": len(result.trials), "metrics": result.summary, "config": config}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
