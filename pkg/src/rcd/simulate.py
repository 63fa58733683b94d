"""Synthetic ground-truth models and sampling.

Observed variables follow ``x = B x + Lambda f + e`` with acyclic B.  Latent
sources ``f`` and external effects ``e`` are cubes of centered Gaussians
(variance 0.5 before cubing), a convenient non-Gaussian law with zero mean.
Connection strengths are uniform on [-1.0, -0.5] union [0.5, 1.0].

Structure generation and sampling consume separate, documented random
streams so a dataset is reproducible from (model seed, sample seed) alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataio import Dataset
from .discovery import CausalGraph
from .errors import ValidationError

__all__ = [
    "SimConfig",
    "GroundTruthModel",
    "generate_model",
    "sample_data",
    "ground_truth_graph",
    "write_model_json",
    "model_to_dict",
    "model_from_dict",
    "NOISE_VARIANCE",
]

_RNG_NAME = "numpy PCG64 via SeedSequence(entropy=seed, spawn_key=(stream,))"
_STRUCTURE_STREAM = 0
_SAMPLE_STREAM = 1

# var(Y^3) for Y ~ N(0, 0.5): E[Y^6] = 15 * 0.5^3
NOISE_VARIANCE = 1.875


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))


def _noise(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(0.0, np.sqrt(0.5), size=shape) ** 3


def _weights(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(0.5, 1.0, size=count) * rng.choice([-1.0, 1.0], size=count)


@dataclass(frozen=True)
class SimConfig:
    num_observed: int = 20
    num_latent: int = 4
    num_edges: int = 40
    children_per_latent: int = 2
    num_samples: int = 300
    seed: int = 0

    def validate(self) -> None:
        if self.num_observed < 1:
            raise ValidationError("num_observed must be >= 1")
        if self.num_latent < 0 or self.num_edges < 0:
            raise ValidationError("num_latent and num_edges must be >= 0")
        if self.children_per_latent < 1:
            raise ValidationError("children_per_latent must be >= 1")
        if self.children_per_latent > self.num_observed:
            raise ValidationError("children_per_latent exceeds the number of observed variables")
        if self.num_samples < 1:
            raise ValidationError("num_samples must be >= 1")
        max_edges = self.num_observed * (self.num_observed - 1) // 2
        if self.num_edges > max_edges:
            raise ValidationError(
                f"{self.num_edges} edges infeasible for {self.num_observed} variables "
                f"(max {max_edges})")


@dataclass
class GroundTruthModel:
    """Coefficients of one synthetic data-generating model."""

    b: np.ndarray             # (d, d) observed-to-observed strengths
    lam: np.ndarray           # (d, m) latent loadings
    causal_order: np.ndarray  # generation order of the observed variables
    seed: int

    @property
    def n_observed(self) -> int:
        return self.b.shape[0]

    @property
    def n_latent(self) -> int:
        return self.lam.shape[1]

    def validate(self) -> None:
        d = self.b.shape[0]
        if self.b.shape != (d, d):
            raise ValidationError("b must be square")
        if self.lam.shape[0] != d:
            raise ValidationError("lam row count must match observed count")
        if sorted(self.causal_order.tolist()) != list(range(d)):
            raise ValidationError("causal_order must be a permutation")
        pos = np.empty(d, dtype=int)
        pos[self.causal_order] = np.arange(d)
        for i in range(d):
            for j in range(d):
                if self.b[i, j] != 0.0 and pos[j] >= pos[i]:
                    raise ValidationError("b is not acyclic under causal_order")


def generate_model(cfg: SimConfig) -> GroundTruthModel:
    """Draw a random acyclic model: a uniform causal order, ``num_edges``
    distinct arrows consistent with it, and ``children_per_latent`` distinct
    observed children per latent source."""
    cfg.validate()
    rng = _rng(cfg.seed, _STRUCTURE_STREAM)
    d = cfg.num_observed
    order = rng.permutation(d)
    pos = np.empty(d, dtype=int)
    pos[order] = np.arange(d)

    candidates = [(i, j) for i in range(d) for j in range(d) if pos[j] < pos[i]]
    b = np.zeros((d, d))
    if cfg.num_edges:
        chosen = rng.choice(len(candidates), size=cfg.num_edges, replace=False)
        w = _weights(rng, cfg.num_edges)
        for idx, weight in zip(chosen, w):
            i, j = candidates[idx]
            b[i, j] = weight

    lam = np.zeros((d, cfg.num_latent))
    for k in range(cfg.num_latent):
        children = rng.choice(d, size=cfg.children_per_latent, replace=False)
        lam[children, k] = _weights(rng, cfg.children_per_latent)

    model = GroundTruthModel(b=b, lam=lam, causal_order=order, seed=cfg.seed)
    model.validate()
    return model


def sample_data(model: GroundTruthModel, num_samples: int, seed: int) -> Dataset:
    """Draw raw (uncentered) observations from the model."""
    model.validate()
    if num_samples < 1:
        raise ValidationError("num_samples must be >= 1")
    rng = _rng(seed, _SAMPLE_STREAM)
    d, m = model.n_observed, model.n_latent
    e = _noise(rng, (num_samples, d))
    f = _noise(rng, (num_samples, m)) if m else np.empty((num_samples, 0))
    x = np.zeros((num_samples, d))
    for v in model.causal_order:
        x[:, v] = x @ model.b[v, :] + f @ model.lam[v, :] + e[:, v]
    names = [f"x{i + 1}" for i in range(d)]
    return Dataset(names=names, values=x, centered=False)


def ground_truth_graph(model: GroundTruthModel) -> CausalGraph:
    """Target graph of the model: a pair is confounded when some latent
    loads on both; a direct arrow is kept only for unconfounded pairs."""
    model.validate()
    nz = model.lam != 0.0
    confounded = (nz @ nz.T) & ~np.eye(model.n_observed, dtype=bool)
    parents = (model.b != 0.0) & ~confounded
    graph = CausalGraph(parents=parents, confounded=confounded, unresolved=set())
    graph.validate()
    return graph


def model_to_dict(model: GroundTruthModel) -> dict:
    return {
        "B": model.b.tolist(),
        "Lambda": model.lam.tolist(),
        "causal_order": model.causal_order.tolist(),
        "seed": int(model.seed),
        "rng": _RNG_NAME,
        "noise": "cube of Normal(mean=0, variance=0.5)",
    }


def model_from_dict(doc: dict) -> GroundTruthModel:
    model = GroundTruthModel(
        b=np.asarray(doc["B"], dtype=np.float64),
        lam=np.asarray(doc["Lambda"], dtype=np.float64),
        causal_order=np.asarray(doc["causal_order"], dtype=int),
        seed=int(doc["seed"]),
    )
    model.validate()
    return model


def write_model_json(model: GroundTruthModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")
