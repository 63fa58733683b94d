"""Three-phase causal discovery with latent-confounder detection.

Phase 1 (:func:`extract_ancestors`) repeatedly tests small variable subsets,
after removing the effects of already-identified common ancestors, and grows
per-variable ancestor sets until a fixed point.  Phase 2
(:func:`find_parents`) keeps the ancestors whose effect is not mediated by
the remaining ones.  Phase 3 (:func:`find_confounders`) pairs up variables
that stay correlated once all identified parents are removed; such pairs
share at least one hidden common cause.

Subset evaluations are memoized on (subset, common-ancestor set): the outer
fixed-point loop revisits subsets whose inputs have not changed, and those
lookups are free and bit-identical.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateInput, UnsupportedSampleSize, ValidationError
from .regression import mlhsicr_residuals, ols_residuals
from .stats import CenteredKernel, hsic_pvalue_kernels, pearson_corr_pvalue, shapiro_wilk_pvalue

__all__ = [
    "RcdConfig",
    "AncestorSets",
    "CausalGraph",
    "SinkCheck",
    "SweepResult",
    "check_sink_candidate",
    "extract_ancestors",
    "find_parents",
    "find_confounders",
    "run_rcd",
    "alpha_sweep",
]

_MIN_SAMPLES = 30
_MAX_SAMPLES = 5000  # normality gate validity cap


@dataclass(frozen=True)
class RcdConfig:
    """Significance levels and search depth for a discovery run.

    ``alpha_corr`` gates linear correlation, ``alpha_indep`` gates HSIC
    independence, ``alpha_shapiro`` gates the non-Gaussianity requirement,
    and ``max_explanatory`` bounds the number of explanatory variables used
    when testing a candidate sink.
    """

    alpha_corr: float = 0.01
    alpha_indep: float = 0.01
    alpha_shapiro: float = 0.01
    max_explanatory: int = 2
    sweep_enabled: bool = False
    sweep_k_max: int = 25

    def validate(self) -> None:
        for name in ("alpha_corr", "alpha_indep", "alpha_shapiro"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValidationError(f"{name} must lie in (0, 1), got {v}")
        if self.max_explanatory < 1:
            raise ValidationError("max_explanatory must be >= 1")
        if self.sweep_k_max < 1:
            raise ValidationError("sweep_k_max must be >= 1")


@dataclass
class AncestorSets:
    """Per-variable sets of identified (direct or indirect) causes."""

    sets: list

    @classmethod
    def empty(cls, num_vars: int) -> "AncestorSets":
        return cls(sets=[set() for _ in range(num_vars)])

    def copy(self) -> "AncestorSets":
        return AncestorSets(sets=[set(s) for s in self.sets])

    def validate(self) -> None:
        d = len(self.sets)
        for i, s in enumerate(self.sets):
            if i in s:
                raise ValidationError(f"variable {i} listed as its own ancestor")
            if any(j < 0 or j >= d for j in s):
                raise ValidationError(f"ancestor index out of range for variable {i}")


@dataclass
class CausalGraph:
    """Discovery output: ``parents[i, j]`` means x_j directly causes x_i;
    ``confounded[i, j]`` means the pair shares at least one latent common
    cause (symmetric); ``unresolved`` holds (i, j) pairs whose evidence was
    mutually contradictory and that carry no entry in either matrix."""

    parents: np.ndarray
    confounded: np.ndarray
    unresolved: set = field(default_factory=set)

    @property
    def n_vars(self) -> int:
        return self.parents.shape[0]

    def directed_pairs(self):
        """Sorted (cause, effect) index pairs."""
        rows, cols = np.nonzero(self.parents)
        return sorted((int(j), int(i)) for i, j in zip(rows, cols))

    def bidirected_pairs(self):
        """Sorted (i, j) pairs with i < j."""
        rows, cols = np.nonzero(self.confounded)
        return sorted({(int(min(i, j)), int(max(i, j))) for i, j in zip(rows, cols)})

    def validate(self) -> None:
        d = self.n_vars
        p, c = self.parents, self.confounded
        if p.shape != (d, d) or c.shape != (d, d):
            raise ValidationError("parent/confounder matrices must be square and equal-sized")
        if p.dtype != bool or c.dtype != bool:
            raise ValidationError("graph matrices must be boolean")
        if np.any(np.diag(p)) or np.any(np.diag(c)):
            raise ValidationError("graph matrices must have zero diagonals")
        if not np.array_equal(c, c.T):
            raise ValidationError("confounder matrix must be symmetric")
        both = (p | p.T) & c
        if np.any(both):
            i, j = np.argwhere(both)[0]
            raise ValidationError(f"pair ({i},{j}) carries both a direction and a confounder")
        for i, j in self.unresolved:
            if not (0 <= i < j < d):
                raise ValidationError(f"unresolved pair ({i},{j}) out of range or unordered")
            if p[i, j] or p[j, i] or c[i, j]:
                raise ValidationError(f"unresolved pair ({i},{j}) also carries an edge")


@dataclass(frozen=True)
class SinkCheck:
    """Outcome of one candidate-sink evaluation with its test evidence."""

    is_sink: bool
    stage: str  # "correlation" | "independence" | "degenerate" | "passed"
    corr_pvalues: dict
    indep_pvalues: dict

    def __bool__(self) -> bool:
        return self.is_sink


@dataclass(frozen=True)
class SweepResult:
    graph: CausalGraph
    k: int
    alpha_indep: float
    bidirected_counts: list


# ---------------------------------------------------------------------------
# input coercion


def _as_matrix(data) -> np.ndarray:
    """Accept a Dataset or a plain (n, d) array; return a centered matrix."""
    values = getattr(data, "values", data)
    centered = bool(getattr(data, "centered", False))
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError(f"expected a 2-d sample matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("sample matrix contains non-finite entries")
    if not centered:
        x = x - x.mean(axis=0)
    return x


def _validate_for_discovery(x: np.ndarray) -> None:
    n, d = x.shape
    if d < 2:
        raise ValidationError(f"discovery needs at least 2 variables, got {d}")
    if n < _MIN_SAMPLES:
        raise ValidationError(f"discovery needs at least {_MIN_SAMPLES} samples, got {n}")
    if n > _MAX_SAMPLES:
        raise ValidationError(
            f"discovery supports at most {_MAX_SAMPLES} samples "
            "(normality screening is not valid beyond that)")


# ---------------------------------------------------------------------------
# per-run work cache


class _WorkCache:
    """Residuals, normality p-values, kernels, and sink verdicts, keyed by
    (variable, common-ancestor set).  Kernels are capped by memory since they
    are cheap to rebuild; everything else is kept for the whole run."""

    def __init__(self, x: np.ndarray):
        self.x = x
        n = x.shape[0]
        self.resids: dict = {}
        self.shapiro: dict = {}
        self.sinks: dict = {}
        self.kernels: OrderedDict = OrderedDict()
        self.kernel_cap = max(4, int(256e6 / (n * n * 8)))

    def resid(self, j: int, hkey: tuple) -> np.ndarray:
        key = (j, hkey)
        out = self.resids.get(key)
        if out is None:
            cols = [self.x[:, k] for k in hkey]
            out = ols_residuals(self.x[:, j], cols).residuals
            self.resids[key] = out
        return out

    def shapiro_p(self, j: int, hkey: tuple) -> float:
        key = (j, hkey)
        p = self.shapiro.get(key)
        if p is None:
            p = shapiro_wilk_pvalue(self.resid(j, hkey)).p_value
            self.shapiro[key] = p
        return p

    def kernel(self, j: int, hkey: tuple) -> CenteredKernel:
        key = (j, hkey)
        k = self.kernels.get(key)
        if k is None:
            k = CenteredKernel.from_vector(self.resid(j, hkey))
            self.kernels[key] = k
            if len(self.kernels) > self.kernel_cap:
                self.kernels.popitem(last=False)
        else:
            self.kernels.move_to_end(key)
        return k


def _candidate_check(cache: _WorkCache, u: tuple, i: int, hkey: tuple,
                     config: RcdConfig) -> SinkCheck:
    """Evaluate whether x_i behaves as the unique effect inside subset u."""
    others = [j for j in u if j != i]
    corr: dict = {}
    indep: dict = {}
    try:
        y_i = cache.resid(i, hkey)
        for j in others:
            corr[j] = pearson_corr_pvalue(y_i, cache.resid(j, hkey)).p_value
        if not all(p < config.alpha_corr for p in corr.values()):
            return SinkCheck(False, "correlation", corr, indep)
        ys = [cache.resid(j, hkey) for j in others]
        if len(others) == 1:
            s = ols_residuals(y_i, ys).residuals
        else:
            kerns = [cache.kernel(j, hkey) for j in others]
            s = mlhsicr_residuals(y_i, ys, explanatory_kernels=kerns).residuals
        ks = CenteredKernel.from_vector(s)
        for j in others:
            indep[j] = hsic_pvalue_kernels(ks, cache.kernel(j, hkey)).p_value
        if not all(p > config.alpha_indep for p in indep.values()):
            return SinkCheck(False, "independence", corr, indep)
        return SinkCheck(True, "passed", corr, indep)
    except DegenerateInput:
        return SinkCheck(False, "degenerate", corr, indep)


def check_sink_candidate(data, u, i: int, ancestors: AncestorSets,
                         config: RcdConfig | None = None) -> SinkCheck:
    """Test whether x_i is the endogenous member of variable subset ``u``
    once the subset's known common ancestors are regressed out.

    The caller is responsible for having verified that no member of ``u`` is
    already a known ancestor of x_i.
    """
    config = config or RcdConfig()
    config.validate()
    x = _as_matrix(data)
    u = tuple(sorted(int(v) for v in u))
    if i not in u:
        raise ValidationError(f"candidate {i} not in subset {u}")
    if len(u) < 2:
        raise ValidationError("subset must contain at least 2 variables")
    if ancestors.sets[i] & set(u):
        raise ValidationError(
            f"subset {u} contains known ancestors of candidate {i}")
    hkey = tuple(sorted(set.intersection(*(ancestors.sets[j] for j in u))))
    cache = _WorkCache(x)
    return _candidate_check(cache, u, i, hkey, config)


# ---------------------------------------------------------------------------
# phase 1: ancestors


def extract_ancestors(data, config: RcdConfig | None = None) -> AncestorSets:
    """Grow per-variable ancestor sets to a fixed point.

    Level ``l`` scans all subsets of size ``l + 1`` in lexicographic order.
    A subset contributes only when every member's residual (on the subset's
    common identified ancestors) is non-Gaussian and exactly one member
    passes the sink test; the level restarts from 1 after any pass that
    changed an ancestor set.
    """
    config = config or RcdConfig()
    config.validate()
    x = _as_matrix(data)
    _validate_for_discovery(x)
    d = x.shape[1]
    m = AncestorSets.empty(d)
    cache = _WorkCache(x)

    level = 1
    while level <= config.max_explanatory:
        changed = False
        if level + 1 <= d:
            for u in itertools.combinations(range(d), level + 1):
                hkey = tuple(sorted(set.intersection(*(m.sets[j] for j in u))))
                try:
                    if not all(cache.shapiro_p(j, hkey) < config.alpha_shapiro for j in u):
                        continue
                except (DegenerateInput, UnsupportedSampleSize):
                    continue
                sinks = []
                for i in u:
                    if m.sets[i] & set(u):
                        continue
                    skey = (u, hkey, i)
                    chk = cache.sinks.get(skey)
                    if chk is None:
                        chk = _candidate_check(cache, u, i, hkey, config)
                        cache.sinks[skey] = chk
                    if chk.is_sink:
                        sinks.append(i)
                if len(sinks) == 1:
                    i = sinks[0]
                    m.sets[i].update(j for j in u if j != i)
                    changed = True
        level = 1 if changed else level + 1
    m.validate()
    return m


# ---------------------------------------------------------------------------
# phase 2: parents


def find_parents(data, ancestors: AncestorSets, config: RcdConfig | None = None):
    """Split ancestors into direct causes and mediated ones.

    Returns ``(parents, unresolved)``: a boolean matrix with
    ``parents[i, j]`` set when x_j is a direct cause of x_i, and the set of
    mutually-ancestral pairs that cannot be oriented.
    """
    config = config or RcdConfig()
    config.validate()
    x = _as_matrix(data)
    d = x.shape[1]
    parents = np.zeros((d, d), dtype=bool)
    unresolved: set = set()
    for i in range(d):
        m_i = ancestors.sets[i]
        for j in sorted(m_i):
            if i in ancestors.sets[j]:
                unresolved.add((min(i, j), max(i, j)))
                continue
            rest = sorted(m_i - {j})
            shared = sorted(m_i & ancestors.sets[j])
            try:
                z_i = ols_residuals(x[:, i], [x[:, k] for k in rest]).residuals
                w_j = ols_residuals(x[:, j], [x[:, k] for k in shared]).residuals
                p = pearson_corr_pvalue(z_i, w_j).p_value
            except DegenerateInput:
                continue
            if p < config.alpha_corr:
                parents[i, j] = True
    return parents, unresolved


# ---------------------------------------------------------------------------
# phase 3: latent confounders


def find_confounders(data, ancestors: AncestorSets, parents: np.ndarray,
                     config: RcdConfig | None = None) -> np.ndarray:
    """Flag variable pairs that stay correlated after their identified
    parents are removed; tested only for pairs with no ancestry either way."""
    config = config or RcdConfig()
    config.validate()
    x = _as_matrix(data)
    d = x.shape[1]
    confounded = np.zeros((d, d), dtype=bool)
    resid = {}

    def parent_resid(i: int) -> np.ndarray:
        out = resid.get(i)
        if out is None:
            cols = [x[:, k] for k in np.nonzero(parents[i])[0]]
            out = ols_residuals(x[:, i], cols).residuals
            resid[i] = out
        return out

    for i in range(d):
        for j in range(i + 1, d):
            if j in ancestors.sets[i] or i in ancestors.sets[j]:
                continue
            try:
                p = pearson_corr_pvalue(parent_resid(i), parent_resid(j)).p_value
            except DegenerateInput:
                continue
            if p < config.alpha_corr:
                confounded[i, j] = confounded[j, i] = True
    return confounded


# ---------------------------------------------------------------------------
# full pipeline


def run_rcd(data, config: RcdConfig | None = None) -> CausalGraph:
    """Run the full three-phase discovery and return the causal graph."""
    config = config or RcdConfig()
    config.validate()
    x = _as_matrix(data)
    _validate_for_discovery(x)
    ancestors = extract_ancestors(x, config)
    parents, unresolved = find_parents(x, ancestors, config)
    confounded = find_confounders(x, ancestors, parents, config)
    graph = CausalGraph(parents=parents, confounded=confounded, unresolved=unresolved)
    graph.validate()
    return graph


def alpha_sweep(data, config: RcdConfig) -> SweepResult:
    """Rerun discovery over a grid of independence levels 0.1^k and keep the
    result with the fewest confounded pairs (smallest k wins ties)."""
    config.validate()
    if not config.sweep_enabled:
        raise ValidationError("alpha_sweep requires sweep_enabled")
    x = _as_matrix(data)
    _validate_for_discovery(x)
    best: SweepResult | None = None
    counts: list = []
    for k in range(1, config.sweep_k_max + 1):
        alpha_k = 0.1 ** k
        graph = run_rcd(x, replace(config, alpha_indep=alpha_k, sweep_enabled=False))
        count = len(graph.bidirected_pairs())
        counts.append(count)
        if best is None or count < len(best.graph.bidirected_pairs()):
            best = SweepResult(graph=graph, k=k, alpha_indep=alpha_k, bidirected_counts=[])
    return SweepResult(graph=best.graph, k=best.k, alpha_indep=best.alpha_indep,
                       bidirected_counts=counts)
