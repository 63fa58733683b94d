"""Statistical primitives: linear correlation, HSIC independence, normality.

All tests are pure functions of their sample vectors.  The HSIC p-value is
computed from a Pearson type III fit whose mean, variance, and third moment
equal the exact moments of the permutation null distribution of the biased
statistic, evaluated in closed form from the kernel matrices.  The third
moment uses a coefficient table over eight matrix invariants; the table is
verified against full permutation enumeration in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dsyrk
from scipy.special import gammaincc
from scipy.stats import norm as norm_dist
from scipy.stats import shapiro as _scipy_shapiro
from scipy.stats import t as t_dist

from .errors import DegenerateInput, UnsupportedSampleSize, ValidationError

__all__ = [
    "TestResult",
    "CenteredKernel",
    "pearson_corr_pvalue",
    "hsic_statistic",
    "hsic_pvalue",
    "shapiro_wilk_pvalue",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float


def _as_sample(x, name: str, min_len: int = 3) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.size < min_len:
        raise ValidationError(f"{name}: need at least {min_len} samples, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name}: non-finite entries")
    return v


def _check_paired(x, y, min_len: int):
    xv = _as_sample(x, "x", min_len)
    yv = _as_sample(y, "y", min_len)
    if xv.size != yv.size:
        raise ValidationError(f"paired test needs equal lengths, got {xv.size} and {yv.size}")
    return xv, yv


# ---------------------------------------------------------------------------
# Pearson correlation


def pearson_corr_pvalue(x, y) -> TestResult:
    """Sample correlation with its two-sided p-value (t null, n-2 df)."""
    xv, yv = _check_paired(x, y, 3)
    if np.ptp(xv) == 0.0:
        raise DegenerateInput("x has zero variance")
    if np.ptp(yv) == 0.0:
        raise DegenerateInput("y has zero variance")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    denom = np.sqrt((xc @ xc) * (yc @ yc))
    r = float(np.clip((xc @ yc) / denom, -1.0, 1.0))
    df = xv.size - 2
    one_minus_r2 = max(0.0, 1.0 - r * r)
    if one_minus_r2 == 0.0:
        return TestResult(statistic=r, p_value=0.0)
    t_stat = abs(r) * np.sqrt(df / one_minus_r2)
    p = float(2.0 * t_dist.sf(t_stat, df))
    return TestResult(statistic=r, p_value=min(1.0, p))


# ---------------------------------------------------------------------------
# HSIC


class CenteredKernel:
    """Doubly centered Gaussian kernel matrix of one sample vector.

    The bandwidth is the median of the nonzero pairwise absolute
    differences.  Invariants used by the permutation-null moments are
    computed once and cached.
    """

    __slots__ = ("kc", "_inv")

    def __init__(self, kc: np.ndarray):
        self.kc = kc
        self._inv = None

    @classmethod
    def from_vector(cls, x) -> "CenteredKernel":
        v = _as_sample(x, "sample", 2)
        d = np.abs(v[:, None] - v[None, :])
        pos = d[d > 0.0]
        if pos.size == 0:
            raise DegenerateInput("all pairwise distances are zero")
        sigma = float(np.median(pos))
        k = d
        np.square(k, out=k)
        k *= -1.0 / (2.0 * sigma * sigma)
        np.exp(k, out=k)
        row = k.mean(axis=0)
        k -= row[None, :]
        k -= row[:, None]
        k += row.mean()
        return cls(k)

    @property
    def n(self) -> int:
        return self.kc.shape[0]

    def invariants(self) -> np.ndarray:
        """Vector (d3, d1*d2, d1^3, d1*f2, g21, f3, t3, g11) of the matrix."""
        if self._inv is None:
            a = np.ascontiguousarray(np.diag(self.kc))
            d1 = float(a.sum())
            d2 = float(a @ a)
            d3 = float((a * a) @ a)
            f2 = float(np.einsum("ij,ij->", self.kc, self.kc))
            f3 = float(np.einsum("ij,ij,ij->", self.kc, self.kc, self.kc))
            # upper triangle of kc @ kc (symmetric), BLAS syrk halves the work;
            # syrk leaves the strict lower triangle zero, so a full elementwise
            # sum counts each off-diagonal product exactly once
            k2 = dsyrk(1.0, self.kc)
            diag_k2 = np.ascontiguousarray(np.diag(k2))
            t3 = float(2.0 * np.einsum("ij,ij->", k2, self.kc) - diag_k2 @ a)
            g21 = float(a @ diag_k2)
            g11 = float(a @ self.kc @ a)
            self._inv = np.array([d3, d1 * d2, d1 ** 3, d1 * f2, g21, f3, t3, g11])
            # d1, d2, qA needed for mean/variance; stash alongside
            self._inv = np.concatenate([self._inv, [d1, d2, f2 - d2]])
        return self._inv


# Third permutation moment of T = sum_ij A_ij B_{pi(i)pi(j)} for doubly
# centered symmetric A, B:  E[T^3] = (I_A^T C(n) I_B) / (n(n-1)...(n-5)),
# with invariant order (d3, d1d2, d1c, d1f2, g21, f3, t3, g11) and C(n) the
# polynomial matrix below (coefficients highest power first).
_M3_NUM = (
    ((1, 16, 11, -4, 0, 0), (-3, -6, 21, -12, 0), (2, -6, 4, 0), (12, -36, 24, 0),
     (-12, -24, 84, -48, 0), (-4, 8, -20, 16, 0), (16, -48, 32, 0), (-6, 12, -30, 24, 0)),
    ((-3, -6, 21, -12, 0), (3, -12, -6, 27, -36), (-3, 21, -36, 12), (-6, 42, -96, 72),
     (12, -24, 108, -144), (12, -12, 48), (-48, 96), (12, -42, -18, 72)),
    ((2, -6, 4, 0), (-3, 21, -36, 12), (1, -9, 23, -14), (6, -24),
     (-24, 48), (-16,), (8,), (-6, 30, -24)),
    ((12, -36, 24, 0), (-6, 42, -96, 72), (6, -24), (6, -54, 144, -84),
     (-12, 84, -264, 288), (-12, 60, -96), (24, -72), (-24, 120, -144)),
    ((-12, -24, 84, -48, 0), (12, -24, 108, -144), (-24, 48), (-12, 84, -264, 288),
     (12, -12, -96, 432, -576), (24, -72, -48, 192), (-24, 168, -432, 384), (24, -48, -72, 288)),
    ((-4, 8, -20, 16, 0), (12, -12, 48), (-16,), (-12, 60, -96),
     (24, -72, -48, 192), (4, -32, 76, -16, -64), (-24, 120, -128), (24, -24, -96)),
    ((16, -48, 32, 0), (-48, 96), (8,), (24, -72),
     (-24, 168, -432, 384), (-24, 120, -128), (8, -72, 208, -176), (-24, 120, -192)),
    ((-6, 12, -30, 24, 0), (12, -42, -18, 72), (-6, 30, -24), (-24, 120, -144),
     (24, -48, -72, 288), (24, -24, -96), (-24, 120, -192), (6, -48, 126, -36, -144)),
)


def _perm_null_moments(ka: CenteredKernel, kb: CenteredKernel):
    """Exact (mean, variance, third central moment) of the permutation null
    of T = sum_ij Kc_ij Lc_{pi(i)pi(j)}."""
    n = ka.n
    ia = ka.invariants()
    ib = kb.invariants()
    dA, dA2, qA = ia[8], ia[9], ia[10]
    dB, dB2, qB = ib[8], ib[9], ib[10]

    mean = dA * dB / (n - 1)

    e_dd = dA2 * dB2 / n + (dA * dA - dA2) * (dB * dB - dB2) / (n * (n - 1))
    e_do = (2 * dA2 * dB2 / (n * (n - 1))
            + (2 * dA2 - dA * dA) * (2 * dB2 - dB * dB) / (n * (n - 1) * (n - 2)))
    QA, QB = dA2 - qA, dB2 - qB
    RA = dA * dA - 4 * dA2 + 2 * qA
    RB = dB * dB - 4 * dB2 + 2 * qB
    e_oo = (2 * qA * qB / (n * (n - 1))
            + 4 * QA * QB / (n * (n - 1) * (n - 2))
            + RA * RB / (n * (n - 1) * (n - 2) * (n - 3)))
    var = e_dd + 2 * e_do + e_oo - mean * mean

    p6 = 1.0
    for k in range(6):
        p6 *= n - k
    cmat = np.array([[np.polyval(_M3_NUM[i][j], n) for j in range(8)] for i in range(8)])
    raw3 = float(ia[:8] @ cmat @ ib[:8]) / p6
    m3c = raw3 - 3.0 * mean * var - mean ** 3
    return mean, var, m3c


def _hsic_t(ka: CenteredKernel, kb: CenteredKernel) -> float:
    return float(np.einsum("ij,ij->", ka.kc, kb.kc))


def hsic_statistic(x, y) -> float:
    """Biased empirical HSIC with Gaussian kernels, median-heuristic widths."""
    xv, yv = _check_paired(x, y, 10)
    ka = CenteredKernel.from_vector(xv)
    kb = CenteredKernel.from_vector(yv)
    n = xv.size
    return _hsic_t(ka, kb) / (n * n)


def hsic_pvalue_kernels(ka: CenteredKernel, kb: CenteredKernel) -> TestResult:
    """HSIC test on precomputed centered kernels (shared by the pipeline)."""
    n = ka.n
    t_obs = _hsic_t(ka, kb)
    mean, var, m3c = _perm_null_moments(ka, kb)
    stat = t_obs / (n * n)
    if var <= 0.0:
        return TestResult(statistic=stat, p_value=1.0)
    sd = np.sqrt(var)
    skew = m3c / (var * sd)
    if skew <= 1e-12:
        # symmetric or left-skewed null: fall back to a normal tail
        p = float(norm_dist.sf((t_obs - mean) / sd))
    else:
        # Pearson III: gamma with shape 4/skew^2, shifted to match mean/sd
        shape = 4.0 / (skew * skew)
        scale = sd * skew / 2.0
        z = (t_obs - (mean - 2.0 * sd / skew)) / scale
        p = float(gammaincc(shape, z)) if z > 0.0 else 1.0
    return TestResult(statistic=stat, p_value=min(1.0, max(0.0, p)))


def hsic_pvalue(x, y) -> TestResult:
    """HSIC independence test; small p-values indicate dependence."""
    xv, yv = _check_paired(x, y, 10)
    ka = CenteredKernel.from_vector(xv)
    kb = CenteredKernel.from_vector(yv)
    return hsic_pvalue_kernels(ka, kb)


# ---------------------------------------------------------------------------
# Shapiro-Wilk


def shapiro_wilk_pvalue(x) -> TestResult:
    """Shapiro-Wilk normality test (AS R94), valid for 3 <= n <= 5000."""
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.size < 3 or v.size > 5000:
        raise UnsupportedSampleSize(f"Shapiro-Wilk supports 3..5000 samples, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("sample: non-finite entries")
    if np.ptp(v) == 0.0:
        raise DegenerateInput("sample has zero variance")
    res = _scipy_shapiro(v)
    return TestResult(statistic=float(res.statistic),
                      p_value=float(min(1.0, max(0.0, res.pvalue))))
