"""Residual-producing regressions.

``ols_residuals`` removes already-identified common-cause effects by least
squares.  ``mlhsicr_residuals`` fits the coefficients that minimize the sum
of the HSIC dependencies between each explanatory variable and the
regression residual, which is robust to coefficient bias when explanatory
variables are correlated through a shared hidden source.  Both demean
internally, so the fitted relation carries no explicit intercept term and
residuals are mean-zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, ValidationError
from .stats import CenteredKernel

__all__ = ["RegressionFit", "ols_residuals", "mlhsicr_residuals"]

# optimizer constants
_GRAD_TOL = 1e-6
_REL_OBJ_TOL = 1e-10
_MAX_ITER = 200
_MEMORY = 10
_ARMIJO_C1 = 1e-4
_BACKTRACK = 0.5
_MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    converged: bool = True
    objective: float = 0.0
    n_iterations: int = 0


def _design(response, explanatory):
    y = np.asarray(response, dtype=np.float64).reshape(-1)
    cols = [np.asarray(c, dtype=np.float64).reshape(-1) for c in explanatory]
    for c in cols:
        if c.size != y.size:
            raise ValidationError(
                f"explanatory length {c.size} does not match response length {y.size}")
    if not np.all(np.isfinite(y)) or any(not np.all(np.isfinite(c)) for c in cols):
        raise ValidationError("non-finite entries in regression input")
    yc = y - y.mean()
    xc = (np.column_stack(cols) if cols else np.empty((y.size, 0)))
    if xc.shape[1]:
        xc = xc - xc.mean(axis=0)
    return yc, xc


def ols_residuals(response, explanatory) -> RegressionFit:
    """Least-squares fit of ``response`` on ``explanatory`` columns.

    Rank-deficient designs are solved in the minimum-norm sense.  An empty
    explanatory list returns the mean-centered response unchanged.
    """
    yc, xc = _design(response, explanatory)
    k = xc.shape[1]
    if k >= yc.size:
        raise ValidationError(f"{k} explanatory columns for {yc.size} samples")
    if k == 0:
        return RegressionFit(coefficients=np.empty(0), residuals=yc)
    coef, *_ = np.linalg.lstsq(xc, yc, rcond=None)
    return RegressionFit(coefficients=coef, residuals=yc - xc @ coef)


def _residual_kernel(resid, inv_two_sigma2):
    d = resid[:, None] - resid[None, :]
    np.square(d, out=d)
    d *= -inv_two_sigma2
    np.exp(d, out=d)
    return d


def mlhsicr_residuals(response, explanatory, *, explanatory_kernels=None) -> RegressionFit:
    """Multilinear HSIC regression, initialized at the OLS solution.

    Minimizes the summed HSIC between each explanatory column and the
    residual via limited-memory quasi-Newton steps with a backtracking
    (sufficient-decrease) line search.  Kernel bandwidths are frozen at the
    initial point, keeping the objective smooth and deterministic.  When the
    optimizer stalls before the gradient tolerance is met, the best iterate
    found is returned with ``converged=False``.

    ``explanatory_kernels`` optionally supplies precomputed
    :class:`~rcd.stats.CenteredKernel` objects for the explanatory columns.
    """
    yc, xc = _design(response, explanatory)
    n, k = xc.shape
    if k == 0:
        raise ValidationError("need at least one explanatory variable")
    if k >= n:
        raise ValidationError(f"{k} explanatory columns for {n} samples")
    for idx in range(k):
        if np.ptp(xc[:, idx]) == 0.0:
            raise DegenerateInput(f"explanatory column {idx} has zero variance")

    init = ols_residuals(yc, [xc[:, i] for i in range(k)])
    lam0 = init.coefficients
    r0 = init.residuals

    # residual with no usable variation: HSIC objective is already at its
    # global minimum of zero, nothing to optimize
    d0 = np.abs(r0[:, None] - r0[None, :])
    pos = d0[d0 > 0.0]
    if pos.size == 0:
        return RegressionFit(coefficients=lam0, residuals=r0, converged=True,
                             objective=0.0, n_iterations=0)
    sigma_r = float(np.median(pos))
    inv_two_sigma2 = 1.0 / (2.0 * sigma_r * sigma_r)

    if explanatory_kernels is None:
        explanatory_kernels = [CenteredKernel.from_vector(xc[:, i]) for i in range(k)]
    kc_sum = np.zeros((n, n))
    for kern in explanatory_kernels:
        kc_sum += kern.kc
    inv_n2 = 1.0 / (n * n)

    def objective_grad(lam):
        r = yc - xc @ lam
        l_r = _residual_kernel(r, inv_two_sigma2)
        obj = float(np.einsum("ij,ij->", kc_sum, l_r)) * inv_n2
        w = kc_sum * l_r
        w *= 2.0 * inv_two_sigma2  # = 1/sigma^2
        row = w.sum(axis=1)
        grad = (2.0 * inv_n2) * (xc.T @ (row * r - w @ r))
        return obj, grad

    lam = lam0.copy()
    obj, grad = objective_grad(lam)
    best_lam, best_obj = lam.copy(), obj

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    converged = False
    it = 0
    while it < _MAX_ITER:
        if np.max(np.abs(grad)) < _GRAD_TOL:
            converged = True
            break
        # two-loop recursion
        q = grad.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if s_hist:
            gamma = (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
            q *= gamma
        for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        direction = -q
        slope = grad @ direction
        if slope >= 0.0:  # not a descent direction; restart from steepest descent
            direction = -grad
            slope = -(grad @ grad)
            s_hist.clear(); y_hist.clear(); rho_hist.clear()

        step = 1.0
        new_lam = new_obj = new_grad = None
        for _ in range(_MAX_BACKTRACKS):
            cand = lam + step * direction
            cand_obj, cand_grad = objective_grad(cand)
            if cand_obj <= obj + _ARMIJO_C1 * step * slope:
                new_lam, new_obj, new_grad = cand, cand_obj, cand_grad
                break
            step *= _BACKTRACK
        it += 1
        if new_lam is None:
            break  # objective cannot be decreased along this direction

        s_vec = new_lam - lam
        y_vec = new_grad - grad
        sy = s_vec @ y_vec
        if sy > 1e-12 * np.linalg.norm(s_vec) * np.linalg.norm(y_vec):
            s_hist.append(s_vec)
            y_hist.append(y_vec)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > _MEMORY:
                s_hist.pop(0); y_hist.pop(0); rho_hist.pop(0)

        rel_drop = (obj - new_obj) / max(abs(obj), 1e-300)
        lam, obj, grad = new_lam, new_obj, new_grad
        if obj < best_obj:
            best_lam, best_obj = lam.copy(), obj
        if rel_drop < _REL_OBJ_TOL:
            converged = True
            break
    else:
        converged = False

    if np.max(np.abs(grad)) < _GRAD_TOL:
        converged = True
    return RegressionFit(coefficients=best_lam, residuals=yc - xc @ best_lam,
                         converged=converged, objective=best_obj, n_iterations=it)


def mlhsicr_objective(response, explanatory, coefficients) -> float:
    """Summed-HSIC objective at given coefficients, with bandwidths frozen at
    the OLS point of the same problem (the optimizer's convention)."""
    yc, xc = _design(response, explanatory)
    init = ols_residuals(yc, [xc[:, i] for i in range(xc.shape[1])])
    d0 = np.abs(init.residuals[:, None] - init.residuals[None, :])
    pos = d0[d0 > 0.0]
    if pos.size == 0:
        return 0.0
    sigma_r = float(np.median(pos))
    kc_sum = np.zeros((yc.size, yc.size))
    for i in range(xc.shape[1]):
        kc_sum += CenteredKernel.from_vector(xc[:, i]).kc
    r = yc - xc @ np.asarray(coefficients, dtype=np.float64)
    l_r = _residual_kernel(r, 1.0 / (2.0 * sigma_r * sigma_r))
    return float(np.einsum("ij,ij->", kc_sum, l_r)) / (yc.size ** 2)
