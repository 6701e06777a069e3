"""Fitting AR(p) models by minimizing the multi-step prediction criterion.

The optimizer works in unconstrained coordinates s -> r = tanh(s) -> phi
(partial autocorrelations to AR coefficients), so every iterate is
stationary by construction.  ``fit_ols`` is the closed-form one-step
conditional-least-squares baseline, which feature matching reproduces at
m = 1; ``fit_ideal`` minimizes the population criterion under a known truth.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .acvf import ArParams, ar_to_pacf, levinson_solve, pacf_to_ar
from .companion import ar_spectral_radius
from .errors import NoConvergence, SingularDesign, TooShort
from .loss import _check_length, _q_impl, empirical_q, lag_matrix, population_q

__all__ = ["FitOptions", "FitResult", "fit_ols", "fit_match", "fit_ideal"]

# Clamp on |r| when mapping into arctanh coordinates.
_R_MAX = 1.0 - 1e-10

# Deterministic jitter patterns for the extra optimizer starts (no RNG so
# repeated fits are bit-identical).
_JITTERS = (0.3, -0.45)


@dataclass(frozen=True)
class FitOptions:
    """Optimizer knobs for :func:`fit_match` and :func:`fit_ideal`."""

    max_iter: int = 500
    grad_tol: float = 1e-8
    step_tol: float = 1e-10
    extra_starts: int = 2


@dataclass(frozen=True)
class FitResult:
    model: ArParams
    q_value: float
    m: int
    order: int
    iterations: int = 0
    restarts: int = 0
    converged: bool = True
    grad_norm: float = 0.0


def fit_ols(series, p):
    """Conditional least squares: regress y_{t+1} on (y_t, ..., y_{t-p+1}).

    The estimate is reported as-is; it is not forced into the stationary
    region (check ``result.is_stationary``).
    """
    y = np.asarray(series, dtype=float)
    n = y.shape[0]
    if n < 2 * p + 1 or n < 2:
        raise TooShort(
            f"series of length {n} too short for OLS at p={p} (need n >= {2 * p + 1})",
            min_n=max(2 * p + 1, 2),
        )
    if p == 0:
        return ArParams(np.zeros(0), float(y @ y) / n)
    X = lag_matrix(y, p)
    target = y[p:]
    G = X.T @ X
    scale = np.trace(G) / p
    if scale <= 0.0 or np.linalg.matrix_rank(G) < p or np.min(np.linalg.eigvalsh(G)) <= 1e-12 * scale:
        raise SingularDesign("lagged design Gram matrix is singular")
    phi = np.linalg.solve(G, X.T @ target)
    resid = target - X @ phi
    return ArParams(phi, float(resid @ resid) / resid.shape[0])


def _project_stationary(phi):
    """Shrink coefficients toward 0 until the spectral radius is < 0.99."""
    phi = np.asarray(phi, dtype=float).copy()
    for _ in range(2000):
        if ar_spectral_radius(phi) < 0.99:
            return phi
        phi *= 0.95
    return np.zeros_like(phi)


def _pacf_to_ar_with_jac(r):
    """Step-up recursion together with the Jacobian d(phi)/d(r)."""
    p = r.shape[0]
    a = np.zeros(0)
    J = np.zeros((0, p))
    for j in range(1, p + 1):
        rj = r[j - 1]
        na = np.empty(j)
        nJ = np.zeros((j, p))
        if j > 1:
            na[: j - 1] = a - rj * a[::-1]
            nJ[: j - 1, :] = J - rj * J[::-1, :]
            nJ[: j - 1, j - 1] = -a[::-1]
        na[j - 1] = rj
        nJ[j - 1, j - 1] = 1.0
        a, J = na, nJ
    return a, J


def _phi_to_s(phi):
    r = ar_to_pacf(_project_stationary(phi))
    return np.arctanh(np.clip(r, -_R_MAX, _R_MAX))


def _minimize_reparam(objective, s0_list, opts):
    """Minimize objective(s) -> (value, grad or None) over the starts.

    Quasi-Newton (BFGS) on the analytic gradient when provided, with a
    Nelder-Mead polish whenever the gradient criterion is not met.
    Returns (best_s, best_q, grad_inf, iterations, converged).
    """
    best = None
    total_iter = 0
    has_grad = objective(s0_list[0])[1] is not None
    for s0 in s0_list:
        def fun(s):
            v, g = objective(s)
            return (v, g) if g is not None else v

        res = minimize(
            fun,
            s0,
            method="BFGS",
            jac=has_grad or None,
            options={"maxiter": opts.max_iter, "gtol": opts.grad_tol},
        )
        total_iter += int(res.nit)
        q, g = objective(res.x)
        ginf = float(np.max(np.abs(g))) if g is not None else float(np.max(np.abs(res.jac)))
        if ginf >= opts.grad_tol * max(1.0, q):
            # Gradient path stalled; polish with Nelder-Mead.
            nm = minimize(
                lambda s: objective(s)[0],
                res.x,
                method="Nelder-Mead",
                options={
                    "maxiter": opts.max_iter,
                    "xatol": opts.step_tol,
                    "fatol": opts.step_tol,
                },
            )
            total_iter += int(nm.nit)
            if nm.fun <= q:
                q2, g2 = objective(nm.x)
                res_x = nm.x
                q = q2
                ginf = float(np.max(np.abs(g2))) if g2 is not None else ginf
            else:
                res_x = res.x
        else:
            res_x = res.x
        if best is None or q < best[1]:
            best = (res_x, q, ginf)
    s, q, ginf = best
    converged = ginf < opts.grad_tol * max(1.0, q)
    return s, q, ginf, total_iter, converged


def fit_match(series, p, m, opts=None):
    """Minimize the up-to-m-step prediction criterion over stationary AR(p).

    Multi-start: the (projected) OLS solution plus deterministic jittered
    copies.  Never raises on a hard instance: if no start converges the
    best point found is returned with ``converged=False``.
    """
    opts = opts or FitOptions()
    y = np.asarray(series, dtype=float)
    n = y.shape[0]
    _check_length(n, p, m)
    if p == 0:
        model = ArParams(np.zeros(0), float(y @ y) / n)
        return FitResult(model, empirical_q(y, model, m), m, 0)

    X = lag_matrix(y, p)
    target = y[p:]

    if m == 1:
        # At m = 1 the criterion is exactly the conditional least-squares
        # quadratic, so a stationary OLS solution is the exact minimizer
        # over the (open) stationary region; skip the iterative solver.
        try:
            ols = fit_ols(y, p)
        except (SingularDesign, TooShort):
            ols = None
        if ols is not None and ar_spectral_radius(ols.phi) < 1.0:
            q, g = _q_impl(y, X, ols.phi, 1, want_grad=True)
            return FitResult(
                ols,
                q,
                1,
                p,
                iterations=0,
                restarts=0,
                converged=True,
                grad_norm=float(np.max(np.abs(g))),
            )

    def objective(s):
        r = np.tanh(s)
        phi, J = _pacf_to_ar_with_jac(r)
        q, g_phi = _q_impl(y, X, phi, m, want_grad=True)
        return q, (J.T @ g_phi) * (1.0 - r * r)

    try:
        phi0 = fit_ols(y, p).phi
    except (SingularDesign, TooShort):
        phi0 = np.zeros(p)
    s0 = _phi_to_s(phi0)
    starts = [s0] + [s0 + j for j in _JITTERS[: opts.extra_starts]]
    s, q, ginf, iters, converged = _minimize_reparam(objective, starts, opts)
    phi = pacf_to_ar(np.tanh(s))
    resid = target - X @ phi
    model = ArParams(phi, float(resid @ resid) / resid.shape[0])
    return FitResult(
        model,
        empirical_q(y, model, m),
        m,
        p,
        iterations=iters,
        restarts=len(starts) - 1,
        converged=converged,
        grad_norm=ginf,
    )


def fit_ideal(truth, p, m, opts=None):
    """Minimize the population criterion under a known truth.

    Returns ``(model, q_star)`` where model.sigma2 is the attained one-step
    population mean squared error.  The gradient is taken by central finite
    differences (the population loss is cheap to evaluate).
    """
    opts = opts or FitOptions()
    if p == 0:
        return ArParams(np.zeros(0), float(truth.gamma[0])), float(truth.gamma[0])
    if truth.max_lag < p + m - 1:
        # Delegate the error message to population_q's check.
        population_q(truth, ArParams(np.zeros(p), 1.0), p, m)

    def value(s):
        phi = pacf_to_ar(np.tanh(s))
        return population_q(truth, ArParams(phi, 1.0), p, m)

    h = 1e-6

    def objective(s):
        v = value(s)
        g = np.empty_like(s)
        for i in range(s.shape[0]):
            e = np.zeros_like(s)
            e[i] = h
            g[i] = (value(s + e) - value(s - e)) / (2.0 * h)
        return v, g

    phi0, _, _ = levinson_solve(truth, p)
    s0 = _phi_to_s(phi0)
    starts = [s0] + [s0 + j for j in _JITTERS[: opts.extra_starts]]
    s, qstar, ginf, _, converged = _minimize_reparam(objective, starts, opts)
    if not converged and ginf >= 1e-6 * max(1.0, qstar):
        raise NoConvergence(
            f"ideal-world fit did not converge (grad inf-norm {ginf:.3e})"
        )
    phi = pacf_to_ar(np.tanh(s))
    model = ArParams(phi, 1.0)
    one_step = population_q(truth, model, p, 1)
    return ArParams(phi, one_step), float(qstar)
