"""Multi-step prediction-error criteria.

``empirical_q`` averages squared 1..m-step-ahead prediction errors of an
AR(p) model over an observed series; ``population_q`` is its expectation
under a known stationary truth.  Series are treated as mean-zero: nothing
here ever centers the data.
"""

import numpy as np

from .companion import companion_matrix
from .errors import InsufficientLags, NonStationary, TooShort

__all__ = ["empirical_q", "empirical_q_gradient", "population_q", "lag_matrix"]


def lag_matrix(y, p):
    """Rows (y_t, y_{t-1}, ..., y_{t-p+1}) for t = p..n-1 (0-based t = p-1..n-2).

    Shape (n - p, p).  Row i predicts y at index p + i (+ horizon - 1).
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    return np.column_stack([y[p - 1 - j: n - 1 - j] for j in range(p)])


def _check_length(n, p, m):
    # Shortest horizon-m sum needs n - m - p + 1 >= 1 (for p = 0: n - m + 1).
    min_n = m + p if p >= 1 else m
    if n < max(min_n, 2):
        raise TooShort(
            f"series of length {n} too short for p={p}, m={m} (need n >= {min_n})",
            min_n=max(min_n, 2),
        )


def _companion_powers(phi, m):
    """List of companion powers C^0..C^m."""
    C = companion_matrix(phi)
    powers = [np.eye(phi.shape[0])]
    for _ in range(m):
        powers.append(powers[-1] @ C)
    return powers


def _q_impl(y, X, phi, m, want_grad):
    """Single pass over horizons 1..m computing the criterion and, when
    requested, its exact gradient in phi (shares the companion powers and
    residuals between the two)."""
    n = y.shape[0]
    p = phi.shape[0]
    powers = _companion_powers(phi, m)
    c00 = np.array([P[0, 0] for P in powers])
    total = 0.0
    grad = np.zeros(p) if want_grad else None
    for k in range(1, m + 1):
        rows = n - k - p + 1
        alpha = powers[k][0]
        resid = y[p + k - 1:] - X[:rows] @ alpha
        total += float(resid @ resid) / rows
        if want_grad:
            D = np.zeros((p, p))
            for i in range(k):
                D += c00[i] * powers[k - 1 - i]
            grad += (-2.0 / rows) * (D @ (X[:rows].T @ resid))
    if want_grad:
        return total / m, grad / m
    return total / m, None


def empirical_q(series, model, m):
    """Average squared up-to-m-step-ahead prediction error of ``model``.

    (1/m) sum_{k=1..m} [1/(n-k-p+1)] sum_t (y_{t+k} - alpha_k' y_{t,p})^2,
    with alpha_k the model-implied k-step predictor.  For p = 0 the
    predictor is zero and the k-sum runs over n - k + 1 terms.
    """
    y = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("series must be finite")
    n = y.shape[0]
    p = model.order
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_length(n, p, m)
    if p == 0:
        total = 0.0
        for k in range(1, m + 1):
            total += float(y[k - 1:] @ y[k - 1:]) / (n - k + 1)
        return total / m
    return _q_impl(y, lag_matrix(y, p), model.phi, m, want_grad=False)[0]


def empirical_q_gradient(series, model, m):
    """Exact gradient of :func:`empirical_q` with respect to phi.

    alpha_k is the first row of C(phi)^k; its Jacobian follows from the
    product rule over the k companion factors:
    d(alpha_k)/d(phi_j) = sum_{i=0..k-1} (C^i)_[0,0] * (C^{k-1-i})_[j-1, :].
    """
    y = np.asarray(series, dtype=float)
    n = y.shape[0]
    p = model.order
    if p < 1:
        raise ValueError("gradient requires p >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_length(n, p, m)
    return _q_impl(y, lag_matrix(y, p), model.phi, m, want_grad=True)[1]


def population_q(truth, model, p, m):
    """Expected up-to-m-step squared prediction error under a known truth.

    (1/m) sum_{k=1..m} [gamma(0) - 2 alpha_k' gamma_{k,p} + alpha_k' Gamma_p alpha_k]
    with all autocovariances taken from ``truth`` and alpha_k the
    model-implied predictors.  Requires ``truth.max_lag >= p + m - 1``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if p != model.order:
        raise ValueError(f"p={p} does not match model order {model.order}")
    g = truth.gamma
    if p == 0:
        return float(g[0])
    if truth.max_lag < p + m - 1:
        raise InsufficientLags(
            f"need gamma up to lag {p + m - 1}, have {truth.max_lag}"
        )
    if not model.is_stationary:
        raise NonStationary("AR coefficients are not stationary")
    from scipy.linalg import toeplitz

    Gamma = toeplitz(g[:p])
    powers = _companion_powers(model.phi, m)
    total = 0.0
    for k in range(1, m + 1):
        alpha = powers[k][0]
        gk = g[k: k + p]
        total += float(g[0] - 2.0 * alpha @ gk + alpha @ Gamma @ alpha)
    return total / m
