"""Truncated power-series arithmetic.

Coefficient recurrences for log and exp of a Taylor series, used to
extract probability-generating-function coefficients for model kinds
that have no closed-form number distribution.  Both routines are exact
at the working order: the only error source is float rounding, so
coefficient extraction stays stable at orders far beyond what repeated
numerical differentiation could reach.
"""

from __future__ import annotations

import math

import numpy as np


def series_log(b: np.ndarray) -> np.ndarray:
    """Coefficients of ln(B(z)) given coefficients ``b`` of B(z), b[0] > 0.

    Uses the convolution recurrence obtained from A'(z) B(z) = B'(z):
    n*a_n*b_0 = n*b_n - sum_{j=1}^{n-1} j*a_j*b_{n-j}.
    """
    if b[0] <= 0.0:
        raise ValueError("series_log requires a positive constant term")
    n = b.size
    out = np.empty_like(b)
    out[0] = math.log(b[0])
    idx = np.arange(n, dtype=float)
    for k in range(1, n):
        s = np.dot(idx[1:k] * out[1:k], b[k - 1:0:-1])
        out[k] = (b[k] - s / k) / b[0]
    return out


def series_exp(d: np.ndarray) -> np.ndarray:
    """Coefficients of exp(D(z)) given coefficients ``d`` of D(z).

    Uses C'(z) = D'(z) C(z): n*c_n = sum_{j=1}^{n} j*d_j*c_{n-j}.
    """
    n = d.size
    out = np.empty_like(d)
    out[0] = math.exp(d[0])
    idx = np.arange(n, dtype=float)
    weighted = idx * d
    for k in range(1, n):
        out[k] = np.dot(weighted[1:k + 1], out[k - 1::-1][:k]) / k
    return out
