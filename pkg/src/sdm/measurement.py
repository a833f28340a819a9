"""Distances, exponential likelihoods and forecast rules.

Three causality structures are supported:

* ``uni``: x leads y. One column of beliefs, ``d[i] = (y_t - x_{t-i})**2``.
* ``bidirectional``: column 0 is x leading y, column 1 is y leading x.
* ``posneg``: x leads y with either sign; column 0 compares ``y_t`` with
  ``+x_{t-i}``, column 1 with ``-x_{t-i}``.

A lag window holds the ``n`` most recent values of a series *before* the
current time, ordered so that position ``k`` is the value at lag ``k + 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .belief import FLOOR, update
from .errors import ConfigurationError, DataError

VARIANTS = ("uni", "bidirectional", "posneg")


def lag_window(series, t: int, n_states: int) -> np.ndarray:
    """Values ``series[t-1], series[t-2], ..., series[t-n_states]``."""
    if t < n_states:
        raise DataError(f"lag window of {n_states} needs t >= {n_states}, got t={t}")
    series = np.asarray(series, dtype=float)
    return series[t - n_states:t][::-1].copy()


def distances_uni(window, y_now: float) -> np.ndarray:
    window = np.asarray(window, dtype=float)
    return (y_now - window) ** 2


def distances_bidirectional(x_window, y_window, x_now: float, y_now: float) -> np.ndarray:
    """Column 0: ``(y_t - x_{t-i})**2``; column 1: ``(x_t - y_{t-i})**2``."""
    x_window = np.asarray(x_window, dtype=float)
    y_window = np.asarray(y_window, dtype=float)
    if x_window.shape != y_window.shape:
        raise ConfigurationError("x and y windows must have equal length")
    return np.column_stack([distances_uni(x_window, y_now), distances_uni(y_window, x_now)])


def distances_posneg(window, y_now: float) -> np.ndarray:
    """Column 0: ``(y_t - x_{t-i})**2``; column 1: ``(y_t + x_{t-i})**2``."""
    window = np.asarray(window, dtype=float)
    return np.column_stack([(y_now - window) ** 2, (y_now + window) ** 2])


def _check_rate(lam):
    if not lam > 0 or not math.isfinite(lam):
        raise ConfigurationError(f"rate must be positive and finite, got {lam}")


def likelihood(distance, lam: float):
    """Exponential density ``lam * exp(-lam * distance)``."""
    _check_rate(lam)
    return lam * np.exp(-lam * np.asarray(distance, dtype=float))


def log_likelihood(distance, lam: float):
    _check_rate(lam)
    return math.log(lam) - lam * np.asarray(distance, dtype=float)


def relative_likelihoods(distances, lam: float) -> np.ndarray:
    """Likelihoods rescaled so the largest is 1.

    The common factor cancels in the Bayes update, and the rescaling keeps
    the best-fitting lags representable when ``lam * d`` is large enough for
    every raw likelihood to underflow.
    """
    ll = log_likelihood(distances, lam)
    return np.exp(ll - ll.max())


def weighted_residual(weights, distances) -> float:
    """Belief-weighted squared residual ``sum(w * d)``.

    Works for vectors and two-column matrices alike; for matrices this is the
    joint residual shared by both columns.
    """
    weights = np.asarray(weights, dtype=float)
    distances = np.asarray(distances, dtype=float)
    if weights.shape != distances.shape:
        raise ConfigurationError(f"shape mismatch: {weights.shape} vs {distances.shape}")
    return float((weights * distances).sum())


def joint_rate_residual(weights, distances) -> float:
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2:
        raise ConfigurationError("joint residual expects a belief matrix")
    return weighted_residual(weights, distances)


def update_matrix(predicted, distances, lam: float, floor: float = FLOOR, step_index=None) -> np.ndarray:
    """Joint Bayes update of a two-column belief matrix under one shared rate."""
    predicted = np.asarray(predicted, dtype=float)
    distances = np.asarray(distances, dtype=float)
    if predicted.shape != distances.shape or predicted.ndim != 2:
        raise ConfigurationError(f"shape mismatch: {predicted.shape} vs {distances.shape}")
    return update(predicted, relative_likelihoods(distances, lam), floor, step_index)


def forecast_uni(weights, window) -> float:
    weights = np.asarray(weights, dtype=float)
    window = np.asarray(window, dtype=float)
    if weights.shape != window.shape:
        raise ConfigurationError(f"shape mismatch: {weights.shape} vs {window.shape}")
    return float(weights @ window)


def forecast_posneg(weights, window) -> float:
    """Positive column contributes ``+x``, negative column ``-x``.

    This rule is an extension; only the distance construction for the
    sign-switching model is standard.
    """
    weights = np.asarray(weights, dtype=float)
    window = np.asarray(window, dtype=float)
    if weights.shape != (len(window), 2):
        raise ConfigurationError(f"expected weights of shape ({len(window)}, 2), got {weights.shape}")
    return float((weights[:, 0] - weights[:, 1]) @ window)


def forecast_bidirectional(weights, x_window, y_window, floor: float = FLOOR):
    """Forecast both series from a jointly normalized belief matrix.

    Each column is renormalized to unit mass before the dot product. A column
    whose raw mass is at floor level carries no directional evidence, and its
    forecast is returned as NaN.

    Returns
    -------
    y_hat, x_hat : float
        Forecasts of y (from column 0 over the x window) and of x (from
        column 1 over the y window).
    masses : numpy.ndarray
        Raw column masses, a directional-strength diagnostic.
    """
    weights = np.asarray(weights, dtype=float)
    x_window = np.asarray(x_window, dtype=float)
    y_window = np.asarray(y_window, dtype=float)
    n = len(x_window)
    if weights.shape != (n, 2) or y_window.shape != x_window.shape:
        raise ConfigurationError("belief matrix and windows have inconsistent shapes")
    masses = weights.sum(axis=0)
    threshold = 2 * n * floor
    out = []
    for j, window in enumerate((x_window, y_window)):
        if masses[j] <= threshold:
            out.append(math.nan)
        else:
            out.append(float(weights[:, j] @ window / masses[j]))
    return out[0], out[1], masses
