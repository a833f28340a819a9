"""Belief state and the model-agnostic prediction/update recursion.

The filter state is a probability vector over lags ``1..n_states``. Arrays are
0-based, so array position ``k`` holds the belief for lag ``k + 1``. Every
operation here also accepts an ``(n_states, 2)`` belief matrix; prediction is
then applied column by column and the update normalizes over all entries.
"""

from bisect import insort

import numpy as np

from .errors import ConfigurationError, DegenerateUpdateError

#: Lower limit applied to every posterior weight.
FLOOR = 1e-12

#: Cold-start rate used before any residual has been observed.
DEFAULT_RATE = 1.0

SWEEPS = ("pseudocode", "fresh-buffer")


def init_beliefs(n_states, columns=None):
    """Uniform beliefs over ``n_states`` lags.

    With ``columns=2`` a belief matrix is returned, uniform over all
    ``2 * n_states`` entries.
    """
    n_states = int(n_states)
    if n_states < 2:
        raise ConfigurationError(f"n_states must be >= 2, got {n_states}")
    if columns is None:
        return np.full(n_states, 1.0 / n_states)
    if columns < 1:
        raise ConfigurationError(f"columns must be >= 1, got {columns}")
    return np.full((n_states, columns), 1.0 / (n_states * columns))


def _sweep_column(prior, c, sweep):
    n = len(prior)
    out = [0.0] * n
    if sweep == "pseudocode":
        # reversed and in place: the upper neighbour is already the new value
        upper = 0.0
        for i in range(n - 1, -1, -1):
            lower = prior[i - 1] if i > 0 else 0.0
            upper = prior[i] + c * (lower + prior[i] + upper)
            out[i] = upper
    else:
        for i in range(n):
            lower = prior[i - 1] if i > 0 else 0.0
            upper = prior[i + 1] if i < n - 1 else 0.0
            out[i] = prior[i] + c * (lower + prior[i] + upper)
    return out


def predict(prior, theta, sweep="pseudocode"):
    """Project beliefs one step forward with diffusion magnitude ``theta``.

    Each lag receives ``theta / 3`` times the mass of itself, the lag below
    and the lag above; positions beyond either end count as zero. The result
    is a set of unnormalized weights whose sum exceeds the prior's whenever
    ``theta > 0``.

    Parameters
    ----------
    prior : array_like, shape (n,) or (n, 2)
        Current beliefs.
    theta : float
        Diffusion magnitude, non-negative.
    sweep : {"pseudocode", "fresh-buffer"}
        ``"pseudocode"`` runs the sweep from the last lag down to the first,
        so the upper-neighbour term reads the value already predicted for
        that lag. ``"fresh-buffer"`` reads every neighbour from the prior.

    Returns
    -------
    numpy.ndarray
        Predicted weights, same shape as ``prior``.
    """
    if theta < 0:
        raise ConfigurationError(f"theta must be >= 0, got {theta}")
    if sweep not in SWEEPS:
        raise ConfigurationError(f"unknown sweep {sweep!r}; expected one of {SWEEPS}")
    prior = np.asarray(prior, dtype=float)
    c = theta / 3.0
    if prior.ndim == 1:
        return np.array(_sweep_column(prior.tolist(), c, sweep))
    cols = [_sweep_column(prior[:, j].tolist(), c, sweep) for j in range(prior.shape[1])]
    return np.array(cols).T


def floor_normalize(weights, floor=FLOOR):
    """Normalize to unit sum with every entry at least ``floor``.

    Entries that fall below the floor are pinned to it exactly and the
    remaining mass is rescaled, so both the sum and the floor hold without
    the pinned entries drifting under the limit.
    """
    p = np.asarray(weights, dtype=float)
    p = p / p.sum()
    if floor <= 0:
        return p
    low = p < floor
    while low.any():
        free = 1.0 - floor * low.sum()
        q = np.where(low, floor, p * (free / p[~low].sum()))
        newly_low = (q < floor) & ~low
        if not newly_low.any():
            return q
        low |= newly_low
    return p


def update(predicted, likelihoods, floor=FLOOR, step_index=None):
    """Bayes update: multiply by the likelihoods and renormalize.

    ``likelihoods`` need only be correct up to a common positive factor.

    Raises
    ------
    DegenerateUpdateError
        If the products carry no mass (all zero after underflow) or are not
        finite.
    """
    predicted = np.asarray(predicted, dtype=float)
    likelihoods = np.asarray(likelihoods, dtype=float)
    if predicted.shape != likelihoods.shape:
        raise ConfigurationError(
            f"shape mismatch: predicted {predicted.shape} vs likelihoods {likelihoods.shape}"
        )
    products = predicted * likelihoods
    total = products.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise DegenerateUpdateError("update products carry no mass", step_index)
    return floor_normalize(products / total, floor)


def observe_transition_error(prev, curr):
    """L1 distance between consecutive belief states, a value in [0, 2]."""
    prev = np.asarray(prev, dtype=float)
    curr = np.asarray(curr, dtype=float)
    if prev.shape != curr.shape:
        raise ConfigurationError(f"shape mismatch: {prev.shape} vs {curr.shape}")
    return float(np.abs(curr - prev).sum())


class DiffusionEstimator:
    """History of belief transition errors; yields their median as theta.

    The history is kept sorted so the median is available in constant time.
    """

    def __init__(self, history=()):
        self._sorted = []
        for v in history:
            self.add(v)

    def add(self, v):
        v = float(v)
        if not 0.0 <= v <= 2.0 + 1e-9:
            raise ConfigurationError(f"transition error must lie in [0, 2], got {v}")
        insort(self._sorted, min(v, 2.0))

    @property
    def history(self):
        return list(self._sorted)

    def __len__(self):
        return len(self._sorted)

    def median(self):
        s = self._sorted
        n = len(s)
        if n == 0:
            return 0.0
        mid = n // 2
        if n % 2:
            return s[mid]
        return (s[mid - 1] + s[mid]) / 2.0

    def copy(self):
        new = DiffusionEstimator()
        new._sorted = list(self._sorted)
        return new


def estimate_theta(diffusion):
    """Diffusion magnitude for the next step: the median transition error.

    Zero for an empty history. Clamped to [0, 2].
    """
    return min(max(diffusion.median(), 0.0), 2.0)


class RateEstimator:
    """Running mean of weighted squared residuals; the rate is its reciprocal."""

    def __init__(self, residual_sum=0.0, count=0):
        self.residual_sum = float(residual_sum)
        self.count = int(count)

    def add(self, u2):
        u2 = float(u2)
        if u2 < 0 or not np.isfinite(u2):
            raise ConfigurationError(f"squared residual must be finite and >= 0, got {u2}")
        self.residual_sum += u2
        self.count += 1

    @property
    def rate(self):
        if self.count == 0 or self.residual_sum <= 0.0:
            return DEFAULT_RATE
        return self.count / self.residual_sum

    def copy(self):
        return RateEstimator(self.residual_sum, self.count)
