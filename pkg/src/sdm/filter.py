"""Per-step filter iteration and the driver that streams a series pair through it."""

from dataclasses import dataclass, field

import numpy as np

from . import measurement as ms
from .belief import (
    FLOOR,
    SWEEPS,
    DiffusionEstimator,
    RateEstimator,
    estimate_theta,
    init_beliefs,
    observe_transition_error,
    predict,
    update,
)
from .errors import ConfigurationError, DataError


@dataclass
class FilterState:
    """Loop state of one filter instance.

    ``beliefs`` is a vector for the ``uni`` variant and an ``(n, 2)`` matrix
    for the two-column variants. A state is owned by a single filter; `step`
    advances it in place.
    """

    beliefs: np.ndarray
    diffusion: DiffusionEstimator = field(default_factory=DiffusionEstimator)
    rate: RateEstimator = field(default_factory=RateEstimator)
    step_index: int = 0
    floor: float = FLOOR
    sweep: str = "pseudocode"

    @classmethod
    def initial(cls, n_states, variant="uni", floor=FLOOR, sweep="pseudocode"):
        if variant not in ms.VARIANTS:
            raise ConfigurationError(f"unknown variant {variant!r}; expected one of {ms.VARIANTS}")
        if sweep not in SWEEPS:
            raise ConfigurationError(f"unknown sweep {sweep!r}; expected one of {SWEEPS}")
        if not 0 <= floor < 1.0 / (2 * n_states):
            raise ConfigurationError(f"floor {floor} out of range for {n_states} states")
        columns = None if variant == "uni" else 2
        return cls(init_beliefs(n_states, columns), floor=floor, sweep=sweep)

    @property
    def n_states(self):
        return self.beliefs.shape[0]

    def copy(self):
        return FilterState(
            self.beliefs.copy(),
            self.diffusion.copy(),
            self.rate.copy(),
            self.step_index,
            self.floor,
            self.sweep,
        )


@dataclass(frozen=True)
class StepDiagnostics:
    theta: float
    rate: float
    transition_error: float
    residual: float
    posterior: np.ndarray


def step(state, distances):
    """Advance ``state`` by one observation.

    Order of operations: diffusion magnitude and rate from the histories,
    prediction, likelihood-weighted update with flooring, then the transition
    error (prior to posterior, L1) and the prior-weighted squared residual are
    appended to the histories.

    Returns the (mutated) state and the step diagnostics.
    """
    distances = np.asarray(distances, dtype=float)
    prior = state.beliefs
    if distances.shape != prior.shape:
        raise ConfigurationError(f"distances shape {distances.shape} != beliefs shape {prior.shape}")
    if not np.all(np.isfinite(distances)) or np.any(distances < 0):
        raise DataError(f"distances must be finite and non-negative (step {state.step_index})")
    theta = estimate_theta(state.diffusion)
    lam = state.rate.rate
    predicted = predict(prior, theta, state.sweep)
    posterior = update(predicted, ms.relative_likelihoods(distances, lam), state.floor, state.step_index)
    v = observe_transition_error(prior, posterior)
    u2 = ms.weighted_residual(prior, distances)
    state.diffusion.add(v)
    state.rate.add(u2)
    state.beliefs = posterior
    state.step_index += 1
    return state, StepDiagnostics(theta, lam, v, u2, posterior)


@dataclass
class FitResult:
    """Trajectory of a filter run.

    Row ``k`` of every array refers to time index ``t[k]`` (0-based position
    in the input series). ``y_hat[k]`` uses only beliefs from before
    ``t[k]`` and series values strictly before ``t[k]``; ``beliefs[k]`` is the
    posterior after observing ``t[k]``.
    """

    variant: str
    n_states: int
    t: np.ndarray
    y_hat: np.ndarray
    x_hat: np.ndarray
    beliefs: np.ndarray
    theta: np.ndarray
    rate: np.ndarray
    transition_error: np.ndarray
    residual: np.ndarray
    column_mass: np.ndarray = None

    def argmax_lag(self, column=0):
        """Most probable lag (1-based) at every step."""
        b = self.beliefs if self.beliefs.ndim == 2 else self.beliefs[:, :, column]
        return np.argmax(b, axis=1) + 1


def run_filter(x, y, n_states=30, variant="uni", floor=FLOOR, sweep="pseudocode"):
    """Stream a series pair through the filter, forecasting one step ahead.

    The first processed time index is ``n_states`` (0-based), the first at
    which a full lag window exists.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"x and y must be 1-D and of equal length, got {x.shape} and {y.shape}")
    if len(x) < n_states + 1:
        raise DataError(f"series of length {len(x)} too short for {n_states} states")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("series contain non-finite values")
    state = FilterState.initial(n_states, variant, floor, sweep)
    times = np.arange(n_states, len(x))
    m = len(times)
    y_hat = np.empty(m)
    x_hat = np.full(m, np.nan)
    beliefs = np.empty((m,) + state.beliefs.shape)
    theta = np.empty(m)
    rate = np.empty(m)
    v = np.empty(m)
    u2 = np.empty(m)
    masses = np.empty((m, 2)) if variant != "uni" else None

    for k, t in enumerate(times):
        xw = x[t - n_states:t][::-1]
        if variant == "uni":
            y_hat[k] = ms.forecast_uni(state.beliefs, xw)
            d = ms.distances_uni(xw, y[t])
        elif variant == "posneg":
            y_hat[k] = ms.forecast_posneg(state.beliefs, xw)
            d = ms.distances_posneg(xw, y[t])
        else:
            yw = y[t - n_states:t][::-1]
            y_hat[k], x_hat[k], _ = ms.forecast_bidirectional(state.beliefs, xw, yw, floor)
            d = ms.distances_bidirectional(xw, yw, x[t], y[t])
        _, diag = step(state, d)
        beliefs[k] = diag.posterior
        theta[k] = diag.theta
        rate[k] = diag.rate
        v[k] = diag.transition_error
        u2[k] = diag.residual
        if masses is not None:
            masses[k] = diag.posterior.sum(axis=0)

    return FitResult(variant, n_states, times, y_hat, x_hat, beliefs, theta, rate, v, u2, masses)
