"""Synthetic lead-lag series pairs with fixed, stepped or wandering lags.

Five families are generated. In all of them x is an AR(1) process and y is
built from lagged x plus Gaussian noise:

====  ==================  ===================================
name  lag path            y_t
====  ==================  ===================================
f1    step (5, 20, 10)    x[t - tau_t] + u_t
f2    step (5, 20, 10)    mean(x[t - tau_t - 3 : t - tau_t + 4]) + u_t
f3    bounded walk        x[t - tau_t] + u_t
f4    bounded walk        seven-point average as in f2
f5    constant 5          x[t - 5] + u_t
====  ==================  ===================================

Random numbers come from numpy's ``PCG64`` bit generator driven through
``numpy.random.Generator`` (``standard_normal`` uses the ziggurat method,
``integers`` uses Lemire's bounded method). Draw order for a pair is fixed:
first the x innovations, then the lag walk (f3/f4 only), then the y noise.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError

FAMILIES = ("f1", "f2", "f3", "f4", "f5")

RNG_ALGORITHM = "numpy.random.Generator(PCG64); normals via ziggurat; integers via Lemire"

#: Leading samples generated and discarded so every lagged reference exists.
WARMUP = 50

TAU_MIN, TAU_MAX = 5, 25
TAU_WALK_START = 15
FIXED_LAG = 5
STEP_REGIMES = ((200, 5), (400, 20), (600, 10))
HALF_WINDOW = 3


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _rng(rng, seed):
    if rng is not None:
        return rng
    return make_rng(seed)


def gen_ar1(length, a=0.9, seed=None, *, rng=None, innovations=None):
    """AR(1) series ``x_t = a * x_{t-1} + eta_t`` with ``x_1 = eta_1``.

    ``innovations`` overrides the random draws (length ``length``), which
    makes the recursion checkable by hand.
    """
    if not abs(a) < 1:
        raise ConfigurationError(f"AR coefficient must satisfy |a| < 1, got {a}")
    if length < 1:
        raise ConfigurationError(f"length must be >= 1, got {length}")
    if innovations is None:
        eta = _rng(rng, seed).standard_normal(length)
    else:
        eta = np.asarray(innovations, dtype=float)
        if eta.shape != (length,):
            raise ConfigurationError(f"expected {length} innovations, got {eta.shape}")
    x = np.empty(length)
    prev = 0.0
    for t in range(length):
        prev = a * prev + eta[t]
        x[t] = prev
    return x


def tau_step(t):
    """Stepped lag at 1-based time ``t``: 5 up to 200, 20 up to 400, 10 up to 600."""
    if not 1 <= t <= STEP_REGIMES[-1][0]:
        raise ConfigurationError(f"step lag defined for 1 <= t <= 600, got t={t}")
    for end, lag in STEP_REGIMES:
        if t <= end:
            return lag


def tau_step_path(length):
    return np.array([tau_step(t) for t in range(1, length + 1)], dtype=int)


def tau_random_walk_step(prev, rng):
    """One step of the bounded trinomial lag walk on [5, 25].

    Interior points move -1, 0 or +1 with equal probability; at the upper
    bound the walk moves -1 or 0, at the lower bound 0 or +1, each with
    probability one half.
    """
    prev = int(prev)
    if not TAU_MIN <= prev <= TAU_MAX:
        raise ConfigurationError(f"lag walk state must lie in [{TAU_MIN}, {TAU_MAX}], got {prev}")
    if prev >= TAU_MAX:
        return prev + int(rng.integers(-1, 1))
    if prev <= TAU_MIN:
        return prev + int(rng.integers(0, 2))
    return prev + int(rng.integers(-1, 2))


def tau_random_walk(length, rng, start=TAU_WALK_START):
    path = np.empty(length, dtype=int)
    tau = start
    path[0] = tau
    for k in range(1, length):
        tau = tau_random_walk_step(tau, rng)
        path[k] = tau
    return path


def _emission_start(x, lag_path, start, reach):
    if start is None:
        start = len(x) - len(lag_path)
    if start < 0:
        raise ConfigurationError("lag path longer than x")
    lag_path = np.asarray(lag_path, dtype=int)
    first = start + np.arange(len(lag_path)) - lag_path - reach
    bad = np.flatnonzero(first < 0)
    if bad.size:
        raise ConfigurationError(
            f"insufficient x history: emitted t={bad[0] + 1} references x before the series start"
        )
    return start, lag_path


def _noise(n, sigma_u, rng):
    if sigma_u < 0:
        raise ConfigurationError(f"sigma_u must be >= 0, got {sigma_u}")
    if rng is None:
        if sigma_u > 0:
            raise ConfigurationError("an rng is required when sigma_u > 0")
        return np.zeros(n)
    return sigma_u * rng.standard_normal(n)


def apply_lag_single(x, lag_path, sigma_u, rng=None, start=None):
    """``y[k] = x[start + k - lag_path[k]] + u_k`` for each emitted step ``k``.

    ``start`` is the position in ``x`` of the first emitted step; by default
    the emitted steps are the last ``len(lag_path)`` positions of ``x``.
    """
    x = np.asarray(x, dtype=float)
    start, lag_path = _emission_start(x, lag_path, start, 0)
    idx = start + np.arange(len(lag_path)) - lag_path
    return x[idx] + _noise(len(lag_path), sigma_u, rng)


def apply_lag_averaged(x, lag_path, sigma_u, rng=None, start=None):
    """Seven-point average of x centred on the lagged position, plus noise."""
    x = np.asarray(x, dtype=float)
    start, lag_path = _emission_start(x, lag_path, start, HALF_WINDOW)
    if np.any(lag_path < HALF_WINDOW + 1):
        raise ConfigurationError("averaging window would reach the current time; lags must be >= 4")
    centre = start + np.arange(len(lag_path)) - lag_path
    offsets = np.arange(-HALF_WINDOW, HALF_WINDOW + 1)
    y = x[centre[:, None] + offsets].sum(axis=1) / (2 * HALF_WINDOW + 1)
    return y + _noise(len(lag_path), sigma_u, rng)


@dataclass(frozen=True)
class SimConfig:
    family: str = "f5"
    length: int = 600
    sigma_u: float = 0.0
    ar_coefficient: float = 0.9
    seed: int = 0
    warmup: int = WARMUP

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.length < 1:
            raise ConfigurationError(f"length must be >= 1, got {self.length}")
        if self.family in ("f1", "f2") and self.length > STEP_REGIMES[-1][0]:
            raise ConfigurationError("step-lag families are defined for length <= 600")
        if not abs(self.ar_coefficient) < 1:
            raise ConfigurationError(f"|ar_coefficient| must be < 1, got {self.ar_coefficient}")
        if self.sigma_u < 0:
            raise ConfigurationError(f"sigma_u must be >= 0, got {self.sigma_u}")
        if self.warmup < TAU_MAX + HALF_WINDOW:
            raise ConfigurationError(f"warmup must be >= {TAU_MAX + HALF_WINDOW}")

    def to_dict(self):
        return asdict(self)


@dataclass
class SimulatedPair:
    x: np.ndarray
    y: np.ndarray
    lag_path: np.ndarray
    config: SimConfig
    metadata: dict = field(default_factory=lambda: {"rng": RNG_ALGORITHM})


def make_pair(config):
    """Generate the series pair described by ``config``.

    Deterministic in ``config.seed``.
    """
    rng = make_rng(config.seed)
    n, w = config.length, config.warmup
    x_full = gen_ar1(n + w, config.ar_coefficient, rng=rng)
    family = config.family
    if family in ("f1", "f2"):
        path = tau_step_path(n)
    elif family in ("f3", "f4"):
        path = tau_random_walk(n, rng)
    else:
        path = np.full(n, FIXED_LAG, dtype=int)
    sigma_rng = rng if config.sigma_u > 0 else None
    if family in ("f2", "f4"):
        y = apply_lag_averaged(x_full, path, config.sigma_u, sigma_rng, start=w)
    else:
        y = apply_lag_single(x_full, path, config.sigma_u, sigma_rng, start=w)
    return SimulatedPair(x_full[w:].copy(), y, path, config)
