# %% [markdown]
# # Which series leads, and with what sign
#
# The bidirectional variant keeps one belief column for "x leads y" and one
# for "y leads x". The posneg variant splits lags by sign instead.

# %%
import numpy as np

from sdm import SimConfig, make_pair, run_filter
from sdm.simulation import apply_lag_single, gen_ar1, make_rng

pair = make_pair(SimConfig("f5", sigma_u=0.25, seed=2))
fwd = run_filter(pair.x, pair.y, 30, "bidirectional")
rev = run_filter(pair.y, pair.x, 30, "bidirectional")
print("x leads, final masses:", fwd.column_mass[-1].round(3))
print("swapped, final masses:", rev.column_mass[-1].round(3))

# %%
# y follows x with lag 5, then flips sign at t=300
rng = make_rng(4)
x = gen_ar1(650, rng=rng)
shifted = apply_lag_single(x, np.full(600, 5), 0.0, start=50)
sign = np.where(np.arange(1, 601) <= 300, 1.0, -1.0)
y = sign * shifted + 0.25 * rng.standard_normal(600)
fit = run_filter(x[50:], y, 30, "posneg")

t = fit.t + 1
neg_wins = np.flatnonzero((t > 300) & (fit.column_mass[:, 1] > fit.column_mass[:, 0]))
print("negative column takes over at t =", t[neg_wins[0]])
