# %% [markdown]
# # Tracking a fixed lag
#
# Simulate a pair where y copies x five steps late, run the filter and look at
# where the belief mass ends up.

# %%
import numpy as np

from sdm import SimConfig, make_pair, run_filter

pair = make_pair(SimConfig("f5", length=600, sigma_u=0.25, seed=1))
fit = run_filter(pair.x, pair.y, n_states=30)

# %%
lags = fit.argmax_lag()
print("argmax lag over the last 100 steps:", np.unique(lags[-100:]))
print("final belief on lag 5:", round(float(fit.beliefs[-1, 4]), 4))

# %%
# one-step forecasts against a persistence baseline
y_true = pair.y[fit.t]
err = fit.y_hat - y_true
persist = pair.y[fit.t - 1] - y_true
print("filter RMSE     ", np.sqrt(np.mean(err**2)))
print("persistence RMSE", np.sqrt(np.mean(persist**2)))

# %% [markdown]
# The belief matrix `fit.beliefs` has one row per scored step and one column
# per lag, which is the heatmap that `sdm fit` writes to `heatmap.csv`.

# %%
coarse = fit.beliefs[::60, :12]
for t, row in zip(fit.t[::60] + 1, coarse):
    print(f"t={t:3d} " + " ".join(f"{v:4.2f}" for v in row))
