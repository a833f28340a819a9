# %% [markdown]
# # Monte-Carlo benchmark
#
# FE is RMSE minus the noise level, so 0 means the forecast is as good as the
# noise allows. A small run for speed; pass `trials=500` for the full grid.

# %%
from sdm import run_benchmark

report = run_benchmark(families=["f1", "f3", "f5"], sigma_grid=[0.25, 1.0], trials=10, seed_base=0)

# %%
print(f"{'family':6} {'sigma':>5} {'RMSE':>7} {'FE':>7} {'se':>6}")
for c in report.cells:
    print(f"{c.family:6} {c.sigma_u:5.2f} {c.mean_rmse:7.3f} {c.mean_fe:7.3f} {c.se_fe:6.3f}")

# %%
# the same report as written by `sdm benchmark`
import json

print(json.dumps(report.to_dict()["metadata"], indent=2))
