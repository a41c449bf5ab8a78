"""Simulate the block race and compare with the closed form."""

# %%
from forkguard import HashratePartition, double_spend_risk
from forkguard.consortium_sim import estimate_risk_monte_carlo, simulate_block_race

import numpy as np

# %%
split = HashratePartition.from_attacker(0.25)
rng = np.random.default_rng(3)
race = simulate_block_race(split, n=2, rng=rng)
print(race)

# %% [markdown]
# One race is noisy. A million of them, split into seeded chunks, should land
# within a few standard errors of the exact answer.

# %%
for n in (1, 2, 4, 6):
    est = estimate_risk_monte_carlo(split, n, trials=1_000_000, seed=11, workers=2)
    exact = double_spend_risk(n, split)
    z = (est.estimate - exact) / est.std_error if est.std_error else 0.0
    print(f"n={n}  mc={est.estimate:.5f} +- {est.std_error:.5f}  exact={exact:.5f}  z={z:+.2f}")
