"""How many confirmations does a merchant need?

Walks through catch-up probabilities, the double-spend risk after n
confirmations and the smallest n that keeps the risk under a budget.
"""

# %%
import numpy as np

from forkguard import HashratePartition, catch_up_probability, double_spend_risk, min_confirmations

honest_vs_attacker = HashratePartition.from_attacker(0.1)

# %% [markdown]
# A lagging attacker closes a gap of z blocks with probability (q/p)^(z+1).

# %%
for z in range(0, 6):
    print(f"lead {z}: catch-up {catch_up_probability(honest_vs_attacker, z):.6f}")

# %% [markdown]
# Averaging over how far the attacker got while the merchant waited gives the
# risk of accepting after n confirmations.

# %%
for n in range(1, 8):
    print(f"n={n}: risk {double_spend_risk(n, honest_vs_attacker):.3e}")

# %%
for eps in (0.1, 0.01, 0.001):
    print(f"eps={eps}: wait for {min_confirmations(honest_vs_attacker, eps)} blocks")

# %% [markdown]
# The policy table over a grid of attacker shares. Past one half no finite
# wait helps.

# %%
grid = np.round(np.arange(0.05, 0.55, 0.05), 2)
for q in grid:
    row = [str(min_confirmations(HashratePartition.from_attacker(q), e)) for e in (0.1, 0.01, 0.001)]
    print(f"q={q:.2f}  " + "  ".join(f"{c:>12}" for c in row))
