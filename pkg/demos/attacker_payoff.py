"""Attacker payoffs: the all-or-nothing bet and its expectation."""

# %%
from forkguard import AttackStake, HashratePartition, attacker_payoff, expected_attack_payoff, is_attack_rational

stake = AttackStake(v=100.0, o=6, B=12.5)
print("loss if the fork fails:", stake.loss)

# %%
for q in (0.2, 0.45, 0.5, 0.6):
    split = HashratePartition.from_attacker(q)
    print(f"q={q}: payoff {attacker_payoff(stake, split):8.1f}  rational={is_attack_rational(stake, split)}")

# %% [markdown]
# Weighting both outcomes by the double-spend risk softens the cliff at one
# half: a large minority can already come out ahead on average.

# %%
for q in (0.1, 0.3, 0.45):
    split = HashratePartition.from_attacker(q)
    print(f"q={q}: expected {expected_attack_payoff(stake, split, n=6):9.3f}")
