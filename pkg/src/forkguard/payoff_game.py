"""Attacker payoff and utility for a majority attack.

An attack succeeds outright once the attacker controls at least half the
hashrate. On success the attacker keeps the commodity value ``v``; on
failure it loses ``v`` plus the ``o`` blocks of value ``B`` it mined on the
abandoned fork.
"""

from __future__ import annotations

from dataclasses import dataclass

from .race_math import HashratePartition, double_spend_risk

STEP = "step"
EXPECTED = "expected"


@dataclass(frozen=True)
class AttackStake:
    """Economic parameters of one attack (abstract currency units)."""

    v: float
    o: int = 0
    B: float = 0.0

    def __post_init__(self):
        if self.v < 0 or self.o < 0 or self.B < 0:
            raise ValueError(f"stake components must be non-negative: {self}")

    @property
    def loss(self) -> float:
        return self.v + self.o * self.B


def attacker_payoff(stake: AttackStake, split: HashratePartition) -> float:
    """``+v`` when ``q >= 0.5``, otherwise ``-(v + o*B)``."""
    if split.q >= 0.5:
        return stake.v
    return -(stake.v + stake.o * stake.B)


def attack_utility(stake: AttackStake, split: HashratePartition) -> float:
    """Utility ``u(a)`` of attacking; the same step rule as :func:`attacker_payoff`."""
    return attacker_payoff(stake, split)


def expected_attack_payoff(stake: AttackStake, split: HashratePartition, n: int) -> float:
    """``r*v - (1-r)*(v + o*B)`` with ``r`` the double-spend risk after ``n`` confirmations."""
    r = double_spend_risk(n, split)
    # exact at r in {0, 1}: reduces to the step payoff
    return r * stake.v - (1.0 - r) * stake.loss


def is_attack_rational(
    stake: AttackStake, split: HashratePartition, mode: str = STEP, n: int = 1
) -> bool:
    if mode == STEP:
        return split.q >= 0.5
    if mode == EXPECTED:
        return expected_attack_payoff(stake, split, n) > 0.0
    raise ValueError(f"mode must be {STEP!r} or {EXPECTED!r}, got {mode!r}")
