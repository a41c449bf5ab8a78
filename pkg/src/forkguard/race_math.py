"""Catch-up and double-spend probabilities for a proof-of-work block race.

The honest network holds a fraction ``p`` of the hashrate and the attacker
``q = 1 - p``. The honest lead ``z`` moves +1 with probability ``p`` and -1
with probability ``q`` each block; the attacker wins once it pulls ahead.

Two routes are provided for every quantity: a closed form and an
independent oracle (value iteration, direct series summation) so that each
can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betainc, gammaln, xlogy

PARTITION_TOL = 1e-12
DEFAULT_N_CAP = 10_000


@dataclass(frozen=True)
class HashratePartition:
    """Honest share ``p`` and attacker share ``q`` of the total hashrate."""

    p: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0) or not (0.0 <= self.p <= 1.0):
            raise ValueError(f"hashrate shares must lie in [0, 1], got p={self.p}, q={self.q}")
        if abs(self.p + self.q - 1.0) > PARTITION_TOL:
            raise ValueError(f"p + q must equal 1 (got {self.p + self.q!r})")

    @classmethod
    def from_attacker(cls, q: float) -> "HashratePartition":
        return cls(p=1.0 - q, q=q)

    @property
    def attacker_majority(self) -> bool:
        # q >= p, i.e. q >= 0.5
        return self.q >= self.p


@dataclass(frozen=True)
class ConfirmationPolicy:
    """Smallest confirmation count keeping double-spend risk below ``epsilon``.

    ``n_star`` is ``None`` when no ``n <= n_cap`` achieves the ceiling.
    """

    epsilon: float
    n_star: Optional[int]
    n_cap: int

    @property
    def attainable(self) -> bool:
        return self.n_star is not None

    def __str__(self):
        return "unattainable" if self.n_star is None else str(self.n_star)


def catch_up_probability(split: HashratePartition, lead: int) -> float:
    """Probability an attacker ``lead`` blocks behind ever overtakes the honest chain."""
    if lead < 0 or split.attacker_majority:
        return 1.0
    if split.q == 0.0:
        return 0.0
    return (split.q / split.p) ** (lead + 1)


def catch_up_recurrence_oracle(
    split: HashratePartition,
    lead: int,
    z_max: int = 200,
    iterations: int = 1_000_000,
    tol: float = 1e-12,
) -> float:
    """Solve ``a_z = p a_{z+1} + q a_{z-1}`` by relaxation sweeps.

    The grid is ``z = -1 .. z_max`` with ``a_{-1} = 1`` and ``a_{z_max} = 0``.
    Sweeps use red-black over-relaxation with the optimal factor for this
    tridiagonal system; the result never touches the closed form.
    """
    if split.attacker_majority:
        raise ValueError("recurrence oracle requires q < p")
    if lead < 0:
        return 1.0
    if z_max < lead + 10:
        raise ValueError(f"z_max must be at least lead + 10 (got z_max={z_max}, lead={lead})")

    p, q = split.p, split.q
    size = z_max + 2  # index i holds a_{i-1}
    a = np.zeros(size)
    a[0] = 1.0

    interior = size - 2
    rho_jacobi = 2.0 * math.sqrt(p * q) * math.cos(math.pi / (interior + 1))
    omega = 2.0 / (1.0 + math.sqrt(max(0.0, 1.0 - rho_jacobi**2)))

    odd = np.arange(1, size - 1, 2)
    even = np.arange(2, size - 1, 2)
    for _ in range(iterations):
        change = 0.0
        for idx in (odd, even):
            target = p * a[idx + 1] + q * a[idx - 1]
            delta = omega * (target - a[idx])
            a[idx] += delta
            if delta.size:
                change = max(change, float(np.max(np.abs(delta))))
        if change < tol:
            return float(a[lead + 1])
    raise RuntimeError(f"recurrence oracle did not converge in {iterations} sweeps")


def _log_nb_coeff(n, m):
    # log C(m + n - 1, m)
    return gammaln(m + n) - gammaln(m + 1) - gammaln(n)


def negative_binomial_pmf(n: int, m: int, split: HashratePartition) -> float:
    """P(attacker finds exactly ``m`` blocks while honest finds its ``n``-th)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    log_term = _log_nb_coeff(n, m) + xlogy(n, split.p) + xlogy(m, split.q)
    return float(np.exp(log_term))


def double_spend_risk(n: int, split: HashratePartition) -> float:
    """Success probability of a double spend against a merchant waiting ``n`` confirmations.

    Evaluates ``1 - sum_{m=0}^{n} C(m+n-1, m) (p^n q^m - p^m q^n)`` after
    regrouping into non-negative parts: the upper tail ``P(m >= n)`` (a
    regularized incomplete beta) plus ``sum_{m<n} C(m+n-1, m) p^m q^n``.
    The regrouping keeps full relative precision when the risk is tiny.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if split.attacker_majority:
        return 1.0
    if split.q == 0.0:
        return 0.0
    m = np.arange(n, dtype=float)
    log_terms = _log_nb_coeff(n, m) + m * math.log(split.p) + n * math.log(split.q)
    tail = float(betainc(n, n, split.q))
    risk = tail + math.fsum(np.exp(log_terms))
    return min(1.0, max(0.0, risk))


def double_spend_risk_literal(n: int, split: HashratePartition) -> float:
    """Same quantity evaluated term by term as ``1 - sum(...)``; loses precision below ~1e-15."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if split.attacker_majority:
        return 1.0
    m = np.arange(n + 1, dtype=float)
    coeff = _log_nb_coeff(n, m)
    first = np.exp(coeff + xlogy(n, split.p) + xlogy(m, split.q))
    second = np.exp(coeff + xlogy(m, split.p) + xlogy(n, split.q))
    return min(1.0, max(0.0, math.fsum([1.0, *(-first), *second])))


def double_spend_risk_series(
    n: int, split: HashratePartition, tail_tolerance: float = 1e-12
) -> float:
    """Direct sum ``sum_m P(m) a_{n-m-1}``, stopped once the unsummed mass is below ``tail_tolerance``.

    ``P(m)`` is advanced by the ratio ``q (m + n) / (m + 1)`` in log space, so this
    path shares nothing with the closed form beyond the catch-up probability.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if split.attacker_majority:
        raise ValueError("series oracle requires q < p; use double_spend_risk for q >= p")
    if not 0.0 < tail_tolerance < 1.0:
        raise ValueError("tail_tolerance must lie in (0, 1)")
    if split.q == 0.0:
        return 0.0

    log_q = math.log(split.q)
    log_pm = n * math.log(split.p)
    terms = []
    mass = 0.0
    m = 0
    while True:
        pm = math.exp(log_pm)
        terms.append(pm * catch_up_probability(split, n - m - 1))
        mass += pm
        # the mode sits below n when q < p, so only test the tail past it
        if m >= n and 1.0 - mass < tail_tolerance:
            break
        log_pm += log_q + math.log((m + n) / (m + 1))
        m += 1
    return math.fsum(terms)


def min_confirmations(
    split: HashratePartition, epsilon: float, n_cap: int = DEFAULT_N_CAP
) -> ConfirmationPolicy:
    """Smallest ``n >= 1`` with ``double_spend_risk(n) < epsilon``.

    Risk is strictly decreasing in ``n`` for ``0 < q < 0.5``, so the search
    doubles until the ceiling is met and then bisects.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie strictly inside (0, 1), got {epsilon}")
    if n_cap < 1:
        raise ValueError(f"n_cap must be >= 1, got {n_cap}")
    if split.attacker_majority:
        return ConfirmationPolicy(epsilon, None, n_cap)

    def ok(n):
        return double_spend_risk(n, split) < epsilon

    hi = 1
    while not ok(hi):
        if hi >= n_cap:
            return ConfirmationPolicy(epsilon, None, n_cap)
        hi = min(2 * hi, n_cap)
    lo = hi // 2  # ok(lo) is False, or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return ConfirmationPolicy(epsilon, hi, n_cap)
