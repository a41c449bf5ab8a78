"""Monte Carlo simulation of block races and consortium collusion episodes.

Mining is a Bernoulli race in block counts: each block goes to the honest
side with probability ``p``. Wall-clock time only enters through
``NetworkParams.expected_duration``.

Randomness is drawn from one root seed. Substream ``k`` is
``SeedSequence(root, spawn_key=(k,))`` (the ``k``-th spawned child), so
results do not depend on how work is split across threads.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from .payoff_game import AttackStake, is_attack_rational
from .race_math import HashratePartition

DEFAULT_LEAD_CUTOFF = 200
MC_CHUNK = 1 << 16
SHARE_TOL = 1e-9


def substream(root_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=(index,)))


def derive_seed(root_seed: int, index: int) -> int:
    """64-bit seed for item ``index`` under ``root_seed``."""
    ss = np.random.SeedSequence(root_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


# --------------------------------------------------------------------------
# network and stakeholders


@dataclass(frozen=True)
class History:
    d: int = 0  # defections (attempted attacks joined)
    t: int = 0  # transactions observed

    def __post_init__(self):
        if self.d < 0 or self.t < 0 or self.d > self.t:
            raise ValueError(f"history requires 0 <= d <= t, got d={self.d}, t={self.t}")


@dataclass(frozen=True)
class StakeholderProfile:
    id: str
    hashrate_share: float
    dishonesty_propensity: float
    history: History = History()

    def __post_init__(self):
        if not 0.0 <= self.hashrate_share <= 1.0:
            raise ValueError(f"{self.id}: hashrate_share must lie in [0, 1]")
        if not 0.0 <= self.dishonesty_propensity <= 1.0:
            raise ValueError(f"{self.id}: dishonesty_propensity must lie in [0, 1]")


@dataclass(frozen=True)
class NetworkParams:
    stakeholders: Tuple[StakeholderProfile, ...]
    total_hashrate_H: float = 1.0
    block_interval_T0: float = 600.0

    def __post_init__(self):
        object.__setattr__(self, "stakeholders", tuple(self.stakeholders))
        if self.total_hashrate_H <= 0 or self.block_interval_T0 <= 0:
            raise ValueError("total_hashrate_H and block_interval_T0 must be positive")
        ids = [s.id for s in self.stakeholders]
        if len(set(ids)) != len(ids):
            raise ValueError(f"stakeholder ids must be unique: {ids}")
        total = math.fsum(s.hashrate_share for s in self.stakeholders)
        if abs(total - 1.0) > SHARE_TOL:
            raise ValueError(f"stakeholder hashrate shares must sum to 1 (got {total!r})")

    def stakeholder(self, sid: str) -> StakeholderProfile:
        for s in self.stakeholders:
            if s.id == sid:
                return s
        raise KeyError(sid)

    def histories(self) -> Dict[str, History]:
        return {s.id: s.history for s in self.stakeholders}

    def expected_duration(self, blocks: float) -> float:
        """Seconds to mine ``blocks`` at the full network hashrate."""
        return blocks * self.block_interval_T0


@dataclass(frozen=True)
class Coalition:
    member_ids: Tuple[str, ...]
    pooled_q: float

    def __post_init__(self):
        object.__setattr__(self, "member_ids", tuple(self.member_ids))
        if not self.member_ids:
            raise ValueError("coalition needs at least one member")
        if not 0.0 < self.pooled_q <= 1.0:
            raise ValueError(f"pooled_q must lie in (0, 1], got {self.pooled_q}")

    @classmethod
    def of(cls, params: NetworkParams, member_ids: Iterable[str]) -> "Coalition":
        ids = tuple(member_ids)
        pooled = math.fsum(params.stakeholder(i).hashrate_share for i in ids)
        return cls(ids, min(pooled, 1.0))

    @property
    def split(self) -> HashratePartition:
        return HashratePartition.from_attacker(self.pooled_q)


# --------------------------------------------------------------------------
# block race


@dataclass(frozen=True)
class RaceOutcome:
    m_attacker_blocks: int
    success: bool
    walk_steps: int

    @property
    def final_result(self) -> str:
        return "success" if self.success else "failure"


def simulate_block_race(
    split: HashratePartition,
    n: int,
    lead_cutoff: int = DEFAULT_LEAD_CUTOFF,
    rng: Optional[np.random.Generator] = None,
    batch: int = 256,
) -> RaceOutcome:
    """Play one double-spend race block by block.

    Phase 1 draws block winners until the honest chain has ``n`` blocks.
    The attacker, holding one pre-mined block plus the ``m`` it found, then
    trails by ``z = n - m - 1``; phase 2 runs the +-1 walk on ``z`` until the
    attacker pulls ahead or the honest lead reaches ``lead_cutoff``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if lead_cutoff < 50:
        raise ValueError(f"lead_cutoff must be >= 50, got {lead_cutoff}")
    if split.p == 0.0:
        raise ValueError("honest hashrate is zero: the honest chain never reaches n blocks")
    rng = rng if rng is not None else np.random.default_rng()

    honest = 0
    m = 0
    while honest < n:
        wins = rng.random(batch) < split.p
        cum = np.cumsum(wins)
        need = n - honest
        if cum[-1] >= need:
            idx = int(np.searchsorted(cum, need))
            m += idx + 1 - need
            honest = n
        else:
            m += batch - int(cum[-1])
            honest += int(cum[-1])

    z = n - m - 1
    if z < 0:
        return RaceOutcome(m, True, 0)
    steps = 0
    while True:
        if z >= lead_cutoff:
            return RaceOutcome(m, False, steps)
        moves = np.where(rng.random(batch) < split.p, 1, -1)
        path = z + np.cumsum(moves)
        hit = np.flatnonzero((path < 0) | (path >= lead_cutoff))
        if hit.size:
            i = int(hit[0])
            return RaceOutcome(m, bool(path[i] < 0), steps + i + 1)
        z = int(path[-1])
        steps += batch


def _race_chunk(split: HashratePartition, n: int, size: int, lead_cutoff: int, rng) -> int:
    # Vectorised race. Phase 1 samples the attacker's block count directly
    # (negative binomial, same law as block-by-block draws). Phase 2 leaps
    # k = min(z + 1, cutoff - z) steps at once with a binomial count of up
    # moves; neither boundary can be reached before step k, so the outcome
    # law equals that of the single-step walk.
    m = rng.negative_binomial(n, split.p, size)
    z = n - m - 1
    successes = int(np.count_nonzero(z < 0))
    z = z[(z >= 0) & (z < lead_cutoff)]
    while z.size:
        k = np.minimum(z + 1, lead_cutoff - z)
        z = z + 2 * rng.binomial(k, split.p) - k
        successes += int(np.count_nonzero(z < 0))
        z = z[(z >= 0) & (z < lead_cutoff)]
    return successes


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    trials: int
    successes: int


def estimate_risk_monte_carlo(
    split: HashratePartition,
    n: int,
    trials: int,
    lead_cutoff: int = DEFAULT_LEAD_CUTOFF,
    seed: int = 0,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Empirical double-spend success rate with its binomial standard error.

    Trials are split into fixed chunks of ``MC_CHUNK``; chunk ``k`` uses
    substream ``k`` of ``seed``, so ``workers`` does not change the result.
    """
    if trials < 100:
        raise ValueError(f"trials must be >= 100, got {trials}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if lead_cutoff < 50:
        raise ValueError(f"lead_cutoff must be >= 50, got {lead_cutoff}")
    if split.p == 0.0:
        raise ValueError("honest hashrate is zero: the honest chain never reaches n blocks")

    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)

    def run(k):
        return _race_chunk(split, n, sizes[k], lead_cutoff, substream(seed, k))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(len(sizes))))
    else:
        counts = [run(k) for k in range(len(sizes))]
    successes = sum(counts)
    est = successes / trials
    return MonteCarloEstimate(est, math.sqrt(est * (1.0 - est) / trials), trials, successes)


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class ValueDistribution:
    kind: str  # "lognormal" {mu, sigma} or "uniform" {low, high}
    params: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        if self.kind == "lognormal":
            required = ("mu", "sigma")
        elif self.kind == "uniform":
            required = ("low", "high")
        else:
            raise ValueError(f"value_distribution kind must be lognormal or uniform, got {self.kind!r}")
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ValueError(f"value_distribution ({self.kind}) missing params: {missing}")
        if self.kind == "lognormal" and self.params["sigma"] < 0:
            raise ValueError("lognormal sigma must be non-negative")
        if self.kind == "uniform" and not 0 <= self.params["low"] <= self.params["high"]:
            raise ValueError("uniform needs 0 <= low <= high")

    def median(self) -> float:
        if self.kind == "lognormal":
            return math.exp(self.params["mu"])
        return 0.5 * (self.params["low"] + self.params["high"])

    def quantile(self, u: float) -> float:
        if self.kind == "lognormal":
            return math.exp(self.params["mu"] + self.params["sigma"] * float(ndtri(u)))
        lo, hi = self.params["low"], self.params["high"]
        return lo + u * (hi - lo)

    def cdf(self, v: float) -> float:
        if self.kind == "lognormal":
            if v <= 0:
                return 0.0
            s = self.params["sigma"]
            if s == 0:
                return float(v >= math.exp(self.params["mu"]))
            return float(ndtr((math.log(v) - self.params["mu"]) / s))
        lo, hi = self.params["low"], self.params["high"]
        if hi == lo:
            return float(v >= lo)
        return min(1.0, max(0.0, (v - lo) / (hi - lo)))

    def sample(self, rng: np.random.Generator, floor: float = 0.0) -> float:
        # inverse-CDF draw restricted to [floor, inf)
        u0 = self.cdf(floor) if floor > 0 else 0.0
        u = u0 + (1.0 - u0) * rng.random()
        u = min(max(u, 1e-300), 1.0 - 1e-16)
        return self.quantile(u)


@dataclass(frozen=True)
class CollusionScenario:
    """Knobs governing how episodes are drawn.

    ``value_floor`` and ``forced_coalition`` are optional; they let callers
    pin high-value transactions or a fixed colluding set.
    """

    value_distribution: ValueDistribution
    collusion_rate: float = 0.5
    irrationality_rho: float = 0.1
    observation_sigma: float = 0.05
    confirmations_n: int = 6
    block_value_B: float = 12.5
    attack_rule: str = "step"
    lead_cutoff: int = DEFAULT_LEAD_CUTOFF
    value_floor: float = 0.0
    forced_coalition: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.forced_coalition is not None:
            object.__setattr__(self, "forced_coalition", tuple(self.forced_coalition))
        for name in ("collusion_rate", "irrationality_rho"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.observation_sigma < 0:
            raise ValueError("observation_sigma must be non-negative")
        if self.confirmations_n < 1:
            raise ValueError("confirmations_n must be >= 1")
        if self.block_value_B < 0:
            raise ValueError("block_value_B must be non-negative")
        if self.attack_rule not in ("step", "expected"):
            raise ValueError("attack_rule must be 'step' or 'expected'")
        if self.lead_cutoff < 50:
            raise ValueError("lead_cutoff must be >= 50")


SCENARIO_KEYS = (
    "stakeholders", "value_distribution", "collusion_rate", "irrationality_rho",
    "observation_sigma", "confirmations_n", "block_value_B",
)
OPTIONAL_SCENARIO_KEYS = (
    "total_hashrate_H", "block_interval_T0", "attack_rule", "lead_cutoff",
    "value_floor", "forced_coalition",
)

# No majority coalition pools less than 0.53 and no minority one more than
# 0.47; the zero-propensity auditor keeps pooled_q below 1.
DEFAULT_SCENARIO = {
    "stakeholders": [
        {"id": "bank-a", "share": 0.35, "propensity": 0.45},
        {"id": "bank-b", "share": 0.25, "propensity": 0.5},
        {"id": "insurer", "share": 0.20, "propensity": 0.4},
        {"id": "regulator", "share": 0.12, "propensity": 0.3},
        {"id": "auditor", "share": 0.08, "propensity": 0.0},
    ],
    "value_distribution": {"kind": "lognormal", "params": {"mu": math.log(100.0), "sigma": 1.0}},
    "collusion_rate": 0.8,
    "irrationality_rho": 0.1,
    "observation_sigma": 0.05,
    "confirmations_n": 6,
    "block_value_B": 12.5,
    "total_hashrate_H": 1.0e6,
    "block_interval_T0": 600.0,
}


def scenario_from_dict(cfg: Mapping) -> Tuple[NetworkParams, CollusionScenario]:
    missing = [k for k in SCENARIO_KEYS if k not in cfg]
    if missing:
        raise ValueError(f"scenario missing keys: {missing}")
    unknown = [k for k in cfg if k not in SCENARIO_KEYS + OPTIONAL_SCENARIO_KEYS]
    if unknown:
        raise ValueError(f"scenario has unknown keys: {unknown}")
    people = []
    for entry in cfg["stakeholders"]:
        people.append(StakeholderProfile(str(entry["id"]), float(entry["share"]), float(entry["propensity"])))
    params = NetworkParams(
        tuple(people),
        total_hashrate_H=float(cfg.get("total_hashrate_H", 1.0)),
        block_interval_T0=float(cfg.get("block_interval_T0", 600.0)),
    )
    vd = cfg["value_distribution"]
    scenario = CollusionScenario(
        value_distribution=ValueDistribution(vd["kind"], {k: float(x) for k, x in vd["params"].items()}),
        collusion_rate=float(cfg["collusion_rate"]),
        irrationality_rho=float(cfg["irrationality_rho"]),
        observation_sigma=float(cfg["observation_sigma"]),
        confirmations_n=int(cfg["confirmations_n"]),
        block_value_B=float(cfg["block_value_B"]),
        attack_rule=cfg.get("attack_rule", "step"),
        lead_cutoff=int(cfg.get("lead_cutoff", DEFAULT_LEAD_CUTOFF)),
        value_floor=float(cfg.get("value_floor", 0.0)),
        forced_coalition=cfg.get("forced_coalition"),
    )
    if scenario.forced_coalition:
        for sid in scenario.forced_coalition:
            params.stakeholder(sid)
    return params, scenario


def default_scenario() -> Tuple[NetworkParams, CollusionScenario]:
    return scenario_from_dict(DEFAULT_SCENARIO)


def load_scenario_config(path) -> dict:
    """Raw scenario mapping from a JSON file; ``"default"`` names the built-in one."""
    if str(path) == "default":
        return json.loads(json.dumps(DEFAULT_SCENARIO))
    with open(path, encoding="utf-8") as fh:
        text = "".join(line for line in fh if not line.lstrip().startswith("#"))
    return json.loads(text)


def load_scenario(path) -> Tuple[NetworkParams, CollusionScenario]:
    return scenario_from_dict(load_scenario_config(path))


# --------------------------------------------------------------------------
# episodes


@dataclass(frozen=True)
class Transaction:
    value_v: float
    confirmations_n: int
    block_value_B: float


@dataclass(frozen=True)
class Observables:
    """What the detector may see. Carries no ground-truth labels."""

    q_observed: float
    value_v: float
    confirmations_n: int
    histories: Mapping[str, History] = field(default_factory=dict)


@dataclass(frozen=True)
class Episode:
    seed: int
    transaction: Transaction
    coalition: Optional[Coalition]
    attack_attempted: bool
    attack_succeeded: Optional[bool]
    observables: Observables

    def __post_init__(self):
        if self.attack_attempted != (self.attack_succeeded is not None):
            raise ValueError("attack_succeeded must be set iff attack_attempted")
        if self.attack_attempted and self.coalition is None:
            raise ValueError("an attack needs a coalition")

    @property
    def pooled_q_true(self) -> float:
        return self.coalition.pooled_q if self.coalition else 0.0


def form_coalition(
    params: NetworkParams, scenario: CollusionScenario, rng: np.random.Generator
) -> Optional[Coalition]:
    """With probability ``collusion_rate``, include each stakeholder w.p. its dishonesty propensity."""
    gate = rng.random()
    picks = rng.random(len(params.stakeholders))
    if scenario.forced_coalition:
        return Coalition.of(params, scenario.forced_coalition)
    if gate >= scenario.collusion_rate:
        return None
    members = [s.id for s, u in zip(params.stakeholders, picks) if u < s.dishonesty_propensity]
    return Coalition.of(params, members) if members else None


def attempt_probability(coalition: Coalition, v: float, scenario: CollusionScenario) -> float:
    """Mix of the rational rule (weight ``1 - rho``) and a value-driven impulse (weight ``rho``)."""
    n = scenario.confirmations_n
    stake = AttackStake(v, n, scenario.block_value_B)
    rational = is_attack_rational(stake, coalition.split, scenario.attack_rule, n)
    ref = scenario.value_distribution.median()
    drive = v / (v + ref) if v + ref > 0 else 0.0
    rho = scenario.irrationality_rho
    return (1.0 - rho) * float(rational) + rho * drive


def generate_episode(
    params: NetworkParams,
    scenario: CollusionScenario,
    rng: np.random.Generator,
    seed: int = 0,
) -> Episode:
    """One transaction through the approval pipeline, possibly with an attack.

    The histories snapshot is taken from ``params`` as it stands before
    the episode; use :func:`apply_episode` to fold the outcome back in.
    """
    v = scenario.value_distribution.sample(rng, scenario.value_floor)
    coalition = form_coalition(params, scenario, rng)
    noise = rng.normal(0.0, 1.0)
    attempt_draw = rng.random()

    pooled = coalition.pooled_q if coalition else 0.0
    q_obs = min(1.0, max(0.0, pooled + scenario.observation_sigma * noise))

    attempted = False
    succeeded = None
    if coalition is not None and attempt_draw < attempt_probability(coalition, v, scenario):
        attempted = True
        outcome = simulate_block_race(coalition.split, scenario.confirmations_n, scenario.lead_cutoff, rng)
        succeeded = outcome.success

    return Episode(
        seed=seed,
        transaction=Transaction(v, scenario.confirmations_n, scenario.block_value_B),
        coalition=coalition,
        attack_attempted=attempted,
        attack_succeeded=succeeded,
        observables=Observables(q_obs, v, scenario.confirmations_n, params.histories()),
    )


def apply_episode(params: NetworkParams, episode: Episode) -> NetworkParams:
    """Every stakeholder sees one more transaction; attempted-attack members gain a defection."""
    colluders = set(episode.coalition.member_ids) if episode.attack_attempted else set()
    people = []
    for s in params.stakeholders:
        h = s.history
        people.append(replace(s, history=History(h.d + (s.id in colluders), h.t + 1)))
    return replace(params, stakeholders=tuple(people))


@dataclass
class Dataset:
    episodes: List[Episode]
    final_params: NetworkParams
    summary: Dict[str, float]


def summarize(episodes: Sequence[Episode]) -> Dict[str, float]:
    pos = [e.transaction.value_v for e in episodes if e.attack_attempted]
    neg = [e.transaction.value_v for e in episodes if not e.attack_attempted]
    return {
        "count": len(episodes),
        "attack_count": len(pos),
        "benign_count": len(neg),
        "prevalence": len(pos) / len(episodes) if episodes else 0.0,
        "mean_v_attack": float(np.mean(pos)) if pos else float("nan"),
        "mean_v_benign": float(np.mean(neg)) if neg else float("nan"),
    }


def generate_dataset(
    params: NetworkParams,
    scenario: CollusionScenario,
    count: int,
    seed: int,
    workers: int = 1,
) -> Dataset:
    """``count`` episodes from substreams of ``seed``; histories folded in index order."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")

    def draw(i):
        s = derive_seed(seed, i)
        return generate_episode(params, scenario, np.random.default_rng(s), seed=s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            drawn = list(pool.map(draw, range(count)))
    else:
        drawn = [draw(i) for i in range(count)]

    episodes = []
    current = params
    for ep in drawn:
        ep = replace(ep, observables=replace(ep.observables, histories=current.histories()))
        episodes.append(ep)
        current = apply_episode(current, ep)
    return Dataset(episodes, current, summarize(episodes))


# --------------------------------------------------------------------------
# trace files

TRACE_FIELDS = (
    "seed", "value_v", "confirmations_n", "block_value_B", "coalition_members",
    "pooled_q_true", "pooled_q_observed", "attack_attempted", "attack_succeeded", "histories",
)


class TraceError(ValueError):
    pass


def episode_to_record(ep: Episode) -> dict:
    rec = {
        "seed": ep.seed,
        "value_v": ep.transaction.value_v,
        "confirmations_n": ep.transaction.confirmations_n,
        "block_value_B": ep.transaction.block_value_B,
        "coalition_members": list(ep.coalition.member_ids) if ep.coalition else [],
        "pooled_q_true": ep.pooled_q_true,
        "pooled_q_observed": ep.observables.q_observed,
        "attack_attempted": ep.attack_attempted,
    }
    if ep.attack_attempted:
        rec["attack_succeeded"] = ep.attack_succeeded
    rec["histories"] = {k: {"d": h.d, "t": h.t} for k, h in ep.observables.histories.items()}
    return rec


def record_to_episode(rec: Mapping) -> Episode:
    expected = [f for f in TRACE_FIELDS if f != "attack_succeeded" or rec.get("attack_attempted")]
    if list(rec) != expected:
        raise ValueError(f"fields {list(rec)} do not match expected order {expected}")
    members = tuple(rec["coalition_members"])
    coalition = Coalition(members, float(rec["pooled_q_true"])) if members else None
    histories = {k: History(int(h["d"]), int(h["t"])) for k, h in rec["histories"].items()}
    tx = Transaction(float(rec["value_v"]), int(rec["confirmations_n"]), float(rec["block_value_B"]))
    return Episode(
        seed=int(rec["seed"]),
        transaction=tx,
        coalition=coalition,
        attack_attempted=bool(rec["attack_attempted"]),
        attack_succeeded=rec.get("attack_succeeded"),
        observables=Observables(float(rec["pooled_q_observed"]), tx.value_v, tx.confirmations_n, histories),
    )


def header_line(header: Mapping) -> str:
    return "# " + json.dumps(dict(header), sort_keys=True) + "\n"


def dumps_trace(episodes: Iterable[Episode], header: Optional[Mapping] = None) -> str:
    lines = [header_line(header)] if header is not None else []
    for ep in episodes:
        lines.append(json.dumps(episode_to_record(ep)) + "\n")
    return "".join(lines)


def write_trace(episodes: Iterable[Episode], path, header: Optional[Mapping] = None) -> None:
    Path(path).write_text(dumps_trace(episodes, header), encoding="utf-8")


def parse_trace(text: str) -> List[Episode]:
    episodes = []
    lines = text.splitlines(keepends=True)
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#") or not line.strip():
            continue
        if not line.endswith("\n"):
            raise TraceError(f"line {lineno}: truncated record (no terminating newline)")
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: malformed record: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise TraceError(f"line {lineno}: record is not an object")
        try:
            episodes.append(record_to_episode(rec))
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    return episodes


def read_trace(path) -> List[Episode]:
    return parse_trace(Path(path).read_text(encoding="utf-8"))
