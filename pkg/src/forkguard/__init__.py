"""Majority-attack risk analysis and collusion detection for proof-of-work consortia."""

__version__ = "0.1.0"

from .race_math import (
    ConfirmationPolicy,
    HashratePartition,
    catch_up_probability,
    catch_up_recurrence_oracle,
    double_spend_risk,
    double_spend_risk_series,
    min_confirmations,
    negative_binomial_pmf,
)
from .payoff_game import (
    AttackStake,
    attack_utility,
    attacker_payoff,
    expected_attack_payoff,
    is_attack_rational,
)
from .consortium_sim import (
    Coalition,
    CollusionScenario,
    Episode,
    NetworkParams,
    StakeholderProfile,
    default_scenario,
    estimate_risk_monte_carlo,
    generate_dataset,
    generate_episode,
    read_trace,
    simulate_block_race,
    write_trace,
)
from .collusion_detector import (
    Decision,
    DetectionVerdict,
    LinearModel,
    decide,
    defect_probability,
    evaluate,
    extract_features,
    fit_episodes,
    predict,
    train,
)
