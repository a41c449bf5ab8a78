"""Simulate a consortium, train the detector, gate some transactions."""

# %%
import dataclasses

import numpy as np

from forkguard import collusion_detector as det
from forkguard.consortium_sim import default_scenario, generate_dataset

params, scenario = default_scenario()
train_set = generate_dataset(params, scenario, 10_000, seed=1)
test_set = generate_dataset(train_set.final_params, scenario, 2_000, seed=2)
print(train_set.summary)

# %%
model = det.fit_episodes(train_set.episodes, learning_rate=1.0, epochs=3000, seed=0)
for name, w in zip(det.FEATURE_NAMES, model.weights):
    print(f"{name:>18}: {w:+.3f}")
print("bias", round(model.bias, 3), "final loss", round(model.training_meta.final_loss, 4))

# %%
X, y = det.episode_features(test_set.episodes, model.training_meta.median_v)
m = det.evaluate(model, X, y)
print(f"held-out auc={m.auc:.3f} accuracy={m.accuracy:.3f} confusion={m.confusion_matrix}")

# %% [markdown]
# A two-bank coalition holds 60% of the hashrate. Every one of its
# transactions should be sent back for retry.

# %%
forced = dataclasses.replace(scenario, forced_coalition=("bank-a", "bank-b"), observation_sigma=0.02)
drawn = generate_dataset(test_set.final_params, forced, 200, seed=3)
verdicts = [det.detect(model, e.observables) for e in drawn.episodes]
print("cancel rate:", np.mean([v.decision is det.Decision.CANCEL_AND_RETRY for v in verdicts]))
