#!/usr/bin/env python3

import json
from pathlib import Path

from partial_copula.estimate import joint_vs_stepwise_experiment

SEEDS = (42, 43, 44)
SCENARIOS = ("simplified", "nonsimplified", "nonsimplified-cubic")

flags = {}
for scenario in SCENARIOS:
    for seed in SEEDS:
        report = joint_vs_stepwise_experiment(scenario, n=20000, replications=20, seed=seed)
        print(report.summary())
        flags[f"{scenario}/{seed}"] = list(report.flagged)

out = Path.cwd() / "scripts" / "pilot_flags.json"
with open(out, "w") as f:
    json.dump(flags, f, indent=2)

print("Done!")
