"""Checking that reservoir features settle before the readout is trained.

Runs a noisy reservoir on the benchmark drive, then compares per-channel
means and variances between the training and testing phases. Large gaps would
mean the washout was too short or the dynamics drift; small gaps justify
fitting on one window and scoring on the other.
"""
from qreservoir import (ReservoirConfig, SubsystemLayout, gap_summary,
                        narma_task, preset_profile, run_reservoir,
                        stationarity_report)

SPLIT = (10, 70, 20)  # washout, train, test

inputs, _ = narma_task(2)
config = ReservoirConfig(SubsystemLayout.default(4), scale=2.0,
                         profile=preset_profile("strong-dense", 4))
features = run_reservoir(inputs, config)

report = stationarity_report(features, SPLIT)
print(report.to_text())

print("\nchannels ranked by train/test mean gap:")
for g in gap_summary(report):
    print(f"  z{g.channel}: |mean gap| {g.abs_mean_gap:.2e}, "
          f"|log var ratio| {g.log_var_gap:.2e}")

worst = gap_summary(report)[0]
rel = worst.abs_mean_gap / report.abs_mean_train[worst.channel]
print(f"\nworst channel z{worst.channel}: mean gap {worst.abs_mean_gap:.2e}, "
      f"{rel:.0%} of its training-phase magnitude")

