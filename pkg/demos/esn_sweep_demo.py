"""Echo-state-network baseline: NMSE across node counts and spectral radii.

A reduced grid keeps this quick; the full benchmark grid is nodes
{2,5,10,20,50} x radii 0.01..1.00 x 100 trials (see the esn-sweep CLI task).
"""
from qreservoir import esn_sweep, narma_task

u, y = narma_task(2, length=100)
radii = tuple(r / 20 for r in range(1, 21))  # 0.05 .. 1.00

report = esn_sweep(u, y, (10, 70, 20), node_counts=(2, 5, 10, 20),
                   radii=radii, trials=25, input_weight_style="01", seed=0)

print(f"NARMA2, {report.trials} trials per cell, {len(report.radii)} radii, "
      f"input weights {report.input_weight_style}")
print(f"{'nodes':>6} {'global avg':>12} {'global min':>12} {'best radius':>12}")
for res in report.results:
    print(f"{res.nodes:>6} {res.global_average:>12.3e} "
          f"{res.global_minimum:>12.3e} {res.best_radius:>12.2f}")

best = report.results[-1]
print(f"\nper-radius trial means for {best.nodes} nodes (every 4th):")
for ri in range(0, len(radii), 4):
    print(f"  radius {report.radii[ri]:.2f}  mean NMSE "
          f"{best.per_radius_mean[ri]:.3e}")
