"""End-to-end run of the quantum-simulated learner.

Learns a random 2-term DNF on 10 variables, prints a few telemetry rows
from the report, and cross-checks the result against the exact-oracle
mode on the same instance.
"""
from qhslab import QhsConfig, learn_dnf, random_dnf

n, s, epsilon = 10, 2, 0.1
formula = random_dnf(n, s, 3, seed=9)

cfg = QhsConfig(n=n, s=s, epsilon=epsilon, delta=0.1, mode="quantum_sim", seed=1)
combined, report = learn_dnf(formula, cfg)
totals = report.totals()

print(f"quantum_sim: {totals['stages']} stages, final error {report.final_error}")
print(f"queries: {totals['quantum_queries']} quantum, "
      f"{totals['classical_queries']} classical (sample of {cfg.sample_size})")
print("\nfirst stages (t, estimate, parity, sign, advantage):")
for row in report.stages[:5]:
    print(f"   {row.t:3d}  {row.estimate:.4f}  {row.parity:4d}  {row.sign:+d}"
          f"  {row.advantage:.4f}")

exact_cfg = QhsConfig(n=n, s=s, epsilon=epsilon, mode="classical_exact", seed=1)
_, exact_report = learn_dnf(formula, exact_cfg)
print(f"\nclassical_exact on the same instance: "
      f"{exact_report.totals()['stages']} stages, final error {exact_report.final_error}")
print(f"error gap between modes: "
      f"{abs(report.final_error - exact_report.final_error):.4f} (< epsilon)")
