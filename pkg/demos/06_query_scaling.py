"""Query counts across a small (s, epsilon) grid.

Sweeps term counts at fixed accuracy and fits the log-log slope of the
quantum query total against s; the classical total tracks the
configured sample formula exactly.
"""
from qhslab import query_sweep

grid = [(10, s, 0.2) for s in (1, 2, 4)]
result = query_sweep(grid, n_seeds=2, mode="quantum_sim", base_seed=5)

print(" n  s  epsilon  seed  stages  quantum  classical")
for row in result["rows"]:
    print(f"{row['n']:2d} {row['s']:2d}  {row['epsilon']:.2f}    {row['seed_index']}"
          f"   {row['stages']:5d}  {row['quantum_queries']:7d}  {row['classical_queries']:9d}")

for fit in result["fits"]["quantum_vs_s"]:
    print(f"\nlog-log slope of quantum queries vs s at epsilon={fit['epsilon']}: "
          f"{fit['slope']:.2f}")
