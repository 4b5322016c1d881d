"""Correlation spectra of small DNF formulas.

Builds a random DNF, prints its heaviest parity correlations, and checks
the floor every s-term DNF must respect: some parity correlates with
magnitude at least 1/(2s+1).
"""
import numpy as np

from qhslab import best_parity, heavy_coeffs, random_dnf, wht

n, s = 8, 3
formula = random_dnf(n, s, term_len=3, seed=11)
print(f"random DNF over n={n} variables, s={formula.size()} terms:")
for term in formula.terms:
    print("   " + " and ".join(("not " if neg else "") + f"x{v}" for v, neg in term))

signs = formula.sign_table()
coeffs = wht(signs)
print(f"\nParseval check: sum of squared coefficients = {np.sum(coeffs**2):.12f}")

print("\nheaviest parities (threshold 0.05):")
for a, c in heavy_coeffs(signs, 0.05)[:8]:
    members = [i for i in range(n) if (a >> i) & 1] or ["(empty)"]
    print(f"   parity {a:3d} over bits {members}: coefficient {c:+.4f}")

a_best, c_best = best_parity(signs)
floor = 1.0 / (2 * s + 1)
print(f"\nbest parity {a_best} has |coefficient| {abs(c_best):.4f}"
      f" >= 1/(2s+1) = {floor:.4f}: {abs(c_best) >= floor}")
