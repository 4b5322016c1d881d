"""Boolean functions on the hypercube: DNF formulas, parity characters,
and exact correlation spectra via the fast Walsh-Hadamard transform.

Conventions used throughout the package:

* An assignment is an integer ``x`` in ``[0, 2**n)``; bit ``i`` of ``x``
  is the value of variable ``i``.
* Bits map to signs as ``0 -> +1`` and ``1 -> -1``, so the sign form of
  a Boolean function composes with parities, ``chi(a, x) ==
  (-1)**popcount(a & x)``.
* A spectrum is normalized: ``wht(g)[a]`` is the mean of ``g(x) *
  chi(a, x)`` over the cube.

Tables are dense length ``2**n`` arrays. The variable count is capped
(default 20, overridable through the ``QHS_LAB_CAP`` environment
variable) so a typo fails fast instead of allocating terabytes.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_CAP = 20


def table_cap() -> int:
    """Largest variable count for which dense tables may be built."""
    return int(os.environ.get("QHS_LAB_CAP", DEFAULT_CAP))


def check_cap(n: int) -> int:
    cap = table_cap()
    if not 0 <= n <= cap:
        raise ValueError(f"n={n} outside [0, {cap}]; set QHS_LAB_CAP to raise the cap")
    return int(n)


@dataclass
class DnfFormula:
    """Syntactic DNF: a disjunction of terms, each a conjunction of literals.

    ``terms[i]`` lists ``(variable, negated)`` pairs. No term may repeat a
    variable. An empty term list is the constant-false formula.
    """

    n: int
    terms: list

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("variable count must be nonnegative")
        self.terms = [[(int(v), bool(neg)) for v, neg in term] for term in self.terms]
        for term in self.terms:
            seen = set()
            for var, _ in term:
                if not 0 <= var < self.n:
                    raise ValueError(f"variable {var} out of range for n={self.n}")
                if var in seen:
                    raise ValueError(f"variable {var} repeated within a term")
                seen.add(var)

    def size(self) -> int:
        """Number of terms."""
        return len(self.terms)

    def truth_table(self) -> np.ndarray:
        """Dense bit table over all 2**n assignments."""
        check_cap(self.n)
        xs = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=bool)
        for term in self.terms:
            sat = np.ones(1 << self.n, dtype=bool)
            for var, neg in term:
                bit = (xs >> var) & 1
                sat &= (bit == 0) if neg else (bit == 1)
            out |= sat
        return out.astype(np.uint8)

    def sign_table(self) -> np.ndarray:
        """Truth table in sign form (0 -> +1, 1 -> -1), float64."""
        return to_pm1(self.truth_table()).astype(np.float64)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [[[var, int(neg)] for var, neg in term] for term in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DnfFormula":
        terms = [[(int(v), bool(neg)) for v, neg in term] for term in data["terms"]]
        return cls(int(data["n"]), terms)


def eval_dnf(formula: DnfFormula, x: int) -> int:
    """1 iff some term has every literal satisfied; the empty formula is 0."""
    for term in formula.terms:
        if all(((x >> var) & 1) != neg for var, neg in term):
            return 1
    return 0


def to_pm1(bit):
    """Sign form of a bit or bit array: 0 -> +1, 1 -> -1."""
    if isinstance(bit, (int, np.integer)):
        return 1 - 2 * int(bit)
    return 1 - 2 * np.asarray(bit).astype(np.int64)


def chi(a, x):
    """Parity character (-1)**popcount(a & x) on scalars or arrays."""
    par = np.bitwise_count(np.bitwise_and(np.asarray(a, dtype=np.int64), np.asarray(x, dtype=np.int64)))
    out = 1 - 2 * (par.astype(np.int64) & 1)
    if out.ndim == 0:
        return int(out)
    return out


def wht_unscaled(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly of a length 2**n vector.

    Returns a new float64 array whose entry ``a`` is the plain sum of
    ``values[x] * chi(a, x)``. Applying it twice multiplies by 2**n.
    """
    a = np.array(values, dtype=np.float64)
    if a.ndim != 1 or a.size == 0 or a.size & (a.size - 1):
        raise ValueError("input length must be a power of two")
    butterfly_axis0(a)
    return a


def butterfly_axis0(a: np.ndarray) -> np.ndarray:
    """In-place unnormalized butterfly along axis 0 (any trailing axes)."""
    m = a.shape[0]
    rest = a.shape[1:]
    h = 1
    while h < m:
        a4 = a.reshape((m // (2 * h), 2, h) + rest)
        low = a4[:, 0] - a4[:, 1]
        a4[:, 0] += a4[:, 1]
        a4[:, 1] = low
        h *= 2
    return a


def wht(table) -> np.ndarray:
    """Correlation spectrum: ``wht(g)[a]`` is the mean of ``g(x) chi(a, x)``."""
    a = wht_unscaled(table)
    a /= a.shape[0]
    return a


def heavy_coeffs(table, theta: float) -> list:
    """All parities whose coefficient magnitude reaches ``theta``.

    Sorted by descending magnitude, ties broken toward the smaller index.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    coeffs = wht(table)
    found = np.flatnonzero(np.abs(coeffs) >= theta)
    order = sorted(found, key=lambda a: (-abs(coeffs[a]), a))
    return [(int(a), float(coeffs[a])) for a in order]


def best_parity(table) -> tuple:
    """The most correlated parity of a table, heavy_coeffs tie rule.

    For the sign table of an s-term DNF the returned magnitude is at
    least 1/(2s+1).
    """
    coeffs = wht(table)
    mags = np.abs(coeffs)
    a = int(np.flatnonzero(mags == mags.max()).min())
    return a, float(coeffs[a])


def random_dnf(n: int, s: int, term_len: int, seed: int) -> DnfFormula:
    """Random s-term DNF, each term over term_len distinct variables."""
    if term_len > n:
        raise ValueError("term_len cannot exceed n")
    rng = np.random.default_rng(int(seed) & (2**64 - 1))
    terms = []
    for _ in range(s):
        variables = np.sort(rng.choice(n, size=term_len, replace=False))
        negations = rng.integers(0, 2, size=term_len)
        terms.append([(int(v), bool(g)) for v, g in zip(variables, negations)])
    return DnfFormula(n, terms)


def mux_dnf(t: int, u: int, word) -> DnfFormula:
    """Selector DNF over t address variables and u data variables.

    ``word`` supplies one symbol per address ``a`` in ``[0, 2**t)``:
    ``"0"`` drops the branch, ``"1"`` keeps the address conjunction
    alone, and ``"yJ"`` / ``"!yJ"`` (J counted from 1) appends data
    variable J, possibly negated. Address literals follow the inverted
    convention: address bit 0 keeps the positive literal, bit 1 negates
    it, so branch ``a`` fires exactly on the complementary address.
    """
    word = list(word)
    if len(word) != 1 << t:
        raise ValueError(f"word must have exactly {1 << t} symbols")
    terms = []
    for a, sym in enumerate(word):
        sym = str(sym).strip()
        if sym == "0":
            continue
        term = [(i, bool((a >> i) & 1)) for i in range(t)]
        if sym != "1":
            neg = sym.startswith("!")
            name = sym[1:] if neg else sym
            if not (name.startswith("y") and name[1:].isdigit()):
                raise ValueError(f"bad word symbol {sym!r}")
            j = int(name[1:])
            if not 1 <= j <= u:
                raise ValueError(f"data variable index {j} outside [1, {u}]")
            term.append((t + j - 1, neg))
        terms.append(term)
    return DnfFormula(t + u, terms)


def planted_parity(n: int, target: int, gamma: float, seed: int) -> np.ndarray:
    """Bit table whose sign form correlates with ``chi(target)`` at exactly
    2*gamma: the parity with a seeded (1/2 - gamma) fraction of outputs
    flipped. Requires (1/2 - gamma) * 2**n to be an integer so the
    correlation is exact, not approximate.
    """
    check_cap(n)
    flips = (0.5 - gamma) * (1 << n)
    if not 0 < gamma < 0.5 or flips != int(flips):
        raise ValueError("need gamma in (0, 1/2) with (1/2 - gamma) * 2**n integral")
    rng = np.random.default_rng(int(seed) & (2**64 - 1))
    xs = np.arange(1 << n, dtype=np.int64)
    bits = (np.bitwise_count(xs & np.int64(target)).astype(np.uint8)) & 1
    where = rng.choice(1 << n, size=int(flips), replace=False)
    bits[where] ^= 1
    return bits


def dnf_to_json(formula: DnfFormula) -> str:
    return json.dumps(formula.to_dict(), indent=2) + "\n"


def dnf_from_json(text: str) -> DnfFormula:
    return DnfFormula.from_dict(json.loads(text))


def save_dnf(formula: DnfFormula, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dnf_to_json(formula))


def load_dnf(path) -> DnfFormula:
    with open(path, "r", encoding="utf-8") as handle:
        return dnf_from_json(handle.read())
