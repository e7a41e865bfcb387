"""Residue-cover oracles.

For a fixed set B, ``cover(m)`` is the set of residues r with
``(m*N + r) ∩ B != ∅``.  The built-in oracles (primes, factorials, perfect
powers, finite sets) are exact at every modulus in budget; covers obtained
by enumerating a predicate up to a bound are under-approximate and carry
``exact=False``, which downstream certificates surface as heuristic.
"""

from __future__ import annotations

import importlib.util
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy
from sympy.functions.combinatorial.numbers import reduced_totient

from .sets import ResidueSet, ResourceLimitError, dense_limit

__all__ = [
    "CoverOracle",
    "PrimesOracle",
    "FactorialsOracle",
    "PerfectPowersOracle",
    "FiniteOracle",
    "EnumeratedOracle",
    "primes_cover",
    "factorials_cover",
    "perfect_powers_cover",
    "finite_cover",
    "enumerated_cover",
    "SmallnessProfile",
    "smallness_profile",
    "parse_oracle",
    "sieve_primes",
]


class CoverOracle:
    """Base oracle: a named set B with cover and enumeration access."""

    name: str
    exact: bool

    def cover(self, m: int) -> ResidueSet:
        raise NotImplementedError

    def enumerate(self, bound: int) -> np.ndarray:
        """Sorted int64 array of the members of B in [0, bound]."""
        raise NotImplementedError

    def __init__(self):
        self._cover_cache: dict[int, ResidueSet] = {}

    def cover_cached(self, m: int) -> ResidueSet:
        c = self._cover_cache.get(m)
        if c is None:
            c = self.cover(m)
            self._cover_cache[m] = c
        return c


# ---------------------------------------------------------------------------
# primes

_SIEVE_SEGMENT = 1 << 22


def sieve_primes(bound: int) -> np.ndarray:
    """Primes <= bound via a segmented sieve of Eratosthenes."""
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    root = int(math.isqrt(bound))
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, int(math.isqrt(root)) + 1):
        if base[p]:
            base[p * p:: p] = False
    base_primes = np.nonzero(base)[0]
    chunks = [base_primes[base_primes <= bound]]
    for lo in range(root + 1, bound + 1, _SIEVE_SEGMENT):
        hi = min(lo + _SIEVE_SEGMENT, bound + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base_primes:
            start = -(lo // -p) * p  # first multiple of p >= lo
            if start < hi:
                seg[start - lo:: p] = False
        chunks.append(np.nonzero(seg)[0] + lo)
    return np.concatenate(chunks).astype(np.int64)


def primes_cover(m: int) -> ResidueSet:
    """Exact cover of the primes mod m: every class coprime to m contains a
    prime (Dirichlet), plus the classes of the finitely many primes dividing m.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return ResidueSet(1, [0])
    if m > dense_limit():
        raise ResourceLimitError(
            f"primes cover at modulus {m} exceeds the dense budget")
    bits = (np.gcd(np.arange(m, dtype=np.int64), m) == 1).astype(np.uint8)
    for p in sympy.factorint(m):
        bits[p % m] = 1
    return ResidueSet.from_bits(bits)


class PrimesOracle(CoverOracle):
    name = "primes"
    exact = True

    def cover(self, m: int) -> ResidueSet:
        return primes_cover(m)

    def enumerate(self, bound: int) -> np.ndarray:
        return sieve_primes(bound)


# ---------------------------------------------------------------------------
# factorials  B = {j! : j >= 1}

def factorials_cover(m: int) -> ResidueSet:
    """Residues of j! mod m; the iteration stops once j! ≡ 0 (mod m), since
    every later factorial is a multiple of m."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return ResidueSet(1, [0])
    residues = set()
    f, j = 1, 1
    while True:
        residues.add(f % m)
        if f % m == 0:
            break
        j += 1
        f = (f * j) % m
    return ResidueSet(m, residues)


class FactorialsOracle(CoverOracle):
    name = "factorials"
    exact = True

    def cover(self, m: int) -> ResidueSet:
        return factorials_cover(m)

    def enumerate(self, bound: int) -> np.ndarray:
        vals, f, j = [], 1, 1
        while f <= bound:
            vals.append(f)
            j += 1
            f *= j
        return np.array(sorted(set(vals)), dtype=np.int64)


# ---------------------------------------------------------------------------
# perfect powers  B = {a^k : a >= 0, k >= 2}

def _pow_mod_vec(base: np.ndarray, exp: int, m: int) -> np.ndarray:
    # square-and-multiply; m <= 2^28 keeps int64 products exact
    result = np.ones_like(base)
    b = base % m
    e = exp
    while e:
        if e & 1:
            result = result * b % m
        b = b * b % m
        e >>= 1
    return result


def perfect_powers_cover(m: int) -> ResidueSet:
    """Exact cover of the perfect powers mod m.

    The k-th power image mod m depends on k only through min(k, v) and
    gcd(k, lambda(m)), where v is the largest prime-power exponent in m and
    lambda is the Carmichael function.  For k >= v every image is contained
    in the image of any exponent coprime to lambda(m) (units map onto units,
    non-units collapse onto 0 componentwise), so it suffices to take the
    exact images for k = 2, ..., v-1 plus one exponent k0 >= max(2, v)
    with gcd(k0, lambda(m)) = 1.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return ResidueSet(1, [0])
    if m > dense_limit():
        raise ResourceLimitError(
            f"perfect-powers cover at modulus {m} exceeds the dense budget")
    factors = sympy.factorint(m)
    v_max = max(factors.values())
    lam = int(reduced_totient(m))
    exponents = list(range(2, v_max))
    k0 = max(2, v_max)
    while math.gcd(k0, lam) != 1:
        k0 += 1
    exponents.append(k0)
    base = np.arange(m, dtype=np.int64)
    bits = np.zeros(m, dtype=np.uint8)
    for k in exponents:
        bits[_pow_mod_vec(base, k, m)] = 1
    return ResidueSet.from_bits(bits)


class PerfectPowersOracle(CoverOracle):
    name = "powers"
    exact = True

    def cover(self, m: int) -> ResidueSet:
        return perfect_powers_cover(m)

    def enumerate(self, bound: int) -> np.ndarray:
        vals = {0, 1} if bound >= 1 else ({0} if bound >= 0 else set())
        k = 2
        while 2 ** k <= bound:
            a = 2
            while a ** k <= bound:
                vals.add(a ** k)
                a += 1
            k += 1
        return np.array(sorted(vals), dtype=np.int64)


# ---------------------------------------------------------------------------
# finite sets and enumerated predicates

def finite_cover(s: Sequence[int], m: int) -> ResidueSet:
    if m < 1:
        raise ValueError("modulus must be positive")
    values = list(s)
    if not values:
        raise ValueError("B must be non-empty")
    return ResidueSet(m, (v % m for v in values))


class FiniteOracle(CoverOracle):
    exact = True

    def __init__(self, values: Sequence[int], name: str | None = None):
        super().__init__()
        vals = sorted(set(int(v) for v in values))
        if not vals:
            raise ValueError("B must be non-empty")
        if vals[0] < 0:
            raise ValueError("B must live in the non-negative integers")
        self.values = vals
        self.name = name or ("finite:" + ",".join(map(str, vals[:8]))
                             + (",..." if len(vals) > 8 else ""))

    def cover(self, m: int) -> ResidueSet:
        return finite_cover(self.values, m)

    def enumerate(self, bound: int) -> np.ndarray:
        return np.array([v for v in self.values if v <= bound], dtype=np.int64)


def enumerated_cover(pred: Callable[[int], bool], bound: int, m: int) -> ResidueSet:
    """Under-approximate cover {b mod m : b <= bound, pred(b)}."""
    if bound < 1:
        raise ValueError("enumeration bound must be at least 1")
    members = [b for b in range(bound + 1) if pred(b)]
    if not members:
        warnings.warn("predicate matched nothing up to the bound; "
                      "B is required to be non-empty")
        return ResidueSet(m, [])
    return ResidueSet(m, (b % m for b in members))


class EnumeratedOracle(CoverOracle):
    """Oracle for a user predicate, exact only up to its enumeration bound."""

    exact = False

    def __init__(self, pred: Callable[[int], bool], bound: int, name: str = "pred-enum"):
        super().__init__()
        self.pred = pred
        self.bound = bound
        self.name = name
        self._members: np.ndarray | None = None

    def _materialize(self) -> np.ndarray:
        if self._members is None:
            self._members = np.array(
                [b for b in range(self.bound + 1) if self.pred(b)], dtype=np.int64)
        return self._members

    def cover(self, m: int) -> ResidueSet:
        members = self._materialize()
        if members.size == 0:
            warnings.warn("predicate matched nothing up to the bound; "
                          "B is required to be non-empty")
            return ResidueSet(m, [])
        return ResidueSet(m, members % m)

    def enumerate(self, bound: int) -> np.ndarray:
        members = self._materialize()
        return members[members <= min(bound, self.bound)]


# ---------------------------------------------------------------------------
# smallness profiles

@dataclass
class SmallnessProfile:
    oracle: str
    exact: bool
    rows: list[tuple[int, int, Fraction]]  # (n, |cover(n!)|, eps_n)
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "exact": self.exact,
            "rows": [{"n": n, "cover_size": c, "epsilon": str(e)}
                     for n, c, e in self.rows],
            "verdict": self.verdict,
        }


def smallness_profile(oracle: CoverOracle, n_max: int) -> SmallnessProfile:
    """eps_n = |cover(n!)| / n! for n = 1..n_max, with a coarse verdict.

    ``eps_n -> 0`` is the defining property of a small set; a profile pinned
    at 1 certifies non-smallness, anything else is reported as observed.
    """
    rows = []
    f = 1
    for n in range(1, n_max + 1):
        f *= n
        c = oracle.cover_cached(f)
        rows.append((n, len(c), Fraction(len(c), f)))
    eps = [row[2] for row in rows]
    if eps[-1] == 1:
        verdict = "not small"
    elif all(a >= b for a, b in zip(eps, eps[1:])) and eps[-1] < 1:
        verdict = "consistent with small"
    else:
        verdict = "inconclusive"
    if not oracle.exact:
        verdict += " (heuristic: under-approximate cover)"
    return SmallnessProfile(oracle.name, oracle.exact, rows, verdict)


# ---------------------------------------------------------------------------
# CLI-facing oracle specs

def _load_predicate(path: str) -> Callable[[int], bool]:
    spec = importlib.util.spec_from_file_location("buckdens_user_pred", path)
    if spec is None or spec.loader is None:
        raise ValueError(f"cannot load predicate module from {path}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    if not hasattr(module, "member"):
        raise ValueError(f"{path} must define member(n) -> bool")
    return module.member


def parse_oracle(spec: str) -> CoverOracle:
    """Parse an oracle spec string.

    Supported: ``primes``, ``factorials``, ``powers``, ``finite:<comma-list>``,
    ``file:<path>`` (one integer per line), ``pred-enum:<path>:<bound>``.
    """
    spec = spec.strip()
    if spec == "primes":
        return PrimesOracle()
    if spec == "factorials":
        return FactorialsOracle()
    if spec == "powers":
        return PerfectPowersOracle()
    if spec.startswith("finite:"):
        body = spec[len("finite:"):]
        try:
            values = [int(t) for t in body.split(",") if t.strip()]
        except ValueError as e:
            raise ValueError(f"bad finite oracle spec {spec!r}") from e
        return FiniteOracle(values, name=spec)
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        with open(path) as fh:
            values = [int(line) for line in fh if line.strip()]
        return FiniteOracle(values, name=spec)
    if spec.startswith("pred-enum:"):
        body = spec[len("pred-enum:"):]
        path, sep, bound_s = body.rpartition(":")
        if not sep or not path:
            raise ValueError(f"bad pred-enum spec {spec!r}, want pred-enum:<path>:<bound>")
        return EnumeratedOracle(_load_predicate(path), int(bound_s), name=spec)
    raise ValueError(f"unknown oracle spec {spec!r}")
