"""Recursive tower construction: for a target density alpha and a set B
given by an exact residue-cover oracle, build nested residue sets H_n mod n!
with marked elements h_n so that the sumset densities certify

    L_n  <=  alpha  <  U_n,      U_n - L_n <= |cover(n!)| / n!,

where L_n and U_n are the exact densities of (n!*N + H_n \\ {h_n}) + B and
(n!*N + H_n) + B.  The limit set A = intersection of the n!*N + H_n then has
sumset density exactly alpha; at finite depth every certificate is an exact
rational and is re-checkable from scratch.
"""

from __future__ import annotations

import bisect
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .density import DensityInterval
from .oracles import CoverOracle
from .sets import (
    PeriodicSet,
    ResidueSet,
    ResourceLimitError,
    dense_limit,
    rebase,
    sumset_mod,
)

__all__ = [
    "CertificateError",
    "Level",
    "Tower",
    "construct",
    "step",
    "check_claimA",
    "ClaimAReport",
    "a_bounds",
    "sum_bounds",
    "SumBounds",
    "membership",
    "count_A",
    "tower_to_json",
    "tower_from_json",
    "DEFAULT_MAX_DEPTH",
    "HARD_MAX_DEPTH",
]

DEFAULT_MAX_DEPTH = 10
HARD_MAX_DEPTH = 11

SCHEMA = "buckdens-tower-v1"


class CertificateError(Exception):
    """An exact certificate failed to hold."""


@dataclass(frozen=True)
class Level:
    n: int
    modulus: int            # n!
    H: ResidueSet           # subset of [0, n!)
    h: int                  # marked element, h in H
    k_chosen: int | None    # absent at level 1
    density_a: Fraction     # |H| / n!
    sum_lower: Fraction     # density of (n!N + H\{h}) + B
    sum_upper: Fraction     # density of (n!N + H) + B


@dataclass
class Tower:
    alpha: Fraction
    oracle_spec: str
    exact: bool
    levels: list[Level] = field(default_factory=list)
    trivial: bool = False   # alpha == 1, A = N

    @property
    def depth(self) -> int:
        return 0 if self.trivial else len(self.levels)

    @property
    def top(self) -> Level:
        return self.levels[-1]


def _base_level(cover_one: ResidueSet) -> Level:
    # H_1 = {0}, h_1 = 0; the empty H' gives sumset density 0, the full
    # class gives density 1 (cover mod 1 is {0} for any non-empty B)
    if len(cover_one) == 0:
        raise CertificateError("cover of B mod 1 is empty; B must be non-empty")
    return Level(n=1, modulus=1, H=ResidueSet(1, [0]), h=0, k_chosen=None,
                 density_a=Fraction(1), sum_lower=Fraction(0), sum_upper=Fraction(1))


def step(prev: Level, cover_next: ResidueSet, alpha: Fraction, *,
         linear_scan: bool = False) -> Level:
    """One inductive step from level m to level m+1.

    Works modulo (m+1)!.  The candidate for a cutoff k is

        (H_m' rebased) ∪ {h_m + j*m! : j = 0..k},

    whose sumset density with cover((m+1)!) is non-decreasing in k because
    the candidates are nested; k_{m+1} is the least k making it exceed
    alpha strictly.  The base sumset is computed once and each extra class
    is a single rotated OR of the cover bitmap.
    """
    m = prev.n
    fact_m = prev.modulus
    big = fact_m * (m + 1)
    if cover_next.modulus != big:
        raise ValueError(f"cover has modulus {cover_next.modulus}, expected {big}")

    h_prime = prev.H.discard(prev.h)
    base = rebase(PeriodicSet(fact_m, h_prime), big)
    cover_bits = cover_next.bits()

    s_bits = sumset_mod(base, cover_next).residues.bits().copy()
    base_density = Fraction(int(np.count_nonzero(s_bits)), big)
    densities: list[Fraction] = []
    for j in range(m + 1):
        kernels.or_rotated(s_bits, cover_bits, (prev.h + j * fact_m) % big)
        densities.append(Fraction(int(np.count_nonzero(s_bits)), big))

    if linear_scan:
        k = next((j for j, d in enumerate(densities) if d > alpha), m + 1)
    else:
        k = bisect.bisect_right(densities, alpha)
    if k > m:
        raise CertificateError(
            f"no admissible cutoff at level {m + 1}: max candidate density "
            f"{densities[-1]} fails to exceed alpha={alpha}")

    h_bits = base.residues.bits().copy()
    for j in range(k + 1):
        h_bits[(prev.h + j * fact_m) % big] = 1
    h_next = prev.h + k * fact_m

    return Level(
        n=m + 1,
        modulus=big,
        H=ResidueSet.from_bits(h_bits),
        h=h_next,
        k_chosen=k,
        density_a=Fraction(int(np.count_nonzero(h_bits)), big),
        sum_lower=densities[k - 1] if k > 0 else base_density,
        sum_upper=densities[k],
    )


def construct(oracle: CoverOracle, alpha, depth: int, *,
              linear_scan: bool = False, allow_deep: bool = False) -> Tower:
    """Build a depth-``depth`` tower targeting sumset density ``alpha``.

    alpha = 1 short-circuits to the trivial tower denoting A = N.  Depth is
    capped so that depth! stays within the dense-bitmap budget (default cap
    10, 11 with ``allow_deep``).
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cap = HARD_MAX_DEPTH if allow_deep else DEFAULT_MAX_DEPTH
    if depth > cap:
        raise ResourceLimitError(
            f"depth {depth} exceeds the cap {cap}"
            + ("" if allow_deep else " (use allow_deep for 11)"))
    if math.factorial(depth) > dense_limit():
        raise ResourceLimitError(
            f"{depth}! = {math.factorial(depth)} exceeds the dense budget {dense_limit()}")

    if alpha == 1:
        return Tower(alpha=alpha, oracle_spec=oracle.name, exact=oracle.exact,
                     levels=[], trivial=True)
    if not oracle.exact:
        warnings.warn(
            f"oracle {oracle.name!r} is under-approximate; the smallness "
            "hypothesis on B is unverified and all certificates are heuristic")

    levels = [_base_level(oracle.cover_cached(1))]
    fact = 1
    for n in range(2, depth + 1):
        fact *= n
        cover = oracle.cover_cached(fact)
        levels.append(step(levels[-1], cover, alpha, linear_scan=linear_scan))
    return Tower(alpha=alpha, oracle_spec=oracle.name, exact=oracle.exact,
                 levels=levels)


# ---------------------------------------------------------------------------
# certificates

@dataclass
class LevelCheck:
    n: int
    lower: Fraction
    upper: Fraction
    bracket_ok: bool          # L_n <= alpha < U_n
    stored_ok: bool           # recomputed values match the stored ones
    nesting_ok: bool | None   # inclusions into/over the next level


@dataclass
class ClaimAReport:
    alpha: Fraction
    checks: list[LevelCheck]
    heuristic: bool

    @property
    def ok(self) -> bool:
        return all(c.bracket_ok and c.stored_ok and c.nesting_ok is not False
                   for c in self.checks)

    def first_violation(self) -> int | None:
        for c in self.checks:
            if not (c.bracket_ok and c.stored_ok and c.nesting_ok is not False):
                return c.n
        return None


def check_claimA(t: Tower, oracle: CoverOracle) -> ClaimAReport:
    """Recompute every level certificate from scratch and test the nesting
    inclusions between consecutive levels."""
    checks: list[LevelCheck] = []
    if t.trivial:
        return ClaimAReport(t.alpha, checks, heuristic=not oracle.exact)
    for i, lv in enumerate(t.levels):
        cover = oracle.cover_cached(lv.modulus)
        h_prime = lv.H.discard(lv.h)
        lower = sumset_mod(PeriodicSet(lv.modulus, h_prime), cover).density()
        upper = sumset_mod(PeriodicSet(lv.modulus, lv.H), cover).density()
        bracket_ok = lower <= t.alpha < upper
        stored_ok = (lower == lv.sum_lower and upper == lv.sum_upper
                     and lv.h in lv.H
                     and lv.density_a == Fraction(len(lv.H), lv.modulus))
        nesting_ok: bool | None = None
        if i + 1 < len(t.levels):
            nxt = t.levels[i + 1]
            lo_side = rebase(PeriodicSet(lv.modulus, h_prime), nxt.modulus)
            hi_side = rebase(PeriodicSet(lv.modulus, lv.H), nxt.modulus)
            nesting_ok = (lo_side.residues.issubset(nxt.H)
                          and nxt.H.issubset(hi_side.residues))
        checks.append(LevelCheck(lv.n, lower, upper, bracket_ok, stored_ok, nesting_ok))
    return ClaimAReport(t.alpha, checks, heuristic=not oracle.exact)


def a_bounds(t: Tower) -> DensityInterval:
    """Exact sandwich for the density of A: [d(A_N) - 1/N!, d(A_N)]."""
    if t.trivial:
        return DensityInterval(Fraction(1), Fraction(1))
    top = t.top
    return DensityInterval(top.density_a - Fraction(1, top.modulus), top.density_a)


@dataclass
class SumBounds:
    per_level: list[tuple[int, Fraction, Fraction, Fraction]]  # (n, L, U, eps)
    final: DensityInterval
    heuristic: bool


def sum_bounds(t: Tower, oracle: CoverOracle) -> SumBounds:
    """Per-level certificate intervals (L_n, U_n] with eps_n = |cover(n!)|/n!,
    and the final interval certifying alpha - eps_N < b(A+B) <= alpha + eps_N."""
    if t.trivial:
        return SumBounds([], DensityInterval(Fraction(1), Fraction(1)),
                         heuristic=not oracle.exact)
    rows = []
    for lv in t.levels:
        eps = Fraction(len(oracle.cover_cached(lv.modulus)), lv.modulus)
        rows.append((lv.n, lv.sum_lower, lv.sum_upper, eps))
    top = t.top
    return SumBounds(rows, DensityInterval(top.sum_lower, top.sum_upper),
                     heuristic=not oracle.exact)


def membership(t: Tower, x: int) -> str:
    """'out' (definitive), 'in_at_depth' (definitely in A: the only residues
    removed beyond depth N live in the class of h_N mod N!), or 'exceptional'
    (in A_N, congruent to h_N; undecidable at this depth)."""
    if x < 0:
        raise ValueError("membership is defined on the non-negative integers")
    if t.trivial:
        return "in_at_depth"
    for lv in t.levels:
        if (x % lv.modulus) not in lv.H:
            return "out"
    top = t.top
    return "exceptional" if x % top.modulus == top.h else "in_at_depth"


def count_A(t: Tower, horizon: int) -> tuple[int, int]:
    """Integer interval for |A ∩ [1, horizon]|.

    Upper bound counts A_N; the lower bound removes the marked class of h_N
    (which contains every deeper removal) plus an outward-rounded tail
    allowance of horizon * sum_{n>N} 1/n! < horizon * 2/(N+1)!."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if t.trivial:
        return horizon, horizon
    top = t.top
    ind = kernels.tile_periodic(top.H.bits(), horizon + 1)
    upper = int(np.count_nonzero(ind[1:]))
    first = top.h if top.h >= 1 else top.modulus
    marked = 0 if first > horizon else (horizon - first) // top.modulus + 1
    tail = math.ceil(Fraction(2 * horizon, math.factorial(top.n + 1)))
    lower = max(0, upper - marked - tail)
    return lower, upper


# ---------------------------------------------------------------------------
# serialization (deterministic; round-trips byte-exactly)

def _encode_residue_set(rs: ResidueSet) -> dict:
    packed = np.packbits(rs.bits(), bitorder="little")
    return {"encoding": "hex-bitmap-le", "data": packed.tobytes().hex()}


def _decode_residue_set(modulus: int, doc: dict) -> ResidueSet:
    if doc.get("encoding") != "hex-bitmap-le":
        raise ValueError(f"unknown residue-set encoding {doc.get('encoding')!r}")
    packed = np.frombuffer(bytes.fromhex(doc["data"]), dtype=np.uint8)
    bits = np.unpackbits(packed, bitorder="little")[:modulus].astype(np.uint8)
    if bits.shape[0] != modulus:
        raise ValueError("bitmap shorter than modulus")
    return ResidueSet.from_bits(bits)


def tower_to_json(t: Tower, config: dict | None = None) -> str:
    doc = {
        "schema": SCHEMA,
        "alpha": str(t.alpha),
        "oracle": t.oracle_spec,
        "exact": t.exact,
        "trivial": t.trivial,
        "config": config,
        "levels": [
            {
                "n": lv.n,
                "k_chosen": lv.k_chosen,
                "h": lv.h,
                "H": _encode_residue_set(lv.H),
                "densityA": str(lv.density_a),
                "L": str(lv.sum_lower),
                "U": str(lv.sum_upper),
            }
            for lv in t.levels
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def tower_from_json(text: str) -> tuple[Tower, dict | None]:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported tower schema {doc.get('schema')!r}")
    levels = []
    for lvdoc in doc["levels"]:
        n = int(lvdoc["n"])
        modulus = math.factorial(n)
        levels.append(Level(
            n=n,
            modulus=modulus,
            H=_decode_residue_set(modulus, lvdoc["H"]),
            h=int(lvdoc["h"]),
            k_chosen=lvdoc["k_chosen"],
            density_a=Fraction(lvdoc["densityA"]),
            sum_lower=Fraction(lvdoc["L"]),
            sum_upper=Fraction(lvdoc["U"]),
        ))
    tower = Tower(alpha=Fraction(doc["alpha"]), oracle_spec=doc["oracle"],
                  exact=bool(doc["exact"]), levels=levels,
                  trivial=bool(doc["trivial"]))
    return tower, doc.get("config")
