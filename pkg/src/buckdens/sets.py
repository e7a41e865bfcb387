"""Exact algebra of periodic integer sets (finite unions of arithmetic
progressions), with exact rational densities.

A :class:`PeriodicSet` with modulus ``k`` and residue set ``H`` denotes the
subset ``k*N + H`` of the non-negative integers.  All densities are
:class:`fractions.Fraction`; no floats appear anywhere in this module.

Residue sets are stored as dense uint8 bitmaps while the modulus fits the
dense budget (default ``2**28``, override with ``BUCKDENS_DENSE_LIMIT``) and
as sorted tuples beyond it.  The representation is semantically invisible.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np
import sympy

from . import kernels

__all__ = [
    "ResourceLimitError",
    "dense_limit",
    "ResidueSet",
    "PeriodicSet",
    "make_periodic",
    "density",
    "union",
    "intersect",
    "complement",
    "affine",
    "sumset_mod",
    "rebase",
    "member",
    "canonicalize",
    "naturals",
    "dumps_periodic",
    "loads_periodic",
]

DEFAULT_DENSE_LIMIT = 1 << 28

# sparse fallbacks refuse to materialize more residues than this
SPARSE_CAP = 1 << 22

# sumset strategy: shift-OR when the smaller operand has at most this many
# residues (or the modulus is tiny), FFT support convolution otherwise
_SHIFT_MAX = 64
_FFT_MIN_MODULUS = 1 << 14


class ResourceLimitError(Exception):
    """An operation would exceed the configured memory budget."""


def dense_limit() -> int:
    value = os.environ.get("BUCKDENS_DENSE_LIMIT")
    return int(value) if value else DEFAULT_DENSE_LIMIT


class ResidueSet:
    """A subset of ``[0, modulus)``, dense bitmap or sorted sparse tuple."""

    __slots__ = ("modulus", "_bits", "_sparse")

    def __init__(self, modulus: int, residues: Iterable[int] = (), *,
                 _bits: np.ndarray | None = None):
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        self.modulus = int(modulus)
        if _bits is not None:
            assert _bits.shape[0] == modulus
            self._bits = np.ascontiguousarray(_bits, dtype=np.uint8)
            self._sparse = None
            return
        if modulus <= dense_limit():
            bits = np.zeros(modulus, dtype=np.uint8)
            if isinstance(residues, np.ndarray):
                bits[residues.astype(np.int64) % modulus] = 1
            else:
                for r in residues:
                    bits[r % modulus] = 1
            self._bits = bits
            self._sparse = None
        else:
            reduced = sorted({int(r) % modulus for r in residues})
            if len(reduced) > SPARSE_CAP:
                raise ResourceLimitError(
                    f"{len(reduced)} residues exceed the sparse cap {SPARSE_CAP}")
            self._bits = None
            self._sparse = tuple(reduced)

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "ResidueSet":
        return cls(bits.shape[0], _bits=bits)

    # -- queries ------------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        return self._bits is not None

    def __len__(self) -> int:
        if self._bits is not None:
            return int(np.count_nonzero(self._bits))
        return len(self._sparse)

    def __contains__(self, r: int) -> bool:
        r %= self.modulus
        if self._bits is not None:
            return bool(self._bits[r])
        import bisect
        i = bisect.bisect_left(self._sparse, r)
        return i < len(self._sparse) and self._sparse[i] == r

    def __iter__(self) -> Iterator[int]:
        return iter(self.residues())

    def residues(self) -> list[int]:
        """Sorted list of members."""
        if self._bits is not None:
            return [int(r) for r in np.nonzero(self._bits)[0]]
        return list(self._sparse)

    def bits(self) -> np.ndarray:
        """Dense 0/1 view; materializes a sparse set if the modulus allows."""
        if self._bits is not None:
            return self._bits
        if self.modulus > dense_limit():
            raise ResourceLimitError(
                f"modulus {self.modulus} exceeds dense budget {dense_limit()}")
        bits = np.zeros(self.modulus, dtype=np.uint8)
        bits[np.fromiter(self._sparse, dtype=np.int64, count=len(self._sparse))] = 1
        return bits

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueSet):
            return NotImplemented
        if self.modulus != other.modulus:
            return False
        if self._bits is not None and other._bits is not None:
            return bool(np.array_equal(self._bits, other._bits))
        return self.residues() == other.residues()

    def __hash__(self):
        return hash((self.modulus, tuple(self.residues())))

    def __repr__(self):
        rs = self.residues()
        shown = rs if len(rs) <= 12 else rs[:12] + ["..."]
        return f"ResidueSet(mod={self.modulus}, {{{', '.join(map(str, shown))}}})"

    def issubset(self, other: "ResidueSet") -> bool:
        if self.modulus != other.modulus:
            raise ValueError("issubset requires equal moduli")
        if self._bits is not None and other._bits is not None:
            return not np.any(self._bits > other._bits)
        return set(self.residues()) <= set(other.residues())

    # -- same-modulus algebra ----------------------------------------------

    def shift(self, c: int) -> "ResidueSet":
        """The set ``{(r + c) mod modulus}``."""
        c %= self.modulus
        if self._bits is not None:
            out = np.zeros_like(self._bits)
            kernels.or_rotated(out, self._bits, c)
            return ResidueSet.from_bits(out)
        return ResidueSet(self.modulus, ((r + c) % self.modulus for r in self._sparse))

    def union_same(self, other: "ResidueSet") -> "ResidueSet":
        self._check_same(other)
        if self._bits is not None and other._bits is not None:
            return ResidueSet.from_bits(self._bits | other._bits)
        return ResidueSet(self.modulus, self.residues() + other.residues())

    def intersect_same(self, other: "ResidueSet") -> "ResidueSet":
        self._check_same(other)
        if self._bits is not None and other._bits is not None:
            return ResidueSet.from_bits(self._bits & other._bits)
        return ResidueSet(self.modulus, set(self.residues()) & set(other.residues()))

    def complement_same(self) -> "ResidueSet":
        if self._bits is not None:
            return ResidueSet.from_bits(np.uint8(1) - self._bits)
        members = set(self._sparse)
        if self.modulus - len(members) > SPARSE_CAP:
            raise ResourceLimitError("complement of a sparse set is too large")
        return ResidueSet(self.modulus, (r for r in range(self.modulus) if r not in members))

    def discard(self, r: int) -> "ResidueSet":
        r %= self.modulus
        if self._bits is not None:
            out = self._bits.copy()
            out[r] = 0
            return ResidueSet.from_bits(out)
        return ResidueSet(self.modulus, (x for x in self._sparse if x != r))

    def _check_same(self, other: "ResidueSet") -> None:
        if self.modulus != other.modulus:
            raise ValueError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}")


class PeriodicSet:
    """The set ``modulus * N + residues`` (empty residues = empty set)."""

    __slots__ = ("modulus", "residues")

    def __init__(self, modulus: int, residues: ResidueSet):
        if residues.modulus != modulus:
            raise ValueError("residue set modulus disagrees with period")
        self.modulus = int(modulus)
        self.residues = residues

    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.modulus)

    def member(self, x: int) -> bool:
        if x < 0:
            raise ValueError("periodic sets live on the non-negative integers")
        return (x % self.modulus) in self.residues

    def is_empty(self) -> bool:
        return len(self.residues) == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PeriodicSet):
            return NotImplemented
        a, b = canonicalize(self), canonicalize(other)
        return a.modulus == b.modulus and a.residues == b.residues

    def __hash__(self):
        c = canonicalize(self)
        return hash((c.modulus, c.residues))

    def __repr__(self):
        return f"PeriodicSet(mod={self.modulus}, residues={self.residues.residues()[:12]}...)" \
            if len(self.residues) > 12 else \
            f"PeriodicSet(mod={self.modulus}, residues={self.residues.residues()})"


def naturals() -> PeriodicSet:
    """All of N."""
    return make_periodic(1, [0])


def make_periodic(k: int, hs: Iterable[int]) -> PeriodicSet:
    """Build ``k*N + hs`` with residues reduced mod ``k`` and deduplicated."""
    if k < 1:
        raise ValueError(f"period must be positive, got {k}")
    return PeriodicSet(k, ResidueSet(k, hs))


def density(p: PeriodicSet) -> Fraction:
    return p.density()


def member(p: PeriodicSet, x: int) -> bool:
    return p.member(x)


def rebase(p: PeriodicSet, m: int) -> PeriodicSet:
    """The same set re-expressed with modulus ``m`` (``p.modulus | m``)."""
    k = p.modulus
    if m % k != 0:
        raise ValueError(f"cannot rebase modulus {k} to non-multiple {m}")
    if m == k:
        return p
    q = m // k
    if m <= dense_limit():
        bits = kernels.tile_periodic(p.residues.bits(), m)
        return PeriodicSet(m, ResidueSet.from_bits(bits))
    if len(p.residues) * q > SPARSE_CAP:
        raise ResourceLimitError(
            f"rebasing to modulus {m} needs {len(p.residues) * q} residues")
    rs = [r + t * k for r in p.residues.residues() for t in range(q)]
    return PeriodicSet(m, ResidueSet(m, rs))


def _common_modulus(p: PeriodicSet, q: PeriodicSet) -> tuple[PeriodicSet, PeriodicSet, int]:
    m = math.lcm(p.modulus, q.modulus)
    return rebase(p, m), rebase(q, m), m


def union(p: PeriodicSet, q: PeriodicSet) -> PeriodicSet:
    a, b, m = _common_modulus(p, q)
    return PeriodicSet(m, a.residues.union_same(b.residues))


def intersect(p: PeriodicSet, q: PeriodicSet) -> PeriodicSet:
    a, b, m = _common_modulus(p, q)
    return PeriodicSet(m, a.residues.intersect_same(b.residues))


def complement(p: PeriodicSet) -> PeriodicSet:
    return PeriodicSet(p.modulus, p.residues.complement_same())


def affine(p: PeriodicSet, k: int, h: int) -> PeriodicSet:
    """Periodic normal form of ``k*P + h``.

    The result has modulus ``k * p.modulus`` and density ``density(p) / k``.
    For ``h >= k * p.modulus`` the true image differs from the returned
    periodic set in finitely many small elements; membership agrees from
    ``h`` onward and the density is exact either way.
    """
    if k < 1:
        raise ValueError(f"scale factor must be positive, got {k}")
    if h < 0:
        raise ValueError(f"offset must be non-negative, got {h}")
    m = k * p.modulus
    if m <= dense_limit() and p.residues.is_dense:
        bits = np.zeros(m, dtype=np.uint8)
        idx = np.nonzero(p.residues.bits())[0].astype(np.int64) * k + (h % m)
        bits[idx % m] = 1
        return PeriodicSet(m, ResidueSet.from_bits(bits))
    rs = ((k * r + h) % m for r in p.residues.residues())
    return PeriodicSet(m, ResidueSet(m, rs))


def sumset_mod(p: PeriodicSet, c: ResidueSet) -> PeriodicSet:
    """``{(h + r) mod k : h in p.residues, r in c}`` as a periodic set.

    When ``c`` is the residue cover of a set ``Y`` modulo ``k``, this
    realizes the sumset ``P + Y`` as a finite union of APs.
    """
    k = p.modulus
    if c.modulus != k:
        raise ValueError("sumset_mod operands must share a modulus (rebase first)")
    np_, nc = len(p.residues), len(c)
    if np_ == 0 or nc == 0:
        return PeriodicSet(k, ResidueSet(k))
    if k <= dense_limit():
        small, large = (p.residues, c) if np_ <= nc else (c, p.residues)
        if len(small) <= _SHIFT_MAX or k < _FFT_MIN_MODULUS:
            out = np.zeros(k, dtype=np.uint8)
            large_bits = large.bits()
            for s in small.residues():
                kernels.or_rotated(out, large_bits, s)
            return PeriodicSet(k, ResidueSet.from_bits(out))
        return PeriodicSet(k, ResidueSet.from_bits(_fft_cyclic_or(p.residues.bits(), c.bits())))
    if np_ * nc > SPARSE_CAP:
        raise ResourceLimitError(
            f"sparse sumset with {np_}x{nc} pairs exceeds the cap")
    rs = {(h + r) % k for h in p.residues.residues() for r in c.residues()}
    return PeriodicSet(k, ResidueSet(k, rs))


def _fft_cyclic_or(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # support of the cyclic convolution; counts are integers, and the FFT
    # round-off is O(eps * k * log k) << 1/2 for every modulus in budget
    k = a.shape[0]
    fa = np.fft.rfft(a.astype(np.float64))
    fb = np.fft.rfft(b.astype(np.float64))
    conv = np.fft.irfft(fa * fb, n=k)
    return (conv > 0.5).astype(np.uint8)


def canonicalize(p: PeriodicSet) -> PeriodicSet:
    """Smallest-period representation of the same set."""
    k = p.modulus
    if len(p.residues) == 0:
        return PeriodicSet(1, ResidueSet(1))
    if k == 1:
        return p
    if p.residues.is_dense:
        bits = p.residues.bits()
        for d in sympy.divisors(k):
            if d == k:
                break
            if np.array_equal(bits.reshape(k // d, d), np.broadcast_to(bits[:d], (k // d, d))):
                return PeriodicSet(d, ResidueSet.from_bits(bits[:d].copy()))
        return p
    members = set(p.residues.residues())
    for d in sympy.divisors(k):
        if d == k:
            break
        if all((r + d) % k in members for r in members):
            return PeriodicSet(d, ResidueSet(d, {r % d for r in members}))
    return p


def includes(p: PeriodicSet, q: PeriodicSet) -> bool:
    """True iff ``q`` is a subset of ``p`` (tested residue-wise after rebase)."""
    a, b, _ = _common_modulus(p, q)
    return b.residues.issubset(a.residues)


# ---------------------------------------------------------------------------
# text file format:
#   line 1: "modulus <k>"
#   line 2: "residues <comma-list>"  or  "bitmap <hex, little-endian bits>"

_RESIDUE_LIST_MAX = 1024


def dumps_periodic(p: PeriodicSet) -> str:
    lines = [f"modulus {p.modulus}"]
    if len(p.residues) <= _RESIDUE_LIST_MAX:
        lines.append("residues " + ",".join(map(str, p.residues.residues())))
    else:
        packed = np.packbits(p.residues.bits(), bitorder="little")
        lines.append("bitmap " + packed.tobytes().hex())
    return "\n".join(lines) + "\n"


def loads_periodic(text: str) -> PeriodicSet:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("modulus "):
        raise ValueError("periodic-set file must start with 'modulus <k>'")
    k = int(lines[0].split(maxsplit=1)[1])
    if len(lines) < 2:
        raise ValueError("missing residues/bitmap line")
    tag, _, payload = lines[1].partition(" ")
    payload = payload.strip()
    if tag == "residues":
        rs = [int(t) for t in payload.split(",") if t.strip()] if payload else []
        return make_periodic(k, rs)
    if tag == "bitmap":
        packed = np.frombuffer(bytes.fromhex(payload), dtype=np.uint8)
        bits = np.unpackbits(packed, bitorder="little")[:k].astype(np.uint8)
        if bits.shape[0] < k:
            raise ValueError("bitmap shorter than modulus")
        return PeriodicSet(k, ResidueSet.from_bits(bits))
    raise ValueError(f"unknown payload tag {tag!r}")
