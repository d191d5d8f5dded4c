"""Exhaustive truth tables of Boolean functions and their mod-2 polynomial form.

A function of ``n`` inputs is stored as a single Python integer holding all
2**n output bits: bit ``k`` is the output for the assignment whose j-th input
equals the j-th binary digit of ``k`` (input 1 is the least significant
digit).  Integers give cheap XOR/AND, exact popcounts, and hashability; the
numpy helpers below are used where a reshape beats big-int shifting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

# Largest arity stored exhaustively (2**24 bits = 2 MiB per table).  Larger
# arities are served by the symmetric engine only.
N_MAX = 24


class BfrgError(ValueError):
    """Malformed BFRG table file."""


class BfrgMagicError(BfrgError):
    """Header is not a valid ``BFRG 1`` header line."""


class BfrgArityError(BfrgError):
    """Header arity is missing, not an integer, or out of range."""


class BfrgPayloadError(BfrgError):
    """Payload truncated, oversized, or with nonzero padding bits."""


def _nbytes(n: int) -> int:
    return ((1 << n) + 7) // 8


def bits_to_array(bits: int, n: int) -> np.ndarray:
    """Unpack the 2**n packed output bits into a uint8 0/1 array."""
    raw = bits.to_bytes(_nbytes(n), "little")
    arr = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return arr[: 1 << n]

def array_to_bits(arr: np.ndarray) -> int:
    packed = np.packbits(arr.astype(np.uint8, copy=False), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _tile_mask(pattern: int, period: int, total: int) -> int:
    # period and total are powers of two, so doubling lands exactly on total
    out = pattern
    span = period
    while span < total:
        out |= out << span
        span <<= 1
    return out


def low_half_mask(j: int, n: int) -> int:
    """Positions k in [0, 2**n) whose j-th index bit is 0."""
    block = (1 << (1 << j)) - 1
    return _tile_mask(block, 1 << (j + 1), 1 << n)


def var_mask(i: int, n: int) -> int:
    """Packed table of the projection x_i (bit k set iff digit i-1 of k is 1)."""
    b = i - 1
    block = ((1 << (1 << b)) - 1) << (1 << b)
    return _tile_mask(block, 1 << (b + 1), 1 << n)


def mobius(bits: int, n: int) -> int:
    """In-place butterfly of the mod-2 subset-sum transform (self-inverse).

    Maps output bits to polynomial coefficients and back: coefficient at
    index ``m`` is the XOR of outputs over all sub-assignments of ``m``.
    """
    for j in range(n):
        bits ^= (bits & low_half_mask(j, n)) << (1 << j)
    return bits


@dataclass(frozen=True)
class TruthTable:
    """Immutable bit-packed table of all 2**n outputs of a Boolean function."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.n <= N_MAX:
            raise ValueError(f"arity must be in [0, {N_MAX}], got {self.n}")
        if not 0 <= self.bits < (1 << (1 << self.n)):
            raise ValueError(f"bits out of range for arity {self.n}")

    @classmethod
    def from_outputs(cls, outputs: Sequence[int]) -> "TruthTable":
        """Build a table from 2**n explicit output bits, index order."""
        size = len(outputs)
        n = size.bit_length() - 1
        if size != 1 << n:
            raise ValueError(f"output count {size} is not a power of two")
        if any(b not in (0, 1) for b in outputs):
            raise ValueError("outputs must be 0/1")
        bits = 0
        for k, b in enumerate(outputs):
            bits |= b << k
        return cls(n, bits)

    @classmethod
    def constant(cls, n: int, value: int) -> "TruthTable":
        if value not in (0, 1):
            raise ValueError("constant value must be 0 or 1")
        return cls(n, ((1 << (1 << n)) - 1) if value else 0)

    @property
    def size(self) -> int:
        return 1 << self.n

    def to_outputs(self) -> list[int]:
        return [(self.bits >> k) & 1 for k in range(self.size)]

    def evaluate(self, x: Sequence[int]) -> int:
        """Output for one assignment; x[j] is the value of input j+1."""
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} inputs, got {len(x)}")
        idx = 0
        for j, v in enumerate(x):
            if v not in (0, 1):
                raise ValueError("inputs must be 0/1")
            idx |= v << j
        return (self.bits >> idx) & 1

    def weight(self) -> int:
        """Number of assignments with output 1."""
        return self.bits.bit_count()

    def density(self) -> Fraction:
        """Exact fraction of assignments with output 1 (never a float)."""
        return Fraction(self.weight(), self.size)

    def is_zero(self) -> bool:
        return self.bits == 0

    def _check_arity(self, other: "TruthTable") -> None:
        if self.n != other.n:
            raise ValueError(f"arity mismatch: {self.n} vs {other.n}")

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        self._check_arity(other)
        return TruthTable(self.n, self.bits ^ other.bits)

    def __and__(self, other: "TruthTable") -> "TruthTable":
        self._check_arity(other)
        return TruthTable(self.n, self.bits & other.bits)

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.n, self.bits ^ ((1 << self.size) - 1))


@dataclass(frozen=True)
class Anf:
    """Mod-2 polynomial as a set of monomials over inputs {1..n}.

    Each monomial is a frozenset of input labels; the empty frozenset is the
    constant-1 term.  An empty term set is the zero function.
    """

    n: int
    terms: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= N_MAX:
            raise ValueError(f"arity must be in [0, {N_MAX}], got {self.n}")
        for term in self.terms:
            if not all(1 <= v <= self.n for v in term):
                raise ValueError(f"monomial {sorted(term)} outside inputs 1..{self.n}")

    @property
    def degree(self) -> int:
        """Largest monomial cardinality; 0 for constants and the zero function."""
        return max((len(t) for t in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[int, ...]]:
        return sorted(tuple(sorted(t)) for t in self.terms)


def table_to_anf(t: TruthTable) -> Anf:
    """Polynomial coefficients of a table via the subset-sum transform."""
    coeff = mobius(t.bits, t.n)
    terms = []
    while coeff:
        k = coeff & -coeff
        idx = k.bit_length() - 1
        terms.append(frozenset(j + 1 for j in range(t.n) if idx >> j & 1))
        coeff ^= k
    return Anf(t.n, frozenset(terms))


def anf_to_table(a: Anf) -> TruthTable:
    """Inverse of :func:`table_to_anf`; round trip is the identity."""
    coeff = 0
    for term in a.terms:
        idx = 0
        for v in term:
            idx |= 1 << (v - 1)
        coeff |= 1 << idx
    return TruthTable(a.n, mobius(coeff, a.n))


_MAGIC = b"BFRG 1 n="


def write_table(t: TruthTable, path: str | Path) -> None:
    """Write as BFRG v1: ``BFRG 1 n=<arity>\\n`` then ceil(2**n/8) raw bytes.

    Bit order is little-endian within each byte, so bit 0 of byte 0 is the
    output at index 0.
    """
    payload = t.bits.to_bytes(_nbytes(t.n), "little")
    Path(path).write_bytes(_MAGIC + str(t.n).encode("ascii") + b"\n" + payload)


def read_table(path: str | Path) -> TruthTable:
    """Read a BFRG v1 file; raises a distinct BfrgError subclass per defect."""
    data = Path(path).read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise BfrgMagicError("missing header line")
    header, payload = data[:nl], data[nl + 1 :]
    if not header.startswith(_MAGIC):
        raise BfrgMagicError(f"bad magic/version in header {header[:16]!r}")
    arity_field = header[len(_MAGIC) :]
    try:
        n = int(arity_field.decode("ascii"))
    except (UnicodeDecodeError, ValueError):
        raise BfrgArityError(f"unparseable arity field {arity_field!r}") from None
    if not 0 <= n <= N_MAX:
        raise BfrgArityError(f"arity {n} outside [0, {N_MAX}]")
    expected = _nbytes(n)
    if len(payload) < expected:
        raise BfrgPayloadError(
            f"truncated payload: {len(payload)} bytes, expected {expected}"
        )
    if len(payload) > expected:
        raise BfrgPayloadError(
            f"trailing data: {len(payload)} bytes, expected {expected}"
        )
    bits = int.from_bytes(payload, "little")
    if bits >> (1 << n):
        raise BfrgPayloadError("nonzero padding bits beyond 2**n")
    return TruthTable(n, bits)
