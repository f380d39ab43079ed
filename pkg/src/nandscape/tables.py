"""Truth tables and functionality signatures.

A truth table packs each output column into a single Python int: bit ``p`` of
``bits[j]`` is the value of output ``j`` on input pattern ``p``, where external
input ``i`` carries bit ``i`` of ``p`` (LSB first). Input arity is capped at 16,
so a column is at most 2**16 bits.

A :class:`Signature` is the canonical functionality key: two circuits compute
the same function iff their signatures are equal, bit for bit. No permutation
canonicalization is applied. Signatures hash with a fixed FNV-1a over a
documented byte serialization so hashes are stable across processes and runs.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import hashlib

MAX_INPUTS = 16

# fixed key so signature hashes are identical across runs and platforms
_HASH_KEY = b"nandscape-signature-v1"


def _stable_hash64(data: bytes) -> int:
    digest = hashlib.blake2b(data, digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "little")


class TruthTable:
    """Boolean function of ``input_arity`` inputs and ``output_arity`` outputs."""

    __slots__ = ("input_arity", "output_arity", "bits")

    def __init__(self, input_arity: int, output_arity: int, bits: tuple[int, ...]):
        if not 0 <= input_arity <= MAX_INPUTS:
            raise ValueError(f"input arity {input_arity} outside [0, {MAX_INPUTS}]")
        if output_arity < 1:
            raise ValueError("output arity must be >= 1")
        if len(bits) != output_arity:
            raise ValueError("one bit column required per output")
        width = 1 << input_arity
        for col in bits:
            if col < 0 or col.bit_length() > width:
                raise ValueError("bit column out of range for input arity")
        self.input_arity = input_arity
        self.output_arity = output_arity
        self.bits = tuple(bits)

    @property
    def n_rows(self) -> int:
        return 1 << self.input_arity

    def value(self, pattern: int, output: int = 0) -> int:
        """Output bit for one input pattern."""
        return (self.bits[output] >> pattern) & 1

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruthTable)
            and self.input_arity == other.input_arity
            and self.output_arity == other.output_arity
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.input_arity, self.output_arity, self.bits))

    def __repr__(self) -> str:
        return f"TruthTable({self.input_arity}->{self.output_arity}, {self.bits})"


class Signature:
    """Canonical functionality key: arities plus the exact output columns.

    Serialization (see :meth:`to_bytes`): one byte input arity, one byte output
    arity, then each output column as ceil(2**m / 8) little-endian bytes. The
    stable hash is the first 8 bytes of keyed BLAKE2b over that string.
    """

    __slots__ = ("input_arity", "output_arity", "bits", "_hash")

    def __init__(self, input_arity: int, output_arity: int, bits: tuple[int, ...]):
        self.input_arity = input_arity
        self.output_arity = output_arity
        self.bits = bits
        self._hash = _stable_hash64(self.to_bytes())

    def to_bytes(self) -> bytes:
        nbytes = ((1 << self.input_arity) + 7) // 8
        parts = [bytes((self.input_arity, self.output_arity))]
        parts.extend(col.to_bytes(nbytes, "little") for col in self.bits)
        return b"".join(parts)

    def stable_hash(self) -> int:
        """64-bit keyed hash of :meth:`to_bytes`; identical across runs and platforms."""
        return self._hash

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Signature)
            and self.input_arity == other.input_arity
            and self.output_arity == other.output_arity
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Signature({self.input_arity}->{self.output_arity}, {self._hash:#018x})"


def signature_of(table: TruthTable) -> Signature:
    """Canonical key for a table; equal iff the tables are bit-identical."""
    return Signature(table.input_arity, table.output_arity, table.bits)


def table_from_function(
    input_arity: int, output_arity: int, fn: Callable[[Sequence[int]], Sequence[int]]
) -> TruthTable:
    """Tabulate ``fn`` over all input patterns.

    ``fn`` receives the input bits as a tuple (index i = external input i) and
    returns the output bits.
    """
    cols = [0] * output_arity
    for pattern in range(1 << input_arity):
        ins = tuple((pattern >> i) & 1 for i in range(input_arity))
        outs = fn(ins)
        for j, v in enumerate(outs):
            if v:
                cols[j] |= 1 << pattern
    return TruthTable(input_arity, output_arity, tuple(cols))


def table_from_rows(input_arity: int, rows: Iterable[Sequence[int]]) -> TruthTable:
    """Build a table from per-pattern output rows, row p = pattern p."""
    rows = list(rows)
    if len(rows) != 1 << input_arity:
        raise ValueError("need one row per input pattern")
    output_arity = len(rows[0])
    cols = [0] * output_arity
    for pattern, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                cols[j] |= 1 << pattern
    return TruthTable(input_arity, output_arity, tuple(cols))


def matching_bits(a: TruthTable, b: TruthTable) -> int:
    """Number of agreeing output bits; arities must match."""
    total = b.output_arity << b.input_arity
    diff = 0
    for ca, cb in zip(a.bits, b.bits):
        diff += (ca ^ cb).bit_count()
    return total - diff
