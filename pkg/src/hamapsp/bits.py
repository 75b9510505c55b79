"""Bit-packed Boolean matrices and the Hamming primitives built on them.

Rows are packed little-endian into 64-bit words, so bit ``j`` of a row lives
in word ``j // 64`` at position ``j % 64``.  Padding bits past ``cols`` are
always zero, which keeps popcount distances and equality exact.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64


class UsageError(ValueError):
    """Raised for malformed arguments (shape or length mismatches)."""


def _as_bits(a) -> np.ndarray:
    if isinstance(a, str):
        if set(a) - {"0", "1"}:
            raise UsageError(f"bit string may only contain 0/1: {a!r}")
        return np.frombuffer(a.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(a)
    if arr.ndim != 1:
        raise UsageError("bit row must be one-dimensional")
    return (arr != 0).astype(np.uint8)


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, ceil(cols/64)) uint64 words."""
    rows, cols = dense.shape
    nwords = max(1, -(-cols // WORD))
    padded = np.zeros((rows, nwords * WORD), dtype=np.uint8)
    padded[:, :cols] = dense != 0
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return as_bytes.view("<u8").reshape(rows, nwords).astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows, nwords = words.shape
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8).reshape(rows, nwords * 8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


def hamming_distance(a, b) -> int:
    """Number of positions where the bit rows ``a`` and ``b`` differ."""
    x, y = _as_bits(a), _as_bits(b)
    if x.shape != y.shape:
        raise UsageError(f"length mismatch: {x.size} vs {y.size}")
    return int(np.count_nonzero(x != y))


def diff_positions(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(positions with a=1,b=0, positions with a=0,b=1)``."""
    x, y = _as_bits(a), _as_bits(b)
    if x.shape != y.shape:
        raise UsageError(f"length mismatch: {x.size} vs {y.size}")
    return np.flatnonzero(x > y), np.flatnonzero(x < y)


class BitMatrix:
    """Immutable ``rows x cols`` Boolean matrix, row-major, bit-packed."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.asarray(words, dtype=np.uint64)
        nwords = max(1, -(-cols // WORD))
        if words.shape != (rows, nwords):
            raise UsageError(f"word array shape {words.shape} != {(rows, nwords)}")
        tail = cols % WORD
        if tail and rows and np.any(words[:, -1] >> np.uint64(tail)):
            raise UsageError("padding bits beyond cols must be zero")
        words = words.copy()
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise UsageError("expected a two-dimensional array")
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BitMatrix":
        if not lines:
            return cls.zeros(0, 0)
        return cls.from_dense(np.stack([_as_bits(s) for s in lines]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, max(1, -(-cols // WORD))), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def random(cls, rows: int, cols: int, density: float, rng: np.random.Generator) -> "BitMatrix":
        return cls.from_dense(rng.random((rows, cols)) < density)

    # -- access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        """0/1 ``uint8`` array of shape ``(rows, cols)``."""
        return _unpack(self.words, self.cols)

    def to_bool(self) -> np.ndarray:
        return self.to_dense().astype(bool)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return int((self.words[i, j // WORD] >> np.uint64(j % WORD)) & np.uint64(1))

    def row(self, i: int) -> np.ndarray:
        return _unpack(self.words[i : i + 1], self.cols)[0]

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def count(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    # -- Hamming geometry over rows ------------------------------------------

    def row_distance(self, i: int, j: int) -> int:
        return int(np.bitwise_count(self.words[i] ^ self.words[j]).sum())

    def distances_from(self, i: int) -> np.ndarray:
        """Hamming distance from row ``i`` to every row, as ``int64``."""
        return np.bitwise_count(self.words ^ self.words[i]).sum(axis=1, dtype=np.int64)

    def row_diff(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        """:func:`diff_positions` of rows ``i`` and ``j`` without unpacking the matrix."""
        a = self.words[i]
        b = self.words[j]
        return _positions(a & ~b, self.cols), _positions(~a & b, self.cols)

    # -- dunder -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, ones={self.count()})"


def _positions(words: np.ndarray, cols: int) -> np.ndarray:
    if not words.any():
        return np.empty(0, dtype=np.int64)
    bits = _unpack(words[None, :], cols)[0]
    return np.flatnonzero(bits)


def transpose(m: BitMatrix) -> BitMatrix:
    return m.transpose()


# ---------------------------------------------------------------------------
# extended-real and witness matrices
# ---------------------------------------------------------------------------


def as_scalar_matrix(values, *, nonnegative: bool = False) -> np.ndarray:
    """Validate and freeze a float64 matrix over the reals plus ``+inf``."""
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 2:
        raise UsageError("scalar matrix must be two-dimensional")
    if np.isnan(arr).any():
        raise UsageError("NaN entries are not allowed")
    if np.isneginf(arr).any():
        raise UsageError("-inf entries are not allowed")
    if nonnegative and (arr < 0).any():
        raise UsageError("negative entries are not allowed here")
    arr.flags.writeable = False
    return arr


def check_witnesses(C: np.ndarray, W: np.ndarray) -> None:
    """Assert the presence pattern of ``W`` (``-1`` = absent) matches finiteness of ``C``."""
    if C.shape != W.shape:
        raise UsageError("C and W shapes differ")
    if not np.array_equal(np.isfinite(C), W >= 0):
        raise AssertionError("witness presence does not match finite entries")


def rows_as_strings(m: BitMatrix) -> Iterable[str]:
    for row in m.to_dense():
        yield "".join("1" if b else "0" for b in row)
