"""Phase-free n-qubit Pauli operators in the binary symplectic representation.

Each operator is a pair of bit masks packed into Python integers: bit q of `x` is the X component
on qubit q and bit q of `z` the Z component, so products are XORs and the symplectic form is a
popcount.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .exceptions import DimensionError, QubitIndexError, ParameterError


class Letter(Enum):
    I = 'I'
    X = 'X'
    Y = 'Y'
    Z = 'Z'

    @property
    def code(self) -> int:
        """Index into per-qubit probability tables: x | z << 1."""
        return _LETTER_CODES[self]

    @staticmethod
    def from_bits(x: int, z: int) -> 'Letter':
        return _BITS_TO_LETTER[(x, z)]


_BITS_TO_LETTER = {(0, 0): Letter.I, (1, 0): Letter.X, (1, 1): Letter.Y, (0, 1): Letter.Z}
_LETTER_TO_BITS = {letter: bits for bits, letter in _BITS_TO_LETTER.items()}
_LETTER_CODES = {letter: x | (z << 1) for letter, (x, z) in _LETTER_TO_BITS.items()}


@dataclass(frozen=True)
class PauliOp:
    x: int
    z: int
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f'qubit count must be non-negative, not {self.n}')
        if self.x >> self.n or self.z >> self.n or self.x < 0 or self.z < 0:
            raise DimensionError(f'bit masks do not fit in {self.n} qubits')

    @staticmethod
    def identity(n: int) -> 'PauliOp':
        return PauliOp(0, 0, n)

    @staticmethod
    def single(n: int, q: int, letter) -> 'PauliOp':
        if not 0 <= q < n:
            raise QubitIndexError(f'qubit {q} out of range for n={n}')
        x, z = _LETTER_TO_BITS[Letter(letter)]
        return PauliOp(x << q, z << q, n)

    @staticmethod
    def from_support(n: int, qubits: Iterable[int], letter) -> 'PauliOp':
        x, z = _LETTER_TO_BITS[Letter(letter)]
        mask = 0
        for q in qubits:
            if not 0 <= q < n:
                raise QubitIndexError(f'qubit {q} out of range for n={n}')
            mask |= 1 << q
        return PauliOp(mask if x else 0, mask if z else 0, n)

    @staticmethod
    def from_string(string: str) -> 'PauliOp':
        x = z = 0
        for q, char in enumerate(string.strip()):
            try:
                bx, bz = _LETTER_TO_BITS[Letter(char.upper())]
            except ValueError:
                raise ParameterError(f'invalid Pauli letter {char!r} at position {q}')
            x |= bx << q
            z |= bz << q
        return PauliOp(x, z, len(string.strip()))

    @staticmethod
    def from_arrays(x_bits, z_bits) -> 'PauliOp':
        x_bits, z_bits = np.asarray(x_bits, dtype=bool), np.asarray(z_bits, dtype=bool)
        if x_bits.shape != z_bits.shape or x_bits.ndim != 1:
            raise DimensionError(f'x/z bit vectors differ in shape: {x_bits.shape} vs {z_bits.shape}')
        return PauliOp(bits_to_int(x_bits), bits_to_int(z_bits), len(x_bits))

    def x_bits(self) -> np.ndarray:
        return int_to_bits(self.x, self.n)

    def z_bits(self) -> np.ndarray:
        return int_to_bits(self.z, self.n)

    def symplectic(self) -> np.ndarray:
        """The length-2n row (x | z)."""
        return np.concatenate([self.x_bits(), self.z_bits()]).astype(np.uint8)

    def _check(self, other: 'PauliOp'):
        if self.n != other.n:
            raise DimensionError(f'operators act on {self.n} and {other.n} qubits')

    def __mul__(self, other: 'PauliOp') -> 'PauliOp':
        return multiply(self, other)

    def __str__(self):
        return ''.join(letter_at(self, q).value for q in range(self.n))

    def __repr__(self):
        return f'PauliOp({str(self)!r})'


def bits_to_int(bits) -> int:
    packed = np.packbits(np.asarray(bits, dtype=bool), bitorder='little')
    return int.from_bytes(packed.tobytes(), 'little')


def int_to_bits(value: int, n: int) -> np.ndarray:
    raw = np.frombuffer(value.to_bytes((n + 7) // 8 or 1, 'little'), dtype=np.uint8)
    return np.unpackbits(raw, bitorder='little')[:n].astype(bool)


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    a._check(b)
    return PauliOp(a.x ^ b.x, a.z ^ b.z, a.n)


def symplectic_form(a: PauliOp, b: PauliOp) -> int:
    a._check(b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() & 1


def commutes(a: PauliOp, b: PauliOp) -> bool:
    return symplectic_form(a, b) == 0


def weight(a: PauliOp) -> int:
    return (a.x | a.z).bit_count()


def letter_at(a: PauliOp, q: int) -> Letter:
    if not 0 <= q < a.n:
        raise QubitIndexError(f'qubit {q} out of range for n={a.n}')
    return Letter.from_bits((a.x >> q) & 1, (a.z >> q) & 1)


def letter_codes(a: PauliOp) -> np.ndarray:
    """Per-qubit letter codes (x | z << 1), the index used by probability tables."""
    return a.x_bits().astype(np.int64) | (a.z_bits().astype(np.int64) << 1)
