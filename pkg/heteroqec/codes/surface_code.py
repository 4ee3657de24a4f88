"""Rotated surface codes on a d x d grid of data qubits.

Qubit (row, col) has index row * d + col. Face (r, c) sits between rows r, r + 1 and columns
c, c + 1; boundary faces use r = -1 / r = d - 1 (top / bottom) and c = -1 / c = d - 1 (left / right).
Faces are coloured by the parity of r + c: even faces are X-type, odd faces Z-type, which puts the
weight-2 X faces on the top and bottom boundaries and the weight-2 Z faces on the left and right.
"""
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import List, Tuple

import galois
import numpy as np

from .geometry import QubitGeometry, Region, check_distance, expected_region_sizes, stabilizer_ratio, degree_ratio, \
    boundary_fraction
from ..constants import EXACT_MAX_D, EXACT_SPOT_CHECK_D
from ..exceptions import ValidationError, ParameterError, DimensionError, PreconditionError, UnsupportedError
from ..pauli import PauliOp, Letter, commutes, symplectic_form, multiply, letter_at

GF2 = galois.GF(2)


class Deformation(Enum):
    CSS = 'css'
    XY = 'xy'

    @staticmethod
    def parse(value) -> 'Deformation':
        if isinstance(value, Deformation):
            return value
        try:
            return Deformation(str(value).lower())
        except ValueError:
            raise ParameterError(f'unknown deformation {value!r}, expected css or xy')


@dataclass(frozen=True)
class Stabilizer:
    face: Tuple[int, int]
    kind: Letter
    op: PauliOp

    @property
    def as_dict(self):
        return {'face': list(self.face), 'type': self.kind.value, 'letters': str(self.op)}


@dataclass(frozen=True)
class CodeInstance:
    d: int
    stabilizers: Tuple[Stabilizer, ...]
    logical_x: PauliOp
    logical_z: PauliOp
    destabilizers: Tuple[PauliOp, ...]
    geometry: Tuple[QubitGeometry, ...]
    deformation: Deformation

    @property
    def n(self) -> int:
        return self.d * self.d

    @property
    def num_stabilizers(self) -> int:
        return len(self.stabilizers)

    def qubit(self, row: int, col: int) -> int:
        return row * self.d + col

    @cached_property
    def qubit_faces(self) -> Tuple[Tuple[int, ...], ...]:
        """Stabilizer indices acting on each qubit, in stabilizer order."""
        faces = [[] for _ in range(self.n)]
        for i, stabilizer in enumerate(self.stabilizers):
            for q in support(stabilizer.op):
                faces[q].append(i)
        return tuple(tuple(f) for f in faces)

    @cached_property
    def face_index(self) -> dict:
        return {stabilizer.face: i for i, stabilizer in enumerate(self.stabilizers)}

    def representative(self, letter) -> PauliOp:
        letter = Letter(letter)
        if letter is Letter.I:
            return PauliOp.identity(self.n)
        if letter is Letter.X:
            return self.logical_x
        if letter is Letter.Z:
            return self.logical_z
        return multiply(self.logical_x, self.logical_z)

    @property
    def as_dict(self):
        return describe(self)


def support(op: PauliOp) -> List[int]:
    mask = op.x | op.z
    return [q for q in range(op.n) if (mask >> q) & 1]


def face_qubits(d: int, r: int, c: int) -> List[Tuple[int, int]]:
    cells = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
    return [(row, col) for row, col in cells if 0 <= row < d and 0 <= col < d]


def lattice_faces(d: int) -> List[Tuple[Tuple[int, int], Letter]]:
    """All stabilizer faces in row-major face order, with their CSS type."""
    faces = []
    for r in range(-1, d):
        for c in range(-1, d):
            interior = 0 <= r <= d - 2 and 0 <= c <= d - 2
            horizontal = r in (-1, d - 1) and 0 <= c <= d - 2
            vertical = c in (-1, d - 1) and 0 <= r <= d - 2
            kind = Letter.X if (r + c) % 2 == 0 else Letter.Z
            if interior or (horizontal and kind is Letter.X) or (vertical and kind is Letter.Z):
                faces.append(((r, c), kind))
    return faces


def build_css(d: int) -> CodeInstance:
    check_distance(d)
    n = d * d
    stabilizers = []
    for face, kind in lattice_faces(d):
        qubits = [row * d + col for row, col in face_qubits(d, *face)]
        stabilizers.append(Stabilizer(face, kind, PauliOp.from_support(n, qubits, kind)))

    degrees = [0] * n
    for stabilizer in stabilizers:
        for q in support(stabilizer.op):
            degrees[q] += 1
    geometry = tuple(QubitGeometry(q // d, q % d, degrees[q]) for q in range(n))

    logical_x = PauliOp.from_support(n, [row * d for row in range(d)], Letter.X)
    logical_z = PauliOp.from_support(n, range(d), Letter.Z)

    code = CodeInstance(
        d=d,
        stabilizers=tuple(stabilizers),
        logical_x=logical_x,
        logical_z=logical_z,
        destabilizers=tuple(compute_destabilizers([s.op for s in stabilizers])),
        geometry=geometry,
        deformation=Deformation.CSS,
    )
    validate(code)
    return code


def xy_map(op: PauliOp) -> PauliOp:
    # X fixed, Z <-> Y
    return PauliOp(op.x ^ op.z, op.z, op.n)


def apply_xy_deformation(code: CodeInstance) -> CodeInstance:
    if code.deformation is not Deformation.CSS:
        raise ParameterError('XY deformation applies to CSS codes only; it is its own inverse')
    stabilizers = tuple(
        Stabilizer(s.face, Letter.Y if s.kind is Letter.Z else s.kind, xy_map(s.op)) for s in code.stabilizers
    )
    deformed = replace(
        code,
        stabilizers=stabilizers,
        logical_x=xy_map(code.logical_x),
        logical_z=xy_map(code.logical_z),
        destabilizers=tuple(xy_map(t) for t in code.destabilizers),
        deformation=Deformation.XY,
    )
    validate(deformed)
    return deformed


def build_code(d: int, deformation='css') -> CodeInstance:
    code = build_css(d)
    if Deformation.parse(deformation) is Deformation.XY:
        code = apply_xy_deformation(code)
    return code


def compute_destabilizers(generators: List[PauliOp]) -> List[PauliOp]:
    """Pure errors t_i with symplectic_form(t_i, g_j) = [i == j], by GF(2) row reduction.

    Rows of the stacked matrix are (z | x) so that a row times (tx | tz) is the symplectic form.
    Reducing [M | I] column by column (row-major pivots) yields R = E M; choosing t zero off the
    pivot columns makes M t = e_i solvable as t[pivot_k] = E[k, i].
    """
    m, n = len(generators), generators[0].n
    rows = np.array([np.concatenate([g.z_bits(), g.x_bits()]) for g in generators], dtype=np.uint8)
    augmented = GF2(np.hstack([rows, np.eye(m, dtype=np.uint8)]))
    reduced = augmented.row_reduce(ncols=2 * n)
    left, transform = np.asarray(reduced[:, :2 * n]), np.asarray(reduced[:, 2 * n:])
    pivots = []
    for k in range(m):
        nonzero = np.flatnonzero(left[k])
        if not len(nonzero):
            raise ValidationError(f'stabilizer generators are dependent (rank {k} < {m})')
        pivots.append(int(nonzero[0]))

    destabilizers = []
    for i in range(m):
        t = np.zeros(2 * n, dtype=bool)
        t[[pivots[k] for k in range(m) if transform[k, i]]] = True
        destabilizers.append(PauliOp.from_arrays(t[:n], t[n:]))
    return destabilizers


def gf2_rank(ops: List[PauliOp]) -> int:
    return int(np.linalg.matrix_rank(GF2(np.array([op.symplectic() for op in ops], dtype=np.uint8))))


def validate(code: CodeInstance) -> None:
    d, n = code.d, code.n
    ops = [s.op for s in code.stabilizers]
    if len(ops) != n - 1:
        raise ValidationError(f'expected {n - 1} stabilizers, built {len(ops)}')
    for i, a in enumerate(ops):
        if a.n != n:
            raise ValidationError(f'stabilizer {i} acts on {a.n} qubits, not {n}')
        for j in range(i + 1, len(ops)):
            if not commutes(a, ops[j]):
                raise ValidationError(f'stabilizers {i} and {j} anticommute')
    rank = gf2_rank(ops)
    if rank != n - 1:
        raise ValidationError(f'stabilizer rank {rank}, expected {n - 1}')
    for name, logical in (('logical_x', code.logical_x), ('logical_z', code.logical_z)):
        if any(not commutes(logical, g) for g in ops):
            raise ValidationError(f'{name} anticommutes with a stabilizer')
    if commutes(code.logical_x, code.logical_z):
        raise ValidationError('logical_x and logical_z commute')
    for i, t in enumerate(code.destabilizers):
        for j, g in enumerate(ops):
            if symplectic_form(t, g) != (i == j):
                raise ValidationError(f'destabilizer {i} fails against stabilizer {j}')
    if code.deformation is Deformation.XY:
        for i, g in enumerate(ops):
            if any(letter_at(g, q) is Letter.Z for q in range(n)):
                raise ValidationError(f'XY stabilizer {i} still carries a Z letter')
    sizes = {region: 0 for region in Region}
    for qubit in code.geometry:
        sizes[qubit.region] += 1
    if sizes != expected_region_sizes(d):
        raise ValidationError(f'degree histogram {sizes} does not match d={d}')
    if sum(q.degree for q in code.geometry) != sum(len(support(g)) for g in ops):
        raise ValidationError('qubit degrees do not sum to the stabilizer weights')


def syndrome(code: CodeInstance, error: PauliOp) -> np.ndarray:
    if error.n != code.n:
        raise DimensionError(f'error acts on {error.n} qubits, code has {code.n}')
    return np.fromiter((symplectic_form(error, s.op) for s in code.stabilizers), dtype=np.uint8,
                       count=code.num_stabilizers)


def pure_error(code: CodeInstance, s) -> PauliOp:
    s = np.asarray(s, dtype=np.uint8)
    if s.shape != (code.num_stabilizers,):
        raise DimensionError(f'syndrome has length {s.size}, code has {code.num_stabilizers} stabilizers')
    x = z = 0
    for t in (code.destabilizers[i] for i in np.flatnonzero(s)):
        x ^= t.x
        z ^= t.z
    return PauliOp(x, z, code.n)


def logical_class(code: CodeInstance, residual: PauliOp) -> Letter:
    if syndrome(code, residual).any():
        raise PreconditionError('residual has a nonzero syndrome and is not in the normalizer')
    flips_z = not commutes(residual, code.logical_z)
    flips_x = not commutes(residual, code.logical_x)
    return Letter.from_bits(int(flips_z), int(flips_x))


def classify_qubits(code: CodeInstance) -> Tuple[List[int], List[int], List[int]]:
    bulk, edge, corner = [], [], []
    groups = {Region.BULK: bulk, Region.EDGE: edge, Region.CORNER: corner}
    for q, qubit in enumerate(code.geometry):
        groups[qubit.region].append(q)
    return bulk, edge, corner


def describe(code: CodeInstance, types=None) -> dict:
    degrees = {}
    for qubit in code.geometry:
        degrees[str(qubit.degree)] = degrees.get(str(qubit.degree), 0) + 1
    ratio = stabilizer_ratio(code.d)
    document = {
        'd': code.d,
        'n': code.n,
        'deformation': code.deformation.value,
        'stabilizers': [s.as_dict for s in code.stabilizers],
        'logical_x': str(code.logical_x),
        'logical_z': str(code.logical_z),
        'degrees': dict(sorted(degrees.items(), reverse=True)),
        'qubits': [qubit.as_dict for qubit in code.geometry],
        'stabilizer_ratio': f'{ratio.numerator}/{ratio.denominator}',
        'degree_ratio': str(degree_ratio(code.d)),
        'boundary_fraction': float(boundary_fraction(code.d)),
    }
    if types is not None:
        for entry, qubit_type in zip(document['qubits'], types):
            entry['type'] = qubit_type.value
    return document


def _binary_combinations(k: int) -> np.ndarray:
    """All 2^k binary vectors as rows, row i being the little-endian bits of i."""
    return ((np.arange(2 ** k, dtype=np.int64)[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def stabilizer_group(code: CodeInstance, chunk_bits: int = 14):
    """Yield the whole stabilizer group as (x, z) boolean arrays in chunks of at most 2^chunk_bits rows."""
    sx = np.array([s.op.x_bits() for s in code.stabilizers], dtype=np.uint8)
    sz = np.array([s.op.z_bits() for s in code.stabilizers], dtype=np.uint8)
    m = code.num_stabilizers
    low = min(m, chunk_bits)
    combos = _binary_combinations(low)
    low_x, low_z = (combos @ sx[:low]) & 1, (combos @ sz[:low]) & 1
    for high in range(2 ** (m - low)):
        bits = (high >> np.arange(m - low)) & 1
        offset_x = (bits @ sx[low:]) & 1 if m > low else 0
        offset_z = (bits @ sz[low:]) & 1 if m > low else 0
        yield (low_x ^ offset_x).astype(bool), (low_z ^ offset_z).astype(bool)


def check_enumerable(d: int, allow_large: bool = False) -> None:
    """Refuse whole-group enumeration above d=3 unless `allow_large` opts into the d=5 spot checks."""
    if d <= EXACT_MAX_D or (allow_large and d <= EXACT_SPOT_CHECK_D):
        return
    if d <= EXACT_SPOT_CHECK_D:
        raise UnsupportedError(f'enumerating the stabilizer group at d={d} visits 2^{d * d - 1} elements; '
                               f'pass allow_large')
    raise UnsupportedError(f'stabilizer group enumeration is limited to d <= {EXACT_SPOT_CHECK_D}, not {d}')
