import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heteroqec.codes import build_code, apply_xy_deformation, syndrome, pure_error, logical_class, classify_qubits, \
    describe, stabilizer_ratio, degree_ratio, census_ratio, boundary_fraction, pauli_distances, pure_letter_distance, \
    coset_min_weights, stabilizer_group, Region, xy_map
from heteroqec.exceptions import ParameterError, PreconditionError, UnsupportedError, DimensionError
from heteroqec.pauli import PauliOp, Letter, symplectic_form, letter_at, multiply, commutes, weight


@pytest.mark.parametrize('d, stabilizers', [(3, 8), (5, 24), (7, 48)])
def test_stabilizer_counts(d, stabilizers):
    code = build_code(d, 'css')
    assert code.num_stabilizers == stabilizers == d * d - 1


def test_degree_histogram_d5(xy5):
    assert describe(xy5)['degrees'] == {'4': 9, '3': 12, '2': 4}
    bulk, edge, corner = classify_qubits(xy5)
    assert (len(bulk), len(edge), len(corner)) == (9, 12, 4)


def test_d3_layout(css3):
    kinds = {s.face: s.kind for s in css3.stabilizers}
    assert kinds[(-1, 1)] is Letter.X
    assert kinds[(2, 0)] is Letter.X
    assert kinds[(0, -1)] is Letter.Z
    assert kinds[(1, 2)] is Letter.Z
    assert str(css3.logical_x) == 'XIIXIIXII'
    assert str(css3.logical_z) == 'ZZZIIIIII'


def test_center_x_flips_two_z_faces(css3):
    s = syndrome(css3, PauliOp.single(9, 4, 'X'))
    flipped = {css3.stabilizers[i].face for i in np.flatnonzero(s)}
    assert flipped == {(0, 1), (1, 0)}


def test_xy_deformation(xy3, css3):
    for stabilizer in xy3.stabilizers:
        assert all(letter_at(stabilizer.op, q) is not Letter.Z for q in range(9))
    assert {s.kind for s in xy3.stabilizers} == {Letter.X, Letter.Y}
    assert xy3.geometry == css3.geometry
    with pytest.raises(ParameterError):
        apply_xy_deformation(xy3)


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 16))
    masks = st.integers(0, 2 ** n - 1)
    return PauliOp(draw(masks), draw(masks), n), PauliOp(draw(masks), draw(masks), n)


@given(pauli_pairs())
def test_xy_map_preserves_commutation(pair):
    a, b = pair
    assert commutes(xy_map(a), xy_map(b)) == commutes(a, b)
    assert weight(xy_map(a)) == weight(a)


@pytest.mark.parametrize('deformation', ['css', 'xy'])
def test_destabilizers_are_dual(deformation):
    code = build_code(5, deformation)
    for i, t in enumerate(code.destabilizers):
        for j, g in enumerate(code.stabilizers):
            assert symplectic_form(t, g.op) == (i == j)


@settings(max_examples=50, deadline=None)
@given(bits=st.lists(st.integers(0, 1), min_size=24, max_size=24))
def test_pure_error_reproduces_syndrome(xy5, bits):
    s = np.array(bits, dtype=np.uint8)
    np.testing.assert_array_equal(syndrome(xy5, pure_error(xy5, s)), s)


def test_logical_classes(css3):
    assert logical_class(css3, css3.logical_x) is Letter.X
    assert logical_class(css3, css3.logical_z) is Letter.Z
    assert logical_class(css3, multiply(css3.logical_x, css3.logical_z)) is Letter.Y
    assert logical_class(css3, css3.stabilizers[0].op) is Letter.I
    with pytest.raises(PreconditionError):
        logical_class(css3, PauliOp.single(9, 4, 'X'))


def test_syndrome_dimension_checks(css3):
    with pytest.raises(DimensionError):
        syndrome(css3, PauliOp.identity(4))
    with pytest.raises(DimensionError):
        pure_error(css3, np.zeros(5, dtype=np.uint8))


@pytest.mark.parametrize('d', [4, 1, 2, True, 3.0])
def test_invalid_distance(d):
    with pytest.raises(ParameterError):
        build_code(d)


def test_stabilizer_ratio_closed_form():
    assert stabilizer_ratio(5) == Fraction(16, 13)
    assert stabilizer_ratio(9) == Fraction(32, 25)
    assert abs(stabilizer_ratio(10001) - Fraction(4, 3)) < Fraction(1, 1000)
    assert boundary_fraction(5) == Fraction(16, 25)


@pytest.mark.parametrize('d', range(3, 16, 2))
def test_stabilizer_ratio_census(d):
    code = build_code(d)
    assert census_ratio([qubit.degree for qubit in code.geometry]) == degree_ratio(d)
    assert degree_ratio(d) > Fraction(4, 3) > stabilizer_ratio(d)
    regions = [qubit.region for qubit in code.geometry]
    assert regions.count(Region.BULK) == (d - 2) ** 2
    assert regions.count(Region.CORNER) == 4


def test_describe_document(xy5):
    document = describe(xy5)
    assert document['n'] == 25
    assert len(document['stabilizers']) == 24
    assert document['stabilizer_ratio'] == '16/13'
    assert document['deformation'] == 'xy'


def test_pauli_distances(css3, xy3):
    assert pauli_distances(css3) == (3, 9, 3)
    assert pauli_distances(xy3) == (3, 3, 9)


def test_pure_letter_distance_limit():
    with pytest.raises(UnsupportedError):
        pure_letter_distance(build_code(7), 'X')


def test_coset_min_weights(css3, xy3):
    for code in (css3, xy3):
        assert coset_min_weights(code) == (3, 5, 3)
    with pytest.raises(UnsupportedError):
        coset_min_weights(build_code(5, 'css'))


@pytest.mark.slow
def test_coset_min_weights_at_d5(css5):
    w_x, w_y, w_z = coset_min_weights(css5, allow_large=True)
    assert (w_x, w_z) == (5, 5)
    assert w_y >= 5


def test_stabilizer_group_is_abelian_and_logical_free(css3):
    xs, zs = next(stabilizer_group(css3))
    assert xs.shape == (256, 9)
    elements = {(tuple(x), tuple(z)) for x, z in zip(xs, zs)}
    assert len(elements) == 256
    for x, z in zip(xs[:32], zs[:32]):
        element = PauliOp.from_arrays(x, z)
        assert not syndrome(css3, element).any()
        assert logical_class(css3, element) is Letter.I


def test_css_distances_at_d5():
    d_x, d_y, d_z = pauli_distances(build_code(5, 'css'))
    assert (d_x, d_z) == (5, 5)
    assert math.isfinite(d_y) and d_y >= 5
