import numpy as np
import pytest
from hypothesis import given, strategies as st

from heteroqec.exceptions import DimensionError, QubitIndexError, ParameterError
from heteroqec.pauli import PauliOp, Letter, multiply, symplectic_form, commutes, weight, letter_at, letter_codes


def paulis(n):
    return st.builds(PauliOp, st.integers(0, 2 ** n - 1), st.integers(0, 2 ** n - 1), st.just(n))


def test_letter_codes_follow_table_order():
    assert [letter.code for letter in (Letter.I, Letter.X, Letter.Z, Letter.Y)] == [0, 1, 2, 3]
    assert Letter.from_bits(1, 1) is Letter.Y


def test_string_round_trip():
    op = PauliOp.from_string('IXYZ')
    assert str(op) == 'IXYZ'
    assert weight(op) == 3
    assert [letter_at(op, q) for q in range(4)] == [Letter.I, Letter.X, Letter.Y, Letter.Z]
    np.testing.assert_array_equal(letter_codes(op), [0, 1, 3, 2])


def test_single_qubit_products():
    x, y, z = (PauliOp.from_string(c) for c in 'XYZ')
    assert multiply(x, z) == y
    assert multiply(x, x) == PauliOp.identity(1)
    assert not commutes(x, z)
    assert not commutes(x, y)
    assert commutes(y, y)


def test_two_qubit_products_commute():
    assert commutes(PauliOp.from_string('XX'), PauliOp.from_string('ZZ'))
    assert not commutes(PauliOp.from_string('XI'), PauliOp.from_string('ZZ'))


@given(paulis(6), paulis(6), paulis(6))
def test_symplectic_form_is_bilinear_and_symmetric(a, b, c):
    assert symplectic_form(a, b) == symplectic_form(b, a)
    assert symplectic_form(a * b, c) == symplectic_form(a, c) ^ symplectic_form(b, c)
    assert symplectic_form(a, a) == 0


@st.composite
def triples(draw):
    n = draw(st.integers(1, 16))
    return draw(paulis(n)), draw(paulis(n)), draw(paulis(n))


@given(triples())
def test_multiply_is_associative_and_commutative(ops):
    a, b, c = ops
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b) == multiply(b, a)
    assert multiply(a, PauliOp.identity(a.n)) == a


@given(paulis(8), paulis(8))
def test_weight_is_subadditive(a, b):
    assert weight(a * b) <= weight(a) + weight(b)


@given(st.lists(st.booleans(), min_size=1, max_size=40), st.lists(st.booleans(), min_size=1, max_size=40))
def test_array_round_trip(xs, zs):
    n = min(len(xs), len(zs))
    op = PauliOp.from_arrays(xs[:n], zs[:n])
    np.testing.assert_array_equal(op.x_bits(), xs[:n])
    np.testing.assert_array_equal(op.z_bits(), zs[:n])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(PauliOp.identity(2), PauliOp.identity(3))
    with pytest.raises(DimensionError):
        PauliOp(0b100, 0, 2)


def test_invalid_inputs():
    with pytest.raises(QubitIndexError):
        PauliOp.single(3, 3, 'X')
    with pytest.raises(QubitIndexError):
        letter_at(PauliOp.identity(2), 5)
    with pytest.raises(ParameterError):
        PauliOp.from_string('XQZ')
