import math

import numpy as np
import pytest
from scipy.special import logsumexp

from heteroqec.codes import build_code, syndrome, pure_error, logical_class
from heteroqec.decoder import decode, Decoder, Method, CosetLikelihoods, exact_coset_likelihoods, \
    tn_coset_likelihoods, LatticeNetwork, coset_likelihoods
from heteroqec.exceptions import UnsupportedError, ParameterError, DimensionError
from heteroqec.noise import sample_error, uniform_model
from heteroqec.pauli import PauliOp, Letter, multiply, weight

from .support import depolarizing, regime_a, regime_b, all_syndromes


def rotate(code, op):
    """Quarter turn (r, c) -> (c, d - 1 - r) followed by a Hadamard on every qubit."""
    d = code.d
    x, z = op.x_bits(), op.z_bits()
    new_x, new_z = np.zeros(code.n, dtype=bool), np.zeros(code.n, dtype=bool)
    for r in range(d):
        for c in range(d):
            q, target = r * d + c, c * d + (d - 1 - r)
            new_x[target], new_z[target] = z[q], x[q]
    return PauliOp.from_arrays(new_x, new_z)


def test_tie_break_order():
    assert CosetLikelihoods((0.0, 1.0, 1.0, 1.0), Method.EXACT).best() is Letter.X
    assert CosetLikelihoods((0.0, 0.5, 1.0, 1.0), Method.EXACT).best() is Letter.Z
    assert CosetLikelihoods((2.0, 2.0, 2.0, 2.0), Method.EXACT).best() is Letter.I


def test_likelihood_helpers():
    likelihoods = CosetLikelihoods((-math.inf, -1.0, -math.inf, -3.0), Method.TN, 16)
    assert likelihoods.best() is Letter.X
    assert likelihoods.margin() == pytest.approx(2.0)
    assert likelihoods.differences() == (-math.inf, math.inf, -math.inf, math.inf)
    assert likelihoods.as_dict['log_pi']['I'] == '-inf'
    assert CosetLikelihoods((0.0, -math.inf, -math.inf, -math.inf), Method.EXACT).margin() == math.inf


def test_method_parse():
    assert Method.parse('TN') is Method.TN
    with pytest.raises(ParameterError):
        Method.parse('mwpm')


def test_fully_depolarizing_cosets_are_equal(xy3):
    model = uniform_model(9, 0.75)
    likelihoods = exact_coset_likelihoods(xy3, model, np.zeros(8, dtype=np.uint8))
    assert len(set(likelihoods.log_pi)) == 1
    assert likelihoods.best() is Letter.I
    tn = tn_coset_likelihoods(xy3, model, np.zeros(8, dtype=np.uint8))
    np.testing.assert_allclose(tn.differences(), 0, atol=1e-10)


@pytest.mark.parametrize('method', ['exact', 'tn'])
@pytest.mark.parametrize('fixture', ['css3', 'xy3'])
def test_single_qubit_errors_are_corrected(request, fixture, method):
    code = request.getfixturevalue(fixture)
    model = depolarizing(code, 0.1)
    for q in range(code.n):
        for letter in 'XYZ':
            error = PauliOp.single(code.n, q, letter)
            correction = decode(code, model, syndrome(code, error), method)
            assert logical_class(code, multiply(error, correction.op)) is Letter.I


@pytest.mark.parametrize('build', [depolarizing, regime_a, regime_b])
def test_tn_matches_exact_on_every_syndrome(xy3, build):
    model = build(xy3)
    network = LatticeNetwork(xy3)
    total = []
    for s in all_syndromes(xy3.num_stabilizers):
        exact = exact_coset_likelihoods(xy3, model, s)
        tn = tn_coset_likelihoods(xy3, model, s, 16, network)
        np.testing.assert_allclose(tn.differences(), exact.differences(), atol=1e-8)
        if exact.margin() > 1e-8:
            assert tn.best() is exact.best()
        total.append(logsumexp(exact.log_pi))
    assert math.exp(logsumexp(total)) == pytest.approx(1, abs=1e-10)


def test_exact_and_tn_corrections_agree(css3):
    model = regime_a(css3)
    rng = np.random.default_rng(5)
    for _ in range(30):
        s = rng.integers(0, 2, css3.num_stabilizers, dtype=np.uint8)
        exact, tn = decode(css3, model, s, 'exact'), decode(css3, model, s, 'tn')
        if exact.likelihoods.margin() > 1e-8:
            assert exact.op == tn.op
            assert exact.chosen_class is tn.chosen_class


def test_corrections_reproduce_the_syndrome(xy5):
    model = regime_b(xy5)
    rng = np.random.default_rng(6)
    for _ in range(10):
        s = rng.integers(0, 2, xy5.num_stabilizers, dtype=np.uint8)
        correction = decode(xy5, model, s)
        np.testing.assert_array_equal(syndrome(xy5, correction.op), s)


def test_trivial_syndrome_decodes_to_identity(xy5):
    correction = decode(xy5, depolarizing(xy5, 0.1), np.zeros(24, dtype=np.uint8))
    assert correction.chosen_class is Letter.I
    assert weight(correction.op) == 0


def test_noiseless_model_prefers_identity(xy3):
    model = uniform_model(9, 0.0)
    s = np.zeros(8, dtype=np.uint8)
    exact = exact_coset_likelihoods(xy3, model, s)
    assert exact.log_pi[0] == pytest.approx(0)
    assert exact.log_pi[1:] == (-math.inf,) * 3
    assert decode(xy3, model, s).chosen_class is Letter.I


def test_bond_dimension_is_exact_at_small_distance(xy5):
    model = regime_a(xy5)
    s = syndrome(xy5, PauliOp.from_string('XIZIIYIIIIIIZIIIIIIXIIIII'))
    capped = tn_coset_likelihoods(xy5, model, s, 16)
    full = tn_coset_likelihoods(xy5, model, s, None)
    np.testing.assert_allclose(capped.differences(), full.differences(), atol=1e-10)
    assert capped.discarded_weight == 0
    crude = tn_coset_likelihoods(xy5, model, s, 1)
    assert crude.discarded_weight > 0


def test_discarded_weight_shrinks_with_bond_dimension():
    code = build_code(7, 'xy')
    network = LatticeNetwork(code)
    model = regime_a(code)
    rng = np.random.default_rng(17)
    for _ in range(3):
        s = syndrome(code, sample_error(model, rng))
        tight = tn_coset_likelihoods(code, model, s, 8, network)
        loose = tn_coset_likelihoods(code, model, s, 16, network)
        assert tight.discarded_weight > 0
        assert loose.discarded_weight == 0 <= tight.discarded_weight


def test_rotation_symmetry_preserves_coset_weights(css5):
    model = depolarizing(css5, 0.15)
    rng = np.random.default_rng(7)
    for _ in range(5):
        s = rng.integers(0, 2, css5.num_stabilizers, dtype=np.uint8)
        rotated = syndrome(css5, rotate(css5, pure_error(css5, s)))
        before = sorted(tn_coset_likelihoods(css5, model, s).log_pi)
        after = sorted(tn_coset_likelihoods(css5, model, rotated).log_pi)
        np.testing.assert_allclose(np.array(after) - after[-1], np.array(before) - before[-1], atol=1e-9)


def test_sampled_errors_decode_to_a_logical_class(xy5):
    model = regime_a(xy5, p_noisy=0.1)
    rng = np.random.default_rng(8)
    classes = []
    for _ in range(20):
        error = sample_error(model, rng)
        correction = decode(xy5, model, syndrome(xy5, error))
        classes.append(logical_class(xy5, multiply(error, correction.op)))
    assert classes.count(Letter.I) >= 15


def test_exact_decoding_limits(css5):
    s = np.zeros(24, dtype=np.uint8)
    with pytest.raises(UnsupportedError):
        exact_coset_likelihoods(css5, depolarizing(css5), s)
    with pytest.raises(UnsupportedError):
        coset_likelihoods(css5, depolarizing(css5), s, 'exact')


def test_invalid_bond_dimension(css3):
    with pytest.raises(DimensionError):
        tn_coset_likelihoods(css3, depolarizing(css3), np.zeros(8, dtype=np.uint8), chi=0)


def test_decoder_caches_by_syndrome(xy3):
    decoder = Decoder(xy3, regime_a(xy3))
    s = syndrome(xy3, PauliOp.single(9, 4, 'Z'))
    first = decoder(s)
    assert decoder(s.copy()) is first
    assert len(decoder.cache) == 1
    assert decoder(np.zeros(8, dtype=np.uint8)).chosen_class is Letter.I
    assert len(decoder.cache) == 2
    exact = Decoder(xy3, regime_a(xy3), method='exact')
    assert exact(s).chosen_class is first.chosen_class
