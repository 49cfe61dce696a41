import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multirail.fock import SparseState, SystemShape, enumerate_basis, inner_product, random_state, states_close
from multirail.optics import lambda_matrix
from multirail.symmetry import (
    allowed_k,
    apply_lambda,
    apply_phase_shift,
    build_Ek_state,
    check_complementary_set,
    check_hw_indices,
    clock_label,
    joint_classes,
    joint_clock_label,
    mode_shift,
    orbit_size,
    x_class_of,
)


def small_shapes(max_modes=4, max_total=3, max_parties=3):
    for modes in range(2, max_modes + 1):
        for parties in range(1, max_parties + 1):
            for photons in itertools.product(range(max_total + 1), repeat=parties):
                if sum(photons) <= max_total:
                    yield SystemShape(parties, modes, photons)


def test_shift_examples():
    assert mode_shift((2, 0, 1)) == (1, 2, 0)
    assert mode_shift((1, 1, 1, 1, 1)) == (1, 1, 1, 1, 1)
    assert mode_shift((2, 0, 1), 3) == (2, 0, 1)
    assert mode_shift(((1, 0, 0), (0, 0, 1))) == ((0, 1, 0), (1, 0, 0))


def test_shift_state_preserves_norm():
    s = random_state(SystemShape(2, 3, (1, 2)), np.random.default_rng(0))
    out = mode_shift(s, 2)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)
    assert states_close(mode_shift(out, 1), s, 1e-14)


def test_clock_label_examples():
    assert clock_label((0, 1, 2)) == 2
    assert clock_label((4, 0, 0, 0, 0)) == 0
    parts = ((0, 0, 1, 0, 0), (0, 1, 0, 0, 0), (0, 0, 0, 1, 0))
    assert joint_clock_label(parts, (1, 4, 4), 5) == 3


@given(st.integers(2, 6), st.integers(0, 4), st.data())
def test_clock_label_shift_rule(m, n, data):
    v = data.draw(st.sampled_from(enumerate_basis(m, n)))
    assert clock_label(mode_shift(v)) == (clock_label(v) + n) % m


def test_phase_shift():
    shape = SystemShape(1, 3, (3,))
    s = SparseState.basis(shape, ((0, 1, 2),))
    w = shape.omega
    assert apply_phase_shift(s, (1,))[((0, 1, 2),)] == pytest.approx(w**2)
    assert apply_phase_shift(s, (0,))[((0, 1, 2),)] == pytest.approx(1)
    assert apply_phase_shift(s, (3,))[((0, 1, 2),)] == pytest.approx(1)


def test_x_classes():
    assert x_class_of((2, 0, 0, 0, 0)).cardinality == 5
    assert x_class_of((1, 1, 1)).cardinality == 1
    cls = x_class_of((1, 0, 1, 0))
    assert cls.cardinality == 2
    assert cls.representative == (0, 1, 0, 1)
    assert orbit_size((1, 0, 1, 0)) == 2


@given(st.integers(2, 6), st.integers(0, 5), st.data())
def test_orbit_size_divides_modes(m, n, data):
    v = data.draw(st.sampled_from(enumerate_basis(m, n)))
    cls = x_class_of(v)
    assert m % cls.cardinality == 0
    assert cls.cardinality == orbit_size(v)
    assert cls.representative == min(cls.members)


def test_joint_classes_partition_subspace():
    shape = SystemShape(2, 4, (2, 2))
    classes = joint_classes(shape)
    members = [b for c in classes for b in c.members]
    assert len(members) == len(set(members)) == shape.dimension


def test_lambda_matches_single_photon_matrix():
    for modes in range(2, 6):
        shape = SystemShape(1, modes, (1,))
        for j in range(modes):
            mat = lambda_matrix(modes, j)
            for m in range(modes):
                v = tuple(int(i == m) for i in range(modes))
                out = apply_lambda(SparseState.basis(shape, (v,)), (j,))
                col = out.to_vector()
                assert np.allclose(col, mat[:, m])


def test_lambda_commutation_relation():
    # Z X = omega X Z on a single photon
    for modes in range(2, 6):
        w = np.exp(2j * np.pi / modes)
        x = lambda_matrix(modes, 0)
        z = np.diag(w ** np.arange(modes))
        assert np.allclose(z @ x, w * x @ z)


def test_allowed_k_and_errors():
    assert allowed_k(5, 5) == [0, 1, 2, 3, 4]
    assert allowed_k(2, 4) == [0, 2]
    assert allowed_k(1, 3) == [0]
    cls = x_class_of(((1, 0, 1, 0),))
    with pytest.raises(ValueError):
        build_Ek_state(cls, 1)


def test_Ek_examples():
    fixed = x_class_of(((1, 1, 1),))
    e = build_Ek_state(fixed, 0)
    assert e.amplitudes == {((1, 1, 1),): pytest.approx(1.0)}
    cls = x_class_of(((2, 0, 0, 0, 0), (1, 0, 0, 0, 0)))
    for k in range(5):
        e = build_Ek_state(cls, k)
        assert e.norm() == pytest.approx(1.0, abs=1e-12)
        shifted = mode_shift(e)
        assert states_close(shifted, SparseState(e.shape, {b: a * e.shape.omega**k for b, a in e.amplitudes.items()}), 1e-12)


def test_Ek_orthogonal_within_class():
    for shape in small_shapes(4, 3, 2):
        for cls in joint_classes(shape):
            states = [build_Ek_state(cls, k, shape) for k in allowed_k(cls.cardinality, shape.modes)]
            for a, b in itertools.combinations(states, 2):
                assert abs(inner_product(a, b)) < 1e-12
            for s in states:
                assert s.norm() == pytest.approx(1.0, abs=1e-12)


def test_phase_law_exhaustive():
    """Lambda on E_k gives omega**(k + mu_j - s) E_{k - s} with s = sum_i j_i N_i.

    Under the index condition s = 0 (mod M), so the factor is omega**(k + mu_j).
    """
    checked = 0
    for shape in small_shapes(4, 3, 3):
        modes = shape.modes
        w = shape.omega
        for j in itertools.product(range(modes), repeat=shape.parties):
            s = sum(ji * ni for ji, ni in zip(j, shape.photons))
            for cls in joint_classes(shape):
                mu = joint_clock_label(cls.representative, j, modes)
                for k in allowed_k(cls.cardinality, modes):
                    e = build_Ek_state(cls, k, shape)
                    target = build_Ek_state(cls, k - s, shape)
                    phase = w ** ((k + mu - s) % modes)
                    expected = SparseState(shape, {b: a * phase for b, a in target.amplitudes.items()})
                    assert states_close(apply_lambda(e, j), expected, 1e-12)
                    checked += 1
    assert checked > 1000


def test_hw_index_condition():
    shape = SystemShape(3, 5, (2, 1, 1))
    check_hw_indices(shape, (1, 4, 4))
    check_hw_indices(shape, (1, 1, 2))
    with pytest.raises(ValueError, match="index condition"):
        check_hw_indices(shape, (1, 1, 1))
    with pytest.raises(ValueError):
        check_hw_indices(shape, (1, 4))


def test_complementary_examples():
    prime = SystemShape(3, 5, (2, 1, 1))
    support = {(5, 5, 5)}
    for size in range(1, 6):
        for L in itertools.combinations(range(5), size):
            assert check_complementary_set(prime, (1, 4, 4), L, support)
    even = SystemShape(2, 4, (2, 2))
    assert not check_complementary_set(even, (1, 1), {0, 1}, {(4, 4)})
    assert check_complementary_set(even, (1, 1), {0}, {(4, 4)})
    assert check_complementary_set(even, (1, 1), {3}, {(2, 1)})
