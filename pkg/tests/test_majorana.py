import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissyk import (
    MajoranaSet,
    build_majorana_set,
    op_inner_product,
    op_norm,
    operator_string,
)
from dissyk.majorana import MAX_FERMIONS


@pytest.fixture(scope="module")
def ms8():
    return build_majorana_set(8)


@pytest.fixture(scope="module")
def ms4():
    return build_majorana_set(4)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_clifford_algebra(n):
    ms = build_majorana_set(n)
    eye = np.eye(ms.dim)
    for a in range(n):
        for b in range(a, n):
            anti = (
                ms.generators[a] @ ms.generators[b]
                + ms.generators[b] @ ms.generators[a]
            ).toarray()
            target = eye if a == b else np.zeros_like(eye)
            assert np.abs(anti - target).max() < 1e-13


def test_generators_hermitian(ms8):
    for g in ms8.generators:
        assert np.abs((g - g.conj().T).toarray()).max() < 1e-14


def test_trace_orthonormality(ms8):
    # Tr(psi_i psi_j)/Tr(I) = delta_ij / 2 for all 64 pairs
    for i in range(8):
        for j in range(8):
            val = op_inner_product(ms8.generators[i], ms8.generators[j])
            target = 0.5 if i == j else 0.0
            assert abs(val - target) < 1e-14


def test_two_by_two_generators():
    ms = build_majorana_set(2)
    eye = np.eye(2)
    sq = (ms.generators[0] @ ms.generators[0]).toarray()
    assert np.abs(sq - eye / 2).max() < 1e-15
    anti = (ms.generators[0] @ ms.generators[1] + ms.generators[1] @ ms.generators[0]).toarray()
    assert np.abs(anti).max() < 1e-15


def test_full_string_reversal_hermitian(ms4):
    # reversing psi_1 psi_2 psi_3 psi_4 is an even permutation, so the
    # product is Hermitian
    m = ms4.string_matrix((1, 2, 3, 4)).toarray()
    assert np.abs(m - m.conj().T).max() < 1e-14


def test_string_norms(ms4):
    assert abs(op_inner_product(ms4.operator_string([1]), ms4.operator_string([1])) - 0.5) < 1e-14
    s12 = ms4.operator_string([1, 2])
    assert abs(op_inner_product(s12, s12) - 0.25) < 1e-14


def test_string_orthogonality_explicit(ms4):
    # explicit trace at N=4: distinct index sets are orthogonal
    assert abs(op_inner_product(ms4.operator_string([1, 2]), ms4.operator_string([1, 3]))) < 1e-14


def test_all_strings_orthogonal_n4(ms4):
    from itertools import combinations

    subsets = [c for r in range(1, 5) for c in combinations(range(1, 5), r)]
    for i, s1 in enumerate(subsets):
        for s2 in subsets[i + 1 :]:
            val = op_inner_product(ms4.string_matrix(s1), ms4.string_matrix(s2))
            assert abs(val) < 1e-14, (s1, s2)


def test_random_strings_orthogonal_n8(ms8):
    rng = np.random.default_rng(2)
    from itertools import combinations

    subsets = [c for r in range(1, 9) for c in combinations(range(1, 9), r)]
    for _ in range(60):
        i, j = rng.choice(len(subsets), size=2, replace=False)
        val = op_inner_product(ms8.string_matrix(subsets[i]), ms8.string_matrix(subsets[j]))
        assert abs(val) < 1e-13


def test_string_norm_scaling(ms8):
    # squared norm of a length-s string is 2^(-s)
    for s in (1, 3, 5, 8):
        string = ms8.operator_string(tuple(range(1, s + 1)))
        assert abs(op_inner_product(string, string) - 2.0**-s) < 1e-14


def test_normalized_initial_operators(ms8):
    # sqrt(2) psi_1 and generally 2^(p/2) psi_1..psi_p have unit norm
    v = np.sqrt(2) * ms8.generators[0].toarray()
    assert abs(op_inner_product(v, v) - 1.0) < 1e-14
    for p in (2, 3):
        m = 2 ** (p / 2) * ms8.string_matrix(tuple(range(1, p + 1))).toarray()
        assert abs(op_inner_product(m, m) - 1.0) < 1e-13


def test_identity_orthogonal_to_generator(ms8):
    assert abs(op_inner_product(np.eye(ms8.dim), ms8.generators[0].toarray())) < 1e-14


def test_construction_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_majorana_set(3)
    with pytest.raises(ValueError):
        build_majorana_set(0)
    with pytest.raises(ValueError):
        build_majorana_set(MAX_FERMIONS + 2)


def test_string_rejects_bad_indices(ms4):
    for bad in ([2, 1], [1, 1], [0, 1], [3, 5], []):
        with pytest.raises(ValueError):
            operator_string(ms4, bad)


def test_inner_product_rejects_mismatch(ms4, ms8):
    with pytest.raises(ValueError):
        op_inner_product(ms4.generators[0], ms8.generators[0])


def test_string_cache_reuse(ms4):
    m1 = ms4.string_matrix((1, 3))
    m2 = ms4.string_matrix((1, 3))
    assert m1 is m2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_inner_product_conjugate_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert abs(op_inner_product(a, b) - np.conj(op_inner_product(b, a))) < 1e-13


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_inner_product_positive_definite(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    val = op_inner_product(a, a)
    assert abs(val.imag) < 1e-13
    assert val.real > 0
    assert abs(op_norm(a) - np.sqrt(val.real)) < 1e-13
