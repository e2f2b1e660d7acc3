import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissyk import (
    LinearDissipation,
    PBodyDissipation,
    averaged_dissipator,
    build_hamiltonian,
    build_jump_operators,
    build_lindbladian,
    build_majorana_set,
    devectorize,
    dissipator_eigenvalue,
    dissipator_eigenvalue_large_n,
    doubled_inner,
    doubled_norm,
    initial_string_state,
    odd_overlap_count,
    op_inner_product,
    sample_syk_couplings,
    vectorize,
)


@pytest.fixture(scope="module")
def ms6():
    return build_majorana_set(6)


@pytest.fixture(scope="module")
def ms8():
    return build_majorana_set(8)


def test_vectorize_identity_pattern():
    v = vectorize(np.eye(3))
    expected = np.zeros(9)
    expected[[0, 4, 8]] = 1.0  # positions k(d+1) in column stacking
    assert np.array_equal(v, expected)


def test_devectorize_inverts():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.array_equal(devectorize(vectorize(m)), m)


def test_identity_kernel_is_identity_map():
    rng = np.random.default_rng(2)
    o = rng.normal(size=(4, 4))
    assert np.abs(np.kron(np.eye(4), np.eye(4)) @ vectorize(o) - vectorize(o)).max() == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_kron_identity(seed, dim):
    rng = np.random.default_rng(seed)
    a, o, b = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(3))
    lhs = vectorize(a @ o @ b)
    rhs = np.kron(b.T, a) @ vectorize(o)
    assert np.abs(lhs - rhs).max() < 1e-13


def test_vectorize_rejects_nonsquare():
    with pytest.raises(ValueError):
        vectorize(np.ones((2, 3)))
    with pytest.raises(ValueError):
        devectorize(np.ones(5))


def test_doubled_inner_matches_op_inner_product(ms6):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(ms6.dim, ms6.dim)) + 1j * rng.normal(size=(ms6.dim, ms6.dim))
    b = rng.normal(size=(ms6.dim, ms6.dim))
    assert abs(doubled_inner(vectorize(a), vectorize(b)) - op_inner_product(a, b)) < 1e-13


def test_no_jumps_is_hermitian_kron_form(ms6):
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=8))
    lind = build_lindbladian(h, None)
    m = lind.matrix().toarray()
    assert np.abs(m - m.conj().T).max() < 1e-13
    ref = np.kron(np.eye(ms6.dim), h) - np.kron(h.T, np.eye(ms6.dim))
    assert np.abs(m - ref).max() < 1e-13


def test_apply_is_commutator_for_pure_hamiltonian(ms6):
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=8))
    lind = build_lindbladian(h, None)
    rng = np.random.default_rng(4)
    o = rng.normal(size=(ms6.dim, ms6.dim)) + 1j * rng.normal(size=(ms6.dim, ms6.dim))
    out = devectorize(lind.apply(vectorize(o)))
    assert np.abs(out - (h @ o - o @ h)).max() < 1e-12


def test_zero_lindbladian_rejected():
    with pytest.raises(ValueError):
        build_lindbladian(None, None)


def test_apply_matches_materialized_matrix(ms6):
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=12))
    jumps = build_jump_operators(ms6, PBodyDissipation(p=2, n_jumps=3, v=0.2, seed=5))
    lind = build_lindbladian(h, jumps, fermionic_operator=True)
    m = lind.matrix().toarray()
    rng = np.random.default_rng(5)
    v = rng.normal(size=lind.dim) + 1j * rng.normal(size=lind.dim)
    assert np.abs(lind.apply(v) - m @ v).max() < 1e-12 * np.abs(m @ v).max()
    assert np.abs(lind.apply_adjoint(v) - m.conj().T @ v).max() < 1e-12 * np.abs(m @ v).max()


def test_linear_dissipator_eigenvalues(ms6):
    # H = 0, jumps sqrt(lambda) psi_i: a length-s string is an eigenvector
    # with eigenvalue i lambda s
    lam = 0.04
    lind = build_lindbladian(
        None, build_jump_operators(ms6, LinearDissipation(lam)), fermionic_operator=True
    )
    for s in (1, 3):
        v = initial_string_state(ms6, list(range(1, s + 1)))
        out = lind.apply(v)
        eig = doubled_inner(v, out)
        assert abs(eig - 1j * lam * s) < 1e-13
        assert np.abs(out - eig * v).max() < 1e-13


def test_mixed_parity_flagged(ms6):
    jumps = build_jump_operators(ms6, LinearDissipation(0.1))
    lind = build_lindbladian(None, jumps, fermionic_operator=False)
    assert lind.sign == 1
    assert lind.metadata["mixed_parity"]
    lind = build_lindbladian(None, jumps, fermionic_operator=True)
    assert lind.sign == -1
    assert not lind.metadata["mixed_parity"]


def test_apply_rejects_wrong_length(ms6):
    lind = build_lindbladian(
        None, build_jump_operators(ms6, LinearDissipation(0.1)), fermionic_operator=True
    )
    with pytest.raises(ValueError):
        lind.apply(np.ones(7))


def test_odd_overlap_count_brute_force():
    # enumeration oracle for the combinatorial formula
    for n, p, s in [(8, 2, 3), (8, 3, 5), (9, 4, 3), (10, 3, 7), (6, 1, 5)]:
        brute = sum(
            1
            for tup in combinations(range(1, n + 1), p)
            if len(set(tup) & set(range(1, s + 1))) % 2 == 1
        )
        assert odd_overlap_count(n, p, s) == brute


def test_dissipator_eigenvalue_p2_closed_form():
    # p = 2 reduces to i R V^2 s (1 - s/N); N=8, M=4, V=0.1, s=3 -> 0.009375i
    val = dissipator_eigenvalue(8, 2, 3, 4, 0.1)
    assert abs(val - 0.009375j) < 1e-15
    for s in (1, 2, 5):
        ref = 1j * (4 / 8) * 0.01 * s * (1 - s / 8)
        assert abs(dissipator_eigenvalue(8, 2, s, 4, 0.1) - ref) < 1e-15


def test_dissipator_eigenvalue_zero_strength():
    assert dissipator_eigenvalue(8, 2, 3, 4, 0.0) == 0


def test_dissipator_eigenvalue_range_checks():
    with pytest.raises(ValueError):
        dissipator_eigenvalue(8, 2, 0, 4, 0.1)
    with pytest.raises(ValueError):
        dissipator_eigenvalue(8, 9, 3, 4, 0.1)


def test_dissipator_eigenvalue_large_n_limits():
    # p=1 with V^2 <-> lambda matches the linear class i lambda s
    assert abs(dissipator_eigenvalue_large_n(1, 5, 1.0, 0.2) - 1j * 0.04 * 5) < 1e-15
    # finite-N formula approaches the limit as N grows
    lim = dissipator_eigenvalue_large_n(3, 5, 0.5, 0.2)
    errs = [
        abs(dissipator_eigenvalue(n, 3, 5, n // 2, 0.2) - lim)
        for n in (12, 20, 28)
    ]
    assert errs[0] > errs[1] > errs[2]


def test_averaged_dissipator_zero_strength(ms8):
    lind = averaged_dissipator(ms8, 2, 4, 0.0)
    v = initial_string_state(ms8, [1])
    assert np.abs(lind.apply(v)).max() == 0


def test_averaged_dissipator_eigenvectors(ms8):
    # every Majorana string is an eigenoperator of the averaged dissipator
    for p in (1, 2, 3):
        for s in (1, 3, 5):
            lind = averaged_dissipator(ms8, p, 4, 0.1, fermionic_operator=True)
            v = initial_string_state(ms8, list(range(1, s + 1)))
            out = lind.apply(v)
            ref = dissipator_eigenvalue(8, p, s, 4, 0.1)
            assert np.abs(out - ref * v).max() < 1e-12 * abs(ref)


def test_averaged_dissipator_matches_sample_mean(ms6):
    # mean of sampled dissipators converges to the averaged one
    p, m_jumps, v_str = 2, 3, 0.3
    avg = averaged_dissipator(ms6, p, m_jumps, v_str, fermionic_operator=True)
    v0 = initial_string_state(ms6, [1, 2, 3])
    ref = doubled_inner(v0, avg.apply(v0))
    n_samples = 200
    vals = []
    for r in range(n_samples):
        jumps = build_jump_operators(
            ms6, PBodyDissipation(p=p, n_jumps=m_jumps, v=v_str, seed=(13, r))
        )
        lind = build_lindbladian(None, jumps, fermionic_operator=True)
        vals.append(doubled_inner(v0, lind.apply(v0)).imag)
    vals = np.array(vals)
    stderr = vals.std(ddof=1) / math.sqrt(n_samples)
    assert abs(vals.mean() - ref.imag) < 4 * stderr


def test_spectrum_conjugate_pairs_nonnegative_real(ms6):
    # eigenvalues of -i L_o^dag close under conjugation, real parts >= 0
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=33))
    jumps = build_jump_operators(ms6, LinearDissipation(0.1))
    lind = build_lindbladian(h, jumps, fermionic_operator=True)
    eigs = np.linalg.eigvals(-1j * lind.matrix().toarray())
    assert eigs.real.min() >= -1e-10
    key = np.sort_complex(np.round(eigs, 8))
    key_conj = np.sort_complex(np.round(eigs.conj(), 8))
    assert np.abs(key - key_conj).max() < 1e-6


def test_zero_dissipation_reduction(ms6):
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=33))
    lind = build_lindbladian(h, build_jump_operators(ms6, LinearDissipation(0.0)))
    m = lind.matrix().toarray()
    assert np.abs(m - m.conj().T).max() < 1e-12


def test_initial_string_state_norm(ms8):
    for idx in ([1], [1, 2], [2, 4, 6]):
        assert abs(doubled_norm(initial_string_state(ms8, idx)) - 1.0) < 1e-13


def test_coo_export_roundtrip(tmp_path, ms6):
    h = build_hamiltonian(ms6, sample_syk_couplings(6, 4, 1.0, seed=2))
    lind = build_lindbladian(h, build_jump_operators(ms6, LinearDissipation(0.05)))
    path = tmp_path / "lind.txt"
    lind.export_coo(path)
    ref = lind.matrix().toarray()
    recon = np.zeros_like(ref)
    with open(path) as fh:
        header = fh.readline()
        assert "dim=64" in header  # doubled space has dimension 2^N
        for line in fh:
            r, c, re, im = line.split()
            recon[int(r), int(c)] = complex(float(re), float(im))
    assert np.abs(recon - ref).max() < 1e-15
