import math

import numpy as np
import pytest

from dissyk import (
    LinearDissipation,
    PBodyDissipation,
    build_hamiltonian,
    build_jump_operators,
    build_majorana_set,
    build_lindbladian,
    doubled_inner,
    initial_string_state,
    load_coupling_table,
    sample_dissipator_couplings,
    sample_syk_couplings,
    save_coupling_table,
    syk_variance,
)
from dissyk.model import dissipator_variance


@pytest.fixture(scope="module")
def ms6():
    return build_majorana_set(6)


@pytest.fixture(scope="module")
def ms8():
    return build_majorana_set(8)


def test_variance_target():
    # N=8, q=4, J=1: (q-1)! J^2 / N^(q-1) = 6/512
    assert abs(syk_variance(8, 4, 1.0) - 6.0 / 512.0) < 1e-15


def test_sample_variance_close_to_target():
    # C(40,4) = 91390 draws in one table; relative error of the variance
    # estimate is sqrt(2/91390) ~ 0.5%, well inside the 3% gate
    c = sample_syk_couplings(40, 4, 1.0, seed=123)
    vals = np.array(list(c.values.values()))
    assert len(vals) == math.comb(40, 4)
    assert abs(vals.var() / syk_variance(40, 4, 1.0) - 1.0) < 0.03


def test_zero_coupling_scale():
    c = sample_syk_couplings(8, 4, 0.0, seed=1)
    assert all(v == 0.0 for v in c.values.values())


def test_sampling_deterministic():
    a = sample_syk_couplings(8, 4, 1.0, seed=9)
    b = sample_syk_couplings(8, 4, 1.0, seed=9)
    assert a.values == b.values
    c = sample_syk_couplings(8, 4, 1.0, seed=10)
    assert a.values != c.values
    da = sample_dissipator_couplings(8, 2, 3, 0.1, seed=9)
    db = sample_dissipator_couplings(8, 2, 3, 0.1, seed=9)
    assert da.values == db.values


def test_hamiltonian_and_dissipator_streams_independent():
    h = sample_syk_couplings(8, 4, 1.0, seed=9)
    d = sample_dissipator_couplings(8, 4, 1, 1.0, seed=9)
    hv = np.array(list(h.values.values()))
    dv = np.array([v.real for v in d.values[0].values()])
    assert not np.allclose(hv / hv.std(), dv / dv.std())


def test_sampler_rejects_bad_locality():
    with pytest.raises(ValueError):
        sample_syk_couplings(8, 3, 1.0, seed=0)  # odd q
    with pytest.raises(ValueError):
        sample_syk_couplings(4, 6, 1.0, seed=0)  # q > N
    with pytest.raises(ValueError):
        sample_dissipator_couplings(8, 2, 0, 1.0, seed=0)  # no jumps
    with pytest.raises(ValueError):
        sample_dissipator_couplings(8, 2, 2, -0.5, seed=0)  # negative V


def test_single_term_hamiltonian():
    # N=q=4 has exactly one coupling; H = i^2 J psi1 psi2 psi3 psi4
    ms = build_majorana_set(4)
    c = sample_syk_couplings(4, 4, 1.0, seed=5)
    (j_val,) = c.values.values()
    h = build_hamiltonian(ms, c)
    expected = -j_val * ms.string_matrix((1, 2, 3, 4)).toarray()
    assert np.abs(h - expected).max() < 1e-14


def test_hamiltonian_hermitian(ms8):
    h = build_hamiltonian(ms8, sample_syk_couplings(8, 4, 1.0, seed=3))
    assert np.abs(h - h.conj().T).max() < 1e-13


def test_hamiltonian_rejects_mismatched_sets(ms6):
    c = sample_syk_couplings(8, 4, 1.0, seed=3)
    with pytest.raises(ValueError):
        build_hamiltonian(ms6, c)


def test_hamiltonian_norm_disorder_average(ms8):
    # Tr(H^2)/Tr(I) averaged over disorder = C(N,q) <J^2> 2^(-q)
    n_samples = 300
    target = math.comb(8, 4) * syk_variance(8, 4, 1.0) / 2**4
    vals = []
    for r in range(n_samples):
        h = build_hamiltonian(ms8, sample_syk_couplings(8, 4, 1.0, seed=(51, r)))
        vals.append(np.vdot(h, h).real / ms8.dim)
    vals = np.array(vals)
    stderr = vals.std(ddof=1) / math.sqrt(n_samples)
    assert abs(vals.mean() - target) < 3 * stderr


def test_linear_jumps(ms6):
    jumps = build_jump_operators(ms6, LinearDissipation(lam=0.04))
    assert jumps.jump_class == "linear"
    assert jumps.fermionic
    assert len(jumps.operators) == 6
    for op, g in zip(jumps.operators, ms6.generators):
        assert np.abs(op - 0.2 * g.toarray()).max() < 1e-15


def test_pbody_jumps_counts_and_parity(ms6):
    jumps = build_jump_operators(ms6, PBodyDissipation(p=2, n_jumps=3, v=0.1, seed=1))
    assert jumps.jump_class == "p-body-random"
    assert len(jumps.operators) == 3
    assert not jumps.fermionic  # p even -> bosonic
    jumps = build_jump_operators(ms6, PBodyDissipation(p=3, n_jumps=2, v=0.1, seed=1))
    assert jumps.fermionic


def test_negative_strengths_rejected(ms6):
    with pytest.raises(ValueError):
        build_jump_operators(ms6, LinearDissipation(lam=-0.1))
    with pytest.raises(ValueError):
        build_jump_operators(ms6, PBodyDissipation(p=2, n_jumps=2, v=-0.1, seed=0))


def test_dissipator_coupling_variance():
    c = sample_dissipator_couplings(20, 2, 8, 0.3, seed=7)
    vals = np.concatenate([np.array(list(t.values())) for t in c.values])
    target = dissipator_variance(20, 2, 0.3)
    assert abs(np.mean(np.abs(vals) ** 2) / target - 1.0) < 0.05
    # circular symmetry: real and imaginary parts carry half the variance each
    assert abs(vals.real.var() / (target / 2) - 1.0) < 0.08
    assert abs(vals.imag.var() / (target / 2) - 1.0) < 0.08


@pytest.mark.parametrize("p", [1, 2, 3])
def test_jump_parity_vs_total_parity(ms8, p):
    # p odd anticommutes with total parity, p even commutes
    jumps = build_jump_operators(ms8, PBodyDissipation(p=p, n_jumps=2, v=0.2, seed=11))
    parity = ms8.parity_operator().toarray()
    for op in jumps.operators:
        if p % 2 == 0:
            assert np.abs(op @ parity - parity @ op).max() < 1e-12
        else:
            assert np.abs(op @ parity + parity @ op).max() < 1e-12


def test_p1_random_matches_linear_after_identification(ms6):
    # class-1 remark: Gaussian V_i instead of sqrt(lambda) is equivalent
    # under disorder averaging with lambda = (M/N) V^2; compare the averaged
    # dissipative action on vec(sqrt(2) psi_1)
    v_str, m_jumps = 0.3, 6
    lam = (m_jumps / 6) * v_str**2
    v0 = initial_string_state(ms6, [1])
    ref = build_lindbladian(
        None, build_jump_operators(ms6, LinearDissipation(lam)), fermionic_operator=True
    )
    ref_eig = doubled_inner(v0, ref.apply(v0))
    n_samples = 200
    vals = []
    for r in range(n_samples):
        jumps = build_jump_operators(
            ms6, PBodyDissipation(p=1, n_jumps=m_jumps, v=v_str, seed=(77, r))
        )
        lind = build_lindbladian(None, jumps, fermionic_operator=True)
        vals.append(doubled_inner(v0, lind.apply(v0)).imag)
    vals = np.array(vals)
    stderr = vals.std(ddof=1) / math.sqrt(n_samples)
    assert abs(vals.mean() - ref_eig.imag) < 4 * max(stderr, 1e-12)


def test_coupling_table_roundtrip(tmp_path):
    c = sample_syk_couplings(8, 4, 1.3, seed=21)
    path = tmp_path / "syk.txt"
    save_coupling_table(path, c)
    back = load_coupling_table(path)
    assert back == c

    d = sample_dissipator_couplings(6, 2, 3, 0.25, seed=4)
    path = tmp_path / "diss.txt"
    save_coupling_table(path, d)
    back = load_coupling_table(path)
    assert back == d
