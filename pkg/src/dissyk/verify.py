"""Fast self-verification: one PASS/FAIL line per oracle or invariant.

A trimmed-down version of the full acceptance suite (tests/test_acceptance.py)
meant to run in a few seconds from the CLI.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from . import closedforms as cf
from .bilanczos import bilanczos_tridiagonalize, eigenvalue_bound_check
from .chain import evolve_wavefunctions, otoc_from_wavefunctions
from .majorana import MajoranaSet
from .model import LinearDissipation, build_jump_operators, sample_syk_couplings, build_hamiltonian
from .superop import (
    averaged_dissipator,
    build_lindbladian,
    dissipator_eigenvalue,
    doubled_inner,
    initial_string_state,
    vectorize,
)


def run_verification(verbose: bool = True) -> bool:
    checks = [
        ("clifford-algebra-N8", _check_clifford),
        ("vectorization-kron-identity", _check_vectorize),
        ("closed-system-hermiticity", _check_hermitian),
        ("averaged-dissipator-eigenvalues", _check_dissipator_eigs),
        ("chain-vs-expm", _check_chain_expm),
        ("chain-vs-closed-form-u0.1", _check_chain_closed_form),
        ("spectral-fourier-duality", _check_fourier),
        ("otoc-closed-form-equivalence", _check_otoc),
        ("proposition-1-bound", _check_bound),
    ]
    all_ok = True
    for name, fn in checks:
        try:
            err = fn()
            ok = True
        except Exception as exc:  # failure details belong in the report line
            err, ok = f"{type(exc).__name__}: {exc}", False
        all_ok &= ok
        if verbose:
            status = "PASS" if ok else "FAIL"
            print(f"{status} {name} ({err})")
    return all_ok


def _check_clifford():
    ms = MajoranaSet(8)
    eye = np.eye(ms.dim)
    worst = 0.0
    for i in range(8):
        for k in range(i, 8):
            anti = (ms.generators[i] @ ms.generators[k] + ms.generators[k] @ ms.generators[i]).toarray()
            target = eye if i == k else 0.0 * eye
            worst = max(worst, np.abs(anti - target).max())
    assert worst < 1e-13
    return f"max dev {worst:.2e}"


def _check_vectorize():
    rng = np.random.default_rng(11)
    a, o, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    dev = np.abs(vectorize(a @ o @ b) - np.kron(b.T, a) @ vectorize(o)).max()
    assert dev < 1e-13
    return f"max dev {dev:.2e}"


def _check_hermitian():
    ms = MajoranaSet(6)
    h = build_hamiltonian(ms, sample_syk_couplings(6, 4, 1.0, seed=3))
    m = build_lindbladian(h, None).matrix().toarray()
    dev = np.abs(m - m.conj().T).max()
    assert dev < 1e-13
    return f"max dev {dev:.2e}"


def _check_dissipator_eigs():
    ms = MajoranaSet(8)
    worst = 0.0
    for p in (1, 2):
        for s in (1, 3):
            lind = averaged_dissipator(ms, p, 4, 0.1, fermionic_operator=True)
            v = initial_string_state(ms, list(range(1, s + 1)))
            lam = doubled_inner(v, lind.apply(v))
            ref = dissipator_eigenvalue(8, p, s, 4, 0.1)
            worst = max(worst, abs(lam - ref) / abs(ref))
    assert worst < 1e-10
    return f"max rel err {worst:.2e}"


def _check_chain_expm():
    import warnings

    from scipy.linalg import expm

    rng = np.random.default_rng(4)
    a = 1j * rng.uniform(0.1, 0.5, size=5)
    b = rng.uniform(0.3, 1.0, size=4)
    from .chain import TruncationLeak, chain_generator

    gen = chain_generator(a, b, b, 5)
    t_grid = np.linspace(0, 2.0, 9)
    with warnings.catch_warnings():
        # the 5-site chain is the whole system here, not a truncation
        warnings.simplefilter("ignore", TruncationLeak)
        traj = evolve_wavefunctions((a, b, b), t_grid, tol=1e-12)
    worst = max(
        np.abs(traj.phi[i] - expm(gen * t) @ np.eye(5)[:, 0]).max()
        for i, t in enumerate(t_grid)
    )
    assert worst < 1e-8
    return f"max dev {worst:.2e}"


def _check_chain_closed_form():
    cp = cf.ChainParams(u=0.1)
    a, b, c = cf.chain_coefficients(cp, 300)
    t_grid = np.linspace(0, 3, 13)
    traj = evolve_wavefunctions((a, b, c), t_grid, tol=1e-11)
    ref = cf.wavefunctions_closed_form(cp, 11, t_grid)
    dev = np.abs(traj.phi[:, :11] - ref).max()
    assert dev < 1e-6
    return f"max dev {dev:.2e}"


def _check_fourier():
    alpha, mu = 1.0, 0.2
    worst = 0.0
    for omega in (-2.0, 0.0, 3.0):
        re = quad(lambda t: np.cos(omega * t) * cf.model_autocorrelation(alpha, mu, t), -40, 40, limit=400)[0]
        im = quad(lambda t: -np.sin(omega * t) * cf.model_autocorrelation(alpha, mu, t), -40, 40, limit=400)[0]
        worst = max(worst, abs(complex(re, im) - complex(cf.spectral_function(alpha, mu, omega))))
    assert worst < 1e-6
    return f"max dev {worst:.2e}"


def _check_otoc():
    q, n, u = 300, 100, 0.1
    cp = cf.ChainParams(u=u)
    t_grid = np.linspace(0, 4, 17)
    phi = cf.wavefunctions_closed_form(cp, 400, t_grid)
    from .chain import KrylovTrajectory

    weights = np.abs(phi) ** 2
    traj = KrylovTrajectory(
        t_grid=t_grid,
        phi=phi.astype(complex),
        z=weights.sum(axis=1),
        k=weights @ np.arange(400) / weights.sum(axis=1),
        tail=np.abs(phi[:, -1]),
    )
    got = otoc_from_wavefunctions(traj, q, n)
    ref = cf.otoc_closed_form(u, 1.0, q, n, t_grid)
    dev = np.abs(got - ref).max()
    assert dev < 1e-8
    return f"max dev {dev:.2e}"


def _check_bound():
    ms = MajoranaSet(6)
    h = build_hamiltonian(ms, sample_syk_couplings(6, 4, 1.0, seed=9))
    jumps = build_jump_operators(ms, LinearDissipation(0.1))
    lind = build_lindbladian(h, jumps, fermionic_operator=True)
    res = bilanczos_tridiagonalize(lind, initial_string_state(ms, [1]), max_steps=10)
    report = eigenvalue_bound_check(res.tridiagonal)
    assert report.lower_margin >= -1e-10 and report.upper_margin >= -1e-10
    return f"margins {report.lower_margin:.2e}, {report.upper_margin:.2e}"
