"""Non-Hermitian Krylov-chain dynamics and the observables built on it.

The operator wavefunctions phi_n(t) (phi_0 is the autocorrelation) obey the
tight-binding equation

    d/dt phi_{n-1} = c_{n-1} phi_{n-2} + i a_n phi_{n-1} - b_n phi_n ,

integrated from phi = (1, 0, 0, ...).  Probability is not conserved once the
a_n are nonzero; Krylov complexity is the normalized mean position
K(t) = sum_n n |phi_n|^2 / sum_n |phi_n|^2 with n counted from 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bilanczos import TridiagonalData


class NumericalFailure(RuntimeError):
    """Raised when a computation degenerates (vanishing norm, failed solve)."""


class TruncationLeak(UserWarning):
    """Amplitude reached the last chain site above the tail tolerance."""


@dataclass
class KrylovTrajectory:
    """Chain wavefunctions on a time grid plus the derived diagnostics."""

    t_grid: np.ndarray
    phi: np.ndarray  # shape (n_times, k_max)
    z: np.ndarray  # norm sum |phi_n|^2
    k: np.ndarray  # Krylov complexity
    tail: np.ndarray  # |phi_{k_max-1}| monitor

    @property
    def k_max(self) -> int:
        return self.phi.shape[1]

    @property
    def phi0(self) -> np.ndarray:
        """Autocorrelation phi_0(t)."""
        return self.phi[:, 0]

    def to_csv(self, path, n_store: int = 1, otoc: np.ndarray | None = None) -> None:
        """Columns t, Z, K, [otoc,] phi_n re/im for n < n_store."""
        import csv

        n_store = min(n_store, self.k_max)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["t", "Z", "K"]
            if otoc is not None:
                header.append("otoc")
            for n in range(n_store):
                header += [f"phi{n}_re", f"phi{n}_im"]
            writer.writerow(header)
            for i, t in enumerate(self.t_grid):
                row = [repr(float(t)), repr(float(self.z[i])), repr(float(self.k[i]))]
                if otoc is not None:
                    row.append(repr(float(otoc[i])))
                for n in range(n_store):
                    row += [repr(float(self.phi[i, n].real)), repr(float(self.phi[i, n].imag))]
                writer.writerow(row)


def chain_generator(a, b, c, k_max: int) -> np.ndarray:
    """Dense generator A of d(phi)/dt = A phi for the truncated chain."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if k_max > len(a):
        raise ValueError(f"k_max = {k_max} exceeds the {len(a)} available coefficients")
    m = np.diag(1j * a[:k_max])
    if k_max > 1:
        m += np.diag(c[: k_max - 1], -1)
        m -= np.diag(b[: k_max - 1], 1)
    return m


def evolve_wavefunctions(
    tri: TridiagonalData | tuple,
    t_grid,
    k_max: int | None = None,
    tol: float = 1e-10,
    tail_tol: float = 1e-8,
) -> KrylovTrajectory:
    """Integrate the chain from phi = (1, 0, ..., 0) over an increasing grid.

    tri is TridiagonalData or a plain (a, b, c) triple.  k_max defaults to
    every available coefficient; if the tail site ever exceeds tail_tol a
    TruncationLeak warning reports the first offending time (the result is
    then polluted by the hard truncation).
    """
    if isinstance(tri, TridiagonalData):
        a, b, c = tri.a, tri.b, tri.c
    else:
        a, b, c = (np.asarray(x, dtype=complex) for x in tri)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a one-dimensional time array")
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must increase from 0")
    if k_max is None:
        k_max = len(a)
    if k_max < 1 or k_max > len(a):
        raise ValueError(f"k_max = {k_max} outside 1..{len(a)} available coefficients")

    diag = 1j * np.asarray(a, dtype=complex)[:k_max]
    lower = np.asarray(c, dtype=complex)[: k_max - 1]
    upper = np.asarray(b, dtype=complex)[: k_max - 1]

    def rhs(_t, y):
        dy = diag * y
        if k_max > 1:
            dy[1:] += lower * y[:-1]
            dy[:-1] -= upper * y[1:]
        return dy

    y0 = np.zeros(k_max, dtype=complex)
    y0[0] = 1.0
    if len(t_grid) == 1:
        phi = y0[None, :].copy()
    else:
        sol = solve_ivp(
            rhs,
            (0.0, float(t_grid[-1])),
            y0,
            method="DOP853",
            t_eval=t_grid,
            rtol=tol,
            atol=tol,
        )
        if not sol.success:
            raise NumericalFailure(f"chain integration failed: {sol.message}")
        phi = sol.y.T.copy()

    tail = np.abs(phi[:, -1])
    # a chain that exhausted its Krylov space is complete, not truncated
    complete = (
        isinstance(tri, TridiagonalData)
        and tri.termination in ("breakdown", "converged")
        and k_max == len(a)
    )
    leaks = np.nonzero(tail > tail_tol)[0]
    if leaks.size and not complete:
        warnings.warn(
            f"chain tail amplitude {tail[leaks[0]]:.3e} exceeds {tail_tol:g} "
            f"at t = {t_grid[leaks[0]]:g}; increase k_max",
            TruncationLeak,
        )
    weights = np.abs(phi) ** 2
    z = weights.sum(axis=1)
    k = weights @ np.arange(k_max)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(z > 0, k / np.where(z > 0, z, 1.0), np.nan)
    return KrylovTrajectory(t_grid=t_grid, phi=phi, z=z, k=k, tail=tail)


def krylov_complexity(traj: KrylovTrajectory) -> np.ndarray:
    """K(t) = sum n |phi_n|^2 / sum |phi_n|^2, failing on vanishing norm."""
    bad = np.nonzero(traj.z <= 0)[0]
    if bad.size:
        raise NumericalFailure(
            f"wavefunction norm vanished at t = {traj.t_grid[bad[0]]:g}"
        )
    weights = np.abs(traj.phi) ** 2
    return (weights @ np.arange(traj.k_max)) / traj.z


def string_size(level, q: int, p: int = 1):
    """Majorana-string length d(k) = k(q-2) + p carried by Krylov level k."""
    return np.asarray(level) * (q - 2) + p


def otoc_from_wavefunctions(
    traj: KrylovTrajectory, q: int, n_fermions: int, p: int = 1
) -> np.ndarray:
    """OTOC from the populated chain levels.

    For a one-fermion initial operator this is the normalized mean string
    size <s>/N with s = k(q-2)+1; for a p-body initial operator
    (-1)^(p+1) <s>/N + (1 + (-1)^p) / (2N) with s = k(q-2)+p.
    """
    if q % 2 != 0:
        raise ValueError(f"q must be even, got {q}")
    if p < 1:
        raise ValueError(f"initial operator size p must be >= 1, got {p}")
    bad = np.nonzero(traj.z <= 0)[0]
    if bad.size:
        raise NumericalFailure(
            f"wavefunction norm vanished at t = {traj.t_grid[bad[0]]:g}"
        )
    weights = np.abs(traj.phi) ** 2
    sizes = string_size(np.arange(traj.k_max), q, p)
    mean_size = (weights @ sizes) / traj.z
    return ((-1) ** (p + 1) * mean_size + (1 + (-1) ** p) / 2.0) / n_fermions


def q_complexity(traj: KrylovTrajectory, weights) -> np.ndarray:
    """Generic diagonal superoperator expectation sum_l w(l) |phi_l(t)|^2.

    weights is a callable on the level index or an array covering every
    populated level; the caller encodes the superoperator's diagonal
    coefficients (already including any 2^l / C(N, d(l)) factors) in w.
    Unnormalized: w = 1 returns Z(t), w(l) = l the K-complexity numerator.
    """
    if callable(weights):
        w = np.array([weights(l) for l in range(traj.k_max)], dtype=float)
    else:
        w = np.asarray(weights, dtype=float)
        if w.size < traj.k_max:
            raise ValueError(
                f"weights cover {w.size} levels but {traj.k_max} are populated"
            )
        w = w[: traj.k_max]
    return (np.abs(traj.phi) ** 2) @ w
