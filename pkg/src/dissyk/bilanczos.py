"""Bi-Lanczos tridiagonalization of the Lindbladian.

Two bi-orthonormal Krylov bases <<q_m|p_n>> = delta_mn are built, one by
L_o^dag and one by L_o, through the three-term recurrences

    c_j |p_{j+1}>> = L_o^dag |p_j>> - a_j |p_j>> - b_{j-1} |p_{j-1}>>
    b_j^* |q_{j+1}>> = L_o |q_j>> - a_j^* |q_j>> - c_{j-1}^* |q_{j-1}>>

which cast the Lindbladian into tridiagonal form with diagonal a_n,
superdiagonal b_n, and subdiagonal c_n (indexed from 1).  The phase
convention puts the whole phase of omega_j = <<r_j|s_j>> into b_j:
c_j = sqrt|omega_j| is real nonnegative and b_j = omega_j^*/c_j.

Full re-biorthogonalization (FO) of the two new directions against all prior
basis vectors runs every step by default; 'threshold' mode triggers it only
once the measured bi-orthogonality residual exceeds fo_threshold.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .superop import LindbladSuper


@dataclass
class TridiagonalData:
    """Bi-Lanczos coefficients: a (length n_steps), b and c (length n_steps-1)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    termination: str  # "max-steps", "breakdown", or "converged"

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        self.c = np.asarray(self.c, dtype=complex)
        if len(self.b) != len(self.c):
            raise ValueError("b and c must have equal length")
        if len(self.a) != len(self.b) + 1:
            raise ValueError("need |a| = |b| + 1 = |c| + 1")

    @property
    def n_steps(self) -> int:
        return len(self.a)

    @property
    def d(self) -> np.ndarray:
        """Balanced off-diagonal d_n = sqrt(b_n c_n)."""
        return np.sqrt(self.b * self.c)

    def matrix(self) -> np.ndarray:
        """Dense tridiagonal matrix (a diagonal, b super, c sub)."""
        return (
            np.diag(self.a)
            + np.diag(self.b, 1)
            + np.diag(self.c, -1)
        )

    def to_csv(self, path) -> None:
        """Columns (n, Re a, Im a, b, c); b, c printed as plain reals when
        their imaginary part is negligible (the empirical b_n = c_n case)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "re_a", "im_a", "b", "c"])
            for n in range(self.n_steps):
                row = [n + 1, repr(float(self.a[n].real)), repr(float(self.a[n].imag))]
                if n < len(self.b):
                    row += [_fmt_offdiag(self.b[n]), _fmt_offdiag(self.c[n])]
                else:
                    row += ["", ""]
                writer.writerow(row)

    def to_json(self, diagnostics: "BiLanczosDiagnostics | None" = None) -> str:
        record = {
            "a": _complex_list(self.a),
            "b": _complex_list(self.b),
            "c": _complex_list(self.c),
            "termination": self.termination,
            "n_steps": self.n_steps,
        }
        if diagnostics is not None:
            record["diagnostics"] = {
                "biortho_residuals": list(map(float, diagnostics.biortho_residuals)),
                "omega_abs": list(map(float, diagnostics.omega_abs)),
                "fo_steps": list(diagnostics.fo_steps),
            }
        return json.dumps(record, sort_keys=True)


def _fmt_offdiag(z: complex) -> str:
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return repr(float(z.real))
    return repr(complex(z))


def _complex_list(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr)]


@dataclass
class BiLanczosDiagnostics:
    """Per-step bi-orthogonality residuals, |omega_j|, and FO trigger log."""

    biortho_residuals: list = field(default_factory=list)
    omega_abs: list = field(default_factory=list)
    fo_steps: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.biortho_residuals, default=0.0)


@dataclass
class BiLanczosResult:
    tridiagonal: TridiagonalData
    p_basis: np.ndarray  # rows p_1 .. p_n
    q_basis: np.ndarray
    diagnostics: BiLanczosDiagnostics


class _MatrixOperator:
    """Adapter giving dense/sparse matrices the LindbladSuper apply surface."""

    def __init__(self, m):
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        self._m = m
        self._mh = m.conj().T
        self.dim = m.shape[0]

    def apply(self, v):
        return self._m @ v

    def apply_adjoint(self, v):
        return self._mh @ v


def bilanczos_tridiagonalize(
    op,
    v0: np.ndarray,
    max_steps: int,
    fo: str = "always",
    fo_threshold: float = 1e-10,
    breakdown_tol: float = 1e-12,
) -> BiLanczosResult:
    """Run the bi-Lanczos iteration from the normalized start vector v0.

    op is a LindbladSuper or any square matrix; for a LindbladSuper the
    doubled-space inner product (vdot / 2^(N/2)) is used so that physical
    start vectors like vec(sqrt(2) psi_1) have unit norm.

    Breakdown (|omega_j| ~ 0) terminates gracefully with status "breakdown",
    or "converged" when the full Krylov dimension is exhausted; both return
    the coefficients gathered so far.
    """
    if fo not in ("always", "threshold", "never"):
        raise ValueError(f"unknown FO policy {fo!r}")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")

    if isinstance(op, LindbladSuper):
        ip_scale = 1.0 / op.hilbert_dim
    else:
        op = _MatrixOperator(sp.csr_matrix(op) if sp.issparse(op) else np.asarray(op))
        ip_scale = 1.0

    def inner(u, v):
        return np.vdot(u, v) * ip_scale

    v0 = np.asarray(v0, dtype=complex)
    norm0 = math.sqrt(max(inner(v0, v0).real, 0.0))
    if abs(norm0 - 1.0) > 1e-8:
        raise ValueError(f"start vector must have unit norm, got {norm0!r}")

    dim = op.dim
    n_limit = min(max_steps, dim)
    p_list = [v0.copy()]
    q_list = [v0.copy()]
    a_list: list[complex] = []
    b_list: list[complex] = []
    c_list: list[complex] = []
    diag = BiLanczosDiagnostics()
    termination = "max-steps"
    scale = 0.0
    residual = 0.0
    # gram[m][n] tracks <<q_m|p_n>>; only new rows/columns change per step
    gram_max = 0.0

    for j in range(1, n_limit + 1):
        pj, qj = p_list[-1], q_list[-1]
        r = op.apply(pj)
        s = op.apply_adjoint(qj)
        if j == 1:
            scale = max(scale, math.sqrt(max(inner(r, r).real, 0.0)))
        else:
            r -= b_list[-1] * p_list[-2]
            s -= np.conj(c_list[-1]) * q_list[-2]
        aj = inner(qj, r)
        r -= aj * pj
        s -= np.conj(aj) * qj
        a_list.append(aj)
        scale = max(scale, abs(aj))

        do_fo = fo == "always" or (fo == "threshold" and residual > fo_threshold)
        if do_fo:
            # two passes of classical Gram-Schmidt against the dual basis
            for _ in range(2):
                for pm, qm in zip(p_list, q_list):
                    r -= inner(qm, r) * pm
                    s -= inner(pm, s) * qm
            diag.fo_steps.append(j)

        omega = inner(r, s)
        diag.omega_abs.append(abs(omega))
        if math.sqrt(abs(omega)) <= breakdown_tol * max(scale, 1e-300):
            termination = "breakdown" if j < dim else "converged"
            break
        cj = math.sqrt(abs(omega))
        bj = np.conj(omega) / cj
        if j == n_limit:
            termination = "converged" if n_limit == dim else "max-steps"
            break
        b_list.append(bj)
        c_list.append(cj)
        scale = max(scale, abs(bj), cj)
        p_new = r / cj
        q_new = s / np.conj(bj)
        # incremental bi-orthogonality residual: new row and column only
        row = np.abs([inner(q_new, pm) for pm in p_list])
        col = np.abs([inner(qm, p_new) for qm in q_list])
        self_err = abs(inner(q_new, p_new) - 1.0)
        gram_max = max(gram_max, row.max(initial=0.0), col.max(initial=0.0), self_err)
        residual = gram_max
        diag.biortho_residuals.append(residual)
        p_list.append(p_new)
        q_list.append(q_new)

    n = len(a_list)
    tri = TridiagonalData(
        a=np.array(a_list),
        b=np.array(b_list[: n - 1]),
        c=np.array(c_list[: n - 1]),
        termination=termination,
    )
    return BiLanczosResult(
        tridiagonal=tri,
        p_basis=np.array(p_list[:n]),
        q_basis=np.array(q_list[:n]),
        diagnostics=diag,
    )


def stable_prefix(diagnostics: BiLanczosDiagnostics, dip_ratio: float = 0.2) -> int:
    """Number of leading steps before the first near-breakdown dip.

    A dip is a step whose sqrt|omega_j| falls below dip_ratio times the
    median of all earlier steps; the bi-orthogonal bases are then nearly
    orthogonal to each other and the coefficients that follow are amplified
    noise (look-ahead continuation is out of scope).  Returns the full step
    count when no dip occurs.  Coefficients a_1..a_k and b_1..b_k, c_1..c_k
    with k the returned prefix are unaffected.
    """
    vals = np.sqrt(np.asarray(diagnostics.omega_abs, dtype=float))
    for i in range(1, len(vals)):
        if vals[i] < dip_ratio * np.median(vals[:i]):
            return i
    return len(vals)


@dataclass
class BoundCheckReport:
    eigenvalues: np.ndarray
    lower_margin: float  # min Im(lambda) - min Im(a_n)
    upper_margin: float  # max Im(a_n) - max Im(lambda)

    @property
    def holds(self) -> bool:
        return self.lower_margin >= 0.0 and self.upper_margin >= 0.0


def eigenvalue_bound_check(tri: TridiagonalData, tol: float = 0.0) -> BoundCheckReport:
    """Check that every eigenvalue of the balanced tridiagonal matrix (off
    diagonals sqrt(b_n c_n)) has its imaginary part inside
    [min Im a_n, max Im a_n].  Report only; margins may be negative."""
    d = tri.d
    m = np.diag(tri.a) + np.diag(d, 1) + np.diag(d, -1)
    eigs = np.linalg.eigvals(m)
    im_a = tri.a.imag
    return BoundCheckReport(
        eigenvalues=eigs,
        lower_margin=float(eigs.imag.min() - im_a.min() + tol),
        upper_margin=float(im_a.max() - eigs.imag.max() + tol),
    )


def moments_from_tridiagonal(tri: TridiagonalData, k_max: int) -> np.ndarray:
    """Moments mu_k = e_1^T (iT)^k e_1 for k = 0..k_max.

    These equal d^k phi_0 / dt^k at t = 0 of the Krylov-chain dynamics and
    cross-check the tridiagonal data against the autocorrelation series.
    """
    t = 1j * tri.matrix()
    v = np.zeros(tri.n_steps, dtype=complex)
    v[0] = 1.0
    out = np.empty(k_max + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, k_max + 1):
        v = t @ v
        out[k] = v[0]
    return out
