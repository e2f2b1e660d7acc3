"""Vectorization and the adjoint Lindbladian superoperator.

Operators O on the 2^(N/2)-dimensional space are column-stacked into vectors
of length 2^N; under that map A O B -> (B^T kron A) vec(O).  The adjoint
Lindbladian acting on operators,

    L_o^dag O = [H, O] - i sum_k [ s L_k^dag O L_k - (1/2){L_k^dag L_k, O} ],

becomes the doubled-space matrix

    L_o^dag = (I kron H - H^T kron I)
              - i sum_k [ s L_k^T kron L_k^dag
                          - (1/2)(I kron L_k^dag L_k + L_k^T L_k^* kron I) ],

with the fermionic sign s = -1 exactly when both the jump operators and the
evolving operator are fermionic, else s = +1.

apply()/apply_adjoint() act matrix-free (devectorize, dense products,
revectorize); matrix() materializes the sparse kron form for small-N dense
checks and export.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .majorana import MajoranaSet
from .model import JumpOperatorSet, dissipator_variance


def vectorize(op) -> np.ndarray:
    """Column-stack a square operator into a length-d^2 vector."""
    m = op.toarray() if sp.issparse(op) else np.asarray(op)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"vectorize needs a square operator, got shape {m.shape}")
    return np.asarray(m, dtype=complex).flatten(order="F")


def devectorize(vec: np.ndarray) -> np.ndarray:
    """Inverse of vectorize."""
    v = np.asarray(vec)
    d = math.isqrt(v.size)
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def doubled_inner(u: np.ndarray, v: np.ndarray) -> complex:
    """Doubled-space inner product <<u|v>>, normalized so that it equals
    Tr(A^dag B)/Tr(I) of the underlying operators."""
    if u.size != v.size:
        raise ValueError("dimension mismatch in doubled-space inner product")
    return complex(np.vdot(u, v)) / math.isqrt(u.size)


def doubled_norm(v: np.ndarray) -> float:
    return math.sqrt(max(doubled_inner(v, v).real, 0.0))


class LindbladSuper:
    """Adjoint Lindbladian on the doubled space.

    The dissipative part is stored as pairs (A_k, B_k) and the anticommutator
    kernel G, with action -i [ sign * sum_k A_k O B_k - (GO + OG)/2 ]:

    * sampled jumps:   A_k = L_k^dag, B_k = L_k, G = sum_k L_k^dag L_k
    * averaged p-body: A_t = w Psi_t^dag, B_t = Psi_t over increasing
      p-tuples t, w = M p! V^2 / N^p, G = w C(N,p) 2^(-p) I

    Immutable after assembly; apply/apply_adjoint are pure.
    """

    def __init__(
        self,
        hamiltonian: np.ndarray | None,
        pairs: tuple[tuple[np.ndarray, np.ndarray], ...],
        anticomm_kernel: np.ndarray | None,
        sign: int,
        hilbert_dim: int,
        metadata: dict,
    ):
        self.hamiltonian = hamiltonian
        self.pairs = pairs
        self.anticomm_kernel = anticomm_kernel
        self.sign = sign
        self.hilbert_dim = hilbert_dim
        self.metadata = metadata
        self._matrix = None

    @property
    def dim(self) -> int:
        """Doubled-space dimension 2^N."""
        return self.hilbert_dim**2

    def _check(self, vec: np.ndarray) -> None:
        if vec.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {vec.shape}")

    def _dissipative(self, op: np.ndarray, adjoint: bool) -> np.ndarray:
        g = self.anticomm_kernel
        acc = -0.5 * (g @ op + op @ g)
        if adjoint:
            for a, b in self.pairs:
                acc += self.sign * (a.conj().T @ op @ b.conj().T)
        else:
            for a, b in self.pairs:
                acc += self.sign * (a @ op @ b)
        return acc

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """L_o^dag vec(O), the generator of operator evolution."""
        self._check(vec)
        op = devectorize(vec)
        out = np.zeros_like(op)
        if self.hamiltonian is not None:
            out += self.hamiltonian @ op - op @ self.hamiltonian
        if self.pairs:
            out += -1j * self._dissipative(op, adjoint=False)
        return out.flatten(order="F")

    def apply_adjoint(self, vec: np.ndarray) -> np.ndarray:
        """L_o vec(O), the matrix conjugate transpose of apply."""
        self._check(vec)
        op = devectorize(vec)
        out = np.zeros_like(op)
        if self.hamiltonian is not None:
            out += self.hamiltonian @ op - op @ self.hamiltonian
        if self.pairs:
            out += 1j * self._dissipative(op, adjoint=True)
        return out.flatten(order="F")

    def matrix(self) -> sp.csr_matrix:
        """Materialize the sparse doubled-space matrix (meant for N <= 10)."""
        if self._matrix is None:
            d = self.hilbert_dim
            eye = sp.identity(d, dtype=complex, format="csr")
            m = sp.csr_matrix((d * d, d * d), dtype=complex)
            if self.hamiltonian is not None:
                h = sp.csr_matrix(self.hamiltonian)
                m = m + sp.kron(eye, h) - sp.kron(h.T, eye)
            if self.pairs:
                diss = sp.csr_matrix((d * d, d * d), dtype=complex)
                for a, b in self.pairs:
                    diss = diss + self.sign * sp.kron(
                        sp.csr_matrix(b).T, sp.csr_matrix(a)
                    )
                g = sp.csr_matrix(self.anticomm_kernel)
                diss = diss - 0.5 * (sp.kron(eye, g) + sp.kron(g.T, eye))
                m = m - 1j * diss
            self._matrix = m.tocsr()
        return self._matrix

    def export_coo(self, path) -> None:
        """Write the assembled matrix as 'row col re im' text lines."""
        coo = self.matrix().tocoo()
        with open(path, "w") as fh:
            fh.write(f"# lindbladian dim={self.dim} sign={self.sign}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {float(v.real)!r} {float(v.imag)!r}\n")


def build_lindbladian(
    hamiltonian: np.ndarray | None,
    jumps: JumpOperatorSet | None,
    fermionic_operator: bool = True,
) -> LindbladSuper:
    """Assemble L_o^dag for a Hamiltonian and a set of jump operators.

    fermionic_operator declares the parity of the initial operator the run
    will evolve; the "-" sign branch is taken exactly when both it and the
    jumps are fermionic.  Mixed-parity combinations (fermionic jumps, bosonic
    operator) follow the "+" branch and are flagged in the metadata.
    """
    if hamiltonian is None and jumps is None:
        raise ValueError("need a Hamiltonian, jump operators, or both")
    if hamiltonian is not None:
        hamiltonian = np.asarray(hamiltonian, dtype=complex)
        if hamiltonian.ndim != 2 or hamiltonian.shape[0] != hamiltonian.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got {hamiltonian.shape}")
        d = hamiltonian.shape[0]
    else:
        d = jumps.operators[0].shape[0]

    pairs: tuple = ()
    kernel = None
    sign = 1
    meta = {"fermionic_operator": bool(fermionic_operator), "jump_class": None}
    if jumps is not None:
        for l in jumps.operators:
            if l.shape != (d, d):
                raise ValueError(
                    f"jump operator shape {l.shape} does not match dimension {d}"
                )
        pairs = tuple((l.conj().T, l) for l in jumps.operators)
        kernel = np.zeros((d, d), dtype=complex)
        for a, b in pairs:
            kernel += a @ b
        sign = -1 if (jumps.fermionic and fermionic_operator) else 1
        meta.update(
            jump_class=jumps.jump_class,
            fermionic_jumps=jumps.fermionic,
            mixed_parity=(jumps.fermionic != bool(fermionic_operator)),
            **jumps.params,
        )
    return LindbladSuper(hamiltonian, pairs, kernel, sign, d, meta)


def averaged_dissipator(
    ms: MajoranaSet, p: int, n_jumps: int, v: float, fermionic_operator: bool = True
) -> LindbladSuper:
    """Disorder-averaged p-body dissipator (dissipative part only).

    Every |V^a|^2 is replaced by its mean p! V^2 / N^p and cross terms drop,
    leaving the deterministic superoperator whose eigenoperators are the
    Majorana strings (eigenvalues from dissipator_eigenvalue).
    """
    if n_jumps < 1:
        raise ValueError(f"need at least one jump operator, got M={n_jumps}")
    if v < 0:
        raise ValueError(f"dissipation strength must be nonnegative, got V={v}")
    if not 1 <= p <= ms.n_fermions:
        raise ValueError(f"locality p={p} outside 1..{ms.n_fermions}")
    w = n_jumps * dissipator_variance(ms.n_fermions, p, v)
    pairs = []
    for idx in combinations(range(1, ms.n_fermions + 1), p):
        psi = ms.string_matrix(idx).toarray()
        pairs.append((w * psi.conj().T, psi))
    n_tuples = math.comb(ms.n_fermions, p)
    kernel = (w * n_tuples / 2**p) * np.eye(ms.dim, dtype=complex)
    sign = -1 if (p % 2 == 1 and fermionic_operator) else 1
    meta = {
        "jump_class": "p-body-averaged",
        "p": p,
        "M": n_jumps,
        "V": v,
        "fermionic_operator": bool(fermionic_operator),
        "fermionic_jumps": p % 2 == 1,
        "mixed_parity": (p % 2 == 1) != bool(fermionic_operator),
    }
    return LindbladSuper(None, tuple(pairs), kernel, sign, ms.dim, meta)


def odd_overlap_count(n: int, p: int, s: int) -> int:
    """Number of increasing p-tuples in 1..N sharing an odd number of indices
    with a fixed s-element set:

        C(N,p) - C(N-s,p) - sum_k C(N-s, p-2k) C(s, 2k),  k = 1..min(s//2,p//2)
    """
    total = math.comb(n, p) - math.comb(n - s, p)
    for k in range(1, min(s // 2, p // 2) + 1):
        total -= math.comb(n - s, p - 2 * k) * math.comb(s, 2 * k)
    return total


def dissipator_eigenvalue(n: int, p: int, s: int, n_jumps: int, v: float) -> complex:
    """Exact finite-N eigenvalue of the averaged dissipator on a length-s string,

        i (M/N) V^2 p! / (2^(p-1) N^(p-1)) * odd_overlap_count(N, p, s),

    which reduces to i R V^2 s (1 - s/N) at p = 2.
    """
    if not 1 <= s <= n:
        raise ValueError(f"string length s={s} outside 1..{n}")
    if not 1 <= p <= n:
        raise ValueError(f"locality p={p} outside 1..{n}")
    r = n_jumps / n
    scale = r * v**2 * math.factorial(p) / (2 ** (p - 1) * n ** (p - 1))
    return 1j * scale * odd_overlap_count(n, p, s)


def dissipator_eigenvalue_large_n(p: int, s: int, ratio: float, v: float) -> complex:
    """Large-N limit i p s R V^2 / 2^(p-1), with R = M/N held fixed."""
    return 1j * p * s * ratio * v**2 / 2 ** (p - 1)


def initial_string_state(ms: MajoranaSet, indices) -> np.ndarray:
    """Normalized doubled-space vector for the string 2^(s/2) psi_{i1}..psi_{is}.

    The prefactor makes the doubled-space norm exactly 1, matching the
    normalized initial operators (sqrt(2) psi_1 for s = 1).
    """
    string = ms.operator_string(indices)
    return (2 ** (string.length / 2)) * vectorize(string.matrix)
