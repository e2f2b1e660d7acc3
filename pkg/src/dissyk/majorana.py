"""Majorana fermions as sparse matrices, operator strings, and the operator
inner product.

Conventions, fixed throughout the package:

* ``{psi_a, psi_b} = delta_ab``, i.e. ``psi_a^2 = 1/2``.  A textbook gamma
  matrix with ``{g_a, g_b} = 2 delta_ab`` is divided by sqrt(2).
* the infinite-temperature operator inner product is ``(A, B) = Tr(A^dag B)
  / Tr(I)``, so the normalized one-fermion operator is ``sqrt(2) psi_a`` and
  a length-s string ``psi_{i1}..psi_{is}`` has squared norm ``2^(-s)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

#: Largest supported N.  Generators are 2^(N/2)-dimensional sparse matrices
#: with one entry per row, so N = 32 (dim 65536) is still cheap; the cap only
#: guards against accidentally astronomical requests.
MAX_FERMIONS = 32

_PAULI_X = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
_PAULI_Y = sp.csr_matrix(np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex))
_PAULI_Z = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
_ID2 = sp.identity(2, dtype=complex, format="csr")


def _jordan_wigner_chain(n_fermions: int) -> list[sp.csr_matrix]:
    """Generators via the Jordan-Wigner chain on N/2 spins.

    With X_k, Y_k, Z_k acting on spin k = 0 .. N/2-1,

        psi_(2k+1) = 2^(-1/2) Z_0 .. Z_(k-1) X_k
        psi_(2k+2) = 2^(-1/2) Z_0 .. Z_(k-1) Y_k

    This fixed mapping makes every fixture reproducible bit for bit.
    """
    n_spins = n_fermions // 2
    gens = []
    for a in range(n_fermions):
        site, kind = divmod(a, 2)
        factors = [_PAULI_Z] * site
        factors.append(_PAULI_X if kind == 0 else _PAULI_Y)
        factors.extend([_ID2] * (n_spins - site - 1))
        m = factors[0]
        for f in factors[1:]:
            m = sp.kron(m, f, format="csr")
        gens.append((m / np.sqrt(2.0)).tocsr())
    return gens


@dataclass(frozen=True)
class OperatorString:
    """Ordered product psi_{i1} .. psi_{is} with strictly increasing indices."""

    indices: tuple[int, ...]
    matrix: sp.csr_matrix

    @property
    def length(self) -> int:
        return len(self.indices)


class MajoranaSet:
    """The N Clifford generators on the 2^(N/2)-dimensional space.

    Immutable after construction (the string cache only ever gains entries),
    so a single instance can be shared across concurrent tasks.
    """

    def __init__(self, n_fermions: int):
        if n_fermions % 2 != 0 or n_fermions < 2:
            raise ValueError(f"n_fermions must be a positive even integer, got {n_fermions}")
        if n_fermions > MAX_FERMIONS:
            raise ValueError(
                f"n_fermions = {n_fermions} exceeds the supported cap {MAX_FERMIONS}"
            )
        self.n_fermions = n_fermions
        self.generators = _jordan_wigner_chain(n_fermions)
        self._string_cache: dict[tuple[int, ...], sp.csr_matrix] = {}

    @property
    def dim(self) -> int:
        """Dimension 2^(N/2) of the Fock space the generators act on."""
        return 2 ** (self.n_fermions // 2)

    def generator(self, index: int) -> sp.csr_matrix:
        """psi_index with 1-based index, following the paper's labelling."""
        if not 1 <= index <= self.n_fermions:
            raise ValueError(f"generator index {index} outside 1..{self.n_fermions}")
        return self.generators[index - 1]

    def string_matrix(self, indices) -> sp.csr_matrix:
        """Cached ordered product psi_{i1} .. psi_{is} (1-based, increasing)."""
        idx = _validated_indices(indices, self.n_fermions)
        cached = self._string_cache.get(idx)
        if cached is not None:
            return cached
        m = self.generators[idx[0] - 1]
        for i in idx[1:]:
            m = (m @ self.generators[i - 1]).tocsr()
        self._string_cache[idx] = m
        return m

    def operator_string(self, indices) -> OperatorString:
        idx = _validated_indices(indices, self.n_fermions)
        return OperatorString(indices=idx, matrix=self.string_matrix(idx))

    def parity_operator(self) -> sp.csr_matrix:
        """Total fermion parity, the normalized product of all generators."""
        full = self.string_matrix(tuple(range(1, self.n_fermions + 1)))
        # the product of all N generators squares to +/- 2^(-N) I; rescale to
        # a unitary involution
        p = full * 2 ** (self.n_fermions / 2)
        if abs((p @ p)[0, 0] + 1) < 1e-9:
            p = 1j * p
        return p.tocsr()


def build_majorana_set(n_fermions: int) -> MajoranaSet:
    """Construct the N deterministic Majorana generators."""
    return MajoranaSet(n_fermions)


def operator_string(ms: MajoranaSet, indices) -> OperatorString:
    """Ordered product of generators for a strictly increasing index list."""
    return ms.operator_string(indices)


def _validated_indices(indices, n_fermions: int) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(idx) == 0:
        raise ValueError("operator string needs at least one index")
    if any(i < 1 or i > n_fermions for i in idx):
        raise ValueError(f"indices {idx} outside 1..{n_fermions}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices must be strictly increasing, got {idx}")
    return idx


def op_inner_product(a, b) -> complex:
    """Infinite-temperature inner product Tr(A^dag B) / Tr(I).

    Accepts sparse matrices, dense arrays, or OperatorString; A and B must
    share their (square) dimension.
    """
    am = a.matrix if isinstance(a, OperatorString) else a
    bm = b.matrix if isinstance(b, OperatorString) else b
    if am.shape != bm.shape or am.shape[0] != am.shape[1]:
        raise ValueError(f"incompatible operator shapes {am.shape} and {bm.shape}")
    dim = am.shape[0]
    if sp.issparse(am) and sp.issparse(bm):
        val = am.conj().multiply(bm).sum()
    else:
        ad = am.toarray() if sp.issparse(am) else np.asarray(am)
        bd = bm.toarray() if sp.issparse(bm) else np.asarray(bm)
        val = np.vdot(ad, bd)
    return complex(val) / dim


def op_norm(a) -> float:
    """Norm induced by op_inner_product."""
    return float(np.sqrt(op_inner_product(a, a).real))
