"""Disorder sampling and model building: the SYK Hamiltonian and the two
classes of jump operators (linear sqrt(lambda) psi_i, and random p-body).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .majorana import MajoranaSet
from .seeding import DISSIPATOR_STREAM, HAMILTONIAN_STREAM, substream


def syk_variance(n_fermions: int, q: int, j: float) -> float:
    """Coupling variance (q-1)! J^2 / N^(q-1)."""
    return math.factorial(q - 1) * j**2 / n_fermions ** (q - 1)


def dissipator_variance(n_fermions: int, p: int, v: float) -> float:
    """Mean squared coupling <|V|^2> = p! V^2 / N^p."""
    return math.factorial(p) * v**2 / n_fermions**p


def large_q_coupling(q: int, j: float) -> float:
    """Rescaled coupling with script_J^2 = 2^(1-q) q J^2."""
    return math.sqrt(2 ** (1 - q) * q) * j


@dataclass(frozen=True)
class SykCouplings:
    """Gaussian q-body coupling table, one entry per increasing q-tuple."""

    n_fermions: int
    q: int
    j: float
    seed: int
    values: dict[tuple[int, ...], float]

    @property
    def variance(self) -> float:
        return syk_variance(self.n_fermions, self.q, self.j)


@dataclass(frozen=True)
class DissipatorCouplings:
    """Complex Gaussian p-body couplings for M jump operators.

    values[a] maps each increasing p-tuple to V^a; real and imaginary parts
    are independent with variance p! V^2 / (2 N^p) each, so <|V|^2> matches
    the target and phases are uniform.
    """

    n_fermions: int
    p: int
    n_jumps: int
    v: float
    seed: int
    values: tuple[dict[tuple[int, ...], complex], ...]

    @property
    def variance(self) -> float:
        return dissipator_variance(self.n_fermions, self.p, self.v)


@dataclass(frozen=True)
class JumpOperatorSet:
    """Jump operators as dense matrices plus their statistics metadata."""

    jump_class: str  # "linear" or "p-body-random"
    operators: tuple[np.ndarray, ...]
    fermionic: bool
    params: dict


def sample_syk_couplings(n_fermions: int, q: int, j: float, seed: int) -> SykCouplings:
    """Draw the i.i.d. Gaussian couplings of the q-body SYK Hamiltonian.

    Deterministic for a fixed seed: tuples are enumerated lexicographically
    and filled from the HAMILTONIAN_STREAM substream in one vectorized draw.
    """
    _check_locality(q, n_fermions, even_only=True)
    tuples = list(combinations(range(1, n_fermions + 1), q))
    rng = substream(seed, HAMILTONIAN_STREAM)
    sigma = math.sqrt(syk_variance(n_fermions, q, j))
    draws = rng.normal(0.0, 1.0, size=len(tuples)) * sigma
    return SykCouplings(n_fermions, q, j, seed, dict(zip(tuples, draws.tolist())))


def sample_dissipator_couplings(
    n_fermions: int, p: int, n_jumps: int, v: float, seed: int
) -> DissipatorCouplings:
    """Draw the complex Gaussian couplings of M random p-body jump operators."""
    _check_locality(p, n_fermions)
    if n_jumps < 1:
        raise ValueError(f"need at least one jump operator, got M={n_jumps}")
    if v < 0:
        raise ValueError(f"dissipation strength must be nonnegative, got V={v}")
    tuples = list(combinations(range(1, n_fermions + 1), p))
    rng = substream(seed, DISSIPATOR_STREAM)
    sigma = math.sqrt(dissipator_variance(n_fermions, p, v) / 2.0)
    draws = rng.normal(0.0, 1.0, size=(n_jumps, len(tuples), 2)) * sigma
    tables = tuple(
        {t: complex(re, im) for t, (re, im) in zip(tuples, block)}
        for block in draws.tolist()
    )
    return DissipatorCouplings(n_fermions, p, n_jumps, v, seed, tables)


def build_hamiltonian(ms: MajoranaSet, couplings: SykCouplings) -> np.ndarray:
    """H = i^(q/2) sum J_{i1..iq} psi_{i1} .. psi_{iq}, dense and Hermitian."""
    if couplings.n_fermions != ms.n_fermions:
        raise ValueError(
            f"couplings are for N={couplings.n_fermions}, set has N={ms.n_fermions}"
        )
    phase = 1j ** (couplings.q // 2)
    h = np.zeros((ms.dim, ms.dim), dtype=complex)
    for idx, val in couplings.values.items():
        if val != 0.0:
            h += (phase * val) * ms.string_matrix(idx).toarray()
    return h


def build_jump_operators(ms: MajoranaSet, spec) -> JumpOperatorSet:
    """Materialize a dissipation spec (LinearDissipation or PBodyDissipation)."""
    return spec.build(ms)


@dataclass(frozen=True)
class LinearDissipation:
    """Class 1: L_i = sqrt(lambda) psi_i for every fermion."""

    lam: float

    def build(self, ms: MajoranaSet) -> JumpOperatorSet:
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        root = math.sqrt(self.lam)
        ops = tuple(root * g.toarray() for g in ms.generators)
        return JumpOperatorSet(
            jump_class="linear",
            operators=ops,
            fermionic=True,
            params={"lambda": self.lam, "M": ms.n_fermions},
        )


@dataclass(frozen=True)
class PBodyDissipation:
    """Class 2: M random p-body jump operators with Gaussian couplings."""

    p: int
    n_jumps: int
    v: float
    seed: int

    def build(self, ms: MajoranaSet) -> JumpOperatorSet:
        couplings = sample_dissipator_couplings(
            ms.n_fermions, self.p, self.n_jumps, self.v, self.seed
        )
        return jump_operators_from_couplings(ms, couplings)


def jump_operators_from_couplings(
    ms: MajoranaSet, couplings: DissipatorCouplings
) -> JumpOperatorSet:
    ops = []
    for table in couplings.values:
        l = np.zeros((ms.dim, ms.dim), dtype=complex)
        for idx, val in table.items():
            if val != 0.0:
                l += val * ms.string_matrix(idx).toarray()
        ops.append(l)
    return JumpOperatorSet(
        jump_class="p-body-random",
        operators=tuple(ops),
        fermionic=(couplings.p % 2 == 1),
        params={
            "p": couplings.p,
            "M": couplings.n_jumps,
            "V": couplings.v,
            "seed": couplings.seed,
        },
    )


# --- coupling-table text format ------------------------------------------
#
# One line per coupling: the tuple indices, then the value (one float for
# real tables, two floats re im for complex ones), whitespace separated.
# Lines starting with '#' carry the header metadata.


def save_coupling_table(path, couplings: SykCouplings | DissipatorCouplings) -> None:
    with open(path, "w") as fh:
        if isinstance(couplings, SykCouplings):
            fh.write(
                f"# syk N={couplings.n_fermions} q={couplings.q} "
                f"J={couplings.j!r} seed={couplings.seed}\n"
            )
            for idx, val in couplings.values.items():
                fh.write(" ".join(map(str, idx)) + f" {val!r}\n")
        else:
            fh.write(
                f"# dissipator N={couplings.n_fermions} p={couplings.p} "
                f"M={couplings.n_jumps} V={couplings.v!r} seed={couplings.seed}\n"
            )
            for a, table in enumerate(couplings.values):
                for idx, val in table.items():
                    fh.write(
                        f"{a} " + " ".join(map(str, idx)) + f" {val.real!r} {val.imag!r}\n"
                    )


def load_coupling_table(path) -> SykCouplings | DissipatorCouplings:
    with open(path) as fh:
        header = fh.readline().strip()
        fields = dict(kv.split("=") for kv in header.split()[2:])
        if header.startswith("# syk"):
            values = {}
            for line in fh:
                parts = line.split()
                values[tuple(map(int, parts[:-1]))] = float(parts[-1])
            return SykCouplings(
                n_fermions=int(fields["N"]),
                q=int(fields["q"]),
                j=float(fields["J"]),
                seed=int(fields["seed"]),
                values=values,
            )
        if header.startswith("# dissipator"):
            n_jumps = int(fields["M"])
            tables: list[dict] = [dict() for _ in range(n_jumps)]
            for line in fh:
                parts = line.split()
                a = int(parts[0])
                idx = tuple(map(int, parts[1:-2]))
                tables[a][idx] = complex(float(parts[-2]), float(parts[-1]))
            return DissipatorCouplings(
                n_fermions=int(fields["N"]),
                p=int(fields["p"]),
                n_jumps=n_jumps,
                v=float(fields["V"]),
                seed=int(fields["seed"]),
                values=tuple(tables),
            )
    raise ValueError(f"unrecognized coupling table header: {header!r}")


def _check_locality(k: int, n_fermions: int, even_only: bool = False) -> None:
    if k < 1 or k > n_fermions:
        raise ValueError(f"locality {k} outside 1..{n_fermions}")
    if even_only and k % 2 != 0:
        raise ValueError(f"q must be even (OTOC derivation assumes it), got {k}")
