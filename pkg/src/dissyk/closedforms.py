"""Closed-form results used as independent benchmarks.

Everything here is an analytic function of its parameters: large-q
correlators and coefficient laws, the exactly solvable chain (wavefunctions,
Krylov complexity, dissipation scales), the model autocorrelation with its
pole structure and spectral function, OTOC closed forms, and the finite-N
combinatorial coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .superop import odd_overlap_count


@dataclass(frozen=True)
class LargeQParams:
    """Large-q SYK parameters: q, script_J, and lam_tilde = lambda * q."""

    q: int
    script_j: float
    lam_tilde: float

    @property
    def alpha(self) -> float:
        """alpha = sqrt((lam_tilde/2)^2 + script_J^2)."""
        return math.sqrt((self.lam_tilde / 2.0) ** 2 + self.script_j**2)

    @property
    def aleph(self) -> float:
        """aleph = arcsinh(lam_tilde / (2 script_J))."""
        return math.asinh(self.lam_tilde / (2.0 * self.script_j))


@dataclass(frozen=True)
class ChainParams:
    """Exactly solvable chain: b_n^2 = (1-u^2) gamma^2 n (n-1+eta) and
    a_n = i u gamma (2n + eta), with 0 <= u < 1."""

    u: float
    gamma: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.u < 1.0:
            raise ValueError(f"u must lie in [0, 1), got {self.u}")
        if self.gamma <= 0 or self.eta <= 0:
            raise ValueError("gamma and eta must be positive")


def autocorrelation_large_q(params: LargeQParams, t) -> np.ndarray:
    """Two-point function 1 + g(t)/q with
    g(t) = log[alpha^2 / (script_J^2 cosh^2(alpha t + aleph))]."""
    t = np.asarray(t, dtype=float)
    g = np.log(params.alpha**2 / (params.script_j**2 * np.cosh(params.alpha * t + params.aleph) ** 2))
    return 1.0 + g / params.q


def lanczos_large_q(params: LargeQParams, n: int) -> tuple[complex, float]:
    """Large-q coefficients a_n = i lam_tilde n and
    b_1 = script_J sqrt(2/q), b_{n>1} = script_J sqrt(n(n-1))."""
    if n < 1:
        raise ValueError(f"coefficient index starts at 1, got {n}")
    a = 1j * params.lam_tilde * n
    if n == 1:
        b = params.script_j * math.sqrt(2.0 / params.q)
    else:
        b = params.script_j * math.sqrt(n * (n - 1.0))
    return a, b


def chain_coefficients(cp: ChainParams, n_max: int):
    """(a, b, c) arrays of the exactly solvable chain.

    The reference formulas index the diagonal from 0 (their a_n multiplies
    the wavefunction phi_n), so the entry on chain level k = 0..n_max-1 is
    a = i u gamma (2k + eta), while the bond coefficients are 1-indexed,
    b_n = c_n = gamma sqrt((1-u^2) n (n-1+eta)) for n = 1..n_max-1.  The
    closed-form wavefunctions solve exactly this chain.
    """
    k = np.arange(0, n_max, dtype=float)
    a = 1j * cp.u * cp.gamma * (2.0 * k + cp.eta)
    m = np.arange(1, n_max, dtype=float)
    b = np.sqrt((1.0 - cp.u**2) * cp.gamma**2 * m * (m - 1.0 + cp.eta))
    return a, b, b.copy()


def _pochhammer_ratio(eta: float, n_max: int) -> np.ndarray:
    """sqrt((eta)_n / n!) for n = 0..n_max-1, via a stable running product."""
    out = np.empty(n_max)
    out[0] = 1.0
    for n in range(1, n_max):
        out[n] = out[n - 1] * math.sqrt((eta + n - 1.0) / n)
    return out


def wavefunction_closed_form(cp: ChainParams, n, t) -> np.ndarray:
    """Chain wavefunctions

        phi_n(t) = sech(gt)^eta / (1 + u tanh gt)^eta * (1-u^2)^(n/2)
                   * sqrt((eta)_n / n!) * [tanh gt / (1 + u tanh gt)]^n .

    n may be a scalar or array; returns the broadcast of n against t.
    """
    n = np.asarray(n)
    t = np.asarray(t, dtype=float)
    th = np.tanh(cp.gamma * t)
    damp = 1.0 + cp.u * th
    prefactor = (1.0 / np.cosh(cp.gamma * t)) ** cp.eta / damp**cp.eta
    ratio = _pochhammer_ratio(cp.eta, int(np.max(n)) + 1)[n]
    base = np.sqrt(1.0 - cp.u**2) * th / damp
    return prefactor * ratio * base**n


def wavefunctions_closed_form(cp: ChainParams, n_max: int, t_grid) -> np.ndarray:
    """phi_n(t) for n = 0..n_max-1 on a grid, shape (n_times, n_max)."""
    t = np.asarray(t_grid, dtype=float)
    th = np.tanh(cp.gamma * t)
    damp = 1.0 + cp.u * th
    prefactor = (1.0 / np.cosh(cp.gamma * t)) ** cp.eta / damp**cp.eta
    base = np.sqrt(1.0 - cp.u**2) * th / damp
    powers = base[:, None] ** np.arange(n_max)[None, :]
    return prefactor[:, None] * _pochhammer_ratio(cp.eta, n_max)[None, :] * powers


def k_complexity_closed_form(cp: ChainParams, t) -> np.ndarray:
    """K(t) = eta (1-u^2) tanh^2(gt) / [1 + 2u tanh(gt) - (1-2u^2) tanh^2(gt)]."""
    t = np.asarray(t, dtype=float)
    th = np.tanh(cp.gamma * t)
    return (cp.eta * (1.0 - cp.u**2) * th**2) / (
        1.0 + 2.0 * cp.u * th - (1.0 - 2.0 * cp.u**2) * th**2
    )


def dissipation_scales(cp: ChainParams) -> tuple[float, float]:
    """(t_d, K_sat) = ((1/gamma) ln(1/u), eta (1-u)/(2u)).

    At u = 0 there is no saturation; both are reported as inf.
    """
    if cp.u == 0.0:
        return math.inf, math.inf
    t_d = math.log(1.0 / cp.u) / cp.gamma
    k_sat = cp.eta * (1.0 - cp.u) / (2.0 * cp.u)
    return t_d, k_sat


def model_autocorrelation(alpha: float, mu: float, t) -> np.ndarray:
    """C(mu, t) = (sqrt(alpha^2+mu^2)/alpha) sech(t sqrt(alpha^2+mu^2)
    + arcsinh(mu/alpha)); C(0, t) = sech(alpha t)."""
    _check_alpha_mu(alpha, mu)
    t = np.asarray(t, dtype=float)
    nu = math.sqrt(alpha**2 + mu**2)
    shift = math.asinh(mu / alpha)
    return (nu / alpha) / np.cosh(nu * t + shift)


def pole_location(alpha: float, mu: float) -> tuple[complex, complex]:
    """Closest poles t_pm = +- i pi / (2 nu) - arcsinh(mu/alpha) / nu of the
    model autocorrelation, nu = sqrt(alpha^2 + mu^2)."""
    _check_alpha_mu(alpha, mu)
    nu = math.sqrt(alpha**2 + mu**2)
    shift = math.asinh(mu / alpha) / nu
    return complex(-shift, math.pi / (2 * nu)), complex(-shift, -math.pi / (2 * nu))


def pole_location_small_mu(alpha: float, mu: float) -> tuple[complex, complex]:
    """Weak-dissipation expansion t_pm = +- i pi/(2 alpha) - mu/alpha^2."""
    _check_alpha_mu(alpha, mu)
    shift = mu / alpha**2
    return complex(-shift, math.pi / (2 * alpha)), complex(-shift, -math.pi / (2 * alpha))


def spectral_function(alpha: float, mu: float, omega) -> np.ndarray:
    """Fourier transform (convention integral of e^{-i w t} C(mu, t) dt):

        Phi = (pi/alpha) sech(pi w / (2 nu)) exp(i w arcsinh(mu/alpha) / nu).
    """
    _check_alpha_mu(alpha, mu)
    omega = np.asarray(omega, dtype=float)
    nu = math.sqrt(alpha**2 + mu**2)
    shift = math.asinh(mu / alpha) / nu
    return (math.pi / alpha) / np.cosh(math.pi * omega / (2 * nu)) * np.exp(1j * omega * shift)


def spectral_function_weak_dissipation(alpha: float, mu: float, omega) -> np.ndarray:
    """First-order expansion (1 + i w mu / alpha^2) (pi/alpha) sech(pi w / 2 alpha)."""
    _check_alpha_mu(alpha, mu)
    omega = np.asarray(omega, dtype=float)
    return (1.0 + 1j * omega * mu / alpha**2) * (math.pi / alpha) / np.cosh(
        math.pi * omega / (2 * alpha)
    )


def otoc_closed_form(u: float, eta: float, q: int, n_fermions: int, t, gamma: float = 1.0):
    """OTOC of the exactly solvable chain for a one-fermion initial operator,

        [th^2 (eta (q-2)(1-u^2) + 2u^2 - 1) + 2u th + 1]
        / (N [1 + th ((2u^2 - 1) th + 2u)]),   th = tanh(gamma t),

    equal to ((q-2) K(t) + 1)/N with K the closed-form Krylov complexity.
    The reference form is printed at gamma = 1 (arguments tanh t); gamma is
    restored explicitly here and gamma = 1 recovers it.
    """
    if q % 2 != 0:
        raise ValueError(f"q must be even, got {q}")
    ChainParams(u=u, gamma=gamma, eta=eta)  # validates the parameter ranges
    t = np.asarray(t, dtype=float)
    th = np.tanh(gamma * t)
    num = th**2 * (eta * (q - 2) * (1.0 - u**2) + 2.0 * u**2 - 1.0) + 2.0 * u * th + 1.0
    den = n_fermions * (1.0 + th * ((2.0 * u**2 - 1.0) * th + 2.0 * u))
    return num / den


def otoc_scales(u: float, eta: float, q: int, n_fermions: int) -> tuple[float, float]:
    """(saturation, t_*) of the closed-form OTOC:

        saturation = (1/N)(1 + eta (q-2)(1-u)/(2u))
        t_* = arctanh( sqrt( q(1-u) / (q + (q-4) u) ) )

    u = 0 has no saturation; both are reported as inf.
    """
    if q % 2 != 0:
        raise ValueError(f"q must be even, got {q}")
    if u == 0.0:
        return math.inf, math.inf
    sat = (1.0 + eta * (q - 2) * (1.0 - u) / (2.0 * u)) / n_fermions
    t_star = math.atanh(math.sqrt(q * (1.0 - u) / (q + (q - 4.0) * u)))
    return sat, t_star


def otoc_saturation_time_asymptotic(u: float, q: int) -> float:
    """Small-u asymptote t_* ~ (1/2) ln( 2q / ((q-2) u) )."""
    if u <= 0:
        raise ValueError(f"asymptote needs u > 0, got {u}")
    return 0.5 * math.log(2.0 * q / ((q - 2.0) * u))


def b1_pbody(n_fermions: int, q: int, p: int, script_j: float) -> float:
    """Finite-N first Lanczos coefficient for a p-body initial operator,

        b_1^2 = 2 (q-1)! script_J^2 / (q N^(q-1)) * T(N, q, p),

    with T the number of q-tuples sharing an odd number of indices with the
    initial p-string (the same counting as the averaged dissipator, with the
    roles of the jump locality and the string exchanged).
    """
    if q % 2 != 0:
        raise ValueError(f"q must be even, got {q}")
    if not 1 <= p <= n_fermions or not 2 <= q <= n_fermions:
        raise ValueError(f"need 1 <= p <= N and 2 <= q <= N, got p={p}, q={q}, N={n_fermions}")
    t_odd = odd_overlap_count(n_fermions, q, p)
    b1_sq = 2.0 * math.factorial(q - 1) * script_j**2 * t_odd / (q * n_fermions ** (q - 1))
    return math.sqrt(b1_sq)


def b1_pbody_large_n(q: int, p: int, script_j: float) -> float:
    """Large-N limit b_1 = script_J sqrt(2p/q)."""
    if q % 2 != 0:
        raise ValueError(f"q must be even, got {q}")
    return script_j * math.sqrt(2.0 * p / q)


def _check_alpha_mu(alpha: float, mu: float) -> None:
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
