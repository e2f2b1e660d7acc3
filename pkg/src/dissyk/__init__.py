"""Operator growth in dissipative SYK models.

Builds Majorana algebras and Lindbladian superoperators, tridiagonalizes
them with the bi-Lanczos algorithm, evolves Krylov-chain wavefunctions, and
checks everything against closed-form benchmarks (coefficient laws, Krylov
complexity, OTOC, spectral functions).
"""

from .bilanczos import (
    BiLanczosDiagnostics,
    BiLanczosResult,
    TridiagonalData,
    bilanczos_tridiagonalize,
    eigenvalue_bound_check,
    moments_from_tridiagonal,
)
from .chain import (
    KrylovTrajectory,
    NumericalFailure,
    TruncationLeak,
    evolve_wavefunctions,
    krylov_complexity,
    otoc_from_wavefunctions,
    q_complexity,
    string_size,
)
from .closedforms import (
    ChainParams,
    LargeQParams,
    autocorrelation_large_q,
    b1_pbody,
    b1_pbody_large_n,
    chain_coefficients,
    dissipation_scales,
    k_complexity_closed_form,
    lanczos_large_q,
    model_autocorrelation,
    otoc_closed_form,
    otoc_saturation_time_asymptotic,
    otoc_scales,
    pole_location,
    pole_location_small_mu,
    spectral_function,
    spectral_function_weak_dissipation,
    wavefunction_closed_form,
    wavefunctions_closed_form,
)
from .majorana import (
    MajoranaSet,
    OperatorString,
    build_majorana_set,
    op_inner_product,
    op_norm,
    operator_string,
)
from .model import (
    DissipatorCouplings,
    JumpOperatorSet,
    LinearDissipation,
    PBodyDissipation,
    SykCouplings,
    build_hamiltonian,
    build_jump_operators,
    large_q_coupling,
    load_coupling_table,
    sample_dissipator_couplings,
    sample_syk_couplings,
    save_coupling_table,
    syk_variance,
)
from .superop import (
    LindbladSuper,
    averaged_dissipator,
    build_lindbladian,
    devectorize,
    dissipator_eigenvalue,
    dissipator_eigenvalue_large_n,
    doubled_inner,
    doubled_norm,
    initial_string_state,
    odd_overlap_count,
    vectorize,
)

__version__ = "0.1.0"
