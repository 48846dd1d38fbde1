"""Nonlinear entanglement witnesses for bipartite quantum states."""
from .kernels import BACKEND
from .linalg import (
    hermitian_eig,
    hermitian_split,
    hs_inner,
    hs_norm,
    matrix_sqrt_psd,
    max_schmidt_sq,
    partial_trace,
    partial_transpose,
    schmidt,
)
from .states import (
    DensityMatrix,
    PureVector,
    RngStream,
    bell_basis,
    boundary_state,
    is_ppt,
    npt_eigenpair,
    phi_alpha,
    sample_ball,
    sample_ginibre_state,
    separable_mixture,
    werner,
)
from .witness import (
    CorrectionTerm,
    LinearWitness,
    NonlinearWitness,
    check_P_positivity,
    detect_F1_iff,
    detect_F2_iff,
    eval_F1,
    eval_F2,
    eval_F3,
    eval_F_general,
    eval_linear,
    nonlinear_term,
    optimal_psi,
    witness_from_npt,
)

__version__ = "0.1.0"
