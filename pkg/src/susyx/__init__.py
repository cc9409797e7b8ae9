"""Lattice supersymmetry and algebraic Bethe ansatz for the open XXZ chain at Delta = -1/2."""
from .linalg import LinOp, SpinConfig, StateVec, kron, embed_pair, rank_nullspace, eig_hermitian
from .reports import CheckReport
from .susy import build_Q, build_Q_dag, build_H, check_susy_suite
from .reflection import ETA, weights, monodromy_direct, monodromy_recursive, transfer
from .bethe import BetheRootSet, bethe_residual, solve_bethe, bethe_state, tau_eigenvalue
from .cohomology import dims, vacuum_singlet, spectrum_decomposition

__version__ = "0.1.0"

__all__ = [
    "LinOp", "SpinConfig", "StateVec", "kron", "embed_pair", "rank_nullspace", "eig_hermitian",
    "CheckReport", "build_Q", "build_Q_dag", "build_H", "check_susy_suite", "ETA", "weights",
    "monodromy_direct", "monodromy_recursive", "transfer", "BetheRootSet", "bethe_residual",
    "solve_bethe", "bethe_state", "tau_eigenvalue", "dims", "vacuum_singlet", "spectrum_decomposition",
]
