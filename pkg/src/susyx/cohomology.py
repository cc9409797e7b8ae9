"""Kernel/image counting for the supercharges, the zero-energy singlet and the doublet decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, StateVec, eig_hermitian, integer_rank, null_space_matrix, rank_nullspace
from .reports import CheckReport
from .susy import build_H, build_Q, build_sz_total, supercharge

__all__ = [
    "DimReport", "dims", "iota_formula", "kappa_formula", "exact_rank_check",
    "vacuum_singlet", "SpectrumDecomposition", "spectrum_decomposition",
]


def _ceil_two_thirds(k: int) -> int:
    # ceil(2k/3) in integer arithmetic
    return -((-2 * k) // 3)


def iota_formula(n: int) -> int:
    """Predicted ``dim Im Q^(n)``."""
    return _ceil_two_thirds((1 << (n - 1)) - 1)


def kappa_formula(n: int) -> int:
    """Predicted ``dim Ker Q^(n) = dim Im Q^(n+1) + 1``."""
    return iota_formula(n + 1) + 1


@dataclass(frozen=True)
class DimReport:
    n: int
    kappa: int
    iota: int
    kappa_formula: int
    iota_formula: int

    def __post_init__(self):
        if self.kappa + self.iota != 1 << self.n:
            raise ValueError("kappa + iota must equal 2^n")

    @property
    def matches(self) -> bool:
        return self.kappa == self.kappa_formula and self.iota == self.iota_formula

    def report(self) -> CheckReport:
        res = abs(self.kappa - self.kappa_formula) + abs(self.iota - self.iota_formula)
        params = {"n": self.n, "kappa": self.kappa, "iota": self.iota,
                  "kappa_formula": self.kappa_formula, "iota_formula": self.iota_formula}
        return CheckReport.make("cohomology.dims", params, res, 0.0)


def dims(n: int, tol: float = DEFAULT_RANK_TOL) -> DimReport:
    """Numerical rank and nullity of ``Q^(n)`` (SVD) next to the counting formulas."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rank, _ = rank_nullspace(build_Q(n), tol)
    return DimReport(n, (1 << n) - rank, rank, kappa_formula(n), iota_formula(n))


def exact_rank_check(n: int) -> CheckReport:
    """Integer rank of ``Q^(n)`` by fraction-free elimination against the SVD rank and the formula."""
    exact = integer_rank(build_Q(n).toarray().real.round().astype(np.int64))
    svd_rank = dims(n).iota
    res = abs(exact - iota_formula(n)) + abs(svd_rank - exact)
    params = {"n": n, "exact_rank": exact, "svd_rank": svd_rank, "iota_formula": iota_formula(n)}
    return CheckReport.make("cohomology.exact_rank", params, res, 0.0)


SINGLET_TOL = 1e-10


def _sector_of(v: np.ndarray, n: int) -> tuple[float, float]:
    """Sz eigenvalue carrying the state and the weight outside that sector."""
    sz = build_sz_total(n).mat.diagonal().real
    weights = {}
    for val, amp in zip(sz, np.abs(v) ** 2):
        weights[val] = weights.get(val, 0.0) + amp
    best = max(weights, key=weights.get)
    return float(best), float(sum(w for k, w in weights.items() if k != best))


def vacuum_singlet(n: int, tol: float = SINGLET_TOL) -> tuple[StateVec, CheckReport]:
    """Common null vector of ``Q^(n)`` and ``Q^(n+1)^dag``, cross-checked against the kernel of ``H^(n)``.

    The residual folds the individual conditions together: the report passes
    only if the intersection is one-dimensional, ``|H w| < tol``, the state
    sits in one ``sum sigma^z`` sector, and the overlap with the zero-energy
    eigenvector of ``H`` exceeds ``1 - tol``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    stacked = np.vstack([supercharge(n).toarray(), build_Q(n + 1).dag().toarray()])
    null = null_space_matrix(stacked, DEFAULT_RANK_TOL)
    dim = null.shape[1]
    params: dict = {"n": n, "intersection_dim": dim}
    if dim != 1:
        vec = StateVec(n, null[:, 0]) if dim else StateVec.all_up(n)
        return vec, CheckReport.make("cohomology.vacuum_singlet", params, math.inf, tol)

    w = null[:, 0]
    # fix the global phase: largest component real positive
    k = int(np.argmax(np.abs(w)))
    w = w * (abs(w[k]) / w[k])
    w = w / np.linalg.norm(w)
    h = build_H(n)
    energy = complex(np.vdot(w, h.mat @ w)).real
    h_res = float(np.linalg.norm(h.mat @ w))
    sz, leak = _sector_of(w, n)

    evals, evecs = eig_hermitian(h.dense())
    zero = [i for i, e in enumerate(evals) if abs(e) < 1e-8]
    if len(zero) == 1:
        overlap = abs(evecs[zero[0]].vdot(StateVec(n, w)))
    else:
        overlap = 0.0
    params.update(energy=energy, sz=sz, sz_mod2_expected=n % 2, sector_leak=leak,
                  h_zero_modes=len(zero), overlap=overlap)
    residual = max(h_res, leak, 1.0 - overlap, abs(energy))
    return StateVec(n, w), CheckReport.make("cohomology.vacuum_singlet", params, residual, tol)


@dataclass(frozen=True)
class SpectrumDecomposition:
    n: int
    singlet_count: int
    paired_up: int
    paired_down: int
    pairing_tolerance: float
    pairing_residual: float = 0.0

    def __post_init__(self):
        if self.singlet_count + self.paired_up + self.paired_down != 1 << self.n:
            raise ValueError("counts must add up to 2^n")

    @property
    def expected(self) -> tuple[int, int, int]:
        return 1, _ceil_two_thirds((1 << self.n) - 1), _ceil_two_thirds((1 << (self.n - 1)) - 1)

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.singlet_count, self.paired_up, self.paired_down

    def report(self) -> CheckReport:
        miss = sum(abs(a - b) for a, b in zip(self.counts, self.expected))
        params = {"n": self.n, "counts": list(self.counts), "expected": list(self.expected),
                  "pairing_residual": self.pairing_residual}
        res = math.inf if miss else self.pairing_residual
        return CheckReport.make("cohomology.spectrum", params, res, self.pairing_tolerance)


def _blocks(evals: np.ndarray, gap: float = 1e-8) -> list[list[int]]:
    out: list[list[int]] = []
    for i, e in enumerate(evals):
        if out and abs(e - evals[out[-1][-1]]) < gap:
            out[-1].append(i)
        else:
            out.append([i])
    return out


def spectrum_decomposition(n: int, tol: float = 1e-9, spot_checks: int = 5) -> SpectrumDecomposition:
    """Split the spectrum of ``H^(n)`` into the singlet and doublets pairing with ``n - 1`` and ``n + 1``.

    Inside each degenerate block the eigenvectors are rotated by the SVD of
    ``Q^(n)`` restricted to the block, separating the part with nonzero image
    from the part in ``Ker Q^(n)``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    h = build_H(n).toarray()
    evals, vecs = np.linalg.eigh(h)
    Q = build_Q(n).toarray()
    Qup_dag = build_Q(n + 1).dag().toarray()
    singlets = up = down = 0
    pairs = []
    up_mismatch = 0
    for block in _blocks(evals):
        energy = float(np.mean(evals[block]))
        V = vecs[:, block]
        if abs(energy) < 1e-8:
            singlets += len(block)
            continue
        _, s, vh = np.linalg.svd(Q @ V)
        r = int(np.sum(s > DEFAULT_RANK_TOL * max(1.0, s[0] if s.size else 0.0)))
        down += r
        up += len(block) - r
        rotated = V @ vh.conj().T
        pairs.extend((energy, rotated[:, i]) for i in range(r))
        kernel_part = rotated[:, r:]
        if kernel_part.shape[1]:
            s_up = np.linalg.svd(Qup_dag @ kernel_part, compute_uv=False)
            up_mismatch += int(np.sum(s_up <= DEFAULT_RANK_TOL))
    worst = math.inf if up_mismatch else 0.0
    if pairs:
        idx = np.linspace(0, len(pairs) - 1, min(spot_checks, len(pairs))).round().astype(int)
        h_small = build_H(n - 1).toarray()
        for i in idx:
            energy, v = pairs[i]
            image = Q @ v
            worst = max(worst, float(np.linalg.norm(h_small @ image - energy * image) / np.linalg.norm(image)))
    return SpectrumDecomposition(n, singlets, up, down, tol, worst)
