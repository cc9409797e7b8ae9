"""Operators and states on tensor products of two-state sites.

Basis convention (used by every module in the package): a basis state of an
``n``-site chain is an integer ``bits`` in ``[0, 2**n)``, where bit ``i - 1``
holds site ``i`` and ``0`` means spin up (``v+``), ``1`` spin down (``v-``).
Site 1 is therefore the fastest-varying index and ``kron(a, b)`` puts ``a`` on
the high-numbered sites, so tensor products read left to right as sites
``n, ..., 2, 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "SpinConfig", "LinOp", "StateVec", "CompositionError", "NotHermitianError",
    "kron", "embed_pair", "rank_nullspace", "eig_hermitian", "comm_norm",
    "max_abs", "integer_rank", "elementary",
]

DEFAULT_RANK_TOL = 1e-10

ArrayLike = Union[np.ndarray, sp.sparray]


class CompositionError(ValueError):
    """Raised when operator shapes (site counts) do not line up."""


class NotHermitianError(ValueError):
    def __init__(self, deviation: float):
        super().__init__(f"operator is not Hermitian: max|H - H^dag| = {deviation:.3e}")
        self.deviation = deviation


def max_abs(x) -> float:
    """Max-absolute-entry norm, for dense or sparse input."""
    if sp.issparse(x):
        return float(abs(x).max()) if x.nnz else 0.0
    x = np.asarray(x)
    return float(np.abs(x).max()) if x.size else 0.0


def _n_sites(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class SpinConfig:
    """A basis configuration of ``n_sites`` spins."""

    n_sites: int
    bits: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if not 0 <= self.bits < 1 << self.n_sites:
            raise ValueError(f"bits={self.bits} out of range for {self.n_sites} sites")

    @classmethod
    def from_string(cls, spins: str) -> "SpinConfig":
        """Parse e.g. ``"+-+"``; the leftmost character is site ``n``."""
        bits = 0
        for ch in spins:
            if ch not in "+-":
                raise ValueError(f"bad spin character {ch!r}")
            bits = (bits << 1) | (ch == "-")
        return cls(len(spins), bits)

    def is_down(self, site: int) -> bool:
        if not 1 <= site <= self.n_sites:
            raise IndexError(f"site {site} outside 1..{self.n_sites}")
        return bool(self.bits >> (site - 1) & 1)

    @property
    def n_down(self) -> int:
        return bin(self.bits).count("1")

    @property
    def sz_total(self) -> int:
        """Eigenvalue of the sum of sigma^z over all sites."""
        return self.n_sites - 2 * self.n_down

    def __str__(self) -> str:
        return "".join("-" if self.is_down(i) else "+" for i in range(self.n_sites, 0, -1))

    def state(self) -> "StateVec":
        amps = np.zeros(1 << self.n_sites, dtype=complex)
        amps[self.bits] = 1.0
        return StateVec(self.n_sites, amps)


@dataclass(frozen=True, eq=False)
class StateVec:
    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n_sites:
            raise ValueError(
                f"expected {1 << self.n_sites} amplitudes for {self.n_sites} sites, got {amps.shape[0]}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def all_up(cls, n_sites: int) -> "StateVec":
        return SpinConfig(n_sites, 0).state()

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVec":
        nrm = self.norm()
        if nrm == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVec(self.n_sites, self.amplitudes / nrm)

    def vdot(self, other: "StateVec") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def sector_weights(self) -> dict[int, float]:
        """Squared norm carried by each number of down spins."""
        idx = np.arange(1 << self.n_sites)
        downs = np.array([bin(i).count("1") for i in idx])
        p = np.abs(self.amplitudes) ** 2
        return {k: float(p[downs == k].sum()) for k in range(self.n_sites + 1)}

    def __add__(self, other: "StateVec") -> "StateVec":
        if other.n_sites != self.n_sites:
            raise CompositionError("adding states of different lengths")
        return StateVec(self.n_sites, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVec") -> "StateVec":
        if other.n_sites != self.n_sites:
            raise CompositionError("subtracting states of different lengths")
        return StateVec(self.n_sites, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVec":
        return StateVec(self.n_sites, self.amplitudes * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class LinOp:
    """A linear map ``V^{(x) n_in} -> V^{(x) n_out}``.

    ``mat`` is either a dense ndarray or a scipy sparse array; both behave the
    same through this interface. Dense storage is frozen (read-only).
    """

    n_in: int
    n_out: int
    mat: ArrayLike

    def __post_init__(self):
        mat = self.mat
        if sp.issparse(mat):
            mat = sp.csr_array(mat, dtype=complex)
        else:
            mat = np.array(mat, dtype=complex)
            mat.flags.writeable = False
        if mat.shape != (1 << self.n_out, 1 << self.n_in):
            raise ValueError(
                f"matrix shape {mat.shape} does not match n_out={self.n_out}, n_in={self.n_in}")
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_matrix(cls, mat: ArrayLike) -> "LinOp":
        rows, cols = mat.shape
        return cls(_n_sites(cols), _n_sites(rows), mat)

    @classmethod
    def identity(cls, n: int, sparse: bool = True) -> "LinOp":
        dim = 1 << n
        return cls(n, n, sp.identity(dim, dtype=complex, format="csr") if sparse else np.eye(dim))

    @classmethod
    def zeros(cls, n_out: int, n_in: int) -> "LinOp":
        return cls(n_in, n_out, sp.csr_array((1 << n_out, 1 << n_in), dtype=complex))

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.mat)

    @property
    def is_square(self) -> bool:
        return self.n_in == self.n_out

    def toarray(self) -> np.ndarray:
        return self.mat.toarray() if self.is_sparse else np.asarray(self.mat)

    def dense(self) -> "LinOp":
        return self if not self.is_sparse else LinOp(self.n_in, self.n_out, self.toarray())

    def sparse(self) -> "LinOp":
        return self if self.is_sparse else LinOp(self.n_in, self.n_out, sp.csr_array(self.mat))

    def dag(self) -> "LinOp":
        return LinOp(self.n_out, self.n_in, self.mat.conj().T)

    def norm(self) -> float:
        return max_abs(self.mat)

    def apply(self, v: StateVec) -> StateVec:
        if v.n_sites != self.n_in:
            raise CompositionError(f"operator expects {self.n_in} sites, state has {v.n_sites}")
        return StateVec(self.n_out, self.mat @ v.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, StateVec):
            return self.apply(other)
        if not isinstance(other, LinOp):
            return NotImplemented
        if self.n_in != other.n_out:
            raise CompositionError(
                f"cannot compose: left operator takes {self.n_in} sites, right produces {other.n_out}")
        return LinOp(other.n_in, self.n_out, self.mat @ other.mat)

    def _combine(self, other: "LinOp", sign: int) -> "LinOp":
        if not isinstance(other, LinOp):
            return NotImplemented
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            raise CompositionError("adding operators of different shapes")
        if self.is_sparse and other.is_sparse:
            mat = self.mat + sign * other.mat
        else:
            mat = self.toarray() + sign * other.toarray()
        return LinOp(self.n_in, self.n_out, mat)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, scalar):
        if isinstance(scalar, (LinOp, StateVec)):
            return NotImplemented
        return LinOp(self.n_in, self.n_out, self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def kron(*ops: LinOp) -> LinOp:
    """Tensor product; the first factor acts on the highest-numbered sites."""
    if not ops:
        raise ValueError("kron needs at least one operator")
    out = ops[0]
    for b in ops[1:]:
        if out.is_sparse and b.is_sparse:
            mat = sp.kron(out.mat, b.mat, format="csr")
        else:
            mat = np.kron(out.toarray(), b.toarray())
        out = LinOp(out.n_in + b.n_in, out.n_out + b.n_out, mat)
    return out


def embed_pair(op: LinOp, i: int, n: int) -> LinOp:
    """Act with a two-site operator on sites ``(i, i+1)`` of an ``n``-site chain.

    If ``op`` maps two sites to one, the merged site sits at position ``i`` and
    the result maps ``n`` sites to ``n - 1``.
    """
    if op.n_in != 2 or op.n_out not in (1, 2):
        raise ValueError(f"embed_pair needs a 2-site input operator, got {op.n_in}->{op.n_out}")
    if not 1 <= i <= n - 1:
        raise IndexError(f"pair index {i} outside 1..{n - 1}")
    factors = []
    if n - i - 1 > 0:
        factors.append(LinOp.identity(n - i - 1))
    factors.append(op)
    if i - 1 > 0:
        factors.append(LinOp.identity(i - 1))
    return kron(*factors)


def elementary(row: int, col: int, n_out: int = 1, n_in: int = 1) -> LinOp:
    """Single-entry 0/1 operator mapping basis state ``col`` to ``row``."""
    mat = sp.csr_array(([1.0], ([row], [col])), shape=(1 << n_out, 1 << n_in), dtype=complex)
    return LinOp(n_in, n_out, mat)


def _svd(m: LinOp):
    return np.linalg.svd(m.toarray(), full_matrices=True)


def rank_nullspace(m: LinOp, tol: float = DEFAULT_RANK_TOL) -> tuple[int, list[StateVec]]:
    """Numerical rank and an orthonormal basis of the kernel.

    Singular values above ``tol`` times the largest one count toward the rank.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, s, vh = _svd(m)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > tol * s[0]))
    null = [StateVec(m.n_in, row.conj()) for row in vh[rank:]]
    return rank, null


def null_space_matrix(mat: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Columns spanning the numerical kernel of a dense matrix."""
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].conj().T


def eig_hermitian(h: LinOp, herm_tol: float = 1e-12) -> tuple[np.ndarray, list[StateVec]]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian operator."""
    if not h.is_square:
        raise CompositionError("eig_hermitian needs a square operator")
    arr = h.toarray()
    dev = max_abs(arr - arr.conj().T)
    if dev > herm_tol * max(1.0, max_abs(arr)):
        raise NotHermitianError(dev)
    vals, vecs = np.linalg.eigh(arr)
    return vals, [StateVec(h.n_in, vecs[:, k]) for k in range(vecs.shape[1])]


def comm_norm(a: LinOp, b: LinOp) -> float:
    """``max|ab - ba|`` for two square operators on the same chain."""
    if not (a.is_square and b.is_square) or a.n_in != b.n_in:
        raise CompositionError("comm_norm needs square operators on the same number of sites")
    return (a @ b - b @ a).norm()


def integer_rank(mat: ArrayLike) -> int:
    """Exact rank of an integer matrix by fraction-free elimination.

    Rows are kept as sparse ``{column: int}`` maps and reduced against pivots
    by integer cross-multiplication, dividing out the row content after each
    step so entries stay small.
    """
    coo = sp.coo_array(mat)
    data = np.asarray(coo.data)
    if np.iscomplexobj(data):
        if np.any(data.imag != 0):
            raise ValueError("integer_rank needs a real integer matrix")
        data = data.real
    if np.any(data != np.round(data)):
        raise ValueError("integer_rank needs integer entries")
    rows: dict[int, dict[int, int]] = {}
    for r, c, v in zip(coo.row, coo.col, data):
        if v:
            rows.setdefault(int(r), {})[int(c)] = int(v)

    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in rows.values():
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                pivots[col] = row
                rank += 1
                break
            a, b = row[col], piv[col]
            new = {k: b * v for k, v in row.items()}
            for k, v in piv.items():
                new[k] = new.get(k, 0) - a * v
            row = {k: v for k, v in new.items() if v}
            g = 0
            for v in row.values():
                g = gcd(g, v)
            if g > 1:
                row = {k: v // g for k, v in row.items()}
    return rank

