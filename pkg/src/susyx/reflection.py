"""Trigonometric R/K matrices, the double-row monodromy matrix and the transfer matrix.

The anisotropy is fixed at ``eta = 2 pi i / 3`` throughout. The monodromy
matrix acts on ``V_0 (x) V_n (x) ... (x) V_1`` with the auxiliary space ``V_0``
as the most significant index; its 2x2 auxiliary blocks are

    U = [[A, B],
         [C, D]]     (row = outgoing auxiliary spin, column = incoming).

Two constructions are provided: ``monodromy_direct`` contracts the R and K
factors one at a time on (auxiliary (x) chain) tensors, ``monodromy_recursive``
grows the blocks one site at a time from four-term / five-term recursions.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .linalg import LinOp, StateVec, kron, max_abs
from .reports import CheckReport
from .susy import build_H, build_Q

__all__ = [
    "ETA", "SINH_ETA", "Weights", "weights", "build_R", "build_K_minus", "build_K_plus",
    "MonodromyBlocks", "monodromy_direct", "monodromy_recursive", "monodromy",
    "transfer", "transfer_derivative", "transfer_derivative_check", "hamiltonian_shift",
    "delta_plus", "delta_minus", "pseudovacuum_deltas", "theorem1_residuals",
    "transfer_intertwining_residual", "sample_spectral", "E_UP", "E_DOWN",
    "richardson_derivative", "DERIV_PREFACTOR", "construction_check", "transfer_commutation_check",
    "transfer_hamiltonian_check", "transfer_at_zero_check", "transfer_intertwining_check",
]

ETA = 2j * cmath.pi / 3
SINH_ETA = cmath.sinh(ETA)

# one-site elementary matrices E^{e1}_{e2}: v_{e1} -> v_{e2}
_EPP = np.array([[1, 0], [0, 0]], dtype=complex)
_EMM = np.array([[0, 0], [0, 1]], dtype=complex)
_EPM = np.array([[0, 0], [1, 0]], dtype=complex)  # v+ -> v-
_EMP = np.array([[0, 1], [0, 0]], dtype=complex)  # v- -> v+
_I2 = np.eye(2, dtype=complex)

# E^+ and E^- : V -> C (one site to zero sites)
E_UP = LinOp(1, 0, np.array([[1, 0]]))
E_DOWN = LinOp(1, 0, np.array([[0, 1]]))


@dataclass(frozen=True)
class Weights:
    u: complex
    a: complex
    b: complex
    c: complex
    d: complex

    def identity_residuals(self) -> tuple[float, float]:
        """Moduli of ``a + b + d`` and ``a^2 + b^2 - c^2 + ab``; both vanish at this eta."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return abs(a + b + d), abs(a * a + b * b - c * c + a * b)


def weights(u: complex) -> Weights:
    u = complex(u)
    return Weights(
        u,
        cmath.sinh(u + ETA) / SINH_ETA,
        cmath.sinh(u) / SINH_ETA,
        1.0 + 0j,
        cmath.sinh(u - ETA) / SINH_ETA,
    )


def _R_matrix(u: complex) -> np.ndarray:
    w = weights(u)
    a, b, c = w.a, w.b, w.c
    return np.array([[a, 0, 0, 0], [0, b, c, 0], [0, c, b, 0], [0, 0, 0, a]], dtype=complex)


def _K_minus_matrix(u: complex) -> np.ndarray:
    w = weights(u)
    return np.diag([w.d, -w.a]).astype(complex)


def build_R(u: complex) -> LinOp:
    """R-matrix on two sites in the ordered basis (++, +-, -+, --)."""
    return LinOp(2, 2, _R_matrix(u))


def build_K_minus(u: complex) -> LinOp:
    return LinOp(1, 1, _K_minus_matrix(u))


def build_K_plus(u: complex) -> LinOp:
    return LinOp(1, 1, _K_minus_matrix(complex(u) + ETA))


@dataclass(frozen=True)
class MonodromyBlocks:
    n: int
    u: complex
    A: LinOp
    B: LinOp
    C: LinOp
    D: LinOp

    def blocks(self) -> tuple[LinOp, LinOp, LinOp, LinOp]:
        return self.A, self.B, self.C, self.D

    def full(self) -> np.ndarray:
        """The whole ``2^(n+1)`` square matrix, auxiliary space as the high bit."""
        return np.block([[self.A.toarray(), self.B.toarray()], [self.C.toarray(), self.D.toarray()]])


def _from_full(n: int, u: complex, full: np.ndarray) -> MonodromyBlocks:
    dim = 1 << n
    return MonodromyBlocks(
        n, u,
        LinOp(n, n, full[:dim, :dim]), LinOp(n, n, full[:dim, dim:]),
        LinOp(n, n, full[dim:, :dim]), LinOp(n, n, full[dim:, dim:]),
    )


def _apply_pair(op4: np.ndarray, ax1: int, ax2: int, t: np.ndarray) -> np.ndarray:
    """Apply a 4x4 operator whose first (high) factor acts on tensor axis ``ax1``."""
    op = op4.reshape(2, 2, 2, 2)
    out = np.tensordot(op, t, axes=([2, 3], [ax1, ax2]))
    return np.moveaxis(out, [0, 1], [ax1, ax2])


def _apply_single(op2: np.ndarray, ax: int, t: np.ndarray) -> np.ndarray:
    out = np.tensordot(op2, t, axes=([1], [ax]))
    return np.moveaxis(out, 0, ax)


def monodromy_direct(n: int, u: complex) -> MonodromyBlocks:
    """``U = Tbar K_0^- T`` with ``T = R_01 ... R_0n`` and ``Tbar = R_n0 ... R_10``.

    The factors are applied in sequence to the columns of the identity, viewed
    as a tensor with axis 0 = auxiliary space and axis ``n + 1 - j`` = site ``j``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = complex(u)
    dim = 1 << (n + 1)
    R = _R_matrix(u)
    t = np.eye(dim, dtype=complex).reshape((2,) * (n + 1) + (dim,))
    axis = {j: n + 1 - j for j in range(1, n + 1)}
    for j in range(n, 0, -1):            # T: R_0n acts first
        t = _apply_pair(R, 0, axis[j], t)
    t = _apply_single(_K_minus_matrix(u), 0, t)
    for j in range(1, n + 1):            # Tbar: R_10 acts first
        t = _apply_pair(R, axis[j], 0, t)
    return _from_full(n, u, t.reshape(dim, dim))


def _grow(prev: MonodromyBlocks) -> MonodromyBlocks:
    """One step of the site-adding recursion: the new site becomes site ``n + 1``."""
    w = weights(prev.u)
    a, b, c = w.a, w.b, w.c
    A, B, C, D = (x.toarray() for x in prev.blocks())
    k = np.kron
    A1 = a * a * k(_EPP, A) + b * b * k(_EMM, A) + a * c * k(_EMP, B) + a * c * k(_EPM, C) + c * c * k(_EMM, D)
    B1 = b * c * k(_EPM, A) + a * b * k(_I2, B) + b * c * k(_EPM, D)
    C1 = b * c * k(_EMP, A) + a * b * k(_I2, C) + b * c * k(_EMP, D)
    D1 = c * c * k(_EPP, A) + a * c * k(_EMP, B) + a * c * k(_EPM, C) + b * b * k(_EPP, D) + a * a * k(_EMM, D)
    m = prev.n + 1
    return MonodromyBlocks(m, prev.u, LinOp(m, m, A1), LinOp(m, m, B1), LinOp(m, m, C1), LinOp(m, m, D1))


def monodromy_recursive(n: int, u: complex) -> MonodromyBlocks:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _monodromy_cached(n, complex(u))


@lru_cache(maxsize=256)
def _monodromy_cached(n: int, u: complex) -> MonodromyBlocks:
    if n == 1:
        return monodromy_direct(1, u)
    return _grow(_monodromy_cached(n - 1, u))


monodromy = monodromy_recursive


def transfer(n: int, u: complex) -> LinOp:
    """``t(u) = sinh(u)/sinh(eta) A(u) - sinh(u + 2 eta)/sinh(eta) D(u)``."""
    u = complex(u)
    blk = monodromy(n, u)
    return (cmath.sinh(u) / SINH_ETA) * blk.A - (cmath.sinh(u + 2 * ETA) / SINH_ETA) * blk.D


def richardson_derivative(f, h: float = 1e-4):
    """Central differences at steps ``h`` and ``h/2`` combined to cancel the O(h^2) term."""
    d_h = (f(h) - f(-h)) / (2 * h)
    d_h2 = (f(h / 2) - f(-h / 2)) / h
    return (4 * d_h2 - d_h) / 3


def transfer_derivative(n: int, h: float = 1e-4) -> np.ndarray:
    return richardson_derivative(lambda x: transfer(n, x).toarray(), h)


def hamiltonian_shift(n: int) -> float:
    """Identity shift ``s`` in ``t'(0) = -4i/sqrt(3) (H + s I)``.

    Working the general-eta derivative through at eta = 2 pi i/3 gives
    ``s = -(n + 1)/2``; this is what the matrices satisfy.
    """
    return -(n + 1) / 2


DERIV_PREFACTOR = -4j / np.sqrt(3)
DERIV_TOL = 1e-6


def transfer_derivative_check(n: int, h: float = 1e-4, shift: float | None = None,
                              tol: float = DERIV_TOL) -> CheckReport:
    """Compare the numerical ``t'(0)`` against ``-4i/sqrt(3) (H + shift I)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    s = hamiltonian_shift(n) if shift is None else shift
    target = DERIV_PREFACTOR * (build_H(n).toarray() + s * np.eye(1 << n))
    res = max_abs(transfer_derivative(n, h) - target)
    return CheckReport.make("transfer.derivative_hamiltonian", {"n": n, "h": h, "shift": s}, res, tol)


def delta_plus(n: int, u: complex) -> complex:
    w = weights(u)
    return w.a ** (2 * n) * cmath.sinh(u - ETA) / SINH_ETA


def delta_minus(n: int, u: complex) -> complex:
    w = weights(u)
    return -w.b ** (2 * n) * cmath.sinh(2 * u) * cmath.sinh(u + 2 * ETA) / SINH_ETA


def _rel(x: complex, y: complex) -> float:
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


VACUUM_DPS = 40


def _mp_weights(ctx, u: complex):
    u = ctx.mpc(u.real, u.imag)
    eta = ctx.mpc(0, 2) * ctx.pi / 3
    s = ctx.sinh(eta)
    return u, eta, ctx.sinh(u + eta) / s, ctx.sinh(u) / s, ctx.sinh(u - eta) / s


def _vacuum_eigen(n: int, u: complex) -> tuple[complex, complex, float]:
    """Eigenvalues of A and of ``D sinh(2u+eta) - A sinh(eta)`` on the all-up state.

    The second combination is O(b^(2n)) while A and D are O(a^(2n)), so the
    extraction cancels badly in double precision for small |u|. The vectors
    ``U (e_aux (x) Omega)`` are therefore contracted from the R and K factors
    in 40-digit arithmetic, following the same ordering as ``monodromy_direct``.
    A private mpmath context keeps this safe under threads.
    """
    u = complex(u)
    ctx = mpmath.MPContext()
    ctx.dps = VACUUM_DPS
    mu, eta, a, b, d = _mp_weights(ctx, u)
    zero, one = ctx.mpc(0), ctx.mpc(1)
    R = np.array([[a, zero, zero, zero], [zero, b, one, zero],
                  [zero, one, b, zero], [zero, zero, zero, a]], dtype=object)
    K = np.array([[d, zero], [zero, -a]], dtype=object)
    axis = {j: n + 1 - j for j in range(1, n + 1)}
    cols = []
    for aux in (0, 1):
        t = np.full((2,) * (n + 1), zero, dtype=object)
        t[(aux,) + (0,) * n] = one
        for j in range(n, 0, -1):
            t = _apply_pair(R, 0, axis[j], t)
        t = _apply_single(K, 0, t)
        for j in range(1, n + 1):
            t = _apply_pair(R, axis[j], 0, t)
        cols.append(t.reshape(2, 1 << n))
    av = cols[0][0]                     # A Omega
    dv = cols[1][1]                     # D Omega
    comb = ctx.sinh(2 * mu + eta) * dv - ctx.sinh(eta) * av
    dp, dm = complex(av[0]), complex(comb[0])
    scale = max(abs(dp), abs(dm), 1e-300)
    leak = max(max(abs(complex(x)) for x in av[1:]), max(abs(complex(x)) for x in comb[1:])) / scale
    return dp, dm, float(leak)


DELTA_TOL = 1e-10


def pseudovacuum_deltas(n: int, u: complex, tol: float = DELTA_TOL) -> tuple[complex, complex, CheckReport]:
    """Extract the vacuum eigenvalues and compare with the closed forms and the one-site recursions."""
    u = complex(u)
    dp, dm, leak = _vacuum_eigen(n, u)
    res = [leak, _rel(dp, delta_plus(n, u)), _rel(dm, delta_minus(n, u))]
    w = weights(u)
    if n >= 2:
        dp0, dm0, _ = _vacuum_eigen(n - 1, u)
    else:
        dp0, dm0 = delta_plus(0, u), delta_minus(0, u)
    res += [_rel(dp, w.a ** 2 * dp0), _rel(dm, w.b ** 2 * dm0)]
    report = CheckReport.make("deltas.pseudovacuum", {"n": n, "u": u}, max(res), tol)
    return dp, dm, report


THEOREM1_TOL = 1e-10


def _relative(lhs_terms: list[np.ndarray], rhs_terms: list[np.ndarray]) -> float:
    total = sum(lhs_terms) - sum(rhs_terms) if rhs_terms else sum(lhs_terms)
    scale = max(max_abs(t) for t in lhs_terms + rhs_terms)
    return max_abs(total) / scale if scale > 0 else max_abs(total)


def theorem1_residuals(n: int, u: complex, tol: float = THEOREM1_TOL) -> list[CheckReport]:
    """Shifted commutators ``Q X^(n) - d^2 X^(n-1) Q`` for X = A, B, C, D against their closed forms."""
    if n < 2:
        raise ValueError("the commutation relations need n >= 2")
    u = complex(u)
    w = weights(u)
    a, b, c, d = w.a, w.b, w.c, w.d
    Q = build_Q(n).toarray()
    big, small = monodromy(n, u), monodromy(n - 1, u)
    sign = (-1) ** n

    def ek(e: LinOp, x: LinOp) -> np.ndarray:
        return kron(e, x).toarray()

    rhs = {
        "A": [sign * c * d * ek(E_UP, small.B)],
        "B": [],
        "C": [sign * a * c * ek(E_UP, small.A), sign * c * c * ek(E_DOWN, small.B),
              sign * c * d * ek(E_UP, small.D)],
        "D": [sign * b * c * ek(E_UP, small.B)],
    }
    out = []
    for name, big_x, small_x in zip("ABCD", big.blocks(), small.blocks()):
        lhs = [Q @ big_x.toarray(), -d * d * (small_x.toarray() @ Q)]
        res = _relative(lhs, rhs[name])
        out.append(CheckReport.make(f"theorem1.{name}", {"n": n, "u": u}, res, tol))
    return out


def transfer_intertwining_residual(n: int, u: complex) -> float:
    """Relative size of ``Q t^(n)(u) - d(u)^2 t^(n-1)(u) Q``."""
    d = weights(u).d
    Q = build_Q(n).toarray()
    lhs = [Q @ transfer(n, u).toarray(), -d * d * (transfer(n - 1, u).toarray() @ Q)]
    return _relative(lhs, [])


def sample_spectral(rng: np.random.Generator, count: int) -> list[complex]:
    """Spectral parameters in [0.2, 1.2] x [-0.4, 0.4]i away from degenerate points."""
    out = []
    while len(out) < count:
        u = complex(rng.uniform(0.2, 1.2), rng.uniform(-0.4, 0.4))
        if abs(cmath.sinh(2 * u + ETA)) < 1e-3 or abs(cmath.sinh(u)) < 1e-3:
            continue
        out.append(u)
    return out


CONSTRUCTION_TOL = 1e-10
COMMUTE_TOL = 1e-10


def construction_check(n: int, u: complex, tol: float = CONSTRUCTION_TOL) -> CheckReport:
    """Entrywise agreement of the direct and recursive monodromy constructions."""
    direct = monodromy_direct(n, u).full()
    recursive = monodromy_recursive(n, u).full()
    scale = max(max_abs(direct), max_abs(recursive))
    res = max_abs(direct - recursive) / scale if scale > 0 else 0.0
    return CheckReport.make("monodromy.direct_vs_recursive", {"n": n, "u": u}, res, tol)


def transfer_commutation_check(n: int, u: complex, v: complex, tol: float = COMMUTE_TOL) -> CheckReport:
    """``[t(u), t(v)]`` relative to ``|t(u)| |t(v)|`` (max-abs)."""
    tu, tv = transfer(n, u).toarray(), transfer(n, v).toarray()
    res = max_abs(tu @ tv - tv @ tu) / max(max_abs(tu @ tv), 1e-300)
    return CheckReport.make("transfer.commuting", {"n": n, "u": u, "v": v}, res, tol)


def transfer_hamiltonian_check(n: int, u: complex, tol: float = COMMUTE_TOL) -> CheckReport:
    tu, h = transfer(n, u).toarray(), build_H(n).toarray()
    res = max_abs(tu @ h - h @ tu) / max(max_abs(tu @ h), 1e-300)
    return CheckReport.make("transfer.commutes_with_H", {"n": n, "u": u}, res, tol)


def transfer_at_zero_check(n: int, tol: float = COMMUTE_TOL) -> CheckReport:
    res = max_abs(transfer(n, 0).toarray() + np.eye(1 << n))
    return CheckReport.make("transfer.at_zero", {"n": n}, res, tol)


def transfer_intertwining_check(n: int, u: complex, tol: float = THEOREM1_TOL) -> CheckReport:
    return CheckReport.make("transfer.intertwining", {"n": n, "u": u},
                            transfer_intertwining_residual(n, u), tol)
