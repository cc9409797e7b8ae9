"""Length-changing supercharges and the open XXZ Hamiltonian at Delta = -1/2."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .linalg import LinOp, embed_pair, kron, max_abs
from .reports import CheckReport

__all__ = [
    "SusyPair", "build_q", "build_q_dag", "build_Q", "build_Q_dag", "susy_pair",
    "build_H", "build_sz_total", "supercharge", "check_susy_suite", "SUSY_TOL",
]

SUSY_TOL = 1e-12


def build_q() -> LinOp:
    """``q: V (x) V -> V``, sending ``v+ (x) v+`` to ``v-`` and everything else to 0."""
    mat = sp.csr_array(([1.0], ([1], [0])), shape=(2, 4), dtype=complex)
    return LinOp(2, 1, mat)


def build_q_dag() -> LinOp:
    return build_q().dag()


@lru_cache(maxsize=None)
def build_Q(n: int) -> LinOp:
    """Alternating sum of ``q`` over neighbouring pairs, ``V^{(x) n} -> V^{(x) n-1}``."""
    if n < 2:
        raise ValueError(f"Q^(n) needs n >= 2, got {n}")
    q = build_q()
    out = LinOp.zeros(n - 1, n)
    for i in range(1, n):
        out = out + (-1) ** (i + 1) * embed_pair(q, i, n)
    return out


def build_Q_dag(n: int) -> LinOp:
    return build_Q(n).dag()


def supercharge(n: int) -> LinOp:
    """``Q^(n)`` extended to ``n = 1`` as the zero map onto the one-dimensional empty chain."""
    if n == 1:
        return LinOp.zeros(0, 1)
    return build_Q(n)


@dataclass(frozen=True)
class SusyPair:
    n: int
    q_op: LinOp
    q_dag_op: LinOp


def susy_pair(n: int) -> SusyPair:
    Q = build_Q(n)
    return SusyPair(n, Q, Q.dag())


def _site_op(op: np.ndarray, i: int, n: int) -> sp.csr_array:
    left = sp.identity(1 << (n - i), format="csr")
    right = sp.identity(1 << (i - 1), format="csr")
    return sp.kron(sp.kron(left, sp.csr_array(op)), right, format="csr")


_SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # sigma^+ : v- -> v+
_SM = _SP.T
_SZ = np.diag([1.0, -1.0])


@lru_cache(maxsize=None)
def build_H(n: int) -> LinOp:
    """Open XXZ Hamiltonian with boundary fields and the constant shift ``(3n-1)/4``.

    All coefficients are multiples of 1/4, so the real float assembly is exact.
    The hopping term uses ``sx sx + sy sy = 2 (s+ s- + s- s+)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = 1 << n
    h = sp.csr_array((dim, dim), dtype=float)
    for i in range(1, n):
        hop = _site_op(_SP, i, n) @ _site_op(_SM, i + 1, n) + _site_op(_SM, i, n) @ _site_op(_SP, i + 1, n)
        zz = _site_op(_SZ, i, n) @ _site_op(_SZ, i + 1, n)
        h = h - hop + 0.25 * zz
    h = h - 0.25 * (_site_op(_SZ, 1, n) + _site_op(_SZ, n, n))
    h = h + (3 * n - 1) / 4 * sp.identity(dim, format="csr")
    return LinOp(n, n, h)


@lru_cache(maxsize=None)
def build_sz_total(n: int) -> LinOp:
    diag = np.array([n - 2 * bin(k).count("1") for k in range(1 << n)], dtype=float)
    return LinOp(n, n, sp.diags_array(diag, format="csr"))


def _report(name: str, n: int, residual: float, tol: float = SUSY_TOL, **extra) -> CheckReport:
    return CheckReport.make(name, {"n": n, **extra}, residual, tol)


def check_susy_suite(n: int, hamiltonian=build_H) -> list[CheckReport]:
    """Nilpotency, the ``Q^dag Q + Q Q^dag`` decomposition, intertwining and q-(co)associativity.

    ``hamiltonian`` can be swapped for a deliberately broken builder (negative controls).
    """
    if n < 2:
        raise ValueError("the SUSY suite needs n >= 2")
    Qn, Qn1 = supercharge(n), build_Q(n + 1)
    Qm = supercharge(n - 1)
    H, Hm = hamiltonian(n), hamiltonian(n - 1)
    reports = [
        _report("susy.nilpotency.Q", n, (Qm @ Qn).norm()),
        _report("susy.nilpotency.Qdag", n, (Qn1.dag() @ Qn.dag()).norm()),
        _report("susy.decomposition", n, (H - (Qn.dag() @ Qn + Qn1 @ Qn1.dag())).norm()),
        _report("susy.intertwining.Q", n, (Hm @ Qn - Qn @ H).norm()),
        _report("susy.intertwining.Qdag", n, (H @ Qn.dag() - Qn.dag() @ Hm).norm()),
    ]
    q, qd = build_q(), build_q_dag()
    i1 = LinOp.identity(1)
    reports.append(_report("susy.q_associativity", n, (q @ kron(q, i1) - q @ kron(i1, q)).norm()))
    reports.append(_report("susy.q_coassociativity", n, (kron(qd, i1) @ qd - kron(i1, qd) @ qd).norm()))
    split = kron(i1, build_Q(n)) + (-1) ** (n + 1) * embed_pair(q, n, n + 1)
    reports.append(_report("susy.Q_split", n, max_abs((Qn1 - split).mat)))
    return reports
