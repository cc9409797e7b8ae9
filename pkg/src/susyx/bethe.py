"""Bethe equations, their numerical solution, Bethe states and the SUSY pairing of root sets.

Rapidities are only meaningful modulo ``i pi``: the creation operator ``B(lam)``,
the Bethe equations and the transfer eigenvalue are all invariant under
``lam -> lam + i pi``. Canonical root sets therefore fold the imaginary part
into ``(-pi/2, pi/2]``.

The Bethe equations are handled in cleared-denominator form. With
``P1_j = prod_{k != j} sinh(l_j - l_k - eta) sinh(l_j + l_k)`` and
``P2_j = prod_{k != j} sinh(l_j - l_k + eta) sinh(l_j + l_k + 2 eta)`` the
``j``-th equation reads ``a(l_j)^(2n) P1_j = b(l_j)^(2n) P2_j``; the vacuum
eigenvalues share the common factor ``sinh(2l) sinh(l - eta)/sinh(eta)``, which
is divided out (it vanishes at ``l = eta`` where the equation itself is finite).
"""
from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .linalg import StateVec, max_abs
from .reflection import (
    ETA, SINH_ETA, DERIV_PREFACTOR, delta_minus, delta_plus, hamiltonian_shift,
    monodromy, richardson_derivative, sample_spectral, transfer, weights,
)
from .reports import CheckReport
from .susy import build_H, build_Q, supercharge

__all__ = [
    "BetheRootSet", "SingularRootsError", "NotOnShellError", "PoleError", "RootFileError",
    "SolverConfig", "SolveResult", "canonical_root", "bethe_terms", "bethe_residual",
    "bethe_residual_raw", "cleared_terms", "bethe_jacobian", "m1_roots_closed_form",
    "solve_bethe", "state_is_zero", "bethe_state", "bethe_state_raw", "tau_eigenvalue", "energy_from_tau",
    "onshell_check", "q_omega_identity", "susy_pairing_check", "keyrelation_residual",
    "read_root_sets", "write_root_sets", "random_root_set", "mirror_root",
]

SING_TOL = 1e-8
DEDUP_TOL = 1e-8
ONSHELL_PRE_TOL = 1e-9
HALF_PERIOD = math.pi


class SingularRootsError(ValueError):
    """A root set hits a zero of one of the Bethe-equation denominators."""


class NotOnShellError(ValueError):
    pass


class PoleError(ValueError):
    pass


class RootFileError(ValueError):
    pass


def canonical_root(lam: complex) -> complex:
    """Fold the imaginary part into ``(-pi/2, pi/2]``."""
    lam = complex(lam)
    im = lam.imag - HALF_PERIOD * math.floor(lam.imag / HALF_PERIOD + 0.5)
    if im <= -HALF_PERIOD / 2 + 1e-12:
        im += HALF_PERIOD
    return complex(lam.real, im)


def _mod_pi_distance(x: complex, y: complex) -> float:
    return abs(canonical_root(x - y + 1j * HALF_PERIOD / 2) - 1j * HALF_PERIOD / 2)


def _sort_key(lam: complex) -> tuple[float, float]:
    return (round(lam.real, 9), round(lam.imag, 9))


def _is_eta(lam: complex) -> bool:
    return _mod_pi_distance(lam, ETA) < SING_TOL


def mirror_root(lam: complex) -> complex:
    """Image under ``lam -> -lam - eta`` (a symmetry of the Bethe equations)."""
    return canonical_root(-complex(lam) - ETA)


def _singularities(n: int, roots: Sequence[complex], allow_eta: bool) -> list[str]:
    problems = []
    for j, lj in enumerate(roots):
        if not allow_eta and _is_eta(lj):
            problems.append(f"root {j} equals eta")
        if abs(cmath.sinh(2 * lj)) < SING_TOL:
            problems.append(f"sinh(2*lambda_{j}) = 0")
    for j, k in itertools.permutations(range(len(roots)), 2):
        lj, lk = roots[j], roots[k]
        if k > j and _mod_pi_distance(lj, lk) < SING_TOL:
            problems.append(f"roots {j} and {k} coincide")
        if abs(cmath.sinh(lj - lk - ETA)) < SING_TOL:
            problems.append(f"sinh(lambda_{j} - lambda_{k} - eta) = 0")
        if abs(cmath.sinh(lj - lk + ETA)) < SING_TOL:
            problems.append(f"sinh(lambda_{j} - lambda_{k} + eta) = 0")
        if k > j and abs(cmath.sinh(lj + lk)) < SING_TOL:
            problems.append(f"sinh(lambda_{j} + lambda_{k}) = 0")
    return problems


@dataclass(frozen=True)
class BetheRootSet:
    """Canonically ordered rapidities for an ``n``-site chain.

    ``contains_eta`` must be set for sets that deliberately include ``eta``
    (the partner sets produced by the supercharge).
    """

    n: int
    roots: tuple[complex, ...]
    contains_eta: bool = False

    def __post_init__(self):
        roots = tuple(sorted((canonical_root(r) for r in self.roots), key=_sort_key))
        object.__setattr__(self, "roots", roots)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(roots) > self.n:
            raise ValueError(f"m = {len(roots)} exceeds n = {self.n}")
        problems = _singularities(self.n, roots, self.contains_eta)
        if problems:
            raise SingularRootsError("; ".join(problems))

    @classmethod
    def of(cls, n: int, roots: Iterable[complex]) -> "BetheRootSet":
        roots = tuple(complex(r) for r in roots)
        return cls(n, roots, contains_eta=any(_is_eta(r) for r in roots))

    @property
    def m(self) -> int:
        return len(self.roots)

    @property
    def self_conjugate(self) -> tuple[int, ...]:
        """Indices of roots fixed by ``lam -> -lam - eta`` (``sinh(2 lam + eta) = 0``)."""
        return tuple(j for j, r in enumerate(self.roots) if abs(cmath.sinh(2 * r + ETA)) < SING_TOL)

    @property
    def mirror_pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs of roots related by ``lam_k = -lam_j - eta``."""
        return tuple((j, k) for j, k in itertools.combinations(range(self.m), 2)
                     if abs(cmath.sinh(self.roots[j] + self.roots[k] + ETA)) < SING_TOL)

    @property
    def regular(self) -> bool:
        """True unless a root is self-mirror or two roots are mirror images.

        At those points the exchange relations used to derive the Bethe
        equations degenerate, and solutions of the equations need not give
        transfer-matrix eigenvectors.
        """
        return not self.self_conjugate and not self.mirror_pairs

    def mirror_key(self) -> tuple[complex, ...]:
        """Representative of the set modulo mirroring individual roots."""
        reps = []
        for r in self.roots:
            r2 = mirror_root(r)
            reps.append(min(r, r2, key=_sort_key))
        return tuple(sorted(reps, key=_sort_key))

    def with_eta(self) -> tuple[complex, ...]:
        return self.roots + (ETA,)

    def to_dict(self) -> dict:
        out = {"n": self.n, "m": self.m, "roots": [[r.real, r.imag] for r in self.roots]}
        if self.contains_eta:
            out["contains_eta"] = True
        return out


# ----------------------------------------------------------------------------
# Bethe equations


def _products(roots: Sequence[complex], j: int) -> tuple[complex, complex]:
    lj = roots[j]
    p1 = p2 = 1.0 + 0j
    for k, lk in enumerate(roots):
        if k == j:
            continue
        p1 *= cmath.sinh(lj - lk - ETA) * cmath.sinh(lj + lk)
        p2 *= cmath.sinh(lj - lk + ETA) * cmath.sinh(lj + lk + 2 * ETA)
    return p1, p2


def bethe_terms(n: int, roots: Sequence[complex]) -> np.ndarray:
    """``(m, 2)`` array of the two sides ``a^(2n) P1`` and ``b^(2n) P2`` per equation."""
    out = np.empty((len(roots), 2), dtype=complex)
    for j, lj in enumerate(roots):
        w = weights(lj)
        p1, p2 = _products(roots, j)
        out[j] = (w.a ** (2 * n) * p1, w.b ** (2 * n) * p2)
    return out


def cleared_terms(n: int, roots: Sequence[complex]) -> np.ndarray:
    """The two terms ``-sinh(2l) Delta_+ P1`` and ``Delta_- P2`` with the full vacuum eigenvalues."""
    out = np.empty((len(roots), 2), dtype=complex)
    for j, lj in enumerate(roots):
        p1, p2 = _products(roots, j)
        out[j] = (-cmath.sinh(2 * lj) * delta_plus(n, lj) * p1, delta_minus(n, lj) * p2)
    return out


def bethe_residual_raw(n: int, roots: Sequence[complex]) -> np.ndarray:
    terms = bethe_terms(n, [complex(r) for r in roots])
    if terms.size == 0:
        return np.zeros(0)
    scale = np.maximum(np.abs(terms[:, 0]), np.abs(terms[:, 1]))
    diff = np.abs(terms[:, 0] - terms[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        res = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), 0.0)
    return res


def bethe_residual(rs: BetheRootSet) -> np.ndarray:
    """Normalized residual of each Bethe equation (0 for an exact solution)."""
    return bethe_residual_raw(rs.n, rs.roots)


def _factor_lists(n: int, roots: Sequence[complex], j: int):
    """Factors of the two sides of equation ``j`` as (value, {index: derivative})."""
    lj = roots[j]
    side1 = [(cmath.sinh(lj + ETA) ** (2 * n) / SINH_ETA ** (2 * n),
              {j: 2 * n * cmath.sinh(lj + ETA) ** (2 * n - 1) * cmath.cosh(lj + ETA) / SINH_ETA ** (2 * n)})]
    side2 = [(cmath.sinh(lj) ** (2 * n) / SINH_ETA ** (2 * n),
              {j: 2 * n * cmath.sinh(lj) ** (2 * n - 1) * cmath.cosh(lj) / SINH_ETA ** (2 * n)})]
    for k, lk in enumerate(roots):
        if k == j:
            continue
        for side, shift_diff, shift_sum in ((side1, -ETA, 0), (side2, ETA, 2 * ETA)):
            x = lj - lk + shift_diff
            side.append((cmath.sinh(x), {j: cmath.cosh(x), k: -cmath.cosh(x)}))
            y = lj + lk + shift_sum
            side.append((cmath.sinh(y), {j: cmath.cosh(y), k: cmath.cosh(y)}))
    return side1, side2


def _product_and_gradient(factors, m: int) -> tuple[complex, np.ndarray]:
    vals = [f[0] for f in factors]
    prefix = [1.0 + 0j]
    for v in vals:
        prefix.append(prefix[-1] * v)
    suffix = [1.0 + 0j]
    for v in reversed(vals):
        suffix.append(suffix[-1] * v)
    suffix.reverse()
    grad = np.zeros(m, dtype=complex)
    for i, (_, derivs) in enumerate(factors):
        others = prefix[i] * suffix[i + 1]
        for idx, dv in derivs.items():
            grad[idx] += dv * others
    return prefix[-1], grad


def bethe_jacobian(n: int, roots: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
    """Cleared residual vector ``F_j = a^(2n) P1 - b^(2n) P2`` and its complex Jacobian."""
    m = len(roots)
    F = np.empty(m, dtype=complex)
    J = np.empty((m, m), dtype=complex)
    for j in range(m):
        s1, s2 = _factor_lists(n, roots, j)
        v1, g1 = _product_and_gradient(s1, m)
        v2, g2 = _product_and_gradient(s2, m)
        F[j] = v1 - v2
        J[j] = g1 - g2
    return F, J


def m1_roots_closed_form(n: int) -> list[BetheRootSet]:
    """All one-root solutions: ``tanh(lam) = sinh(eta) / (w - cosh(eta))`` for ``w^(2n) = 1``.

    ``w = -1`` gives ``lam = eta`` and is dropped, as are the ``w`` for which
    ``tanh(lam) = +-1`` (no finite root).
    """
    out: list[BetheRootSet] = []
    for k in range(2 * n):
        w = cmath.exp(1j * math.pi * k / n)
        if abs(w + 1) < 1e-12:
            continue
        x = SINH_ETA / (w - cmath.cosh(ETA))
        if abs(1 - x) < 1e-9 or abs(1 + x) < 1e-9:
            continue
        try:
            rs = BetheRootSet(n, (cmath.atanh(x),))
        except SingularRootsError:
            continue
        if all(_mod_pi_distance(rs.roots[0], o.roots[0]) > DEDUP_TOL for o in out):
            out.append(rs)
    return sorted(out, key=lambda r: _sort_key(r.roots[0]))


# ----------------------------------------------------------------------------
# Solver


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 200
    seed: int = 0
    max_iter: int = 80
    tol: float = 1e-11
    max_real: float = 12.0


@dataclass
class SolveResult:
    n: int
    m: int
    root_sets: list[BetheRootSet]
    converged_starts: int
    discarded: dict[str, int] = field(default_factory=dict)
    mirror_group: list[int] = field(default_factory=list)

    def diagnostic(self) -> CheckReport:
        params = {"n": self.n, "m": self.m, "found": len(self.root_sets),
                  "converged_starts": self.converged_starts, "discarded": dict(self.discarded)}
        return CheckReport.make("bethe.solve", params, 0.0 if self.root_sets else math.inf, 0.0)


def _newton(n: int, start: np.ndarray, cfg: SolverConfig) -> np.ndarray | None:
    lam = start.astype(complex)
    for _ in range(cfg.max_iter):
        if np.max(bethe_residual_raw(n, lam)) < cfg.tol:
            return lam
        F, J = bethe_jacobian(n, lam)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        size = np.max(np.abs(step))
        if size > 0.5:
            step *= 0.5 / size
        lam = lam + step
        if np.max(np.abs(lam.real)) > cfg.max_real:
            return None
    return lam if np.max(bethe_residual_raw(n, lam)) < cfg.tol else None


def _polish(n: int, lam: np.ndarray, steps: int = 8) -> np.ndarray:
    """Extra undamped Newton steps so that roots sitting on a singular point land on it."""
    best, best_res = lam, float(np.max(bethe_residual_raw(n, lam)))
    for _ in range(steps):
        F, J = bethe_jacobian(n, lam)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        lam = lam + step
        res = float(np.max(bethe_residual_raw(n, lam)))
        if res <= best_res:
            best, best_res = lam, res
        if np.max(np.abs(step)) < 1e-15:
            break
    return best


def state_is_zero(n: int, roots: Sequence[complex], tol: float = 1e-8) -> bool:
    """Bethe vector vanishes relative to the product of the creation-operator norms."""
    scale = 1.0
    for lam in roots:
        scale *= max(float(np.linalg.norm(monodromy(n, complex(lam)).B.toarray(), 2)), 1e-300)
    return bethe_state_raw(n, roots).norm() < tol * scale


def _starts(n: int, m: int, cfg: SolverConfig) -> list[np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    starts = []
    singles = [rs.roots[0] for rs in m1_roots_closed_form(n)]
    if m == 1:
        starts.extend(np.array([r]) for r in singles)
    else:
        for combo in itertools.combinations(singles, m):
            jitter = rng.uniform(-0.05, 0.05, m) + 1j * rng.uniform(-0.05, 0.05, m)
            starts.append(np.array(combo) + jitter)
    for _ in range(cfg.starts):
        starts.append(rng.uniform(-1.5, 1.5, m) + 1j * rng.uniform(-math.pi, math.pi, m))
    return starts


def _same_set(x: Sequence[complex], y: Sequence[complex], tol: float = DEDUP_TOL) -> bool:
    if len(x) != len(y):
        return False
    return any(all(_mod_pi_distance(a, b) < tol for a, b in zip(x, perm))
               for perm in itertools.permutations(y))


def _spurious(n: int, roots: Sequence[complex]) -> bool:
    """Both cleared sides vanish: a zero of the clearing, not of the equations."""
    terms = bethe_terms(n, roots)
    for j, lj in enumerate(roots):
        w = weights(lj)
        scale = abs(w.a) ** (2 * n) + abs(w.b) ** (2 * n)
        if max(abs(terms[j, 0]), abs(terms[j, 1])) < SING_TOL * scale:
            return True
    return False


def solve_bethe(n: int, m: int, cfg: SolverConfig | None = None) -> SolveResult:
    """Multi-start Newton search for solutions of the size-``n`` Bethe equations with ``m`` roots.

    Returns every distinct solution that passes the root-set invariants and
    has a nonzero Bethe vector; sets related by mirroring roots are kept and
    share a ``mirror_group`` index.
    """
    cfg = cfg or SolverConfig()
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if cfg.starts < 1:
        raise ValueError("starts must be >= 1")
    found: list[BetheRootSet] = []
    converged = 0
    discarded = {"spurious": 0, "singular": 0, "zero_state": 0, "unpolished": 0}
    for start in _starts(n, m, cfg):
        lam = _newton(n, start, cfg)
        if lam is None:
            continue
        converged += 1
        lam = _polish(n, lam)
        if np.max(bethe_residual_raw(n, lam)) >= cfg.tol:
            discarded["unpolished"] += 1
            continue
        roots = [canonical_root(x) for x in lam]
        if _spurious(n, roots):
            discarded["spurious"] += 1
            continue
        try:
            rs = BetheRootSet(n, tuple(roots))
        except SingularRootsError:
            discarded["singular"] += 1
            continue
        if any(_same_set(rs.roots, o.roots) for o in found):
            continue
        if state_is_zero(n, rs.roots):
            discarded["zero_state"] += 1
            continue
        found.append(rs)
    found.sort(key=lambda r: [_sort_key(x) for x in r.roots])
    groups: list[int] = []
    for i, rs in enumerate(found):
        key = rs.mirror_key()
        groups.append(next(g for g, other in enumerate(found[: i + 1])
                           if _same_set(other.mirror_key(), key)))
    return SolveResult(n, m, found, converged, discarded, groups)


# ----------------------------------------------------------------------------
# States and eigenvalues


def bethe_state_raw(n: int, roots: Sequence[complex]) -> StateVec:
    """``B(l_1) ... B(l_m) Omega`` on ``n`` sites (no admissibility checks)."""
    v = StateVec.all_up(n).amplitudes
    for lam in reversed(list(roots)):
        v = monodromy(n, complex(lam)).B.toarray() @ v
    return StateVec(n, v)


def bethe_state(n: int, rs: BetheRootSet) -> StateVec:
    if rs.m > n:
        raise ValueError("more roots than sites")
    return bethe_state_raw(n, rs.roots)


def _as_roots(rs) -> tuple[complex, ...]:
    return rs.roots if isinstance(rs, BetheRootSet) else tuple(complex(r) for r in rs)


def tau_eigenvalue(n: int, u: complex, rs) -> complex:
    """Transfer-matrix eigenvalue on the Bethe state of ``rs`` (on-shell).

    tau = [sinh(2u - eta) sinh(u - eta) D+(u) prod X_j - sinh(u - eta) D-(u) prod Y_j]
          / (sinh(eta) sinh(2u + eta))
    """
    u = complex(u)
    roots = _as_roots(rs)
    den0 = cmath.sinh(2 * u + ETA)
    if abs(den0) < SING_TOL:
        raise PoleError("sinh(2u + eta) = 0")
    p1 = p2 = 1.0 + 0j
    for j, lam in enumerate(roots):
        s1, s2 = cmath.sinh(u - lam), cmath.sinh(u + lam + ETA)
        if abs(s1) < SING_TOL:
            raise PoleError(f"sinh(u - lambda_{j}) = 0")
        if abs(s2) < SING_TOL:
            raise PoleError(f"sinh(u + lambda_{j} + eta) = 0")
        den = s1 * s2
        p1 *= cmath.sinh(u - lam - ETA) * cmath.sinh(u + lam) / den
        p2 *= cmath.sinh(u - lam + ETA) * cmath.sinh(u + lam - ETA) / den
    first = cmath.sinh(2 * u - ETA) * cmath.sinh(u - ETA) * delta_plus(n, u) * p1
    second = cmath.sinh(u - ETA) * delta_minus(n, u) * p2
    return (first - second) / (SINH_ETA * den0)


def energy_from_tau(n: int, rs, h: float = 1e-4) -> float:
    """Energy read off from ``d tau/du`` at ``u = 0`` via ``t'(0) = c (H + s I)``."""
    roots = _as_roots(rs)
    slope = richardson_derivative(lambda x: tau_eigenvalue(n, x, roots), h)
    return complex(slope / DERIV_PREFACTOR - hamiltonian_shift(n)).real


ONSHELL_TOL = 1e-8
ENERGY_TOL = 1e-6


def onshell_check(n: int, rs: BetheRootSet, n_samples: int = 5, seed: int = 0) -> CheckReport:
    """Eigenvector test of the Bethe state against ``t(u)`` and ``H``.

    Residual is the larger of the worst ``|t v - tau v| / |v|`` divided by its
    tolerance and the ``|H v - E v| / |v|`` divided by its tolerance, so the
    report passes (tolerance 1) only if both hold.
    """
    if rs.n != n:
        raise ValueError("root set is for a different chain length")
    br = bethe_residual(rs)
    if br.size and br.max() >= ONSHELL_PRE_TOL:
        raise NotOnShellError(f"Bethe residual {br.max():.2e} >= {ONSHELL_PRE_TOL:.0e}")
    v = bethe_state(n, rs)
    params = {"n": n, "m": rs.m, "roots": list(rs.roots), "seed": seed, "samples": n_samples}
    nv = v.norm()
    if nv < 1e-12:
        params["zero_state"] = True
        return CheckReport.make("bethe.onshell", params, math.inf, 1.0)
    vv = v.amplitudes
    worst_t = 0.0
    for u in sample_spectral(np.random.default_rng(seed), n_samples):
        tv = transfer(n, u).toarray() @ vv
        worst_t = max(worst_t, float(np.linalg.norm(tv - tau_eigenvalue(n, u, rs) * vv)) / nv)
    energy = energy_from_tau(n, rs)
    worst_h = float(np.linalg.norm(build_H(n).mat @ vv - energy * vv)) / nv
    params.update(energy=energy, transfer_residual=worst_t, hamiltonian_residual=worst_h)
    return CheckReport.make("bethe.onshell", params,
                            max(worst_t / ONSHELL_TOL, worst_h / ENERGY_TOL), 1.0)


def q_omega_identity(n: int, tol: float = 1e-12) -> CheckReport:
    """``Q^(n) Omega^(n) = (-1)^n B^(n-1)(eta) Omega^(n-1)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    lhs = build_Q(n).apply(StateVec.all_up(n)).amplitudes
    rhs = (-1) ** n * (monodromy(n - 1, ETA).B.toarray() @ StateVec.all_up(n - 1).amplitudes)
    return CheckReport.make("bethe.q_omega", {"n": n}, max_abs(lhs - rhs), tol)


def keyrelation_residual(n: int, roots: Sequence[complex]) -> tuple[float, StateVec, StateVec]:
    """Relative residual of ``Q B..B Omega = (-1)^n prod d(l)^2 B..B B(eta) Omega``.

    Returns the residual together with the image state and the partner state.
    """
    roots = tuple(complex(r) for r in roots)
    v = bethe_state_raw(n, roots)
    image = build_Q(n).apply(v)
    coef = (-1) ** n * np.prod([weights(r).d ** 2 for r in roots]) if roots else (-1) ** n
    partner = bethe_state_raw(n - 1, roots + (ETA,)) * coef
    scale = max(image.norm(), partner.norm())
    diff = max_abs(image.amplitudes - partner.amplitudes)
    if scale < 1e-12 * max(1.0, v.norm()):
        return diff / max(1.0, max_abs(v.amplitudes)), image, partner
    return diff / max(max_abs(image.amplitudes), max_abs(partner.amplitudes)), image, partner


KEY_TOL = 1e-9
AUG_TOL = 1e-8
TAU_REL_TOL = 1e-9
KERNEL_TOL = 1e-12


def susy_pairing_check(n: int, rs: BetheRootSet, n_samples: int = 5, seed: int = 0) -> list[CheckReport]:
    """Action of ``Q^(n)`` on the Bethe state of ``rs`` and the partner root set ``rs + {eta}``.

    (a) key relation, (b) partner satisfies the size ``n-1`` equations (on-shell
    input only), (c) ``tau^(n)(u; rs) = d(u)^2 tau^(n-1)(u; rs + eta)``,
    (d) energies agree (on-shell only), (e) kernel case when a root equals eta.
    For regular on-shell sets with a nonzero partner, the partner is also
    checked to be an eigenvector of ``H^(n-1)`` at that energy.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    base = {"n": n, "m": rs.m, "roots": list(rs.roots), "seed": seed}
    if rs.contains_eta or any(_is_eta(r) for r in rs.roots):
        v = bethe_state(n, rs)
        img = build_Q(n).apply(v)
        res = max_abs(img.amplitudes) / max(1.0, max_abs(v.amplitudes))
        return [CheckReport.make("pairing.kernel", base, res, KERNEL_TOL)]

    reports = []
    key_res, image, partner = keyrelation_residual(n, rs.roots)
    reports.append(CheckReport.make("pairing.key_relation", base, key_res, KEY_TOL))
    if n >= 3:
        nil = max_abs(supercharge(n - 1).apply(image).amplitudes) / max(1.0, max_abs(image.amplitudes))
        reports.append(CheckReport.make("pairing.nilpotent_on_state", base, nil, KERNEL_TOL))

    aug = rs.with_eta()
    onshell = rs.m == 0 or bethe_residual(rs).max() < ONSHELL_PRE_TOL
    if onshell:
        aug_res = bethe_residual_raw(n - 1, aug)
        reports.append(CheckReport.make("pairing.augmented_bethe", base, float(aug_res.max()), AUG_TOL))

    worst = 0.0
    for u in sample_spectral(np.random.default_rng(seed), n_samples):
        lhs = tau_eigenvalue(n, u, rs.roots)
        rhs = weights(u).d ** 2 * tau_eigenvalue(n - 1, u, aug)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    reports.append(CheckReport.make("pairing.tau_relation", base, worst, TAU_REL_TOL))

    if onshell:
        e_big = energy_from_tau(n, rs.roots)
        e_small = energy_from_tau(n - 1, aug)
        params = dict(base, energy_n=e_big, energy_n_minus_1=e_small)
        reports.append(CheckReport.make("pairing.energy", params, abs(e_big - e_small), ENERGY_TOL))
        pn = partner.norm()
        if rs.regular and pn > 1e-10:
            hp = build_H(n - 1).mat @ partner.amplitudes
            res = float(np.linalg.norm(hp - e_small * partner.amplitudes)) / pn
            reports.append(CheckReport.make("pairing.partner_eigenvector", base, res, ENERGY_TOL))
    return reports


def random_root_set(rng: np.random.Generator, n: int, m: int) -> BetheRootSet:
    """Generic off-shell roots in ``[-1, 1] x [-1, 1] i``, resampled until admissible."""
    while True:
        roots = rng.uniform(-1, 1, m) + 1j * rng.uniform(-1, 1, m)
        try:
            rs = BetheRootSet(n, tuple(roots))
        except SingularRootsError:
            continue
        if all(_mod_pi_distance(r, ETA) > 1e-3 for r in rs.roots):
            return rs


# ----------------------------------------------------------------------------
# Root-set files


def _parse_complex(item, where: str) -> complex:
    if (not isinstance(item, list) or len(item) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)):
        raise RootFileError(f"{where}: expected [re, im] pair of numbers, got {item!r}")
    return complex(item[0], item[1])


def _parse_entry(obj, where: str) -> BetheRootSet:
    if not isinstance(obj, dict):
        raise RootFileError(f"{where}: expected an object with fields n, m, roots")
    for key in ("n", "m", "roots"):
        if key not in obj:
            raise RootFileError(f"{where}: missing field {key!r}")
    n, m, roots = obj["n"], obj["m"], obj["roots"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise RootFileError(f"{where}.n: expected positive integer, got {n!r}")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise RootFileError(f"{where}.m: expected non-negative integer, got {m!r}")
    if not isinstance(roots, list):
        raise RootFileError(f"{where}.roots: expected a list")
    if len(roots) != m:
        raise RootFileError(f"{where}.roots: m = {m} but {len(roots)} roots given")
    parsed = [_parse_complex(r, f"{where}.roots[{i}]") for i, r in enumerate(roots)]
    flag = obj.get("contains_eta", False)
    if not isinstance(flag, bool):
        raise RootFileError(f"{where}.contains_eta: expected true or false")
    try:
        return BetheRootSet(n, tuple(parsed), contains_eta=flag)
    except ValueError as exc:
        raise RootFileError(f"{where}: {exc}") from exc


def read_root_sets(path: str | Path) -> list[BetheRootSet]:
    """Read a root-set file: one object ``{"n", "m", "roots"}`` or a list of them.

    A root equal to eta is accepted only with ``"contains_eta": true``.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RootFileError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict):
        return [_parse_entry(data, "$")]
    if isinstance(data, list):
        return [_parse_entry(obj, f"$[{i}]") for i, obj in enumerate(data)]
    raise RootFileError(f"{path}: top level must be an object or a list")


def write_root_sets(path: str | Path, sets: Sequence[BetheRootSet], extra: Sequence[dict] | None = None) -> None:
    entries = []
    for i, rs in enumerate(sets):
        entry = rs.to_dict()
        if extra is not None:
            entry.update(extra[i])
        entries.append(entry)
    Path(path).write_text(json.dumps(entries, indent=1, sort_keys=True) + "\n")
