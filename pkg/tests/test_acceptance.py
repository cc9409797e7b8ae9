"""Acceptance suite: one PASS/FAIL line per criterion.

Every tolerance below is fixed by the acceptance contract; none is tuned.
Run with ``pytest tests/test_acceptance.py -v``; the lines are printed as the
tests run (visible with ``-s``) and collected again in the terminal summary.
"""
import math
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from susyx.bethe import (
    BetheRootSet, SolverConfig, bethe_residual, bethe_residual_raw, m1_roots_closed_form,
    onshell_check, random_root_set, solve_bethe, susy_pairing_check,
)
from susyx.cohomology import exact_rank_check, iota_formula, spectrum_decomposition, vacuum_singlet
from susyx.linalg import max_abs
from susyx.reflection import (
    ETA, construction_check, hamiltonian_shift, monodromy, pseudovacuum_deltas, sample_spectral,
    theorem1_residuals, transfer_at_zero_check, transfer_commutation_check, transfer_derivative_check,
    weights,
)
from susyx.susy import build_Q, build_q, check_susy_suite

TOL_SUSY = 1e-12
TOL_THEOREM1 = 1e-10
TOL_CONSTRUCTION = 1e-10
TOL_COMMUTE = 1e-10
TOL_DERIVATIVE = 1e-6
TOL_DELTAS = 1e-10
TOL_KEY = 1e-9
TOL_KERNEL = 1e-12
TOL_AUGMENTED = 1e-8
TOL_TAU = 1e-9
TOL_ENERGY = 1e-6
TOL_OVERLAP = 1e-10
TOL_SINGLET_ENERGY = 1e-10
SEED = 20240611
PI6 = 1j * math.pi / 6


def record(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def worst(reports) -> float:
    return max((r.residual for r in reports), default=0.0)


def rng_for(*key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([SEED, *key]))


def test_criterion_01_susy_algebra():
    t0 = time.perf_counter()
    reports = [r for n in range(2, 9) for r in check_susy_suite(n)]
    elapsed = time.perf_counter() - t0
    res = worst(reports)
    ok = all(r.passed for r in reports) and res <= TOL_SUSY and elapsed < 10
    record(1, ok, f"SUSY algebra N=2..8: {len(reports)} checks, max residual {res:.1e} "
                  f"(tol {TOL_SUSY:.0e}), {elapsed:.1f}s (< 10s)")
    assert ok


def test_criterion_02_theorem1():
    t0 = time.perf_counter()
    reports = []
    for n in range(2, 7):
        for u in sample_spectral(rng_for(2, n), 10):
            reports.extend(theorem1_residuals(n, u, TOL_THEOREM1))
    base = 0.0
    for u in sample_spectral(rng_for(2, 0), 10):
        w = weights(u)
        a, b, c, d = w.a, w.b, w.c, w.d
        lhs = build_Q(2).toarray() @ monodromy(2, u).A.toarray()
        base = max(base, max_abs(lhs - a ** 4 * d * build_q().toarray()) / max(abs(a ** 4 * d), 1e-300),
                   abs(a ** 4 * d - d * d * (d * b * b - a * c * c) - b * c * c * d * (d - a)) / abs(a ** 4 * d))
    elapsed = time.perf_counter() - t0
    res = worst(reports)
    ok = all(r.passed for r in reports) and base <= TOL_THEOREM1 and elapsed < 60
    record(2, ok, f"Q-intertwining relations N=2..6 x 10 u: {len(reports)} checks, max rel residual {res:.1e}; "
                  f"base step Q A = a^4 d q residual {base:.1e} (tol {TOL_THEOREM1:.0e}), {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_03_construction_oracle():
    reports = [construction_check(n, u, TOL_CONSTRUCTION)
               for n in range(1, 7) for u in sample_spectral(rng_for(3, n), 5)]
    res = worst(reports)
    ok = all(r.passed for r in reports)
    record(3, ok, f"direct vs recursive monodromy N=1..6 x 5 u: max rel diff {res:.1e} (tol {TOL_CONSTRUCTION:.0e})")
    assert ok


def test_criterion_04_integrability_and_hamiltonian():
    comm = []
    for n in range(1, 6):
        us = sample_spectral(rng_for(4, n), 4)
        comm += [transfer_commutation_check(n, u, v, TOL_COMMUTE) for u in us for v in us if u != v]
    deriv = [transfer_derivative_check(n, tol=TOL_DERIVATIVE) for n in range(2, 6)]
    zero = [transfer_at_zero_check(n, TOL_COMMUTE) for n in range(1, 6)]
    printed = [transfer_derivative_check(n, shift=(1 - n) / 2, tol=TOL_DERIVATIVE).residual for n in range(2, 6)]
    ok = all(r.passed for r in comm + deriv + zero)
    record(4, ok, f"[t(u),t(v)] N<=5: max {worst(comm):.1e} (tol {TOL_COMMUTE:.0e}); "
                  f"t'(0) = -4i/sqrt3 (H + s I) with s = -(N+1)/2, N=2..5: max {worst(deriv):.1e} "
                  f"(tol {TOL_DERIVATIVE:.0e}); t(0)+I max {worst(zero):.1e}; "
                  f"[literal shift (1-N)/2 leaves {min(printed):.4f} = 4/sqrt3 on the identity]")
    assert ok
    assert all(hamiltonian_shift(n) == -(n + 1) / 2 for n in range(2, 6))


def test_criterion_05_pseudovacuum():
    reports = [pseudovacuum_deltas(n, u, TOL_DELTAS)[2]
               for n in range(1, 7) for u in sample_spectral(rng_for(5, n), 5)]
    ok = all(r.passed for r in reports)
    record(5, ok, f"Delta+- from matrix action vs closed forms and recursions, N=1..6 x 5 u: "
                  f"max rel {worst(reports):.1e} (tol {TOL_DELTAS:.0e})")
    assert ok


def test_criterion_06_key_relation():
    offshell = []
    kernel = []
    for n in range(2, 7):
        rng = rng_for(6, n)
        for m in range(1, min(3, n) + 1):
            for _ in range(3):
                rs = random_root_set(rng, n, m)
                offshell += [r for r in susy_pairing_check(n, rs) if r.check_name == "pairing.key_relation"]
                others = random_root_set(rng, n, m - 1).roots if m > 1 else ()
                rs_eta = BetheRootSet(n, others + (ETA,), contains_eta=True)
                kernel += susy_pairing_check(n, rs_eta)
    kernel_tol_ok = all(r.residual <= TOL_KERNEL for r in kernel)
    ok = all(r.passed for r in offshell) and all(r.passed for r in kernel) and kernel_tol_ok
    record(6, ok, f"key relation off-shell N=2..6, m<=3: {len(offshell)} sets, max rel {worst(offshell):.1e} "
                  f"(tol {TOL_KEY:.0e}); kernel case (a root = eta): {len(kernel)} sets, max {worst(kernel):.1e} "
                  f"(tol {TOL_KERNEL:.0e})")
    assert ok


def _criterion7_sets():
    out = []
    for n in range(2, 6):
        for m in range(1, min(n, 2) + 1):
            result = solve_bethe(n, m, SolverConfig(starts=200, seed=SEED % 2 ** 31))
            sets = list(result.root_sets)
            if m == 1:
                for rs in m1_roots_closed_form(n):
                    if not any(abs(rs.roots[0] - s.roots[0]) < 1e-8 for s in sets):
                        sets.append(rs)
            out.extend((n, rs) for rs in sets)
    return out


def test_criterion_07_partner_sets():
    sets = _criterion7_sets()
    wanted = {"pairing.augmented_bethe": TOL_AUGMENTED, "pairing.tau_relation": TOL_TAU,
              "pairing.energy": TOL_ENERGY}
    sweep = []
    for n, rs in sets:
        assert bethe_residual(rs).max() < 1e-10
        for r in susy_pairing_check(n, rs, 5, SEED % 2 ** 31):
            if r.check_name in wanted:
                assert r.tolerance == wanted[r.check_name]
                sweep.append(r)
    sweep_ok = all(r.passed for r in sweep) and len(sweep) == 3 * len(sets)

    # the pi/6 root for N = 2: found by the solver, then checked end to end
    found = [rs for n, rs in sets if n == 2 and rs.m == 1 and abs(rs.roots[0] - PI6) < 1e-10]
    pi6_found = bool(found)
    rs = found[0] if found else BetheRootSet(2, (PI6,))
    eq_res = float(bethe_residual(rs)[0])
    aug_res = float(bethe_residual_raw(1, rs.with_eta()).max())
    pairing = susy_pairing_check(2, rs, 5, SEED % 2 ** 31)
    onshell = onshell_check(2, rs, 5, SEED % 2 ** 31)
    pi6_ok = pi6_found and eq_res < 1e-12 and all(r.passed for r in pairing) and onshell.passed

    ok = sweep_ok and pi6_ok
    regular = sum(rs.regular for _, rs in sets)
    record(7, ok, f"partner-set checks over {len(sets)} solver/closed-form sets (N<=5, m<=2; {regular} regular): "
                  f"{'all pass' if sweep_ok else 'FAILURES'} (max aug {worst(sweep[0::3]):.1e}, "
                  f"tau {worst(sweep[1::3]):.1e}, energy {worst(sweep[2::3]):.1e}); "
                  f"N=2 root i*pi/6: found={pi6_found}, equation residual {eq_res:.1e}, augmented {aug_res:.1e}, "
                  f"pairing {'pass' if all(r.passed for r in pairing) else 'fail'}, "
                  f"eigenvector check {'pass' if onshell.passed else 'FAIL'} "
                  f"(|t v - tau v|/|v| = {onshell.params.get('transfer_residual', float('nan')):.2e}, "
                  f"|H v - E v|/|v| = {onshell.params.get('hamiltonian_residual', float('nan')):.2e})")
    assert sweep_ok, "partner-set sweep failed"
    assert pi6_ok, ("i*pi/6 solves the Bethe equations but B(i*pi/6)Omega is not an eigenvector "
                    "of t(u) or H^(2); see the decisions log")


def test_criterion_08_counting():
    t0 = time.perf_counter()
    ranks = [exact_rank_check(n) for n in range(2, 11)]
    spectra = [spectrum_decomposition(n) for n in range(2, 9)]
    elapsed = time.perf_counter() - t0
    ranks_ok = all(r.passed for r in ranks)
    spec_ok = all(s.counts == s.expected and s.report().passed for s in spectra)
    ok = ranks_ok and spec_ok and elapsed < 300
    record(8, ok, f"rank Q^(N) = ceil(2/3 (2^(N-1)-1)) exactly (SVD and integer elimination) N=2..10 "
                  f"[{', '.join(str(r.params['exact_rank']) for r in ranks)}]; spectrum counts N=2..8 "
                  f"{[s.counts for s in spectra]}; {elapsed:.1f}s (< 300s)")
    assert ok
    assert ranks[-1].params["exact_rank"] == iota_formula(10) == 341


def test_criterion_09_singlet():
    reports = [vacuum_singlet(n, TOL_OVERLAP)[1] for n in range(1, 9)]
    dims_ok = all(r.params.get("intersection_dim") == 1 for r in reports)
    energy_ok = all(abs(r.params["energy"]) < TOL_SINGLET_ENERGY for r in reports)
    overlap_ok = all(r.params["overlap"] > 1 - TOL_OVERLAP for r in reports)
    sector_ok = all(r.params["sector_leak"] <= TOL_OVERLAP for r in reports)
    mod2 = all(r.params["sz"] == r.params["n"] % 2 for r in reports)
    ok = dims_ok and energy_ok and overlap_ok and sector_ok and all(r.passed for r in reports)
    record(9, ok, f"singlet N=1..8: intersection dim 1 {dims_ok}, max |E| "
                  f"{max(abs(r.params['energy']) for r in reports):.1e}, single Sz sector {sector_ok} "
                  f"(Sz = N mod 2: {mod2}), min overlap with H kernel "
                  f"{min(r.params['overlap'] for r in reports):.15f}")
    assert ok


def test_criterion_10_determinism(tmp_path):
    cmd = [sys.executable, "-m", "susyx", "verify", "all", "--n", "2..4", "--samples", "3", "--seed", "42"]
    outs = []
    for threads in ("1", "3"):
        path = tmp_path / f"run{threads}.ndjson"
        proc = subprocess.run(cmd + ["--out", str(path)], capture_output=True,
                              env={"SUSYX_THREADS": threads, "PATH": "/usr/bin:/bin"})
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    solve = [tuple(rs.roots for rs in solve_bethe(3, 2, SolverConfig(starts=50, seed=42)).root_sets)
             for _ in range(2)]
    ok = outs[0] == outs[1] and len(outs[0]) > 0 and solve[0] == solve[1]
    record(10, ok, f"fresh-process CLI runs (1 and 3 threads, seed 42) byte-identical: {outs[0] == outs[1]} "
                   f"({len(outs[0])} bytes); repeated solver run identical: {solve[0] == solve[1]}")
    assert ok
