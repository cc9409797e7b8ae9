import numpy as np
import pytest

from susyx.cohomology import (
    DimReport, SpectrumDecomposition, dims, exact_rank_check, iota_formula, kappa_formula,
    spectrum_decomposition, vacuum_singlet,
)
from susyx.linalg import SpinConfig, eig_hermitian, integer_rank
from susyx.susy import build_H, build_Q


def basis(s):
    return SpinConfig.from_string(s).state().amplitudes


def test_formulas_small():
    assert [iota_formula(n) for n in (2, 3, 4, 5, 10)] == [1, 2, 5, 10, 341]
    assert kappa_formula(2) == 3 and kappa_formula(4) == 11


@pytest.mark.parametrize("n", range(2, 9))
def test_dims(n):
    d = dims(n)
    assert d.matches
    assert d.kappa + d.iota == 2 ** n
    assert d.report().passed


def test_dim_report_invariant():
    with pytest.raises(ValueError):
        DimReport(2, 2, 1, 3, 1)


def test_exact_rank_n10_independent():
    # brute-force oracle: numpy's dense matrix_rank on the integer matrix
    q = build_Q(8).toarray().real
    assert integer_rank(q.astype(np.int64)) == np.linalg.matrix_rank(q) == iota_formula(8)


@pytest.mark.slow
def test_exact_rank_n10():
    assert exact_rank_check(10).passed


def test_singlet_n1_and_n2():
    w, rep = vacuum_singlet(1)
    assert rep.passed
    assert np.allclose(np.abs(w.amplitudes), [1, 0])
    w, rep = vacuum_singlet(2)
    assert rep.passed
    expected = (basis("+-") + basis("-+")) / np.sqrt(2)
    assert abs(np.vdot(expected, w.amplitudes)) == pytest.approx(1)
    assert rep.params["sz"] == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_singlet_unique_and_in_sector(n):
    w, rep = vacuum_singlet(n)
    assert rep.passed, rep
    assert rep.params["intersection_dim"] == 1
    assert abs(rep.params["energy"]) < 1e-10
    assert rep.params["sz"] == n % 2
    vals, vecs = eig_hermitian(build_H(n))
    assert np.sum(np.abs(vals) < 1e-8) == 1
    assert abs(vecs[0].vdot(w)) > 1 - 1e-10


def test_spectrum_n2_details():
    sd = spectrum_decomposition(2)
    assert sd.counts == (1, 2, 1)
    # the E = 1 state ++ maps to v- on one site, which has energy 1
    image = build_Q(2).toarray() @ basis("++")
    assert np.allclose(image, basis("-"))
    assert np.allclose(build_H(1).toarray() @ image, image)


@pytest.mark.parametrize("n", range(2, 9))
def test_spectrum_counts(n):
    sd = spectrum_decomposition(n)
    assert sd.counts == sd.expected
    assert sd.report().passed
    assert sd.pairing_residual < 1e-9


def test_spectrum_n5():
    assert spectrum_decomposition(5).counts == (1, 21, 10)


def test_spectrum_invariant():
    with pytest.raises(ValueError):
        SpectrumDecomposition(2, 1, 1, 1, 1e-9)
