import numpy as np
import pytest

from susyx.linalg import LinOp, SpinConfig, eig_hermitian
from susyx.susy import build_H, build_Q, build_q, check_susy_suite, supercharge


def basis(s):
    return SpinConfig.from_string(s).state().amplitudes


def test_q_two_site_table():
    q = build_q().toarray()
    expected = np.zeros((2, 4))
    expected[1, 0] = 1  # v+ v+ -> v-
    assert np.array_equal(q, expected)


def test_Q3_by_hand():
    # Q^(3) = q (x) 1 on sites (2,3) minus ... with alternating signs; on |+++>:
    # pair (1,2) gives v- on merged site 1 -> "+-", sign +; pair (2,3) gives "-+", sign -
    out = build_Q(3).toarray() @ basis("+++")
    assert np.allclose(out, basis("+-") - basis("-+"))


def test_H2_matrix_by_hand():
    # Hand-built 4x4 in the basis (++, +-, -+, --), bit order: site 1 is the low bit
    h = np.array([
        [1, 0, 0, 0],
        [0, 1, -1, 0],
        [0, -1, 1, 0],
        [0, 0, 0, 2],
    ], dtype=float)
    assert np.allclose(build_H(2).toarray(), h)
    vals, _ = eig_hermitian(build_H(2))
    assert np.allclose(vals, [0, 1, 2, 2])


def test_H1():
    assert np.allclose(build_H(1).toarray(), np.diag([0, 1]))


def test_supercharge_one_site_is_zero_map():
    z = supercharge(1)
    assert z.shape == (1, 2) and z.norm() == 0
    with pytest.raises(ValueError):
        build_Q(1)


@pytest.mark.parametrize("n", range(2, 9))
def test_susy_suite(n):
    for r in check_susy_suite(n):
        assert r.passed, r


def test_broken_hamiltonian_fails():
    def broken(n):
        return build_H(n) + LinOp.identity(n) * 0.01
    names = {r.check_name for r in check_susy_suite(3, broken) if not r.passed}
    assert "susy.decomposition" in names
