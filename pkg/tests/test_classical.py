from fractions import Fraction

import numpy as np
import pytest

from tailalg import classical as cl

HALF = Fraction(1, 2)


def diag_family():
    return cl.CommutingFamily.from_lists([[[0, 0], [0, 1]], [[1, 0], [0, 0]]], [1, 1])


def test_diag_example_exact():
    m = cl.joint_spectral_measure(diag_family())
    assert m.exact and m.as_dict() == {(0, 1): HALF, (1, 0): HALF}
    assert m.total() == 1


def test_scalar_block():
    fam = cl.CommutingFamily.from_lists([[[2, 0], [0, 2]]], [Fraction(3, 5), Fraction(4, 5)])
    assert cl.joint_spectral_measure(fam).atoms == [((2,), 1)]


def test_float_path_matches_exact():
    fam = cl.CommutingFamily.from_lists([[[0.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 0.0]]], [2 ** -0.5, 2 ** -0.5])
    m = cl.joint_spectral_measure(fam)
    assert not m.exact
    got = sorted((tuple(round(x, 12) for x in p), round(w, 12)) for p, w in m.atoms)
    assert got == [((0.0, 1.0), 0.5), ((1.0, 0.0), 0.5)]


def test_irrational_spectrum_falls_back_to_float():
    fam = cl.CommutingFamily.from_lists([[[1, 1], [1, 0]]], [1, 0])
    m = cl.joint_spectral_measure(fam)
    assert not m.exact
    assert sorted(round(p[0], 9) for p, _ in m.atoms) == [round((1 - 5 ** 0.5) / 2, 9), round((1 + 5 ** 0.5) / 2, 9)]
    assert abs(m.total() - 1) < 1e-12


def test_non_commuting_rejected():
    fam = cl.CommutingFamily.from_lists([[[0, 1], [1, 0]], [[1, 0], [0, 0]]], [1, 0])
    with pytest.raises(cl.NonCommutingError):
        cl.joint_spectral_measure(fam)


def test_moment_identity_examples():
    fam = diag_family()
    m = cl.joint_spectral_measure(fam)
    rep = cl.verify_moment_identity(fam, m, 4)
    assert rep.ok and rep.payload["monomials"] == 15
    assert sum(w * p[0] for p, w in m.atoms) == HALF
    assert sum(w * p[0] * p[1] for p, w in m.atoms) == 0


def test_reconstruct_diag():
    U, rep = cl.reconstruct_multiplication_model(diag_family())
    assert rep.status == "pass"
    assert np.allclose(U, np.eye(2))


def test_reconstruct_identity_family():
    fam = cl.CommutingFamily.from_lists([[[1, 0], [0, 1]]], [1, 0])
    U, rep = cl.reconstruct_multiplication_model(fam)
    assert rep.ok and U.shape == (1, 2) and rep.caveats


@pytest.mark.parametrize("seed", range(10))
def test_random_families(seed):
    fam = cl.random_commuting_family(seed)
    m = cl.joint_spectral_measure(fam)
    assert abs(m.total() - 1) < 1e-12
    assert np.allclose(sum(m.projections + m.null_projections), np.eye(6), atol=1e-10)
    assert cl.verify_moment_identity(fam, m, 4).ok
    U, rep = cl.reconstruct_multiplication_model(fam, m)
    assert rep.ok
    for a, j in zip(fam.matrices, range(2)):
        back = U.T @ np.diag([p[j] for p, _ in m.atoms]) @ U
        assert np.abs(back - a).max() < 1e-10


def test_consistency():
    fam = cl.random_commuting_family(3, count=3)
    m = cl.joint_spectral_measure(fam)
    margs = [m, cl.marginal(m, (0, 1)), cl.marginal(m, (2,)), cl.marginal(m, (1,))]
    assert cl.kolmogorov_consistency_check(margs).ok
    assert cl.kolmogorov_consistency_check([m]).payload["pairs"] == 0


def test_consistency_negative_control():
    m = cl.joint_spectral_measure(diag_family())
    small = cl.marginal(m, (0,))
    bad = cl.AtomicMeasure([(p, w + Fraction(1, 10) if i == 0 else w) for i, (p, w) in enumerate(small.atoms)],
                           small.labels, True)
    rep = cl.kolmogorov_consistency_check([m, bad])
    assert not rep.ok and rep.violations[0]["maxDiscrepancy"] == pytest.approx(0.1)


def test_incoherent_labels():
    with pytest.raises(ValueError):
        cl.kolmogorov_consistency_check([cl.AtomicMeasure([((0, 0), 1)], (1, 1))])


def test_measure_json():
    js = cl.joint_spectral_measure(diag_family()).to_json()
    assert js["atoms"][0] == {"point": ["0/1", "1/1"], "weight": "1/2"}
