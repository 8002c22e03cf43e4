import numpy as np
import pytest

import stiefel_kn as sk


def test_random_point_is_orthonormal():
    x = sk.random_point(8, 3, seed=1)
    assert x.shape == (8, 3)
    assert sk.orthonormality_defect(x) < 1e-12


def test_map_round_trips():
    x = sk.random_point(10, 4, seed=2)
    q = sk.generate_samples(x, 0.05, 1, seed=3)[0]
    v = sk.orthographic_lifting(x, q)
    assert sk.tangency_defect(x, v) < 1e-12
    assert np.linalg.norm(sk.orthographic_retraction(x, v) - q) < 1e-9
    w = sk.polar_lifting(x, q)
    assert np.linalg.norm(sk.polar_retraction(x, w) - q) < 1e-9
    assert 0.0 < sk.composition_discrepancy(x, q) < sk.discrepancy(x, q)


def test_mean_of_samples():
    c = sk.random_point(12, 3, seed=4)
    samples = sk.generate_samples(c, 0.1, 20, seed=5)
    for pair in ("mixed", "ortho", "polar"):
        r = sk.fixed_point_mean(samples, samples[0], pair=pair, center=c)
        assert r["converged"]
        assert r["residual_field_norm"] < 1e-9
        assert len(r["delta_to_center"]) == r["iterations_used"] + 1
        assert sk.orthonormality_defect(r["final_point"]) < 1e-9


def test_unit_weights_match_unweighted():
    c = sk.random_point(6, 2, seed=6)
    samples = sk.generate_samples(c, 0.1, 5, seed=7)
    a = sk.fixed_point_mean(samples, samples[1])
    b = sk.fixed_point_mean(samples, samples[1], weights=[1.0] * 5)
    assert a["step_sizes"] == b["step_sizes"]
    assert np.array_equal(a["final_point"], b["final_point"])


def test_errors_map_to_python_exceptions():
    x = sk.random_point(4, 2, seed=8)
    with pytest.raises(sk.NotOnManifoldError):
        sk.polar_lifting(2.0 * x, x)
    with pytest.raises(sk.UnsupportedPairError):
        sk.fixed_point_mean([x], x, pair="ortho-polar")
    with pytest.raises(sk.DomainError):
        sk.spd_inv_sqrt(-np.eye(2))
    assert issubclass(sk.AveragingDomainError, sk.DomainError)
    assert issubclass(sk.DomainError, sk.Error)
