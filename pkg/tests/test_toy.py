import numpy as np
import pytest

from mqo.toy import attempt_budget, descend, phi, phi_prime, toy_reset_experiment


def test_phi_prime_matches_central_differences():
    t = np.linspace(-0.99, 0.99, 41)
    h = 1e-6
    np.testing.assert_allclose(phi_prime(t), (phi(t + h) - phi(t - h)) / (2 * h), atol=1e-7)


def test_phi_shape():
    assert phi_prime(np.array([-1.0, 0.0, 1.0])).tolist() == [0.0, 0.0, 0.0]
    assert phi(1.0) < phi(-1.0)
    t = np.linspace(-1, 1, 2001)
    assert phi(t).min() == pytest.approx(phi(1.0))
    # ascent away from 0 on both sides, so 0 separates the two basins
    assert np.all(phi_prime(t[(t > 0) & (t < 1)]) < 0)
    assert np.all(phi_prime(t[(t < 0) & (t > -1)]) > 0)


def test_descend_follows_basins():
    out = descend(np.array([[0.3, -0.3, 0.0, 1.0, -1.0]]))
    np.testing.assert_allclose(out, [[1.0, -1.0, 0.0, 1.0, -1.0]], atol=1e-6)


def test_attempt_budget():
    assert attempt_budget(16, 0.05) == 185
    assert attempt_budget(1, 0.5) == 2


def test_single_coordinate_succeeds_quickly():
    # each attempt lands in the right basin with probability 1/2
    r = toy_reset_experiment(1, 0.1, np.random.default_rng(0), trials=50, budget=20)
    assert r.reset_success_rate == 1.0
    assert r.restart_success_rate == 1.0


def test_reset_beats_restart():
    r = toy_reset_experiment(10, 0.05, np.random.default_rng(1), trials=100)
    assert r.reset_success_rate > r.restart_success_rate
    assert r.reset_attempts.max() <= r.budget


def test_bounds_are_enforced():
    with pytest.raises(ValueError):
        toy_reset_experiment(31, 0.1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        toy_reset_experiment(4, 1.5, np.random.default_rng(0))


def test_reproducible():
    a = toy_reset_experiment(6, 0.1, np.random.default_rng(3), trials=20)
    b = toy_reset_experiment(6, 0.1, np.random.default_rng(3), trials=20)
    np.testing.assert_array_equal(a.reset_attempts, b.reset_attempts)
    np.testing.assert_array_equal(a.restart_attempts, b.restart_attempts)
