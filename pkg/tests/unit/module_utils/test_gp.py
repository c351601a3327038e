from __future__ import (absolute_import, division, print_function)
__metaclass__ = type

import numpy as np
import pytest
from scipy.stats import norm

from motionseg.module_utils.common import NumericError
from motionseg.module_utils.gp import (
    GpClassModel,
    add_segment,
    cholesky_factor,
    covariance_matrix,
    kernel_eval,
    predict,
    remove_segment,
    segment_loglik,
)
from motionseg.module_utils.model import KernelParams

KERNEL = KernelParams(theta0=1.0, theta1=1.0, theta2=0.0, theta3=16.0, noise_var=0.1)


@pytest.mark.parametrize('p, q, expected', [
    (0, 0, 1.0),
    (1, 1, 17.0),
    (0, 3, np.exp(-4.5)),
])
def test_kernel_values(p, q, expected):
    assert kernel_eval(p, q, KERNEL) == pytest.approx(expected, rel=1e-12)


def test_kernel_symmetry():
    rng = np.random.default_rng(0)
    p, q = rng.uniform(0, 30, size=(2, 200))
    np.testing.assert_array_equal(kernel_eval(p, q, KERNEL), kernel_eval(q, p, KERNEL))


def test_covariance_single_point():
    np.testing.assert_allclose(covariance_matrix([0], KERNEL), [[1.1]])


def test_covariance_symmetric_noise_on_diagonal_only():
    ts = [0, 1, 2, 5]
    cmat = covariance_matrix(ts, KERNEL)
    np.testing.assert_array_equal(cmat, cmat.T)
    assert cmat[0, 1] == pytest.approx(kernel_eval(0, 1, KERNEL))
    assert cmat[1, 1] == pytest.approx(kernel_eval(1, 1, KERNEL) + 0.1)


def test_covariance_positive_definite_for_distinct_timesteps():
    rng = np.random.default_rng(1)
    for _ in range(20):
        ts = np.sort(rng.choice(40, size=12, replace=False))
        cholesky_factor(covariance_matrix(ts, KERNEL))


def test_factorization_failure_names_minor():
    with pytest.raises(NumericError) as e:
        cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert 'leading minor' in e.value.message


def test_predict_empty_model_is_prior():
    assert predict(GpClassModel(KERNEL, dim=1), 0, 0) == (0.0, 1.0)


def test_predict_single_training_pair():
    model = GpClassModel(KERNEL, dim=1)
    model.add_segment([[2.0]])
    mean, var = predict(model, 0, 0)
    assert mean == pytest.approx(2.0 / 1.1, rel=1e-12)
    assert var == pytest.approx(1.0 - 1.0 / 1.1, rel=1e-12)


def test_posterior_contraction_at_training_input():
    model = GpClassModel(KERNEL, dim=1)
    model.add_segment(np.sin(np.arange(6))[:, None])
    for t in range(6):
        assert predict(model, t, 0)[1] < kernel_eval(t, t, KERNEL)


def _dense_oracle(ts, xs, t_hat, k):
    cmat = kernel_eval(ts[:, None], ts[None, :], k) + k.noise_var * np.eye(ts.size)
    kvec = kernel_eval(ts[:, None], t_hat[None, :], k)
    mean = kvec.T.dot(np.linalg.solve(cmat, xs))
    var = kernel_eval(t_hat, t_hat, k) - np.sum(kvec * np.linalg.solve(cmat, kvec), axis=0)
    return mean, var


def test_predict_matches_dense_solve():
    rng = np.random.default_rng(2)
    for _ in range(100):
        dim = int(rng.integers(1, 4))
        model = GpClassModel(KERNEL, dim=dim, cap=50)
        while model.n_points < 40:
            model.add_segment(rng.uniform(-1, 1, size=(int(rng.integers(1, 7)), dim)))
        ts, xs = model.training_set
        assert ts.size <= 50
        t_hat = np.arange(8, dtype=float)
        mean, var = model.predict_many(t_hat)
        oracle_mean, oracle_var = _dense_oracle(ts, xs, t_hat, KERNEL)
        np.testing.assert_allclose(mean, oracle_mean, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(var, np.maximum(oracle_var, 1e-8), rtol=1e-6, atol=1e-8)


def test_segment_loglik_empty_model_standard_normal():
    model = GpClassModel(KERNEL, dim=1)
    assert segment_loglik(model, [[0.0]]) == pytest.approx(norm.logpdf(0.0))


def test_segment_loglik_prefers_training_shape():
    x = np.linspace(0.2, 1.5, 6)[:, None]
    model = GpClassModel(KERNEL, dim=1)
    model.add_segment(x)
    assert segment_loglik(model, x) > segment_loglik(model, -x)


def test_segment_loglik_sums_over_dimensions():
    rng = np.random.default_rng(3)
    train = rng.normal(size=(5, 2))
    x = rng.normal(size=(4, 2))
    joint = GpClassModel(KERNEL, dim=2)
    joint.add_segment(train)
    parts = []
    for d in range(2):
        single = GpClassModel(KERNEL, dim=1)
        single.add_segment(train[:, [d]])
        parts.append(segment_loglik(single, x[:, [d]]))
    assert segment_loglik(joint, x) == pytest.approx(sum(parts), rel=1e-10)


def test_add_then_remove_restores_loglik_exactly():
    rng = np.random.default_rng(4)
    model = GpClassModel(KERNEL, dim=2)
    model.add_segment(rng.normal(size=(5, 2)))
    probe = rng.normal(size=(4, 2))
    before = segment_loglik(model, probe)
    key = add_segment(model, rng.normal(size=(3, 2)))
    assert segment_loglik(model, probe) != before
    remove_segment(model, key)
    assert segment_loglik(model, probe) == before


def test_training_set_size_and_cap():
    model = GpClassModel(KERNEL, dim=1)
    model.add_segment(np.zeros((5, 1)))
    assert model.training_size == 5
    capped = GpClassModel(KERNEL, dim=1, cap=100, rng=np.random.default_rng(0))
    for _ in range(30):
        capped.add_segment(np.ones((10, 1)))
    assert capped.n_points == 300
    assert capped.training_size == 100


def test_remove_absent_segment_is_an_error():
    model = GpClassModel(KERNEL, dim=1)
    with pytest.raises(KeyError):
        model.remove_segment('never-added')


def test_segment_loglik_independent_of_insertion_order():
    rng = np.random.default_rng(5)
    segments = [rng.normal(size=(int(n), 1)) for n in rng.integers(2, 6, size=4)]
    probe = rng.normal(size=(5, 1))
    forward, backward = GpClassModel(KERNEL, dim=1), GpClassModel(KERNEL, dim=1)
    for x in segments:
        forward.add_segment(x)
    for x in reversed(segments):
        backward.add_segment(x)
    assert segment_loglik(forward, probe) == pytest.approx(segment_loglik(backward, probe), rel=1e-9)


def test_predictive_table_cache_invalidated_by_updates():
    model = GpClassModel(KERNEL, dim=1)
    empty_mean, _ = model.predictive_table(4)
    model.add_segment(np.ones((4, 1)))
    mean, _ = model.predictive_table(4)
    assert not np.allclose(mean, empty_mean)


def test_load_training_set_matches_pooled_model():
    rng = np.random.default_rng(6)
    model = GpClassModel(KERNEL, dim=2)
    model.add_segment(rng.normal(size=(4, 2)))
    model.add_segment(rng.normal(size=(3, 2)))
    stored = model.to_dict()
    frozen = GpClassModel(KERNEL, dim=2)
    frozen.load_training_set(stored['ts'], stored['xs'])
    probe = rng.normal(size=(5, 2))
    assert segment_loglik(frozen, probe) == pytest.approx(segment_loglik(model, probe), rel=1e-12)
