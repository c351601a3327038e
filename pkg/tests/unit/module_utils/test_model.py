from __future__ import (absolute_import, division, print_function)
__metaclass__ = type

import json

import numpy as np
import pytest

from motionseg.module_utils.common import (
    ROLE_BEGIN,
    ROLE_END,
    ROLE_MIDDLE,
    ROLE_SINGLE,
    ConfigError,
    DataError,
)
from motionseg.module_utils.model import (
    ElementSegment,
    ElementSegmentation,
    Hyperparams,
    KernelParams,
    TimeSeries,
    UnitSegmentation,
    element_roles,
    hyperparams_from_params,
    unit_context,
    validate_hyperparams,
)


def test_large_model_hyperparams_accepted():
    h = Hyperparams(n_element_classes=12, n_unit_classes=8, alpha=10.0, mu=0.1)
    assert validate_hyperparams(h) is h


@pytest.mark.parametrize('kwargs, needle', [
    (dict(n_element_classes=0), 'C must be >= 1'),
    (dict(n_unit_classes=0), 'B must be >= 1'),
    (dict(max_element_len=0), 'K must be >= 1'),
    (dict(lambda_p=-1.0), 'lambda_p must be > 0'),
    (dict(lambda_b=0.0), 'lambda_b must be > 0'),
    (dict(alpha=0.0), 'alpha must be > 0'),
    (dict(mu=-0.1), 'mu must be > 0'),
    (dict(kernel=KernelParams(noise_var=0.0)), 'noise_var must be > 0'),
    (dict(kernel=KernelParams(theta1=-1.0)), 'theta1 must be >= 0'),
])
def test_invalid_hyperparams(kwargs, needle):
    with pytest.raises(ConfigError) as e:
        validate_hyperparams(Hyperparams(**kwargs))
    assert needle in e.value.message


def test_invalid_hyperparams_lists_every_field():
    with pytest.raises(ConfigError) as e:
        validate_hyperparams(Hyperparams(n_element_classes=0, lambda_p=-1.0))
    assert len(e.value.details['fields']) == 2


def test_duration_means_default_to_half_the_maximum():
    h = Hyperparams(max_element_len=50, max_unit_len=10)
    assert h.element_duration_mean == 25.0
    assert h.unit_duration_mean == 5.0
    assert Hyperparams(lambda_p=7.0).element_duration_mean == 7.0


def test_hyperparams_from_params():
    h = hyperparams_from_params({'c': 5, 'n_unit_classes': 3, 'kernel': {'noise_var': 0.2},
                                 'iterations': 2})
    assert h.n_element_classes == 5
    assert h.n_unit_classes == 3
    assert h.kernel == KernelParams(noise_var=0.2)
    assert h.iterations == 2
    assert h.alpha == 10.0
    assert h.lambda_p is None


def test_hyperparams_from_params_round_trips_through_to_params():
    h = Hyperparams(n_element_classes=4, lambda_b=2.0, kernel=KernelParams(theta3=4.0))
    assert hyperparams_from_params(h.to_params()) == h


def test_hyperparams_from_params_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        hyperparams_from_params({'n_element_clases': 3})


def test_time_series_shape_and_duration():
    s = TimeSeries('a', np.zeros((150, 6)), rate_hz=5.0)
    assert (s.length, s.dim, s.duration) == (150, 6, 30.0)
    assert TimeSeries('b', [1.0, 2.0]).dim == 1
    with pytest.raises(ValueError):
        s.samples[0, 0] = 1.0


def test_time_series_rejects_non_finite():
    samples = np.zeros((4, 2))
    samples[2, 1] = np.nan
    with pytest.raises(DataError) as e:
        TimeSeries('a', samples)
    assert 'row 2, column 1' in e.value.message


def test_time_series_rejects_empty():
    with pytest.raises(DataError):
        TimeSeries('a', np.zeros((0, 3)))


def test_element_segmentation_serialization_is_exact():
    seg = ElementSegmentation.from_lengths('s', [3, 1, 4], [2, 0, 2])
    text = json.dumps(seg.to_dict())
    assert ElementSegmentation.from_dict(json.loads(text)) == seg
    assert seg.labels == [2, 0, 2]
    assert seg.per_sample_labels().tolist() == [2, 2, 2, 0, 2, 2, 2, 2]


def test_element_segmentation_covers_every_sample_once():
    seg = ElementSegmentation.from_lengths('s', [2, 5, 1], [0, 1, 0]).check(8, max_len=5)
    covered = sorted(i for s in seg.segments for i in range(s.start, s.end))
    assert covered == list(range(8))


@pytest.mark.parametrize('segments, length, max_len', [
    ([ElementSegment(0, 2, 0), ElementSegment(3, 5, 0)], 5, None),
    ([ElementSegment(0, 2, 0)], 5, None),
    ([ElementSegment(0, 6, 0)], 6, 5),
    ([ElementSegment(1, 3, 0)], 3, None),
])
def test_element_segmentation_tiling_violations(segments, length, max_len):
    with pytest.raises(DataError):
        ElementSegmentation('s', segments).check(length, max_len)


def test_element_roles():
    units = UnitSegmentation.from_lengths('s', [3, 1, 2], [1, 0, 2])
    classes, roles = element_roles(units)
    assert classes.tolist() == [1, 1, 1, 0, 2, 2]
    assert roles.tolist() == [ROLE_BEGIN, ROLE_MIDDLE, ROLE_END, ROLE_SINGLE, ROLE_BEGIN, ROLE_END]


def test_unit_context_maps_alignment_onto_timesteps():
    elems = ElementSegmentation.from_lengths('s', [2, 3, 1], [0, 1, 2])
    units = UnitSegmentation.from_lengths('s', [2, 1], [4, 5])
    b_of_t, role_of_t = unit_context(elems, units, 6)
    assert b_of_t.tolist() == [4, 4, 4, 4, 4, 5]
    assert role_of_t.tolist() == [ROLE_BEGIN] * 2 + [ROLE_END] * 3 + [ROLE_SINGLE]
    assert unit_context(elems, None, 6) is None
