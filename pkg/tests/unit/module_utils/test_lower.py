from __future__ import (absolute_import, division, print_function)
__metaclass__ = type

from collections import Counter

import numpy as np
import pytest

from brute_force import frequencies_match, posterior, random_log_dist, sampler_matches_posterior
from motionseg.module_utils.common import (
    ROLE_BEGIN,
    ROLE_END,
    ROLE_MIDDLE,
    ROLE_SINGLE,
    InfeasibleLatticeError,
    make_rng,
)
from motionseg.module_utils.gp import GpClassModel, segment_loglik
from motionseg.module_utils.lattice import backward_sample, forward_messages, path_score
from motionseg.module_utils.lower import (
    DurationModel,
    ElementPrior,
    LowerModel,
    TransitionTable,
    duration_logpmf,
    forward_filter,
    poe_transitions,
    random_segmentation,
    resample_sequence,
    segment_loglik_table,
)
from motionseg.module_utils.model import Hyperparams, TimeSeries


def test_duration_peaks_at_mean():
    dur = DurationModel(4, 10)
    assert duration_logpmf(4, dur) > duration_logpmf(1, dur)
    assert np.exp(dur.log_pmf).sum() == pytest.approx(1.0)


def test_duration_single_length():
    assert duration_logpmf(1, DurationModel(25, 1)) == pytest.approx(0.0)


@pytest.mark.parametrize('k', [0, 11])
def test_duration_outside_support(k):
    with pytest.raises(ValueError):
        duration_logpmf(k, DurationModel(4, 10))


def test_duration_rejects_bad_parameters():
    with pytest.raises(ValueError):
        DurationModel(0, 5)
    with pytest.raises(ValueError):
        DurationModel(2, 0)


def test_transition_rows_are_distributions():
    trans = TransitionTable(3)
    trans.add([0, 1, 1, 2, 0])
    trans.add([2, 2])
    np.testing.assert_allclose(trans.pi.sum(axis=1), np.ones(3))
    assert trans.initial.sum() == pytest.approx(1.0)
    assert trans.pi[1, 1] > trans.pi[1, 0]
    trans.remove([2, 2])
    assert trans.n_transitions == 4


def _random_instance(rng, length, max_len, n_states):
    seg_ll = rng.normal(scale=2.0, size=(length, max_len, n_states))
    log_dur = random_log_dist(rng, max_len)
    log_trans = random_log_dist(rng, length, n_states, n_states)
    log_init = random_log_dist(rng, n_states)
    return seg_ll, log_dur, log_trans, log_init


GRID = [(length, max_len, n_states)
        for length in range(1, 7) for max_len in range(1, 4) for n_states in range(1, 3)]


@pytest.mark.parametrize('length, max_len, n_states', GRID)
def test_lattice_matches_enumeration(length, max_len, n_states):
    rng = np.random.default_rng(100 * length + 10 * max_len + n_states)
    seg_ll, log_dur, log_trans, log_init = _random_instance(rng, length, max_len, n_states)
    paths, scores, log_total = posterior(seg_ll, log_dur, log_trans, log_init, max_len)
    lattice = forward_messages(seg_ll, log_dur, log_trans, log_init)
    assert lattice.log_total == pytest.approx(log_total, rel=1e-9, abs=1e-9)
    assert sampler_matches_posterior(lattice, paths, scores, log_total)


def test_forward_mass_with_shared_transitions():
    rng = np.random.default_rng(1)
    seg_ll, log_dur, _, log_init = _random_instance(rng, 5, 3, 2)
    log_trans = random_log_dist(rng, 2, 2)
    paths, scores, log_total = posterior(seg_ll, log_dur, log_trans, log_init, 3)
    lattice = forward_messages(seg_ll, log_dur, log_trans, log_init)
    assert lattice.log_total == pytest.approx(log_total)
    assert sampler_matches_posterior(lattice, paths, scores, log_total)


def test_lattice_with_million_nat_likelihoods():
    rng = np.random.default_rng(5)
    seg_ll, log_dur, log_trans, log_init = _random_instance(rng, 6, 3, 2)
    seg_ll = seg_ll - 1e6 * np.arange(1, 4)[None, :, None]
    paths, scores, log_total = posterior(seg_ll, log_dur, log_trans, log_init, 3)
    lattice = forward_messages(seg_ll, log_dur, log_trans, log_init)
    assert np.isfinite(lattice.log_total)
    assert lattice.log_total < -5e6
    assert lattice.log_total == pytest.approx(log_total, rel=1e-12)
    assert sampler_matches_posterior(lattice, paths, scores, log_total, atol=1e-7)
    segments = backward_sample(lattice, make_rng(0))
    assert segments[-1][1] == 6


def test_backward_sampling_follows_posterior():
    rng = np.random.default_rng(2)
    seg_ll, log_dur, log_trans, log_init = _random_instance(rng, 3, 3, 1)
    paths, scores, log_total = posterior(seg_ll, log_dur, log_trans, log_init, 3)
    assert len(paths) == 4
    probs = dict(zip(paths, np.exp(scores - log_total)))
    lattice = forward_messages(seg_ll, log_dur, log_trans, log_init)
    n_draws = 100000
    draw_rng = make_rng(7)
    counts = Counter(tuple(backward_sample(lattice, draw_rng)) for _ in range(n_draws))
    assert set(counts) <= set(paths)
    assert frequencies_match(counts, probs, n_draws)


def test_path_score_matches_enumeration():
    rng = np.random.default_rng(4)
    seg_ll, log_dur, log_trans, log_init = _random_instance(rng, 4, 2, 2)
    paths, scores, _ = posterior(seg_ll, log_dur, log_trans, log_init, 2)
    for path, expected in zip(paths, scores):
        assert path_score(seg_ll, log_dur, log_trans, log_init, path) == pytest.approx(expected)


def test_single_sample_series():
    lattice = forward_messages(np.zeros((1, 3, 2)), np.log([1.0, 1e-3, 1e-3]),
                               np.log(np.full((2, 2), 0.5)), np.log([0.5, 0.5]))
    segments = backward_sample(lattice, make_rng(0))
    assert len(segments) == 1
    assert segments[0][:2] == (0, 1)


def test_single_feasible_path_is_always_sampled():
    seg_ll = np.full((3, 2, 1), -np.inf)
    seg_ll[0, 0, 0] = -1.0
    seg_ll[0, 1, 0] = -0.5
    seg_ll[1, 1, 0] = -2.0
    lattice = forward_messages(seg_ll, np.log([0.5, 0.5]), np.zeros((1, 1)), np.zeros(1))
    rng = make_rng(0)
    for _ in range(20):
        assert backward_sample(lattice, rng) == [(0, 1, 0), (1, 3, 0)]


def test_infeasible_lattice_reports_position():
    seg_ll = np.zeros((5, 2, 1))
    seg_ll[:, :, 0] = -np.inf
    with pytest.raises(InfeasibleLatticeError) as e:
        forward_messages(seg_ll, np.log([0.5, 0.5]), np.zeros((1, 1)), np.zeros(1))
    assert e.value.position == 1


def test_sampling_is_deterministic_given_seed():
    rng = np.random.default_rng(5)
    lattice = forward_messages(*_random_instance(rng, 12, 4, 3))
    assert backward_sample(lattice, make_rng(3, 1)) == backward_sample(lattice, make_rng(3, 1))


def test_uniform_prior_leaves_transitions_unchanged():
    trans = TransitionTable(3)
    trans.add([0, 1, 2, 2])
    context = (np.zeros(6, dtype=int), np.full(6, ROLE_MIDDLE))
    log_trans, log_init = poe_transitions(trans, ElementPrior.uniform_prior(3, 2), context, 6)
    for s in range(6):
        np.testing.assert_allclose(log_trans[s], trans.log_pi)
    np.testing.assert_allclose(log_init, trans.log_initial)
    none_trans, _ = poe_transitions(trans, None, None, 6)
    np.testing.assert_allclose(none_trans, log_trans)


def test_product_of_experts_rows_normalized():
    rng = np.random.default_rng(6)
    n_units, n_classes = 2, 3

    def dist(*shape):
        return np.exp(random_log_dist(rng, *shape))

    prior = ElementPrior(dist(n_units, n_classes), dist(n_units, n_classes, n_classes),
                         dist(n_units, n_classes, n_classes), dist(n_units, n_classes))
    trans = TransitionTable(n_classes)
    trans.add([0, 0, 1, 2, 1])
    roles = np.array([ROLE_BEGIN, ROLE_MIDDLE, ROLE_END, ROLE_SINGLE, ROLE_BEGIN])
    units = np.array([0, 0, 0, 1, 1])
    log_trans, log_init = poe_transitions(trans, prior, (units, roles), 5)
    np.testing.assert_allclose(np.exp(log_trans).sum(axis=2), np.ones((5, n_classes)))
    assert np.exp(log_init).sum() == pytest.approx(1.0)
    expected = trans.pi[2] * prior.end[0][2]
    np.testing.assert_allclose(np.exp(log_trans[2][2]), expected / expected.sum())
    expected = trans.pi[0] * prior.begin[1]
    np.testing.assert_allclose(np.exp(log_trans[4][0]), expected / expected.sum())


def test_segment_loglik_table_matches_direct_evaluation():
    rng = np.random.default_rng(7)
    models = []
    for _ in range(2):
        model = GpClassModel(dim=2)
        model.add_segment(rng.normal(size=(4, 2)))
        models.append(model)
    samples = rng.normal(size=(7, 2))
    table = segment_loglik_table(models, samples, 3)
    assert table.shape == (7, 3, 2)
    for s in range(7):
        for k in range(1, 4):
            for c in range(2):
                if s + k > 7:
                    assert table[s, k - 1, c] == -np.inf
                else:
                    assert table[s, k - 1, c] == pytest.approx(
                        segment_loglik(models[c], samples[s:s + k]), rel=1e-10)


def test_random_segmentation_tiles_series():
    series = TimeSeries('s', np.zeros((37, 1)))
    seg = random_segmentation(series, 4, 5.0, 6, make_rng(0))
    seg.check(37, max_len=6)
    assert set(seg.labels) <= set(range(4))


def _toy_corpus(rng, n_series=3, length=18):
    return [TimeSeries('s%d' % i, rng.normal(size=(length, 2))) for i in range(n_series)]


def _loaded_model(corpus, seed=0):
    h = Hyperparams(n_element_classes=3, max_element_len=4, gp_cap=60)
    model = LowerModel(h, 2, make_rng(seed))
    init = make_rng(seed, 1)
    for series in corpus:
        model.add(series, random_segmentation(series, 3, h.element_duration_mean, 4, init))
    return model


def test_resample_sequence_conserves_counts():
    corpus = _toy_corpus(np.random.default_rng(8))
    model = _loaded_model(corpus)
    rng = make_rng(0, 1, 0)
    for series in corpus:
        seg, score = resample_sequence(series, model, rng)
        seg.check(series.length, max_len=4)
        assert np.isfinite(score)
    assert sum(gp.n_points for gp in model.gps) == sum(s.length for s in corpus)
    n_segments = sum(len(seg) for seg in model.assignments.values())
    assert sum(len(gp) for gp in model.gps) == n_segments
    assert model.trans.n_transitions == n_segments - len(corpus)
    assert model.trans.initial_counts.sum() == len(corpus)


def test_resample_sequence_is_deterministic():
    corpus = _toy_corpus(np.random.default_rng(9))
    results = []
    for _ in range(2):
        model = _loaded_model(corpus, seed=4)
        rng = make_rng(4, 1, 0)
        results.append([resample_sequence(series, model, rng)[0] for series in corpus])
    assert results[0] == results[1]


def test_forward_filter_locates_infeasible_series():
    series = TimeSeries('w1-c01', np.zeros((5, 1)))
    gps = [GpClassModel(dim=1)]
    seg_ll = np.full((5, 2, 1), -np.inf)
    with pytest.raises(InfeasibleLatticeError) as e:
        forward_filter(series, gps, TransitionTable(1), DurationModel(1, 2), seg_ll=seg_ll)
    assert 'w1-c01' in e.value.message
