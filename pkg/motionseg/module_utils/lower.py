# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Lower layer: GP-HSMM over continuous trajectories."""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.stats import poisson

from motionseg.module_utils.common import (
    ROLE_BEGIN,
    ROLE_END,
    ROLE_MIDDLE,
    ROLE_SINGLE,
    InfeasibleLatticeError,
    display,
    normalize_log,
)
from motionseg.module_utils.gp import LOG_2PI, GpClassModel
from motionseg.module_utils.lattice import (
    backward_sample as lattice_backward_sample,
    forward_messages,
    path_score,
)
from motionseg.module_utils.model import ElementSegmentation


class DurationModel:
    """Poisson(lam) restricted to lengths 1..max_len and renormalized."""

    def __init__(self, lam, max_len):
        if not lam > 0:
            raise ValueError("Poisson mean must be > 0, got %s" % lam)
        if max_len < 1:
            raise ValueError("Maximum length must be >= 1, got %s" % max_len)
        self.lam = float(lam)
        self.max_len = int(max_len)
        self.log_pmf = normalize_log(poisson.logpmf(np.arange(1, self.max_len + 1), self.lam))

    def __repr__(self):
        return "DurationModel(lam=%s, max_len=%s)" % (self.lam, self.max_len)


def duration_logpmf(k, dur):
    if not 1 <= k <= dur.max_len:
        raise ValueError("Duration %s outside [1, %d]" % (k, dur.max_len))
    return float(dur.log_pmf[k - 1])


class TransitionTable:
    """Dirichlet-smoothed transition counts between consecutive segments.

    Also used by the upper layer for unit-to-unit transitions.
    """

    def __init__(self, n_states, smoothing=0.1):
        self.n_states = n_states
        self.smoothing = smoothing
        self.counts = np.zeros((n_states, n_states))
        self.initial_counts = np.zeros(n_states)

    def add(self, labels, sign=1):
        labels = list(labels)
        if not labels:
            return
        self.initial_counts[labels[0]] += sign
        for prev, cur in zip(labels[:-1], labels[1:]):
            self.counts[prev, cur] += sign

    def remove(self, labels):
        self.add(labels, sign=-1)

    @property
    def n_transitions(self):
        return float(self.counts.sum())

    @property
    def pi(self):
        smoothed = self.counts + self.smoothing
        return smoothed / smoothed.sum(axis=1, keepdims=True)

    @property
    def initial(self):
        smoothed = self.initial_counts + self.smoothing
        return smoothed / smoothed.sum()

    @property
    def log_pi(self):
        return np.log(self.pi)

    @property
    def log_initial(self):
        return np.log(self.initial)

    def to_dict(self):
        return {'counts': self.counts.tolist(), 'initial_counts': self.initial_counts.tolist()}

    def load(self, data):
        self.counts = np.asarray(data['counts'], dtype=float)
        self.initial_counts = np.asarray(data['initial_counts'], dtype=float)
        return self


class ElementPrior:
    """P(c | b) of a motion element given its unit class and role in the unit.

    Arguments:
        begin {ndarray} -- (B, C) distribution of the first element of a unit
        middle {ndarray} -- (B, C, C) [b, c_prev, c] inside a unit
        end {ndarray} -- (B, C, C) [b, c_prev, c] last element of a unit
        single {ndarray} -- (B, C) element forming a unit alone
        uniform {bool} -- when set every context returns 1/C
    """

    def __init__(self, begin, middle, end, single, uniform=False):
        self.begin = begin
        self.middle = middle
        self.end = end
        self.single = single
        self.uniform = uniform

    @classmethod
    def uniform_prior(cls, n_classes, n_units=1):
        flat = np.full((n_units, n_classes), 1.0 / n_classes)
        square = np.full((n_units, n_classes, n_classes), 1.0 / n_classes)
        return cls(flat, square, square.copy(), flat.copy(), uniform=True)

    @property
    def n_classes(self):
        return self.begin.shape[1]

    @property
    def n_units(self):
        return self.begin.shape[0]

    def matrix(self, b, role):
        """(C_prev, C) prior matrix for unit class b and role."""
        b = min(int(b), self.n_units - 1)
        if role == ROLE_BEGIN:
            return np.broadcast_to(self.begin[b], (self.n_classes, self.n_classes))
        if role == ROLE_SINGLE:
            return np.broadcast_to(self.single[b], (self.n_classes, self.n_classes))
        if role == ROLE_END:
            return self.end[b]
        return self.middle[b]

    def first(self, b, role):
        """Prior of a segment with no predecessor in the sequence."""
        b = min(int(b), self.n_units - 1)
        return self.single[b] if role in (ROLE_END, ROLE_SINGLE) else self.begin[b]

    def to_dict(self):
        return {'begin': self.begin.tolist(), 'middle': self.middle.tolist(),
                'end': self.end.tolist(), 'single': self.single.tolist(),
                'uniform': self.uniform}

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data['begin']), np.asarray(data['middle']),
                   np.asarray(data['end']), np.asarray(data['single']),
                   uniform=bool(data['uniform']))


def poe_transitions(trans, prior, context, length):
    """Per-start PoE transition matrices and initial distribution.

    P(c | c', b) is approximated by P(c | c') P(c | b) normalized over c; the
    unit class and role come from the context at the segment's start.

    Returns:
        tuple -- (log_trans (T, C, C), log_init (C,))
    """
    log_pi = trans.log_pi
    log_initial = trans.log_initial
    n_classes = trans.n_states
    if prior is None or prior.uniform or context is None:
        return np.broadcast_to(log_pi, (length, n_classes, n_classes)), log_initial
    b_of_t, role_of_t = context
    cache = {}
    log_trans = np.empty((length, n_classes, n_classes))
    for s in range(length):
        key = (int(b_of_t[s]), int(role_of_t[s]))
        if key not in cache:
            cache[key] = normalize_log(log_pi + np.log(prior.matrix(*key)), axis=1)
        log_trans[s] = cache[key]
    log_init = normalize_log(log_initial + np.log(prior.first(b_of_t[0], role_of_t[0])))
    return log_trans, log_init


def segment_loglik_table(models, samples, max_len):
    """(T, K, C) log-likelihood of every candidate segment under every class.

    Entry [s, k - 1, c] scores samples[s:s + k] under class c; windows that
    run past the end of the series are -inf.
    """
    samples = np.asarray(samples, dtype=float)
    length, dim = samples.shape
    padded = np.concatenate([samples, np.zeros((max_len - 1, dim))], axis=0)
    windows = sliding_window_view(padded, max_len, axis=0)[:length]
    windows = np.moveaxis(windows, -1, 1)
    table = np.empty((length, max_len, len(models)))
    for c, model in enumerate(models):
        mean, var = model.predictive_table(max_len)
        point = -0.5 * (LOG_2PI + np.log(var)[None, :, None]
                        + (windows - mean[None]) ** 2 / var[None, :, None])
        table[:, :, c] = np.cumsum(point.sum(axis=2), axis=1)
    overrun = (np.arange(length)[:, None] + np.arange(1, max_len + 1)[None, :]) > length
    table[overrun] = -np.inf
    return table


class LowerLattice:
    """Forward lattice of one series plus the tables it was built from."""

    def __init__(self, lattice, seg_ll, log_dur):
        self.lattice = lattice
        self.seg_ll = seg_ll
        self.log_dur = log_dur

    @property
    def alpha(self):
        return self.lattice.alpha

    @property
    def log_total(self):
        return self.lattice.log_total

    def score(self, segments):
        return path_score(self.seg_ll, self.log_dur, self.lattice.log_trans,
                          self.lattice.log_init, segments)


def forward_filter(series, gps, trans, dur, prior=None, unit_context=None, seg_ll=None):
    """Forward filtering of one series (log domain).

    Arguments:
        series {TimeSeries} -- observed trajectory
        gps {list} -- one GpClassModel per element class
        trans {TransitionTable} -- element transitions
        dur {DurationModel} -- element durations
        prior {ElementPrior} -- P(c | b); None or uniform skips the PoE factor
        unit_context {tuple} -- (unit class, role) per timestep from the
                                previous alignment
        seg_ll {ndarray} -- precomputed segment log-likelihoods, optional

    Returns:
        LowerLattice
    """
    if seg_ll is None:
        seg_ll = segment_loglik_table(gps, series.samples, dur.max_len)
    log_trans, log_init = poe_transitions(trans, prior, unit_context, series.length)
    try:
        lattice = forward_messages(seg_ll, dur.log_pmf, log_trans, log_init, layer='lower')
    except InfeasibleLatticeError as e:
        raise e.locate(sequence_id=series.id)
    return LowerLattice(lattice, seg_ll, dur.log_pmf)


def backward_sample(lattice, rng, series_id='series'):
    """Sample an ElementSegmentation from a LowerLattice."""
    segments = lattice_backward_sample(lattice.lattice, rng)
    return ElementSegmentation.from_lengths(
        series_id, [end - start for start, end, _ in segments], [c for _, _, c in segments])


def random_segmentation(series, n_classes, mean_length, max_len, rng):
    """Initial segmentation: geometric cut lengths and uniform random classes."""
    lengths = []
    remaining = series.length
    while remaining > 0:
        k = int(min(rng.geometric(1.0 / max(mean_length, 1.0)), max_len, remaining))
        lengths.append(k)
        remaining -= k
    labels = rng.integers(0, n_classes, size=len(lengths))
    return ElementSegmentation.from_lengths(series.id, lengths, labels)


class LowerModel:
    """Collapsed state of the lower layer: GP class models and transitions."""

    def __init__(self, hyperparams, dim, rng):
        self.h = hyperparams
        self.dim = dim
        self.gps = [GpClassModel(hyperparams.kernel, dim, cap=hyperparams.gp_cap,
                                 variance_floor=hyperparams.variance_floor,
                                 rng=np.random.default_rng(rng.integers(2 ** 63)))
                    for _ in range(hyperparams.n_element_classes)]
        self.trans = TransitionTable(hyperparams.n_element_classes, hyperparams.transition_smoothing)
        self.dur = DurationModel(hyperparams.element_duration_mean, hyperparams.max_element_len)
        self.assignments = {}

    @staticmethod
    def _key(series_id, start):
        return '%s@%d' % (series_id, start)

    def add(self, series, segmentation):
        for seg in segmentation.segments:
            self.gps[seg.class_id].add_segment(series.samples[seg.start:seg.end],
                                               key=self._key(series.id, seg.start))
        self.trans.add(segmentation.labels)
        self.assignments[series.id] = segmentation

    def remove(self, series):
        segmentation = self.assignments.pop(series.id, None)
        if segmentation is None:
            return None
        for seg in segmentation.segments:
            self.gps[seg.class_id].remove_segment(self._key(series.id, seg.start))
        self.trans.remove(segmentation.labels)
        return segmentation


def resample_sequence(series, model, rng, prior=None, context=None):
    """Collapsed Gibbs step for one series.

    Removes the series' segments from the GP models and transition counts,
    runs forward filtering and backward sampling against the rest of the
    corpus, and adds the new segments back.

    Returns:
        tuple -- (ElementSegmentation, log score of the sampled path)
    """
    model.remove(series)
    lattice = forward_filter(series, model.gps, model.trans, model.dur,
                             prior=prior, unit_context=context)
    segmentation = backward_sample(lattice, rng, series.id)
    score = lattice.score([(s.start, s.end, s.class_id) for s in segmentation.segments])
    model.add(series, segmentation)
    display.vvv("MOTIONSEG-LOWER-DEBUG: %s -> %d segments, log mass %.2f"
                % (series.id, len(segmentation), lattice.log_total))
    return segmentation, score


__all__ = [
    'DurationModel', 'ElementPrior', 'LowerLattice', 'LowerModel', 'TransitionTable',
    'ROLE_BEGIN', 'ROLE_MIDDLE', 'ROLE_END', 'ROLE_SINGLE',
    'backward_sample', 'duration_logpmf', 'forward_filter',
    'poe_transitions', 'random_segmentation', 'resample_sequence', 'segment_loglik_table',
]
