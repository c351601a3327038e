# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Unit emission models and the element prior they send down.

Three formulations of P(c_{j-k:j} | b):

  ws   -- word segmentation, a unigram over exact element strings
  meu  -- element unigram per unit class
  meb  -- element bigram per unit class

Each mode also keeps positional tables (first element of a unit, transitions
inside a unit, last element of a unit) from which the lower layer's prior
P(c | b) is derived.
"""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from collections import Counter

import numpy as np

from motionseg.module_utils.common import MODES, display
from motionseg.module_utils.lower import ElementPrior
from motionseg.module_utils.model import UnitSegmentation


class EmissionCounts:
    """Sufficient statistics of the upper layer.

    Arguments:
        mode {str} -- one of ws, meu, meb, lower-only
        n_element_classes {int} -- C
        n_unit_classes {int} -- B
        alpha {float} -- Dirichlet parameter of the emissions
        mu {float} -- Dirichlet parameter of the element prior
    """

    def __init__(self, mode, n_element_classes, n_unit_classes, alpha=10.0, mu=0.1):
        if mode not in MODES:
            raise ValueError("Unknown emission mode %s, expected one of %s" % (mode, ", ".join(MODES)))
        self.mode = mode
        self.n_element_classes = n_element_classes
        self.n_unit_classes = n_unit_classes
        self.alpha = alpha
        self.mu = mu
        self.vocabulary = {}
        self.reset()

    @property
    def n_states(self):
        """Number of states of the upper lattice (WS has a single one)."""
        return 1 if self.mode == 'ws' else self.n_unit_classes

    @property
    def n_positional(self):
        return 1 if self.mode == 'ws' else self.n_unit_classes

    def reset(self):
        n_c, n_b, n_p = self.n_element_classes, self.n_unit_classes, self.n_positional
        self.word_counts = Counter()
        self.n_all = 0
        self.n_bc = np.zeros((n_b, n_c))
        self.n_bcc = np.zeros((n_b, n_c, n_c))
        self.count_begin = np.zeros((n_p, n_c))
        self.count_trans = np.zeros((n_p, n_c, n_c))
        self.count_end = np.zeros((n_p, n_c))

    @property
    def n_b(self):
        return self.n_bc.sum(axis=1)

    @property
    def n_bc_prev(self):
        return self.n_bcc.sum(axis=2)

    @property
    def vocabulary_size(self):
        """V: distinct observed element strings plus one unseen-type slot."""
        return sum(1 for n in self.word_counts.values() if n > 0) + 1

    @property
    def n_types(self):
        return self.vocabulary_size - 1

    def word_id(self, sub):
        """Class id of an element string in WS mode (first-seen order)."""
        sub = tuple(int(c) for c in sub)
        if sub not in self.vocabulary:
            self.vocabulary[sub] = len(self.vocabulary)
        return self.vocabulary[sub]

    def add_unit(self, b, sub, sign=1):
        sub = tuple(int(c) for c in sub)
        if not sub:
            raise ValueError("A unit needs at least one element")
        if sign < 0 and self.word_counts[sub] < 1:
            raise KeyError("Unit %s was never added to the counts" % (sub,))
        self.word_counts[sub] += sign
        if self.word_counts[sub] == 0:
            del self.word_counts[sub]
        self.n_all += sign
        if self.mode in ('meu', 'meb'):
            for c in sub:
                self.n_bc[b, c] += sign
            for prev, cur in zip(sub[:-1], sub[1:]):
                self.n_bcc[b, prev, cur] += sign
        p = 0 if self.mode == 'ws' else b
        self.count_begin[p, sub[0]] += sign
        self.count_end[p, sub[-1]] += sign
        for prev, cur in zip(sub[:-1], sub[1:]):
            self.count_trans[p, prev, cur] += sign

    def remove_unit(self, b, sub):
        self.add_unit(b, sub, sign=-1)

    def add_sequence(self, unit_seg, labels, sign=1):
        """Add (or with sign=-1 remove) every unit of one sequence."""
        labels = list(labels)
        for seg in unit_seg.segments:
            self.add_unit(seg.class_id, labels[seg.start:seg.end], sign=sign)

    def remove_sequence(self, unit_seg, labels):
        self.add_sequence(unit_seg, labels, sign=-1)

    def distinct_units(self):
        """Distinct unit types in use: element strings for WS, classes otherwise."""
        if self.mode == 'ws':
            return self.n_types
        return int(np.sum(self.n_b > 0))

    def to_dict(self):
        return {
            'mode': self.mode,
            'word_counts': [[list(sub), int(n)] for sub, n in sorted(self.word_counts.items())],
            'vocabulary': [[list(sub), i] for sub, i in sorted(self.vocabulary.items(), key=lambda x: x[1])],
            'n_bc': self.n_bc.tolist(),
            'n_bcc': self.n_bcc.tolist(),
            'count_begin': self.count_begin.tolist(),
            'count_trans': self.count_trans.tolist(),
            'count_end': self.count_end.tolist(),
        }

    def load(self, data):
        self.word_counts = Counter(dict((tuple(sub), n) for sub, n in data['word_counts']))
        self.n_all = sum(self.word_counts.values())
        self.vocabulary = dict((tuple(sub), i) for sub, i in data['vocabulary'])
        for name in ('n_bc', 'n_bcc', 'count_begin', 'count_trans', 'count_end'):
            setattr(self, name, np.asarray(data[name], dtype=float))
        return self


def ws_emission(sub, counts):
    """(N_sub + alpha) / (N_all + alpha * V)."""
    n_sub = counts.word_counts.get(tuple(int(c) for c in sub), 0)
    return (n_sub + counts.alpha) / (counts.n_all + counts.alpha * counts.vocabulary_size)


def meu_emission(sub, b, counts):
    """Product over elements of (N_bc + alpha) / (N_b + alpha * C)."""
    denom = counts.n_b[b] + counts.alpha * counts.n_element_classes
    prob = 1.0
    for c in sub:
        prob *= (counts.n_bc[b, c] + counts.alpha) / denom
    return prob


def _begin_factor(c, b, counts):
    begin = counts.count_begin[min(b, counts.n_positional - 1)]
    return (begin[c] + counts.alpha) / (begin.sum() + counts.alpha * counts.n_element_classes)


def meb_emission(sub, b, counts):
    """Bigram product inside the unit; a single element gets the begin-position factor."""
    sub = list(sub)
    if not sub:
        raise ValueError("meb_emission needs a non-empty subsequence")
    if len(sub) == 1:
        return _begin_factor(sub[0], b, counts)
    n_prev = counts.n_bc_prev[b]
    prob = 1.0
    for prev, cur in zip(sub[:-1], sub[1:]):
        prob *= ((counts.n_bcc[b, prev, cur] + counts.alpha)
                 / (n_prev[prev] + counts.alpha * counts.n_element_classes))
    return prob


def emission(sub, b, counts):
    if counts.mode == 'ws':
        return ws_emission(sub, counts)
    if counts.mode == 'meu':
        return meu_emission(sub, b, counts)
    if counts.mode == 'meb':
        return meb_emission(sub, b, counts)
    raise ValueError("Mode %s has no unit emissions" % counts.mode)


def log_emission_table(counts, c_seq, max_len):
    """(J, K', S) log emissions of every candidate unit of an element sequence.

    Entry [s, k - 1, b] scores c_seq[s:s + k] under unit state b; windows
    running past the end of the sequence are -inf.
    """
    c_seq = np.asarray(c_seq, dtype=int)
    n_elements = c_seq.size
    n_c = counts.n_element_classes
    alpha = counts.alpha
    table = np.full((n_elements, max_len, counts.n_states), -np.inf)
    ends = np.arange(n_elements)[:, None] + np.arange(1, max_len + 1)[None, :]
    feasible = ends <= n_elements
    if counts.mode == 'ws':
        log_denom = np.log(counts.n_all + alpha * counts.vocabulary_size)
        for s in range(n_elements):
            for k in range(1, min(max_len, n_elements - s) + 1):
                n_sub = counts.word_counts.get(tuple(int(c) for c in c_seq[s:s + k]), 0)
                table[s, k - 1, 0] = np.log(n_sub + alpha) - log_denom
        return table
    starts, ks = np.nonzero(feasible)
    if counts.mode == 'meu':
        log_uni = np.log(counts.n_bc + alpha) - np.log(counts.n_b + alpha * n_c)[:, None]
        per_element = log_uni[:, c_seq].T
        cum = np.vstack([np.zeros((1, counts.n_states)), np.cumsum(per_element, axis=0)])
        table[starts, ks] = cum[starts + ks + 1] - cum[starts]
        return table
    if counts.mode == 'meb':
        log_bi = (np.log(counts.n_bcc + alpha)
                  - np.log(counts.n_bc_prev + alpha * n_c)[:, :, None])
        begin = counts.count_begin
        log_begin = np.log(begin + alpha) - np.log(begin.sum(axis=1) + alpha * n_c)[:, None]
        pair = np.zeros((n_elements, counts.n_states))
        if n_elements > 1:
            pair[1:] = log_bi[:, c_seq[:-1], c_seq[1:]].T
        cum = np.vstack([np.zeros((1, counts.n_states)), np.cumsum(pair, axis=0)])
        single = ks == 0
        table[starts[single], 0] = log_begin[:, c_seq[starts[single]]].T
        multi = ~single
        s, k = starts[multi], ks[multi] + 1
        table[s, k - 1] = cum[s + k] - cum[s + 1]
        return table
    raise ValueError("Mode %s has no unit emissions" % counts.mode)


def element_prior(counts, mode=None):
    """Derive the lower layer's prior P(c | b) from the positional tables.

    Every context is a mu-smoothed multinomial over c. The end context
    multiplies the within-unit transition and end-position factors; the
    single-element context multiplies the begin and end factors. Both are
    renormalized over c. WS tables carry no unit index, so the prior is the
    same for every b.
    """
    mode = mode or counts.mode
    if mode == 'lower-only':
        return ElementPrior.uniform_prior(counts.n_element_classes, counts.n_positional)
    mu = counts.mu

    def _norm(x):
        return x / x.sum(axis=-1, keepdims=True)

    begin = _norm(counts.count_begin + mu)
    end_factor = counts.count_end + mu
    middle = _norm(counts.count_trans + mu)
    end = _norm((counts.count_trans + mu) * end_factor[:, None, :])
    single = _norm((counts.count_begin + mu) * end_factor)
    return ElementPrior(begin, middle, end, single, uniform=False)


def update_counts(counts, unit_segs, elem_segs):
    """Rebuild every table from scratch.

    Arguments:
        counts {EmissionCounts} -- tables to rebuild, modified in place
        unit_segs {list} -- UnitSegmentation per sequence (or a single one)
        elem_segs {list} -- ElementSegmentation per sequence (or a single one)

    Raises:
        DataError: a unit segmentation does not tile its element sequence
    """
    if isinstance(unit_segs, UnitSegmentation):
        unit_segs, elem_segs = [unit_segs], [elem_segs]
    counts.reset()
    for unit_seg, elem_seg in zip(unit_segs, elem_segs):
        unit_seg.check(len(elem_seg))
        counts.add_sequence(unit_seg, elem_seg.labels)
    display.vvvv("MOTIONSEG-EMISSION-DEBUG: rebuilt %s counts over %d units"
                 % (counts.mode, counts.n_all))
    return counts
