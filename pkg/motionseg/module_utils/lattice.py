# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import numpy as np
from scipy.special import logsumexp

from motionseg.module_utils.common import (
    InfeasibleLatticeError,
    NumericError,
    display,
    normalize_log,
    sample_index,
)


class ForwardLattice:
    """Log-domain forward scores of a semi-Markov chain.

    alpha[t - 1, k - 1, c] is the log mass of every labelled segmentation of
    the prefix [0, t) whose last segment has length k and state c. Entries
    with k > t hold -inf.

    Arguments:
        alpha {ndarray} -- (T, K, S) forward scores
        log_trans {ndarray} -- (S, S) or (T, S, S); [s][c', c] is the log
                               probability of state c for a segment starting
                               at s after a segment in state c'
        log_init {ndarray} -- (S,) log probabilities of the first state
    """

    def __init__(self, alpha, log_trans, log_init):
        self.alpha = alpha
        self.log_trans = log_trans
        self.log_init = log_init

    @property
    def shape(self):
        return self.alpha.shape

    @property
    def length(self):
        return self.alpha.shape[0]

    @property
    def log_total(self):
        """log of the total forward mass at the end of the sequence."""
        return float(logsumexp(self.alpha[-1]))

    def trans_at(self, start):
        if self.log_trans.ndim == 3:
            return self.log_trans[start]
        return self.log_trans


def forward_messages(seg_ll, log_dur, log_trans, log_init, layer='lower'):
    """Fill the forward lattice.

    Arguments:
        seg_ll {ndarray} -- (T, K, S); [s, k - 1, c] log score of the segment
                            [s, s + k) in state c, only read where s + k <= T
        log_dur {ndarray} -- (K,) log duration probabilities of lengths 1..K
        log_trans {ndarray} -- (S, S) or (T, S, S) log transitions
        log_init {ndarray} -- (S,) log initial state probabilities

    Returns:
        ForwardLattice
    """
    seg_ll = np.asarray(seg_ll, dtype=float)
    length, max_len, n_states = seg_ll.shape
    log_trans = np.asarray(log_trans, dtype=float)
    per_start = log_trans.ndim == 3
    alpha = np.full((length, max_len, n_states), -np.inf)
    incoming = np.full((length, n_states), -np.inf)
    incoming[0] = log_init
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        for t in range(1, length + 1):
            kmax = min(max_len, t)
            ks = np.arange(1, kmax + 1)
            starts = t - ks
            alpha[t - 1, :kmax] = (seg_ll[starts, ks - 1]
                                   + log_dur[:kmax, None]
                                   + incoming[starts])
            column = alpha[t - 1]
            if np.any(np.isnan(column)):
                raise NumericError("NaN in %s forward lattice at position %d" % (layer, t))
            if not np.any(np.isfinite(column)):
                raise InfeasibleLatticeError(t, layer=layer)
            if t < length:
                end_mass = logsumexp(column, axis=0)
                trans = log_trans[t] if per_start else log_trans
                incoming[t] = logsumexp(end_mass[:, None] + trans, axis=0)
    display.vvvv("MOTIONSEG-LATTICE-DEBUG: %s lattice %s, log mass %.3f"
                 % (layer, alpha.shape, float(logsumexp(alpha[-1]))))
    return ForwardLattice(alpha, log_trans, np.asarray(log_init, dtype=float))


def _step_weights(lattice, t, following):
    weights = lattice.alpha[t - 1]
    if following is not None:
        weights = weights + lattice.trans_at(t)[:, following][None, :]
    return weights


def step_log_probs(lattice, t, following=None):
    """(K, S) log probabilities with which backward_sample picks the segment
    ending at t, given the state of the segment after it (None at the end)."""
    return normalize_log(_step_weights(lattice, t, following), axis=None)


def backward_sample(lattice, rng):
    """Sample (start, end, state) segments from the posterior, in order.

    The last segment is drawn from alpha at the end of the sequence alone;
    every earlier one is weighted by the transition into its successor.
    """
    n_states = lattice.shape[2]
    t = lattice.length
    following = None
    segments = []
    while t > 0:
        flat = sample_index(rng, _step_weights(lattice, t, following))
        k, state = flat // n_states + 1, flat % n_states
        segments.append((t - k, t, int(state)))
        t -= k
        following = state
    segments.reverse()
    return segments


def path_score(seg_ll, log_dur, log_trans, log_init, segments):
    """Log score of one labelled segmentation under the lattice factors."""
    log_trans = np.asarray(log_trans)
    score = 0.0
    previous = None
    for start, end, state in segments:
        k = end - start
        score += seg_ll[start, k - 1, state] + log_dur[k - 1]
        if previous is None:
            score += log_init[state]
        else:
            trans = log_trans[start] if log_trans.ndim == 3 else log_trans
            score += trans[previous, state]
        previous = state
    return float(score)
