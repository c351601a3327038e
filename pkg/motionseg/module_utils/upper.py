# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Upper layer: HSMM over the discrete motion element sequence."""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from motionseg.module_utils.common import InfeasibleLatticeError, display
from motionseg.module_utils.emission import EmissionCounts, log_emission_table
from motionseg.module_utils.lattice import backward_sample, forward_messages, path_score
from motionseg.module_utils.lower import DurationModel, TransitionTable
from motionseg.module_utils.model import UnitSegmentation


class UnitTransitionTable(TransitionTable):
    """P(b | b') and initial[b] from Dirichlet-smoothed counts."""


class UnitForwardLattice:
    """Forward lattice over element indices, J x K' x S."""

    def __init__(self, lattice, em_ll, log_dur):
        self.lattice = lattice
        self.em_ll = em_ll
        self.log_dur = log_dur

    @property
    def alpha(self):
        return self.lattice.alpha

    @property
    def log_total(self):
        return self.lattice.log_total

    def score(self, segments):
        return path_score(self.em_ll, self.log_dur, self.lattice.log_trans,
                          self.lattice.log_init, segments)


def unit_forward_filter(c_seq, em, trans, dur, series_id=None):
    """Forward filtering of an element class sequence.

    Arguments:
        c_seq {list} -- element class per element
        em {EmissionCounts} -- emission counts, excluding this sequence
        trans {UnitTransitionTable} -- unit transitions
        dur {DurationModel} -- unit durations, lengths 1..K'

    Returns:
        UnitForwardLattice
    """
    em_ll = log_emission_table(em, c_seq, dur.max_len)
    try:
        lattice = forward_messages(em_ll, dur.log_pmf, trans.log_pi, trans.log_initial,
                                   layer='upper')
    except InfeasibleLatticeError as e:
        raise e.locate(sequence_id=series_id)
    return UnitForwardLattice(lattice, em_ll, dur.log_pmf)


def unit_backward_sample(lattice, rng, series_id='series', em=None, c_seq=None):
    """Sample a UnitSegmentation from a UnitForwardLattice.

    In WS mode the lattice has a single state; the class id of a sampled unit
    is then the id of its element string in the counts' vocabulary.
    """
    segments = backward_sample(lattice.lattice, rng)
    lengths = [end - start for start, end, _ in segments]
    if em is not None and em.mode == 'ws':
        labels = [em.word_id(c_seq[start:end]) for start, end, _ in segments]
    else:
        labels = [state for _, _, state in segments]
    return UnitSegmentation.from_lengths(series_id, lengths, labels), segments


class UpperModel:
    """Collapsed state of the upper layer."""

    def __init__(self, hyperparams, mode):
        self.h = hyperparams
        self.mode = mode
        self.counts = EmissionCounts(mode, hyperparams.n_element_classes,
                                     hyperparams.n_unit_classes,
                                     alpha=hyperparams.alpha, mu=hyperparams.mu)
        self.trans = UnitTransitionTable(self.counts.n_states, hyperparams.transition_smoothing)
        self.dur = DurationModel(hyperparams.unit_duration_mean, hyperparams.max_unit_len)
        self.assignments = {}

    def states(self, unit_seg):
        if self.mode == 'ws':
            return [0] * len(unit_seg)
        return unit_seg.labels

    def add(self, series_id, unit_seg, labels):
        labels = list(labels)
        self.counts.add_sequence(unit_seg, labels)
        self.trans.add(self.states(unit_seg))
        self.assignments[series_id] = (unit_seg, labels)

    def remove(self, series_id):
        previous = self.assignments.pop(series_id, None)
        if previous is None:
            return None
        unit_seg, labels = previous
        self.counts.remove_sequence(unit_seg, labels)
        self.trans.remove(self.states(unit_seg))
        return unit_seg

    def segmentation(self, series_id):
        previous = self.assignments.get(series_id)
        return previous[0] if previous else None


def resample_unit_sequence(series_id, c_seq, model, rng):
    """Collapsed Gibbs step of the upper layer for one sequence.

    Returns:
        tuple -- (UnitSegmentation, log score of the sampled path)
    """
    c_seq = list(c_seq)
    model.remove(series_id)
    lattice = unit_forward_filter(c_seq, model.counts, model.trans, model.dur, series_id=series_id)
    unit_seg, segments = unit_backward_sample(lattice, rng, series_id, em=model.counts, c_seq=c_seq)
    score = lattice.score(segments)
    model.add(series_id, unit_seg, c_seq)
    display.vvv("MOTIONSEG-UPPER-DEBUG: %s -> %d units over %d elements"
                % (series_id, len(unit_seg), len(c_seq)))
    return unit_seg, score
