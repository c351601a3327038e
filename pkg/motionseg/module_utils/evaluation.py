# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Scoring of estimated segmentations against ground truth."""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import numpy as np
import pandas as pd
from scipy.optimize import linear_sum_assignment

from motionseg.module_utils.common import DataError, display

CLASS_MAPPINGS = ['greedy', 'hungarian']
HISTOGRAM_BINS = 10


def levenshtein(a, b):
    """Minimum number of insertions, deletions and substitutions turning a into b."""
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        current = [i]
        for j, y in enumerate(b, 1):
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + (x != y)))
        previous = current
    return previous[-1]


def nld(a, b):
    """Levenshtein distance over the longer length; 0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / float(longest)


def overlap_matrix(est, truth):
    """Co-occurrence counts of estimated and true labels over aligned positions.

    Arguments:
        est {list} -- per-position label sequences (one per series)
        truth {list} -- true label sequences, aligned with est

    Returns:
        tuple -- (est label list, truth label list, counts matrix)
    """
    pairs = []
    for e, t in zip(est, truth):
        e, t = np.asarray(e), np.asarray(t)
        if e.shape != t.shape:
            raise DataError("Estimated and true label sequences differ in length (%d vs %d)"
                            % (e.size, t.size))
        pairs.append(np.stack([e, t], axis=1))
    if not pairs or sum(len(p) for p in pairs) == 0:
        return [], [], np.zeros((0, 0), dtype=int)
    pairs = np.concatenate(pairs, axis=0)
    est_labels = sorted(set(pairs[:, 0].tolist()))
    truth_labels = sorted(set(pairs[:, 1].tolist()))
    table = pd.crosstab(pd.Series(pairs[:, 0]), pd.Series(pairs[:, 1]))
    table = table.reindex(index=est_labels, columns=truth_labels, fill_value=0)
    return est_labels, truth_labels, table.to_numpy()


def unmatched_label(est_label):
    return -(1 + int(est_label))


def class_mapping(est, truth, method='greedy'):
    """Map estimated class ids to truth labels.

    greedy maps every estimated class to the truth label it overlaps most
    (many-to-one). hungarian finds the one-to-one assignment maximizing the
    total overlap; estimated classes left over map to -(1 + id), which
    matches no truth label. Ties go to the smallest truth label.
    """
    if method not in CLASS_MAPPINGS:
        raise ValueError("Unknown class mapping %s" % method)
    est_labels, truth_labels, counts = overlap_matrix(est, truth)
    if not est_labels:
        return {}
    if method == 'greedy':
        return dict((e, truth_labels[int(np.argmax(counts[i]))]) for i, e in enumerate(est_labels))
    mapping = dict((e, unmatched_label(e)) for e in est_labels)
    rows, cols = linear_sum_assignment(-counts)
    for r, c in zip(rows, cols):
        mapping[est_labels[r]] = truth_labels[c]
    return mapping


def map_classes(est, truth, method='greedy', mapping=None):
    """Relabel est with the class mapping learned against truth.

    est and truth are either two aligned label sequences or two lists of them.
    """
    single = len(est) > 0 and np.isscalar(est[0])
    if single:
        est, truth = [est], [truth]
    if mapping is None:
        mapping = class_mapping(est, truth, method)
    mapped = [[mapping.get(c, c) for c in seq] for seq in est]
    return mapped[0] if single else mapped


def _segment_labels(elem_seg, mapping):
    return [mapping.get(c, c) for c in elem_seg.labels]


def _unit_per_sample(elem_seg, unit_seg):
    labels = unit_seg.element_labels()
    out = np.empty(elem_seg.total_length, dtype=int)
    for seg, b in zip(elem_seg.segments, labels):
        out[seg.start:seg.end] = b
    return out


def evaluate(estimated, truth, method='greedy'):
    """Element and unit NLD of an estimated corpus segmentation.

    Class mappings are learned from per-sample overlap over the whole corpus.
    NLD is then computed per sequence on per-segment label sequences (one
    label per element, one per unit) and averaged.

    Arguments:
        estimated {dict} -- series id -> (ElementSegmentation, UnitSegmentation or None)
        truth {dict} -- same layout, ground truth

    Returns:
        dict
    """
    ids = [sid for sid in truth if sid in estimated]
    if not ids:
        raise DataError("No sequence ids in common between estimate and truth")
    skipped = [sid for sid in truth if sid not in estimated]
    if skipped:
        display.warning("%d truth sequences have no estimate" % len(skipped))
    for sid in ids:
        if estimated[sid][0].total_length != truth[sid][0].total_length:
            raise DataError("Sequence %s has %d samples in the estimate and %d in the truth"
                            % (sid, estimated[sid][0].total_length, truth[sid][0].total_length))
    elem_map = class_mapping([estimated[s][0].per_sample_labels() for s in ids],
                             [truth[s][0].per_sample_labels() for s in ids], method)
    element_nlds = [nld(_segment_labels(estimated[s][0], elem_map), truth[s][0].labels)
                    for s in ids]
    result = {
        'n_sequences': len(ids),
        'element_nld': float(np.mean(element_nlds)),
        'element_nlds': [float(x) for x in element_nlds],
        'distinct_elements': len(set(c for s in ids for c in estimated[s][0].labels)),
        'element_mapping': dict((str(k), int(v)) for k, v in elem_map.items()),
        'unit_nld': None,
        'unit_nlds': [],
        'distinct_units': 0,
        'unit_mapping': {},
    }
    unit_ids = [s for s in ids if estimated[s][1] is not None and truth[s][1] is not None]
    if unit_ids:
        unit_map = class_mapping([_unit_per_sample(*estimated[s]) for s in unit_ids],
                                 [_unit_per_sample(*truth[s]) for s in unit_ids], method)
        unit_nlds = [nld([unit_map.get(b, b) for b in estimated[s][1].labels], truth[s][1].labels)
                     for s in unit_ids]
        result.update({
            'unit_nld': float(np.mean(unit_nlds)),
            'unit_nlds': [float(x) for x in unit_nlds],
            'distinct_units': len(set(b for s in unit_ids for b in estimated[s][1].labels)),
            'unit_mapping': dict((str(k), int(v)) for k, v in unit_map.items()),
        })
    return result


def histogram(values, bins=HISTOGRAM_BINS):
    """Counts of NLD values over equal-width bins covering [0, 1]."""
    counts, edges = np.histogram(np.clip(values, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    return {'edges': edges.tolist(), 'counts': counts.tolist()}


def report(results, bins=HISTOGRAM_BINS):
    """Comparison table and histogram data of several methods.

    Arguments:
        results {list} -- one dict per trial with keys method, seed, loglik,
                          element_nld, unit_nld, distinct_units

    Returns:
        dict -- table (DataFrame, one row per method, best-likelihood trial),
                trials (DataFrame of every trial), histograms per method
    """
    if not results:
        raise DataError("Nothing to report")
    trials = pd.DataFrame(results)
    rows, histograms = [], {}
    for method, group in trials.groupby('method', sort=False):
        best = group.sort_values(['loglik', 'seed'], ascending=[False, True], kind='mergesort').iloc[0]
        unit_nld = best.get('unit_nld')
        rows.append({
            'method': method,
            'best_seed': int(best['seed']),
            'loglik': float(best['loglik']),
            'element_nld': float(best['element_nld']),
            'unit_nld': None if unit_nld is None or pd.isna(unit_nld) else float(unit_nld),
            'distinct_units': int(best['distinct_units']),
            'n_trials': int(len(group)),
        })
        histograms[method] = {'element': histogram(group['element_nld'].to_numpy(dtype=float), bins)}
        unit_values = group['unit_nld'].dropna().to_numpy(dtype=float) if 'unit_nld' in group else []
        if len(unit_values):
            histograms[method]['unit'] = histogram(unit_values, bins)
    return {'table': pd.DataFrame(rows), 'trials': trials, 'histograms': histograms}


MUTUAL_MODES = ('ws', 'meu', 'meb')


def directional_checks(table, unit_ratio=5.0):
    """Comparisons between the best runs of a report table.

    Each mutual learning mode should reach an element NLD no worse than
    lower-only, WS should use at least unit_ratio times as many distinct
    unit classes as ME-U, and ME-U should reach the lower unit NLD. A check
    is only made when both methods it compares are in the table.

    Arguments:
        table {DataFrame} -- the table returned by report
        unit_ratio {float} -- required WS to ME-U distinct unit ratio

    Returns:
        list -- one dict per check with keys check, passed, detail
    """
    rows = table.set_index('method')
    checks = []

    def add(name, passed, detail):
        checks.append({'check': name, 'passed': bool(passed), 'detail': detail})
        display.vvv("MOTIONSEG-EVAL-DEBUG: %s %s (%s)"
                    % (name, 'passed' if passed else 'failed', detail))

    if 'lower-only' in rows.index:
        baseline = float(rows.loc['lower-only', 'element_nld'])
        for mode in MUTUAL_MODES:
            if mode in rows.index:
                value = float(rows.loc[mode, 'element_nld'])
                add('%s_element_nld_vs_lower_only' % mode, value <= baseline,
                    '%.4f vs %.4f' % (value, baseline))
    if 'ws' in rows.index and 'meu' in rows.index:
        ws_units = int(rows.loc['ws', 'distinct_units'])
        meu_units = int(rows.loc['meu', 'distinct_units'])
        add('ws_distinct_units_vs_meu', ws_units >= unit_ratio * meu_units,
            '%d vs %d' % (ws_units, meu_units))
        ws_nld, meu_nld = rows.loc['ws', 'unit_nld'], rows.loc['meu', 'unit_nld']
        if not (pd.isna(ws_nld) or pd.isna(meu_nld)):
            add('meu_unit_nld_vs_ws', float(meu_nld) < float(ws_nld),
                '%.4f vs %.4f' % (float(meu_nld), float(ws_nld)))
    return checks
