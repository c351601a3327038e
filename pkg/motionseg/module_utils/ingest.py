# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""CSV ingestion of trajectories and segmentations."""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import glob
import os
from collections import OrderedDict

import numpy as np
import pandas as pd

from motionseg.module_utils.common import DataError, display, ensure_dir
from motionseg.module_utils.model import (
    ElementSegment,
    ElementSegmentation,
    TimeSeries,
    UnitSegmentation,
)

SEGMENTATION_COLUMNS = ['sequence_id', 'start', 'end', 'element_class', 'unit_class', 'unit_index']

ARGUMENTS_SPEC_INGEST = dict(
    id_column=dict(type='str', default='sequence_id'),
    time_column=dict(type='str', required=False),
    value_columns=dict(type='list', elements='str', required=False),
    rate_hz=dict(type='float', default=5.0),
    standardize=dict(type='bool', default=False),
)


class Corpus:
    """Ordered TimeSeries plus the standardization applied to them, if any."""

    def __init__(self, series, stats=None, columns=None):
        self.series = list(series)
        self.stats = stats
        self.columns = columns

    def __iter__(self):
        return iter(self.series)

    def __len__(self):
        return len(self.series)

    def __getitem__(self, i):
        return self.series[i]

    @property
    def dim(self):
        return self.series[0].dim if self.series else 0

    @property
    def lengths(self):
        return dict((s.id, s.length) for s in self.series)


def _read_frame(path):
    try:
        return pd.read_csv(path)
    except (IOError, OSError, ValueError, pd.errors.ParserError) as e:
        raise DataError("Can not read %s: %s" % (path, e))


def _check_ids(frame, id_column, path):
    empty = frame[id_column].isna() | (frame[id_column].astype(str).str.strip() == '')
    if empty.any():
        # +2: header line and 1-based rows
        raise DataError("%s has an empty %s at row %d"
                        % (path, id_column, int(np.flatnonzero(empty.to_numpy())[0]) + 2))


def _frame_to_series(frame, path, id_column, time_column, value_columns, rate_hz):
    missing = [c for c in [id_column] + list(value_columns or []) + ([time_column] if time_column else [])
               if c is not None and c not in frame.columns]
    if missing:
        raise DataError("%s is missing columns: %s" % (path, ", ".join(missing)))
    if value_columns is None:
        value_columns = [c for c in frame.columns if c not in (id_column, time_column)]
    if not value_columns:
        raise DataError("%s has no value columns" % path)
    _check_ids(frame, id_column, path)
    values = frame[value_columns].apply(pd.to_numeric, errors='coerce')
    bad = ~np.isfinite(values.to_numpy(dtype=float))
    if bad.any():
        row, col = np.argwhere(bad)[0]
        # +2: header line and 1-based rows
        raise DataError("%s has a missing or non-finite value at row %d, column %s"
                        % (path, row + 2, value_columns[col]))
    series = []
    for series_id, group in frame.groupby(id_column, sort=False):
        if time_column:
            group = group.sort_values(time_column, kind='mergesort')
        samples = values.loc[group.index].to_numpy(dtype=float)
        if len(samples) == 0:
            raise DataError("Sequence %s in %s is empty" % (series_id, path))
        series.append(TimeSeries(str(series_id), samples, rate_hz))
    return series, list(value_columns)


def ingest(path, id_column='sequence_id', time_column=None, value_columns=None,
           rate_hz=5.0, standardize=False):
    """Read a corpus from one CSV file or a directory of CSV files.

    Each file has a header with an id column, an optional time column and
    the value columns (all remaining columns by default). A file without the
    id column is one sequence named after the file.

    Returns:
        Corpus
    """
    if os.path.isdir(path):
        paths = sorted(glob.glob(os.path.join(path, '*.csv')))
        if not paths:
            raise DataError("No CSV files in %s" % path)
    elif os.path.isfile(path):
        paths = [path]
    else:
        raise DataError("Corpus path %s does not exist" % path)
    series, columns = [], None
    for csv_path in paths:
        frame = _read_frame(csv_path)
        if id_column not in frame.columns:
            frame.insert(0, id_column, os.path.splitext(os.path.basename(csv_path))[0])
        found, file_columns = _frame_to_series(frame, csv_path, id_column, time_column,
                                               value_columns, rate_hz)
        if columns is not None and len(file_columns) != len(columns):
            raise DataError("%s has %d value columns, earlier files have %d"
                            % (csv_path, len(file_columns), len(columns)))
        columns = file_columns
        series.extend(found)
    ids = [s.id for s in series]
    if len(set(ids)) != len(ids):
        raise DataError("Sequence ids repeat across files in %s" % path)
    corpus = Corpus(series, columns=columns)
    if standardize:
        corpus = standardize_corpus(corpus)
    display.vvv("MOTIONSEG-INGEST-DEBUG: %d sequences, D=%d from %s" % (len(corpus), corpus.dim, path))
    return corpus


def standardize_corpus(corpus, stats=None):
    """Z-score every dimension over the whole corpus (or with given stats)."""
    if stats is None:
        stacked = np.concatenate([s.samples for s in corpus], axis=0)
        mean = stacked.mean(axis=0)
        std = stacked.std(axis=0)
        std[std == 0] = 1.0
        stats = {'mean': mean.tolist(), 'std': std.tolist()}
    mean, std = np.asarray(stats['mean']), np.asarray(stats['std'])
    if mean.size != corpus.dim:
        raise DataError("Standardization has %d dimensions, corpus has %d" % (mean.size, corpus.dim))
    series = [TimeSeries(s.id, (s.samples - mean) / std, s.rate_hz) for s in corpus]
    return Corpus(series, stats=stats, columns=corpus.columns)


def write_corpus(path, corpus, columns=None):
    """Write a corpus as one CSV with sequence_id and the value columns."""
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    dim = corpus[0].dim
    columns = columns or ['x%d' % d for d in range(dim)]
    frames = []
    for s in corpus:
        frame = pd.DataFrame(s.samples, columns=columns)
        frame.insert(0, 'sequence_id', s.id)
        frames.append(frame)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False, float_format='%.10g')
    return path


def write_segmentation(path, elem_segs, unit_segs=None, lengths=None, max_len=None):
    """Write the canonical segmentation CSV, one row per element segment.

    Tiling is checked before anything is written. unit_class is left empty
    when a sequence has no unit segmentation.
    """
    unit_segs = unit_segs or [None] * len(elem_segs)
    rows = []
    for elem_seg, unit_seg in zip(elem_segs, unit_segs):
        if lengths is not None:
            elem_seg.check(lengths[elem_seg.series_id], max_len)
        unit_of = [None] * len(elem_seg)
        index_of = [None] * len(elem_seg)
        if unit_seg is not None:
            unit_seg.check(len(elem_seg))
            for i, useg in enumerate(unit_seg.segments):
                for j in range(useg.start, useg.end):
                    unit_of[j], index_of[j] = useg.class_id, i
        for j, seg in enumerate(elem_seg.segments):
            rows.append((elem_seg.series_id, seg.start, seg.end, seg.class_id,
                         unit_of[j], index_of[j]))
    frame = pd.DataFrame(rows, columns=SEGMENTATION_COLUMNS)
    for column in ('unit_class', 'unit_index'):
        frame[column] = frame[column].astype('Int64')
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    frame.to_csv(path, index=False)
    return path


def read_segmentation(path):
    """Read a segmentation CSV.

    Returns:
        OrderedDict -- series id -> (ElementSegmentation, UnitSegmentation or None)
    """
    frame = _read_frame(path)
    missing = [c for c in SEGMENTATION_COLUMNS[:5] if c not in frame.columns]
    if missing:
        raise DataError("%s is missing columns: %s" % (path, ", ".join(missing)))
    _check_ids(frame, 'sequence_id', path)
    labels = frame[['element_class', 'unit_class']]
    if frame['element_class'].isna().any() or (labels.fillna(0).to_numpy() < 0).any():
        raise DataError("%s has a missing or negative class label" % path)
    result = OrderedDict()
    for series_id, group in frame.groupby('sequence_id', sort=False):
        group = group.sort_values('start', kind='mergesort')
        elem_seg = ElementSegmentation(str(series_id), tuple(
            ElementSegment(int(s), int(e), int(c))
            for s, e, c in zip(group['start'], group['end'], group['element_class'])))
        elem_seg.check(elem_seg.total_length)
        unit_seg = None
        if group['unit_class'].notna().all():
            unit_labels = group['unit_class'].astype(int).tolist()
            if 'unit_index' in group.columns and group['unit_index'].notna().all():
                keys = group['unit_index'].astype(int).tolist()
            else:
                keys = unit_labels
            lengths, labels = [], []
            for j, (key, label) in enumerate(zip(keys, unit_labels)):
                if j > 0 and key == keys[j - 1]:
                    lengths[-1] += 1
                else:
                    lengths.append(1)
                    labels.append(label)
            unit_seg = UnitSegmentation.from_lengths(str(series_id), lengths, labels)
        elif group['unit_class'].notna().any():
            raise DataError("Sequence %s in %s has unit labels on some segments only"
                            % (series_id, path))
        result[str(series_id)] = (elem_seg, unit_seg)
    return result
