# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

DOCUMENTATION = '''
---
module: motionseg_report
short_description: Write comparison tables, histograms and timelines
description:
  - Reads eval.json written by the eval command and writes the comparison
    table, NLD histogram data per method and level, and the segmentation
    timeline of each mode, both as tab-separated data and as PNG images.
options:
  eval:
    description:
      - eval.json written by the eval command.
    type: path
    required: true
  output_dir:
    description:
      - Directory to write the report to.
    type: path
    required: true
  bins:
    description:
      - Number of histogram bins over [0, 1].
    type: int
    default: 10
  rate_hz:
    description:
      - Sampling rate used for the time axis of the timelines.
    type: float
    default: 5.0
  max_sequences:
    description:
      - Rows shown in a timeline image; the data file always has every sequence.
    type: int
    default: 40
  plots:
    description:
      - Render PNG images next to the data files.
    type: bool
    default: true
  unit_ratio:
    description:
      - Distinct unit classes WS must use per ME-U unit class for the
        C(ws_distinct_units_vs_meu) check in checks.tsv.
    type: float
    default: 5.0
'''

EXAMPLES = '''
motionseg report --eval runs/eval.json --output-dir report/
'''

RETURN = '''
files:
  description: Every file written
  returned: always
  type: list
  sample: ["report/nld_table.tsv", "report/histogram_element.tsv"]
checks:
  description: Comparisons between the best run of each method, also written to checks.tsv
  returned: always
  type: list
  sample: [{"check": "meu_element_nld_vs_lower_only", "passed": true, "detail": "0.4100 vs 0.4700"}]
'''

import os  # noqa: E402

import pandas as pd  # noqa: E402

from ..module_utils.common import ensure_dir, read_json, validate_params  # noqa: E402
from ..module_utils.evaluation import directional_checks, report  # noqa: E402
from ..module_utils.ingest import read_segmentation  # noqa: E402
from ..module_utils.plotting import plot_histograms, plot_timeline  # noqa: E402

ARGUMENTS_SPEC_REPORT = dict(
    eval=dict(type='path', required=True),
    output_dir=dict(type='path', required=True),
    bins=dict(type='int', default=10),
    rate_hz=dict(type='float', default=5.0),
    max_sequences=dict(type='int', default=40),
    plots=dict(type='bool', default=True),
    unit_ratio=dict(type='float', default=5.0),
)


def timeline_intervals(segmentation):
    """Unit intervals in timesteps per sequence; element intervals when no units exist."""
    rows = []
    for series_id, (elem_seg, unit_seg) in segmentation.items():
        if unit_seg is None:
            spans = [(s.start, s.end, s.class_id) for s in elem_seg.segments]
        else:
            spans = [(elem_seg.segments[u.start].start, elem_seg.segments[u.end - 1].end, u.class_id)
                     for u in unit_seg.segments]
        rows.append((series_id, spans))
    return rows


class ReportManager:

    def __init__(self, params):
        self.params = params
        self.output_dir = ensure_dir(params['output_dir'])
        self.results = {
            'changed': False,
            'actions': [],
            'files': [],
        }

    def _path(self, name):
        path = os.path.join(self.output_dir, name)
        self.results['files'].append(path)
        return path

    def write_histograms(self, histograms):
        for level in ('element', 'unit'):
            rows = []
            for method, data in histograms.items():
                if level not in data:
                    continue
                edges = data[level]['edges']
                for lo, hi, count in zip(edges[:-1], edges[1:], data[level]['counts']):
                    rows.append({'method': method, 'bin_start': lo, 'bin_end': hi, 'count': count})
            if not rows:
                continue
            pd.DataFrame(rows).to_csv(self._path('histogram_%s.tsv' % level), sep='\t',
                                      index=False, float_format='%.4f')
            if self.params['plots']:
                plot_histograms(histograms, self._path('histogram_%s.png' % level), level=level)

    def write_timeline(self, name, segmentation, title):
        intervals = timeline_intervals(segmentation)
        rows = [{'sequence_id': sid, 'start': s, 'end': e, 'class': c}
                for sid, spans in intervals for s, e, c in spans]
        pd.DataFrame(rows).to_csv(self._path('timeline_%s.tsv' % name), sep='\t', index=False)
        if self.params['plots']:
            plot_timeline(intervals[:self.params['max_sequences']],
                          self._path('timeline_%s.png' % name),
                          rate_hz=self.params['rate_hz'], title=title)

    def write_timelines(self, trials):
        best = {}
        for trial in trials:
            current = best.get(trial['method'])
            if current is None or (trial['loglik'], -trial['seed']) > (current['loglik'], -current['seed']):
                best[trial['method']] = trial
        for method, trial in best.items():
            self.write_timeline(method, read_segmentation(trial['segmentation']),
                                '%s (seed %s)' % (method, trial['seed']))

    def execute(self):
        evaluated = read_json(self.params['eval'])
        summary = report(evaluated['trials'], bins=self.params['bins'])
        summary['table'].to_csv(self._path('nld_table.tsv'), sep='\t', index=False,
                                float_format='%.4f')
        summary['trials'].drop(columns=['segmentation'], errors='ignore').to_csv(
            self._path('trials.tsv'), sep='\t', index=False, float_format='%.4f')
        checks = directional_checks(summary['table'], unit_ratio=self.params['unit_ratio'])
        pd.DataFrame(checks, columns=['check', 'passed', 'detail']).to_csv(
            self._path('checks.tsv'), sep='\t', index=False)
        self.results['checks'] = checks
        self.write_histograms(summary['histograms'])
        self.write_timelines(evaluated['trials'])
        truth = evaluated.get('truth')
        if truth and os.path.isfile(truth):
            self.write_timeline('truth', read_segmentation(truth), 'ground truth')
        self.results['changed'] = True
        self.results['actions'].append('wrote %d report files' % len(self.results['files']))
        return self.results


def run_module(params):
    checked = validate_params(ARGUMENTS_SPEC_REPORT, params, name='report parameters')
    return ReportManager(checked).execute()
