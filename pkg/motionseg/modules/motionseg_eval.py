# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

DOCUMENTATION = '''
---
module: motionseg_eval
short_description: Score trained segmentations against ground truth
description:
  - Computes element and unit normalized Levenshtein distances (NLD) of
    every restart of every trained mode, after mapping estimated class ids
    onto truth labels.
  - Writes eval.json with every trial and nld_table.tsv with the best
    (maximum likelihood) run of each mode.
options:
  run_dir:
    description:
      - Output directory of the train command.
      - Mutually exclusive with I(segmentation).
    type: path
  segmentation:
    description:
      - A single segmentation CSV to score instead of a training run.
    type: path
  truth:
    description:
      - Ground-truth segmentation CSV.
    type: path
    required: true
  mode:
    description:
      - Modes to evaluate, default every mode found in I(run_dir).
    type: list
    elements: str
  class_mapping:
    description:
      - How estimated classes are mapped onto truth labels.
    type: str
    default: greedy
    choices: [greedy, hungarian]
  output_dir:
    description:
      - Where to write the results, default I(run_dir).
    type: path
'''

EXAMPLES = '''
motionseg eval --run-dir runs/ --truth data/truth.csv

motionseg eval --segmentation new-seg.csv --truth data/truth.csv --class-mapping hungarian --output-dir scores/
'''

RETURN = '''
table:
  description: Best run per mode
  returned: always
  type: list
  sample: [{"method": "meu", "best_seed": 3, "element_nld": 0.41, "unit_nld": 0.2, "distinct_units": 3}]
eval:
  description: Path of eval.json
  returned: always
  type: str
'''

import os  # noqa: E402

from ..module_utils.common import (  # noqa: E402
    MODES,
    ConfigError,
    DataError,
    display,
    read_json,
    validate_params,
    write_json,
)
from ..module_utils.evaluation import CLASS_MAPPINGS, evaluate, report  # noqa: E402
from ..module_utils.ingest import read_segmentation  # noqa: E402

ARGUMENTS_SPEC_EVAL = dict(
    run_dir=dict(type='path', required=False),
    segmentation=dict(type='path', required=False),
    truth=dict(type='path', required=True),
    mode=dict(type='list', elements='str', required=False, choices=MODES),
    class_mapping=dict(type='str', default='greedy', choices=CLASS_MAPPINGS),
    output_dir=dict(type='path', required=False),
)


def _table_records(frame):
    return [dict((k, (None if v != v else v)) for k, v in row.items())
            for row in frame.to_dict(orient='records')]


class EvalManager:

    def __init__(self, params):
        self.params = params
        if bool(params['run_dir']) == bool(params['segmentation']):
            raise ConfigError("Exactly one of run_dir and segmentation is required")
        self.output_dir = (params['output_dir'] or params['run_dir']
                           or os.path.dirname(os.path.abspath(params['segmentation'])))
        self.results = {
            'changed': False,
            'actions': [],
        }
        self.truth = None

    def score(self, path, method, seed=0, loglik=0.0, distinct_units=None):
        scores = evaluate(read_segmentation(path), self.truth, self.params['class_mapping'])
        record = {
            'method': method,
            'seed': seed,
            'loglik': loglik,
            'element_nld': scores['element_nld'],
            'unit_nld': scores['unit_nld'],
            'distinct_units': scores['distinct_units'] if distinct_units is None else distinct_units,
            'distinct_elements': scores['distinct_elements'],
            'segmentation': path,
        }
        display.vvv("MOTIONSEG-EVAL-DEBUG: %s seed %s element NLD %.3f"
                    % (method, seed, scores['element_nld']))
        return record

    def trials_of_run_dir(self):
        run_dir = self.params['run_dir']
        modes = self.params['mode'] or [m for m in MODES
                                        if os.path.isfile(os.path.join(run_dir, m, 'runs.json'))]
        if not modes:
            raise DataError("No trained modes found in %s" % run_dir)
        trials = []
        for mode in modes:
            for run in read_json(os.path.join(run_dir, mode, 'runs.json')):
                trials.append(self.score(run['segmentation'], mode, run['seed'], run['loglik'],
                                         run['distinct_units']))
        return trials

    def execute(self):
        self.truth = read_segmentation(self.params['truth'])
        if self.params['run_dir']:
            trials = self.trials_of_run_dir()
        else:
            trials = [self.score(self.params['segmentation'], 'segmentation')]
        summary = report(trials)
        table = _table_records(summary['table'])
        eval_path = os.path.join(self.output_dir, 'eval.json')
        table_path = os.path.join(self.output_dir, 'nld_table.tsv')
        write_json(eval_path, {'class_mapping': self.params['class_mapping'],
                               'truth': self.params['truth'],
                               'trials': trials, 'table': table})
        summary['table'].to_csv(table_path, sep='\t', index=False, float_format='%.4f')
        self.results.update({
            'changed': True,
            'eval': eval_path,
            'nld_table': table_path,
            'table': table,
        })
        self.results['actions'].append('scored %d trials' % len(trials))
        return self.results


def run_module(params):
    checked = validate_params(ARGUMENTS_SPEC_EVAL, params, name='eval parameters')
    return EvalManager(checked).execute()
