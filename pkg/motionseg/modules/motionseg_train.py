# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

DOCUMENTATION = '''
---
module: motionseg_train
short_description: Train the two-layer segmenter on a corpus
description:
  - Runs mutual learning of the GP-HSMM element layer and the unit HSMM for
    every requested mode, n_restarts times with consecutive seeds, and keeps
    the run with the highest final joint log-likelihood.
  - Writes per mode the best segmentation, its model checkpoint, the
    segmentation of every restart and a run summary.
options:
  corpus:
    description:
      - Corpus CSV file or directory of CSV files.
    type: path
    required: true
  output_dir:
    description:
      - Directory receiving one subdirectory per mode.
    type: path
    default: motionseg-out
  mode:
    description:
      - Emission models to train. C(lower-only) trains the element layer
        alone with a uniform element prior.
    type: list
    elements: str
    default: [meu]
    choices: [ws, meu, meb, lower-only]
  hyperparams:
    description:
      - Model hyperparameters, see README for every key.
    type: dict
  n_jobs:
    description:
      - Number of restarts trained in parallel processes.
    type: int
    default: 1
  checkpoints:
    description:
      - Keep a checkpoint of every restart, overwritten after each iteration.
    type: bool
    default: true
  standardize:
    description:
      - Z-score every dimension over the corpus before training.
    type: bool
    default: false
'''

EXAMPLES = '''
motionseg train --corpus data/corpus.csv --mode meu --mode lower-only --output-dir runs/

motionseg train --config train.yml --restarts 3 --iterations 5 -vv
'''

RETURN = '''
runs:
  description: One entry per restart and mode
  returned: always
  type: list
  sample: [{"mode": "meu", "seed": 0, "loglik": -10412.3, "distinct_units": 4}]
best:
  description: Best run per mode
  returned: always
  type: dict
  sample: {"meu": {"seed": 3, "segmentation": "runs/meu/segmentation.csv",
                   "model": "runs/meu/model.json"}}
'''

import os  # noqa: E402

from ..module_utils.checkpoint import save_checkpoint  # noqa: E402
from ..module_utils.common import MODES, display, validate_params, write_json  # noqa: E402
from ..module_utils.ingest import ARGUMENTS_SPEC_INGEST, ingest, write_segmentation  # noqa: E402
from ..module_utils.model import ARGUMENTS_SPEC_HYPERPARAMS, hyperparams_from_params  # noqa: E402
from ..module_utils.trainer import select_best, train_restarts  # noqa: E402

ARGUMENTS_SPEC_TRAIN = dict(
    corpus=dict(type='path', required=True),
    output_dir=dict(type='path', default='motionseg-out'),
    mode=dict(type='list', elements='str', default=['meu'], choices=MODES),
    hyperparams=dict(type='dict', default={}, options=ARGUMENTS_SPEC_HYPERPARAMS),
    n_jobs=dict(type='int', default=1),
    checkpoints=dict(type='bool', default=True),
)
ARGUMENTS_SPEC_TRAIN.update(ARGUMENTS_SPEC_INGEST)


class TrainManager:
    """Train every requested mode and write the results."""

    def __init__(self, params):
        self.params = params
        self.output_dir = params['output_dir']
        self.h = hyperparams_from_params(params['hyperparams'])
        self.results = {
            'changed': False,
            'actions': [],
            'runs': [],
            'best': {},
        }
        self.corpus = None

    def load_corpus(self):
        self.corpus = ingest(self.params['corpus'],
                             id_column=self.params['id_column'],
                             time_column=self.params['time_column'],
                             value_columns=self.params['value_columns'],
                             rate_hz=self.params['rate_hz'],
                             standardize=self.params['standardize'])

    def write_trials(self, mode, runs):
        trial_dir = os.path.join(self.output_dir, mode, 'trials')
        summary = []
        for run in runs:
            path = write_segmentation(os.path.join(trial_dir, 'seed%d.csv' % run.seed),
                                      run.element_segmentations, run.unit_segmentations,
                                      lengths=self.corpus.lengths,
                                      max_len=self.h.max_element_len)
            summary.append({
                'mode': mode,
                'seed': run.seed,
                'loglik': run.final_loglik,
                'trace': run.trace,
                'distinct_units': run.distinct_units(),
                'distinct_elements': run.distinct_elements(),
                'segmentation': path,
            })
        return summary

    def make_mode(self, mode):
        checkpoint_dir = None
        if self.params['checkpoints']:
            checkpoint_dir = os.path.join(self.output_dir, mode, 'checkpoints')
        runs = train_restarts(self.corpus.series, self.h, mode,
                              n_jobs=self.params['n_jobs'], checkpoint_dir=checkpoint_dir)
        summary = self.write_trials(mode, runs)
        best = select_best(runs)
        best.extra = {'standardization': self.corpus.stats, 'columns': self.corpus.columns,
                      'rate_hz': self.params['rate_hz']}
        seg_path = write_segmentation(os.path.join(self.output_dir, mode, 'segmentation.csv'),
                                      best.element_segmentations, best.unit_segmentations,
                                      lengths=self.corpus.lengths,
                                      max_len=self.h.max_element_len)
        model_path = save_checkpoint(os.path.join(self.output_dir, mode, 'model.json'), best)
        for entry in summary:
            entry['best'] = entry['seed'] == best.seed
        write_json(os.path.join(self.output_dir, mode, 'runs.json'), summary)
        self.results['runs'].extend(summary)
        self.results['best'][mode] = {
            'seed': best.seed,
            'loglik': best.final_loglik,
            'distinct_units': best.distinct_units(),
            'segmentation': seg_path,
            'model': model_path,
        }
        self.results['actions'].append('trained %s (%d restarts, best seed %d)'
                                       % (mode, len(runs), best.seed))
        display.v("MOTIONSEG-TRAIN-DEBUG: %s best seed %d loglik %.3f"
                  % (mode, best.seed, best.final_loglik))

    def execute(self):
        """Train each mode in the order given."""
        self.load_corpus()
        for mode in self.params['mode']:
            self.make_mode(mode)
        self.results['changed'] = True
        return self.results


def run_module(params):
    checked = validate_params(ARGUMENTS_SPEC_TRAIN, params, name='train parameters')
    return TrainManager(checked).execute()
