# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

DOCUMENTATION = '''
---
module: motionseg_segment
short_description: Segment new sequences with a trained model
description:
  - Loads a model checkpoint written by the train command and segments a
    corpus with the learned GP class models, transitions and emissions,
    without updating them.
  - The standardization recorded at training time is applied to the corpus.
options:
  model:
    description:
      - Model checkpoint (model.json) of a trained mode.
    type: path
    required: true
  corpus:
    description:
      - Corpus CSV file or directory of CSV files.
    type: path
    required: true
  output:
    description:
      - Segmentation CSV to write.
    type: path
    required: true
  seed:
    description:
      - Seed of the sampler.
    type: int
    default: 0
'''

EXAMPLES = '''
motionseg segment --model runs/meu/model.json --corpus new.csv --output new-seg.csv
'''

RETURN = '''
segmentation:
  description: Path of the written segmentation CSV
  returned: always
  type: str
  sample: new-seg.csv
n_sequences:
  description: Number of segmented sequences
  returned: always
  type: int
  sample: 12
'''

from ..module_utils.checkpoint import load_checkpoint  # noqa: E402
from ..module_utils.common import validate_params  # noqa: E402
from ..module_utils.ingest import (  # noqa: E402
    ARGUMENTS_SPEC_INGEST,
    ingest,
    standardize_corpus,
    write_segmentation,
)
from ..module_utils.trainer import segment  # noqa: E402

ARGUMENTS_SPEC_SEGMENT = dict(
    model=dict(type='path', required=True),
    corpus=dict(type='path', required=True),
    output=dict(type='path', required=True),
    seed=dict(type='int', default=0),
)
ARGUMENTS_SPEC_SEGMENT.update(
    (k, v) for k, v in ARGUMENTS_SPEC_INGEST.items() if k != 'standardize')


class SegmentManager:

    def __init__(self, params):
        self.params = params
        self.results = {
            'changed': False,
            'actions': [],
        }

    def execute(self):
        model = load_checkpoint(self.params['model'])
        corpus = ingest(self.params['corpus'],
                        id_column=self.params['id_column'],
                        time_column=self.params['time_column'],
                        value_columns=self.params['value_columns'],
                        rate_hz=self.params['rate_hz'])
        stats = model.extra.get('standardization')
        if stats:
            corpus = standardize_corpus(corpus, stats)
        elem_segs, unit_segs = segment(model, corpus.series, seed=self.params['seed'])
        path = write_segmentation(self.params['output'], elem_segs, unit_segs,
                                  lengths=corpus.lengths,
                                  max_len=model.hyperparams.max_element_len)
        self.results.update({
            'changed': True,
            'segmentation': path,
            'mode': model.mode,
            'n_sequences': len(elem_segs),
        })
        self.results['actions'].append('segmented %d sequences with %s model'
                                       % (len(elem_segs), model.mode))
        return self.results


def run_module(params):
    checked = validate_params(ARGUMENTS_SPEC_SEGMENT, params, name='segment parameters')
    return SegmentManager(checked).execute()
