# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

DOCUMENTATION = '''
---
module: motionseg_synth
short_description: Generate a synthetic motion corpus with ground truth
description:
  - Samples sequences unit by unit and element by element from smooth
    element prototypes, with Gaussian noise, element fluctuations and
    per-worker amplitude and speed offsets.
  - Writes the corpus CSV and the ground-truth segmentation CSV in the
    format the train and eval commands read.
options:
  output_dir:
    description:
      - Directory to write corpus.csv, truth.csv and synth.json to.
    type: path
    required: true
  seed:
    description:
      - Seed of the generator.
    type: int
    default: 0
  synth:
    description:
      - Generator settings. C(preset) selects the base values, every other
        key overrides it.
    type: dict
    suboptions:
      preset:
        description:
          - C(paper-shaped) is a 12-step assembly procedure in three units,
            36 cycles by 3 workers, 6 dimensions at 5 Hz, cycles of about
            29 to 65 s. C(assembly) is an alias.
        type: str
        default: paper-shaped
        choices: [paper-shaped, assembly, toy, custom]
      fluctuation:
        description:
          - Probability that an element is substituted or swapped with the
            next one.
        type: float
      noise_sigma:
        description:
          - Standard deviation of the per-sample Gaussian noise.
        type: float
'''

EXAMPLES = '''
# Assembly-procedure corpus
motionseg synth --preset paper-shaped --seed 1 --output-dir data/

# Noiseless toy corpus
motionseg synth --preset toy --noise-sigma 0 --output-dir toy/
'''

RETURN = '''
corpus:
  description: Path of the generated corpus CSV
  returned: always
  type: str
  sample: data/corpus.csv
truth:
  description: Path of the ground-truth segmentation CSV
  returned: always
  type: str
  sample: data/truth.csv
n_sequences:
  description: Number of generated sequences
  returned: always
  type: int
  sample: 108
'''

import os  # noqa: E402

from ..module_utils.common import make_rng, validate_params, write_json  # noqa: E402
from ..module_utils.ingest import write_corpus, write_segmentation  # noqa: E402
from ..module_utils.synth import ARGUMENTS_SPEC_SYNTH, generate  # noqa: E402

ARGUMENTS_SPEC_SYNTH_MODULE = dict(
    output_dir=dict(type='path', required=True),
    seed=dict(type='int', default=0),
    synth=dict(type='dict', default={}, options=ARGUMENTS_SPEC_SYNTH),
)


class SynthManager:
    """Generate a synthetic corpus and write it out."""

    def __init__(self, params):
        self.params = params
        self.output_dir = params['output_dir']
        self.results = {
            'changed': False,
            'actions': [],
        }

    def execute(self):
        rng = make_rng(self.params['seed'])
        generated = generate(self.params['synth'] or {}, rng)
        corpus_path = write_corpus(os.path.join(self.output_dir, 'corpus.csv'), generated.corpus)
        truth_path = write_segmentation(os.path.join(self.output_dir, 'truth.csv'),
                                        generated.element_segmentations,
                                        generated.unit_segmentations,
                                        lengths=generated.corpus.lengths)
        config = dict(generated.config)
        config['prototypes'] = [p.tolist() for p in generated.prototypes]
        config['seed'] = self.params['seed']
        write_json(os.path.join(self.output_dir, 'synth.json'), config)
        lengths = [s.duration for s in generated.corpus]
        self.results.update({
            'changed': True,
            'corpus': corpus_path,
            'truth': truth_path,
            'n_sequences': len(generated.corpus),
            'dim': generated.corpus.dim,
            'duration_range': [min(lengths), max(lengths)],
        })
        self.results['actions'].append('generated %d sequences' % len(generated.corpus))
        return self.results


def run_module(params):
    checked = validate_params(ARGUMENTS_SPEC_SYNTH_MODULE, params, name='synth parameters')
    return SynthManager(checked).execute()
