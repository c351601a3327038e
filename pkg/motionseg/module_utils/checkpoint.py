# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from motionseg.module_utils.common import DataError, display, read_json, write_json
from motionseg.module_utils.lower import ElementPrior, LowerModel
from motionseg.module_utils.model import (
    ElementSegmentation,
    UnitSegmentation,
    hyperparams_from_params,
)
from motionseg.module_utils.upper import UpperModel

FORMAT_VERSION = 1


@dataclass
class TrainedModel:
    """One training run: final model state, segmentations and likelihood trace."""

    seed: int
    mode: str
    hyperparams: Any
    lower: LowerModel
    upper: Optional[UpperModel]
    prior: ElementPrior
    element_segmentations: List[ElementSegmentation] = field(default_factory=list)
    unit_segmentations: List[Optional[UnitSegmentation]] = field(default_factory=list)
    trace: List[float] = field(default_factory=list)
    iteration: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def final_loglik(self):
        return self.trace[-1] if self.trace else float('-inf')

    @property
    def series_ids(self):
        return [seg.series_id for seg in self.element_segmentations]

    def distinct_units(self):
        if self.upper is None:
            return 0
        return self.upper.counts.distinct_units()

    def distinct_elements(self):
        return len(set(c for seg in self.element_segmentations for c in seg.labels))


def to_dict(run):
    return {
        'format_version': FORMAT_VERSION,
        'mode': run.mode,
        'seed': run.seed,
        'iteration': run.iteration,
        'hyperparams': run.hyperparams.to_params(),
        'dim': run.lower.dim,
        'trace': list(run.trace),
        'gps': [gp.to_dict() for gp in run.lower.gps],
        'element_transitions': run.lower.trans.to_dict(),
        'unit_transitions': run.upper.trans.to_dict() if run.upper else None,
        'emission_counts': run.upper.counts.to_dict() if run.upper else None,
        'prior': run.prior.to_dict(),
        'element_segmentations': [seg.to_dict() for seg in run.element_segmentations],
        'unit_segmentations': [seg.to_dict() if seg else None for seg in run.unit_segmentations],
        'extra': run.extra,
    }


def save_checkpoint(path, run):
    """Overwrite the checkpoint at path with the current state of run."""
    write_json(path, to_dict(run))
    display.vvv("MOTIONSEG-CHECKPOINT-DEBUG: wrote %s (seed %s, iteration %s)"
                % (path, run.seed, run.iteration))
    return path


def load_checkpoint(path):
    """Rebuild a TrainedModel with frozen GP training sets from a checkpoint file."""
    data = read_json(path)
    version = data.get('format_version')
    if version != FORMAT_VERSION:
        raise DataError("Checkpoint %s has format version %s, expected %s"
                        % (path, version, FORMAT_VERSION))
    try:
        h = hyperparams_from_params(data['hyperparams'])
        lower = LowerModel(h, int(data['dim']), np.random.default_rng(int(data['seed'])))
        for gp, stored in zip(lower.gps, data['gps']):
            gp.load_training_set(stored['ts'], stored['xs'])
        lower.trans.load(data['element_transitions'])
        upper = None
        if data['emission_counts'] is not None:
            upper = UpperModel(h, data['mode'])
            upper.counts.load(data['emission_counts'])
            upper.trans.load(data['unit_transitions'])
        elem_segs = [ElementSegmentation.from_dict(d) for d in data['element_segmentations']]
        unit_segs = [UnitSegmentation.from_dict(d) if d else None
                     for d in data['unit_segmentations']]
        prior = ElementPrior.from_dict(data['prior'])
    except (KeyError, TypeError, ValueError) as e:
        raise DataError("Checkpoint %s is malformed: %s" % (path, e))
    return TrainedModel(seed=int(data['seed']), mode=data['mode'], hyperparams=h,
                        lower=lower, upper=upper, prior=prior,
                        element_segmentations=elem_segs, unit_segmentations=unit_segs,
                        trace=list(data['trace']), iteration=int(data['iteration']),
                        extra=data.get('extra') or {})
