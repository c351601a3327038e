# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Synthetic corpora with planted element and unit structure.

Every sequence is one cycle of a procedure: a list of units, each unit a
string of element classes, each element a noisy, time-warped copy of its
class prototype. Workers scale amplitude and speed individually.
"""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from dataclasses import dataclass, field
from typing import List

import numpy as np

from motionseg.module_utils.common import ConfigError, display, validate_params
from motionseg.module_utils.ingest import Corpus
from motionseg.module_utils.model import (
    ElementSegmentation,
    TimeSeries,
    UnitSegmentation,
)

PRESET_NAMES = ['paper-shaped', 'assembly', 'toy', 'custom']

ARGUMENTS_SPEC_SYNTH = dict(
    preset=dict(type='str', default='paper-shaped', choices=PRESET_NAMES),
    n_elements=dict(type='int', required=False),
    dim=dict(type='int', required=False),
    units=dict(type='list', elements='list', required=False),
    procedure=dict(type='list', elements='int', required=False),
    prototypes=dict(type='list', elements='list', required=False),
    n_cycles=dict(type='int', required=False),
    n_workers=dict(type='int', required=False),
    element_length=dict(type='float', required=False),
    duration_jitter=dict(type='float', required=False),
    noise_sigma=dict(type='float', required=False),
    fluctuation=dict(type='float', required=False),
    rate_hz=dict(type='float', required=False),
    worker_amplitude_sd=dict(type='float', required=False),
    worker_speed_sd=dict(type='float', required=False),
    cycle_speed_range=dict(type='list', elements='float', required=False),
    n_harmonics=dict(type='int', required=False),
)

# Assembly procedure of 12 steps in three units: prepare (1, 2, 3), fasten
# three times (4, 5), finish (6, 7, 8); labels are 0-based here. The cycle
# tempo range spreads a nominal 45 s cycle over roughly 29 to 65 s.
PRESETS = {
    'paper-shaped': dict(
        n_elements=8, dim=6,
        units=[[0, 1, 2], [3, 4, 3, 4, 3, 4], [5, 6, 7]],
        procedure=[0, 1, 2],
        n_cycles=36, n_workers=3,
        element_length=19.0, duration_jitter=0.15,
        noise_sigma=0.05, fluctuation=0.2, rate_hz=5.0,
        worker_amplitude_sd=0.1, worker_speed_sd=0.05, cycle_speed_range=[0.65, 1.4],
        n_harmonics=3,
    ),
    'toy': dict(
        n_elements=3, dim=2,
        units=[[0, 1], [2]],
        procedure=[0, 1, 0],
        n_cycles=4, n_workers=1,
        element_length=8.0, duration_jitter=0.1,
        noise_sigma=0.05, fluctuation=0.0, rate_hz=5.0,
        worker_amplitude_sd=0.0, worker_speed_sd=0.0, cycle_speed_range=None,
        n_harmonics=2,
    ),
}
PRESETS['assembly'] = PRESETS['paper-shaped']
PRESETS['custom'] = PRESETS['toy']


@dataclass
class SyntheticCorpus:
    corpus: Corpus
    element_segmentations: List[ElementSegmentation]
    unit_segmentations: List[UnitSegmentation]
    prototypes: List[np.ndarray]
    config: dict = field(default_factory=dict)

    def truth(self):
        return dict((e.series_id, (e, u))
                    for e, u in zip(self.element_segmentations, self.unit_segmentations))


def synth_config(params=None):
    """Validated generator config: preset values overridden by explicit ones."""
    checked = validate_params(ARGUMENTS_SPEC_SYNTH, params or {}, name='synth config')
    config = dict(PRESETS[checked['preset']])
    config.update(dict((k, v) for k, v in checked.items() if v is not None))
    problems = []
    for name in ('n_elements', 'dim', 'n_cycles', 'n_workers', 'n_harmonics'):
        if config[name] < 1:
            problems.append("%s must be >= 1 (got %s)" % (name, config[name]))
    if not config['element_length'] >= 1:
        problems.append("element_length must be >= 1 (got %s)" % config['element_length'])
    if not 0 <= config['fluctuation'] <= 1:
        problems.append("fluctuation must be in [0, 1] (got %s)" % config['fluctuation'])
    for name in ('noise_sigma', 'duration_jitter', 'worker_amplitude_sd', 'worker_speed_sd'):
        if config[name] < 0:
            problems.append("%s must be >= 0 (got %s)" % (name, config[name]))
    if not config['rate_hz'] > 0:
        problems.append("rate_hz must be > 0 (got %s)" % config['rate_hz'])
    tempo = config.get('cycle_speed_range')
    if tempo is not None and (len(tempo) != 2 or not 0 < tempo[0] <= tempo[1]):
        problems.append("cycle_speed_range must be [low, high] with 0 < low <= high (got %s)" % (tempo,))
    for i, unit in enumerate(config['units']):
        if not unit or any(int(c) < 0 or int(c) >= config['n_elements'] for c in unit):
            problems.append("unit %d must be a non-empty list of element labels in [0, %d)"
                            % (i, config['n_elements']))
    if not config['procedure'] or any(b < 0 or b >= len(config['units']) for b in config['procedure']):
        problems.append("procedure must be a non-empty list of unit ids in [0, %d)" % len(config['units']))
    prototypes = config.get('prototypes')
    if prototypes is not None:
        if len(prototypes) != config['n_elements']:
            problems.append("%d prototypes given for %d element classes"
                            % (len(prototypes), config['n_elements']))
        for c, proto in enumerate(prototypes):
            shape = np.shape(proto)
            if len(shape) != 2 or shape[0] < 1 or shape[1] != config['dim']:
                problems.append("prototype %d has shape %s, expected (length, %d)"
                                % (c, shape, config['dim']))
    if problems:
        raise ConfigError("Invalid synth config: %s" % "; ".join(problems), fields=problems)
    return config


def make_prototypes(config, rng):
    """Smooth template curves, one (length, dim) array per element class."""
    if config.get('prototypes') is not None:
        return [np.asarray(p, dtype=float) for p in config['prototypes']]
    prototypes = []
    harmonics = np.arange(1, config['n_harmonics'] + 1)
    for _ in range(config['n_elements']):
        length = max(3, int(rng.poisson(config['element_length'])))
        u = np.linspace(0.0, 1.0, length)
        offset = rng.normal(0.0, 1.0, size=config['dim'])
        amplitude = rng.normal(0.0, 1.0, size=(config['dim'], harmonics.size)) / harmonics
        phase = rng.uniform(0.0, 2 * np.pi, size=(config['dim'], harmonics.size))
        waves = np.sin(np.pi * harmonics[None, None, :] * u[:, None, None] + phase[None])
        prototypes.append(offset[None, :] + np.sum(amplitude[None] * waves, axis=2))
    return prototypes


def fluctuate(string, n_elements, rate, rng):
    """Substitute or swap elements of a unit string with probability rate each."""
    out = list(string)
    for i in range(len(out)):
        if rng.random() >= rate:
            continue
        if rng.random() < 0.5 or i == len(out) - 1:
            if n_elements > 1:
                out[i] = int((out[i] + rng.integers(1, n_elements)) % n_elements)
        else:
            out[i], out[i + 1] = out[i + 1], out[i]
    return out


def warp(prototype, length):
    """Linearly resample a (base, dim) curve to length samples."""
    base = prototype.shape[0]
    if length == base:
        return prototype
    grid = np.linspace(0.0, base - 1.0, length)
    return np.stack([np.interp(grid, np.arange(base), prototype[:, d])
                     for d in range(prototype.shape[1])], axis=1)


def render_element(prototype, speed, amplitude, jitter, rng):
    """Time-warp and scale one prototype."""
    stretch = speed * (1.0 + jitter * rng.normal()) if jitter > 0 else speed
    length = max(2, int(round(prototype.shape[0] * stretch)))
    return warp(prototype, length) * amplitude


def generate(config, rng):
    """Sample a corpus with ground truth.

    Arguments:
        config {dict} -- generator config, see synth_config
        rng {Generator} -- numpy random generator

    Returns:
        SyntheticCorpus
    """
    config = synth_config(config)
    prototypes = make_prototypes(config, rng)
    series, elem_segs, unit_segs = [], [], []
    for worker in range(config['n_workers']):
        amplitude = 1.0 + config['worker_amplitude_sd'] * rng.normal()
        speed = max(0.2, 1.0 + config['worker_speed_sd'] * rng.normal())
        for cycle in range(config['n_cycles']):
            series_id = "w%d-c%02d" % (worker + 1, cycle + 1)
            tempo = speed
            if config.get('cycle_speed_range'):
                tempo = speed * rng.uniform(*config['cycle_speed_range'])
            pieces, lengths, labels, unit_lengths = [], [], [], []
            for b in config['procedure']:
                string = fluctuate(config['units'][b], config['n_elements'],
                                   config['fluctuation'], rng)
                for c in string:
                    piece = render_element(prototypes[c], tempo, amplitude,
                                           config['duration_jitter'], rng)
                    pieces.append(piece)
                    lengths.append(piece.shape[0])
                    labels.append(c)
                unit_lengths.append(len(string))
            samples = np.concatenate(pieces, axis=0)
            if config['noise_sigma'] > 0:
                samples = samples + rng.normal(0.0, config['noise_sigma'], size=samples.shape)
            series.append(TimeSeries(series_id, samples, config['rate_hz']))
            elem_segs.append(ElementSegmentation.from_lengths(series_id, lengths, labels))
            unit_segs.append(UnitSegmentation.from_lengths(series_id, unit_lengths,
                                                           config['procedure']))
    for s, e, u in zip(series, elem_segs, unit_segs):
        e.check(s.length)
        u.check(len(e))
    display.vvv("MOTIONSEG-SYNTH-DEBUG: %d sequences, %d-%d samples"
                % (len(series), min(s.length for s in series), max(s.length for s in series)))
    return SyntheticCorpus(Corpus(series), elem_segs, unit_segs, prototypes, config)


def classify_segments(samples, elem_seg, prototypes):
    """Label every segment with its nearest prototype (after time-warping)."""
    labels = []
    for seg in elem_seg.segments:
        x = samples[seg.start:seg.end]
        best, best_dist = 0, np.inf
        for c, proto in enumerate(prototypes):
            dist = float(np.sum((warp(proto, x.shape[0]) - x) ** 2))
            if dist < best_dist:
                best, best_dist = c, dist
        labels.append(best)
    return labels
