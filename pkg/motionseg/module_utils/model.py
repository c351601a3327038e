# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

import numpy as np

from motionseg.module_utils.common import (
    ConfigError,
    DataError,
    ROLE_BEGIN,
    ROLE_END,
    ROLE_MIDDLE,
    ROLE_SINGLE,
    validate_params,
)

ARGUMENTS_SPEC_KERNEL = dict(
    theta0=dict(type='float', default=1.0),
    theta1=dict(type='float', default=1.0),
    theta2=dict(type='float', default=0.0),
    theta3=dict(type='float', default=16.0),
    noise_var=dict(type='float', default=0.1),
)

ARGUMENTS_SPEC_HYPERPARAMS = dict(
    n_element_classes=dict(type='int', default=12, aliases=['c']),
    n_unit_classes=dict(type='int', default=8, aliases=['b']),
    max_element_len=dict(type='int', default=50, aliases=['k']),
    max_unit_len=dict(type='int', default=10),
    lambda_p=dict(type='float', required=False),
    lambda_b=dict(type='float', required=False),
    alpha=dict(type='float', default=10.0),
    mu=dict(type='float', default=0.1),
    kernel=dict(type='dict', default={}, options=ARGUMENTS_SPEC_KERNEL),
    iterations=dict(type='int', default=30, aliases=['m']),
    n_restarts=dict(type='int', default=10),
    seed=dict(type='int', default=0),
    transition_smoothing=dict(type='float', default=0.1),
    gp_cap=dict(type='int', default=200),
    variance_floor=dict(type='float', default=1e-8),
)


@dataclass(frozen=True)
class KernelParams:
    """Kernel k(p,q) = theta0*exp(-theta1*|p-q|^2/2) + theta2 + theta3*p*q
    plus observation-noise variance noise_var on the covariance diagonal."""

    theta0: float = 1.0
    theta1: float = 1.0
    theta2: float = 0.0
    theta3: float = 16.0
    noise_var: float = 0.1


@dataclass(frozen=True)
class Hyperparams:
    n_element_classes: int = 12
    n_unit_classes: int = 8
    max_element_len: int = 50
    max_unit_len: int = 10
    lambda_p: Optional[float] = None
    lambda_b: Optional[float] = None
    alpha: float = 10.0
    mu: float = 0.1
    kernel: KernelParams = field(default_factory=KernelParams)
    iterations: int = 30
    n_restarts: int = 10
    seed: int = 0
    transition_smoothing: float = 0.1
    gp_cap: int = 200
    variance_floor: float = 1e-8

    @property
    def element_duration_mean(self):
        if self.lambda_p is None:
            return self.max_element_len / 2.0
        return self.lambda_p

    @property
    def unit_duration_mean(self):
        if self.lambda_b is None:
            return self.max_unit_len / 2.0
        return self.lambda_b

    def to_params(self):
        return asdict(self)


def validate_hyperparams(h):
    """Return h unchanged if every invariant holds, else raise ConfigError.

    The error message lists every violated field, e.g. "C must be >= 1".
    """
    problems = []
    for symbol, name in (('C', 'n_element_classes'), ('B', 'n_unit_classes'),
                         ('K', 'max_element_len'), ("K'", 'max_unit_len'),
                         ('M', 'iterations'), ('n_restarts', 'n_restarts'),
                         ('gp_cap', 'gp_cap')):
        if getattr(h, name) < 1:
            problems.append("%s must be >= 1 (%s=%s)" % (symbol, name, getattr(h, name)))
    for name in ('lambda_p', 'lambda_b'):
        value = getattr(h, name)
        if value is not None and not value > 0:
            problems.append("%s must be > 0 (got %s)" % (name, value))
    for name in ('alpha', 'mu', 'transition_smoothing', 'variance_floor'):
        if not getattr(h, name) > 0:
            problems.append("%s must be > 0 (got %s)" % (name, getattr(h, name)))
    kernel = h.kernel
    if kernel.theta0 < 0:
        problems.append("kernel.theta0 must be >= 0 (got %s)" % kernel.theta0)
    if kernel.theta1 < 0:
        problems.append("kernel.theta1 must be >= 0 (got %s)" % kernel.theta1)
    if not kernel.noise_var > 0:
        problems.append("kernel.noise_var must be > 0 (got %s)" % kernel.noise_var)
    if problems:
        raise ConfigError("Invalid hyperparameters: %s" % "; ".join(problems),
                          fields=problems)
    return h


def hyperparams_from_params(params):
    """Build validated Hyperparams from a raw (config/CLI) parameter dict."""
    checked = validate_params(ARGUMENTS_SPEC_HYPERPARAMS, params, name='hyperparams')
    kernel = KernelParams(**(checked.pop('kernel') or {}))
    for alias in ('c', 'b', 'k', 'm'):
        checked.pop(alias, None)
    return validate_hyperparams(Hyperparams(kernel=kernel, **checked))


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One observed trajectory, samples has shape (T, D)."""

    id: str
    samples: np.ndarray
    rate_hz: float = 5.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise DataError("Series %s must be a non-empty (T, D) array, got shape %s"
                            % (self.id, samples.shape))
        if not np.all(np.isfinite(samples)):
            row, col = np.argwhere(~np.isfinite(samples))[0]
            raise DataError("Series %s has a non-finite value at row %d, column %d"
                            % (self.id, row, col))
        if not self.rate_hz > 0:
            raise DataError("Series %s must have a positive rate, got %s" % (self.id, self.rate_hz))
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def length(self):
        return self.samples.shape[0]

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def duration(self):
        return self.length / float(self.rate_hz)


@dataclass(frozen=True)
class ElementSegment:
    start: int
    end: int
    class_id: int

    @property
    def length(self):
        return self.end - self.start


@dataclass(frozen=True)
class UnitSegment:
    """Span over element indices [start, end) labelled with a unit class."""

    start: int
    end: int
    class_id: int

    @property
    def length(self):
        return self.end - self.start


def _check_tiling(segments, total, max_len, what):
    position = 0
    for seg in segments:
        if seg.start != position:
            raise DataError("%s segments do not tile: expected start %d, got %d"
                            % (what, position, seg.start))
        if seg.length < 1 or (max_len is not None and seg.length > max_len):
            raise DataError("%s segment [%d, %d) has length outside [1, %s]"
                            % (what, seg.start, seg.end, max_len))
        position = seg.end
    if position != total:
        raise DataError("%s segments cover [0, %d) but %d positions exist"
                        % (what, position, total))


@dataclass(frozen=True)
class ElementSegmentation:
    series_id: str
    segments: Tuple[ElementSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, 'segments', tuple(self.segments))

    def __len__(self):
        return len(self.segments)

    @property
    def labels(self):
        return [s.class_id for s in self.segments]

    @property
    def total_length(self):
        return self.segments[-1].end if self.segments else 0

    def check(self, length, max_len=None):
        _check_tiling(self.segments, length, max_len, 'Element')
        return self

    def per_sample_labels(self):
        out = np.empty(self.total_length, dtype=int)
        for seg in self.segments:
            out[seg.start:seg.end] = seg.class_id
        return out

    def to_dict(self):
        return {'series_id': self.series_id,
                'segments': [[s.start, s.end, s.class_id] for s in self.segments]}

    @classmethod
    def from_dict(cls, data):
        return cls(data['series_id'],
                   tuple(ElementSegment(int(a), int(b), int(c)) for a, b, c in data['segments']))

    @classmethod
    def from_lengths(cls, series_id, lengths, labels):
        segments, start = [], 0
        for length, label in zip(lengths, labels):
            segments.append(ElementSegment(start, start + int(length), int(label)))
            start += int(length)
        return cls(series_id, tuple(segments))


@dataclass(frozen=True)
class UnitSegmentation:
    series_id: str
    segments: Tuple[UnitSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, 'segments', tuple(self.segments))

    def __len__(self):
        return len(self.segments)

    @property
    def labels(self):
        return [s.class_id for s in self.segments]

    def check(self, n_elements, max_len=None):
        _check_tiling(self.segments, n_elements, max_len, 'Unit')
        return self

    def element_labels(self):
        out = []
        for seg in self.segments:
            out.extend([seg.class_id] * seg.length)
        return out

    def to_dict(self):
        return {'series_id': self.series_id,
                'segments': [[s.start, s.end, s.class_id] for s in self.segments]}

    @classmethod
    def from_dict(cls, data):
        return cls(data['series_id'],
                   tuple(UnitSegment(int(a), int(b), int(c)) for a, b, c in data['segments']))

    @classmethod
    def from_lengths(cls, series_id, lengths, labels):
        segments, start = [], 0
        for length, label in zip(lengths, labels):
            segments.append(UnitSegment(start, start + int(length), int(label)))
            start += int(length)
        return cls(series_id, tuple(segments))


def element_roles(unit_seg):
    """Role (begin/middle/end/single) and unit class of every element."""
    roles, classes = [], []
    for seg in unit_seg.segments:
        for j in range(seg.start, seg.end):
            if seg.length == 1:
                roles.append(ROLE_SINGLE)
            elif j == seg.start:
                roles.append(ROLE_BEGIN)
            elif j == seg.end - 1:
                roles.append(ROLE_END)
            else:
                roles.append(ROLE_MIDDLE)
            classes.append(seg.class_id)
    return np.array(classes, dtype=int), np.array(roles, dtype=int)


def unit_context(elem_seg, unit_seg, length):
    """Map the previous alignment onto timesteps.

    Returns:
        tuple -- (unit class per timestep, role per timestep), or None when no
                 unit segmentation exists yet
    """
    if elem_seg is None or unit_seg is None:
        return None
    classes, roles = element_roles(unit_seg)
    b_of_t = np.zeros(length, dtype=int)
    role_of_t = np.full(length, ROLE_MIDDLE, dtype=int)
    for j, seg in enumerate(elem_seg.segments):
        b_of_t[seg.start:seg.end] = classes[j]
        role_of_t[seg.start:seg.end] = roles[j]
    return b_of_t, role_of_t
