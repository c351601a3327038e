# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import json
import os

import numpy as np
import yaml
from scipy.special import logsumexp

from ansible.errors import AnsibleError
from ansible.module_utils._text import to_native, to_text
from ansible.module_utils.common.arg_spec import ArgumentSpecValidator
from ansible.utils.display import Display

display = Display()

MODES = ['ws', 'meu', 'meb', 'lower-only']
ROLE_BEGIN, ROLE_MIDDLE, ROLE_END, ROLE_SINGLE = 0, 1, 2, 3
ROLE_NAMES = {
    ROLE_BEGIN: 'begin',
    ROLE_MIDDLE: 'middle',
    ROLE_END: 'end',
    ROLE_SINGLE: 'single',
}


class MotionSegError(AnsibleError):
    """Base class of all errors raised by motionseg."""

    rc = 1

    def __init__(self, message='', **kwargs):
        super(MotionSegError, self).__init__(message)
        self.details = kwargs


class ConfigError(MotionSegError):
    rc = 1


class DataError(MotionSegError):
    rc = 2


class NumericError(MotionSegError):
    rc = 3


class InfeasibleLatticeError(NumericError):
    """No segmentation of the sequence carries probability mass.

    Arguments:
        position {int} -- first lattice column with all entries at log-zero
        sequence_id {str} -- id of the sequence being filtered, if known
        iteration {int} -- mutual-update iteration, if known
    """

    def __init__(self, position, sequence_id=None, iteration=None, layer='lower'):
        self.position = position
        self.sequence_id = sequence_id
        self.iteration = iteration
        self.layer = layer
        super(InfeasibleLatticeError, self).__init__(self._format())

    def _format(self):
        msg = "No feasible %s segmentation at position %s" % (self.layer, self.position)
        if self.sequence_id is not None:
            msg += " of sequence %s" % self.sequence_id
        if self.iteration is not None:
            msg += " (iteration %s)" % self.iteration
        return msg

    def locate(self, sequence_id=None, iteration=None):
        """Return a copy that names the sequence id and iteration."""
        return InfeasibleLatticeError(
            self.position,
            sequence_id if sequence_id is not None else self.sequence_id,
            iteration if iteration is not None else self.iteration,
            layer=self.layer)


def lower_keys(x):
    if isinstance(x, list):
        return [lower_keys(v) for v in x]
    elif isinstance(x, dict):
        return dict((k.lower(), lower_keys(v)) for k, v in x.items())
    else:
        return x


def validate_params(argument_spec, params, name='config'):
    """Validate a parameter dict against an Ansible-style argument spec.

    Args:
        argument_spec (dict): spec in the AnsibleModule format
        params (dict): raw parameters, missing keys take the spec defaults
        name (str): what is being validated, used in the error message

    Returns:
        dict: validated parameters with defaults filled in

    Raises:
        ConfigError: listing every validation failure
    """
    validator = ArgumentSpecValidator(argument_spec)
    result = validator.validate(lower_keys(dict(params or {})))
    if result.error_messages:
        raise ConfigError("Invalid %s: %s" % (name, "; ".join(result.error_messages)))
    return result.validated_parameters


def merge_params(*layers):
    """Merge parameter layers left to right, skipping None values."""
    merged = {}
    for layer in layers:
        for key, value in (layer or {}).items():
            if value is None:
                continue
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = merge_params(merged[key], value)
            else:
                merged[key] = value
    return merged


def load_config(path):
    """Read a JSON or YAML config file into a dict."""
    path = os.path.expanduser(path)
    if not os.path.isfile(path):
        raise ConfigError("Config file %s does not exist" % path)
    with open(path, 'r') as config_file:
        content = config_file.read()
    try:
        if path.endswith(('.yml', '.yaml')):
            data = yaml.safe_load(content)
        else:
            data = json.loads(content)
    except (ValueError, yaml.YAMLError) as e:
        raise ConfigError("Can not parse config %s: %s" % (path, to_native(e)))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("Config %s must hold a mapping, got %s" % (path, type(data).__name__))
    return data


def dump_config(data, path=None):
    """Serialize a config dict as JSON, optionally writing it to path."""
    content = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        ensure_dir(os.path.dirname(os.path.abspath(path)))
        with open(path, 'w') as f:
            f.write(content)
    return content


def ensure_dir(path):
    full_path = os.path.expanduser(path)
    if not os.path.exists(full_path):
        os.makedirs(full_path)
    if not os.path.isdir(full_path):
        raise DataError("Path %s is not a directory!" % full_path)
    return full_path


def write_json(path, data):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w') as f:
        json.dump(data, f, indent=1, sort_keys=True)
        f.write("\n")


def read_json(path):
    if not os.path.isfile(path):
        raise DataError("File %s does not exist" % path)
    with open(path, 'r') as f:
        try:
            return json.load(f)
        except ValueError as e:
            raise DataError("Can not parse %s: %s" % (path, to_text(e)))


def make_rng(seed, *keys):
    """Return a numpy Generator derived deterministically from seed and keys."""
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [int(k) for k in keys]))


def sample_index(rng, log_weights):
    """Draw one flat index with probability proportional to exp(log_weights)."""
    flat = np.ravel(log_weights)
    top = np.max(flat)
    if not np.isfinite(top):
        raise NumericError("Can not sample from an all log-zero distribution")
    weights = np.exp(flat - top)
    cdf = np.cumsum(weights)
    u = rng.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, u, side='right')), flat.size - 1)


def normalize_log(x, axis=-1):
    """Normalize log-weights along axis so that they exponentiate to 1."""
    x = np.asarray(x, dtype=float)
    return x - logsumexp(x, axis=axis, keepdims=True)
