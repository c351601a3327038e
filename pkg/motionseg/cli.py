# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""motionseg command line.

Parameters of a command come from its argument spec defaults, then the
config file (--config), then command line flags. The command result is
printed as JSON; the exit code is 0 on success, 1 for configuration errors,
2 for data errors and 3 for numeric failures.
"""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import os
# Display writes to stdout by default, which carries the JSON result.
os.environ.setdefault('ANSIBLE_VERBOSE_TO_STDERR', 'True')

import argparse  # noqa: E402
import json  # noqa: E402
import sys  # noqa: E402

from ansible.module_utils._text import to_native  # noqa: E402

from motionseg.module_utils.common import (  # noqa: E402
    ConfigError,
    MODES,
    MotionSegError,
    display,
    dump_config,
    load_config,
    merge_params,
    validate_params,
)
from motionseg.module_utils.synth import PRESET_NAMES  # noqa: E402
from motionseg.modules import (  # noqa: E402
    motionseg_eval,
    motionseg_report,
    motionseg_segment,
    motionseg_synth,
    motionseg_train,
)

COMMANDS = {
    'train': (motionseg_train.ARGUMENTS_SPEC_TRAIN, motionseg_train.run_module),
    'segment': (motionseg_segment.ARGUMENTS_SPEC_SEGMENT, motionseg_segment.run_module),
    'eval': (motionseg_eval.ARGUMENTS_SPEC_EVAL, motionseg_eval.run_module),
    'synth': (motionseg_synth.ARGUMENTS_SPEC_SYNTH_MODULE, motionseg_synth.run_module),
    'report': (motionseg_report.ARGUMENTS_SPEC_REPORT, motionseg_report.run_module),
}

INGEST_FLAGS = [
    ('--corpus', 'corpus', dict(help='corpus CSV file or directory')),
    ('--id-column', 'id_column', dict()),
    ('--time-column', 'time_column', dict()),
    ('--value-columns', 'value_columns', dict(nargs='+')),
    ('--rate-hz', 'rate_hz', dict(type=float)),
]

HYPERPARAM_FLAGS = [
    ('--n-element-classes', 'hyperparams.n_element_classes', dict(type=int, help='C')),
    ('--n-unit-classes', 'hyperparams.n_unit_classes', dict(type=int, help='B')),
    ('--max-element-len', 'hyperparams.max_element_len', dict(type=int, help='K')),
    ('--max-unit-len', 'hyperparams.max_unit_len', dict(type=int, help="K'")),
    ('--lambda-p', 'hyperparams.lambda_p', dict(type=float)),
    ('--lambda-b', 'hyperparams.lambda_b', dict(type=float)),
    ('--alpha', 'hyperparams.alpha', dict(type=float)),
    ('--mu', 'hyperparams.mu', dict(type=float)),
    ('--iterations', 'hyperparams.iterations', dict(type=int, help='M')),
    ('--restarts', 'hyperparams.n_restarts', dict(type=int)),
    ('--seed', 'hyperparams.seed', dict(type=int)),
    ('--noise-var', 'hyperparams.kernel.noise_var', dict(type=float)),
    ('--gp-cap', 'hyperparams.gp_cap', dict(type=int)),
]

FLAGS = {
    'train': INGEST_FLAGS + HYPERPARAM_FLAGS + [
        ('--output-dir', 'output_dir', dict()),
        ('--mode', 'mode', dict(action='append', choices=MODES)),
        ('--n-jobs', 'n_jobs', dict(type=int)),
        ('--no-checkpoints', 'checkpoints', dict(action='store_const', const=False)),
        ('--standardize', 'standardize', dict(action='store_const', const=True)),
    ],
    'segment': INGEST_FLAGS + [
        ('--model', 'model', dict()),
        ('--output', 'output', dict()),
        ('--seed', 'seed', dict(type=int)),
    ],
    'eval': [
        ('--run-dir', 'run_dir', dict()),
        ('--segmentation', 'segmentation', dict()),
        ('--truth', 'truth', dict()),
        ('--mode', 'mode', dict(action='append', choices=MODES)),
        ('--class-mapping', 'class_mapping', dict(choices=['greedy', 'hungarian'])),
        ('--output-dir', 'output_dir', dict()),
    ],
    'synth': [
        ('--output-dir', 'output_dir', dict()),
        ('--seed', 'seed', dict(type=int)),
        ('--preset', 'synth.preset', dict(choices=PRESET_NAMES)),
        ('--fluctuation', 'synth.fluctuation', dict(type=float)),
        ('--noise-sigma', 'synth.noise_sigma', dict(type=float)),
        ('--n-cycles', 'synth.n_cycles', dict(type=int)),
        ('--n-workers', 'synth.n_workers', dict(type=int)),
        ('--dim', 'synth.dim', dict(type=int)),
    ],
    'report': [
        ('--eval', 'eval', dict()),
        ('--output-dir', 'output_dir', dict()),
        ('--bins', 'bins', dict(type=int)),
        ('--rate-hz', 'rate_hz', dict(type=float)),
        ('--max-sequences', 'max_sequences', dict(type=int)),
        ('--unit-ratio', 'unit_ratio', dict(type=float)),
        ('--no-plots', 'plots', dict(action='store_const', const=False)),
    ],
}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises ConfigError instead of exiting with 2."""

    def error(self, message):
        raise ConfigError("%s: %s" % (self.prog, message))


def build_parser():
    parser = CliParser(prog='motionseg',
                       description='Unsupervised two-layer segmentation of motion time series')
    subparsers = parser.add_subparsers(dest='command')
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument('--config', help='JSON or YAML file with parameters of this command')
        sub.add_argument('--dump-config', action='store_true',
                         help='print the effective parameters and exit')
        sub.add_argument('-v', '--verbose', action='count', default=0)
        for flag, dest, kwargs in FLAGS[command]:
            sub.add_argument(flag, dest=dest, default=None, **kwargs)
    return parser


def flags_to_params(args, command):
    """Nested parameter dict of the flags given on the command line."""
    params = {}
    for _, dest, _ in FLAGS[command]:
        value = getattr(args, dest, None)
        if value is None:
            continue
        node = params
        keys = dest.split('.')
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    return params


def config_params(path, command, spec):
    """Parameters of command from a config file.

    Top-level keys known to the command apply, and a section named after
    the command overrides them, so one file can serve every command.
    """
    if not path:
        return {}
    config = load_config(path)
    section = config.get(command) if isinstance(config.get(command), dict) else {}
    shared = dict((k, v) for k, v in config.items() if k in spec)
    return merge_params(shared, section)


def run(command, params):
    return COMMANDS[command][1](params)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise ConfigError("A command is required: %s" % ", ".join(COMMANDS))
        display.verbosity = args.verbose
        spec, _ = COMMANDS[args.command]
        params = merge_params(config_params(args.config, args.command, spec),
                              flags_to_params(args, args.command))
        if args.dump_config:
            print(dump_config(validate_params(spec, params, name='%s parameters' % args.command)),
                  end='')
            return 0
        results = run(args.command, params)
    except MotionSegError as e:
        print(json.dumps({'failed': True, 'msg': to_native(e.message), 'rc': e.rc}, sort_keys=True))
        return e.rc
    print(json.dumps(results, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == '__main__':
    sys.exit(main())
