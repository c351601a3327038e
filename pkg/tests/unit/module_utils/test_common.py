from __future__ import (absolute_import, division, print_function)
__metaclass__ = type

import numpy as np
import pytest
import yaml

from motionseg.module_utils.common import (
    ConfigError,
    DataError,
    InfeasibleLatticeError,
    NumericError,
    dump_config,
    load_config,
    lower_keys,
    make_rng,
    merge_params,
    normalize_log,
    read_json,
    sample_index,
    validate_params,
)


@pytest.mark.parametrize('test_input, expected', [
    (["AAA", "BBB"], ["AAA", "BBB"]),
    ("AAQQ", "AAQQ"),
    ({"AAA": "AaaAa", "11": 22, "AbCdEf": None, "bbb": "aaaAA"},
     {"aaa": "AaaAa", "11": 22, "abcdef": None, "bbb": "aaaAA"})
])
def test_lower_keys(test_input, expected):
    assert lower_keys(test_input) == expected


@pytest.mark.parametrize('error, rc', [
    (ConfigError("x"), 1),
    (DataError("x"), 2),
    (NumericError("x"), 3),
    (InfeasibleLatticeError(4), 3),
])
def test_error_exit_codes(error, rc):
    assert error.rc == rc


def test_infeasible_lattice_error_names_sequence_and_iteration():
    err = InfeasibleLatticeError(7, layer='upper').locate(sequence_id='w1-c01', iteration=3)
    assert err.position == 7
    assert 'w1-c01' in err.message
    assert 'iteration 3' in err.message
    assert 'upper' in err.message


SPEC = dict(
    name=dict(type='str', required=True),
    size=dict(type='int', default=3),
    color=dict(type='str', default='red', choices=['red', 'blue']),
)


def test_validate_params_fills_defaults():
    assert validate_params(SPEC, {'name': 'a'}) == {'name': 'a', 'size': 3, 'color': 'red'}


@pytest.mark.parametrize('params, needle', [
    ({}, 'name'),
    ({'name': 'a', 'color': 'green'}, 'color'),
    ({'name': 'a', 'size': 'many'}, 'size'),
])
def test_validate_params_names_offending_key(params, needle):
    with pytest.raises(ConfigError) as e:
        validate_params(SPEC, params)
    assert needle in e.value.message


def test_merge_params_precedence():
    defaults = {'a': 1, 'nested': {'x': 1, 'y': 2}}
    config = {'a': 2, 'nested': {'y': 3}}
    flags = {'a': None, 'nested': {'x': 5}}
    assert merge_params(defaults, config, flags) == {'a': 2, 'nested': {'x': 5, 'y': 3}}


@pytest.mark.parametrize('suffix', ['json', 'yml'])
def test_config_round_trip(tmp_path, suffix):
    data = {'mode': ['meu', 'ws'], 'hyperparams': {'n_element_classes': 12, 'alpha': 10.0,
                                                   'kernel': {'theta3': 16.0}},
            'corpus': 'data/corpus.csv'}
    path = tmp_path / ('config.' + suffix)
    if suffix == 'json':
        dump_config(data, str(path))
    else:
        path.write_text(yaml.safe_dump(data))
    loaded = load_config(str(path))
    assert loaded == data
    again = tmp_path / 'again.json'
    dump_config(loaded, str(again))
    assert load_config(str(again)) == data


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'missing.json'))
    bad = tmp_path / 'bad.json'
    bad.write_text('{"a": ')
    with pytest.raises(ConfigError):
        load_config(str(bad))
    listed = tmp_path / 'list.yaml'
    listed.write_text('- 1\n- 2\n')
    with pytest.raises(ConfigError):
        load_config(str(listed))


def test_read_json_missing(tmp_path):
    with pytest.raises(DataError):
        read_json(str(tmp_path / 'nope.json'))


def test_make_rng_is_deterministic_and_keyed():
    assert make_rng(5, 1).random() == make_rng(5, 1).random()
    assert make_rng(5, 1).random() != make_rng(5, 2).random()


def test_sample_index_follows_weights():
    rng = make_rng(0)
    draws = [sample_index(rng, np.log([0.0, 1.0, 0.0])) for _ in range(50)]
    assert set(draws) == {1}
    with pytest.raises(NumericError):
        sample_index(rng, np.full(3, -np.inf))


def test_normalize_log():
    out = normalize_log(np.log([[1.0, 3.0], [2.0, 2.0]]), axis=1)
    np.testing.assert_allclose(np.exp(out), [[0.25, 0.75], [0.5, 0.5]])
