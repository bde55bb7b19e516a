import json
import pytest
from acdcguard import DEFAULT_CONFIG, loadConfig, mergeConfig
from acdcguard.common import ConfigError
from acdcguard.config import applySeed


def test_defaults_are_not_shared():
    config = loadConfig()
    config['model']['variant'] = 'ac'
    assert DEFAULT_CONFIG['model']['variant'] == 'acdc-vi'


def test_merge_overrides_nested_keys():
    merged = mergeConfig(DEFAULT_CONFIG, {'scenario': {'load': {'magnitude': 0.05}}})
    assert merged['scenario']['load']['magnitude'] == 0.05
    assert merged['scenario']['load']['onset'] == 5.0


def test_unknown_keys_name_their_path():
    with pytest.raises(ConfigError, match='scenario.load.magnitud'):
        mergeConfig(DEFAULT_CONFIG, {'scenario': {'load': {'magnitud': 0.05}}})
    with pytest.raises(ConfigError):
        mergeConfig(DEFAULT_CONFIG, {'detect': 3})


def test_grid_parameters_pass_through():
    merged = mergeConfig(DEFAULT_CONFIG, {'model': {'params': {'droop': 2.4}}})
    assert merged['model']['params'] == {'droop': 2.4}


def test_config_files(tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'vuln': {'stride': 5}}))
    assert loadConfig(str(path), {'vuln': {'aceMax': 0.02}})['vuln'] == {**DEFAULT_CONFIG['vuln'], 'stride': 5, 'aceMax': 0.02}
    with pytest.raises(ConfigError):
        loadConfig(str(tmp_path / 'missing.json'))
    path.write_text('{"vuln": ')
    with pytest.raises(ConfigError):
        loadConfig(str(path))


def test_one_seed_for_everything():
    config = loadConfig(override={'scenario': {'attacks': [{'entries': {'AcFlow12': 0.1}}, {'entries': {'Freq1': 0.01}}]}})
    seeded = applySeed(config, 7)
    assert seeded['scenario']['load']['seed'] == 7
    assert seeded['scenario']['noise']['seed'] == 7
    assert [attack['seed'] for attack in seeded['scenario']['attacks']] == [7, 8]
    assert 'seed' not in config['scenario']['attacks'][0]
