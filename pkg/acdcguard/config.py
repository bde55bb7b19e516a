import copy
import json
from .common.errors import ConfigError

# sections whose keys are checked elsewhere (grid parameters by GridParams)
OPEN_SECTIONS = ('model.params',)

DEFAULT_CONFIG = {
    'model': {
        'variant': 'acdc-vi',
        'preset': 'default',
        'params': {},
        'samplingTime': 0.04,
        'droopSign': 'auto'
    },
    'scenario': {
        'horizon': 30.0,            # seconds
        'load': {
            'kind': 'step',
            'area': 1,
            'magnitude': 0.03,      # 3 % load increase
            'onset': 5.0,           # seconds
            'rates': [0.5, 0.5],
            'volatilities': [0.01, 0.01],
            'seed': 0
        },
        'attacks': [],              # list of attack scenarios, onsets in samples
        'noise': {
            'enabled': False,
            'frequencyVariance': 0.0009,
            'otherVariance': 0.03,
            'measurementVariance': 0.0,
            'seed': 0
        }
    },
    'vuln': {
        'dwMin': -0.1,
        'dwMax': 0.1,
        'aceMax': 0.05,
        'pdcRefMax': 0.1,
        'mfdLimit': 0.8,
        'anchorChannel': 'AcFlow12',
        'anchorValue': None,        # None: smallest disruptive value on the anchor
        'protected': [],
        'horizon': 750,
        'stride': 1,
        'bigM': 10.0,
        'area': 1,
        'mode': 'bias'
    },
    'detect': {
        'channels': ['AcFlow12', 'DcFlow12'],
        'degree': 3,
        'pole': 0.1,
        'eta': 5e4,
        'alarmK': 3.0
    },
    'sweep': {
        'channel': 'AcFlow12',
        'start': 0.0,
        'stop': 1.0,
        'num': 21,
        'variants': ['ac', 'acdc', 'acdc-vi'],
        'horizon': 750,
        'area': 1
    },
    'output': {
        'directory': 'results'
    }
}


def mergeConfig(base: dict, override: dict, path: str = '') -> dict:
    """
    returns a copy of base updated with override; keys unknown to base are
    rejected, except inside the open sections
    """
    if not isinstance(override, dict):
        raise ConfigError(f"section '{path or '<root>'}' has to be a mapping, got {type(override).__name__}")
    merged = copy.deepcopy(base)
    for key, value in override.items():
        dotted = f'{path}.{key}' if path else key
        if key not in merged:
            if path in OPEN_SECTIONS:
                merged[key] = copy.deepcopy(value)
                continue
            raise ConfigError(f"unknown config key '{dotted}'")
        if isinstance(merged[key], dict) and dotted not in OPEN_SECTIONS:
            merged[key] = mergeConfig(merged[key], value, dotted)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def loadConfig(path: str | None = None, override: dict | None = None) -> dict:
    """
    defaults, then the json file at path, then the override dict
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, 'r') as file:
                userConfig = json.load(file)
        except FileNotFoundError:
            raise ConfigError(f'config file {path} not found') from None
        except json.JSONDecodeError as error:
            raise ConfigError(f'config file {path} is not valid json: {error}') from None
        config = mergeConfig(config, userConfig)
    if override:
        config = mergeConfig(config, override)
    return config


def applySeed(config: dict, seed: int) -> dict:
    """
    one seed for the load, the noise and every random attack
    """
    config = copy.deepcopy(config)
    scenario = config['scenario']
    scenario['load']['seed'] = seed
    scenario['noise']['seed'] = seed
    for offset, attack in enumerate(scenario['attacks']):
        attack['seed'] = seed + offset
    return config
