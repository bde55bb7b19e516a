from .acdcguard import AcDcGuard
from .config import DEFAULT_CONFIG, loadConfig, mergeConfig
from . import common, grid, sim, vuln, detectors
