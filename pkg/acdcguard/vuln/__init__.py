from .stealthSet import StealthSpec, StealthSet, stepResponseCoeffs, buildStealthSet
from .vulnerability import VulnResult, findDisruptiveStealthy, enumerateOracle
