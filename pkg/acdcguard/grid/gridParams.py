import numpy as np
from dataclasses import dataclass, fields, replace
from typing import Any
from ..common.errors import ConfigError


def _perArea(value: Any, name: str) -> tuple[float, float]:
    """
    a scalar is shared by both areas, otherwise one value per area
    """
    values = np.asarray(value, dtype=float)
    if values.ndim == 0:
        values = np.full(2, float(values))
    if values.shape != (2,):
        raise ConfigError(f'{name} needs one value per area, got {value!r}')
    return tuple(float(v) for v in values)


def _perGenerator(value: Any, name: str) -> tuple[tuple[float, float], tuple[float, float]]:
    """
    scalar -> every generator, one value per area -> both generators of that area,
    2x2 -> [area][generator]
    """
    values = np.asarray(value, dtype=float)
    if values.ndim == 0:
        values = np.full((2, 2), float(values))
    elif values.shape == (2,):
        values = np.repeat(values[:, None], 2, axis=1)
    if values.shape != (2, 2):
        raise ConfigError(f'{name} needs a 2x2 [area][generator] layout, got {value!r}')
    return tuple(tuple(float(v) for v in row) for row in values)


@dataclass(frozen=True)
class GridParams:
    """
    physical and control constants of the two-area system

    per area (area 1, area 2):
        systemGain K_p (pu/pu), systemTimeConstant T_p (s), frequencyBias beta (pu/Hz),
        integralGain K_I (1/s), emulatedInertia J_em (pu per rad/s^2), essTimeConstant T_ESS (s)
    per generator [area][generator]:
        droop R (Hz/pu), turbineTimeConstant T_ch (s), participation phi
    links:
        tieCoefficient T_12 (pu/rad), spmcGains K_1, K_2 (pu per rad/s), spmcAcGain K_AC,
        dcTimeConstant T_DC (s)
    """
    systemGain: tuple[float, float]
    systemTimeConstant: tuple[float, float]
    frequencyBias: tuple[float, float]
    integralGain: tuple[float, float]
    droop: tuple[tuple[float, float], tuple[float, float]]
    turbineTimeConstant: tuple[tuple[float, float], tuple[float, float]]
    participation: tuple[tuple[float, float], tuple[float, float]]
    tieCoefficient: float
    spmcGains: tuple[float, float]
    spmcAcGain: float
    dcTimeConstant: float
    emulatedInertia: tuple[float, float]
    essTimeConstant: tuple[float, float]
    nominalFrequency: float = 2 * np.pi * 60

    perArea = ('systemGain', 'systemTimeConstant', 'frequencyBias', 'integralGain',
               'spmcGains', 'emulatedInertia', 'essTimeConstant')
    perGenerator = ('droop', 'turbineTimeConstant', 'participation')

    def __post_init__(self) -> None:
        for field in fields(self):
            value = getattr(self, field.name)
            if field.name in self.perArea:
                value = _perArea(value, field.name)
            elif field.name in self.perGenerator:
                value = _perGenerator(value, field.name)
            else:
                value = float(value)
            object.__setattr__(self, field.name, value)
        self.validate()

    def validate(self) -> None:
        def check(condition: bool, message: str) -> None:
            if not condition:
                raise ConfigError(message)

        check(all(np.isfinite(np.ravel(getattr(self, f.name))).all() for f in fields(self)), 'parameters have to be finite')
        check(min(self.systemGain) > 0, 'system gains K_p have to be positive')
        check(min(self.systemTimeConstant) > 0, 'system time constants T_p have to be positive')
        check(min(np.ravel(self.turbineTimeConstant)) > 0, 'turbine time constants T_ch have to be positive')
        check(min(np.ravel(self.droop)) > 0, 'droops R have to be positive')
        check(self.dcTimeConstant > 0, 'dc time constant T_DC has to be positive')
        check(min(self.essTimeConstant) > 0, 'ess time constants T_ESS have to be positive')
        check(min(self.emulatedInertia) >= 0, 'emulated inertia gains J_em cannot be negative')
        check(self.nominalFrequency > 0, 'nominal frequency has to be positive')
        for area, factors in enumerate(self.participation):
            check(abs(sum(factors) - 1.0) <= 1e-9, f'participation factors of area {area + 1} have to add up to 1, got {factors}')

    @property
    def inertiaWeights(self) -> tuple[float, float]:
        """
        2H per area, recovered from K_p = 1/D and T_p = 2H/D
        """
        return tuple(tp / kp for tp, kp in zip(self.systemTimeConstant, self.systemGain))

    @classmethod
    def default(cls) -> 'GridParams':
        """
        two identical areas; stable in all three variants, the virtual-inertia
        variant damps load steps best and is the most exposed to biased
        measurements
        """
        return cls(systemGain=4.4, systemTimeConstant=8.4, frequencyBias=0.8, integralGain=0.12,
                   droop=4.2, turbineTimeConstant=0.95, participation=0.5,
                   tieCoefficient=0.0075, spmcGains=(0.053, -0.053), spmcAcGain=0.33, dcTimeConstant=0.93,
                   emulatedInertia=0.9, essTimeConstant=0.32)

    @classmethod
    def stressed(cls) -> 'GridParams':
        """
        low inertia, weak primary response and slow secondary control;
        a disruptive stealthy attack on the ac/dc flows exists for the
        virtual-inertia variant
        """
        return cls(systemGain=3.0, systemTimeConstant=12.0, frequencyBias=0.2, integralGain=0.011,
                   droop=300.0, turbineTimeConstant=0.45, participation=0.5,
                   tieCoefficient=0.0015, spmcGains=(0.002, -0.002), spmcAcGain=-0.285, dcTimeConstant=0.05,
                   emulatedInertia=0.028, essTimeConstant=1.4)

    @classmethod
    def preset(cls, name: str) -> 'GridParams':
        presets = {'default': cls.default, 'stressed': cls.stressed}
        if name not in presets:
            raise ConfigError(f"unknown parameter preset '{name}', choose from {sorted(presets)}")
        return presets[name]()

    @classmethod
    def fromDict(cls, overrides: dict, preset: str = 'default') -> 'GridParams':
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f'unknown grid parameters: {sorted(unknown)}')
        return replace(cls.preset(preset), **overrides)

    def asDict(self) -> dict:
        return {f.name: np.asarray(getattr(self, f.name)).tolist() for f in fields(self)}
