import hashlib
import logging
import warnings
import numpy as np
from dataclasses import dataclass, replace
from enum import Enum
from .gridParams import GridParams
from ..common.errors import ConfigError
from ..common.numerics import zohDiscretize

logger = logging.getLogger(__name__)


STATE_LABELS = ('dw1', 'dw2', 'dPm11', 'dPm12', 'dPm21', 'dPm22',
                'dPagc1', 'dPagc2', 'dPac12', 'dPdc12', 'dPess1', 'dPess2')
CHANNEL_LABELS = ('Freq1', 'Freq2', 'AcFlow12', 'DcFlow12')
FREQUENCY_CHANNELS = ('Freq1', 'Freq2')
DISTURBANCE_LABELS = ('dPL1', 'dPL2')


class Variant(Enum):
    AC_ONLY = 'ac'
    AC_DC = 'acdc'
    AC_DC_VI = 'acdc-vi'

    @property
    def hasDc(self) -> bool:
        return self is not Variant.AC_ONLY

    @property
    def hasEss(self) -> bool:
        return self is Variant.AC_DC_VI

    @classmethod
    def parse(cls, value: 'Variant | str') -> 'Variant':
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown variant '{value}', choose from {[v.value for v in cls]}") from None

    @property
    def stateLabels(self) -> tuple[str, ...]:
        labels = STATE_LABELS
        if not self.hasEss:
            labels = labels[:10]
        if not self.hasDc:
            labels = labels[:9]
        return labels

    @property
    def channelLabels(self) -> tuple[str, ...]:
        return CHANNEL_LABELS if self.hasDc else CHANNEL_LABELS[:3]


def _frozen(array: np.ndarray | None) -> np.ndarray | None:
    if array is None:
        return None
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LtiModel:
    """
    continuous (Ac, Bcd, Bcf, C) and, once discretized, discrete (A, Bd, Bf, C)
    frequency-dynamics model; frequency states and channels are in rad/s
    """
    variant: Variant
    params: GridParams
    Ac: np.ndarray
    Bcd: np.ndarray
    Bcf: np.ndarray
    C: np.ndarray
    A: np.ndarray | None = None
    Bd: np.ndarray | None = None
    Bf: np.ndarray | None = None
    samplingTime: float | None = None
    signConvention: str = 'printed'
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ('Ac', 'Bcd', 'Bcf', 'C', 'A', 'Bd', 'Bf'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n, nY = self.numStates, self.numChannels
        assert self.Ac.shape == (n, n), f'Ac should be {n}x{n} for {self.variant.value}'
        assert self.Bcd.shape == (n, len(DISTURBANCE_LABELS)), 'Bcd does not fit the disturbances'
        assert self.Bcf.shape == (n, nY), 'Bcf needs one column per channel'
        assert self.C.shape == (nY, n), 'C needs one row per channel'

    @property
    def stateLabels(self) -> tuple[str, ...]:
        return self.variant.stateLabels

    @property
    def channelLabels(self) -> tuple[str, ...]:
        return self.variant.channelLabels

    @property
    def disturbanceLabels(self) -> tuple[str, ...]:
        return DISTURBANCE_LABELS

    @property
    def numStates(self) -> int:
        return len(self.stateLabels)

    @property
    def numChannels(self) -> int:
        return len(self.channelLabels)

    @property
    def isDiscrete(self) -> bool:
        return self.A is not None

    def channelIndex(self, channel: str) -> int:
        if channel not in self.channelLabels:
            raise ConfigError(f"channel '{channel}' does not exist in the {self.variant.value} model, choose from {self.channelLabels}")
        return self.channelLabels.index(channel)

    def frequencyMask(self) -> np.ndarray:
        """
        True for channels measured in rad/s internally and Hz outside
        """
        return np.array([channel in FREQUENCY_CHANNELS for channel in self.channelLabels])

    def toInternal(self, values: np.ndarray) -> np.ndarray:
        """
        Hz -> rad/s on frequency channels, last axis runs over channels
        """
        return np.asarray(values, dtype=float) * np.where(self.frequencyMask(), 2 * np.pi, 1.0)

    def toExternal(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) / np.where(self.frequencyMask(), 2 * np.pi, 1.0)

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.variant.value.encode())
        digest.update(','.join(self.stateLabels + self.channelLabels).encode())
        for matrix in (self.Ac, self.Bcd, self.Bcf, self.C, self.A, self.Bd, self.Bf):
            if matrix is not None:
                digest.update(np.ascontiguousarray(matrix).tobytes())
        if self.samplingTime is not None:
            digest.update(repr(self.samplingTime).encode())
        return digest.hexdigest()

    def asDict(self) -> dict:
        data = {'variant': self.variant.value,
                'params': self.params.asDict(),
                'signConvention': self.signConvention,
                'notes': list(self.notes),
                'stateLabels': list(self.stateLabels),
                'channelLabels': list(self.channelLabels),
                'disturbanceLabels': list(self.disturbanceLabels),
                'samplingTime': self.samplingTime,
                'fingerprint': self.fingerprint()}
        for name in ('Ac', 'Bcd', 'Bcf', 'C', 'A', 'Bd', 'Bf'):
            matrix = getattr(self, name)
            data[name] = None if matrix is None else matrix.tolist()
        return data

    @classmethod
    def fromDict(cls, data: dict) -> 'LtiModel':
        variant = Variant.parse(data['variant'])
        if list(data['stateLabels']) != list(variant.stateLabels) or list(data['channelLabels']) != list(variant.channelLabels):
            raise ConfigError('label order of the stored model does not match this version')
        matrices = {name: None if data.get(name) is None else np.array(data[name], dtype=float)
                    for name in ('Ac', 'Bcd', 'Bcf', 'C', 'A', 'Bd', 'Bf')}
        return cls(variant=variant, params=GridParams(**data['params']), samplingTime=data.get('samplingTime'),
                   signConvention=data.get('signConvention', 'printed'), notes=tuple(data.get('notes', ())), **matrices)


@dataclass
class StabilityReport:
    eigenvalues: np.ndarray
    moduli: np.ndarray
    stable: bool

    @property
    def spectralRadius(self) -> float:
        return float(self.moduli.max())

    def asDict(self) -> dict:
        return {'stable': self.stable,
                'spectralRadius': self.spectralRadius,
                'moduli': self.moduli.tolist(),
                'eigenvaluesReal': self.eigenvalues.real.tolist(),
                'eigenvaluesImag': self.eigenvalues.imag.tolist()}


def _assemble(variant: Variant, p: GridParams, droopSign: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    labels = variant.stateLabels
    index = {label: i for i, label in enumerate(labels)}
    n = len(labels)
    Ac = np.zeros((n, n))
    Bcd = np.zeros((n, len(DISTURBANCE_LABELS)))
    twoPi = 2 * np.pi
    ac = index['dPac12']

    for area in range(2):
        w = index[f'dw{area + 1}']
        agc = index[f'dPagc{area + 1}']
        # area 1 exports the tie flows, area 2 imports them
        tieSign = -1.0 if area == 0 else 1.0
        gain = p.nominalFrequency * p.systemGain[area] / p.systemTimeConstant[area]

        Ac[w, w] = -1.0 / p.systemTimeConstant[area]
        Ac[w, ac] = tieSign * gain
        if variant.hasDc:
            Ac[w, index['dPdc12']] = tieSign * gain
        if variant.hasEss:
            Ac[w, index[f'dPess{area + 1}']] = -gain
        Bcd[w, area] = -gain

        for generator in range(2):
            m = index[f'dPm{area + 1}{generator + 1}']
            timeConstant = p.turbineTimeConstant[area][generator]
            Ac[m, m] = -1.0 / timeConstant
            Ac[m, w] = droopSign / (twoPi * p.droop[area][generator] * timeConstant)
            Ac[m, agc] = -p.participation[area][generator] / timeConstant
            Ac[w, m] = gain

        Ac[agc, w] = p.integralGain[area] * p.frequencyBias[area] / twoPi
        Ac[agc, ac] = -tieSign * p.integralGain[area]
        if variant.hasDc:
            Ac[agc, index['dPdc12']] = -tieSign * p.integralGain[area]

    Ac[ac, index['dw1']] = p.tieCoefficient
    Ac[ac, index['dw2']] = -p.tieCoefficient

    if variant.hasDc:
        dc = index['dPdc12']
        Ac[dc, index['dw1']] = p.spmcGains[0] / p.dcTimeConstant
        Ac[dc, index['dw2']] = p.spmcGains[1] / p.dcTimeConstant
        Ac[dc, ac] = p.spmcAcGain / p.dcTimeConstant
        Ac[dc, dc] = -1.0 / p.dcTimeConstant

    if variant.hasEss:
        # the ess state is the emulated power J s/(1 + s T) applied to dw,
        # the derivative of dw is substituted by its swing row
        for area in range(2):
            w = index[f'dw{area + 1}']
            e = index[f'dPess{area + 1}']
            scale = p.emulatedInertia[area] / p.essTimeConstant[area]
            Ac[e] = scale * Ac[w]
            Ac[e, e] -= 1.0 / p.essTimeConstant[area]
            Bcd[e] = scale * Bcd[w]

    C = np.zeros((len(variant.channelLabels), n))
    outputs = ('dw1', 'dw2', 'dPac12', 'dPdc12')
    for row, label in enumerate(outputs[:len(variant.channelLabels)]):
        C[row, index[label]] = 1.0
    return Ac, Bcd, C


def buildAttackMatrix(variant: Variant | str, p: GridParams) -> np.ndarray:
    """
    how biased measurements enter the controller states: the agc integrators
    see the corrupted ace, the dc link sees the corrupted spmc reference.
    frequency columns are per rad/s of injected bias
    """
    variant = Variant.parse(variant)
    index = {label: i for i, label in enumerate(variant.stateLabels)}
    Bcf = np.zeros((len(variant.stateLabels), len(variant.channelLabels)))
    agc1, agc2 = index['dPagc1'], index['dPagc2']
    KI, beta = p.integralGain, p.frequencyBias

    Bcf[agc1, 0] = KI[0] * beta[0] / (2 * np.pi)
    Bcf[agc2, 1] = KI[1] * beta[1] / (2 * np.pi)
    # one shared tie-line measurement, area 2 sees it negated
    Bcf[agc1, 2] = KI[0]
    Bcf[agc2, 2] = -KI[1]
    if variant.hasDc:
        dc = index['dPdc12']
        Bcf[dc, 0] = p.spmcGains[0] / p.dcTimeConstant
        Bcf[dc, 1] = p.spmcGains[1] / p.dcTimeConstant
        Bcf[dc, 2] = p.spmcAcGain / p.dcTimeConstant
        Bcf[agc1, 3] = KI[0]
        Bcf[agc2, 3] = -KI[1]
    return Bcf


def buildContinuous(variant: Variant | str, p: GridParams, droopSign: str = 'auto') -> LtiModel:
    """
    droopSign: 'printed' keeps +dw/(2 pi R) in the turbine-governor rows,
    'standard' uses the usual -dw/(2 pi R), 'auto' starts from the printed form
    and switches to the standard one if the printed form is unstable
    """
    variant = Variant.parse(variant)
    if droopSign not in ('printed', 'standard', 'auto'):
        raise ConfigError(f"droopSign has to be 'printed', 'standard' or 'auto', got '{droopSign}'")

    notes = []
    if not variant.hasDc and (any(p.spmcGains) or p.spmcAcGain or any(p.emulatedInertia)):
        warnings.warn('the ac-only variant ignores the spmc and inertia emulation gains')
        notes.append('spmc and inertia emulation gains ignored')
    elif variant is Variant.AC_DC and any(p.emulatedInertia):
        notes.append('inertia emulation gains ignored')

    convention = 'standard' if droopSign == 'standard' else 'printed'
    Ac, Bcd, C = _assemble(variant, p, 1.0 if convention == 'printed' else -1.0)
    if droopSign == 'auto' and np.max(np.linalg.eigvals(Ac).real) >= 0:
        convention = 'standard'
        Ac, Bcd, C = _assemble(variant, p, -1.0)
        logger.info('printed droop sign is unstable for the %s variant, using -dw/(2 pi R)', variant.value)
        notes.append('droop sign flipped to the standard convention for stability')

    return LtiModel(variant=variant, params=p, Ac=Ac, Bcd=Bcd, Bcf=buildAttackMatrix(variant, p), C=C,
                    signConvention=convention, notes=tuple(notes))


def discretizeModel(model: LtiModel, samplingTime: float) -> LtiModel:
    inputs = np.hstack([model.Bcd, model.Bcf])
    A, B = zohDiscretize(model.Ac, inputs, samplingTime)
    numDisturbances = model.Bcd.shape[1]
    return replace(model, A=A, Bd=B[:, :numDisturbances], Bf=B[:, numDisturbances:], samplingTime=float(samplingTime))


def validateStability(model: LtiModel, margin: float = 1e-9) -> StabilityReport:
    if not model.isDiscrete:
        raise ValueError('stability is checked on the discrete model, discretize first')
    eigenvalues = np.linalg.eigvals(model.A)
    moduli = np.abs(eigenvalues)
    return StabilityReport(eigenvalues, moduli, bool(np.all(moduli < 1 - margin)))


def buildModel(variant: Variant | str, p: GridParams | None = None, samplingTime: float = 0.04,
               droopSign: str = 'auto') -> LtiModel:
    """
    continuous build followed by zoh discretization
    """
    p = GridParams.default() if p is None else p
    return discretizeModel(buildContinuous(variant, p, droopSign), samplingTime)
