import logging
import warnings
import numpy as np
from dataclasses import replace
from .config import loadConfig
from .common import FancyDict
from .common.errors import ConfigError
from .grid import GridParams, LtiModel, Variant, buildModel, validateStability
from .sim import (AttackScenario, LoadProfile, NoiseSpec, Trajectory, computeMetrics, genAttackSignal,
                  genLoadProfile, impactSweep, minDisruptiveMagnitude, simulate)
from .vuln import StealthSpec, VulnResult, findDisruptiveStealthy
from .detectors import DetectorBank, buildDae, synthBank, runResidual, alarmThreshold, alarms

logger = logging.getLogger(__name__)


class AcDcGuard:
    """
    runs the studies of a two-area ac/hvdc system from one config: model
    reports, attacked simulations, impact sweeps, the search for disruptive
    stealthy attacks, and the synthesis and online run of residual detectors.
    models are built lazily per variant and cached
    """
    def __init__(self, config: dict | None = None, variant: str | None = None) -> None:
        self.config = loadConfig(override=config)
        if variant is not None:
            self.config['model']['variant'] = variant
        self.variant = Variant.parse(self.config['model']['variant'])
        self.models = {}
        self.bank = None

        # build flags
        self.gotModel = False
        self.gotBank = False

    @property
    def params(self) -> GridParams:
        modelConfig = self.config['model']
        return GridParams.fromDict(modelConfig['params'], modelConfig['preset'])

    @property
    def samplingTime(self) -> float:
        return float(self.config['model']['samplingTime'])

    @property
    def horizon(self) -> int:
        return int(round(self.config['scenario']['horizon'] / self.samplingTime))

    def getModel(self, variant: Variant | str | None = None) -> LtiModel:
        variant = self.variant if variant is None else Variant.parse(variant)
        if variant not in self.models:
            self.models[variant] = buildModel(variant, self.params, self.samplingTime, self.config['model']['droopSign'])
        return self.models[variant]

    def buildModel(self) -> LtiModel:
        if self.gotModel:
            warnings.warn('already built the model')
        else:
            model = self.getModel()
            report = validateStability(model)
            if not report.stable:
                warnings.warn(f'the {self.variant.value} model is not stable, spectral radius {report.spectralRadius:.6f}')
            self.gotModel = True
        return self.getModel()

    @property
    def model(self) -> LtiModel:
        return self.getModel()

    def modelReport(self) -> dict:
        model = self.buildModel() if not self.gotModel else self.model
        return {'model': model.asDict(), 'stability': validateStability(model).asDict()}

    def attackScenarios(self) -> list[AttackScenario]:
        return [AttackScenario.fromDict(entry) for entry in self.config['scenario']['attacks']]

    def simulate(self, variant: Variant | str | None = None, attacks: list[AttackScenario] | None = None) -> Trajectory:
        """
        load profile, attacks and noise of the scenario section on one variant;
        attacks replaces the configured attack scenarios when given
        """
        model = self.getModel(variant)
        scenario = self.config['scenario']
        horizon = self.horizon
        scenarios = self.attackScenarios() if attacks is None else attacks
        for attack in scenarios:
            if attack.onset >= horizon:
                raise ConfigError(f'attack onset {attack.onset} lies beyond the horizon of {horizon} samples')
        d = genLoadProfile(LoadProfile.fromDict(scenario['load']), horizon, self.samplingTime)
        f, mask = genAttackSignal(scenarios, horizon, model.channelLabels)
        noise = NoiseSpec.fromDict(scenario['noise'])
        logger.info('simulating %d samples of the %s model', horizon, model.variant.value)
        return simulate(model, d, f, noise, mask)

    def simulateAll(self) -> dict[str, tuple[Trajectory, dict]]:
        """
        the scenario on every variant, attacks on channels a variant lacks are dropped
        """
        results = {}
        for variant in Variant:
            channels = self.getModel(variant).channelLabels
            attacks = []
            for attack in self.attackScenarios():
                kept = tuple(entry for entry in attack.entries if entry.channel in channels)
                if kept:
                    attacks.append(replace(attack, entries=kept))
            trajectory = self.simulate(variant, attacks)
            results[variant.value] = (trajectory, computeMetrics(trajectory).asDict())
        return results

    def impactSweep(self) -> tuple[FancyDict, dict[str, float]]:
        """
        signed mfd against the attack magnitude per variant, plus the
        magnitude at which each variant reaches the mfd limit
        """
        sweep = self.config['sweep']
        mfdLimit = self.config['vuln']['mfdLimit']
        magnitudes = np.linspace(sweep['start'], sweep['stop'], int(sweep['num']))
        table = FancyDict({'magnitude': magnitudes})
        thresholds = {}
        for variant in sweep['variants']:
            model = self.getModel(variant)
            if sweep['channel'] not in model.channelLabels:
                logger.info('%s has no %s channel, skipped in the sweep', variant, sweep['channel'])
                continue
            table[f'mfd_{variant}'] = impactSweep(model, sweep['channel'], magnitudes, sweep['horizon'], sweep['area'])
            thresholds[variant] = minDisruptiveMagnitude(model, sweep['channel'], mfdLimit, sweep['horizon'], sweep['area'])
        return table, thresholds

    def stealthSpec(self) -> StealthSpec:
        return StealthSpec.fromDict(self.config['vuln'])

    def attackFind(self, variant: Variant | str | None = None) -> VulnResult:
        model = self.getModel(variant)
        result = findDisruptiveStealthy(model, self.stealthSpec())
        if result.feasible:
            logger.info('%s: disruptive stealthy attack on %d channels', model.variant.value, result.alphaStar)
        else:
            logger.info('%s: no disruptive stealthy attack', model.variant.value)
        return result

    def detectorSynth(self) -> DetectorBank:
        if self.gotBank:
            warnings.warn('already synthesized the detector bank')
            return self.bank
        detect = self.config['detect']
        self.bank = synthBank(buildDae(self.model), detect['channels'], detect['degree'], detect['pole'], detect['eta'])
        self.gotBank = True
        return self.bank

    def detectorRun(self, trajectory: Trajectory, bank: DetectorBank | None = None,
                    calibration: Trajectory | None = None) -> FancyDict:
        """
        residuals of the bank on the corrupted outputs of a trajectory, one
        column r_<channel> each; with a calibration trajectory (no attack)
        alarm columns are added at alarmK standard deviations
        """
        bank = self.bank if bank is None else bank
        if bank is None:
            raise ConfigError('no detector bank, synthesize or load one first')
        if bank.fingerprint and bank.fingerprint != self.model.fingerprint():
            raise ConfigError('the detector bank was synthesized for a different model')
        residuals = runResidual(bank, trajectory.corrupted, trajectory.channelLabels)
        table = FancyDict({'t': trajectory.time})
        table['startup'] = (np.arange(len(trajectory)) < max([g.degree for g in bank.generators.values()], default=0)).astype(float)
        for i, channel in enumerate(bank.channels):
            table[f'r_{channel}'] = residuals[:, i]
        if calibration is not None:
            threshold = np.atleast_1d(alarmThreshold(runResidual(bank, calibration.corrupted, calibration.channelLabels),
                                                     self.config['detect']['alarmK']))
            for i, channel in enumerate(bank.channels):
                table[f'alarm_{channel}'] = alarms(residuals[:, i], threshold[i]).astype(float)
        return table
