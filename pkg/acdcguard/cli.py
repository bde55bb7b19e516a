import os
import json
import logging
import argparse
import numpy as np
from .acdcguard import AcDcGuard
from .config import loadConfig, applySeed
from .common.errors import ConfigError, InfeasibleError, NumericalError
from .detectors import DetectorBank
from .sim import Trajectory, computeMetrics

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _writeJson(path: str, data: dict) -> None:
    with open(path, 'w') as file:
        json.dump(data, file, indent=2, default=lambda value: np.asarray(value).tolist())
    logger.info('wrote %s', path)


def _readJson(path: str) -> dict:
    try:
        with open(path, 'r') as file:
            return json.load(file)
    except FileNotFoundError:
        raise ConfigError(f'{path} not found') from None
    except json.JSONDecodeError as error:
        raise ConfigError(f'{path} is not valid json: {error}') from None


def cmdModel(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    report = guard.modelReport()
    _writeJson(os.path.join(out, 'model.json'), report)
    stability = report['stability']
    print(f"{guard.variant.value}: {'stable' if stability['stable'] else 'NOT stable'}, "
          f"spectral radius {stability['spectralRadius']:.6f}, droop sign {report['model']['signConvention']}")
    for note in report['model']['notes']:
        print(f'  note: {note}')
    return EXIT_OK


def cmdSimulate(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    if args.all_variants:
        runs = guard.simulateAll()
    else:
        trajectory = guard.simulate()
        runs = {guard.variant.value: (trajectory, computeMetrics(trajectory).asDict())}
    metrics = {}
    for variant, (trajectory, values) in runs.items():
        trajectory.toCsv(os.path.join(out, f'trajectory_{variant}.csv'))
        metrics[variant] = values
        print(f"{variant}: mfd area 1 {values['mfd'][0]:+.4f} Hz at {values['mfdTime'][0]:.2f} s, "
              f"ssfd {values['ssfd'][0]:+.4f} Hz")
    _writeJson(os.path.join(out, 'metrics.json'), metrics)
    return EXIT_OK


def cmdImpactSweep(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    table, thresholds = guard.impactSweep()
    table.toCsv(os.path.join(out, 'impact_sweep.csv'))
    _writeJson(os.path.join(out, 'thresholds.json'), thresholds)
    for variant, magnitude in thresholds.items():
        print(f"{variant}: {guard.config['vuln']['mfdLimit']} Hz reached at {magnitude:.4f}")
    return EXIT_OK


def cmdAttackFind(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    result = guard.attackFind()
    _writeJson(os.path.join(out, 'attack.json'), result.asDict())
    if not result.feasible:
        print(f'{guard.variant.value}: no disruptive stealthy attack anchored on {result.anchorChannel}')
        return EXIT_INFEASIBLE
    print(f'{guard.variant.value}: alpha* = {int(result.alphaStar)} at t = {result.time:.2f} s')
    for channel, value in result.attack.items():
        if value != 0.0:
            print(f'  {channel}: {value:+.4f}')
    for constraint in result.activeConstraints:
        print(f'  active: {constraint}')
    return EXIT_OK


def cmdDetectorSynth(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    bank = guard.detectorSynth()
    _writeJson(os.path.join(out, 'bank.json'), bank.toDict())
    for channel, generator in bank.generators.items():
        print(f'{channel}: gamma = {generator.gamma:.4g}')
    for channel, reason in bank.failures.items():
        print(f'{channel}: failed, {reason}')
    return EXIT_OK if len(bank) else EXIT_INFEASIBLE


def cmdDetectorRun(guard: AcDcGuard, out: str, args: argparse.Namespace) -> int:
    bank = DetectorBank.fromDict(_readJson(args.bank))
    if args.trajectory:
        if not os.path.exists(args.trajectory):
            raise ConfigError(f'{args.trajectory} not found')
        trajectory = Trajectory.fromCsv(args.trajectory)
    else:
        trajectory = guard.simulate()
    calibration = guard.simulate(attacks=[]) if args.calibrate else None
    table = guard.detectorRun(trajectory, bank, calibration)
    table.toCsv(os.path.join(out, 'residuals.csv'))
    for channel in bank.channels:
        print(f"{channel}: final residual {table[f'r_{channel}'][-1]:+.6f}")
    return EXIT_OK


COMMANDS = {'model': cmdModel,
            'simulate': cmdSimulate,
            'impact-sweep': cmdImpactSweep,
            'attack-find': cmdAttackFind,
            'detector-synth': cmdDetectorSynth,
            'detector-run': cmdDetectorRun}


def buildParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='acdcguard', description='frequency attacks and residual detectors for two-area ac/hvdc grids')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='json file merged onto the default config')
    common.add_argument('--out', default=None, help='output directory (default: output.directory of the config)')
    common.add_argument('--seed', type=int, default=None, help='seed for load, noise and random attacks')
    common.add_argument('--variant', choices=['ac', 'acdc', 'acdc-vi'], default=None)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('--quiet', action='store_true')

    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('model', parents=[common], help='matrices, eigenvalues and stability')
    simulate = commands.add_parser('simulate', parents=[common], help='trajectory csv and impact metrics')
    simulate.add_argument('--all-variants', action='store_true', help='run the scenario on all three variants')
    commands.add_parser('impact-sweep', parents=[common], help='mfd against attack magnitude per variant')
    commands.add_parser('attack-find', parents=[common], help='smallest disruptive stealthy attack')
    commands.add_parser('detector-synth', parents=[common], help='synthesize the residual detector bank')
    run = commands.add_parser('detector-run', parents=[common], help='run a stored bank on a trajectory')
    run.add_argument('--bank', required=True, help='bank json written by detector-synth')
    run.add_argument('--trajectory', default=None, help='trajectory csv (default: simulate the configured scenario)')
    run.add_argument('--calibrate', action='store_true', help='add alarm columns calibrated on an attack-free run')
    return parser


def main(argv: list[str] | None = None) -> int:
    args = buildParser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)

    try:
        config = loadConfig(args.config)
        if args.seed is not None:
            config = applySeed(config, args.seed)
        guard = AcDcGuard(config, args.variant)
        out = args.out or config['output']['directory']
        os.makedirs(out, exist_ok=True)
        return COMMANDS[args.command](guard, out, args)
    except ConfigError as error:
        logger.error('config error: %s', error)
        return EXIT_CONFIG
    except InfeasibleError as error:
        logger.error('infeasible: %s', error)
        return EXIT_INFEASIBLE
    except NumericalError as error:
        logger.error('numerical failure: %s', error)
        return EXIT_NUMERICAL
