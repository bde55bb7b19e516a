import warnings
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from acdcguard.common import ConfigError, InfeasibleError
from acdcguard.detectors import (DaeSystem, buildDae, stackToeplitz, checkDetectable, checkIsolable, ResidualGenerator,
                                 synthResidual, DetectorBank, synthBank, runResidual, alarmThreshold, alarms)
from acdcguard.sim import AttackScenario, LoadProfile, NoiseSpec, genAttackSignal, genLoadProfile, simulate

CHANNELS = ('Freq1', 'Freq2', 'AcFlow12', 'DcFlow12')


@pytest.fixture(scope='module')
def dae(viModel):
    return buildDae(viModel)


@pytest.fixture(scope='module')
def frequencyGenerator(dae):
    return synthResidual(dae, 'Freq1')


@pytest.fixture(scope='module')
def bank(dae):
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        return synthBank(dae, ('AcFlow12', 'DcFlow12'))


def attackedRun(model, scenarios, horizon=400, load=None, noise=None):
    d = genLoadProfile(load or LoadProfile(kind='stochastic', seed=8), horizon, model.samplingTime)
    f, mask = genAttackSignal(scenarios, horizon, model.channelLabels)
    return simulate(model, d, f, noise=noise, mask=mask)


def test_dae_dimensions(dae):
    assert dae.H0.shape == dae.H1.shape == (16, 14)
    assert dae.L.shape == dae.F.shape == (16, 4)
    np.testing.assert_array_equal(dae.L[12:], -np.eye(4))
    np.testing.assert_array_equal(dae.F[12:], np.eye(4))
    np.testing.assert_array_equal(dae.H1[:12, :12], -np.eye(12))
    assert np.all(dae.H1[12:] == 0.0)


def test_dae_holds_along_a_simulated_run(viModel, dae):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('AcFlow12', 0.2), ('Freq2', 0.03)), onset=40), 120)
    unknowns = np.hstack([trajectory.states, trajectory.disturbances])
    Y, F = trajectory.corrupted, trajectory.attacks
    for k in range(len(trajectory) - 1):
        rows = dae.H0 @ unknowns[k] + dae.H1 @ unknowns[k + 1] + dae.L @ Y[k] + dae.F @ F[k]
        assert np.max(np.abs(rows)) <= 1e-10


def test_absorbing_moves_attack_columns(dae):
    reduced = dae.absorb(['AcFlow12'])
    assert reduced.channelLabels == ('Freq1', 'Freq2', 'DcFlow12')
    assert reduced.numUnknowns == dae.numUnknowns + 1
    np.testing.assert_array_equal(reduced.H0[:, -1], dae.column('AcFlow12'))
    assert np.all(reduced.H1[:, -1] == 0.0)
    with pytest.raises(ConfigError):
        dae.absorb(['Freq3'])


@pytest.mark.parametrize('degree', [1, 3])
def test_toeplitz_shape(dae, degree):
    Hbar, Fbar = stackToeplitz(dae, degree)
    assert Hbar.shape == ((degree + 1) * 16, (degree + 2) * 14)
    assert Fbar.shape == ((degree + 1) * 16, (degree + 1) * 4)


def test_toeplitz_is_polynomial_multiplication(dae):
    degree = 3
    rng = np.random.default_rng(1)
    N = rng.standard_normal((degree + 1, dae.numRows))
    Hbar, Fbar = stackToeplitz(dae, degree)
    product = (N.ravel() @ Hbar).reshape(degree + 2, dae.numUnknowns)
    for k in range(degree + 2):
        expected = np.zeros(dae.numUnknowns)
        if k <= degree:
            expected += N[k] @ dae.H0
        if k >= 1:
            expected += N[k - 1] @ dae.H1
        np.testing.assert_allclose(product[k], expected, atol=1e-12)
    np.testing.assert_allclose((N.ravel() @ Fbar).reshape(degree + 1, 4), N @ dae.F, atol=1e-12)
    with pytest.raises(ValueError):
        stackToeplitz(dae, 0)


def test_every_channel_is_detectable(dae):
    for channel in CHANNELS:
        assert checkDetectable(dae, channel)


def test_flow_channels_are_isolable(dae):
    assert checkIsolable(dae, 'AcFlow12', ('AcFlow12', 'DcFlow12'))
    assert checkIsolable(dae, 'DcFlow12', ('AcFlow12', 'DcFlow12'))


def test_attack_disguised_as_a_load_is_not_detectable(dae):
    disguised = DaeSystem(H0=dae.H0, H1=dae.H1, L=dae.L, F=dae.H0[:, -1:].copy(), numStates=dae.numStates,
                          outputLabels=dae.outputLabels, channelLabels=('Load2',), unknownLabels=dae.unknownLabels)
    assert not checkDetectable(disguised, 'Load2')


def test_frequency_generator_is_exact(dae, frequencyGenerator):
    generator = frequencyGenerator
    assert generator.coefficients.shape == (4, 16)
    assert generator.decoupling(dae) <= 1e-8 * max(1.0, np.max(np.abs(generator.coefficients)))
    assert generator.recoveryGain(dae) == pytest.approx(1.0, abs=1e-8)
    assert generator.gamma > 0
    assert np.max(np.abs(generator.coefficients)) <= generator.eta * (1 + 1e-6)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1),
       rates=st.tuples(st.floats(0.1, 1.0), st.floats(0.1, 1.0)),
       volatilities=st.tuples(st.floats(0.002, 0.03), st.floats(0.002, 0.03)))
def test_residual_ignores_loads(viModel, frequencyGenerator, bank, seed, rates, volatilities):
    load = LoadProfile(kind='stochastic', rates=rates, volatilities=volatilities, seed=seed)
    trajectory = attackedRun(viModel, [], 300, load=load)
    for generator in (frequencyGenerator, bank['DcFlow12']):
        residual = generator.run(trajectory.corrupted)
        assert np.max(np.abs(residual[generator.degree:])) <= 1e-6


def test_frequency_attack_is_recovered(viModel, frequencyGenerator):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('Freq1', 0.05),), onset=100))
    residual = frequencyGenerator.run(trajectory.corrupted)
    assert residual[-1] == pytest.approx(0.05, abs=1e-6)
    assert np.max(np.abs(residual[frequencyGenerator.degree:100])) <= 1e-6


@pytest.mark.parametrize('magnitude', [0.1, 0.44, -0.39])
@pytest.mark.parametrize('channel', ['Freq1', 'DcFlow12'])
def test_stationary_attacks_are_recovered_within_half_a_second(viModel, frequencyGenerator, bank, channel, magnitude):
    generator = frequencyGenerator if channel == 'Freq1' else bank[channel]
    assert generator.pole == pytest.approx(0.1)
    onset = 100
    trajectory = attackedRun(viModel, AttackScenario(entries=((channel, magnitude),), onset=onset))
    residual = generator.run(trajectory.corrupted)
    np.testing.assert_allclose(residual[-50:], magnitude, atol=1e-6)
    assert (settlingIndex(residual, magnitude, onset) - onset) * viModel.samplingTime <= 0.5


def test_bank_without_an_ac_member(dae, bank):
    assert bank.partial
    assert bank.channels == ('DcFlow12',)
    assert 'AcFlow12' in bank.failures
    with pytest.raises(InfeasibleError):
        synthResidual(dae.absorb(['DcFlow12']), 'AcFlow12')
    with pytest.warns(UserWarning):
        synthBank(dae, ('AcFlow12', 'DcFlow12'))


def test_dc_member_is_decoupled_from_the_ac_attack(dae, bank):
    generator = bank['DcFlow12']
    reduced = dae.absorb(['AcFlow12'])
    assert generator.decoupling(reduced) <= 1e-8 * max(1.0, np.max(np.abs(generator.coefficients)))
    assert generator.recoveryGain(reduced) == pytest.approx(1.0, abs=1e-8)


def test_multivariate_attack_is_isolated(viModel, bank):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('AcFlow12', 0.44), ('DcFlow12', -0.39)), onset=100))
    residuals = runResidual(bank, trajectory.corrupted, viModel.channelLabels)
    assert residuals.shape == (400, 1)
    assert residuals[-1, 0] == pytest.approx(-0.39, abs=1e-6)


def test_ac_attack_does_not_leak_into_the_dc_residual(viModel, bank):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('AcFlow12', 0.44),), onset=100))
    residual = bank['DcFlow12'].run(trajectory.corrupted)
    assert np.max(np.abs(residual[3:])) <= 1e-6


def settlingIndex(residual, target, onset):
    outside = np.flatnonzero(np.abs(residual[onset:] - target) > 0.05 * abs(target))
    return onset + (outside[-1] + 1 if outside.size else 0)


def test_slower_pole_settles_later(viModel, frequencyGenerator):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('Freq1', 0.05),), onset=100))
    indices = []
    for pole in (0.0, 0.3, 0.6, 0.9):
        generator = ResidualGenerator('Freq1', frequencyGenerator.coefficients, pole, viModel.numStates, CHANNELS)
        indices.append(settlingIndex(generator.run(trajectory.corrupted), 0.05, 100))
    assert indices == sorted(indices)
    assert indices[0] <= 100 + frequencyGenerator.degree + 1


def test_stream_matches_batch(viModel, frequencyGenerator):
    trajectory = attackedRun(viModel, AttackScenario(entries=(('Freq1', 0.02),), onset=30), 80)
    batch = frequencyGenerator.run(trajectory.corrupted)
    frequencyGenerator.reset()
    assert frequencyGenerator.startup
    stream = [frequencyGenerator.update(y) for y in trajectory.corrupted]
    np.testing.assert_array_equal(batch, stream)
    assert not frequencyGenerator.startup
    np.testing.assert_array_equal(frequencyGenerator.startupMask(5), [True, True, True, False, False])


def test_noise_and_attack_superpose(viModel, frequencyGenerator):
    noise = NoiseSpec(enabled=True, seed=12)
    attack = AttackScenario(entries=(('Freq1', 0.05),), onset=100)
    quiet = LoadProfile(kind='none')
    both = frequencyGenerator.run(attackedRun(viModel, attack, load=quiet, noise=noise).corrupted)
    noiseOnly = frequencyGenerator.run(attackedRun(viModel, [], load=quiet, noise=noise).corrupted)
    attackOnly = frequencyGenerator.run(attackedRun(viModel, attack, load=quiet).corrupted)
    np.testing.assert_allclose(both, noiseOnly + attackOnly, atol=1e-8)


def test_synthesis_errors(dae):
    with pytest.raises(ConfigError):
        synthResidual(dae, 'Freq1', degree=0)
    with pytest.raises(ConfigError):
        synthResidual(dae, 'Freq1', pole=1.0)
    with pytest.raises(ConfigError):
        synthResidual(dae, 'Freq1', eta=0.0)
    with pytest.raises(ConfigError):
        synthResidual(dae, 'Freq3')
    with pytest.raises(InfeasibleError):
        synthResidual(dae, 'Freq1', eta=100.0)
    with pytest.raises(ConfigError):
        synthBank(dae, ('DcFlow12', 'DcFlow12'))


def test_stored_bank_gives_the_same_residuals(viModel, bank):
    restored = DetectorBank.fromDict(bank.toDict())
    assert restored.channels == bank.channels
    assert restored.failures == bank.failures
    assert restored.fingerprint == viModel.fingerprint()
    trajectory = attackedRun(viModel, AttackScenario(entries=(('DcFlow12', 0.1),), onset=20), 60)
    np.testing.assert_array_equal(restored.run(trajectory.corrupted), bank.run(trajectory.corrupted))


def test_stored_data_is_checked(frequencyGenerator):
    data = frequencyGenerator.toDict()
    del data['coefficients']
    with pytest.raises(ConfigError):
        ResidualGenerator.fromDict(data)
    with pytest.raises(ConfigError):
        DetectorBank.fromDict({'generators': [], 'thresholds': []})


def test_stream_layout_is_checked(bank):
    with pytest.raises(ConfigError):
        runResidual(bank, np.zeros((10, 4)), ('Freq2', 'Freq1', 'AcFlow12', 'DcFlow12'))
    with pytest.raises(ConfigError):
        runResidual(bank, np.zeros((10, 3)))
    assert DetectorBank().run(np.zeros((10, 4))).shape == (10, 0)


def test_alarms():
    calibration = np.array([[1.0, 0.0], [-1.0, 0.0], [1.0, 2.0], [-1.0, -2.0]])
    threshold = alarmThreshold(calibration, k=2.0)
    np.testing.assert_allclose(threshold, [2.0, 2.0 * np.sqrt(2.0)])
    flags = alarms(np.array([[2.5, 1.0], [0.5, 3.0]]), threshold)
    np.testing.assert_array_equal(flags, [[True, False], [False, True]])
    assert alarmThreshold(np.array([0.5, -0.5])) == pytest.approx(1.5)
