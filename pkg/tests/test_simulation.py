import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from acdcguard.common import ConfigError, steadyStateGain
from acdcguard.sim import (AttackScenario, LoadProfile, NoiseSpec, Trajectory, computeMetrics, genAttackSignal,
                           genLoadProfile, impactSweep, minDisruptiveMagnitude, simulate)

CHANNELS = ('Freq1', 'Freq2', 'AcFlow12', 'DcFlow12')


def test_step_load_profile():
    d = genLoadProfile(LoadProfile(kind='step', area=1, magnitude=0.03, onset=5.0), 300, 0.04)
    assert d[124, 0] == 0.0
    assert d[125, 0] == 0.03
    assert np.all(d[:, 1] == 0.0)


def test_stochastic_load_profile():
    quiet = LoadProfile(kind='stochastic', volatilities=(0.0, 0.0), seed=3)
    assert np.all(genLoadProfile(quiet, 500, 0.04) == 0.0)
    noisy = LoadProfile(kind='stochastic', seed=3)
    np.testing.assert_array_equal(genLoadProfile(noisy, 500, 0.04), genLoadProfile(noisy, 500, 0.04))
    assert np.any(genLoadProfile(noisy, 500, 0.04) != 0.0)


def test_step_attack_signal():
    scenario = AttackScenario.fromDict({'entries': {'AcFlow12': 0.1}, 'onset': 250})
    f, mask = genAttackSignal(scenario, 400, CHANNELS)
    assert f[249, 2] == 0.0
    assert np.all(f[250:, 2] == 0.1)
    assert np.all(mask == 1.0)


def test_frequency_attacks_are_converted_to_rad_per_second():
    f, _ = genAttackSignal(AttackScenario(entries=(('Freq1', 0.05),)), 10, CHANNELS)
    np.testing.assert_allclose(f[:, 0], 2 * np.pi * 0.05)


def test_pulse_ramp_and_scaling_shapes():
    pulse, _ = genAttackSignal(AttackScenario(entries=(('DcFlow12', 0.2),), shape='pulse', onset=5, duration=3), 20, CHANNELS)
    assert np.count_nonzero(pulse[:, 3]) == 3 and pulse[5, 3] == 0.2
    ramp, _ = genAttackSignal(AttackScenario(entries=(('DcFlow12', 0.2),), shape='ramp', slope=0.05), 20, CHANNELS)
    np.testing.assert_allclose(ramp[:5, 3], [0.05, 0.1, 0.15, 0.2, 0.2])
    flat, _ = genAttackSignal(AttackScenario(entries=(('DcFlow12', 0.2),), shape='ramp', slope=0.0), 20, CHANNELS)
    assert np.all(flat == 0.0)
    f, mask = genAttackSignal(AttackScenario(entries=(('AcFlow12', 0.5),), shape='scaling', onset=4), 10, CHANNELS)
    assert np.all(f == 0.0)
    np.testing.assert_array_equal(mask[:, 2], [1.0] * 4 + [0.5] * 6)


@pytest.mark.parametrize('slope', [0.01, -0.01])
def test_ramp_heads_for_a_negative_magnitude(slope):
    ramp, _ = genAttackSignal(AttackScenario(entries=(('AcFlow12', -0.2),), shape='ramp', slope=slope, onset=2), 40, CHANNELS)
    np.testing.assert_allclose(ramp[:5, 2], [0.0, 0.0, -0.01, -0.02, -0.03])
    np.testing.assert_allclose(ramp[-3:, 2], -0.2)
    assert np.all(ramp[:, 2] <= 0.0)


def test_frequency_ramp_is_converted_to_rad_per_second():
    ramp, _ = genAttackSignal(AttackScenario(entries=(('Freq1', -0.05),), shape='ramp', slope=0.1), 5, CHANNELS)
    np.testing.assert_allclose(ramp[:, 0], -2 * np.pi * 0.05)


def test_random_attack_variance():
    scenario = AttackScenario(entries=(('AcFlow12', 0.0),), shape='random', std=0.2, seed=11)
    f, _ = genAttackSignal(scenario, 100000, CHANNELS)
    assert np.var(f[:, 2]) == pytest.approx(0.04, rel=0.05)


def test_attack_signal_errors():
    with pytest.raises(ConfigError):
        genAttackSignal(AttackScenario(entries=(('DcFlow12', 0.1),)), 10, CHANNELS[:3])
    clash = [AttackScenario(entries=(('AcFlow12', 0.1),)), AttackScenario(entries=(('AcFlow12', 0.5),), shape='scaling')]
    with pytest.raises(ConfigError):
        genAttackSignal(clash, 10, CHANNELS)
    with pytest.raises(ConfigError):
        AttackScenario(entries=(('AcFlow12', 0.1), ('AcFlow12', 0.2)))
    with pytest.raises(ConfigError):
        AttackScenario.fromDict({'entries': {}, 'start': 3})


def test_zero_inputs_give_a_zero_trajectory(viModel):
    trajectory = simulate(viModel, np.zeros((100, 2)))
    assert np.all(trajectory.states == 0.0)
    assert np.all(trajectory['ace1'] == 0.0)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_superposition_and_scaling(viModel, seed):
    model = viModel
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((200, 2)) * 0.01
    f = rng.standard_normal((200, 4)) * 0.05
    both = simulate(model, d, f).states
    loadOnly = simulate(model, d).states
    attackOnly = simulate(model, np.zeros_like(d), f).states
    np.testing.assert_allclose(both, loadOnly + attackOnly, atol=1e-10)
    np.testing.assert_allclose(simulate(model, np.zeros_like(d), 2 * f).states, 2 * attackOnly, atol=1e-10)


def test_corrupted_outputs_add_the_attack(viModel):
    f, mask = genAttackSignal(AttackScenario(entries=(('AcFlow12', 0.1), ('Freq2', 0.02)), onset=10), 50, CHANNELS)
    trajectory = simulate(viModel, np.zeros((50, 2)), f, mask=mask)
    np.testing.assert_allclose(trajectory.corrupted, trajectory.outputs + f, atol=1e-14)
    np.testing.assert_allclose(trajectory['f_Freq2'][10:], 0.02)
    np.testing.assert_allclose(trajectory.attacks, f, atol=1e-14)


def test_scaling_attack_hides_the_true_output(viModel):
    d = genLoadProfile(LoadProfile(onset=0.0), 200, 0.04)
    _, mask = genAttackSignal(AttackScenario(entries=(('AcFlow12', 0.0),), shape='scaling'), 200, CHANNELS)
    trajectory = simulate(viModel, d, mask=mask)
    assert np.all(trajectory['yt_AcFlow12'] == 0.0)
    np.testing.assert_allclose(trajectory['f_AcFlow12'], -trajectory['y_AcFlow12'])


def test_steady_state_matches_the_dc_gain(viModel):
    horizon = 20000
    d = genLoadProfile(LoadProfile(onset=0.0), horizon, 0.04)
    metrics = computeMetrics(simulate(viModel, d))
    gain = steadyStateGain(viModel.A, viModel.Bd, viModel.C) @ np.array([0.03, 0.0])
    assert metrics.ssfd[0] == pytest.approx(gain[0] / (2 * np.pi), abs=1e-6)
    assert abs(metrics.ssfd[0]) <= abs(metrics.mfd[0])


@pytest.mark.parametrize('variant, mfd', [('ac', -0.2311), ('acdc', -0.1825), ('acdc-vi', -0.0195)])
def test_load_step_mfd(models, variant, mfd):
    d = genLoadProfile(LoadProfile(onset=0.0), 750, 0.04)
    metrics = computeMetrics(simulate(models[variant], d))
    assert metrics.mfd[0] == pytest.approx(mfd, abs=5e-4)


def test_virtual_inertia_damps_the_load_step_best(models):
    d = genLoadProfile(LoadProfile(onset=0.0), 750, 0.04)
    mfds = {variant: abs(computeMetrics(simulate(model, d)).mfd[0]) for variant, model in models.items()}
    assert mfds['acdc-vi'] < mfds['acdc'] < mfds['ac']


@pytest.mark.parametrize('channel', CHANNELS)
def test_virtual_inertia_is_the_most_exposed(models, channel):
    mfds = {}
    for variant, model in models.items():
        mfds[variant] = abs(impactSweep(model, channel, [0.1])[0]) if channel in model.channelLabels else 0.0
    assert mfds['acdc-vi'] > mfds['acdc'] > mfds['ac']


@pytest.mark.parametrize('channel, expected', [('Freq1', {'ac': -0.0620, 'acdc': -0.0646, 'acdc-vi': -0.0753}),
                                               ('AcFlow12', {'ac': -0.0494, 'acdc': -0.0503, 'acdc-vi': -0.0620}),
                                               ('DcFlow12', {'acdc': -0.0310, 'acdc-vi': -0.0450})])
def test_univariate_attack_mfds(models, channel, expected):
    for variant, mfd in expected.items():
        assert impactSweep(models[variant], channel, [0.1])[0] == pytest.approx(mfd, abs=5e-4)


def test_mfd_grows_with_the_attack(viModel):
    mfds = np.abs(impactSweep(viModel, 'AcFlow12', np.linspace(0.0, 1.0, 11)))
    assert mfds[0] == 0.0
    assert np.all(np.diff(mfds) >= 0.0)


@pytest.mark.parametrize('variant, threshold', [('ac', 1.619), ('acdc', 1.590), ('acdc-vi', 1.291)])
def test_disruptive_thresholds(models, variant, threshold):
    assert minDisruptiveMagnitude(models[variant], 'AcFlow12', 0.8) == pytest.approx(threshold, abs=2e-3)


def test_disruptive_threshold_is_linear(models):
    for model in models.values():
        high = minDisruptiveMagnitude(model, 'AcFlow12', 0.8)
        low = minDisruptiveMagnitude(model, 'AcFlow12', 0.4)
        assert high == pytest.approx(2 * low, abs=1e-6)
    assert minDisruptiveMagnitude(models['acdc-vi'], 'AcFlow12', 0.0) == 0.0


def test_bisection_agrees_with_scaling(viModel):
    magnitude = minDisruptiveMagnitude(viModel, 'AcFlow12', 0.8, horizon=300, crossCheck=True)
    assert magnitude > 0


def test_metrics_of_a_constant_deviation(viModel):
    n = 40
    data = {'t': np.arange(n) * 0.04, 'dw1_hz': np.full(n, -0.8), 'dw2_hz': np.zeros(n),
            'ace1': np.zeros(n), 'ace2': np.zeros(n), 'pdc_ref': np.zeros(n)}
    trajectory = Trajectory(0.04, (), CHANNELS, data=data)
    metrics = computeMetrics(trajectory)
    assert metrics.mfd[0] == pytest.approx(-0.8)
    assert metrics.ssfd[0] == pytest.approx(-0.8)
    assert metrics.coiMfd == pytest.approx(-0.4)
    with pytest.raises(ValueError):
        computeMetrics(trajectory, start=10.0)


def test_metric_window(viModel):
    f, _ = genAttackSignal(AttackScenario(entries=(('AcFlow12', 0.1),), onset=250), 750, CHANNELS)
    trajectory = simulate(viModel, np.zeros((750, 2)), f)
    before = computeMetrics(trajectory, stop=9.96)
    after = computeMetrics(trajectory, start=10.0)
    assert before.mfd[0] == 0.0
    assert after.mfdTime[0] > 10.0
    assert after.peakPdcRef > 0.0


def test_noise_is_reproducible(viModel):
    d = np.zeros((300, 2))
    noise = NoiseSpec(enabled=True, seed=4)
    first = simulate(viModel, d, noise=noise)
    second = simulate(viModel, d, noise=noise)
    np.testing.assert_array_equal(first.states, second.states)
    other = simulate(viModel, d, noise=NoiseSpec(enabled=True, seed=5))
    assert np.any(other.states != first.states)


def test_measurement_noise_acts_like_an_attack(viModel):
    noise = NoiseSpec(enabled=True, frequencyVariance=0.0, otherVariance=0.0, measurementVariance=1e-4, seed=2)
    trajectory = simulate(viModel, np.zeros((200, 2)), noise=noise)
    assert np.any(trajectory.states != 0.0)
    assert np.all(trajectory.attacks == 0.0)


def test_simulation_rejects_bad_shapes(viModel):
    with pytest.raises(ValueError):
        simulate(viModel, np.zeros((10, 3)))
    with pytest.raises(ValueError):
        simulate(viModel, np.zeros((10, 2)), np.zeros((9, 4)))


def test_trajectory_csv(viModel, tmp_path):
    f, _ = genAttackSignal(AttackScenario(entries=(('DcFlow12', 0.1),), onset=5), 60, CHANNELS)
    trajectory = simulate(viModel, genLoadProfile(LoadProfile(onset=0.0), 60, 0.04), f)
    path = tmp_path / 'trajectory.csv'
    trajectory.toCsv(path)
    header = path.read_text().splitlines()[0].split(',')
    assert header[:3] == ['t', 'dw1_hz', 'dw2_hz']
    assert header[3:3 + viModel.numStates] == list(viModel.stateLabels)
    loaded = Trajectory.fromCsv(path)
    assert loaded.channelLabels == CHANNELS
    assert loaded.samplingTime == pytest.approx(0.04)
    np.testing.assert_allclose(loaded.corrupted, trajectory.corrupted, rtol=1e-15, atol=1e-300)
    assert loaded.inertiaWeights == pytest.approx(trajectory.inertiaWeights)
    assert 'coi_weight1' not in loaded


def test_center_of_inertia_survives_the_csv(tmp_path):
    n = 40
    data = {'t': np.arange(n) * 0.04, 'dw1_hz': np.full(n, -0.8), 'dw2_hz': np.zeros(n),
            'ace1': np.zeros(n), 'ace2': np.zeros(n), 'pdc_ref': np.zeros(n)}
    trajectory = Trajectory(0.04, (), CHANNELS, inertiaWeights=(1.0, 3.0), data=data)
    assert computeMetrics(trajectory).coiMfd == pytest.approx(-0.2)
    path = tmp_path / 'weighted.csv'
    trajectory.toCsv(path)
    loaded = Trajectory.fromCsv(path)
    assert loaded.inertiaWeights == (1.0, 3.0)
    assert computeMetrics(loaded).coiMfd == pytest.approx(-0.2)
    assert computeMetrics(Trajectory.fromCsv(path, inertiaWeights=(1.0, 1.0))).coiMfd == pytest.approx(-0.4)
