from .scenarios import AttackEntry, AttackScenario, LoadProfile, NoiseSpec, genLoadProfile, genAttackSignal
from .simulation import Trajectory, simulate
from .impactMetrics import ImpactMetrics, computeMetrics, unitStepPeak, minDisruptiveMagnitude, impactSweep
