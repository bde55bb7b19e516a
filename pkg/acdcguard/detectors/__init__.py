from .dae import DaeSystem, buildDae, stackToeplitz
from .rankConditions import checkDetectable, checkIsolable
from .residualGenerator import ResidualGenerator, synthResidual
from .detectorBank import DetectorBank, synthBank, runResidual, alarmThreshold, alarms
