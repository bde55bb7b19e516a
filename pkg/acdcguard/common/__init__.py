from .fancyDict import FancyDict
from .errors import AcDcGuardError, ConfigError, NumericalError, MarginallyStableError, InfeasibleError, DegreeTooLowError
from .numerics import matExp, zohDiscretize, steadyStateGain, spectralRadius, numericRank, leftNullspace
from .simplex import LinearProgram, LpResult, lpSolve
from .branchAndBound import MixedIntegerProgram, MilpResult, milpSolve
