from .gridParams import GridParams
from .gridModel import (Variant, LtiModel, StabilityReport, buildContinuous, buildAttackMatrix, discretizeModel,
                        validateStability, buildModel, STATE_LABELS, CHANNEL_LABELS, FREQUENCY_CHANNELS)
