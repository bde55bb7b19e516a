import os
import hypothesis
import numpy as np
import pytest
from acdcguard.grid import GridParams, buildModel

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def models():
    """
    the three variants with the default parameters, keyed by variant name
    """
    return {variant: buildModel(variant) for variant in ("ac", "acdc", "acdc-vi")}


@pytest.fixture(scope="session")
def viModel(models):
    return models["acdc-vi"]


@pytest.fixture(scope="session")
def stressedModels():
    params = GridParams.stressed()
    return {variant: buildModel(variant, params) for variant in ("ac", "acdc", "acdc-vi")}
