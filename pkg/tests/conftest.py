import numpy as np
import pytest

from entropic_qc.ensembles import task_rng


@pytest.fixture
def rng() -> np.random.Generator:
    return task_rng(20240917)
