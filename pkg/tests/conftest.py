import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from dptree import BinaryDataset

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_datasets(draw, max_instances=40, max_features=6, classes=(2, 3)):
    n = draw(st.integers(0, max_instances))
    f = draw(st.integers(1, max_features))
    c = draw(st.sampled_from(classes))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    X = (rng.random((n, f)) < rng.uniform(0.2, 0.8)).astype(np.uint8)
    y = rng.integers(0, c, n)
    return BinaryDataset.from_arrays(X, y, c)
