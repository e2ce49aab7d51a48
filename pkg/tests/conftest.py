import sys
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

from dtaoi.mg import MatGeom  # noqa: E402

probs = st.floats(min_value=0.01, max_value=1.0, allow_nan=False)


@st.composite
def phase_type(draw, max_m: int = 4, max_row: float = 0.95):
    """A random discrete phase-type law, which is a valid MG law."""
    m = draw(st.integers(1, max_m))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    A = rng.random((m, m)) * (rng.random((m, m)) < 0.7)
    rows = A.sum(axis=1)
    scale = rng.uniform(0.05, max_row, size=m)
    A = A * np.where(rows > 0, scale / np.maximum(rows, 1e-300), 0.0)[:, None]
    c = rng.random(m)
    c = c / c.sum() * draw(st.floats(0.0, 1.0))
    b = 1.0 - A.sum(axis=1)
    return MatGeom(c=c, A=A, b=b, d=1.0 - c.sum())


@st.composite
def prob_vectors(draw, min_n: int = 1, max_n: int = 5, lo: float = 0.01):
    n = draw(st.integers(min_n, max_n))
    return tuple(draw(st.lists(st.floats(lo, 1.0), min_size=n, max_size=n)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key][1])
