import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "qloss", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("qloss")


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion check, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def record(criterion: int, label: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {criterion:>2} {'PASS' if ok else 'FAIL'}  {label}"
        ACCEPTANCE_LINES.append(line + (f"  ({detail})" if detail else ""))
        print(ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
