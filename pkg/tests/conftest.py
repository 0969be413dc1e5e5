import numpy as np
import pytest

from semiquantum.fock import (
    FockParams,
    make_coherent_state,
    make_number_state,
    make_squeezed_vacuum,
    make_thermal_state,
)

# label -> (builder, closed-form <n>, closed-form Var n)
CORPUS = {
    **{f"number-{m}": (lambda m=m: make_number_state(m, FockParams(m + 2)), m, 0.0) for m in range(6)},
    **{f"coherent-{b}": (lambda b=b: make_coherent_state(b, FockParams(32)), b**2, b**2) for b in (0.5, 1.0, 2.0)},
    **{f"thermal-{t}": (lambda t=t: make_thermal_state(t, FockParams(45)), t, t * t + t) for t in (0.5, 1.0)},
    **{
        f"squeezed-{r}": (
            lambda r=r: make_squeezed_vacuum(r, FockParams(40)),
            np.sinh(r) ** 2,
            2 * np.sinh(r) ** 2 * np.cosh(r) ** 2,
        )
        for r in (0.3, 0.5)
    },
}

_ACCEPTANCE_LINES = []


def record_acceptance(line):
    _ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="session")
def corpus():
    return {label: builder() for label, (builder, _, _) in CORPUS.items()}


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
