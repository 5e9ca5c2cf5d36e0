import os

os.environ.setdefault("XLA_FLAGS", "--xla_backend_optimization_level=0")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from killingchain.scenarios import load_scenario  # noqa: E402


@pytest.fixture(scope="session")
def minkowski_sc():
    return load_scenario("minkowski")


@pytest.fixture(scope="session")
def schwarzschild_sc():
    return load_scenario("schwarzschild", {"m": 1.0})


@pytest.fixture(scope="session")
def de_sitter_sc():
    return load_scenario("de_sitter", {"lambda": 0.03})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _CRITERIA.append((props["criterion"], verdict, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for text, verdict, detail in sorted(_CRITERIA, key=lambda c: int(c[0].split(":")[0])):
        line = f"criterion {text}: {verdict}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
