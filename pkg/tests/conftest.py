import pytest

from forkguard.collusion_detector import fit_episodes
from forkguard.consortium_sim import default_scenario, generate_dataset

TRAIN_SEED = 20240
TEST_SEED = 20241


@pytest.fixture(scope="session")
def default_split():
    """10^4 training and 2*10^3 follow-on test episodes from the default scenario."""
    params, scenario = default_scenario()
    train = generate_dataset(params, scenario, 10_000, TRAIN_SEED)
    test = generate_dataset(train.final_params, scenario, 2_000, TEST_SEED)
    return scenario, train, test


@pytest.fixture(scope="session")
def default_model(default_split):
    _, train, _ = default_split
    return fit_episodes(train.episodes, learning_rate=1.0, epochs=3000, seed=0)


_verdicts = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _verdicts.extend(line for line in report.capstdout.splitlines() if line.startswith("[criterion"))


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_verdicts):
            terminalreporter.write_line(line)
