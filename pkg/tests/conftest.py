"""Shared fixtures: one baseline circuit and corpus serve the whole suite.

The expensive objects (trained baseline, simulated corpus, fitted correctors)
are session-scoped so unit tests and the acceptance battery reuse them. All
of them are deterministic, so sharing cannot leak state between tests.
"""

import numpy as np
import pytest

import rramfault as rf
from rramfault import experiments as exp


@pytest.fixture(scope="session")
def digits():
    return rf.load_digits()


@pytest.fixture(scope="session")
def base_split(digits):
    pixels, labels = digits
    return rf.split_base(pixels, labels, seed=exp.DEFAULT_SEEDS["base"])


@pytest.fixture(scope="session")
def baseline(base_split):
    return exp.train_baseline(base_split)


@pytest.fixture(scope="session")
def baseline_clf(baseline):
    return baseline[0]


@pytest.fixture(scope="session")
def network(baseline_clf):
    return exp.build_network(baseline_clf)


@pytest.fixture(scope="session")
def corpus(network, digits):
    pixels, labels = digits
    return rf.generate_corpus(network.arrays, pixels, labels)


@pytest.fixture(scope="session")
def splits(corpus):
    return rf.split_corpus(corpus, seed=exp.DEFAULT_SEEDS["corpus"])


@pytest.fixture(scope="session")
def same_result(corpus, splits):
    # six corrector trainings; the slowest fixture in the suite
    return exp.run_same_defect(corpus, splits)


@pytest.fixture(scope="session")
def cross_result(corpus, splits):
    # trains its own correctors so the diagonal match with same_result is a
    # real reproducibility check, not an artifact of shared objects
    return exp.run_cross_defect(corpus, splits)


@pytest.fixture(scope="session")
def layer_result(corpus, network, digits):
    pixels, labels = digits
    anchor = exp.accuracy(network.predict(pixels), labels)
    return exp.run_layer_sweep(corpus, anchor_accuracy=anchor)


@pytest.fixture(scope="session")
def smallest_ladder(corpus, splits):
    return exp.run_ladder(corpus, splits, architectures=("MLP(1,)",))


@pytest.fixture()
def rng():
    return np.random.default_rng(7)


ACCEPTANCE_VERDICTS = []


@pytest.fixture(scope="session")
def criterion():
    """Record and assert one acceptance verdict; lines echo after the run."""

    def record(number, ok, detail):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
