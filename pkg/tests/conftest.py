import numpy as np
import pytest

from ctxfilter.core import ContextualWord, WordList

# window used throughout the worked examples
W3 = np.array([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.2, 0.1, 0.7]])


def random_stochastic(rng, t, f):
    u = rng.random((t, f))
    return u / u.sum(axis=1, keepdims=True)


def make_list(*prons_per_word):
    words = [ContextualWord(i, f"w{i}", prons) for i, prons in enumerate(prons_per_word)]
    return WordList(tuple(words), {f"p{k}": k for k in range(8)})


@pytest.fixture
def w3():
    return W3.copy()


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  [{criterion}] {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
