import os
import re

import numpy as np
import pytest

from emolex import EmbeddingStore, EmotionSet, SeedLexicon, Vocabulary

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA_DIR, name)


def make_store(vectors, words=None):
    vectors = np.asarray(vectors, dtype=np.float64)
    if words is None:
        words = ["w%d" % i for i in range(vectors.shape[0])]
    return EmbeddingStore(Vocabulary(words), vectors)


def two_cluster_store(n_per_cluster, dim=10, separation=6.0, seed=0,
                      spread=0.5):
    """Two well-separated gaussian clusters; words c0_* and c1_*."""
    rng = np.random.default_rng(seed)
    c0 = rng.normal(0.0, spread, size=(n_per_cluster, dim))
    c1 = rng.normal(0.0, spread, size=(n_per_cluster, dim))
    c0[:, 0] += separation
    c1[:, 0] -= separation
    words = (["c0_%d" % i for i in range(n_per_cluster)]
             + ["c1_%d" % i for i in range(n_per_cluster)])
    return make_store(np.vstack([c0, c1]), words)


def two_cluster_seed(store, emotions, n_seeds_per_cluster,
                     labels=("joy", "anger")):
    entries = {}
    m = len(emotions)
    for cluster, label in enumerate(labels):
        flags = np.zeros(m, dtype=np.int64)
        flags[emotions.index[label]] = 1
        for i in range(n_seeds_per_cluster):
            entries["c%d_%d" % (cluster, i)] = flags
    return SeedLexicon(entries, emotions)


@pytest.fixture
def ekman():
    return EmotionSet()


ACCEPTANCE_TITLES = {
    1: "edge-weight formula reproduction",
    2: "closed-form and iterative solver agreement",
    3: "analytic gradients match finite differences",
    4: "batch optimization approximates full-graph fit",
    5: "cluster recovery from sparse seeds",
    6: "baseline cross-validation analytics",
    7: "corpus and lexicon statistics reproduction",
    8: "byte-identical reruns",
    9: "real-data expansion beats uniform baseline",
}
_RANK = {"SKIP": 0, "PASS": 1, "FAIL": 2}
_acceptance_results = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::.*test_criterion_(\d+)_",
                  report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        outcome = ("SKIP" if report.skipped
                   else "PASS" if report.passed else "FAIL")
        num = int(m.group(1))
        prev = _acceptance_results.get(num, "SKIP")
        if _RANK[outcome] >= _RANK[prev]:
            _acceptance_results[num] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(ACCEPTANCE_TITLES):
        outcome = _acceptance_results.get(num, "SKIP")
        terminalreporter.write_line(
            "criterion %d (%s): %s" % (num, ACCEPTANCE_TITLES[num], outcome))
