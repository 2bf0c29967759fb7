from pathlib import Path

import pytest

from corpus_lens import _kernels
from corpus_lens.corpus import load_corpus
from corpus_lens.tokenize import SegmentationLexicon, tokenize_corpus

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "corpus_lens" / "fixtures"

_acceptance_results = []


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_corpus(FIXTURES / "chapters")


@pytest.fixture(scope="session")
def fixture_tokens(fixture_corpus):
    return tokenize_corpus(fixture_corpus, SegmentationLexicon.load(FIXTURES / "segmentation.tsv"))


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    return request.param


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (
        rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed")
    ):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _acceptance_results.append((rep.outcome.upper(), doc))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for status, doc in _acceptance_results:
        terminalreporter.write_line(f"{status:7s} {doc}")
