import random

import pytest
from hypothesis import settings

from exedec_lab.syntax import Domain
from exedec_lab.taskgen import Category, GenCategory, Split, sample_program

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ALL_CATEGORY_SPLITS = [GenCategory(Category.TRAIN_DISTRIBUTION, Split.TRAIN)] + [
    GenCategory(c, s) for c in Category if c is not Category.TRAIN_DISTRIBUTION for s in Split
]


def random_program(domain, seed):
    """A generated program from a category chosen by ``seed``."""
    rng = random.Random(seed)
    cat = ALL_CATEGORY_SPLITS[rng.randrange(len(ALL_CATEGORY_SPLITS))]
    return sample_program(Domain(domain), cat.category, rng, split=cat.split)


@pytest.fixture(params=[Domain.DEEPCODER, Domain.ROBUSTFILL], ids=["deepcoder", "robustfill"])
def domain(request):
    return request.param


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
