import os

import pytest

from pyvse.config import DEFAULT_GB_TIME_BUDGET, Settings
from pyvse.diagram import parse_link, parse_link_file
from pyvse.utils import bundled_links


def pytest_collection_modifyitems(config, items):
    if os.environ.get("VSE_RUN_UNRESTRICTED"):
        return
    skip = pytest.mark.skip(reason="set VSE_RUN_UNRESTRICTED=1 to run Buchberger without a budget")
    for item in items:
        if "unrestricted" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def settings(tmp_path_factory) -> Settings:
    # one cache folder per session so every level basis is computed once;
    # the unrestricted basis falls back to the transcription after the budget
    return Settings(
        cache_dir=str(tmp_path_factory.mktemp("gb-cache")), gb_time_budget=DEFAULT_GB_TIME_BUDGET
    )


@pytest.fixture(scope="session")
def links() -> dict:
    return {name: parse_link_file(path) for name, path in bundled_links().items()}


@pytest.fixture
def kink():
    return parse_link("X1 a a b b", name="kink")


@pytest.fixture
def curl():
    return parse_link("X1 a b a b", name="curl")


@pytest.fixture
def micro_corpus(links) -> list:
    return [links[name] for name in ("unknot", "unlink2", "kink", "curl", "hopf_like")]


@pytest.fixture
def link_file(tmp_path):
    def write(name: str, text: str) -> str:
        path = os.path.join(str(tmp_path), f"{name}.vse")
        with open(path, "w", encoding="utf-8") as fout:
            fout.write(text)
        return path

    return write
