import os

import pytest


def pytest_addoption(parser):
    parser.addoption("--nightly", action="store_true", default=False,
                     help="run nightly-tier tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--nightly") or os.environ.get("XNETSIM_NIGHTLY") == "1":
        return
    skip = pytest.mark.skip(reason="nightly tier; enable with --nightly or XNETSIM_NIGHTLY=1")
    for item in items:
        if "nightly" in item.keywords:
            item.add_marker(skip)
