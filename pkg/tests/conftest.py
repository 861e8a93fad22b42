import pytest


@pytest.fixture(scope="session")
def example1_k3_record():
    from ldgheat.study import preset_config, run_study

    return run_study(preset_config("example1-k3"))


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the long k=4 study tests (tens of minutes)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running study (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow k=4 study; enable with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
