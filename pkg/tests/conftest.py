import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# one shared CPU makes per-example timing meaningless
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def carmichael_1e5():
    from carmex.carmichael import brute_scan

    return brute_scan(10**5)


@pytest.fixture(scope="session")
def enumerated_1e8():
    from carmex.runner import run_enumeration
    from carmex.search import SearchConfig

    return run_enumeration(SearchConfig(limit=10**8, split=10**4))


@pytest.fixture(scope="session")
def enumerated_big():
    """Everything up to 2*10^12 (a few minutes); shared by the slow checks."""
    from carmex.runner import run_enumeration
    from carmex.search import SearchConfig

    return run_enumeration(SearchConfig(limit=2 * 10**12, split=10**5))
