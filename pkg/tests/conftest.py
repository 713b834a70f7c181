import os

import pytest


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    """Keep test cache traffic out of the user's real cache directory."""
    old = os.environ.get("SDLAB_CACHE_DIR")
    os.environ["SDLAB_CACHE_DIR"] = str(tmp_path_factory.mktemp("cache"))
    yield
    if old is None:
        os.environ.pop("SDLAB_CACHE_DIR", None)
    else:
        os.environ["SDLAB_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def tn1_integrals():
    from sdlab.catalog import get_entry
    from sdlab.geometry import integrate_invariants
    return integrate_invariants(get_entry("taub-nut-1").backend, resolution=4)


@pytest.fixture(scope="session")
def s4_integrals():
    from sdlab.catalog import get_entry
    from sdlab.geometry import integrate_invariants
    return integrate_invariants(get_entry("round-s4").backend, resolution=3)


@pytest.fixture(scope="session")
def schw_integrals():
    from sdlab.catalog import get_entry
    from sdlab.geometry import integrate_invariants
    return integrate_invariants(get_entry("schwarzschild").backend,
                                resolution=4)
