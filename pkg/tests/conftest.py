import numpy as np
import pytest

from biortho import composite_gauss_legendre, default_grid, make_h_exponential, make_ionkin

H_VALUES = (0.5, 1.0, 2.0, 5.0)


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def h_system():
    cache = {}

    def build(h, N=16, grid=None):
        grid = default_grid() if grid is None else grid
        key = (h, N, id(grid))
        if key not in cache:
            cache[key] = make_h_exponential(h, N, grid)
        return cache[key]

    return build


@pytest.fixture(scope="session")
def ionkin():
    return make_ionkin(8, default_grid())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def coarse_grid():
    return composite_gauss_legendre(16, 8)


ACCEPTANCE_TITLES = {
    1: "biorthogonality",
    2: "convolution theorem",
    3: "two-integral convolution",
    4: "Plancherel and Parseval",
    5: "frame bounds",
    6: "resolvent",
    7: "intertwining",
    8: "Hausdorff-Young endpoints",
    9: "lp duality",
    10: "Ionkin hat relations",
    11: "convolution norm bound",
    12: "determinism",
}
_ACCEPTANCE = pytest.StashKey[dict]()


class AcceptanceLog:
    """Collects sub-case verdicts; a criterion passes when all of its cases do."""

    def __init__(self, store):
        self.store = store

    def record(self, n, ok, detail=""):
        self.store.setdefault(n, []).append((bool(ok), detail))
        print(f"criterion {n} ({ACCEPTANCE_TITLES[n]}): {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        return bool(ok)


@pytest.fixture(scope="session")
def acceptance(pytestconfig):
    return AcceptanceLog(pytestconfig.stash.setdefault(_ACCEPTANCE, {}))


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, None)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE_TITLES.items():
        cases = store.get(n)
        if cases is None:
            verdict = "NOT RUN"
        else:
            verdict = "PASS" if all(ok for ok, _ in cases) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} {title}: {verdict}")
        for ok, detail in cases or ():
            if not ok and detail:
                terminalreporter.write_line(f"    {detail}")
