from __future__ import annotations

import pytest

from ybx import (
    WordEngine,
    from_components,
    make_idempotent_yy,
    make_lyubashenko,
    make_metahomomorphism,
    make_trivial,
)

# The worked three-letter example: every lambda is the transposition of
# the last two letters, rho collapses almost everything onto letter 0.
ABEX_LAM = [(0, 2, 1)] * 3
ABEX_RHO = [(0, 0, 0), (0, 0, 1), (0, 2, 0)]


@pytest.fixture(scope="session")
def triv2():
    return make_trivial(2)


@pytest.fixture(scope="session")
def triv3():
    return make_trivial(3)


@pytest.fixture(scope="session")
def idem2():
    return make_idempotent_yy(2)


@pytest.fixture(scope="session")
def idem3():
    return make_idempotent_yy(3)


@pytest.fixture(scope="session")
def abex():
    return from_components(lam=ABEX_LAM, rho=ABEX_RHO)


@pytest.fixture(scope="session")
def swap2():
    # constant-permutation solution r(x, y) = (y + 1, x + 1) mod 2
    return make_lyubashenko((1, 0), (1, 0))


@pytest.fixture(scope="session")
def z2group():
    # group-derived idempotent solution r(g, h) = (gh, 1) on Z/2
    return make_metahomomorphism([[0, 1], [1, 0]], [0, 0])


@pytest.fixture(scope="session")
def r2ex():
    # left non-degenerate but degenerate on the right: rho is constant
    return from_components(lam=[(0, 1), (0, 1)], rho=[(1, 1), (1, 1)])


@pytest.fixture(scope="session")
def abex_engine(abex):
    return WordEngine(abex)


@pytest.fixture(scope="session")
def triv2_engine(triv2):
    return WordEngine(triv2)


@pytest.fixture(scope="session")
def idem2_engine(idem2):
    return WordEngine(idem2)
