import pytest

from helpers import load_net


@pytest.fixture(scope="session")
def chain2():
    return load_net("chain2")


@pytest.fixture(scope="session")
def indep3():
    return load_net("indep3")


@pytest.fixture(scope="session")
def chain3():
    return load_net("chain3")


@pytest.fixture(scope="session")
def polytree8():
    return load_net("polytree8")


@pytest.fixture(scope="session")
def polytree8_ternary():
    return load_net("polytree8_ternary")


@pytest.fixture(scope="session")
def ternary_root():
    return load_net("ternary_root")


@pytest.fixture(scope="session")
def ternary_mid():
    return load_net("ternary_mid")


@pytest.fixture(scope="session")
def tree5():
    return load_net("tree5")
