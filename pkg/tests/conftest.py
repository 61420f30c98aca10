import pytest

from eiszeros.groups import group_spec


@pytest.fixture(scope="session")
def sl2z():
    return group_spec("sl2z")


@pytest.fixture(scope="session")
def gamma0_2():
    return group_spec("gamma0_2")


@pytest.fixture(scope="session")
def gamma0_3():
    return group_spec("gamma0_3")
