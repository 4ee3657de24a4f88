import pytest

from heteroqec.codes import build_code


@pytest.fixture(scope='session')
def css3():
    return build_code(3, 'css')


@pytest.fixture(scope='session')
def xy3():
    return build_code(3, 'xy')


@pytest.fixture(scope='session')
def css5():
    return build_code(5, 'css')


@pytest.fixture(scope='session')
def xy5():
    return build_code(5, 'xy')
