import pytest

from pcsp.instances import dinner


@pytest.fixture
def spec():
    return dinner()


@pytest.fixture
def spec_no_pantagruel():
    return dinner(p_pantagruel=0.0)
