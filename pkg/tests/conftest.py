import pytest

from hkt.chart import CoordinateChart
from hkt.quaternionic import HypercomplexStructure, flat_chart


@pytest.fixture
def chart8():
    return flat_chart(2)


@pytest.fixture
def flat8(chart8):
    return HypercomplexStructure.flat(chart8)


@pytest.fixture
def box8():
    return CoordinateChart.box(8)


@pytest.fixture
def pts8(chart8):
    return chart8.sample(50, 11)
