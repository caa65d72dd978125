import pytest

from traceinv import build_graph, cyclic, fig7, melonic, two_vertex


@pytest.fixture
def mst3():
    """3 colors, 3 pairs, one face per color pair."""
    return build_graph(3, [[0, 1, 2], [1, 2, 0], [2, 0, 1]])


@pytest.fixture
def twov3():
    return two_vertex(3)


@pytest.fixture
def fig7_graph():
    return fig7()


@pytest.fixture
def melon2():
    """Single insertion on the 2-vertex graph: k=2, planar, compatible."""
    return melonic(3, [(0, 0)])


@pytest.fixture
def cyc2_d3():
    return cyclic(3, {0}, 2)
