import pytest

from graphmonoid.graphs import EdgeIndexDescriptor, Graph


def single_sink(name="v"):
    return Graph.build([name])


def single_edge(src="v", dst="w"):
    return Graph.build([src, dst], [("e", src, dst)])


def diamond():
    return Graph.build(
        ["u", "v", "w1", "w2"],
        [("a", "v", "w1"), ("b", "v", "w2"), ("c", "w1", "u"), ("d", "w2", "u")],
    )


def rose(loops=2):
    return Graph.build(["v"], [(f"e{i}", "v", "v") for i in range(loops)])


def emitter_to_sink(k=2):
    """Infinite emitter v, every edge ranging to the sink w, k edges materialized."""
    edges = [(f"e{i}", "v", "w") for i in range(k)]
    desc = EdgeIndexDescriptor((), ("w",))
    return Graph.build(["v", "w"], edges, {"v": (desc, [f"e{i}" for i in range(k)])})


def emitter_mixed(k=3):
    """Emitter with prefix [u] then cycle [w], plus a regular vertex feeding it."""
    desc = EdgeIndexDescriptor(("u",), ("w",))
    ranges = ["u"] + ["w"] * (k - 1)
    edges = [(f"e{i}", "v", ranges[i]) for i in range(k)] + [("r", "u", "w")]
    return Graph.build(
        ["u", "v", "w"], edges, {"v": (desc, [f"e{i}" for i in range(k)])}
    )


@pytest.fixture
def sink_graph():
    return single_sink()


@pytest.fixture
def edge_graph():
    return single_edge()


@pytest.fixture
def diamond_graph():
    return diamond()


@pytest.fixture
def emitter_graph():
    return emitter_to_sink(2)
