"""Network container, edge-list IO, weights, and random generators."""

import io

import numpy as np
import pytest
from scipy.sparse.csgraph import shortest_path

from netacorr import (
    DegenerateStatisticError,
    InputError,
    Network,
    adjacency_weights,
    degrees,
    generate_random_network,
    geodesic_distances,
    inverse_geodesic_weights,
    is_connected,
    load_edge_list,
)

from conftest import random_network


def test_network_rejects_bad_edges():
    with pytest.raises(InputError):
        Network(0, ())
    with pytest.raises(InputError):
        Network(3, ((0, 0),))
    with pytest.raises(InputError):
        Network(3, ((0, 3),))
    with pytest.raises(InputError):
        Network(3, ((1, 0),))  # endpoints must be (min, max)
    with pytest.raises(InputError):
        Network(3, ((0, 1), (0, 1)))


def test_from_edges_normalizes():
    net = Network.from_edges(4, [(2, 1), (1, 2), (3, 0), (0, 3)])
    assert net.n == 4
    assert net.edges == ((0, 3), (1, 2))


def test_load_edge_list_labels_in_first_appearance_order(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("src,dst\nb,a\nc,b\nb,c\n")
    net, labels = load_edge_list(path)
    assert labels == ["b", "a", "c"]
    assert net.n == 3
    assert net.edges == ((0, 1), (0, 2))


def test_load_edge_list_accepts_file_like():
    net, labels = load_edge_list(io.StringIO("src,dst\nx,y\n"))
    assert net.n == 2
    assert labels == ["x", "y"]
    assert net.edges == ((0, 1),)


def test_load_edge_list_errors(tmp_path):
    with pytest.raises(InputError, match="cannot open"):
        load_edge_list(tmp_path / "missing.csv")

    bad_header = tmp_path / "h.csv"
    bad_header.write_text("from,to\na,b\n")
    with pytest.raises(InputError, match="src,dst"):
        load_edge_list(bad_header)

    self_loop = tmp_path / "sl.csv"
    self_loop.write_text("src,dst\na,b\nc,c\n")
    with pytest.raises(InputError, match="row 2"):
        load_edge_list(self_loop)

    no_rows = tmp_path / "empty.csv"
    no_rows.write_text("src,dst\n")
    with pytest.raises(InputError, match="no data rows"):
        load_edge_list(no_rows)

    malformed = tmp_path / "m.csv"
    malformed.write_text("src,dst\na,b,c\n")
    with pytest.raises(InputError, match="malformed"):
        load_edge_list(malformed)


def test_adjacency_weights_path(path4):
    w = adjacency_weights(path4)
    expect = np.array([
        [0, 1, 0, 0],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [0, 0, 1, 0],
    ], dtype=float)
    assert np.array_equal(w, expect)


def test_adjacency_weights_edgeless():
    with pytest.raises(DegenerateStatisticError):
        adjacency_weights(Network(3, ()))


def test_geodesic_path_and_disconnected():
    net = Network(5, ((0, 1), (1, 2), (3, 4)))
    d = geodesic_distances(net)
    assert d[0, 2] == 2
    assert d[0, 0] == 0
    assert np.isinf(d[0, 3])
    assert np.array_equal(d, d.T)


def test_geodesic_matches_scipy():
    rng = np.random.default_rng(42)
    for _ in range(20):
        net = random_network(rng, int(rng.integers(5, 25)), p=0.15)
        ours = geodesic_distances(net)
        ref = shortest_path(adjacency_weights(net), method="D", unweighted=True)
        assert np.array_equal(ours, ref)


def test_inverse_geodesic_weights_values():
    net = Network(3, ((0, 1), (1, 2)))
    w = inverse_geodesic_weights(net)
    assert w[0, 1] == 1.0
    assert w[0, 2] == 0.5
    assert np.all(np.diag(w) == 0.0)

    w2 = inverse_geodesic_weights(net, gamma=2.0)
    assert w2[0, 2] == 0.25

    with pytest.raises(InputError):
        inverse_geodesic_weights(net, gamma=0.0)


def test_inverse_geodesic_disconnected_pairs_get_zero():
    net = Network(4, ((0, 1), (2, 3)))
    w = inverse_geodesic_weights(net)
    assert w[0, 2] == 0.0
    assert w[1, 3] == 0.0
    assert w[0, 1] == 1.0


def test_degrees_and_connectivity():
    star = Network(5, ((0, 1), (0, 2), (0, 3), (0, 4)))
    assert degrees(star).tolist() == [4, 1, 1, 1, 1]
    assert is_connected(star)
    assert not is_connected(Network(4, ((0, 1), (2, 3))))
    assert is_connected(Network(1, ()))


def test_er_generator_edge_count_band():
    # n=200, p=0.03: 19900 trials, mean 597, sd about 24. A fixed seed gives
    # a fixed count; the band guards against off-by-wide generator bugs.
    for seed in range(10):
        net = generate_random_network(200, model="erdos-renyi", p=0.03,
                                      seed=seed, require_connected=False)
        assert 500 <= len(net.edges) <= 695


def test_er_default_p_targets_mean_degree_five(er_net):
    mean_deg = 2 * len(er_net.edges) / er_net.n
    assert abs(mean_deg - 5.0) < 0.6
    assert is_connected(er_net)


def test_generator_is_deterministic():
    a = generate_random_network(50, model="erdos-renyi", p=0.1, seed=7)
    b = generate_random_network(50, model="erdos-renyi", p=0.1, seed=7)
    c = generate_random_network(50, model="erdos-renyi", p=0.1, seed=8)
    assert a.edges == b.edges
    assert a.edges != c.edges


def test_small_world_edge_count_and_connectivity(sw_net):
    # rewiring moves edges but never changes the count: n * k / 2
    assert len(sw_net.edges) == 200 * 4 // 2
    assert is_connected(sw_net)
    for seed in range(5):
        net = generate_random_network(30, model="small-world", k=6,
                                      rewire_prob=0.2, seed=seed)
        assert len(net.edges) == 30 * 6 // 2
        assert is_connected(net)


def test_generator_argument_validation():
    with pytest.raises(InputError):
        generate_random_network(1, model="erdos-renyi")
    with pytest.raises(InputError):
        generate_random_network(10, model="erdos-renyi", p=1.5)
    with pytest.raises(InputError):
        generate_random_network(10, model="small-world", k=3)
    with pytest.raises(InputError):
        generate_random_network(10, model="small-world", k=12)
    with pytest.raises(InputError):
        generate_random_network(10, model="small-world", rewire_prob=-0.1)
    with pytest.raises(InputError):
        generate_random_network(10, model="ring")
    with pytest.raises(InputError):
        generate_random_network(10, model="erdos-renyi", seed=-1)


def test_require_connected_retries_or_fails():
    # p tiny: a connected 40-node graph is effectively impossible
    with pytest.raises(InputError, match="attempts"):
        generate_random_network(40, model="erdos-renyi", p=0.001, seed=0,
                                require_connected=True)
    net = generate_random_network(40, model="erdos-renyi", p=0.001, seed=0,
                                  require_connected=False)
    assert not is_connected(net)
