import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rbfscore import (Graph, InputError, ParseError, affinity, attach_labels,
                      load_dataset, parse_edge_list, parse_labels, permute_nodes,
                      serialize_edge_list)
from rbfscore.graph_io import serialize_labels

from conftest import TOY_EDGES


def test_path_graph():
    g = parse_edge_list("1 2\n2 3")
    assert g.n == 3
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_toy_graph_counts():
    g = parse_edge_list(TOY_EDGES)
    assert (g.n, g.m) == (6, 6)


def test_duplicates_and_self_loops_dropped():
    g = parse_edge_list("1 2\n1 2\n1 1")
    assert g.n == 2
    assert g.edges.tolist() == [[0, 1]]
    assert g.n_duplicates == 1
    assert g.n_self_loops == 1


def test_reverse_edge_counts_as_duplicate():
    g = parse_edge_list("a b\nb a\n")
    assert g.m == 1 and g.n_duplicates == 1


def test_first_appearance_indexing():
    g = parse_edge_list("10 3\n3 7\n")
    assert g.node_names == ("10", "3", "7")


def test_comments_and_blank_lines():
    g = parse_edge_list("# header\n\n1 2\n   \n# more\n2 3\n")
    assert g.m == 2


def test_weight_column_ignored_with_warning():
    with pytest.warns(UserWarning, match="weights are ignored"):
        g = parse_edge_list("1 2 0.5\n2 3 7\n")
    assert g.m == 2


def test_non_numeric_weight_rejected():
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list("1 2 heavy\n")


def test_malformed_line_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_edge_list("1 2\n3\n")
    assert info.value.line == 2


def test_empty_graph_rejected():
    with pytest.raises(ParseError):
        parse_edge_list("# nothing here\n")


def test_labels_toy():
    g = parse_edge_list(TOY_EDGES)
    labels = parse_labels("1 7\n2 7\n3 7\n4 7\n5 9\n6 9\n", g)
    assert labels.tolist() == [0, 0, 0, 0, 1, 1]


def test_labels_follow_graph_order():
    g = parse_edge_list("b a\na c\n")
    labels = parse_labels("a 1\nb 0\nc 1\n", g)
    assert labels.tolist() == [0, 1, 1]


def test_label_missing_node():
    g = parse_edge_list(TOY_EDGES)
    with pytest.raises(ParseError, match="node without label"):
        parse_labels("1 0\n2 0\n3 0\n4 0\n6 1\n", g)


def test_label_unknown_node():
    g = parse_edge_list("1 2\n")
    with pytest.raises(ParseError, match="unknown node"):
        parse_labels("1 0\n2 0\n3 1\n", g)


def test_label_non_integer():
    g = parse_edge_list("1 2\n")
    with pytest.raises(ParseError, match="not an integer"):
        parse_labels("1 a\n2 b\n", g)


def test_label_conflict():
    g = parse_edge_list("1 2\n")
    with pytest.raises(ParseError, match="conflicting"):
        parse_labels("1 0\n2 0\n1 1\n", g)


def test_isolated_nodes_from_label_file():
    g = parse_edge_list("1 2\n")
    g2 = attach_labels(g, "1 0\n2 0\n3 1\n", add_isolated=True)
    assert g2.n == 3
    assert g2.ground_truth.tolist() == [0, 0, 1]
    assert affinity(g2).degrees.tolist() == [1, 1, 0]


def test_karate_bundle():
    g = load_dataset("karate")
    assert (g.n, g.m) == (34, 78)
    assert sorted(set(g.ground_truth.tolist())) == [0, 1]
    aff = affinity(g)
    assert aff.d_max == 17


def test_toy_affinity_matrix():
    A = affinity(parse_edge_list(TOY_EDGES)).A
    expected = np.array([
        [0, 1, 0, 0, 0, 0],
        [1, 0, 1, 1, 0, 0],
        [0, 1, 0, 1, 1, 0],
        [0, 1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 1],
        [0, 0, 0, 0, 1, 0]], dtype=float)
    assert np.array_equal(A, expected)


def test_triangle_affinity():
    aff = affinity(parse_edge_list("1 2\n2 3\n3 1\n"))
    assert np.array_equal(aff.A, np.ones((3, 3)) - np.eye(3))
    assert aff.d_max == 2


def test_node_cap():
    g = parse_edge_list("1 2\n2 3\n")
    with pytest.raises(InputError, match="limit"):
        affinity(g, max_nodes=2)


def test_graph_constructor_validation():
    with pytest.raises(InputError):
        Graph(n=2, edges=[[0, 2]])
    with pytest.raises(InputError):
        Graph(n=2, edges=[[1, 1]])
    with pytest.raises(InputError):
        Graph(n=2, edges=[[0, 1], [1, 0]])
    with pytest.raises(InputError):
        Graph(n=2, edges=[[0, 1]], ground_truth=[0])


def test_graph_is_immutable():
    g = parse_edge_list("1 2\n")
    with pytest.raises(ValueError):
        g.edges[0, 0] = 5


def test_label_round_trip():
    g = load_dataset("karate")
    again = attach_labels(g, serialize_labels(g))
    assert np.array_equal(again.ground_truth, g.ground_truth)


edge_lists = st.lists(
    st.tuples(st.integers(0, 14), st.integers(0, 14)), min_size=1, max_size=40
).filter(lambda pairs: any(u != v for u, v in pairs))


@given(edge_lists)
def test_round_trip_serialize(pairs):
    text = "".join(f"n{u} n{v}\n" for u, v in pairs)
    g = parse_edge_list(text)
    # isolated nodes (seen only in self-loops) have no edge-list form
    assume(affinity(g).degrees.min() > 0)
    g2 = parse_edge_list(serialize_edge_list(g))
    assert g2.node_names == g.node_names
    assert np.array_equal(affinity(g2).A, affinity(g).A)


@given(edge_lists)
def test_degree_sum_is_twice_edges(pairs):
    g = parse_edge_list("".join(f"{u} {v}\n" for u, v in pairs))
    assert affinity(g).degrees.sum() == 2 * g.m


@given(edge_lists, st.randoms(use_true_random=False))
def test_relabelling_gives_permutation_similar_matrix(pairs, rnd):
    g = parse_edge_list("".join(f"{u} {v}\n" for u, v in pairs))
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    h = parse_edge_list("".join(f"{v} {u}\n" for u, v in shuffled))
    # map h's indices onto g's through the shared node tokens
    perm = np.array([g.index_of(tok) for tok in h.node_names])
    A, B = affinity(g).A, affinity(h).A
    assert np.array_equal(B, A[np.ix_(perm, perm)])


@given(edge_lists, st.randoms(use_true_random=False))
def test_permute_nodes(pairs, rnd):
    g = parse_edge_list("".join(f"{u} {v}\n" for u, v in pairs))
    order = list(range(g.n))
    rnd.shuffle(order)
    h = permute_nodes(g, order)
    A = affinity(g).A
    assert np.array_equal(affinity(h).A, A[np.ix_(order, order)])
    assert h.node_names == tuple(g.node_names[i] for i in order)


def test_weights_warning_is_single():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        parse_edge_list("1 2 1\n2 3 1\n3 4 1\n")
    assert len(caught) == 1
