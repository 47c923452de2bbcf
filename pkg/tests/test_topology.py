import networkx as nx
import pytest

from qtree import InvalidParameterError, TreeKind, build_tree, depth_from_nodes, node_count


def test_build_tree_sizes():
    """Test node and edge counts of the trees drawn for N=7 and N=15."""
    assert build_tree(TreeKind.DABT, 3).n_nodes == 7
    assert build_tree(TreeKind.DABT, 3).n_edges == 6
    assert build_tree(TreeKind.USBT, 3).n_nodes == 15
    assert build_tree(TreeKind.USBT, 3).n_edges == 14

    smallest = build_tree(TreeKind.DSBT, 1)
    assert smallest.nodes == (1, 2, 3)
    assert set(smallest.edges) == {(1, 2), (1, 3)}


@pytest.mark.parametrize("depth", range(1, 13))
def test_tree_invariants(kind, depth):
    """Test that every built tree is a connected, acyclic binary tree rooted at 1."""
    tree = build_tree(kind, depth)
    tree.validate()

    assert tree.n_nodes == node_count(kind, depth)
    assert tree.n_edges == tree.n_nodes - 1
    assert tree.root == 1
    assert tree.directed is kind.directed

    graph = tree.to_networkx()
    if kind.directed:
        assert nx.is_arborescence(graph)
    else:
        assert nx.is_tree(graph)

    # Leaf counts differ between the two shapes
    if kind.symmetric:
        assert len(tree.leaves) == 2**depth
        assert all(len(tree.children[v]) == 2 for v in tree.nodes if tree.children[v])
    else:
        assert len(tree.leaves) == depth + 1
    assert max(tree.levels.values()) == depth


def test_asymmetric_labeling():
    """Test that the spine reads 1, 2, 4, ..., 2d and leaves hang off odd labels."""
    tree = build_tree(TreeKind.UABT, 4)
    assert tree.children[1] == (2, 3)
    assert tree.children[2] == (4, 5)
    assert tree.children[4] == (6, 7)
    assert tree.children[6] == (8, 9)
    assert list(tree.ancestors(8)) == [8, 6, 4, 2, 1]
    assert tree.leaves == (3, 5, 7, 8, 9)


def test_path_edges():
    """Test the unique tree path between two nodes."""
    tree = build_tree(TreeKind.USBT, 2)
    assert tree.path_edges(4, 5) == [(2, 4), (2, 5)]
    assert tree.path_edges(4, 7) == [(2, 4), (1, 2), (1, 3), (3, 7)]
    assert tree.path_edges(1, 6) == [(1, 3), (3, 6)]
    assert tree.path_edges(3, 3) == []


def test_node_count_examples():
    """Test node counts from the two shape formulas."""
    assert node_count(TreeKind.DABT, 7) == 15
    assert node_count(TreeKind.DSBT, 6) == 127
    assert node_count(TreeKind.UABT, 1) == 3


def test_depth_from_nodes_roundtrip(kind):
    """Test that depth_from_nodes inverts node_count."""
    for depth in range(1, 40):
        assert depth_from_nodes(kind, node_count(kind, depth)) == depth


def test_depth_from_nodes_examples():
    """Test the inverse on the usual N=15 and N=127 sizes."""
    assert depth_from_nodes(TreeKind.USBT, 15) == 3
    assert depth_from_nodes(TreeKind.DABT, 127) == 63


def test_inadmissible_node_counts():
    """Test that bad node counts are rejected with the nearest admissible values."""
    with pytest.raises(InvalidParameterError, match="10 not of form 2\\^\\(d\\+1\\)-1"):
        depth_from_nodes(TreeKind.DSBT, 10)

    with pytest.raises(InvalidParameterError, match="nearest admissible: 15 or 31"):
        depth_from_nodes(TreeKind.USBT, 16)

    with pytest.raises(InvalidParameterError, match="nearest admissible: 13 or 15"):
        depth_from_nodes(TreeKind.UABT, 14)

    with pytest.raises(InvalidParameterError):
        depth_from_nodes(TreeKind.DABT, 1)


@pytest.mark.parametrize("bad", [0, -3, 2.5, True])
def test_bad_depth(bad):
    """Test that non-positive or non-integer depths are rejected."""
    with pytest.raises(InvalidParameterError):
        build_tree(TreeKind.DABT, bad)


def test_kind_parsing():
    """Test that kinds parse case-insensitively and reject unknown names."""
    assert TreeKind.parse("USBT") is TreeKind.USBT
    assert TreeKind.parse(" dabt ") is TreeKind.DABT
    assert TreeKind.parse(TreeKind.DSBT) is TreeKind.DSBT
    with pytest.raises(InvalidParameterError, match="unknown tree kind"):
        TreeKind.parse("cayley")


def test_edge_list_text():
    """Test the plain-text edge list dump."""
    text = build_tree(TreeKind.DSBT, 1).edge_list_text()
    assert text == "# kind=DSBT depth=1 directed=true\n1 2\n1 3\n"

    header = build_tree(TreeKind.UABT, 2).edge_list_text().splitlines()[0]
    assert header == "# kind=UABT depth=2 directed=false"


def test_trees_are_immutable():
    """Test that a built tree cannot be modified in place."""
    tree = build_tree(TreeKind.DABT, 2)
    with pytest.raises(AttributeError):
        tree.depth = 5
    assert tree == build_tree(TreeKind.DABT, 2)
