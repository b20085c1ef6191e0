import pytest

from percolab.errors import InvariantViolation, ParseError
from percolab.generators import gen_hypercube, gen_random_regular
from percolab.graphio import format_edge_list, graph_io, parse_edge_list


def test_roundtrip(tmp_path):
    g = gen_random_regular(20, 3, seed=4)
    path = tmp_path / "g.el"
    graph_io(path, "write", g)
    assert graph_io(path, "read") == g
    assert path.read_bytes() == format_edge_list(g).encode("ascii")


def test_q3_header():
    assert format_edge_list(gen_hypercube(3)).splitlines()[0] == "8 12"


def test_comments_and_blank_lines():
    g = parse_edge_list("# a path\n3 2\n\n0 1\n# mid\n1 2\n")
    assert g.edges.tolist() == [[0, 1], [1, 2]]


@pytest.mark.parametrize(
    "text, line",
    [("3 1\n0 x\n", 2), ("3 1\n0 1 2\n", 2), ("3 1\n1 1\n", 2), ("3 1\n0 5\n", 2)],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_edge_list(text)
    assert info.value.line == line


def test_count_mismatch_and_duplicates():
    with pytest.raises(ParseError):
        parse_edge_list("3 2\n0 1\n")
    with pytest.raises(InvariantViolation):
        parse_edge_list("3 2\n0 1\n1 0\n")
    with pytest.raises(ParseError):
        parse_edge_list("")
