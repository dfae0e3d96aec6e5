import math

import pytest
from hypothesis import given, settings, strategies as st

from rosmatch.graph import (
    DuplicateEdge,
    EndpointOutOfRange,
    Graph,
    MalformedLine,
    PartitionViolation,
    SelfLoop,
    as_given,
    make_graph,
    parse_edge_list,
    permute,
    serialize_edge_list,
    subgraph_union,
    validate,
)
from rosmatch.prng import XorShift64Star, splitmix64, trial_seed


# -- parsing -------------------------------------------------------------------

def test_parse_with_header():
    g = parse_edge_list("3 2\n0 1\n1 2")
    assert (g.n, g.m, g.edges) == (3, 2, ((0, 1), (1, 2)))


def test_parse_header_only():
    g = parse_edge_list("5 0\n")
    assert (g.n, g.m) == (5, 0)


def test_parse_strict_duplicate():
    with pytest.raises(DuplicateEdge) as exc:
        parse_edge_list("2 2\n0 1\n1 0", strict=True)
    assert exc.value == DuplicateEdge(0, 1)


def test_parse_lenient_dedupes():
    g = parse_edge_list("2 2\n0 1\n1 0")
    assert g.edges == ((0, 1),)


def test_parse_without_header_infers_n():
    g = parse_edge_list("0 1\n1 2\n")
    assert (g.n, g.edges) == (3, ((0, 1), (1, 2)))


def test_parse_comments_and_crlf():
    g = parse_edge_list("# a comment\r\n4 2\r\n0 1  # trailing\r\n\r\n2 3\r\n")
    assert (g.n, g.edges) == (4, ((0, 1), (2, 3)))


def test_parse_forced_header_mismatch():
    with pytest.raises(MalformedLine):
        parse_edge_list("3 5\n0 1\n", header=True)


@pytest.mark.parametrize("text", ["0 1 2\n", "0 x\n", "7\n"])
def test_parse_malformed(text):
    with pytest.raises(MalformedLine) as exc:
        parse_edge_list(text)
    assert exc.value.lineno == 1


def test_parse_self_loop():
    with pytest.raises(SelfLoop):
        parse_edge_list("1 1\n")


def test_parse_out_of_range_with_header():
    with pytest.raises(EndpointOutOfRange):
        parse_edge_list("2 1\n0 5\n", header=True)


def test_parse_sides_comment():
    g = parse_edge_list("# sides: 0011\n4 2\n0 2\n1 3\n")
    assert g.sides == (0, 0, 1, 1)
    with pytest.raises(PartitionViolation):
        parse_edge_list("# sides: 0011\n4 1\n0 1\n")


# -- validate ------------------------------------------------------------------

def test_validate_self_loop():
    assert validate(Graph(3, ((2, 2),))) == [SelfLoop(2)]


def test_validate_triangle():
    assert validate(Graph(3, ((0, 1), (1, 2), (0, 2)))) == []


def test_validate_partition():
    g = Graph(4, ((0, 1), (0, 2)), sides=(0, 0, 1, 1))
    assert validate(g) == [PartitionViolation(0, 1)]


def test_validate_reports_everything():
    g = Graph(3, ((0, 1), (1, 0), (0, 7), (1, 1)))
    assert validate(g) == [DuplicateEdge(0, 1), EndpointOutOfRange(0, 7, 3), SelfLoop(1)]


# -- union ---------------------------------------------------------------------

def test_union_examples():
    assert subgraph_union([(0, 1)], [(1, 2)], 3).m == 2
    assert subgraph_union([(0, 1)], [(1, 0)], 2).m == 1
    g = subgraph_union([], [], 4)
    assert (g.n, g.m) == (4, 0)


def test_union_out_of_range():
    with pytest.raises(EndpointOutOfRange):
        subgraph_union([(0, 5)], [], 3)


edge_lists = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=30),
    )
)


@given(edge_lists, edge_lists)
def test_union_size(a, b):
    n = max(a[0], b[0])
    h = {tuple(sorted(e)) for e in a[1]}
    x = {tuple(sorted(e)) for e in b[1]}
    g = subgraph_union(h, x, n)
    assert g.m <= len(h) + len(x)
    assert (g.m == len(h) + len(x)) == (not h & x)


@given(edge_lists, st.booleans())
def test_roundtrip(data, with_sides):
    n, edges = data
    g = make_graph(n, edges)
    if with_sides:
        # drop edges inside a random-looking side labelling
        sides = tuple(v % 2 for v in range(n))
        g = make_graph(n, [e for e in g.edges if sides[e[0]] != sides[e[1]]], sides=sides)
    again = parse_edge_list(serialize_edge_list(g))
    assert again == g
    assert parse_edge_list(serialize_edge_list(again)) == g


# -- permutations and the PRNG ---------------------------------------------------

def test_splitmix64_reference_vector():
    # reference outputs of splitmix64 with state 1234567
    state = 1234567
    out = []
    for _ in range(3):
        out.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) % 2**64
    assert out == [6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_xorshift_against_plain_definition():
    rng = XorShift64Star(99)
    x = splitmix64(99)
    for _ in range(50):
        x ^= x >> 12
        x ^= (x << 25) % 2**64
        x ^= x >> 27
        assert rng.next_u64() == (x * 0x2545F4914F6CDD1D) % 2**64


def test_below_range():
    rng = XorShift64Star(5)
    draws = [rng.below(7) for _ in range(2000)]
    assert set(draws) == set(range(7))
    with pytest.raises(ValueError):
        rng.below(0)


def test_trial_seed_is_xor():
    assert trial_seed(12, 5) == 12 ^ 5


def test_permute_single():
    for seed in (0, 1, 2**63):
        assert permute(1, seed).permutation == (0,)


def test_permute_deterministic():
    assert permute(5, 7) == permute(5, 7)
    assert permute(5, 7).seed == 7


def test_permute_empty_and_as_given():
    assert permute(0, 3).permutation == ()
    assert as_given(4).permutation == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        permute(-1, 0)


@given(st.integers(0, 300), st.integers(0, 2**64 - 1))
@settings(max_examples=60)
def test_permute_bijection(m, seed):
    assert sorted(permute(m, seed).permutation) == list(range(m))


@pytest.mark.slow
def test_permute_uniform_position_means():
    m, seeds = 10_000, 100
    sums = [0] * m
    for s in range(seeds):
        for pos, idx in enumerate(permute(m, s).permutation):
            sums[pos] += idx
    mu = (m - 1) / 2
    sigma_mean = math.sqrt((m * m - 1) / 12 / seeds)
    z = [(sums[p] / seeds - mu) / sigma_mean for p in range(m)]
    # 3-sigma exceedances occur with probability 0.27% per position under uniformity
    beyond3 = sum(abs(v) > 3 for v in z)
    assert beyond3 <= 0.01 * m
    assert max(abs(v) for v in z) < 5


def test_stream_cursor():
    g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
    order = permute(3, 4)
    stream = order.stream(g)
    seen = []
    for e in stream:
        seen.append(e)
        assert stream.cursor == len(seen)
    assert sorted(seen) == sorted(g.edges)
    with pytest.raises(ValueError):
        permute(2, 0).stream(g)
