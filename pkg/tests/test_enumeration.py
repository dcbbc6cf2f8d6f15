import random
from collections import Counter
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, strategies as st

from conftest import chains
from oracles import slit_torus_holonomies
from hypslit.enumeration import (
    CSV_COLUMNS,
    _int_bound,
    _reach_bound,
    apex_sides,
    dedupe_by_direction,
    empty_triangles,
    enumerate_saddle_connections,
    eps_isolated,
    is_C_separated,
    simple_cylinders_containing,
    size_bucket,
    triangle_embedded,
    triangle_path,
    triangles_with_side,
    triangles_with_side_by_size,
)
from hypslit.geometry import GeometryError, Vec2, cross, size_of_sq
from hypslit.involution import find_involution
from hypslit.surface import (
    SlitSurface,
    builtin,
    connection_from,
    diagonal_halfedge,
    from_parallelogram_chain,
    random_chain,
)


def holonomy_multiset(res):
    return Counter(c.holonomy for c in res.connections)


def test_unit_torus_unit_vectors():
    s, _ = builtin("torus")
    res = enumerate_saddle_connections(s, 1)
    assert sorted(c.holonomy for c in res) == sorted([Vec2.of(1, 0), Vec2.of(0, 1)])


@pytest.mark.parametrize("L_sq", [1, 4, 10, 50, 200])
def test_slit_torus_matches_lattice_oracle(slit_torus, L_sq):
    res = enumerate_saddle_connections(SlitSurface(*slit_torus), L_sq)
    assert holonomy_multiset(res) == slit_torus_holonomies(L_sq)


def test_below_systole_is_empty(slit_torus):
    assert len(enumerate_saddle_connections(SlitSurface(*slit_torus), Fraction(1, 5))) == 0


def test_nonpositive_bound(slit_torus):
    with pytest.raises(GeometryError):
        enumerate_saddle_connections(slit_torus[0], 0)


def test_size_buckets_partition_and_match_oracle(slit_torus):
    L_sq = 64
    res = enumerate_saddle_connections(SlitSurface(*slit_torus), L_sq)
    oracle = slit_torus_holonomies(L_sq)
    total = 0
    for j in range(-2, 4):
        bucket = size_bucket(res, j)
        total += len(bucket)
        want = sum(n for v, n in oracle.items() if size_of_sq(v[0] ** 2 + v[1] ** 2) == j)
        assert len(bucket) == want
    assert total == len(res)
    assert size_of_sq(Fraction(1)) == 0


def test_results_sorted_canonical_unique(hyp2):
    res = enumerate_saddle_connections(SlitSurface(*hyp2), 30)
    keys = [c.key for c in res]
    assert len(keys) == len(set(keys))
    assert all(c.holonomy.is_upper() for c in res)
    lens = [c.len_sq for c in res]
    assert lens == sorted(lens)


@given(chains(), st.integers(1, 40))
def test_monotone_in_bound(sb, L_sq):
    s, he = sb
    obj = SlitSurface(s, he)
    small = enumerate_saddle_connections(obj, L_sq)
    big = enumerate_saddle_connections(obj, 2 * L_sq)
    assert small.keys() <= big.keys()
    assert big.restrict(L_sq).keys() == small.keys()


@given(chains())
def test_closed_under_involution(sb):
    s, he = sb
    tau = find_involution(s, he)
    res = enumerate_saddle_connections(SlitSurface(s, he), 6 * s.area())
    keys = res.keys()
    for c in res:
        assert tau.image(s, c).key in keys


def test_thread_count_does_not_change_output(hyp2):
    obj = SlitSurface(*hyp2)
    a = enumerate_saddle_connections(obj, 40, threads=1)
    b = enumerate_saddle_connections(obj, 40, threads=3)
    assert a.connections == b.connections
    tau = find_involution(*hyp2)
    assert a.to_csv(tau) == b.to_csv(tau)
    assert a.to_csv(tau).splitlines()[0] == ",".join(CSV_COLUMNS)


def test_dedupe_keeps_one_per_direction(hyp2):
    res = enumerate_saddle_connections(SlitSurface(*hyp2), 10)
    kept = dedupe_by_direction(res)
    dirs = [c.holonomy for c in kept]
    assert len(dirs) == len(set(dirs)) == len({c.holonomy for c in res})


def test_eps_isolation():
    a, b = Vec2.of(1, 0), Vec2.of(0, 1)
    assert not eps_isolated(a, Vec2.of(3, 0), Fraction(1, 100), 1)
    assert eps_isolated(a, b, 1, Fraction(1, 2))
    assert eps_isolated(a * 2, b * 2, 1, Fraction(1, 2)) == eps_isolated(a, b, 1, Fraction(1, 2))
    assert not eps_isolated(a, b, 2, 1)


def thin_chain():
    # first chain side has length 1/8, far below the diagonals
    us = [Vec2.of(1, 0), Vec2.of(0, "1/8"), Vec2.of(-1, 0), Vec2.of(0, -1)]
    return from_parallelogram_chain([(us[i], us[i + 1]) for i in range(3)])


def test_C_separation():
    s = thin_chain()
    tau = find_involution(s)
    alpha = connection_from(s, diagonal_halfedge(2), s.edge(diagonal_halfedge(2)))
    beta = connection_from(s, diagonal_halfedge(0), s.edge(diagonal_halfedge(0)))
    search = enumerate_saddle_connections(s, beta.len_sq)
    assert is_C_separated(s, tau, alpha, beta, 4, search)
    assert not is_C_separated(s, tau, alpha, beta, 100, search)
    short = search.connections[0]
    assert not is_C_separated(s, tau, short, short, 1, enumerate_saddle_connections(s, short.len_sq))
    with pytest.raises(GeometryError):
        is_C_separated(s, tau, alpha, beta, Fraction(1, 4), search)


def test_triangles_on_slit_torus(slit_torus):
    s, he = slit_torus
    obj = SlitSurface(s, he)
    search = enumerate_saddle_connections(obj, 16)
    found = {c.holonomy for c in triangles_with_side(obj, he, 0, search)}
    # the triangle with apex (1/2, 1): its side from L is invariant, so only
    # the vertical side from R is reported
    assert Vec2.of(0, 1) in found
    assert Vec2.of("1/2", 1) not in found
    tau = find_involution(s, he)
    diag = connection_from(s, (0, 0), Vec2.of("1/2", 1))
    assert tau.is_invariant(diag)
    assert triangles_with_side(obj, he, -3, search) == []
    for j in (0, 1):
        for g in triangles_with_side(obj, he, j, search):
            assert abs(cross(g.holonomy, s.edge(he))) <= 2 * s.area()


def test_triangle_search_needs_bound(slit_torus):
    obj = SlitSurface(*slit_torus)
    with pytest.raises(GeometryError):
        triangles_with_side(obj, slit_torus[1], 3, enumerate_saddle_connections(obj, 4))


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_fast_and_verified_routes_agree(name):
    s, he = builtin(name)
    obj = SlitSurface(s, he)
    search = enumerate_saddle_connections(obj, 4 ** 4)
    fast = triangles_with_side_by_size(obj, he, range(-1, 4), search)
    slow = triangles_with_side_by_size(obj, he, range(-1, 4), search, verify=True)
    assert fast == slow
    assert simple_cylinders_containing(obj, None, he, 100) == \
        simple_cylinders_containing(obj, None, he, 100, verify=True)


def torus_cylinder_oracle(L_sq):
    # on the unit torus marked at 0 and 1/2 the simple cylinders containing
    # [0, 1/2] are the strips right of the leaves in directions (a, 1)
    r = isqrt(L_sq)
    return {Vec2.of(a, 1) for a in range(-r, r + 1) if a * a + 1 <= L_sq}


@pytest.mark.parametrize("L_sq", [1, 2, 17, 100, 1000])
def test_slit_torus_cylinders_match_oracle(slit_torus, L_sq):
    s, he = slit_torus
    certs = simple_cylinders_containing(SlitSurface(s, he), None, he, L_sq)
    assert {c.boundary.canonical().holonomy for c in certs} == torus_cylinder_oracle(L_sq)
    for c in certs:
        assert c.area == 1 or c.area == Fraction(1, 2)


def test_cylinders_below_systole_empty(hyp2):
    s, he = hyp2
    assert simple_cylinders_containing(SlitSurface(s, he), None, he, Fraction(1, 2)) == []


def test_cylinders_need_invariant_slit(hyp2):
    s, _ = hyp2
    with pytest.raises(GeometryError):
        simple_cylinders_containing(s, find_involution(s), (0, 2), 10)


@given(chains())
def test_at_most_one_short_cylinder(sb):
    s, he = sb
    beta_sq = s.edge(he).norm_sq()
    certs = simple_cylinders_containing(SlitSurface(s, he), None, he, beta_sq / 4)
    assert len(certs) <= 1


def _triangles_above(s, he, L_sq):
    obj = SlitSurface(s, he)
    hcap = _int_bound(s, 2 * s.area())
    out = []
    blocked = obj.blocked
    for t, c, px, py in empty_triangles(obj, he, hcap, _reach_bound(s, he, L_sq)):
        path = triangle_path(s, blocked, he, px, py)
        if path is None or not triangle_embedded(s, he, path[0], px, py):
            continue
        rho, sigma = apex_sides(s, he, t, c, px, py)
        # the longer side, as a planar segment from its base vertex
        if rho.len_sq >= sigma.len_sq:
            out.append(((0, 0), (px, py), rho.holonomy))
        else:
            bx, by = s.int_edges[he[0]][he[1]]
            out.append(((bx, by), (px, py), sigma.holonomy))
    return out


def _cross_interior(p, q, r, u):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    d1, d2 = orient(p, q, r), orient(p, q, u)
    d3, d4 = orient(r, u, p), orient(r, u, q)
    return d1 * d2 < 0 and d3 * d4 < 0


@pytest.mark.parametrize("seed", range(6))
def test_small_angle_bound(seed):
    s, he = random_chain(random.Random(seed), 3)
    beta = s.edge(he)
    tris = _triangles_above(s, he, 40 * beta.norm_sq())
    checked = 0
    for i, (a0, a1, g) in enumerate(tris):
        for b0, b1, g2 in tris[i + 1:]:
            if not (g2.norm_sq() <= 4 * g.norm_sq() and g.norm_sq() <= 4 * g2.norm_sq()):
                continue
            if not _cross_interior(a0, a1, b0, b1):
                continue
            checked += 1
            assert abs(cross(g, beta)) <= 2 * abs(cross(g, g2))
    assert checked > 0
