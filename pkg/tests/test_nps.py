import random
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import chains
from hypslit.enumeration import enumerate_saddle_connections, simple_cylinders_containing
from hypslit.flows import horocycle, normalize_slit_horizontal
from hypslit.geometry import GeometryError, Vec2, cross
from hypslit.involution import find_involution
from hypslit.nps import (
    ApexCert,
    BadnessConfig,
    Periodic,
    availability,
    classify_badness,
    excise_cylinder,
    good_time_bound,
    horizontal_size,
    nearest_zero_above,
    nps_find_simple_cylinder,
    nps_iterations,
    parallelogram_decomposition,
    successions,
)
from hypslit.surface import SlitSurface, builtin, random_chain


def test_slit_torus_band_is_periodic(slit_torus):
    found = nearest_zero_above(SlitSurface(*slit_torus))
    assert isinstance(found, Periodic)
    assert found.simple and found.height == 1
    assert found.cylinder.circumference_sq == 1


def test_sheared_slit_torus_has_apex(slit_torus):
    s, he = slit_torus
    x = horocycle(s, Fraction(1, 3))
    found = nearest_zero_above(x, he)
    assert isinstance(found, ApexCert)
    # the lowest vertex over (0, 1/2) is the image of (0, 1), the left end's point
    assert found.rho.holonomy == Vec2.of("1/3", 1)
    assert found.apex == s.vertex_of(he)
    assert found.apex != s.vertex_of((he[0], 1))
    assert found.rho.holonomy - found.sigma.holonomy == x.edge(he)
    assert found.rho.holonomy.y > 0 and found.sigma.holonomy.y > 0


def test_sweep_needs_horizontal_slit(hyp4):
    with pytest.raises(GeometryError):
        nearest_zero_above(SlitSurface(*hyp4))


@given(chains())
def test_apex_closes_triangle(sb):
    s, he = sb
    x, _ = normalize_slit_horizontal(SlitSurface(s, he))
    found = nearest_zero_above(x)
    if isinstance(found, ApexCert):
        assert found.rho.holonomy - found.sigma.holonomy == x.beta
        assert found.parallelogram_area == cross(x.beta, found.rho.holonomy) > 0


def test_slit_torus_nps(slit_torus):
    cert, trace = nps_find_simple_cylinder(SlitSurface(*slit_torus))
    assert nps_iterations(trace) <= 1
    assert cert.circumference_sq == 1
    assert trace[-1]["kind"] == "cylinder"


def test_hyp4_nps_within_bound(hyp4):
    s, he = hyp4
    cert, trace = nps_find_simple_cylinder(SlitSurface(s, he))
    assert nps_iterations(trace) <= s.dim_c - 2
    ok = simple_cylinders_containing(s, None, he, cert.circumference_sq)
    assert cert.boundary.key in {c.boundary.key for c in ok}
    for step in trace:
        if step["kind"] == "apex" and "shear" in step:
            Fraction(step["shear"])
            assert step["excised_stratum"].startswith("H(")


@pytest.mark.parametrize("k", [2, 3, 5])
def test_nps_random_sweep(k):
    rng = random.Random(100 + k)
    for _ in range(25):
        s, he = random_chain(rng, k)
        cert, trace = nps_find_simple_cylinder(SlitSurface(s, he))
        assert nps_iterations(trace) <= s.dim_c - 2
        assert cert.contains_slit


def test_nps_rejects_noninvariant_slit(hyp2):
    s, _ = hyp2
    with pytest.raises(GeometryError):
        nps_find_simple_cylinder(s, None, (0, 2))
    with pytest.raises(GeometryError):
        nps_find_simple_cylinder(SlitSurface(*hyp2), perturb=0)


def test_nps_without_validation_agrees(hyp4):
    a, _ = nps_find_simple_cylinder(SlitSurface(*hyp4))
    b, _ = nps_find_simple_cylinder(SlitSurface(*hyp4), validate=False)
    assert a.boundary.holonomy.canonical() == b.boundary.holonomy.canonical()
    assert a.area == b.area


def rho_from_left(s, he, hol):
    res = enumerate_saddle_connections(SlitSurface(s, he), hol.norm_sq())
    for c in res:
        for cand in (c, c.reversed()):
            if cand.holonomy == hol and cand.start_vertex == s.vertex_of(he):
                a = availability(SlitSurface(s, he), cand)
                if a is not None:
                    return a
    return None


def test_availability_window(slit_torus):
    s, he = slit_torus
    a = rho_from_left(s, he, Vec2.of(-3, 1))
    assert a is not None and a.from_left
    assert a.window == (Fraction(3), Fraction(7, 2))
    assert a.length * a.v == s.edge(he).x


def test_availability_horizontal_is_none(slit_torus):
    s, he = slit_torus
    res = enumerate_saddle_connections(SlitSurface(s, he), 1)
    flat = [c for c in res if c.holonomy.y == 0]
    assert flat and all(availability(SlitSurface(s, he), c) is None for c in flat)


@given(chains(k=3))
def test_window_length_identity(sb):
    s, he = sb
    x, _ = normalize_slit_horizontal(SlitSurface(s, he))
    w = x.beta.x
    for c in enumerate_saddle_connections(x, 8 * x.area()):
        for cand in (c, c.reversed()):
            a = availability(x, cand)
            if a is not None:
                assert a.v > 0 and a.length * a.v == w


def test_badness():
    cfg = BadnessConfig(Fraction(1, 10), Fraction(1, 4))
    from hypslit.nps import Availability
    full = Availability(None, Fraction(0), Fraction(1), (0, 1), True)
    assert classify_badness(full, cfg, 1, 1) == "good"
    low = Availability(None, Fraction(0), Fraction(1, 20), (0, 20), True)
    assert classify_badness(low, cfg, 1, 1) == "bad"
    assert good_time_bound(cfg, 1, 1) == 10
    d = BadnessConfig.default(4)
    assert d.m0 == Fraction(1, 16) / (2 ** 12 * 4)
    with pytest.raises(GeometryError):
        BadnessConfig(0, Fraction(1, 4))


def test_horizontal_size():
    from hypslit.surface import SaddleConnection
    sc = SaddleConnection((0, 0), Vec2.of(-5, 1), 0, 0, (0, 0))
    assert horizontal_size(sc) == 2
    assert horizontal_size(SaddleConnection((0, 0), Vec2.of(0, 1), 0, 0, (0, 0))) is None


DECOMP = {"torus": 1, "slit-torus": 2, "hyp2": 3, "hyp4": 5, "hyp4-square": 5}


@pytest.mark.parametrize("name", sorted(DECOMP))
def test_decomposition_counts(name):
    s, he = builtin(name)
    pieces = parallelogram_decomposition(SlitSurface(s, he))
    assert len(pieces) == DECOMP[name] == s.dim_c - 1
    assert sum(p.area for p in pieces) == s.area()
    assert pieces[0].diagonal == s.edge(he)
    for p in pieces:
        assert p.side_a - p.side_b == p.diagonal
        assert p.area == cross(p.diagonal, p.side_a)


@given(chains())
def test_decomposition_random(sb):
    s, he = sb
    pieces = parallelogram_decomposition(SlitSurface(s, he))
    assert len(pieces) == s.dim_c - 1
    assert sum(p.area for p in pieces) == s.area()


def test_successions_depth_one_is_cylinder_filter(slit_torus):
    s, he = slit_torus
    chains_ = successions(SlitSurface(s, he), None, he, [(4, 100)], excise_leaves=False)
    direct = [c for c in simple_cylinders_containing(s, None, he, 100) if c.circumference_sq >= 4]
    assert [ch.gammas[0].key for ch in chains_] == [c.boundary.key for c in direct]


def test_hyp2_depth_two_ends_in_cylinder(hyp2):
    s, he = hyp2
    chains_ = successions(SlitSurface(s, he), None, he, [(1, 20), (1, 80)])
    deep = [c for c in chains_ if c.level == 2]
    assert deep
    for ch in deep:
        rest = ch.surface
        assert rest.dim_c == 2
        cert, _ = nps_find_simple_cylinder(rest, ch.involution, ch.slit)
        assert cert.area == rest.area()
        total = sum(c.area for c in ch.certs) + rest.area()
        assert total == s.area()
        g1, g2 = ch.gammas
        assert abs(cross(g1.holonomy, g2.holonomy)) == ch.certs[1].area


def test_good_cylinders_are_separated(hyp2):
    s, he = hyp2
    cfg = BadnessConfig.default(s.dim_c)
    chains_ = successions(SlitSurface(s, he), None, he, [(1, 400)], excise_leaves=False)
    hs = [ch.gammas[0].holonomy for ch in chains_]
    assert len(hs) > 5
    for i, a in enumerate(hs):
        for b in hs[i + 1:]:
            assert abs(cross(a, b)) >= cfg.m0 * s.area()


def test_successions_depth_limit(slit_torus):
    with pytest.raises(GeometryError):
        successions(SlitSurface(*slit_torus), None, slit_torus[1], [(1, 4), (1, 4)])


def test_excise_keeps_complement(hyp2):
    s, he = hyp2
    tau = find_involution(s, he)
    cert = simple_cylinders_containing(s, tau, he, 10)[0]
    rest, slit_he, inv = excise_cylinder(s, tau, he, cert.boundary)
    assert rest.area() == s.area() - cert.area
    assert inv.fixes_edge(rest, slit_he)
    assert rest.edge(slit_he).canonical() == cert.boundary.holonomy.canonical()
