"""Simple cylinders through an invariant slit, found by horocycle renormalisation.

The loop: sweep the vertical band above the horizontal slit to its lowest
vertex p.  The triangle (L, R, p) and its involution image form a
parallelogram with the slit as diagonal.  If a side of the triangle is
invariant the parallelogram is a simple cylinder.  Otherwise shear until the
right side sigma is vertical, cut out the part bounded by sigma and its image
that misses the slit, and go again on the smaller surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _kernel as K
from .enumeration import (
    CylinderCert,
    apex_sides,
    cylinder_from_apex,
    simple_cylinders_containing,
    triangle_embedded,
    triangle_path,
)
from .flows import normalize_slit_horizontal
from .geometry import (
    GeometryError,
    Mat2,
    Vec2,
    cross,
    horocycle_matrix,
    rat,
    rat_str,
    size_of_sq,
)
from .involution import Involution, classify, cut_and_glue, find_involution
from .surface import (
    HalfEdge,
    SaddleConnection,
    SlitSurface,
    Surface,
    SurfaceError,
    connection_from,
    corner_limit,
    insert_edge,
)

SWEEP_CAP = 2_000_000


class NPSError(SurfaceError):
    """The renormalisation loop broke one of its guarantees."""


# ---------------------------------------------------------------- apex


@dataclass(frozen=True)
class ApexCert:
    """Lowest vertex above the slit, with the two sides reaching it."""

    rho: SaddleConnection  # from the left end of the slit
    sigma: SaddleConnection  # from the right end
    apex: int  # vertex class
    parallelogram_area: Fraction
    corner: tuple  # (t, c) arrival corner at the apex
    position: tuple  # scaled integer position relative to the left end


@dataclass(frozen=True)
class Periodic:
    """The band over the slit closed up into a cylinder without meeting a vertex."""

    height: Fraction
    simple: bool
    cylinder: Optional[CylinderCert]


def _split(obj, beta=None) -> tuple:
    if isinstance(obj, SlitSurface):
        return obj.surface, obj.slit if beta is None else tuple(beta)
    if beta is None:
        raise GeometryError("no slit given")
    return obj, tuple(beta)


def _vertical_from(s: Surface, corner: HalfEdge, hgt: int, blocked):
    try:
        return connection_from(s, corner, s.from_int(0, hgt), blocked)
    except K.KernelError:
        return None


def nearest_zero_above(obj, beta: HalfEdge = None, cap: int = SWEEP_CAP):
    """Sweep straight up from a horizontal slit pointing right.

    Returns an :class:`ApexCert` for the lowest vertex strictly above the
    open slit (leftmost on ties), or :class:`Periodic` if the band returns.
    """
    s, h = _split(obj, beta)
    E, G = s.int_edges, s.gluing
    w, wy = E[h[0]][h[1]]
    if wy != 0 or w <= 0:
        raise GeometryError("slit must be horizontal and point right")
    blocked = frozenset((h, s.glue(h)))
    res = K.band_sweep(E, G, blocked, h, cap)
    if res[0] == "apex":
        _, t, c, px, py = res
        rho, sigma = apex_sides(s, h, t, c, px, py)
        return ApexCert(rho, sigma, s.vertex_of((t, c)), cross(s.edge(h), rho.holonomy),
                        (t, c), (px, py))
    hgt = res[1]
    lim = corner_limit(s)
    left = _vertical_from(s, K.locate_ccw(E, G, h, 0, 1, lim), hgt, blocked)
    right = _vertical_from(s, K.locate_cw(E, G, (h[0], (h[1] + 1) % 3), 0, 1, lim), hgt, blocked)
    height = s.from_int(0, hgt).y
    if left is None or right is None:
        return Periodic(height, False, None)
    cert = CylinderCert(left, left.len_sq, s.edge(h).x * height, True, left.holonomy, left, right)
    return Periodic(height, True, cert)


# ---------------------------------------------------------------- the loop


def _hol_json(v: Vec2) -> list:
    return v.to_json()


def _pull_back(m_inv: Mat2, v: Vec2) -> Vec2:
    return m_inv.apply(v)


def nps_find_simple_cylinder(obj, tau: Optional[Involution] = None, beta: HalfEdge = None,
                             perturb=Fraction(1, 2), validate: bool = True,
                             cap: int = SWEEP_CAP) -> tuple:
    """Find a simple cylinder containing the invariant edge ``beta``.

    Returns ``(cert, trace)``.  The certificate lives on the input surface:
    the boundary found after the shears is pulled back through them and
    looked up among the simple cylinders containing beta there.  ``trace``
    lists one dict per step.  At most dim_c - 2 shear-and-excise steps are
    allowed; periodic non-simple bands are broken by shearing by
    ``perturb``, halved on each repeat.
    """
    s0, h0 = _split(obj, beta)
    if tau is None:
        tau = find_involution(s0, h0)
        if tau is None:
            raise GeometryError("surface has no involution")
    if not tau.fixes_edge(s0, h0):
        raise GeometryError("beta not invariant")
    if classify(s0, tau) != "hyperelliptic":
        raise GeometryError("surface is not hyperelliptic")
    d = s0.dim_c
    perturb = rat(perturb)
    if perturb <= 0:
        raise GeometryError("perturbation must be positive")

    x, _ = normalize_slit_horizontal(s0.with_involution(tau.edge_map), h0)
    m = Mat2(s0.edge(h0).x, s0.edge(h0).y, -s0.edge(h0).y, s0.edge(h0).x)
    h, inv = h0, tau
    steps = 0
    trace = []
    while True:
        found = nearest_zero_above(x, h, cap)
        if isinstance(found, Periodic):
            if found.simple:
                trace.append({"kind": "periodic", "height": rat_str(found.height)})
                cert = found.cylinder
                break
            trace.append({"kind": "perturb", "shear": rat_str(perturb)})
            u = horocycle_matrix(perturb)
            x, m = x.apply_matrix(u), u @ m
            perturb /= 2
            continue
        rho, sigma = found.rho, found.sigma
        step = {"kind": "apex", "rho": _hol_json(rho.holonomy), "sigma": _hol_json(sigma.holonomy),
                "rho_invariant": inv.is_invariant(rho), "sigma_invariant": inv.is_invariant(sigma)}
        if inv.is_invariant(rho) or inv.is_invariant(sigma):
            trace.append(step)
            t, c = found.corner
            px, py = found.position
            cert = cylinder_from_apex(x, inv, frozenset((h, x.glue(h))), h, t, c, px, py)
            break
        steps += 1
        if steps > d - 2:
            raise NPSError(f"more than {d - 2} shear-and-excise steps")
        # shear sigma to vertical, then cut along sigma and its image
        time = -sigma.holonomy.x / sigma.holonomy.y
        u = horocycle_matrix(time)
        x, m = x.apply_matrix(u), u @ m
        sig = SaddleConnection(sigma.start_corner, u.apply(sigma.holonomy), sigma.start_vertex,
                               sigma.end_vertex, sigma.end_corner)
        ins = insert_edge(x, sig, inv.edge_map, tracked=[(h, x.edge(h))])
        x2 = ins.surface
        inv2 = Involution(x2.recorded_involution)
        h2 = ins.tracked[0][0]
        if x2.edge(h2) != x.edge(h):
            raise NPSError("slit lost during edge insertion")
        pieces = cut_and_glue(x2, ins.halfedge, inv2)
        keep = [p for p in pieces if h2[0] in p.triangles]
        gone = [p for p in pieces if h2[0] not in p.triangles]
        if len(keep) != 1:
            raise NPSError("slit not in exactly one piece")
        piece = keep[0]
        step.update({"shear": rat_str(time), "flips": ins.flips,
                     "excised_stratum": gone[0].slit.surface.stratum().label(),
                     "kept_stratum": piece.slit.surface.stratum().label()})
        trace.append(step)
        x, h, inv = piece.slit.surface, piece.halfedge_map[h2], piece.involution

    m_inv = m.inverse()
    gamma = _pull_back(m_inv, cert.boundary.holonomy).canonical()
    area = cert.area / m.det()
    trace.append({"kind": "cylinder", "boundary": _hol_json(gamma), "area": rat_str(area),
                  "iterations": steps})
    if not validate:
        # holonomies are pulled back; corners still refer to the last surface
        b = cert.boundary
        back = SaddleConnection(b.start_corner, _pull_back(m_inv, b.holonomy), b.start_vertex,
                                b.end_vertex, b.end_corner)
        return (CylinderCert(back, gamma.norm_sq(), area, True,
                             _pull_back(m_inv, cert.apex), cert.rho, cert.sigma), trace)
    for c in simple_cylinders_containing(s0, tau, h0, gamma.norm_sq()):
        if c.boundary.holonomy.canonical() == gamma:
            if c.area != area:
                raise NPSError("pulled-back cylinder has the wrong area")
            return c, trace
    raise NPSError("pulled-back cylinder is not a simple cylinder containing the slit")


def nps_iterations(trace: list) -> int:
    return trace[-1]["iterations"]


# ---------------------------------------------------------------- availability


@dataclass(frozen=True)
class Availability:
    """Closed window of horocycle times during which rho is available."""

    rho: SaddleConnection
    h: Fraction
    v: Fraction
    window: tuple  # (lo, hi)
    from_left: bool

    @property
    def length(self) -> Fraction:
        return self.window[1] - self.window[0]

    def overlaps(self, lo, hi) -> bool:
        return self.window[0] <= hi and lo <= self.window[1]


@dataclass(frozen=True)
class BadnessConfig:
    m0: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "m0", rat(self.m0))
        object.__setattr__(self, "eps", rat(self.eps))
        if not (0 < self.m0 < 1 and 0 < self.eps < 1):
            raise GeometryError("m0 and eps must lie strictly between 0 and 1")

    @classmethod
    def default(cls, d: int, eps=Fraction(1, 4)) -> "BadnessConfig":
        """m0 = eps^2 / (2^12 d), standing in for the unnamed stratum constants."""
        eps = rat(eps)
        return cls(eps * eps / (2 ** 12 * d), eps)


def _horizontal(s: Surface, h: HalfEdge) -> Fraction:
    b = s.edge(h)
    if b.y != 0 or b.x <= 0:
        raise GeometryError("slit must be horizontal and point right")
    return b.x


def availability(obj, rho: SaddleConnection, beta: HalfEdge = None) -> Optional[Availability]:
    """Times s at which rho, sheared by u_s, is a side of the triangle over the slit.

    rho must leave an end of the slit upward.  Shearing moves the apex
    horizontally at speed v, so from the left end the window is
    0 <= h + s v <= |beta| and from the right end -|beta| <= h + s v <= 0.
    The triangle pulled back to time 0 is the same set at every time, so its
    emptiness and embeddedness are checked once.
    """
    s, h = _split(obj, beta)
    w = _horizontal(s, h)
    hr, vr = rho.holonomy
    if vr <= 0:
        return None
    E, G = s.int_edges, s.gluing
    lim = corner_limit(s)
    dx, dy = s.to_int_dir(rho.holonomy)
    if rho.start_corner == K.locate_ccw(E, G, h, dx, dy, lim):
        apex, lo_x, hi_x, left = rho.holonomy, Fraction(0), w, True
    elif rho.start_corner == K.locate_cw(E, G, (h[0], (h[1] + 1) % 3), dx, dy, lim):
        apex, lo_x, hi_x, left = rho.holonomy + s.edge(h), -w, Fraction(0), False
    else:
        return None
    px, py = s.to_int(apex)
    blocked = frozenset((h, s.glue(h)))
    found = triangle_path(s, blocked, h, px, py)
    if found is None or not triangle_embedded(s, h, found[0], px, py):
        return None
    window = ((lo_x - hr) / vr, (hi_x - hr) / vr)
    return Availability(rho, hr, vr, window, left)


def classify_badness(a: Availability, cfg: BadnessConfig, area, beta_len_sq) -> str:
    """'bad' when v |beta| < m0 A, compared squared."""
    area, beta_len_sq = rat(area), rat(beta_len_sq)
    if a.v * a.v * beta_len_sq < cfg.m0 * cfg.m0 * area * area:
        return "bad"
    return "good"


def good_time_bound(cfg: BadnessConfig, area, beta_len_sq) -> Fraction:
    """Upper bound |beta|^2 / (m0 A) on how long a good rho stays available."""
    return rat(beta_len_sq) / (cfg.m0 * rat(area))


def horizontal_size(rho: SaddleConnection) -> Optional[int]:
    hx = rho.holonomy.x
    return None if hx == 0 else size_of_sq(hx * hx)


# ---------------------------------------------------------------- successions


@dataclass(frozen=True)
class Chain:
    """A succession beta = g_0, g_1, ..., g_n of cylinder boundaries."""

    gammas: tuple  # SaddleConnection per level, on the surface of that level
    certs: tuple  # CylinderCert per level
    surface: Optional[Surface]  # the surface cut along g_n with g_n glued up
    slit: Optional[HalfEdge]
    involution: Optional[Involution]

    @property
    def level(self) -> int:
        return len(self.gammas)

    def holonomies(self) -> list:
        return [g.holonomy.canonical() for g in self.gammas]


def excise_cylinder(s: Surface, tau: Involution, h: HalfEdge, boundary: SaddleConnection) -> tuple:
    """Cut along boundary and its image; keep the part without the slit h.

    Returns (surface, new slit, involution) with the two cut sides glued
    into the new invariant slit.
    """
    ins = insert_edge(s, boundary, tau.edge_map, tracked=[(h, s.edge(h))])
    s2 = ins.surface
    inv2 = Involution(s2.recorded_involution)
    h2 = ins.tracked[0][0]
    pieces = cut_and_glue(s2, ins.halfedge, inv2)
    rest = [p for p in pieces if h2[0] not in p.triangles]
    if len(rest) != 1:
        raise NPSError("slit not in exactly one piece")
    p = rest[0]
    return p.slit.surface, p.slit.slit, p.involution


def successions(obj, tau: Optional[Involution], beta: HalfEdge, ranges,
                 excise_leaves: bool = True) -> list:
    """Depth-first enumeration of successions of cylinders.

    ``ranges[i]`` is the closed interval of circumference^2 allowed at level
    i + 1.  Every node of the search tree is returned as a :class:`Chain`, in
    depth-first order.  Each step checks that consecutive boundaries bound a
    parallelogram of the cylinder's area.  Without ``excise_leaves`` the
    chains at the last level carry no surface, which saves the surgery.
    """
    s, h = _split(obj, beta)
    if tau is None:
        tau = find_involution(s, h)
        if tau is None:
            raise GeometryError("surface has no involution")
    ranges = [(rat(lo), rat(hi)) for lo, hi in ranges]
    if len(ranges) > s.dim_c - 2:
        raise GeometryError(f"at most {s.dim_c - 2} levels in this stratum")
    out = []

    def walk(surf, slit_he, inv, gammas, certs):
        level = len(gammas)
        if level == len(ranges):
            return
        lo, hi = ranges[level]
        prev = surf.edge(slit_he)
        for cert in simple_cylinders_containing(surf, inv, slit_he, hi):
            if cert.circumference_sq < lo:
                continue
            g = cert.boundary
            if abs(cross(g.holonomy, prev)) != cert.area:
                raise NPSError("cylinder boundary and slit do not span the cylinder")
            if level + 1 == len(ranges) and not excise_leaves:
                out.append(Chain(gammas + (g,), certs + (cert,), None, None, None))
                continue
            nxt, nslit, ninv = excise_cylinder(surf, inv, slit_he, g)
            chain = Chain(gammas + (g,), certs + (cert,), nxt, nslit, ninv)
            out.append(chain)
            walk(nxt, nslit, ninv, chain.gammas, chain.certs)

    walk(s, h, tau, (), ())
    return out


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class Parallelogram:
    """Parallelogram with the given diagonal and sides; the involution fixes it."""

    diagonal: Vec2
    side_a: Vec2
    side_b: Vec2
    area: Fraction

    def to_json(self) -> dict:
        return {"diagonal": self.diagonal.to_json(), "side_a": self.side_a.to_json(),
                "side_b": self.side_b.to_json(), "area": rat_str(self.area)}


def parallelogram_decomposition(obj, tau: Optional[Involution] = None,
                                sigma: HalfEdge = None) -> list:
    """Split the surface into dim_c - 1 invariant parallelograms, sigma inside the first.

    Repeatedly find a simple cylinder around the current slit, record it,
    and excise it; the last surface is a one-point torus, itself a single
    parallelogram.
    """
    s, h = _split(obj, sigma)
    if tau is None:
        tau = find_involution(s, h)
        if tau is None:
            raise GeometryError("surface has no involution")
    if classify(s, tau) != "hyperelliptic":
        raise GeometryError("surface is not hyperelliptic")
    out = []
    cur, slit_he, inv = s, h, tau
    while True:
        cert, _ = nps_find_simple_cylinder(cur, inv, slit_he)
        diag = cur.edge(slit_he)
        out.append(Parallelogram(diag, cert.rho.holonomy, cert.sigma.holonomy, cert.area))
        if cur.dim_c <= 2:
            break
        cur, slit_he, inv = excise_cylinder(cur, inv, slit_he, cert.boundary)
    if len(out) != s.dim_c - 1:
        raise NPSError(f"decomposition has {len(out)} pieces, expected {s.dim_c - 1}")
    if sum(p.area for p in out) != s.area():
        raise NPSError("parallelogram areas do not add up to the surface area")
    return out
