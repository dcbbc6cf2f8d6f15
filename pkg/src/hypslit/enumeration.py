"""Saddle connection enumeration and the combinatorial predicates built on it."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

from . import _kernel as K
from .geometry import GeometryError, Vec2, cross, rat, rat_str, size_of_sq
from .involution import Involution, _components, find_involution
from .surface import (
    HalfEdge,
    SaddleConnection,
    SlitSurface,
    Surface,
    SurfaceError,
    corner_limit,
    insert_edge,
    trace_cap,
)

FUNNEL_NODE_CAP = 2_000_000


def _parts(obj) -> tuple:
    if isinstance(obj, SlitSurface):
        return obj.surface, obj.blocked, obj.slit
    return obj, frozenset(), None


def direction_key(v: Vec2):
    """Sort key increasing with the angle of an upper-half-plane vector."""
    if v.y == 0:
        return (0, Fraction(0))
    return (1, -v.x / v.y)


@dataclass(frozen=True)
class EnumResult:
    connections: tuple
    length_bound_sq: Fraction
    slit: Optional[HalfEdge]
    surface: Surface

    def __len__(self):
        return len(self.connections)

    def __iter__(self):
        return iter(self.connections)

    def holonomies(self) -> list:
        return [c.holonomy for c in self.connections]

    def keys(self) -> set:
        return {c.key for c in self.connections}

    def restrict(self, len_sq) -> "EnumResult":
        len_sq = rat(len_sq)
        if len_sq > self.length_bound_sq:
            raise GeometryError("cannot restrict to a larger bound")
        return EnumResult(
            tuple(c for c in self.connections if c.len_sq <= len_sq),
            len_sq, self.slit, self.surface,
        )

    def rows(self, tau: Optional[Involution] = None) -> list:
        out = []
        for c in self.connections:
            out.append({
                "start_vertex": c.start_vertex,
                "hol_x": rat_str(c.holonomy.x),
                "hol_y": rat_str(c.holonomy.y),
                "len_sq": rat_str(c.len_sq),
                "size_j": size_of_sq(c.len_sq),
                "invariant": "" if tau is None else str(tau.is_invariant(c)).lower(),
            })
        return out

    def to_csv(self, tau: Optional[Involution] = None) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows(tau))
        return buf.getvalue()


CSV_COLUMNS = ["start_vertex", "hol_x", "hol_y", "len_sq", "size_j", "invariant"]


def _search_chunk(args):
    E, G, blocked, corners, lsq, cap = args
    return K.wedge_search(E, G, blocked, corners, lsq, cap)


def enumerate_saddle_connections(obj: Union[Surface, SlitSurface], L_sq, threads: int = 1) -> EnumResult:
    """All saddle connections with |hol|^2 <= L_sq, once each, canonically oriented.

    On a SlitSurface the unfolding never crosses the slit, so every result is
    interiorly disjoint from it; the slit itself is not reported.
    """
    L_sq = rat(L_sq)
    if L_sq <= 0:
        raise GeometryError("nonpositive bound")
    s, blocked, slit_he = _parts(obj)
    E, G = s.int_edges, s.gluing
    lsq = L_sq * s.scale * s.scale
    lsq_int = lsq.numerator // lsq.denominator  # integer vectors: floor is exact
    cap = trace_cap(s, L_sq)
    corners = list(s.halfedges())
    if threads <= 1:
        raw = K.wedge_search(E, G, blocked, corners, lsq_int, cap)
    else:
        chunks = [corners[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = ex.map(_search_chunk, [(E, G, blocked, ch, lsq_int, cap) for ch in chunks])
            raw = [item for part in parts for item in part]
    out = []
    for t, k, hx, hy, te, ce in raw:
        end = K.arrival_corner(E, G, te, ce, -hx, -hy)
        out.append(SaddleConnection((t, k), s.from_int(hx, hy), s.vertex_of((t, k)),
                                    s.vertex_of(end), end))
    out.sort(key=lambda c: (c.len_sq, direction_key(c.holonomy), c.start_vertex, c.start_corner))
    for a, b in zip(out, out[1:]):
        if a.key == b.key:
            raise SurfaceError("duplicate saddle connection in enumeration")
    return EnumResult(tuple(out), L_sq, slit_he, s)


def size_bucket(r: EnumResult, j: int) -> list:
    return [c for c in r.connections if size_of_sq(c.len_sq) == j]


def _hol(x) -> Vec2:
    return x.holonomy if isinstance(x, SaddleConnection) else x


def eps_isolated(g1, g2, eps, area) -> bool:
    """Angle test sin >= eps^2 A / (|g1||g2|), in the exact form |g1 x g2| >= eps^2 A."""
    u, v = _hol(g1), _hol(g2)
    if u.is_zero() or v.is_zero():
        raise GeometryError("degenerate vector")
    eps = rat(eps)
    return abs(cross(u, v)) >= eps * eps * rat(area)


def dedupe_by_direction(r: EnumResult) -> list:
    """Keep one connection per direction: parallel and tau-symmetric ones collapse."""
    seen = set()
    out = []
    for c in r.connections:
        key = direction_key(c.holonomy)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


# ---------------------------------------------------------------- separation


def _segment_triangles(s: Surface, corner: HalfEdge, hol: Vec2):
    """Triangles met by a segment and the half-edges it crosses."""
    E = s.int_edges
    hx, hy = s.to_int(hol)
    crossed, _ = K.trace(E, s.gluing, frozenset(), corner[0], corner[1], hx, hy,
                         trace_cap(s, hol.norm_sq()))
    return crossed


def separates(s: Surface, tau: Involution, rho: SaddleConnection, alpha: SaddleConnection,
              beta: SaddleConnection) -> bool:
    """Does cutting along rho and tau(rho) put alpha and beta in different pieces?

    rho is made an edge by invariant flips with alpha and beta tracked; each
    must then avoid the cut and the two must lie in different components.
    """
    ins = insert_edge(s, rho, tau.edge_map,
                      tracked=[(alpha.start_corner, alpha.holonomy),
                               (beta.start_corner, beta.holonomy)])
    s2 = ins.surface
    tau2 = Involution(s2.recorded_involution)
    he = ins.halfedge
    cut = {he, s2.glue(he), tau2(he), s2.glue(tau2(he))}
    comps = _components(s2.n_triangles, s2.gluing, cut)
    comp_of = {t: i for i, grp in enumerate(comps) for t in grp}
    where = []
    for corner, d in ins.tracked:
        if d == s2.edge(corner) and corner in cut:
            return False
        crossed = _segment_triangles(s2, corner, d)
        if any(c in cut for c in crossed):
            return False
        where.append(comp_of[corner[0]])
    return where[0] != where[1]


def is_C_separated(s: Surface, tau: Involution, alpha: SaddleConnection, beta: SaddleConnection,
                   C, search: EnumResult) -> bool:
    """Is alpha cut off from beta by some rho, tau(rho) with |rho| < |beta|/C?"""
    C = rat(C)
    if C <= 0:
        raise GeometryError("C must be positive")
    need = beta.len_sq / (C * C)
    if search.length_bound_sq < need:
        raise GeometryError("insufficient search bound")
    for rho in search.connections:
        if rho.len_sq >= need or tau.is_invariant(rho):
            continue
        if rho.key in (alpha.key, beta.key):
            continue
        if separates(s, tau, rho, alpha, beta):
            return True
    return False


# ---------------------------------------------------------------- triangles over an edge


def apex_sides(s: Surface, h: HalfEdge, t: int, c: int, px: int, py: int) -> tuple:
    """Saddle connections L->p and R->p of the triangle over h with apex p."""
    E, G = s.int_edges, s.gluing
    bx, by = E[h[0]][h[1]]
    lim = corner_limit(s)
    cl = K.locate_ccw(E, G, h, px, py, lim)
    end_l = K.arrival_corner(E, G, t, c, -px, -py)
    cr = K.locate_cw(E, G, (h[0], (h[1] + 1) % 3), px - bx, py - by, lim)
    # inside T the direction p->R follows p->L counter-clockwise
    end_r = K.locate_ccw(E, G, end_l, bx - px, by - py, lim)
    apex_v = s.vertex_of(end_l)
    rho = SaddleConnection(cl, s.from_int(px, py), s.vertex_of(cl), apex_v, end_l)
    sigma = SaddleConnection(cr, s.from_int(px - bx, py - by), s.vertex_of(cr), apex_v, end_r)
    return rho, sigma


def local_origin(E, t, k) -> tuple:
    """Position of vertex k of t in t's frame (vertex 0 at the origin)."""
    x = y = 0
    for i in range(k):
        x += E[t][i][0]
        y += E[t][i][1]
    return x, y


def tau_pieces(E, table, pieces) -> list:
    """Images of local pieces under the involution (a half-turn)."""
    out = []
    for t, poly in pieces:
        t2, k2 = table[t][0]
        wx, wy = local_origin(E, t2, k2)
        img = [(wx - x, wy - y) for x, y in poly]
        out.append((t2, img))
    return out


def triangle_path(s: Surface, blocked, h: HalfEdge, px: int, py: int):
    """Corridor of the triangle over h with apex p, or None if not empty."""
    cap = trace_cap(s, s.from_int(px, py).norm_sq()) * 4
    return K.corridor(s.int_edges, s.gluing, blocked, h, px, py, cap)


def triangle_embedded(s: Surface, h: HalfEdge, path, px: int, py: int,
                      verify: bool = False) -> bool:
    """Is the empty triangle over h with apex p free of self-overlap?

    The fast route only clips the pairs of copies whose offset fits inside
    T - T; ``verify`` also overlaps every pair of pieces.
    """
    E = s.int_edges
    bx, by = E[h[0]][h[1]]
    fast = K.triangle_embedded(E, path, bx, by, px, py)
    if verify:
        slow = not K.pieces_overlap(K.triangle_pieces(E, path, bx, by, px, py))
        if slow != fast:
            raise SurfaceError("embedding tests disagree")
    return fast


def parallelogram_embedded(s: Surface, table, h: HalfEdge, path, px: int, py: int) -> bool:
    """Is T together with its involution image free of self-overlap?"""
    E = s.int_edges
    bx, by = E[h[0]][h[1]]
    pieces = K.triangle_pieces(E, path, bx, by, px, py)
    return not K.pieces_overlap(pieces + tau_pieces(E, table, pieces))


def _int_bound(s: Surface, q: Fraction) -> int:
    q = q * s.scale * s.scale
    return q.numerator // q.denominator


def _reach_bound(s: Surface, h: HalfEdge, side_sq: Fraction) -> int:
    """Integer bound on |p - L|^2 when |p - R|^2 or |p - L|^2 is at most side_sq."""
    b_sq = sum(c * c for c in s.int_edges[h[0]][h[1]])
    a_sq = _int_bound(s, side_sq) + 1
    return a_sq + b_sq + 2 * (isqrt(a_sq * b_sq) + 1)


def empty_triangles(obj, h: HalfEdge, height_cap: int, lsq: int, verify: bool = False) -> list:
    """Apexes (t, c, px, py) of empty triangles over h, in scaled integers.

    ``height_cap`` bounds cross(h, p) and ``lsq`` bounds |p - L|^2.  The fast
    route sweeps the vertices visible from L; ``verify`` also runs the
    two-cone funnel walk and insists both agree.
    """
    s, blocked, _ = _parts(obj)
    if h not in blocked:
        blocked = blocked | {h, s.glue(h)}
    E, G = s.int_edges, s.gluing
    depth = trace_cap(s, Fraction(lsq, s.scale ** 2)) * 4
    fast = K.empty_apexes(E, G, blocked, h, height_cap, lsq, depth)
    out = sorted((te, ce, px, py) for te, ce, px, py, _, _ in fast)
    if verify:
        slow = K.funnel(E, G, blocked, h, lsq, "rho", height_cap, FUNNEL_NODE_CAP)
        if sorted(a[2:] for a in out) != sorted(a[2:] for a in slow):
            raise SurfaceError("visibility sweep and funnel walk disagree")
    return out


def triangles_with_side_by_size(obj, beta: HalfEdge, sizes, search: EnumResult,
                                tau: Optional[Involution] = None,
                                verify: bool = False) -> dict:
    """``{j: triangles_with_side(..., j)}`` for each j in sizes, from one search."""
    s, blocked, _ = _parts(obj)
    beta = tuple(beta)
    sizes = sorted(set(sizes))
    if not sizes:
        return {}
    top = sizes[-1]
    if search.length_bound_sq < Fraction(4) ** (top + 1):
        raise GeometryError("insufficient search bound")
    if tau is None:
        tau = find_involution(s, beta)
        if tau is None:
            raise GeometryError("surface has no involution")
    hcap = _int_bound(s, 2 * s.area())
    keys = search.keys()
    wanted = set(sizes)
    found = {j: {} for j in sizes}
    for h in (beta, s.glue(beta)):
        lsq = _reach_bound(s, h, Fraction(4) ** (top + 1))
        for t, c, px, py in empty_triangles(obj, h, hcap, lsq, verify):
            sides = []
            for sd in apex_sides(s, h, t, c, px, py):
                j = size_of_sq(sd.len_sq)
                if j in wanted and not tau.is_invariant(sd):
                    sides.append((j, sd))
            if not sides:
                continue
            path = triangle_path(s, blocked | {h, s.glue(h)}, h, px, py)
            if path is None:
                raise SurfaceError("empty triangle has no corridor")
            if not triangle_embedded(s, h, path[0], px, py, verify):
                continue
            for j, side in sides:
                if side.key not in keys:
                    raise SurfaceError("triangle side missing from the enumeration")
                found[j][side.key] = side.canonical()
    order = lambda c: (c.len_sq, direction_key(c.holonomy), c.start_vertex, c.start_corner)
    return {j: sorted(found[j].values(), key=order) for j in sizes}


def triangles_with_side(obj, beta: HalfEdge, j: int, search: EnumResult,
                        tau: Optional[Involution] = None, verify: bool = False) -> list:
    """Non-invariant saddle connections of size j forming an embedded triangle with beta.

    Both sides of beta are searched.  Every side found must also appear in
    ``search``, which is enumerated independently.
    """
    return triangles_with_side_by_size(obj, beta, [j], search, tau, verify)[j]


# ---------------------------------------------------------------- simple cylinders


@dataclass(frozen=True)
class CylinderCert:
    """A simple cylinder containing the slit, spanned by a triangle and its image.

    ``apex`` is p relative to the slit's start; the cylinder is the
    parallelogram with diagonal beta and vertices L, R, p, tau(p).
    """

    boundary: SaddleConnection
    circumference_sq: Fraction
    area: Fraction
    contains_slit: bool
    apex: Vec2
    rho: SaddleConnection
    sigma: SaddleConnection

    @property
    def height_sq(self) -> Fraction:
        return self.area * self.area / self.circumference_sq

    def to_json(self) -> dict:
        b = self.boundary.canonical().holonomy
        return {
            "boundary": b.to_json(),
            "circumference_sq": rat_str(self.circumference_sq),
            "area": rat_str(self.area),
            "contains_slit": self.contains_slit,
            "apex": self.apex.to_json(),
        }


def cylinder_from_apex(s: Surface, tau: Involution, blocked, h: HalfEdge, t: int, c: int,
                       px: int, py: int, verify: bool = False) -> Optional[CylinderCert]:
    """The simple cylinder T(L,R,p) u tau T, if that union is one.

    T must already be known to be an empty immersed triangle.  Gluing the
    invariant side to its image then gives an immersed flat cylinder with no
    interior singularity, which cannot fold onto itself without covering a
    boundary singularity, so it is embedded.  ``verify`` re-checks that
    directly by overlapping the exact pieces of T and its image.
    """
    rho, sigma = apex_sides(s, h, t, c, px, py)
    inv_r, inv_s = tau.is_invariant(rho), tau.is_invariant(sigma)
    if not (inv_r or inv_s):
        return None
    if verify:
        found = triangle_path(s, blocked, h, px, py)
        if found is None:
            raise SurfaceError("triangle search and corridor walk disagree")
        if not parallelogram_embedded(s, tau.edge_map, h, found[0], px, py):
            raise SurfaceError("cylinder parallelogram overlaps itself")
    boundary = sigma if inv_r else rho
    beta = s.edge(h)
    return CylinderCert(boundary, boundary.len_sq, cross(beta, rho.holonomy), True,
                        rho.holonomy, rho, sigma)


def simple_cylinders_containing(obj, tau: Optional[Involution], beta: HalfEdge, L_sq,
                                verify: bool = False) -> list:
    """Simple cylinders with circumference^2 <= L_sq containing the edge beta.

    Each such cylinder is the union of the triangle over beta with apex on
    one boundary and its image under the involution; one of the two other
    sides of the triangle is then invariant.
    """
    s, blocked, _ = _parts(obj)
    beta = tuple(beta)
    L_sq = rat(L_sq)
    if tau is None:
        tau = find_involution(s, beta)
        if tau is None:
            raise GeometryError("surface has no involution")
    if not tau.fixes_edge(s, beta):
        raise GeometryError("beta not invariant")
    if not blocked:
        blocked = frozenset((beta, s.glue(beta)))
    hcap = _int_bound(s, s.area())
    found = {}
    for t, c, px, py in empty_triangles(obj, beta, hcap, _reach_bound(s, beta, L_sq), verify):
        cert = cylinder_from_apex(s, tau, blocked, beta, t, c, px, py, verify)
        if cert is None or cert.circumference_sq > L_sq:
            continue
        # two cylinders through beta in one direction coincide; each is met
        # once from every vertex on its top side that sees the whole slit
        d = cert.boundary.holonomy.canonical()
        key = (cert.apex.y, cert.apex.x)
        if d not in found or key < found[d][0]:
            found[d] = (key, cert)
    out = [cert for _, cert in found.values()]
    out.sort(key=lambda z: (z.circumference_sq, direction_key(z.boundary.canonical().holonomy)))
    return out
