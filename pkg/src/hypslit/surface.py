"""Translation surfaces as triangles glued by translations.

A half-edge is a pair ``(t, k)``: side ``k`` of triangle ``t``, running from
vertex ``k`` to vertex ``k+1``.  Corners are named by their outgoing
half-edge, so ``(t, k)`` is also the corner at vertex ``k`` of ``t``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import lcm
from typing import Iterable, NamedTuple, Optional, Sequence

from . import _kernel as K
from .geometry import (
    GeometryError,
    Mat2,
    Vec2,
    cross,
    parse_vec,
)

HalfEdge = tuple


class Triangle(NamedTuple):
    e0: Vec2
    e1: Vec2
    e2: Vec2


class StratumSignature(NamedTuple):
    kappa: tuple
    genus: int
    dim_c: int

    def label(self) -> str:
        return "H(" + ",".join(str(k) for k in self.kappa) + ")"


@dataclass(frozen=True)
class SaddleConnection:
    """An oriented saddle connection: leaves ``start_corner`` with ``holonomy``.

    ``end_corner`` is the corner at the far endpoint owning the reversed
    direction, which makes reversal and the involution test combinatorial.
    """

    start_corner: HalfEdge
    holonomy: Vec2
    start_vertex: int
    end_vertex: int
    end_corner: HalfEdge

    def reversed(self) -> "SaddleConnection":
        return SaddleConnection(self.end_corner, -self.holonomy, self.end_vertex,
                                self.start_vertex, self.start_corner)

    def canonical(self) -> "SaddleConnection":
        return self if self.holonomy.is_upper() else self.reversed()

    @property
    def key(self):
        c = self.canonical()
        return (c.start_corner, c.holonomy)

    @property
    def len_sq(self) -> Fraction:
        return self.holonomy.norm_sq()


class SurfaceError(GeometryError):
    pass


@dataclass(frozen=True, eq=False)
class Surface:
    triangles: tuple
    gluing: tuple
    marked: Optional[tuple] = None
    # involution recorded by a constructor: per-half-edge image, as nested tuples
    recorded_involution: Optional[tuple] = field(default=None, repr=False)

    # ------------------------------------------------------------ basics
    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def halfedges(self) -> Iterable[HalfEdge]:
        for t in range(len(self.triangles)):
            for k in range(3):
                yield (t, k)

    def glue(self, he: HalfEdge) -> HalfEdge:
        return self.gluing[he[0]][he[1]]

    def edge(self, he: HalfEdge) -> Vec2:
        return self.triangles[he[0]][he[1]]

    @cached_property
    def edge_pairs(self) -> tuple:
        """Edges as (half-edge, partner) with the half-edge lexicographically first."""
        out = []
        for he in self.halfedges():
            other = self.glue(he)
            if he < other:
                out.append((he, other))
        return tuple(out)

    def edge_id(self, he: HalfEdge) -> int:
        for i, pair in enumerate(self.edge_pairs):
            if he in pair:
                return i
        raise SurfaceError(f"no edge through half-edge {he}")

    def edge_halfedge(self, edge_id: int) -> HalfEdge:
        if not 0 <= edge_id < len(self.edge_pairs):
            raise SurfaceError(f"edge id {edge_id} out of range")
        return self.edge_pairs[edge_id][0]

    # ------------------------------------------------------ integer frame
    @cached_property
    def scale(self) -> int:
        dens = [c.denominator for tri in self.triangles for v in tri for c in v]
        return reduce(lcm, dens, 1)

    @cached_property
    def int_edges(self) -> tuple:
        d = self.scale
        return tuple(
            tuple((int(v.x * d), int(v.y * d)) for v in tri) for tri in self.triangles
        )

    def to_int(self, v: Vec2) -> tuple:
        d = self.scale
        x, y = v.x * d, v.y * d
        if x.denominator != 1 or y.denominator != 1:
            raise SurfaceError("vector is not on the surface's rational grid")
        return (int(x), int(y))

    def from_int(self, x: int, y: int) -> Vec2:
        d = self.scale
        return Vec2(Fraction(x, d), Fraction(y, d))

    # ------------------------------------------------------ vertex data
    @cached_property
    def _vertex_data(self):
        n = len(self.triangles)
        cls = [[-1] * 3 for _ in range(n)]
        orbits = []
        G = self.gluing
        for t in range(n):
            for k in range(3):
                if cls[t][k] >= 0:
                    continue
                vid = len(orbits)
                orbit = []
                c = (t, k)
                while cls[c[0]][c[1]] < 0:
                    cls[c[0]][c[1]] = vid
                    orbit.append(c)
                    c = G[c[0]][(c[1] - 1) % 3]
                if c != (t, k):
                    raise SurfaceError("corner walk did not close up")
                orbits.append(tuple(orbit))
        return tuple(tuple(r) for r in cls), tuple(orbits)

    def vertex_of(self, corner: HalfEdge) -> int:
        return self._vertex_data[0][corner[0]][corner[1]]

    @property
    def vertex_orbits(self) -> tuple:
        """Corners of each vertex class, in counter-clockwise order."""
        return self._vertex_data[1]

    @cached_property
    def cone_multiples(self) -> tuple:
        """Cone angle of each vertex class divided by 2*pi.

        Counts how often the outgoing edge direction sweeps across the
        positive x-axis while turning around the vertex.
        """
        out = []
        for orbit in self.vertex_orbits:
            turns = 0
            for t, k in orbit:
                u = self.triangles[t][k]
                w = -self.triangles[t][(k - 1) % 3]
                if u.y < 0 and (w.y > 0 or (w.y == 0 and w.x > 0)):
                    turns += 1
            out.append(turns)
        return tuple(out)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_orbits)

    @cached_property
    def marked_points(self) -> tuple:
        return tuple(i for i, m in enumerate(self.cone_multiples) if m == 1)

    def stratum(self) -> StratumSignature:
        bad = self.validate()
        if bad:
            raise SurfaceError(bad[0])
        return self._stratum()

    def _stratum(self) -> StratumSignature:
        f = len(self.triangles)
        chi = self.n_vertices - 3 * f // 2 + f
        genus = (2 - chi) // 2
        kappa = tuple(sorted((m - 1 for m in self.cone_multiples), reverse=True))
        return StratumSignature(kappa, genus, 2 * genus + len(kappa) - 1)

    @property
    def dim_c(self) -> int:
        return self._stratum().dim_c

    def area(self) -> Fraction:
        return sum((cross(tri[0], tri[1]) for tri in self.triangles), Fraction(0)) / 2

    # ------------------------------------------------------ validation
    def validate(self) -> list:
        """Diagnostics for the first violated invariant; empty when valid."""
        n = len(self.triangles)
        if n == 0:
            return ["surface has no triangles"]
        if len(self.gluing) != n:
            return ["gluing table size does not match triangle count"]
        for t, tri in enumerate(self.triangles):
            if len(tri) != 3:
                return [f"triangle {t} does not have three edges"]
            s = tri[0] + tri[1] + tri[2]
            if not s.is_zero():
                return [f"edge vectors do not close: triangle {t}"]
            if cross(tri[0], tri[1]) <= 0:
                return [f"triangle not positively oriented or degenerate: triangle {t}"]
        for t in range(n):
            if len(self.gluing[t]) != 3:
                return [f"gluing row {t} does not have three entries"]
            for k in range(3):
                other = self.gluing[t][k]
                if other is None:
                    return [f"half-edge {(t, k)} is not glued"]
                ot, ok = other
                if not (0 <= ot < n and 0 <= ok < 3):
                    return [f"half-edge {(t, k)} glued out of range to {other}"]
                if other == (t, k):
                    return [f"gluing not fixed-point-free: half-edge {(t, k)}"]
                if self.gluing[ot][ok] != (t, k):
                    return [f"gluing not an involution: half-edges {(t, k)}, {other}"]
                if not (self.triangles[t][k] + self.triangles[ot][ok]).is_zero():
                    return [f"glued half-edges not opposite: {(t, k)}, {other}"]
        seen = {0}
        todo = [0]
        while todo:
            t = todo.pop()
            for k in range(3):
                u = self.gluing[t][k][0]
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        if len(seen) != n:
            return [f"surface not connected: triangle {min(set(range(n)) - seen)} unreachable"]
        try:
            mults = self.cone_multiples
        except SurfaceError as exc:
            return [str(exc)]
        for i, m in enumerate(mults):
            if m < 1:
                return [f"vertex class {i} has nonpositive cone angle"]
        if self.marked is not None:
            extra = set(self.marked) - set(self.marked_points)
            if extra:
                return [f"marked vertex classes are cone points: {sorted(extra)}"]
            missing = set(self.marked_points) - set(self.marked)
            if missing:
                return [f"vertex classes of angle 2*pi left unmarked: {sorted(missing)}"]
        st = self._stratum()
        if sum(st.kappa) != 2 * st.genus - 2:
            return ["cone angles inconsistent with the Euler characteristic"]
        return []

    def is_valid(self) -> bool:
        return not self.validate()

    # ------------------------------------------------------ transforms
    def apply_matrix(self, m: Mat2) -> "Surface":
        if m.det() <= 0:
            raise GeometryError("matrix must have positive determinant")
        tris = tuple(Triangle(*(m.apply(v) for v in tri)) for tri in self.triangles)
        return Surface(tris, self.gluing, self.marked, self.recorded_involution)

    def with_involution(self, edge_map) -> "Surface":
        return Surface(self.triangles, self.gluing, self.marked, edge_map)

    def flip(self, he: HalfEdge) -> tuple:
        """Flip the edge through ``he``; returns (new surface, FlipMap)."""
        t, k = he
        u, m = self.glue(he)
        if t == u:
            raise SurfaceError("cannot flip an edge glued within one triangle")
        tri_t, tri_u = self.triangles[t], self.triangles[u]
        # quad corners relative to Q0 = start of he
        q0 = Vec2(Fraction(0), Fraction(0))
        q2 = tri_t[k]
        q3 = q2 + tri_t[(k + 1) % 3]
        q1 = tri_u[(m + 1) % 3]
        # strictly convex quad: the new diagonal q1 -> q3 crosses the old one
        d = q3 - q1
        s0 = cross(d, q0 - q1)
        s2 = cross(d, q2 - q1)
        if not ((s0 > 0 > s2) or (s0 < 0 < s2)):
            raise SurfaceError(f"edge {he} does not have a strictly convex quad")
        new_t = Triangle(q1 - q0, q3 - q1, q0 - q3)
        new_u = Triangle(q2 - q1, q3 - q2, q1 - q3)
        old_to_new = {
            (t, (k + 1) % 3): (u, 1),
            (t, (k + 2) % 3): (t, 2),
            (u, (m + 1) % 3): (t, 0),
            (u, (m + 2) % 3): (u, 0),
        }
        tris = list(self.triangles)
        tris[t] = new_t
        tris[u] = new_u
        glue = [list(row) for row in self.gluing]
        for old, new in old_to_new.items():
            partner = self.glue(old)
            partner = old_to_new.get(partner, partner)
            glue[new[0]][new[1]] = partner
            glue[partner[0]][partner[1]] = new
        glue[t][1] = (u, 2)
        glue[u][2] = (t, 1)
        out = Surface(tuple(tris), tuple(tuple(r) for r in glue), None, None)
        quad_old = {
            (t, k): 0, (t, (k + 1) % 3): 2, (t, (k + 2) % 3): 3,
            (u, m): 2, (u, (m + 1) % 3): 0, (u, (m + 2) % 3): 1,
        }
        return out, FlipMap(t, u, old_to_new, quad_old)

    # ------------------------------------------------------ serialisation
    def to_json(self) -> dict:
        data = {
            "triangles": [[v.to_json() for v in tri] for tri in self.triangles],
            "gluing": [[list(a), list(b)] for a, b in self.edge_pairs],
            "marked": list(self.marked_points),
        }
        if self.recorded_involution is not None:
            data["involution"] = involution_json(self, self.recorded_involution)
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()[:16]

    @classmethod
    def from_json(cls, data: dict) -> "Surface":
        try:
            tris = tuple(Triangle(*(Vec2.from_json(v) for v in tri)) for tri in data["triangles"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SurfaceError(f"malformed triangles: {exc}") from exc
        n = len(tris)
        glue = [[None] * 3 for _ in range(n)]
        for pair in data.get("gluing", []):
            (a, b), (c, d) = pair
            glue[a][b] = (c, d)
            glue[c][d] = (a, b)
        marked = tuple(data["marked"]) if "marked" in data else None
        s = cls(tris, tuple(tuple(r) for r in glue), marked)
        if "involution" in data:
            inv = data["involution"]
            hes = list(s.halfedges())
            em = inv["edge_map"]
            table = [[None] * 3 for _ in range(n)]
            for he, img in zip(hes, em):
                table[he[0]][he[1]] = tuple(img)
            s = s.with_involution(tuple(tuple(r) for r in table))
        return s

    @classmethod
    def load(cls, path) -> "Surface":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def involution_json(s: Surface, table) -> dict:
    hes = list(s.halfedges())
    return {
        "edge_map": [list(table[t][k]) for t, k in hes],
        "triangle_map": [table[t][0][0] for t in range(s.n_triangles)],
    }


class FlipMap(NamedTuple):
    """Bookkeeping for one flip: how old half-edges and corners survive."""

    t: int
    u: int
    halfedges: dict
    quad_vertex: dict

    # corners of the new triangles at quad vertices 0..3
    def new_corners(self, q: int) -> tuple:
        t, u = self.t, self.u
        return {0: ((t, 0),), 1: ((t, 1), (u, 0)), 2: ((u, 1),), 3: ((t, 2), (u, 2))}[q]

    def halfedge(self, he: HalfEdge) -> HalfEdge:
        if he[0] not in (self.t, self.u):
            return he
        if he not in self.halfedges:
            raise SurfaceError("the flipped diagonal has no image")
        return self.halfedges[he]

    def corner(self, new_surface: Surface, corner: HalfEdge, d: Vec2) -> HalfEdge:
        if corner[0] not in (self.t, self.u):
            return corner
        E = new_surface.int_edges
        dx, dy = new_surface.to_int_dir(d)
        for c in self.new_corners(self.quad_vertex[corner]):
            if K.in_sector(E, c[0], c[1], dx, dy):
                return c
        raise SurfaceError("tracked direction left its quad corner")


def _to_int_dir(self: Surface, d: Vec2) -> tuple:
    # any positive multiple will do for sector tests
    den = lcm(d.x.denominator, d.y.denominator)
    return (int(d.x * den), int(d.y * den))


Surface.to_int_dir = _to_int_dir  # type: ignore[attr-defined]


# ---------------------------------------------------------------- slits


@dataclass(frozen=True, eq=False)
class SlitSurface:
    """A closed surface with the interior of one edge excised.

    ``slit`` is the half-edge L -> R whose triangle lies on the upper side.
    """

    surface: Surface
    slit: HalfEdge

    def __post_init__(self):
        other = self.surface.glue(self.slit)
        if other is None or other == self.slit:
            raise SurfaceError("slit must be an interior edge")

    @property
    def lower(self) -> HalfEdge:
        return self.surface.glue(self.slit)

    @property
    def blocked(self) -> frozenset:
        return frozenset((self.slit, self.lower))

    def boundary(self) -> tuple:
        return (self.slit, self.lower)

    @property
    def beta(self) -> Vec2:
        return self.surface.edge(self.slit)

    def reglue(self) -> Surface:
        return self.surface

    def stratum(self) -> StratumSignature:
        return self.surface.stratum()

    def area(self) -> Fraction:
        return self.surface.area()


def slit(s: Surface, beta) -> SlitSurface:
    """Excise an edge given by id or by one of its half-edges."""
    he = s.edge_halfedge(beta) if isinstance(beta, int) else tuple(beta)
    if he not in set(s.halfedges()):
        raise SurfaceError(f"{beta} is not an edge")
    return SlitSurface(s, he)


# ---------------------------------------------------------------- chains


def _options(p: Vec2, q: Vec2):
    for a, b in ((p, q), (-p, -q), (q, -p), (-q, p), (q, p), (-q, -p), (p, -q), (-p, q)):
        if cross(a, b) > 0:
            yield a, b


def chain_vectors(pairs: Sequence) -> list:
    """Side vectors u_1..u_{k+1} with parallelogram i spanned by (u_i, u_{i+1}).

    Pairs already in that form are used as given.  Otherwise each pair may be
    re-presented by swapping or negating its spanning vectors, which describes
    the same parallelogram, so that consecutive parallelograms share a side.
    """
    if not pairs:
        raise SurfaceError("empty parallelogram chain")
    pairs = [(Vec2(*a), Vec2(*b)) for a, b in pairs]
    for a, b in pairs:
        if cross(a, b) == 0:
            raise GeometryError("degenerate pair")
    if all(cross(a, b) > 0 for a, b in pairs) and all(
        pairs[i][1] == pairs[i + 1][0] for i in range(len(pairs) - 1)
    ):
        return [pairs[0][0]] + [b for _, b in pairs]

    def extend(i, prev):
        if i == len(pairs):
            return []
        for a, b in _options(*pairs[i]):
            if prev is None or a == prev:
                rest = extend(i + 1, b)
                if rest is not None:
                    return [(a, b)] + rest
        return None

    found = extend(0, None)
    if found is None:
        raise SurfaceError("parallelograms do not share sides in sequence")
    return [found[0][0]] + [b for _, b in found]


def from_parallelogram_chain(pairs: Sequence) -> Surface:
    """Glue parallelograms P_i = span(u_i, u_{i+1}) in a fan.

    P_i's side u_{i+1} is shared with P_{i+1}; the outer sides u_1 of P_1 and
    u_{k+1} of P_k are glued to their own opposite sides.  Each P_i is cut by
    the diagonal from u_i to u_{i+1}; the rotation by pi about each
    parallelogram's centre is recorded as the involution.
    """
    us = chain_vectors(pairs)
    k = len(us) - 1
    tris = []
    for i in range(k):
        a, b = us[i], us[i + 1]
        tris.append(Triangle(a, b - a, -b))  # 2i
        tris.append(Triangle(b, -a, a - b))  # 2i + 1
    glue = [[None] * 3 for _ in range(2 * k)]

    def join(x, y):
        glue[x[0]][x[1]] = y
        glue[y[0]][y[1]] = x

    for i in range(k):
        ta, tb = 2 * i, 2 * i + 1
        join((ta, 1), (tb, 2))  # diagonal
    # sides: s1 = (ta,0), s2 = (tb,0), s3 = (tb,1), s4 = (ta,2)
    join((0, 0), (1, 1))
    last = 2 * (k - 1)
    join((last + 1, 0), (last, 2))
    for i in range(k - 1):
        ta, tb = 2 * i, 2 * i + 1
        na, nb = ta + 2, tb + 2
        join((ta, 2), (na, 0))
        join((tb, 0), (nb, 1))
    table = [[None] * 3 for _ in range(2 * k)]
    for i in range(k):
        ta, tb = 2 * i, 2 * i + 1
        for j in range(3):
            table[ta][j] = (tb, (j + 1) % 3)
            table[tb][(j + 1) % 3] = (ta, j)
    s = Surface(tuple(tris), tuple(tuple(r) for r in glue), None,
                tuple(tuple(r) for r in table))
    bad = s.validate()
    if bad:
        raise SurfaceError(bad[0])
    return s


def parse_chain(text: str) -> list:
    """Parse "ax,ay;bx,by | ..." into pairs of vectors."""
    pairs = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(";")
        if len(parts) != 2:
            raise SurfaceError(f"cannot parse parallelogram {chunk!r}")
        pairs.append((parse_vec(parts[0]), parse_vec(parts[1])))
    return pairs


def diagonal_halfedge(i: int) -> HalfEdge:
    """Half-edge of the diagonal of the i-th chain parallelogram."""
    return (2 * i, 1)


def _u(*xs):
    return [parse_vec(x) for x in xs]


# name -> (side vectors, slit half-edge, description)
BUILTINS = {
    "torus": (_u("1,0", "0,1"), (0, 0), "unit square torus, one marked point"),
    "slit-torus": (
        _u("1/2,0", "0,1", "-1/2,0"),
        (0, 0),
        "unit square torus with marked points 0 and 1/2, slit (1/2,0)",
    ),
    "hyp2": (
        _u("1,0", "0,1", "-1,0", "0,-1"),
        (0, 0),
        "three unit squares in H(2), slit along a unit side",
    ),
    "hyp4": (
        _u("-3/2,0", "-1,-3", "1,-1", "2,1", "-1/2,2", "-2,2"),
        (0, 1),
        "five-parallelogram fan in H(4), slit along a diagonal",
    ),
    "hyp4-square": (
        _u("1,0", "0,1", "-1,0", "0,-1", "1,0", "0,1"),
        (0, 1),
        "five unit squares in H(4), slit along a diagonal",
    ),
}


def builtin(name: str) -> tuple:
    """Named example: returns (surface, slit half-edge)."""
    if name not in BUILTINS:
        raise SurfaceError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    us, he, _ = BUILTINS[name]
    pairs = [(us[i], us[i + 1]) for i in range(len(us) - 1)]
    return from_parallelogram_chain(pairs), he


def builtin_slit(name: str) -> SlitSurface:
    s, he = builtin(name)
    return SlitSurface(s, he)


def random_chain(rng, k: int, max_num: int = 4, den: int = 2) -> tuple:
    """A random fan of k parallelograms with a diagonal slit.

    Side vectors have entries n/den with |n| <= max_num, drawn from ``rng``
    (a :class:`random.Random`); each is negated if needed so that consecutive
    sides turn left.  Returns (surface, slit half-edge).
    """
    if k < 1:
        raise SurfaceError("a chain needs at least one parallelogram")

    def draw():
        while True:
            x, y = rng.randint(-max_num, max_num), rng.randint(-max_num, max_num)
            if x or y:
                return Vec2(Fraction(x, den), Fraction(y, den))

    us = [draw()]
    while len(us) < k + 1:
        v = draw()
        c = cross(us[-1], v)
        if c == 0:
            continue
        us.append(v if c > 0 else -v)
    pairs = [(us[i], us[i + 1]) for i in range(k)]
    return from_parallelogram_chain(pairs), diagonal_halfedge(rng.randrange(k))


# ---------------------------------------------------------------- tracing


def corner_limit(s: Surface) -> int:
    return 3 * s.n_triangles + 1


def trace_cap(s: Surface, len_sq: Fraction) -> int:
    """Generous cap on triangles crossed by a segment of the given length."""
    E = s.int_edges
    min_alt_sq = None
    for tri in E:
        a2 = abs(tri[0][0] * tri[1][1] - tri[0][1] * tri[1][0])
        longest = max(x * x + y * y for x, y in tri)
        alt = Fraction(a2 * a2, longest)
        if min_alt_sq is None or alt < min_alt_sq:
            min_alt_sq = alt
    scaled = len_sq * s.scale * s.scale
    return 64 + 8 * s.n_triangles * (int(scaled / min_alt_sq) + 1)


def connection_from(s: Surface, corner: HalfEdge, hol: Vec2, blocked=frozenset()) -> SaddleConnection:
    """Build a SaddleConnection by tracing; raises if hol is not one."""
    E = s.int_edges
    hx, hy = s.to_int(hol)
    _, (te, ce) = K.trace(E, s.gluing, blocked, corner[0], corner[1], hx, hy,
                          trace_cap(s, hol.norm_sq()))
    end = K.arrival_corner(E, s.gluing, te, ce, -hx, -hy)
    return SaddleConnection(corner, hol, s.vertex_of(corner), s.vertex_of(end), end)


def crossings(s: Surface, sc: SaddleConnection, blocked=frozenset()) -> list:
    E = s.int_edges
    hx, hy = s.to_int(sc.holonomy)
    crossed, _ = K.trace(E, s.gluing, blocked, sc.start_corner[0], sc.start_corner[1],
                         hx, hy, trace_cap(s, sc.len_sq))
    return crossed


# ---------------------------------------------------------------- insert_edge


class Inserted(NamedTuple):
    surface: Surface
    halfedge: HalfEdge
    tracked: tuple  # tracked (corner, direction) pairs, updated
    flips: int


def _retrack(steps, tracked):
    for fm, after in steps:
        tracked = tuple((fm.corner(after, c, d), d) for c, d in tracked)
    return tracked


def _equivariant_flip(s: Surface, he: HalfEdge, tau):
    """Flip he and its involution image.

    Returns (surface, table, steps) where steps lists (FlipMap, surface after
    that flip) in order.
    """
    if tau is None:
        new, fm = s.flip(he)
        return new, None, [(fm, new)]
    t, _ = he
    u, _ = s.glue(he)
    img = tau[he[0]][he[1]]
    if img == s.glue(he):
        new, fm = s.flip(he)
        table = [list(r) for r in tau]
        for i in range(3):
            table[t][i] = (u, (i + 1) % 3)
            table[u][(i + 1) % 3] = (t, i)
        return new, tuple(tuple(r) for r in table), [(fm, new)]
    t2, _ = img
    u2, _ = s.glue(img)
    if {t, u} & {t2, u2}:
        raise SurfaceError("edge and its image share a triangle")
    mid, fm1 = s.flip(he)
    new, fm2 = mid.flip(img)
    table = [list(r) for r in tau]
    for i in range(3):
        table[t][i] = (t2, i)
        table[t2][i] = (t, i)
        table[u][i] = (u2, i)
        table[u2][i] = (u, i)
    return new, tuple(tuple(r) for r in table), [(fm1, mid), (fm2, new)]


def insert_edge(s: Surface, sc: SaddleConnection, tau=None, tracked=(), max_flips: int = 500) -> Inserted:
    """Retriangulate so that ``sc`` is an edge, flipping only crossed edges.

    With an involution table ``tau`` every flip is paired with the flip of the
    image edge, keeping the triangulation invariant; the updated table is put
    on the returned surface as its recorded involution.  ``tracked`` is a
    sequence of (corner, direction) pairs carried through the flips.
    """
    cur = s
    corner = sc.start_corner
    tracked = tuple(tracked)
    flips = 0
    d = sc.holonomy
    while True:
        crossed = crossings(cur, SaddleConnection(corner, d, 0, 0, corner))
        if not crossed:
            out = cur if tau is None else cur.with_involution(tau)
            return Inserted(out, corner, tracked, flips)
        if flips >= max_flips:
            raise SurfaceError("edge insertion did not converge")
        best = None
        seen = set()
        for he in crossed:
            key = min(he, cur.glue(he))
            if key in seen:
                continue
            seen.add(key)
            try:
                cand, ctau, steps = _equivariant_flip(cur, he, tau)
                c2 = _retrack(steps, ((corner, d),))[0][0]
            except SurfaceError:
                continue
            n2 = len(crossings(cand, SaddleConnection(c2, d, 0, 0, c2)))
            if best is None or n2 < best[0]:
                best = (n2, cand, ctau, steps, c2)
        if best is None:
            raise SurfaceError("no crossed edge can be flipped")
        _, cand, ctau, steps, c2 = best
        tracked = _retrack(steps, tracked)
        cur, tau, corner = cand, ctau, c2
        flips += len(steps)
