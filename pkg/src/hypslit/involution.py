"""The involution with derivative -1, and surgery that respects it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .surface import (
    HalfEdge,
    SaddleConnection,
    SlitSurface,
    Surface,
    SurfaceError,
)


@dataclass(frozen=True)
class Involution:
    """Half-edge table of an order-two automorphism acting by -1 on vectors.

    A corner is named by its outgoing half-edge, so the same table maps
    corners.
    """

    edge_map: tuple

    def __call__(self, he: HalfEdge) -> HalfEdge:
        return self.edge_map[he[0]][he[1]]

    @property
    def triangle_map(self) -> tuple:
        return tuple(row[0][0] for row in self.edge_map)

    def fixes_edge(self, s: Surface, he: HalfEdge) -> bool:
        return self(he) == s.glue(he)

    def is_invariant(self, sc: SaddleConnection) -> bool:
        # tau sends the start corner to the corner owning -hol at the far end
        return self(sc.start_corner) == sc.end_corner

    def image(self, s: Surface, sc: SaddleConnection) -> SaddleConnection:
        """The saddle connection tau(sc), leaving tau of the start corner."""
        a, b = self(sc.start_corner), self(sc.end_corner)
        return SaddleConnection(a, -sc.holonomy, s.vertex_of(a), s.vertex_of(b), b)

    def fixed_points(self, s: Surface) -> int:
        verts = 0
        for orbit in s.vertex_orbits:
            if s.vertex_of(self(orbit[0])) == s.vertex_of(orbit[0]):
                verts += 1
        edges = sum(1 for a, _ in s.edge_pairs if self.fixes_edge(s, a))
        return verts + edges

    def to_json(self, s: Surface) -> dict:
        hes = list(s.halfedges())
        return {
            "edge_map": [list(self(he)) for he in hes],
            "triangle_map": list(self.triangle_map),
        }


def check_involution(s: Surface, table) -> Optional[str]:
    """First reason ``table`` is not a -1 involution of ``s``, or None."""
    n = s.n_triangles
    if len(table) != n:
        return "involution table has the wrong size"
    for t in range(n):
        row = table[t]
        if len(row) != 3:
            return f"involution row {t} does not have three entries"
        t2 = row[0][0]
        for k in range(3):
            img = tuple(row[k])
            if img[0] != t2 or img[1] != (row[0][1] + k) % 3:
                return f"involution does not map triangle {t} rigidly"
            if not (s.edge((t, k)) + s.edge(img)).is_zero():
                return f"involution does not negate half-edge {(t, k)}"
            if tuple(table[img[0]][img[1]]) != (t, k):
                return f"involution is not of order two at {(t, k)}"
            g = s.glue((t, k))
            if tuple(table[g[0]][g[1]]) != s.glue(img):
                return f"involution does not respect gluing at {(t, k)}"
    return None


def _propagate(s: Surface, t_img: int, off: int, budget: list):
    n = s.n_triangles
    E = s.triangles
    tri_img = [None] * n
    tri_img[0] = (t_img, off)
    todo = [0]
    while todo:
        budget[0] -= 1
        if budget[0] < 0:
            raise SurfaceError("involution search exceeded its budget")
        t = todo.pop()
        t2, o = tri_img[t]
        for k in range(3):
            k2 = (k + o) % 3
            if not (E[t][k] + E[t2][k2]).is_zero():
                return None
            u, m = s.glue((t, k))
            u2, m2 = s.glue((t2, k2))
            want = (u2, (m2 - m) % 3)
            if tri_img[u] is None:
                tri_img[u] = want
                todo.append(u)
            elif tri_img[u] != want:
                return None
    images = [ti[0] for ti in tri_img]
    if len(set(images)) != n:
        return None
    table = tuple(
        tuple((tri_img[t][0], (k + tri_img[t][1]) % 3) for k in range(3)) for t in range(n)
    )
    if check_involution(s, table) is not None:
        return None
    return table


def all_involutions(s: Surface, budget: int = 200000) -> list:
    out = []
    b = [budget]
    for t2 in range(s.n_triangles):
        for off in range(3):
            table = _propagate(s, t2, off, b)
            if table is not None:
                out.append(Involution(table))
    return out


def find_involution(s: Surface, slit_he: Optional[HalfEdge] = None, budget: int = 200000) -> Optional[Involution]:
    """Find the -1 involution by rigid propagation from triangle 0.

    A recorded involution wins if it is valid.  Otherwise, among all
    candidates, prefer one fixing the slit edge, then the most fixed points.
    """
    if s.recorded_involution is not None and check_involution(s, s.recorded_involution) is None:
        inv = Involution(s.recorded_involution)
        if slit_he is None or inv.fixes_edge(s, slit_he):
            return inv
    cands = all_involutions(s, budget)
    if not cands:
        return None

    def rank(item):
        i, inv = item
        fix = slit_he is not None and inv.fixes_edge(s, slit_he)
        return (not fix, -inv.fixed_points(s), i)

    return min(enumerate(cands), key=rank)[1]


def classify(s: Surface, tau: Optional[Involution] = None) -> str:
    """'hyperelliptic' when a -1 involution has 2g+2 fixed points."""
    g = s.stratum().genus
    cands = [tau] if tau is not None else all_involutions(s)
    for inv in cands:
        if inv.fixed_points(s) == 2 * g + 2:
            return "hyperelliptic"
    return "non-hyperelliptic"


# ---------------------------------------------------------------- surgery


def _components(n: int, glue, skip: set) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in range(n):
        for k in range(3):
            if (t, k) in skip:
                continue
            a, b = find(t), find(glue[t][k][0])
            if a != b:
                parent[a] = b
    groups = {}
    for t in range(n):
        groups.setdefault(find(t), []).append(t)
    return sorted(groups.values())


def separates(s: Surface, halfedges) -> int:
    """Number of pieces after cutting along the given edges."""
    skip = set()
    for he in halfedges:
        skip.add(tuple(he))
        skip.add(s.glue(tuple(he)))
    return len(_components(s.n_triangles, s.gluing, skip))


class Piece(NamedTuple):
    slit: SlitSurface
    involution: Involution
    halfedge_map: dict  # old half-edge -> new half-edge within this piece
    triangles: tuple  # old triangle indices, in new order


def cut_and_glue(s: Surface, sigma: HalfEdge, tau: Involution) -> tuple:
    """Cut along the edges sigma and tau(sigma), then reglue crosswise.

    The two cuts must split the surface in two; in each piece the free copy
    of sigma is glued to the free copy of tau(sigma).  The new edge is
    invariant and becomes the slit of each piece.
    """
    sig2 = s.glue(sigma)
    ts, ts2 = tau(sigma), tau(sig2)
    free = {sigma, sig2, ts, ts2}
    if len(free) != 4:
        raise SurfaceError("sigma must not be invariant")
    comps = _components(s.n_triangles, s.gluing, free)
    if len(comps) != 2:
        raise SurfaceError(f"cut produced {len(comps)} pieces, expected 2")
    pieces = []
    for tris in comps:
        tset = set(tris)
        mine = [he for he in (sigma, sig2, ts, ts2) if he[0] in tset]
        if len(mine) != 2:
            raise SurfaceError("each piece must carry one copy of each cut edge")
        a, b = mine
        if not (s.edge(a) + s.edge(b)).is_zero():
            raise SurfaceError("free sides of a piece are not opposite")
        idx = {t: i for i, t in enumerate(tris)}
        glue = []
        for t in tris:
            row = []
            for k in range(3):
                if (t, k) == a:
                    o = b
                elif (t, k) == b:
                    o = a
                else:
                    o = s.glue((t, k))
                row.append((idx[o[0]], o[1]))
            glue.append(tuple(row))
        table = tuple(
            tuple((idx[tau((t, k))[0]], tau((t, k))[1]) for k in range(3)) for t in tris
        )
        surf = Surface(tuple(s.triangles[t] for t in tris), tuple(glue), None, table)
        bad = surf.validate()
        if bad:
            raise SurfaceError("cut piece invalid: " + bad[0])
        hmap = {(t, k): (idx[t], k) for t in tris for k in range(3)}
        new_a = hmap[a]
        inv = Involution(table)
        if check_involution(surf, table) is not None:
            raise SurfaceError("involution does not descend to a piece")
        pieces.append(Piece(SlitSurface(surf, new_a), inv, hmap, tuple(tris)))
    return tuple(pieces)
