"""Integer-coordinate traversal kernels.

Surfaces are scaled by a common denominator before they reach this module, so
every predicate here is a sign test on Python ints.  Positions are always
developed relative to a chosen base vertex placed at the origin.

Conventions shared with :mod:`hypslit.surface`:

* ``E[t][k]`` is the edge vector of side ``k`` of triangle ``t`` (CCW order).
* ``G[t][k]`` is the half-edge glued to ``(t, k)``.
* a corner ``(t, k)`` sits at the start of side ``k`` and owns the half-open
  sector of directions ``[E[t][k], -E[t][k-1])``.
* the next corner counter-clockwise around a vertex is ``G[t][k-1]``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key


class KernelError(RuntimeError):
    """A traversal found the input inconsistent with its contract."""


class BudgetExceeded(KernelError):
    """A traversal hit its step cap."""


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _upper(x, y):
    return y > 0 or (y == 0 and x > 0)


def in_sector(E, t, k, dx, dy) -> bool:
    ux, uy = E[t][k]
    wx, wy = E[t][k - 1]
    wx, wy = -wx, -wy
    c = ux * dy - uy * dx
    if c < 0 or (c == 0 and ux * dx + uy * dy <= 0):
        return False
    return dx * wy - dy * wx > 0


def next_ccw(G, t, k):
    return G[t][(k - 1) % 3]


def next_cw(G, t, k):
    nb = G[t][k]
    if nb is None:
        return None
    return (nb[0], (nb[1] + 1) % 3)


def locate_ccw(E, G, corner, dx, dy, limit):
    """Walk counter-clockwise from ``corner`` to the first sector containing d."""
    c = corner
    for _ in range(limit):
        if in_sector(E, c[0], c[1], dx, dy):
            return c
        c = next_ccw(G, c[0], c[1])
        if c is None:
            break
    raise KernelError("direction not found walking counter-clockwise")


def locate_cw(E, G, corner, dx, dy, limit):
    c = corner
    for _ in range(limit):
        if in_sector(E, c[0], c[1], dx, dy):
            return c
        c = next_cw(G, c[0], c[1])
        if c is None:
            break
    raise KernelError("direction not found walking clockwise")


def arrival_corner(E, G, t, c, dx, dy):
    """Corner at vertex ``c`` of ``t`` owning direction d, given d lies in the
    closed sector of that corner (it may sit on the counter-clockwise ray)."""
    if in_sector(E, t, c, dx, dy):
        return (t, c)
    nb = G[t][(c - 1) % 3]
    if nb is None or not in_sector(E, nb[0], nb[1], dx, dy):
        raise KernelError("arrival direction outside the closed corner")
    return nb


def _seg_dist_sq_gt(ax, ay, bx, by, bound):
    """Is the squared distance from the origin to segment ab greater than bound?"""
    dx, dy = bx - ax, by - ay
    t_num = -(ax * dx + ay * dy)
    dd = dx * dx + dy * dy
    if t_num <= 0:
        return ax * ax + ay * ay > bound
    if t_num >= dd:
        return bx * bx + by * by > bound
    c = ax * by - ay * bx
    return c * c > bound * dd


# --------------------------------------------------------------------------
# saddle connection enumeration by wedge unfolding


def wedge_search(E, G, blocked, corners, lsq, depth_cap):
    """Saddle connections of squared length <= lsq leaving the given corners.

    Only canonical holonomies (upper half-plane) are produced, so each
    unoriented connection appears once, from the corner owning its direction.
    Returns tuples ``(t, k, hx, hy, t_end, c_end)`` where the end vertex is
    vertex ``c_end`` of triangle ``t_end``.
    """
    out = []
    for t, k in corners:
        tri = E[t]
        ax, ay = tri[k]
        fx, fy = tri[(k + 1) % 3]
        bx, by = ax + fx, ay + fy
        if (t, k) not in blocked and _upper(ax, ay) and ax * ax + ay * ay <= lsq:
            out.append((t, k, ax, ay, t, (k + 1) % 3))
        stack = [(t, (k + 1) % 3, ax, ay, bx, by, ax, ay, bx, by, 1)]
        while stack:
            t0, j, xx, xy, yx, yy, lox, loy, hix, hiy, depth = stack.pop()
            if (t0, j) in blocked:
                continue
            if not _upper(lox, loy) and not _upper(hix, hiy):
                continue
            if _seg_dist_sq_gt(xx, xy, yx, yy, lsq):
                continue
            if depth > depth_cap:
                raise BudgetExceeded("wedge search exceeded its depth cap")
            t1, j1 = G[t0][j]
            gx, gy = E[t1][(j1 + 1) % 3]
            vx, vy = xx + gx, xy + gy
            c_lo = lox * vy - loy * vx
            c_hi = vx * hiy - vy * hix
            if c_lo > 0 and c_hi > 0 and _upper(vx, vy) and vx * vx + vy * vy <= lsq:
                out.append((t, k, vx, vy, t1, (j1 + 2) % 3))
            # X -> V keeps lo, hi shrinks to V when V is clockwise of hi
            if c_hi > 0:
                nhx, nhy = vx, vy
            else:
                nhx, nhy = hix, hiy
            if lox * nhy - loy * nhx > 0:
                stack.append((t1, (j1 + 1) % 3, xx, xy, vx, vy, lox, loy, nhx, nhy, depth + 1))
            # V -> Y keeps hi, lo grows to V when V is counter-clockwise of lo
            if c_lo > 0:
                nlx, nly = vx, vy
            else:
                nlx, nly = lox, loy
            if nlx * hiy - nly * hix > 0:
                stack.append((t1, (j1 + 2) % 3, vx, vy, yx, yy, nlx, nly, hix, hiy, depth + 1))
    return out


# --------------------------------------------------------------------------
# straight segment tracing


def trace(E, G, blocked, t, k, hx, hy, cap):
    """Follow the segment leaving corner (t, k) with holonomy h.

    Returns ``(crossed, (t_end, c_end))``: the half-edges crossed in order
    (each as seen from the triangle being left) and the end vertex.  Raises if
    the segment meets a vertex early, crosses a blocked half-edge, or is not in
    the corner's sector.
    """
    if not in_sector(E, t, k, hx, hy):
        raise KernelError("holonomy is not in the sector of the start corner")
    ex, ey = E[t][k]
    if _cross(ex, ey, hx, hy) == 0:
        if (ex, ey) == (hx, hy):
            return [], (t, (k + 1) % 3)
        raise KernelError("segment runs along an edge through a vertex")
    crossed = []
    j = (k + 1) % 3
    xx, xy = ex, ey
    t0 = t
    for _ in range(cap):
        if (t0, j) in blocked:
            raise KernelError("segment crosses the slit")
        crossed.append((t0, j))
        t1, j1 = G[t0][j]
        gx, gy = E[t1][(j1 + 1) % 3]
        vx, vy = xx + gx, xy + gy
        c = _cross(hx, hy, vx, vy)
        if c == 0:
            if (vx, vy) == (hx, hy):
                return crossed, (t1, (j1 + 2) % 3)
            raise KernelError("segment passes through a vertex")
        if c > 0:
            t0, j = t1, (j1 + 1) % 3
        else:
            t0, j, xx, xy = t1, (j1 + 2) % 3, vx, vy
    raise BudgetExceeded("segment trace exceeded its cap")


# --------------------------------------------------------------------------
# open cones of directions, used to summarise obstacle constraints


def _cone_cut(cone, nx, ny):
    """Intersect an open convex cone (lo, hi) with {x : cross(x, n) > 0}."""
    if cone is None:
        return None
    lox, loy, hix, hiy = cone
    a = lox * ny - loy * nx  # cross(lo, n)
    b = hix * ny - hiy * nx
    if a >= 0 and b >= 0:
        if a == 0 and b == 0 and lox * nx + loy * ny > 0:
            return None
        return cone
    if a >= 0:
        res = (lox, loy, nx, ny)
    elif b >= 0:
        res = (-nx, -ny, hix, hiy)
    else:
        return None
    rlx, rly, rhx, rhy = res
    c = rlx * rhy - rly * rhx
    if c > 0 or (c == 0 and rlx * rhx + rly * rhy < 0):
        return res
    return None


def _in_cone(cone, x, y):
    lox, loy, hix, hiy = cone
    return lox * y - loy * x > 0 and x * hiy - y * hix > 0


def _param_interval(cone, px, py, dx, dy):
    """Open parameter set {t in [0,1] : P + tD lies in the open cone}.

    Returned as ``(lo, hi)`` of (num, den) pairs, or None when empty.
    """
    lox, loy, hix, hiy = cone
    lo = (0, 1)
    hi = (1, 1)
    for f0, f1 in (
        (lox * py - loy * px, lox * (py + dy) - loy * (px + dx)),
        ((px) * hiy - (py) * hix, (px + dx) * hiy - (py + dy) * hix),
    ):
        if f0 <= 0 and f1 <= 0:
            return None
        if f0 > 0 and f1 > 0:
            continue
        num, den = f0, f0 - f1
        if den < 0:
            num, den = -num, -den
        if f0 > 0:
            if num * hi[1] < hi[0] * den:
                hi = (num, den)
        else:
            if num * lo[1] > lo[0] * den:
                lo = (num, den)
    if lo[0] * hi[1] >= hi[0] * lo[1]:
        return None
    return lo, hi


# --------------------------------------------------------------------------
# triangles standing on an edge


def funnel(E, G, blocked, h, bound, mode, height_cap, node_cap):
    """Empty immersed triangles T(L, R, p) above the half-edge h = (t0, k0).

    L is the start of h (placed at the origin) and R its end.  A vertex p is
    reported when the triangle with apex p contains no vertex, its sides meet
    no vertex, and it stays off blocked half-edges.  Pruning:

    * ``height_cap`` bounds cross(R, p) (twice the triangle area), inclusive;
    * ``bound`` bounds squared side lengths, with ``mode`` "either" (one of
      |p - L|^2, |p - R|^2 within bound) or "rho" (|p - L|^2 within bound).

    Returns tuples ``(t, c, px, py)``: apex is vertex c of triangle t.
    """
    t0, k0 = h
    bx, by = E[t0][k0]
    apexes = []
    half = (bx, by, -bx, -by)
    stack = [(t0, k0, 0, 0, bx, by, half, half)]
    nodes = 0
    while stack:
        t, s, ax, ay, qx, qy, cone_l, cone_r = stack.pop()
        nodes += 1
        if nodes > node_cap:
            raise BudgetExceeded("triangle search exceeded its node cap")
        tri = E[t]
        fx, fy = tri[(s + 1) % 3]
        vx, vy = qx + fx, qy + fy
        height = bx * vy - by * vx
        if (
            0 < height <= height_cap
            and _in_cone(cone_l, vx, vy)
            and _in_cone(cone_r, vx - bx, vy - by)
        ):
            dl = vx * vx + vy * vy
            if bound is None:
                ok = True
            elif mode == "rho":
                ok = dl <= bound
            else:
                rx, ry = vx - bx, vy - by
                ok = dl <= bound or rx * rx + ry * ry <= bound
            if ok:
                apexes.append((t, (s + 2) % 3, vx, vy))
        for side, new_left, a2x, a2y, b2x, b2y in (
            ((s + 1) % 3, True, vx, vy, qx, qy),
            ((s + 2) % 3, False, ax, ay, vx, vy),
        ):
            if (t, side) in blocked:
                continue
            if new_left:
                cl = _cone_cut(cone_l, vx, vy)
                cr = _cone_cut(cone_r, vx - bx, vy - by)
            else:
                cl = _cone_cut(cone_l, -vx, -vy)
                cr = _cone_cut(cone_r, bx - vx, by - vy)
            if cl is None or cr is None:
                continue
            if bound is not None:
                far_l = _seg_dist_sq_gt(a2x, a2y, b2x, b2y, bound)
                if mode == "rho":
                    if far_l:
                        continue
                elif far_l and _seg_dist_sq_gt(a2x - bx, a2y - by, b2x - bx, b2y - by, bound):
                    continue
            dx, dy = b2x - a2x, b2y - a2y
            # an edge through L (or R) is met by rho (or sigma) at that
            # endpoint; the cut cone being nonempty is then the whole test
            if (a2x, a2y) == (0, 0):
                il = ((0, 1), (0, 1))
            else:
                il = _param_interval(cl, a2x, a2y, dx, dy)
            if il is None:
                continue
            if (b2x, b2y) == (bx, by):
                ir = ((1, 1), (1, 1))
            else:
                ir = _param_interval(cr, a2x - bx, a2y - by, dx, dy)
            if ir is None:
                continue
            lo, hi = il[0], ir[1]
            if lo[0] * hi[1] >= hi[0] * lo[1]:
                continue
            h0 = bx * a2y - by * a2x
            h1 = bx * b2y - by * b2x
            # the height along the edge is linear, so its minimum over the
            # feasible stretch is attained at an end
            ok = False
            for n, d in (lo, hi):
                if h0 * (d - n) + h1 * n <= height_cap * d:
                    ok = True
                    break
            if not ok:
                continue
            t2, j2 = G[t][side]
            stack.append((t2, j2, a2x, a2y, b2x, b2y, cl, cr))
    return apexes


def _wedge_ok(lx, ly, ux, uy):
    # nonempty open wedge of angle at most pi
    c = lx * uy - ly * ux
    return c > 0 or (c == 0 and lx * ux + ly * uy < 0)


def visible_from_start(E, G, blocked, h, height_cap, lsq, depth_cap):
    """Vertices seen from the start L of h, strictly above the line of h.

    Unfolds from every corner at L between the direction of h and its
    reverse, keeping only the strip 0 < cross(b, v) <= height_cap and
    |v|^2 <= lsq.  Returns ``(vx, vy, t_end, c_end, t, k)`` with the end
    vertex c_end of t_end and the start corner (t, k).
    """
    t0, k0 = h
    bx, by = E[t0][k0]

    def hgt(x, y):
        return bx * y - by * x

    out = []
    corners = []
    c = (t0, k0)
    for _ in range(3 * len(E) + 1):
        ex, ey = E[c[0]][c[1]]
        he = hgt(ex, ey)
        if c != (t0, k0) and (he < 0 or (he == 0 and bx * ex + by * ey < 0)):
            break
        corners.append(c)
        c = next_ccw(G, c[0], c[1])
        if c == (t0, k0):
            break
    for t, k in corners:
        tri = E[t]
        ax, ay = tri[k]
        fx, fy = tri[(k + 1) % 3]
        qx, qy = ax + fx, ay + fy
        ha = hgt(ax, ay)
        if (t, k) not in blocked and 0 < ha <= height_cap and ax * ax + ay * ay <= lsq:
            out.append((ax, ay, t, (k + 1) % 3, t, k))
        # the wedge is also clipped to the open half-plane above h
        lox, loy, hix, hiy = ax, ay, qx, qy
        if ha <= 0:
            lox, loy = bx, by
        if hgt(qx, qy) < 0 or (hgt(qx, qy) == 0 and bx * qx + by * qy < 0):
            hix, hiy = -bx, -by
        if not _wedge_ok(lox, loy, hix, hiy):
            continue
        stack = [(t, (k + 1) % 3, ax, ay, qx, qy, lox, loy, hix, hiy, 1)]
        pop, push = stack.pop, stack.append
        while stack:
            ti, j, xx, xy, yx, yy, lx, ly, ux, uy, depth = pop()
            if (ti, j) in blocked:
                continue
            if bx * xy - by * xx > height_cap and bx * yy - by * yx > height_cap:
                continue
            # squared distance from L to the segment XY against lsq
            dx, dy = yx - xx, yy - xy
            tn = -(xx * dx + xy * dy)
            if tn <= 0:
                if xx * xx + xy * xy > lsq:
                    continue
            else:
                dd = dx * dx + dy * dy
                if tn >= dd:
                    if yx * yx + yy * yy > lsq:
                        continue
                else:
                    cc = xx * yy - xy * yx
                    if cc * cc > lsq * dd:
                        continue
            if depth > depth_cap:
                raise BudgetExceeded("visibility search exceeded its depth cap")
            t1, j1 = G[ti][j]
            gx, gy = E[t1][(j1 + 1) % 3]
            vx, vy = xx + gx, xy + gy
            c_lo = lx * vy - ly * vx
            c_hi = vx * uy - vy * ux
            if c_lo > 0 and c_hi > 0:
                hv = bx * vy - by * vx
                if 0 < hv <= height_cap and vx * vx + vy * vy <= lsq:
                    out.append((vx, vy, t1, (j1 + 2) % 3, t, k))
            if c_hi > 0:
                # sub-wedge (lo, V): nonempty since V is counter-clockwise of lo or not
                if c_lo > 0:
                    push((t1, (j1 + 1) % 3, xx, xy, vx, vy, lx, ly, vx, vy, depth + 1))
            else:
                push((t1, (j1 + 1) % 3, xx, xy, vx, vy, lx, ly, ux, uy, depth + 1))
            if c_lo > 0:
                if c_hi > 0:
                    push((t1, (j1 + 2) % 3, vx, vy, yx, yy, vx, vy, ux, uy, depth + 1))
            else:
                push((t1, (j1 + 2) % 3, vx, vy, yx, yy, lx, ly, ux, uy, depth + 1))
    return out


def empty_apexes(E, G, blocked, h, height_cap, lsq, depth_cap):
    """Apexes p of empty immersed triangles T(L, R, p) above h.

    T(p) holds a vertex exactly when it holds one visible from L.  Ordering
    the visible vertices by angle at L, a vertex v lies in T(p) (or on its
    side R->p) iff it comes before p at L and not before p at R, so a
    running maximum of the angle at R decides emptiness for all p at once.
    Returns tuples ``(t_end, c_end, px, py, t, k)`` as from the unfolding.
    """
    t0, k0 = h
    bx, by = E[t0][k0]
    pts = visible_from_start(E, G, blocked, h, height_cap, lsq, depth_cap)

    # angle from b as the pair (num, den) of -dot/cross, den > 0
    keyed = []
    for item in pts:
        vx, vy = item[0], item[1]
        wx, wy = vx - bx, vy - by
        keyed.append((-(bx * vx + by * vy), bx * vy - by * vx,
                      -(bx * wx + by * wy), bx * wy - by * wx, item))
    keyed.sort(key=cmp_to_key(lambda a, b: a[0] * b[1] - b[0] * a[1]))
    out = []
    bn, bd = None, 1
    for ln, ld, rn, rd, (vx, vy, te, ce, t, k) in keyed:
        if bn is None or bn * rd < rn * bd:
            out.append((te, ce, vx, vy, t, k))
            bn, bd = rn, rd
    return out


def corridor(E, G, blocked, h, px, py, cap):
    """Walk the triangles met by T(L, R, p) over half-edge h.

    Returns ``(path, (t_end, c_end))`` where path lists
    ``(t, s, ax, ay, bx, by)`` entries (entry side s, its developed endpoints),
    or None if T(L, R, p) is not an empty immersed triangle ending at a vertex
    developed at p.
    """
    t, s = h
    bx, by = E[t][s]
    if bx * py - by * px <= 0:
        return None
    ax, ay, qx, qy = 0, 0, bx, by
    path = []
    for _ in range(cap):
        path.append((t, s, ax, ay, qx, qy))
        fx, fy = E[t][(s + 1) % 3]
        vx, vy = qx + fx, qy + fy
        if (vx, vy) == (px, py):
            return path, (t, (s + 2) % 3)
        side_l = px * vy - py * vx  # > 0: V left of L->p
        side_r = (px - bx) * (vy - by) - (py - by) * (vx - bx)  # > 0: V left of R->p
        if side_l == 0 or side_r == 0:
            return None
        if side_l > 0 and side_r > 0:
            side = (s + 1) % 3
            ax, ay = vx, vy
        elif side_l < 0 and side_r < 0:
            side = (s + 2) % 3
            qx, qy = vx, vy
        else:
            return None
        if (t, side) in blocked:
            return None
        t, s = G[t][side]
    raise BudgetExceeded("corridor walk exceeded its cap")


# --------------------------------------------------------------------------
# upward sweep of the band above a horizontal half-edge


def band_sweep(E, G, blocked, h, cap):
    """Sweep the vertical band over the horizontal half-edge h upward.

    Returns ``("apex", t, c, vx, vy)`` for the lowest vertex strictly above the
    open edge (leftmost on ties), or ``("periodic", height)`` when the band
    comes back to the edge from below without meeting a vertex.
    """
    t0, k0 = h
    w, wy = E[t0][k0]
    if wy != 0 or w <= 0:
        raise KernelError("band sweep needs a horizontal edge pointing right")
    best = None
    returns = []
    stack = [(t0, k0, 0, 0, w, 0, 0, w)]
    steps = 0
    while stack:
        t, s, ax, ay, qx, qy, x1, x2 = stack.pop()
        steps += 1
        if steps > cap:
            raise BudgetExceeded("band sweep exceeded its step cap")
        span = qx - ax
        if best is not None:
            # lowest point of the entry edge over [x1, x2], times span
            e1 = ay * span + (x1 - ax) * (qy - ay)
            e2 = ay * span + (x2 - ax) * (qy - ay)
            if min(e1, e2) >= best[0] * span:
                continue
        fx, fy = E[t][(s + 1) % 3]
        vx, vy = qx + fx, qy + fy
        c = (s + 2) % 3
        if x1 < vx < x2:
            if best is None or (vy, vx) < (best[0], best[1]):
                best = (vy, vx, t, c)
        parts = []
        if vx > x1:
            parts.append(((s + 2) % 3, ax, ay, vx, vy, x1, min(vx, x2)))
        if vx < x2:
            parts.append(((s + 1) % 3, vx, vy, qx, qy, max(vx, x1), x2))
        for side, a2x, a2y, b2x, b2y, y1, y2 in parts:
            if y1 >= y2:
                continue
            if (t, side) in blocked:
                returns.append((a2y, y1, y2, a2x, b2x))
                continue
            t2, j2 = G[t][side]
            stack.append((t2, j2, a2x, a2y, b2x, b2y, y1, y2))
    if best is not None:
        return ("apex", best[2], best[3], best[1], best[0])
    if len(returns) != 1:
        raise KernelError("band returned in pieces without meeting a vertex")
    hgt, y1, y2, a2x, b2x = returns[0]
    if (y1, y2) != (0, w) or (min(a2x, b2x), max(a2x, b2x)) != (0, w):
        raise KernelError("band returned with an offset but met no vertex")
    return ("periodic", hgt)


# --------------------------------------------------------------------------
# exact convex pieces, for embeddedness tests


def _clip(poly, ox, oy, dx, dy):
    """Keep the part of poly on the closed left of the line o + s d."""
    out = []
    n = len(poly)
    for i in range(n):
        px, py = poly[i]
        qx, qy = poly[(i + 1) % n]
        sp = dx * (py - oy) - dy * (px - ox)
        sq = dx * (qy - oy) - dy * (qx - ox)
        if sp >= 0:
            out.append((px, py))
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            r = Fraction(sp, sp - sq)
            out.append((px + (qx - px) * r, py + (qy - py) * r))
    return out


def _area2(poly):
    s = 0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def triangle_pieces(E, path, bx, by, px, py):
    """Pieces of T(L, R, p) inside each triangle of its corridor.

    Each piece is ``(t, polygon)`` with the polygon in the local frame of t
    (vertex 0 of t at the origin).  Degenerate pieces are dropped.
    """
    pieces = []
    for t, s, ax, ay, qx, qy in path:
        fx, fy = E[t][(s + 1) % 3]
        vx, vy = qx + fx, qy + fy
        poly = [(ax, ay), (qx, qy), (vx, vy)]
        poly = _clip(poly, 0, 0, bx, by)
        if poly:
            poly = _clip(poly, bx, by, px - bx, py - by)
        if poly:
            poly = _clip(poly, px, py, -px, -py)
        if len(poly) < 3 or _area2(poly) == 0:
            continue
        # developed position of vertex 0 of t
        pos = {s: (ax, ay), (s + 1) % 3: (qx, qy), (s + 2) % 3: (vx, vy)}
        ox, oy = pos[0]
        pieces.append((t, [(x - ox, y - oy) for x, y in poly]))
    return pieces


def _separated(p, q):
    n = len(p)
    for i in range(n):
        ax, ay = p[i]
        bx, by = p[(i + 1) % n]
        dx, dy = bx - ax, by - ay
        if all(dx * (y - ay) - dy * (x - ax) <= 0 for x, y in q):
            return True
    return False


def convex_overlap(p, q) -> bool:
    """Do two counter-clockwise convex polygons share interior points?"""
    return not (_separated(p, q) or _separated(q, p))


def pieces_overlap(pieces) -> bool:
    """Any two pieces in the same triangle with overlapping interiors?"""
    by_tri = {}
    for t, poly in pieces:
        xs = [x for x, _ in poly]
        ys = [y for _, y in poly]
        by_tri.setdefault(t, []).append((min(xs), max(xs), min(ys), max(ys), poly))
    for items in by_tri.values():
        items.sort(key=lambda it: it[0])
        active = []
        for it in items:
            active = [a for a in active if a[1] > it[0]]
            for a in active:
                if a[3] > it[2] and it[3] > a[2] and convex_overlap(a[4], it[4]):
                    return True
            active.append(it)
    return False


def triangle_embedded(E, path, bx, by, px, py) -> bool:
    """Is the empty immersed triangle T(0, b, p) with this corridor embedded?

    Two corridor copies of one surface triangle can only overlap inside T if
    their offset w lies in the interior of the difference body T - T, that
    is |cross(e, w)| < cross(b, p) for each side e.  Copies are sorted by
    cross(p, .) so that only pairs within that window are examined; the
    exact piece overlap is computed for the survivors.
    """
    H = bx * py - by * px
    sx, sy = px - bx, py - by
    groups = {}
    for idx, (t, s, ax, ay, qx, qy) in enumerate(path):
        # developed position of vertex 0 of t
        if s == 0:
            ox, oy = ax, ay
        elif s == 2:
            ox, oy = qx, qy
        else:
            ex, ey = E[t][0]
            ox, oy = ax - ex, ay - ey
        groups.setdefault(t, []).append((px * oy - py * ox, ox, oy, idx))
    cache = {}

    def piece(idx):
        if idx not in cache:
            got = triangle_pieces(E, [path[idx]], bx, by, px, py)
            cache[idx] = got[0][1] if got else None
        return cache[idx]

    for items in groups.values():
        if len(items) < 2:
            continue
        items.sort()
        n = len(items)
        for i in range(n):
            ci, xi, yi, ii = items[i]
            for j in range(i + 1, n):
                cj, xj, yj, ij = items[j]
                if cj - ci >= H:
                    break
                wx, wy = xj - xi, yj - yi
                if abs(bx * wy - by * wx) >= H or abs(sx * wy - sy * wx) >= H:
                    continue
                a, b = piece(ii), piece(ij)
                if a is not None and b is not None and convex_overlap(a, b):
                    return False
    return True

