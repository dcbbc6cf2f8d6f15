"""Counting experiments on slit surfaces, with plain-text reporting.

Every function here is a deterministic function of its inputs; rows come
out sorted and numbers are printed with fixed formats so that repeated runs
are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .enumeration import (
    enumerate_saddle_connections,
    simple_cylinders_containing,
    triangles_with_side_by_size,
)
from .geometry import GeometryError, rat, rat_str, sine_sq, size_of, size_of_sq
from .involution import Involution, find_involution
from .nps import (
    BadnessConfig,
    availability,
    classify_badness,
    horizontal_size,
    successions,
)
from .surface import HalfEdge, SlitSurface, Surface


class ExperimentError(GeometryError):
    """An experiment cannot produce a meaningful answer from its inputs."""


def _setup(obj, tau, beta) -> tuple:
    if isinstance(obj, SlitSurface):
        s, h = obj.surface, obj.slit if beta is None else tuple(beta)
    else:
        if beta is None:
            raise GeometryError("no slit given")
        s, h = obj, tuple(beta)
    if tau is None:
        tau = find_involution(s, h)
        if tau is None:
            raise GeometryError("surface has no involution")
    if not tau.fixes_edge(s, h):
        raise GeometryError("beta not invariant")
    return s, h, tau


def _grid(grid) -> list:
    out = sorted({rat(x) for x in grid})
    if not out:
        raise ExperimentError("grid empty")
    if out[0] <= 0:
        raise ExperimentError("grid values must be positive")
    return out


def log2(q) -> float:
    """log2 of a positive rational, accurate for huge numerators."""
    q = rat(q)
    return math.log2(q.numerator) - math.log2(q.denominator)


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.9g}"


def write_rows(rows: list, columns: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if fmt != "csv":
        raise ExperimentError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def gnuplot_script(data_file: str, x_col: int, y_cols: Sequence[int], title: str = "",
                   logscale: bool = True) -> str:
    """A gnuplot script plotting CSV columns (1-based) against each other."""
    lines = ["set datafile separator ','", "set key autotitle columnhead"]
    if title:
        lines.append(f"set title {json.dumps(title)}")
    if logscale:
        lines.append("set logscale xy 2")
    plots = [f"'{data_file}' using {x_col}:{y} with linespoints" for y in y_cols]
    lines.append("plot " + ", ".join(plots))
    return "\n".join(lines) + "\n"


def fixture_tag(s: Surface) -> str:
    """Hash tying a recorded fixture to the exact surface it came from."""
    return s.digest()


# ---------------------------------------------------------------- growth


COUNT_COLUMNS = ["L", "count_all", "count_cyl", "count_noninv", "count_inv", "beta_len",
                 "ratio_linear", "ratio_log_d3", "ratio_log_d2"]


@dataclass(frozen=True)
class CountRecord:
    L: Fraction
    count_all: int
    count_cyl: int
    count_noninv: int
    count_inv: int
    beta_len: float
    ratio_linear: float
    ratio_log: dict  # exponent k -> count / ((L/|beta|) log2(L/|beta|)^k)

    def row(self, d: int) -> dict:
        return {
            "L": rat_str(self.L),
            "count_all": self.count_all,
            "count_cyl": self.count_cyl,
            "count_noninv": self.count_noninv,
            "count_inv": self.count_inv,
            "beta_len": _fmt(self.beta_len),
            "ratio_linear": _fmt(self.ratio_linear),
            "ratio_log_d3": _fmt(self.ratio_log.get(d - 3)),
            "ratio_log_d2": _fmt(self.ratio_log.get(d - 2)),
        }


def run_growth(obj, tau: Optional[Involution], beta: HalfEdge, grid, threads: int = 1) -> list:
    """Counts of saddle connections on the slit surface with length <= L, per L.

    Connections are split into invariant and non-invariant ones, and those
    bounding a simple cylinder that contains the slit are counted
    separately; both boundaries of every such cylinder must show up in the
    enumeration.
    """
    s, h, tau = _setup(obj, tau, beta)
    grid = _grid(grid)
    top = grid[-1] * grid[-1]
    found = enumerate_saddle_connections(SlitSurface(s, h), top, threads)
    cyls = simple_cylinders_containing(SlitSurface(s, h), tau, h, top)
    d = s.dim_c
    b_sq = s.edge(h).norm_sq()
    b_len = math.sqrt(b_sq)
    out = []
    for L in grid:
        sub = found.restrict(L * L)
        keys = {c.key: c for c in sub}
        certs = [c for c in cyls if c.circumference_sq <= L * L]
        cyl_keys = set()
        for cert in certs:
            cyl_keys.add(cert.boundary.key)
            cyl_keys.add(tau.image(s, cert.boundary).key)
        n_cyl = sum(1 for k in cyl_keys if k in keys)
        if n_cyl != 2 * len(certs):
            raise ExperimentError("cylinder boundaries missing from the enumeration")
        n_inv = sum(1 for c in sub if tau.is_invariant(c))
        n = len(sub)
        x = float(L) / b_len
        ratios = {}
        for k in (d - 3, d - 2):
            lg = log2(L * L / b_sq) / 2
            if k >= 0 and (k == 0 or lg > 0):
                ratios[k] = n / (x * lg ** k)
        out.append(CountRecord(L, n, n_cyl, n - n_inv, n_inv, b_len, n / x, ratios))
    return out


def growth_band(records: list, k: int) -> tuple:
    """(min, max) of count / ((L/|beta|) log^k) over the top half of the grid."""
    vals = [r.ratio_log[k] for r in records[len(records) // 2:] if k in r.ratio_log]
    if not vals:
        raise ExperimentError("insufficient data")
    return min(vals), max(vals)


# ---------------------------------------------------------------- cylinders


@dataclass(frozen=True)
class CylinderFit:
    grid: tuple
    counts: tuple
    used: tuple  # indices of grid points in the fit
    slope: float
    intercept: float
    residuals: tuple

    def rows(self) -> list:
        return [{"L": rat_str(L), "count": n, "in_fit": int(i in self.used)}
                for i, (L, n) in enumerate(zip(self.grid, self.counts))]


def cylinder_counts(obj, tau, beta, grid) -> tuple:
    s, h, tau = _setup(obj, tau, beta)
    grid = _grid(grid)
    certs = simple_cylinders_containing(SlitSurface(s, h), tau, h, grid[-1] * grid[-1])
    return tuple(grid), tuple(sum(1 for c in certs if c.circumference_sq <= L * L) for L in grid)


def fit_loglog(grid, counts, points: str = "top") -> CylinderFit:
    """Least-squares slope of log count against log L."""
    if len(grid) < 3:
        raise ExperimentError("need at least 3 grid points")
    if points == "top":
        used = tuple(range(len(grid) // 2, len(grid)))
    elif points == "all":
        used = tuple(range(len(grid)))
    else:
        raise ExperimentError(f"unknown point selection {points!r}")
    if len(used) < 2 or any(counts[i] <= 0 for i in used):
        raise ExperimentError("insufficient data")
    xs = np.array([log2(grid[i]) for i in used])
    ys = np.array([math.log2(counts[i]) for i in used])
    slope, intercept = np.polyfit(xs, ys, 1)
    res = ys - (slope * xs + intercept)
    return CylinderFit(tuple(grid), tuple(counts), used, float(slope), float(intercept),
                       tuple(float(r) for r in res))


def run_cylinder_linear(obj, tau: Optional[Involution], beta: HalfEdge, grid,
                        points: str = "top") -> CylinderFit:
    """Log-log slope of the number of simple cylinders containing the slit."""
    if len(set(grid)) < 3:
        raise ExperimentError("need at least 3 grid points")
    g, counts = cylinder_counts(obj, tau, beta, grid)
    return fit_loglog(g, counts, points)


# ---------------------------------------------------------------- triangles


TRIANGLE_COLUMNS = ["j", "j_minus_l", "count", "implied", "cylinders"]


@dataclass(frozen=True)
class TriangleTable:
    beta_size: int
    rows: tuple  # dicts with TRIANGLE_COLUMNS, exact values
    max_implied: Optional[Fraction]
    spearman: float

    def out_rows(self) -> list:
        return [{**r, "implied": rat_str(r["implied"])} for r in self.rows]


def spearman(xs, ys) -> float:
    """Rank correlation; 0 when either side is constant."""
    if len(xs) < 2 or len(set(ys)) < 2 or len(set(xs)) < 2:
        return 0.0
    return float(stats.spearmanr(xs, ys)[0])


def run_triangle_bound(obj, tau: Optional[Involution], beta: HalfEdge, j_range) -> TriangleTable:
    """Per size j: embedded triangles over the slit with a non-invariant side of size j.

    ``implied`` is count / 2^(j - l) with l the size of the slit;
    ``cylinders`` counts the sides of size j whose parallelogram is a simple
    cylinder.
    """
    s, h, tau = _setup(obj, tau, beta)
    js = sorted(set(int(j) for j in j_range))
    ell = size_of(s.edge(h))
    if not js:
        return TriangleTable(ell, (), None, 0.0)
    bound = Fraction(4) ** (js[-1] + 1)
    ss = SlitSurface(s, h)
    search = enumerate_saddle_connections(ss, bound)
    by_j = triangles_with_side_by_size(ss, h, js, search, tau)
    cyl = {}
    for c in simple_cylinders_containing(ss, tau, h, bound):
        j = size_of_sq(c.circumference_sq)
        cyl[j] = cyl.get(j, 0) + 1
    rows = []
    for j in js:
        n = len(by_j[j])
        rows.append({"j": j, "j_minus_l": j - ell, "count": n,
                     "implied": Fraction(n) / Fraction(2) ** (j - ell), "cylinders": cyl.get(j, 0)})
    imp = [r["implied"] for r in rows]
    return TriangleTable(ell, tuple(rows), max(imp), spearman(js, [float(x) for x in imp]))


# ---------------------------------------------------------------- bad times


@dataclass(frozen=True)
class BadTimesReport:
    T: Fraction
    window: tuple
    bad_measure: Fraction
    ratio: Fraction
    available: tuple  # Availability, overlapping the window
    bad: tuple  # the bad ones among them

    def to_json(self) -> dict:
        return {
            "T": rat_str(self.T),
            "window": [rat_str(x) for x in self.window],
            "bad_measure": rat_str(self.bad_measure),
            "ratio": rat_str(self.ratio),
            "n_available": len(self.available),
            "n_bad": len(self.bad),
        }


def _union_length(intervals, lo, hi) -> Fraction:
    cut = sorted((max(a, lo), min(b, hi)) for a, b in intervals)
    total = Fraction(0)
    cur = None
    for a, b in cut:
        if a >= b:
            continue
        if cur is None or a > cur[1]:
            if cur is not None:
                total += cur[1] - cur[0]
            cur = [a, b]
        else:
            cur[1] = max(cur[1], b)
    if cur is not None:
        total += cur[1] - cur[0]
    return total


def available_in_window(obj, tau, beta, T) -> tuple:
    """All rho available at some time in [T|b|/2A, T|b|/A], and that window.

    Candidates are enumerated up to length T + A/|b|, which bounds every
    rho available in the window.
    """
    s, h, tau = _setup(obj, tau, beta)
    T = rat(T)
    b = s.edge(h)
    if b.y != 0 or b.x <= 0:
        raise GeometryError("slit must be horizontal and point right")
    A, w = s.area(), b.x
    if T < 2 * w:
        raise ExperimentError("T too small: window shorter than one availability quantum")
    lo, hi = T * w / (2 * A), T * w / A
    reach = T + A / w
    ss = SlitSurface(s, h)
    out = []
    for c in enumerate_saddle_connections(ss, reach * reach):
        c = c.canonical()
        if c.holonomy.y <= 0:
            continue
        a = availability(ss, c)
        if a is not None and a.overlaps(lo, hi):
            out.append(a)
    return (lo, hi), tuple(out)


def run_bad_times(obj, tau: Optional[Involution], beta: HalfEdge, T, cfg: BadnessConfig) -> BadTimesReport:
    """Exact measure of the times in [T|b|/2A, T|b|/A] at which some available rho is bad."""
    s, h, tau = _setup(obj, tau, beta)
    (lo, hi), avail = available_in_window(s, tau, h, T)
    A, b_sq = s.area(), s.edge(h).norm_sq()
    bad = tuple(a for a in avail if classify_badness(a, cfg, A, b_sq) == "bad")
    measure = _union_length([a.window for a in bad], lo, hi)
    return BadTimesReport(rat(T), (lo, hi), measure, measure / (hi - lo), avail, bad)


def availability_violations(s: Surface, h: HalfEdge, T, avail) -> list:
    """Check window arithmetic and the length and height bounds for each rho.

    The height bound v >= 2^l A / (T |b|), with l the horizontal size, is
    checked for sides leaving the left end of the slit with h < 0; the
    slope bound |v/h| <= 10 A / (T |b|) for those with |rho| >= |b|/2.
    """
    T = rat(T)
    A, w = s.area(), s.edge(h).x
    reach = T + A / w
    bad = []
    for a in avail:
        rho = a.rho
        if a.length * a.v != w:
            bad.append(("window length", rho.holonomy))
        if rho.len_sq > reach * reach:
            bad.append(("length bound", rho.holonomy))
        if a.from_left and a.h < 0:
            ell = horizontal_size(rho)
            if a.v * T * w < Fraction(2) ** ell * A:
                bad.append(("height bound", rho.holonomy))
            if 4 * rho.len_sq >= w * w and a.v * T * w > 10 * A * abs(a.h):
                bad.append(("slope bound", rho.holonomy))
    return bad


# ---------------------------------------------------------------- directions


DIRECTION_COLUMNS = ["level", "hol_x", "hol_y", "circumference_sq", "gap_to_slit"]


@dataclass(frozen=True)
class DirectionRecord:
    theta_proxy: tuple  # canonical holonomy (x, y)
    level: int
    gap_to_slit: Fraction  # squared sine of the angle to the slit
    circumference_sq: Fraction

    def row(self) -> dict:
        return {"level": self.level, "hol_x": rat_str(self.theta_proxy[0]),
                "hol_y": rat_str(self.theta_proxy[1]),
                "circumference_sq": rat_str(self.circumference_sq),
                "gap_to_slit": rat_str(self.gap_to_slit)}


@dataclass(frozen=True)
class DirectionSummary:
    L: Fraction
    level: int
    min_gap: Optional[Fraction]
    bound_sq: Fraction  # (10 A / (L |b|))^2

    @property
    def within_bound(self) -> bool:
        return self.min_gap is not None and self.min_gap <= self.bound_sq


def run_direction_tree(obj, tau: Optional[Involution], beta: HalfEdge, L, depth: int) -> list:
    """Directions of succession boundaries up to the given depth, all lengths <= L."""
    s, h, tau = _setup(obj, tau, beta)
    if depth < 1 or depth > s.dim_c - 2:
        raise ExperimentError(f"depth must be between 1 and {s.dim_c - 2}")
    L = rat(L)
    b = s.edge(h)
    chains = successions(s, tau, h, [(Fraction(0), L * L)] * depth, excise_leaves=False)
    out = []
    for ch in chains:
        g = ch.gammas[-1].holonomy.canonical()
        out.append(DirectionRecord((g.x, g.y), ch.level, sine_sq(g, b), ch.certs[-1].circumference_sq))
    out.sort(key=lambda r: (r.level, r.circumference_sq, r.theta_proxy))
    return out


def direction_summary(obj, tau, beta, records: list, Ls) -> list:
    s, h, _ = _setup(obj, tau, beta)
    A, b_sq = s.area(), s.edge(h).norm_sq()
    out = []
    levels = sorted({r.level for r in records})
    for L in sorted(rat(x) for x in Ls):
        for lev in levels:
            gaps = [r.gap_to_slit for r in records if r.level == lev and r.circumference_sq <= L * L]
            out.append(DirectionSummary(L, lev, min(gaps) if gaps else None,
                                        100 * A * A / (L * L * b_sq)))
    return out
