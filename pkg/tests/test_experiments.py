import json
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import slit_torus_holonomies
from hypslit.experiments import (
    COUNT_COLUMNS,
    ExperimentError,
    _union_length,
    availability_violations,
    available_in_window,
    direction_summary,
    fit_loglog,
    fixture_tag,
    gnuplot_script,
    growth_band,
    run_bad_times,
    run_cylinder_linear,
    run_direction_tree,
    run_growth,
    run_triangle_bound,
    spearman,
    write_rows,
)
from hypslit.geometry import size_of
from hypslit.nps import BadnessConfig
from hypslit.surface import builtin

GOLDEN = json.loads((Path(__file__).parent / "fixtures" / "golden.json").read_text())


def golden(name):
    s, h = builtin(name)
    g = GOLDEN[name]
    assert g["digest"] == fixture_tag(s), "fixture was recorded on a different surface"
    return s, h, g


def test_growth_matches_oracle(slit_torus):
    s, h = slit_torus
    recs = run_growth(s, None, h, [4, 8, 16])
    for r in recs:
        assert r.count_all == sum(slit_torus_holonomies(r.L * r.L).values())


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_growth_fixture(name):
    s, h, g = golden(name)
    recs = run_growth(s, None, h, g["growth"]["grid"])
    assert [r.count_all for r in recs] == g["growth"]["count_all"]
    assert [r.count_cyl for r in recs] == g["growth"]["count_cyl"]
    assert [r.count_noninv for r in recs] == g["growth"]["count_noninv"]
    lo, hi = growth_band(recs, g["growth"]["band_k"])
    assert [f"{lo:.9g}", f"{hi:.9g}"] == g["growth"]["band"]
    for a, b in zip(recs, recs[1:]):
        assert a.count_all <= b.count_all
    for r in recs:
        assert r.count_all == r.count_inv + r.count_noninv
        assert r.count_cyl <= r.count_noninv <= r.count_all


def test_growth_rows_and_formats(slit_torus):
    s, h = slit_torus
    recs = run_growth(s, None, h, [2, 4])
    rows = [r.row(s.dim_c) for r in recs]
    text = write_rows(rows, COUNT_COLUMNS, "csv")
    assert text.splitlines()[0] == ",".join(COUNT_COLUMNS)
    assert json.loads(write_rows(rows, COUNT_COLUMNS, "json")) == rows
    with pytest.raises(ExperimentError):
        write_rows(rows, COUNT_COLUMNS, "xml")
    with pytest.raises(ExperimentError):
        run_growth(s, None, h, [])


def test_gnuplot_script():
    text = gnuplot_script("c.csv", 1, [2, 3], title="growth")
    assert "plot 'c.csv' using 1:2" in text and "using 1:3" in text


def test_cylinder_fit_small(slit_torus):
    s, h = slit_torus
    fit = run_cylinder_linear(s, None, h, [8, 16, 32, 64])
    assert fit.used == (2, 3)
    assert 0.8 <= fit.slope <= 1.2
    assert len(fit.residuals) == 2
    with pytest.raises(ExperimentError):
        run_cylinder_linear(s, None, h, [8, 16])
    with pytest.raises(ExperimentError):
        run_cylinder_linear(s, None, h, [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)])


def test_fit_loglog_exact_line():
    fit = fit_loglog([2, 4, 8, 16], [3, 6, 12, 24], points="all")
    assert fit.slope == pytest.approx(1.0)
    assert all(abs(r) < 1e-12 for r in fit.residuals)


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_triangle_fixture_prefix(name):
    s, h, g = golden(name)
    ell = size_of(s.edge(h))
    tab = run_triangle_bound(s, None, h, range(ell + 1, ell + 5))
    assert [r["count"] for r in tab.rows] == g["triangles"]["count"][:4]
    for r in tab.rows:
        assert r["implied"] <= Fraction(g["triangles"]["max_implied"])


def test_triangle_empty_range(slit_torus):
    tab = run_triangle_bound(*slit_torus[:1], None, slit_torus[1], [])
    assert tab.rows == () and tab.max_implied is None


def test_short_triangle_sizes_have_one_cylinder_at_most(hyp2):
    s, h = hyp2
    ell = size_of(s.edge(h))
    tab = run_triangle_bound(s, None, h, range(ell - 4, ell - 1))
    assert sum(r["cylinders"] for r in tab.rows) <= 1


def test_spearman_constant_is_zero():
    assert spearman([1, 2, 3], [2.0, 2.0, 2.0]) == 0.0
    assert spearman([1, 2, 3], [1.0, 2.0, 3.0]) == pytest.approx(1.0)


def test_union_length():
    F = Fraction
    assert _union_length([(F(0), F(2)), (F(1), F(3)), (F(5), F(6))], F(0), F(10)) == 4
    assert _union_length([(F(-5), F(1))], F(0), F(10)) == 1
    assert _union_length([], F(0), F(1)) == 0


def test_bad_times_tiny_m0(slit_torus):
    s, h = slit_torus
    rep = run_bad_times(s, None, h, 16, BadnessConfig(Fraction(1, 10 ** 9), Fraction(1, 4)))
    assert rep.bad_measure == 0 and rep.ratio == 0


def test_bad_times_ratio_in_unit_interval(hyp2):
    s, h = hyp2
    rep = run_bad_times(s, None, h, 16, BadnessConfig(Fraction(9, 10), Fraction(1, 2)))
    assert 0 <= rep.ratio <= 1
    assert rep.bad


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_bad_times_fixture(name):
    s, h, g = golden(name)
    cfg = BadnessConfig.default(s.dim_c)
    for T in ("4", "8", "16", "32"):
        rep = run_bad_times(s, None, h, int(T), cfg)
        assert str(rep.ratio.numerator) + "/" + str(rep.ratio.denominator) == g["bad_ratio"][T]
        assert rep.ratio <= Fraction(1, 8 * s.dim_c)


def test_bad_times_needs_large_T(hyp2):
    with pytest.raises(ExperimentError):
        run_bad_times(*hyp2[:1], None, hyp2[1], 1, BadnessConfig.default(4))


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_availability_checks_clean(name):
    s, h = builtin(name)
    _, avail = available_in_window(s, None, h, 32)
    assert avail
    assert availability_violations(s, h, 32, avail) == []


@pytest.mark.parametrize("name", ["slit-torus", "hyp2"])
def test_direction_tree_fixture(name):
    s, h, g = golden(name)
    Ls = [64, 256]
    recs = run_direction_tree(s, None, h, Ls[-1], 1)
    assert all(r.level <= s.dim_c - 2 for r in recs)
    summ = direction_summary(s, None, h, recs, Ls)
    for x in summ:
        assert x.within_bound
        assert f"{x.min_gap.numerator}/{x.min_gap.denominator}" == g["direction_min_gap"][f"{x.L.numerator}/1"]
    assert summ[1].min_gap < summ[0].min_gap


def test_direction_depth_limits(slit_torus, hyp2):
    with pytest.raises(ExperimentError):
        run_direction_tree(*slit_torus[:1], None, slit_torus[1], 16, 2)
    recs = run_direction_tree(*hyp2[:1], None, hyp2[1], 8, 2)
    assert {r.level for r in recs} == {1, 2}
