import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from fbmac.channel import ChannelConfig
from fbmac.classic import RateTriple, no_feedback_region, ozarow_region, rho_star
from fbmac.families import RegionName, region_generator, triple_generator
from fbmac.geometry import (
    Frontier,
    RateRegion,
    approx_subset,
    best_corner,
    contains,
    family_generator,
    from_triple,
    read_frontier_csv,
    support,
    union_frontier,
    write_frontier_csv,
    write_frontiers_svg,
)

from oracles import support_lp

UNIT = ChannelConfig(1.0, 1.0, 1.0)
rates = st.floats(0.0, 3.0)


def test_membership_examples():
    tight = from_triple(RateTriple(1.0, 1.0, 1.0))
    assert not contains(tight, (0.6, 0.6))
    assert contains(from_triple(RateTriple(1.0, 1.0, 2.0)), (1.0, 1.0))
    reg = from_triple(no_feedback_region(UNIT))
    # 0.3 + 0.3 nats exceeds the sum capacity 0.5 ln 3; the same numbers in bits fit
    assert not contains(reg, (0.3, 0.3))
    assert contains(reg, (0.3 * math.log(2), 0.3 * math.log(2)))
    assert contains(reg, (0.0, 0.0))
    assert not contains(reg, (0.4, 0.0))
    assert not contains(reg, (-1e-9, 0.1))


def test_corner_on_tolerance_boundary():
    t = no_feedback_region(UNIT)
    reg = from_triple(t)
    corner = (t.r1_max, t.rsum_max - t.r1_max)
    assert contains(reg, (corner[0] + 1e-12, corner[1]))
    assert not contains(reg, (corner[0] + 1e-10, corner[1]))


def test_support_rejects_bad_direction():
    reg = from_triple(RateTriple(1.0, 1.0, 1.5))
    with pytest.raises(ValueError):
        support(reg, (-1.0, 1.0))
    with pytest.raises(ValueError):
        support(reg, (0.0, 0.0))


@given(rates, rates, rates, st.floats(0.0, 90.0))
@example(1e-8, 0.0, 0.0, 0.0)
def test_support_matches_lp(r1, r2, rs, theta):
    t = RateTriple(r1, r2, rs)
    d = (math.cos(math.radians(theta)), math.sin(math.radians(theta)))
    if d[0] <= 0 and d[1] <= 0:
        return
    d = (max(d[0], 0.0), max(d[1], 0.0))
    want = support_lp(t, d)
    assert support(from_triple(t), d) == pytest.approx(want, abs=1e-9)
    c = best_corner(t, *d)
    assert d[0] * c[0] + d[1] * c[1] == pytest.approx(want, abs=1e-9)


def test_general_region_support():
    reg = RateRegion(((1.0, 2.0, 2.0), (3.0, 1.0, 3.0)))
    assert support(reg, (1.0, 1.0)) == pytest.approx(1.4)


def test_constant_generator_gives_one_point():
    fr = union_frontier(lambda theta: (0.2, 0.4), 181)
    assert fr.points == ((0.2, 0.4),)


def test_too_few_directions():
    with pytest.raises(ValueError):
        union_frontier(lambda th: (0.0, 0.0), 2)


def test_rectangle_union_matches_pentagon_union():
    pent = region_generator(RegionName.OZAROW, UNIT)
    rect = region_generator(RegionName.OZAROW_RECTS, UNIT)
    for theta in np.linspace(0.0, 90.0, 37):
        l1, l2 = math.cos(math.radians(theta)), math.sin(math.radians(theta))
        l1, l2 = max(l1, 0.0), max(l2, 0.0)
        a, b = pent(theta), rect(theta)
        assert l1 * a[0] + l2 * a[1] == pytest.approx(l1 * b[0] + l2 * b[1], abs=1e-12)


@given(st.lists(st.tuples(rates, rates), min_size=1, max_size=40))
def test_frontier_is_sorted_and_pareto(pts):
    fr = Frontier.from_points(pts)
    arr = fr.as_array()
    assert np.all(np.diff(arr[:, 0]) > 0)
    assert np.all(np.diff(arr[:, 1]) < 0)
    for p in pts:
        # every input point is weakly dominated by a kept point
        assert any(q[0] >= p[0] - 1e-13 and q[1] >= p[1] - 1e-13 for q in fr.points)


def test_more_directions_only_adds_points():
    gen = region_generator(RegionName.OZAROW, UNIT)
    coarse = union_frontier(gen, 46)
    fine = union_frontier(gen, 91)
    assert set(coarse.points) <= set(fine.points)
    assert approx_subset(coarse, fine, 1e-12)[0]


def test_subset_of_itself():
    fr = union_frontier(region_generator(RegionName.OZAROW, UNIT))
    assert approx_subset(fr, fr) == (True, 0.0)


def test_no_feedback_strictly_inside_ozarow():
    nf = union_frontier(triple_generator(no_feedback_region(UNIT)))
    oz = union_frontier(region_generator(RegionName.OZAROW, UNIT))
    assert approx_subset(nf, oz)[0]
    ok, worst = approx_subset(oz, nf)
    assert not ok and worst > 1e-2


def test_correlations_past_the_optimum_add_nothing():
    rs = rho_star(UNIT)
    base = union_frontier(triple_generator(ozarow_region(UNIT, rs)))
    for rho in (rs + 0.05, 0.6, 0.9):
        assert approx_subset(union_frontier(triple_generator(ozarow_region(UNIT, rho))), base, 1e-12)[0]


def test_family_generator_finds_interior_optimum():
    gen = family_generator(lambda s: RateTriple(s, 1.0 - (s - 0.3) ** 2, 10.0), 0.0, 1.0, grid=5)
    r1, r2 = gen(45.0)
    assert r1 == pytest.approx(0.8, abs=1e-6)


def test_subset_rejects_empty():
    with pytest.raises(ValueError):
        approx_subset(Frontier(()), Frontier(((0.0, 1.0),)))


def test_csv_round_trip(tmp_path):
    fr = union_frontier(region_generator(RegionName.OZAROW, UNIT), 31, label="oz")
    path = tmp_path / "f.csv"
    write_frontier_csv(fr, path)
    assert path.read_text().splitlines()[0] == "direction_deg,r1,r2"
    back = read_frontier_csv(path)
    assert len(back.points) == len(fr.points)
    assert np.allclose(back.as_array(), fr.as_array(), rtol=1e-11, atol=0)
    assert back.directions == pytest.approx(fr.directions)


def test_svg_canvas(tmp_path):
    frs = [union_frontier(triple_generator(no_feedback_region(UNIT)), label="no-fb"),
           union_frontier(region_generator(RegionName.OZAROW, UNIT), label="ozarow")]
    path = tmp_path / "f.svg"
    write_frontiers_svg(frs, path, title="unit")
    root = ET.parse(path).getroot()
    assert root.get("width") == "800" and root.get("height") == "800"
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 2
