import numpy as np
import pytest
from gmpy2 import mpq

from improj.geometry import (
    IN,
    OUT,
    UNCERTAIN,
    Raster,
    components,
    convexity_check,
    parse_box,
    raster_amoeba,
    raster_coamoeba,
    raster_improj,
    raster_json,
    read_pgm,
    to_image,
    write_pgm,
)
from improj.oracle import State, member
from improj.parse import parse

from corpus import CORPUS_2D


def test_parse_box_forms():
    assert parse_box("-4:4,-1/2:3") == ((mpq(-4), mpq(4)), (mpq(-1, 2), mpq(3)))
    assert parse_box("0:1", 3) == ((mpq(0), mpq(1)),) * 3
    assert parse_box([(-1, 1), ("0", "2")]) == ((mpq(-1), mpq(1)), (mpq(0), mpq(2)))


@pytest.mark.parametrize("box,n", [("1:1,0:1", None), ("2:1", None), ("0:1:2", None), ("0:1,0:1", 3)])
def test_parse_box_errors(box, n):
    with pytest.raises(ValueError):
        parse_box(box, n)


def test_sphere_has_a_central_hole():
    r = raster_improj(parse("z1^2+z2^2+1"), "-2:2,-2:2", 40)
    assert r.meta["methods"] == ["quadric(iv)"]
    # cells well inside the unit disk are Out, cells well outside are In
    assert r.cells[20, 20] == OUT and r.cells[19, 19] == OUT
    assert r.cells[0, 0] == IN and r.cells[39, 20] == IN
    rep = components(r)
    assert rep.count == 1 and rep.bounded == 1
    assert rep.components[0].convexity.status == "Pass"


def test_hyperbola_complement_has_four_cones():
    r = raster_improj(parse("z1^2-z2^2-1"), "-3:3,-3:3", 60)
    # the y1-axis is Out; the y2-axis is In only for |y2| <= 1
    assert r.cells[5, 30] == OUT and r.cells[54, 30] == OUT
    assert r.cells[30, 5] == OUT and r.cells[30, 33] == IN
    rep = components(r)
    assert rep.count == 4 and rep.unbounded == 4
    assert all(c.convexity.status == "Pass" for c in rep.components)


def test_constant_is_all_out():
    r = raster_improj(parse("1").extend(2), "-1:1,-1:1", 10)
    assert r.counts() == {"in": 0, "out": 100, "uncertain": 0}
    assert components(r).count == 1


def test_cells_agree_with_oracle():
    f = parse("z1*z2 - 2*z1 + 3*z2 + 1/2")
    r = raster_improj(f, "-2:2,-2:2", 12)
    step = mpq(4, 12)
    for i in range(12):
        for j in range(12):
            y = (-2 + step * (2 * i + 1) / 2, -2 + step * (2 * j + 1) / 2)
            v = member(f, y)
            if r.cells[i, j] == OUT:
                assert v.state is State.OUT
            elif v.state is State.OUT:
                # only the boundary trace may mark an Out centre as In
                assert r.cells[i, j] == IN


def test_factor_list_is_union():
    fs = [parse("z1+i").extend(2), parse("z2-2")]
    r = raster_improj(fs, "-2:2,-2:2", 20)
    a = raster_improj(fs[0], "-2:2,-2:2", 20).cells
    b = raster_improj(fs[1], "-2:2,-2:2", 20).cells
    assert np.array_equal(r.cells == IN, (a == IN) | (b == IN))


def test_raster_input_errors():
    with pytest.raises(ValueError):
        raster_improj([], "0:1", 4)
    with pytest.raises(ValueError):
        raster_improj([parse("z1+i"), parse("z1+z2")], "0:1", 4)
    with pytest.raises(ValueError):
        raster_improj(parse("z1+i"), "0:1", 4)
    with pytest.raises(ValueError):
        raster_improj(parse("z1+z2"), "0:1", 0)


def test_worker_count_does_not_change_pointwise_raster():
    f = parse("z1^2*z2^2 - z1 + z2 - 1")
    one = raster_improj(f, "-2:2,-2:2", 16, workers=1)
    three = raster_improj(f, "-2:2,-2:2", 16, workers=3)
    assert one.digest() == three.digest()


def test_three_dimensional_raster():
    r = raster_improj(parse("z1^2+z2^2+z3^2+1"), "-2:2", 12)
    assert r.cells.shape == (12, 12, 12)
    rep = components(r)
    assert rep.count == 1 and rep.bounded == 1 and rep.connectivity == 6
    assert to_image(r).shape == (144, 12)


def test_convexity_check():
    yy, xx = np.mgrid[:40, :40]
    disk = (xx - 20) ** 2 + (yy - 20) ** 2 < 150
    assert convexity_check(disk).status == "Pass"
    u = np.zeros((40, 40), dtype=bool)
    u[5:35, 5:10] = u[5:35, 30:35] = u[30:35, 5:35] = True
    c = convexity_check(u)
    assert c.status == "Fail"
    a, b, mid = c.witness
    assert u[a] and u[b] and not u[mid]
    single = np.zeros((5, 5), dtype=bool)
    single[2, 2] = True
    assert convexity_check(single).status == "Pass"


def test_fragments_are_filtered():
    cells = np.full((6, 6), IN, dtype=np.uint8)
    cells[0, 0] = OUT
    cells[3:5, 3:5] = OUT
    cells[2, 2] = UNCERTAIN
    r = Raster(parse_box("0:1,0:1"), (6, 6), cells)
    rep = components(r)
    assert rep.count == 1 and rep.fragments == 1 and rep.uncertain_cells == 1
    assert rep.components[0].bounded_estimate
    assert components(r, min_cells=1).count == 2
    doc = rep.to_json()
    assert doc["totals"] == {"count": 1, "bounded": 1, "unbounded": 0}


@pytest.mark.parametrize("text", CORPUS_2D)
def test_corpus_components_are_convex(text):
    # pointwise rasters miss In bands thinner than a cell, which can merge
    # neighbouring components; this box keeps every corpus band resolved
    r = raster_improj(parse(text), "-2:2,-2:2", 80)
    rep = components(r)
    assert r.counts()["uncertain"] == 0
    assert all(c.convexity.status == "Pass" for c in rep.components), text


def test_pgm_round_trip(tmp_path):
    cells = np.array([[IN, OUT], [UNCERTAIN, IN], [OUT, OUT]], dtype=np.uint8)
    r = Raster(parse_box("0:1,0:1"), (3, 2), cells)
    path = tmp_path / "r.pgm"
    write_pgm(r, path)
    img = read_pgm(path)
    assert img.shape == (2, 3)
    assert np.array_equal(img, to_image(r))
    # y2 increases upwards: the bottom row is y2 index 0
    assert np.array_equal(img[-1], cells[:, 0])
    assert set(np.unique(img)) == {IN, OUT, UNCERTAIN}


def test_read_pgm_rejects_other_formats(tmp_path):
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ValueError):
        read_pgm(p)


def test_raster_json_fields():
    r = raster_improj(parse("z1+z2+i"), "-1:1,-1:1", 4)
    doc = raster_json(r)
    assert doc["resolution"] == [4, 4]
    assert doc["sha256"] == r.digest()
    assert sum(doc["counts"].values()) == 16


def test_amoeba_of_line_has_three_complement_components():
    r = raster_amoeba(parse("z1+z2+1"), "-4:4,-4:4", 80, seed=1)
    rep = components(r, min_cells=10)
    assert rep.count == 3 and rep.unbounded == 3
    assert all(c.convexity.status == "Pass" for c in rep.components)


def test_amoeba_and_coamoeba_of_binomial_are_diagonals():
    f = parse("z1-z2")
    am = raster_amoeba(f, "-2:2,-2:2", 40, samples=4000, seed=2)
    hit = np.argwhere(am.cells == IN)
    assert len(hit) and np.all(np.abs(hit[:, 0] - hit[:, 1]) <= 1)
    co = raster_coamoeba(f, 40, samples=4000, seed=2)
    hit = np.argwhere(co.cells == IN)
    assert len(hit) and np.all(np.abs(hit[:, 0] - hit[:, 1]) <= 1)


def test_amoeba_input_errors():
    with pytest.raises(ValueError):
        raster_amoeba(parse("z1*z2"))
    with pytest.raises(ValueError):
        raster_amoeba(parse("z1+z2+z3"))


def test_amoeba_is_reproducible():
    f = parse("z1^2+z2+1")
    a = raster_amoeba(f, "-3:3,-3:3", 30, samples=3000, seed=5)
    b = raster_amoeba(f, "-3:3,-3:3", 30, samples=3000, seed=5)
    assert a.digest() == b.digest()
