import numpy as np
import pytest

from momentum_lab.errors import DimensionMismatch
from momentum_lab.kostant import (
    coverage_gap, parse_a_coords, sample_compact, verify_kostant, verify_leaf_equality, weyl_orbit,
    write_points_csv,
)
from momentum_lab.geomcone import convex_hull
from momentum_lab.leaf import Leaf
from momentum_lab.liecore import make_family


def test_sample_compact_contract():
    fam = make_family("sl3r")
    k = sample_compact(fam, 1, seed=3)
    assert k.shape == (1, 3, 3) and np.abs(k[0] @ k[0].T - np.eye(3)).max() <= 1e-12
    a = sample_compact(fam, 25_000, seed=9)
    b = sample_compact(fam, 25_000, seed=9)
    assert np.array_equal(a, b)
    assert np.allclose(np.linalg.det(a), 1.0)
    assert abs(a[:10_000, 0, 0].mean()) <= 0.05


def test_weyl_orbit_examples():
    assert np.allclose(sorted(weyl_orbit(make_family("sl2r"), [1.0])[:, 0]), [-1.0, 1.0], atol=1e-14)
    assert len(weyl_orbit(make_family("sl3r"), parse_a_coords(make_family("sl3r"), [1, 0, -1]))) == 6
    assert len(weyl_orbit(make_family("sl3r"), parse_a_coords(make_family("sl3r"), [1, 1, -2]))) == 3


def test_parse_coords():
    fam = make_family("sl3r")
    assert np.allclose(parse_a_coords(fam, [1, 0, -1]), [1, 0])
    assert np.allclose(parse_a_coords(fam, [1, 0]), [1, 0])
    with pytest.raises(DimensionMismatch):
        parse_a_coords(fam, [1, 1, 1])
    with pytest.raises(DimensionMismatch):
        parse_a_coords(make_family("so14"), [1, 2])


def test_so14_containment():
    r = verify_kostant("so14", [0.8], 10_000, seed=1)
    assert r.containment_max_violation <= 1e-9 and r.passed


def test_sl4_containment_and_vertices():
    r = verify_kostant("sl4r", [0.6, 0.2, -0.2], 5_000, seed=2)
    assert r.containment_max_violation <= 1e-9
    assert max(r.vertex_errors.values()) <= 1e-9
    assert len(r.orbit) == 24


def test_report_determinism():
    a = verify_kostant("sl3r", [1, 0, -1], 2_000, seed=4).to_dict()
    b = verify_kostant("sl3r", [1, 0, -1], 2_000, seed=4).to_dict()
    assert a == b


def test_weyl_invariance_of_image():
    fam = make_family("sl3r")
    from momentum_lab.kostant import iwasawa_image
    from momentum_lab.liecore import weyl_group
    from momentum_lab.numkit import mat_exp

    ks = sample_compact(fam, 20_000, seed=5)
    g = mat_exp(fam.a_matrix([1.0, 0.0]))
    base = convex_hull(iwasawa_image(fam, ks, g))
    from momentum_lab.geomcone import hausdorff
    for kw in weyl_group(fam).representatives:
        moved = convex_hull(iwasawa_image(fam, kw @ ks, g))
        assert hausdorff(base, moved) <= 0.1


def test_coverage_gap_detects_holes():
    hull = convex_hull([[-1.0], [1.0]])
    pts = np.linspace(-1, 1, 401)
    assert coverage_gap(hull, pts, 0.01) <= 0.01
    assert coverage_gap(hull, pts[pts < 0], 0.01) >= 0.8


def test_leaf_equality_examples():
    r = verify_leaf_equality(Leaf.create("sl2c", [1.0]), 10_000)
    assert r.passed
    assert verify_leaf_equality(Leaf.create("sl2c", [0.0]), 100).hausdorff <= 1e-12
    r = verify_leaf_equality(Leaf.create("so5c", [0.5]), 100_000)
    assert r.passed


def test_points_csv(tmp_path):
    path = tmp_path / "p.csv"
    write_points_csv(path, np.array([[0.1, 0.2], [1 / 3, -1.0]]))
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2"
    assert float(lines[2].split(",")[0]) == 1 / 3
