import random
from fractions import Fraction

import pytest

from gammapersist.barcodes1d import GradedBarcode, Interval
from gammapersist.foundations import POS_INF, DomainError, ExtRat
from gammapersist.pipeline import (
    MeshFunction,
    PointCloud,
    SimplicialMesh,
    betti_at,
    distance_function,
    perturb,
    pl_approximate,
    random_pl_function,
    stability_experiment,
    stability_trials,
    sublevel_persistence,
    support_corner,
)

from persistence_oracle import betti, oracle_barcode

QUARTERS = [Fraction(k, 4) for k in range(-8, 21)]


def two_points():
    mesh = SimplicialMesh.interval(QUARTERS)
    return distance_function(PointCloud(((0,), (3,))), mesh)


def annulus():
    xs = range(-4, 5)
    cloud = PointCloud(tuple((x, y) for x in range(-2, 3) for y in range(-2, 3) if max(abs(x), abs(y)) == 2))
    return distance_function(cloud, SimplicialMesh.grid(xs, xs))


def test_distance_function_examples():
    f = two_points()
    assert f(1) == 1
    g = distance_function(PointCloud(((0,),)), SimplicialMesh.interval(QUARTERS))
    assert all(g(x) == abs(x) for x in QUARTERS)
    w = distance_function(PointCloud(((0,),), (2,)), SimplicialMesh.interval(QUARTERS))
    assert all(w(x) == abs(x) / 2 for x in QUARTERS)


def test_distance_function_errors():
    mesh = SimplicialMesh.interval([0, 1])
    with pytest.raises(DomainError):
        distance_function(PointCloud(()), mesh)
    with pytest.raises(DomainError):
        distance_function(PointCloud(((0,),)), mesh, "l3")
    with pytest.raises(DomainError):
        distance_function(PointCloud(((5,),), (0,)), mesh)


def test_metrics_on_a_grid():
    mesh = SimplicialMesh.grid([0, 1, 2], [0, 1, 2])
    cloud = PointCloud(((0, 0),))
    corner = mesh.vertices.index((2, 2))
    assert distance_function(cloud, mesh, "linf").values[corner] == 2
    assert distance_function(cloud, mesh, "l1").values[corner] == 4
    assert distance_function(cloud, mesh, "l2sq").values[corner] == 8


def test_csv_parsing():
    cloud = PointCloud.parse_csv("x,y\n0,0\n1/2,0.25\n")
    assert cloud.points == ((0, 0), (Fraction(1, 2), Fraction(1, 4)))
    weighted = PointCloud.parse_csv("0,w=2\n1,w=1/2\n")
    assert weighted.weights == (2, Fraction(1, 2))


def test_two_point_barcode():
    b = sublevel_persistence(two_points())
    assert b == GradedBarcode.from_bars([(Interval.gamma_bar(0, "+inf"), 0), (Interval.gamma_bar(0, Fraction(3, 2)), 0)])
    assert b == oracle_barcode(two_points())


def test_disk_is_contractible():
    xs = range(-3, 4)
    f = distance_function(PointCloud(((0, 0),)), SimplicialMesh.grid(xs, xs))
    assert sublevel_persistence(f) == GradedBarcode.single(Interval.gamma_bar(0, "+inf"))


def test_annulus_has_one_loop():
    b = sublevel_persistence(annulus())
    assert len(b[1]) == 1
    assert b[1].intervals()[0] == Interval.gamma_bar(0, 2)
    assert b == oracle_barcode(annulus())


def test_random_grid_functions_match_oracle():
    rng = random.Random(51)
    mesh = SimplicialMesh.grid(range(4), range(4))
    for _ in range(25):
        f = random_pl_function(mesh, rng, scale=3, den=1)
        b = sublevel_persistence(f)
        assert b == oracle_barcode(f)
        assert b.is_gamma
        for t in sorted(set(f.values)):
            assert betti_at(b, t) == betti(f, t)
        assert min(i.lower for i, _ in b.bars()) >= ExtRat.of(min(f.values))


def test_non_compact_declaration_rejected():
    f = MeshFunction(SimplicialMesh.interval([0, 1]), (0, 1), compact_sublevels=False)
    with pytest.raises(DomainError):
        sublevel_persistence(f)


def test_stability_examples():
    f = two_points()
    shifted = MeshFunction(f.mesh, tuple(v + Fraction(1, 10) for v in f.values))
    rep = stability_experiment(f, shifted, with_distance=True)
    assert rep.epsilon == Fraction(1, 10) and rep.decision is True
    assert rep.upper <= ExtRat.of(Fraction(1, 10))
    same = stability_experiment(f, f, with_distance=True)
    assert same.epsilon == 0 and same.upper == ExtRat.of(0)
    other = MeshFunction(SimplicialMesh.interval([0, 1]), (0, 0))
    with pytest.raises(DomainError):
        stability_experiment(f, other)


def test_random_stability_trials():
    for eps in (Fraction(1, 10), Fraction(1, 4)):
        reports = stability_trials(20, eps, seed=52)
        assert all(r.passed for r in reports)
        assert all(r.epsilon <= eps for r in reports)


def test_perturbation_bound():
    rng = random.Random(53)
    mesh = SimplicialMesh.interval(range(10))
    f = random_pl_function(mesh, rng)
    assert perturb(f, Fraction(1, 3), rng).sup_distance(f) <= Fraction(1, 3)


def test_pl_approximation():
    assert pl_approximate(abs, [-2, 0, 2], Fraction(1, 4)).refinements == 0
    assert pl_approximate(lambda x: x * x, [-2, 2], 100).refinements == 0
    approx = pl_approximate(lambda x: abs(x * x - 1), [-2, 2], Fraction(1, 4))
    g = approx.function
    fine = [Fraction(k, 64) for k in range(-128, 129)]
    # every piece is quadratic between dyadic vertices, so the worst error sits at a midpoint
    assert max(abs(g(x) - abs(x * x - 1)) for x in fine) <= Fraction(1, 4)
    assert approx.max_error <= Fraction(1, 4)
    with pytest.raises(DomainError):
        pl_approximate(abs, [0, 1], 0)


def test_approximation_is_close_in_barcodes():
    approx = pl_approximate(lambda x: x * x, [-2, 2], Fraction(1, 4))
    fine = SimplicialMesh.interval(sorted(v[0] for v in approx.function.mesh.vertices))
    assert approx.function.mesh == fine
    assert sublevel_persistence(approx.function) == GradedBarcode.single(Interval.gamma_bar(0, "+inf"))


def test_support_corner_bounds_two_parameter_values():
    rng = random.Random(54)
    mesh = SimplicialMesh.grid(range(3), range(3))
    f1, f2 = random_pl_function(mesh, rng), random_pl_function(mesh, rng)
    y = support_corner([f1, f2])
    assert all(a >= y[0] and b >= y[1] for a, b in zip(f1.values, f2.values))


def test_mesh_json_shortcuts():
    assert SimplicialMesh.from_json({"interval": [0, 1, 2]}) == SimplicialMesh.interval([0, 1, 2])
    g = SimplicialMesh.grid([0, 1], [0, 1])
    assert SimplicialMesh.from_json(g.to_json()) == g
    f = two_points()
    assert MeshFunction.from_json(f.to_json()) == f
    assert POS_INF == sublevel_persistence(f).bars()[-1][0].upper
