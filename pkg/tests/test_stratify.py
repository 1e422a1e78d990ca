import random

import pytest

from gammapersist.foundations import DomainError
from gammapersist.gamma_geometry import Cone, HPolyhedron, is_gamma_locally_closed, z_to_omega
from gammapersist.stratify_nd import (
    Arrangement,
    BarcodeSheafND,
    Hyperplane,
    PLGammaSheafSpec,
    Stratification,
    compose_generators,
    enumerate_cells,
    enumerate_faces,
    facet_hyperplanes,
    hom_dim_nd,
    hom_space_nd,
    pullback_linear,
    quadrant_fixture,
    stratify,
    tensor_nd,
    twisted_fixture,
    validate_stratification,
)

from geometry_cases import random_box
from stratify_cases import grid_points, random_spec, union_contains

QUADRANT = Cone.negative_orthant(2)
H = Hyperplane
BOX_LINES = Arrangement(2, (H((1, 0), 0), H((1, 0), 1), H((0, 1), 0), H((0, 1), 1)))
HALF_PLANE = HPolyhedron.from_halfspaces(2, [((-1, 0), 0, False)])


def half_open_box(lo, hi):
    return HPolyhedron.box(lo, hi, True, False)


def test_cell_counts():
    assert len(enumerate_cells(Arrangement(2, (H((1, 0), 0),)))) == 2
    assert len(enumerate_cells(Arrangement(2, (H((1, 0), 0), H((1, 0), 1))))) == 3
    cells = enumerate_cells(BOX_LINES, HPolyhedron.box([0, 0], [1, 1]))
    assert len(cells) == 1 and cells[0].equals(HPolyhedron.box([0, 0], [1, 1], False, False))


def test_faces_partition_the_plane():
    faces = enumerate_faces(BOX_LINES)
    assert len(faces) == 25
    for x in grid_points(2):
        assert sum(f.contains(x) for _, f in faces) == 1


def test_stratify_half_plane():
    s = stratify(PLGammaSheafSpec(Arrangement(2, (H((1, 0), 0),)), (HALF_PLANE,), QUADRANT))
    assert len(s) == 1 and s.strata[0].equals(HALF_PLANE)


def test_stratify_square():
    sq = HPolyhedron.box([0, 0], [1, 1])
    s = stratify(PLGammaSheafSpec(BOX_LINES, (sq,), QUADRANT))
    assert len(s) == 1 and s.strata[0].equals(half_open_box([0, 0], [1, 1]))
    assert validate_stratification(s, [sq], QUADRANT).ok


def test_stratify_empty_support():
    assert len(stratify(PLGammaSheafSpec(BOX_LINES, (), QUADRANT))) == 0


def test_stratify_rejects_incompatible_lines_and_open_support():
    with pytest.raises(DomainError):
        stratify(PLGammaSheafSpec(Arrangement(2, (H((1, -1), 0),)), (HALF_PLANE,), QUADRANT))
    with pytest.raises(DomainError):
        stratify(PLGammaSheafSpec(BOX_LINES, (HPolyhedron.box([0, 0], [1, 1], False, False),), QUADRANT))
    with pytest.raises(DomainError):
        stratify(PLGammaSheafSpec(BOX_LINES, (HALF_PLANE,), Cone.whole_space(2)))


def test_validation_catches_bad_families():
    sq = HPolyhedron.box([0, 0], [1, 1])
    dup = validate_stratification([half_open_box([0, 0], [1, 1])] * 2, [sq], QUADRANT)
    assert any("meet" in v for v in dup.violations)
    seg = HPolyhedron.from_halfspaces(2, [((1, 0), 1, True), ((-1, 0), 0, True), ((0, 1), 0, False), ((0, -1), 0, False)])
    rep = validate_stratification([seg], [seg.closure()], QUADRANT)
    assert any("locally closed" in v for v in rep.violations)
    gap = validate_stratification([half_open_box([0, 0], [1, 1])], [HPolyhedron.box([0, 0], [2, 1])], QUADRANT)
    assert any("not covered" in v for v in gap.violations)


def test_open_square_is_not_locally_closed():
    # (0,1)^2 + γ is open, but cl((0,1)^2 + γ^a) cuts out [0,1)^2, not the open square
    assert not is_gamma_locally_closed(HPolyhedron.box([0, 0], [1, 1], False, False), QUADRANT)


def test_quadrant_fixture_strata():
    f = quadrant_fixture()
    s = stratify(PLGammaSheafSpec(Arrangement(2, ()), (f["A"], f["B"], f["C"]), f["cone"]))
    assert validate_stratification(s, [f["A"], f["B"], f["C"]], f["cone"]).ok


def test_boxing_covers_the_plane():
    spec = PLGammaSheafSpec(Arrangement(2, ()), (HPolyhedron.universe(2),), QUADRANT, boxes=2)
    s = stratify(spec)
    assert len(s) == 36
    assert validate_stratification(s, [HPolyhedron.universe(2)], QUADRANT).ok
    with pytest.raises(DomainError):
        stratify(PLGammaSheafSpec(Arrangement(2, ()), (HPolyhedron.universe(2),), QUADRANT, 1, (1, 1)))


def test_random_compatible_arrangements():
    rng = random.Random(41)
    for _ in range(15):
        spec = random_spec(rng)
        s = stratify(spec)
        rep = validate_stratification(s, spec.support, spec.cone)
        assert rep.ok, rep.violations
        for z, omega in zip(s.strata, s.cells):
            assert z.interior().equals(omega)
            assert z_to_omega(z, spec.cone).equals(omega)


def test_spec_json_round_trip():
    spec = random_spec(random.Random(42))
    again = PLGammaSheafSpec.from_json(spec.to_json())
    assert len(stratify(again)) == len(stratify(spec))


def _face_oracle_hom(s, t):
    """Hom(k_S, k_T) from the face poset of the arrangement of both polytopes."""
    arr = Arrangement(2, tuple(facet_hyperplanes(s)) + tuple(facet_hyperplanes(t)))
    faces = [f for _, f in enumerate_faces(arr)]
    pts = {id(f): f.witness for f in faces}

    def where(f, p):
        return p.contains(pts[id(f)])

    def below(f, g):  # f lies in the closure of g
        return g.closure().contains(pts[id(f)])

    meet = [f for f in faces if where(f, s) and where(f, t)]
    if not meet:
        return 0
    in_s = [f for f in faces if where(f, s)]
    in_t = [f for f in faces if where(f, t)]
    closed_in_s = all(where(f, t) for f in in_s for g in meet if below(f, g))
    open_in_t = all(where(g, s) for f in meet for g in in_t if below(f, g))
    return int(closed_in_s and open_in_t)


def test_hom_examples():
    assert hom_dim_nd(half_open_box([0, 0], [2, 2]), half_open_box([1, 1], [3, 3])) == 1
    assert hom_dim_nd(half_open_box([1, 1], [3, 3]), half_open_box([0, 0], [2, 2])) == 0
    assert hom_dim_nd(half_open_box([0, 0], [1, 1]), half_open_box([2, 2], [3, 3])) == 0
    f = quadrant_fixture()
    assert hom_dim_nd(f["A"], f["A"]) == 1
    assert hom_dim_nd(f["A"], f["C"]) == 1
    assert hom_dim_nd(f["A"], f["B"]) == 0


def _hom_test_pair(rng):
    if rng.random() < 0.5:
        return random_box(2, rng), random_box(2, rng)
    # half-open boxes with a shifted partner, so both answers occur often
    lo = [rng.randint(-2, 1) for _ in range(2)]
    hi = [a + rng.randint(1, 3) for a in lo]
    step = (0, 2) if rng.random() < 0.5 else (-1, 2)
    lo2 = [a + rng.randint(step[0], min(step[1], b - a - 1)) for a, b in zip(lo, hi)]
    hi2 = [max(a + 1, b + rng.randint(*step)) for a, b in zip(lo2, hi)]
    return half_open_box(lo, hi), half_open_box(lo2, hi2)


def test_hom_matches_face_poset_oracle():
    rng = random.Random(43)
    seen = set()
    for _ in range(60):
        s, t = _hom_test_pair(rng)
        seen.add(hom_dim_nd(s, t))
        assert hom_dim_nd(s, t) == _face_oracle_hom(s, t), (s, t)
    assert seen == {0, 1}


def test_hom_space_dimension_counts_blocks():
    f = quadrant_fixture()
    a = BarcodeSheafND.of(f["A"], f["B"])
    c = BarcodeSheafND.of(f["C"])
    assert hom_space_nd(a, c).dim == 2
    assert hom_space_nd(c, a).dim == 0
    apart = BarcodeSheafND.of(half_open_box([0, 0], [1, 1]))
    assert hom_space_nd(apart, BarcodeSheafND.of(half_open_box([2, 2], [3, 3]))).dim == 0


def test_compose_generators_through_middle():
    s, t, u = half_open_box([0, 0], [3, 3]), half_open_box([1, 1], [4, 4]), half_open_box([2, 2], [5, 5])
    assert compose_generators(s, t, u)
    assert not compose_generators(s, half_open_box([4, 4], [6, 6]), u)


def test_tensor_examples_and_laws():
    sq = half_open_box([0, 0], [1, 1])
    assert tensor_nd(BarcodeSheafND.of(sq), BarcodeSheafND.of(sq)).pieces[0].region.equals(sq)
    far = BarcodeSheafND.of(half_open_box([5, 5], [6, 6]))
    assert not tensor_nd(BarcodeSheafND.of(sq), far).pieces
    prod = tensor_nd(BarcodeSheafND.of(half_open_box([0, 0], [2, 2])), BarcodeSheafND.of(half_open_box([1, 1], [3, 3])))
    assert prod.pieces[0].region.equals(half_open_box([1, 1], [2, 2]))
    rng = random.Random(44)
    pts = grid_points(3)
    for _ in range(20):
        a, b, c = (BarcodeSheafND.of(random_box(2, rng), random_box(2, rng), degree=rng.randint(0, 1)) for _ in range(3))
        ab_c, a_bc = tensor_nd(tensor_nd(a, b), c), tensor_nd(a, tensor_nd(b, c))
        ab, ba = tensor_nd(a, b), tensor_nd(b, a)
        for x in pts:
            assert ab_c.stalk_dims(x) == a_bc.stalk_dims(x)
            assert ab.stalk_dims(x) == ba.stalk_dims(x)


def test_stalks_vanish_off_the_strata():
    rng = random.Random(45)
    for _ in range(5):
        spec = random_spec(rng)
        s = stratify(spec)
        sheaf = BarcodeSheafND.of(*s.strata)
        assert sheaf.validate(spec.cone) == []
        for x in grid_points(3):
            dims = sheaf.stalk_dims(x)
            if not union_contains(spec.support, x):
                assert dims == {}
            else:
                assert dims.get(0, 0) <= 1


def test_pullbacks():
    sq = half_open_box([0, 0], [1, 1])
    ident, ok = pullback_linear([[1, 0], [0, 1]], BarcodeSheafND.of(sq), QUADRANT, QUADRANT)
    assert ident.pieces[0].region.equals(sq) and ok
    interval = HPolyhedron.box([0], [1], True, False)
    strip, ok = pullback_linear([[1, 0]], BarcodeSheafND.of(interval), QUADRANT, Cone.negative_orthant(1))
    assert strip.pieces[0].region.equals(HPolyhedron.from_halfspaces(2, [((1, 0), 1, True), ((-1, 0), 0, False)]))
    assert ok
    diag, ok = pullback_linear([[1], [1]], BarcodeSheafND.of(sq))
    assert diag.pieces[0].region.equals(interval) and ok is None


def test_sheaf_json_round_trip():
    f = quadrant_fixture()
    sheaf = BarcodeSheafND.of(f["A"], f["C"], degree=1)
    again = BarcodeSheafND.from_json(sheaf.to_json())
    assert [p.region.equals(q.region) for p, q in zip(again.pieces, sheaf.pieces)] == [True, True]


def test_twisted_fixture_pieces_are_locally_closed():
    tf = twisted_fixture()
    assert all(is_gamma_locally_closed(p, tf["cone"]) for p in tf["pieces"])


def test_stratification_serializes_roles():
    s = Stratification((half_open_box([0, 0], [1, 1]),))
    assert s.to_json()[0]["role"] == "stratum"
