import random
from fractions import Fraction

import pytest

from gammapersist.barcodes1d import Barcode, GradedBarcode, Interval, hom_dim, psi_stalk_rank
from gammapersist.cellular1d import (
    CriticalGrid,
    ZigzagModule,
    decompose,
    decompose_graded,
    dualize,
    dualize_modules,
    euler_characteristic_c,
    ext_dims,
    from_barcode,
    gammafy,
    gammafy_modules,
    global_sections,
    module_from_barcode,
    resolution_length,
    sheaf_hom,
    tensor,
)
from gammapersist.foundations import Field, Matrix

from oracles import rank_oracle_barcode
from random_cases import random_barcode, random_graded, random_interval, random_module

G = GradedBarcode.single
I = Interval.parse
F2 = Field.F2


def test_constant_sheaf_model():
    z = from_barcode(G("(-inf,+inf)"))[0]
    assert set(z.dims) == {1}


def test_skyscraper_model():
    z = from_barcode(G("{0}"))[0]
    assert z.dims == (0, 1, 0)


def test_model_dims_count_bars_over_cells():
    b = GradedBarcode.from_bars([(I("[0,1)"), 0), (I("[0,2)"), 0)])
    z = from_barcode(b)[0]
    assert z.grid.values == (0, 1, 2)
    for c in range(z.n_cells):
        assert z.dims[c] == psi_stalk_rank(b[0], z.grid.cell_sample(c))
    assert z.dims == (0, 2, 2, 1, 1, 0, 0)


def test_decompose_examples():
    assert decompose(from_barcode(G("[0,2)"))[0]) == Barcode.of(["[0,2)"])
    e, zero = Matrix.identity(F2, 1), Matrix.zeros(F2, 0, 1)
    z = ZigzagModule(CriticalGrid.of([0, 1]), (0, 1, 1, 1, 0), (zero, e), (e, zero), F2)
    assert decompose(z) == Barcode.of(["[0,1]"])
    null = Matrix.zeros(F2, 1, 1)
    z = ZigzagModule(CriticalGrid.of([0]), (1, 1, 1), (null,), (null,), F2)
    assert decompose(z) == Barcode.of(["(-inf,0)", "{0}", "(0,+inf)"])


@pytest.mark.parametrize("field", [Field.F2, Field.Q])
def test_round_trip_random(field):
    rng = random.Random(1)
    for _ in range(150):
        b = random_barcode(rng, 12)
        assert decompose(module_from_barcode(b, field=field)) == b


def test_decompose_matches_rank_oracle_f2():
    rng = random.Random(4)
    for _ in range(60):
        z = random_module(rng, 4, 3)
        assert decompose(z) == rank_oracle_barcode(z)


def test_decompose_matches_rank_oracle_q():
    rng = random.Random(9)
    for _ in range(30):
        z = random_module(rng, 3, 3, field=Field.Q)
        assert decompose(z) == rank_oracle_barcode(z)


def test_refine_preserves_barcode():
    rng = random.Random(6)
    for _ in range(40):
        z = random_module(rng, 3, 3)
        finer = z.grid.union(CriticalGrid.of([Fraction(1, 2), Fraction(-7, 3)]))
        assert decompose(z.refine(finer)) == decompose(z)


def test_module_json_round_trip():
    rng = random.Random(8)
    for _ in range(40):
        z = random_module(rng, 3, 3)
        assert ZigzagModule.from_json(z.to_json()) == z


def test_tensor_examples():
    assert tensor(G("[0,2)"), G("[1,3)")) == G("[1,2)")
    g = GradedBarcode.from_bars([(I("(0,3]"), 0), (I("{1}"), 1)])
    assert tensor(G("(-inf,+inf)"), g) == g
    assert tensor(G("[0,1)"), G("[1,2)")).is_zero()


def test_sheaf_hom_examples():
    assert sheaf_hom(G("[0,+inf)"), G("(-inf,0)")).blocks[(0, 0)] == (0, 1)
    assert sheaf_hom(G("[0,2)"), G("[1,3)")).blocks[(0, 0)] == (1, 0)
    assert sheaf_hom(G("(0,1]"), G("(0,1]")).blocks[(0, 0)][0] >= 1


def test_hom_from_cellular_model_matches_interval_rule():
    rng = random.Random(12)
    for _ in range(400):
        i, j = random_interval(rng), random_interval(rng)
        assert sheaf_hom(G(i), G(j)).blocks[(0, 0)][0] == hom_dim(i, j), (i, j)


def test_ext_vanishes_above_one():
    rng = random.Random(13)
    for _ in range(100):
        z = random_module(rng, 4, 3)
        assert resolution_length(z) <= 1
        f, g = random_graded(rng, 3), random_graded(rng, 3)
        assert sheaf_hom(f, g).ext_higher == 0


def test_ext_dims_additive():
    rng = random.Random(14)
    for _ in range(60):
        a, b, c = (random_interval(rng) for _ in range(3))
        grid = CriticalGrid(tuple(sorted({*a.finite_endpoints(), *b.finite_endpoints(), *c.finite_endpoints()})))
        ma = module_from_barcode(Barcode.of([a]), grid, F2)
        mbc = module_from_barcode(Barcode.of([b, c]), grid, F2)
        mb = module_from_barcode(Barcode.of([b]), grid, F2)
        mc = module_from_barcode(Barcode.of([c]), grid, F2)
        x, y = ext_dims(ma, mb), ext_dims(ma, mc)
        assert ext_dims(ma, mbc) == (x[0] + y[0], x[1] + y[1])


def test_dualize_examples():
    assert dualize(G("[-1,1]")) == G("(-1,1)", -1)
    assert dualize(G("(-inf,0]"), "D_prime") == G("(-inf,0)")


def test_double_dual_is_identity():
    rng = random.Random(15)
    for _ in range(200):
        f = random_graded(rng, 4, degrees=(-1, 0, 1))
        assert dualize(dualize(f)) == f


def test_bar_by_bar_dual_matches_module_dual():
    rng = random.Random(16)
    for _ in range(60):
        f = random_graded(rng, 5)
        assert dualize_modules(from_barcode(f)) == dualize(f)


def test_global_sections_examples():
    assert global_sections(G("[0,1]"), "RGamma_c") == {0: 1}
    assert global_sections(G("[0,1)"), "RGamma_c") == {}
    assert global_sections(G("(0,1)"), "RGamma_c") == {1: 1}
    assert global_sections(G("(-inf,+inf)"), "RGamma") == {0: 1}


def test_compact_euler_characteristic_matches_sections():
    rng = random.Random(17)
    for _ in range(200):
        f = random_graded(rng, 4, degrees=(0, 1))
        dims = global_sections(f, "RGamma_c")
        chi = sum((-1) ** (d % 2) * n for d, n in dims.items())
        assert chi == euler_characteristic_c(f)


def test_gammafy_examples():
    assert gammafy(G("[0,1)")) == G("[0,1)")
    assert gammafy(GradedBarcode()).is_zero()
    # stalk at x is the colimit of sections over (-inf, t), t -> x+
    assert gammafy(G("(0,1)")) == G("[1,+inf)", 1)


def test_gammafy_output_is_gamma_and_idempotent():
    rng = random.Random(18)
    for _ in range(200):
        f = random_graded(rng, 4)
        g = gammafy(f)
        assert g.is_gamma
        assert gammafy(g) == g


def test_gammafy_bar_rule_matches_module_computation():
    rng = random.Random(19)
    for _ in range(60):
        f = random_graded(rng, 5)
        assert gammafy_modules(from_barcode(f)) == gammafy(f)


def test_graded_decomposition_round_trip():
    rng = random.Random(20)
    for _ in range(100):
        f = random_graded(rng, 6, degrees=(-1, 0, 2))
        assert decompose_graded(from_barcode(f)) == f
