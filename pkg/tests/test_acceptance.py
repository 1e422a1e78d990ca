"""End-to-end acceptance checks, one test per criterion.

Each check returns ``(ok, detail)``; the result is recorded so the terminal
summary prints one PASS/FAIL line per criterion.  Run this file directly with
``python3 tests/test_acceptance.py`` to get the same lines without pytest.
"""

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_report import RESULTS  # noqa: E402
from lemma_suite import run_suite  # noqa: E402
from oracles import rank_oracle_barcode  # noqa: E402
from persistence_oracle import oracle_barcode  # noqa: E402
from random_cases import random_barcode, random_graded, random_module  # noqa: E402
from stratify_cases import random_spec  # noqa: E402

from gammapersist.barcodes1d import GradedBarcode, Interval, hom_dim  # noqa: E402
from gammapersist.cellular1d import decompose, dualize, module_from_barcode, sheaf_hom  # noqa: E402
from gammapersist.convolution1d import convolve, distance_bounds, kernel  # noqa: E402
from gammapersist.foundations import ExtRat  # noqa: E402
from gammapersist.gamma_geometry import Cone, HPolyhedron, z_to_omega  # noqa: E402
from gammapersist.pipeline import (  # noqa: E402
    PointCloud,
    SimplicialMesh,
    distance_function,
    stability_trials,
    sublevel_persistence,
)
from gammapersist.stratify_nd import (  # noqa: E402
    Arrangement,
    Hyperplane,
    PLGammaSheafSpec,
    hom_dim_nd,
    quadrant_fixture,
    stratify,
    validate_stratification,
)

G = GradedBarcode.single
HALF = Fraction(1, 2)


def criterion_1():
    rng = random.Random(1001)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        b = random_barcode(rng, 20, lo=-2, hi=2, den=4)
        bad += decompose(module_from_barcode(b)) != b
    elapsed = time.perf_counter() - start
    return bad == 0 and elapsed < 10, f"1000 round trips, {bad} mismatches, {elapsed:.1f}s (limit 10s)"


def criterion_2():
    rng = random.Random(1002)
    bad = 0
    for _ in range(200):
        z = random_module(rng, 6, 4)
        bad += decompose(z) != rank_oracle_barcode(z)
    return bad == 0, f"200 F2 modules against the rank oracle, {bad} mismatches"


def criterion_3():
    rng = random.Random(1003)
    nonzero = 0
    for _ in range(500):
        f, g = random_graded(rng, 2, degrees=(0, 1)), random_graded(rng, 2, degrees=(0, 1))
        nonzero += sheaf_hom(f, g).ext_higher != 0
    ext1 = sheaf_hom(G("[0,+inf)"), G("(-inf,0)")).blocks[(0, 0)]
    ok = nonzero == 0 and ext1 == (0, 1)
    return ok, f"500 pairs with higher Ext, {nonzero} nonzero; Hom/Ext1 of [0,+inf),(-inf,0) = {ext1}"


def criterion_4():
    radii = [-2, -1, -HALF, 0, HALF, 1, 2]
    bad = [(a, b) for a, b in itertools.product(radii, radii) if convolve(kernel(a), kernel(b)) != kernel(a + b)]
    return not bad, f"49 kernel products, failing pairs {bad}"


def criterion_5():
    rng = random.Random(1005)
    bad = 0
    for _ in range(100):
        f = random_graded(rng, 3, degrees=(0, 1))
        for a in (HALF, 1, 2):
            bad += dualize(convolve(kernel(a), f)) != convolve(kernel(-a), dualize(f))
    return bad == 0, f"300 duality intertwining checks, {bad} failures"


def criterion_6():
    fixtures = []
    d = distance_bounds(G("[0,2]"), G("[0,3]"))
    fixtures.append((d.lower, d.upper) == (ExtRat.of(1), ExtRat.of(1)))
    fixtures.append(distance_bounds(G("[-1,1]"), G("{0}")).upper <= ExtRat.of(1))
    fixtures.append(distance_bounds(kernel(-1), kernel(0)).upper <= ExtRat.of(1))
    f = random_graded(random.Random(1006), 3)
    d = distance_bounds(f, f)
    fixtures.append((d.lower, d.upper) == (ExtRat.of(0), ExtRat.of(0)))
    rng = random.Random(1106)
    broken = 0
    for _ in range(100):
        f, g, h = (random_graded(rng, 2) for _ in range(3))
        fg, gh, fh = distance_bounds(f, g), distance_bounds(g, h), distance_bounds(f, h)
        broken += not fh.lower <= fg.upper + gh.upper
    ok = all(fixtures) and broken == 0
    return ok, f"fixtures {sum(fixtures)}/{len(fixtures)}, triangle violations {broken}/100"


def criterion_7():
    start = time.perf_counter()
    counts = {}
    for eps in (Fraction(1, 10), Fraction(1, 4)):
        reports = stability_trials(100, eps, vertices=64, seed=1007)
        counts[str(eps)] = sum(r.passed and r.epsilon <= eps for r in reports)
    elapsed = time.perf_counter() - start
    ok = all(c == 100 for c in counts.values()) and elapsed < 60
    return ok, f"passing trials per eps {counts}, {elapsed:.1f}s (limit 60s)"


def criterion_8():
    instances, checks, failures = run_suite(200, 100, seed=1008)
    return not failures, f"{instances} instances, {checks} checks, {len(failures)} failures {failures[:3]}"


def _spec_ok(spec):
    s = stratify(spec)
    rep = validate_stratification(s, spec.support, spec.cone)
    interiors = all(z.interior().equals(w) and z_to_omega(z, spec.cone).equals(w) for z, w in zip(s.strata, s.cells))
    return rep.ok and interiors


def criterion_9():
    quadrant = Cone.negative_orthant(2)
    H = Hyperplane
    box_lines = Arrangement(2, (H((1, 0), 0), H((1, 0), 1), H((0, 1), 0), H((0, 1), 1)))
    half_plane = HPolyhedron.from_halfspaces(2, [((-1, 0), 0, False)])
    fx = quadrant_fixture()
    fixtures = [
        PLGammaSheafSpec(Arrangement(2, (H((1, 0), 0),)), (half_plane,), quadrant),
        PLGammaSheafSpec(box_lines, (HPolyhedron.box([0, 0], [1, 1]),), quadrant),
        PLGammaSheafSpec(Arrangement(2, ()), (fx["A"], fx["B"], fx["C"]), fx["cone"]),
    ]
    fixed = sum(_spec_ok(s) for s in fixtures)
    rng = random.Random(1009)
    randoms = sum(_spec_ok(random_spec(rng)) for _ in range(50))
    return fixed == 3 and randoms == 50, f"fixtures {fixed}/3, random specs {randoms}/50"


def criterion_10():
    quarters = [Fraction(k, 4) for k in range(-8, 21)]
    two = distance_function(PointCloud(((0,), (3,))), SimplicialMesh.interval(quarters))
    expected = GradedBarcode.from_bars([(Interval.gamma_bar(0, "+inf"), 0), (Interval.gamma_bar(0, Fraction(3, 2)), 0)])
    two_ok = sublevel_persistence(two) == expected == oracle_barcode(two)
    xs = range(-4, 5)
    ring = PointCloud(tuple((x, y) for x in range(-2, 3) for y in range(-2, 3) if max(abs(x), abs(y)) == 2))
    ann = distance_function(ring, SimplicialMesh.grid(xs, xs))
    b = sublevel_persistence(ann)
    ann_ok = b == oracle_barcode(ann) and b[1].intervals() == [Interval.gamma_bar(0, 2)]
    return two_ok and ann_ok, f"two points {'ok' if two_ok else 'wrong'}, annulus {'ok' if ann_ok else 'wrong'}"


def criterion_11():
    ends = [Fraction(k, 2) for k in range(-4, 6)]
    bars = [(a, b) for a, b in itertools.product(ends, ends) if a < b]
    bad = 0
    for (a, b), (c, d) in itertools.product(bars, bars):
        nd = hom_dim_nd(HPolyhedron.box([a], [b], True, False), HPolyhedron.box([c], [d], True, False))
        bad += nd != hom_dim(Interval.gamma_bar(a, b), Interval.gamma_bar(c, d))
    return bad == 0, f"{len(bars) ** 2} pairs of 1-D bars, {bad} disagreements"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 12)}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = CRITERIA[number]()
    RESULTS[number] = (ok, detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, check in CRITERIA.items():
        ok, detail = check()
        failed += not ok
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
    sys.exit(1 if failed else 0)
