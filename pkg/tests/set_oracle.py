"""Point-membership oracle for set expressions built from polyhedra.

Sums, closures and interiors are never simplified.  Each one keeps its
existential variables and membership of a point is one feasibility problem.
Closure of a nonempty lifted polyhedron is the projection of its weakened
system.  Interior is tested by fitting a small simplex around the point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from gammapersist.exact_lp import feasible_point
from gammapersist.gamma_geometry import HPolyhedron


@dataclass(frozen=True)
class Atom:
    poly: HPolyhedron


@dataclass(frozen=True)
class Rays:
    """Nonnegative span of the given rays (dimension stored explicitly)."""

    dim: int
    rays: tuple


@dataclass(frozen=True)
class OpenRays:
    """Interior of the span of the given rays."""

    dim: int
    rays: tuple


@dataclass(frozen=True)
class Sum:
    left: object
    right: object


@dataclass(frozen=True)
class Inter:
    left: object
    right: object


@dataclass(frozen=True)
class Closure:
    inner: object


@dataclass(frozen=True)
class Interior:
    inner: object


def dim_of(e) -> int:
    if isinstance(e, Atom):
        return e.poly.dim
    if isinstance(e, (Rays, OpenRays)):
        return e.dim
    if isinstance(e, (Sum, Inter)):
        return dim_of(e.left)
    return dim_of(e.inner)


class _System:
    def __init__(self):
        self.nvars = 0
        self.rows: list[tuple[dict, Fraction, bool]] = []
        self.contradiction = False

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars - 1

    def add(self, coeffs: dict, rhs: Fraction, strict: bool):
        coeffs = {k: v for k, v in coeffs.items() if v}
        if not coeffs:
            if not ((0 < rhs) if strict else (0 <= rhs)):
                self.contradiction = True
            return
        self.rows.append((coeffs, Fraction(rhs), strict))

    def feasible(self) -> bool:
        if self.contradiction:
            return False
        if not self.rows:
            return True
        a = [[r[0].get(j, Fraction(0)) for j in range(self.nvars)] for r in self.rows]
        return feasible_point(a, [r[1] for r in self.rows], [r[2] for r in self.rows]) is not None


def _affine_dot(normal, point):
    """``normal · point`` where point coordinates are (coeffs, const)."""
    coeffs: dict = {}
    const = Fraction(0)
    for a, (cs, c0) in zip(normal, point):
        if a == 0:
            continue
        const += a * c0
        for k, v in cs.items():
            coeffs[k] = coeffs.get(k, 0) + a * v
    return coeffs, const


def _simplex(d: int):
    pts = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(d)) for i in range(d)]
    pts.append(tuple(Fraction(-1) for _ in range(d)))
    return pts


def _compile(e, point, sys: _System, weaken: bool) -> None:
    d = len(point)
    if isinstance(e, Atom):
        for h in e.poly.constraints:
            cs, c0 = _affine_dot(h.normal, point)
            sys.add(cs, h.offset - c0, h.strict and not weaken)
    elif isinstance(e, Rays):
        lams = [sys.fresh() for _ in e.rays]
        for lam in lams:
            sys.add({lam: Fraction(-1)}, Fraction(0), False)
        for i in range(d):
            cs, c0 = dict(point[i][0]), point[i][1]
            for lam, r in zip(lams, e.rays):
                cs[lam] = cs.get(lam, 0) - r[i]
            # coordinate equals the combination
            sys.add(cs, -c0, False)
            sys.add({k: -v for k, v in cs.items()}, c0, False)
    elif isinstance(e, OpenRays):
        _compile(Interior(Rays(e.dim, e.rays)), point, sys, weaken)
    elif isinstance(e, Sum):
        ys = [sys.fresh() for _ in range(d)]
        right = [({y: Fraction(1)}, Fraction(0)) for y in ys]
        left = []
        for (cs, c0), y in zip(point, ys):
            cs = dict(cs)
            cs[y] = cs.get(y, 0) - 1
            left.append((cs, c0))
        _compile(e.left, left, sys, weaken)
        _compile(e.right, right, sys, weaken)
    elif isinstance(e, Inter):
        _compile(e.left, point, sys, weaken)
        _compile(e.right, point, sys, weaken)
    elif isinstance(e, Closure):
        if is_empty(e.inner):
            sys.contradiction = True
            return
        _compile(e.inner, point, sys, True)
    elif isinstance(e, Interior):
        eps = sys.fresh()
        sys.add({eps: Fraction(-1)}, Fraction(0), not weaken)
        for s in _simplex(d):
            moved = []
            for (cs, c0), si in zip(point, s):
                cs = dict(cs)
                if si:
                    cs[eps] = cs.get(eps, 0) + si
                moved.append((cs, c0))
            _compile(e.inner, moved, sys, weaken)
    else:
        raise TypeError(e)


def is_empty(e) -> bool:
    sys = _System()
    d = dim_of(e)
    xs = [sys.fresh() for _ in range(d)]
    _compile(e, [({x: Fraction(1)}, Fraction(0)) for x in xs], sys, False)
    return not sys.feasible()


def member(e, x) -> bool:
    x = tuple(Fraction(v) for v in x)
    if isinstance(e, Atom):
        return e.poly.contains(x)
    if isinstance(e, Inter):
        return member(e.left, x) and member(e.right, x)
    sys = _System()
    _compile(e, [({}, v) for v in x], sys, False)
    return sys.feasible()


# sample points -----------------------------------------------------------

def _solve(rows, rhs):
    """Unique solution of a square rational system, or None."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return tuple(m[i][n] / m[i][i] for i in range(n))


def sample_points(polys, dim: int, rng: random.Random, budget: int = 40, window: int = 2):
    """Vertices of the hyperplane arrangement of ``polys``, points near them, and grid points."""
    planes = {}
    for p in polys:
        for h in p.constraints:
            h = h.normalize()
            planes[(h.normal, h.offset)] = h
    planes = list(planes.values())
    verts = set()
    for group in combinations(planes, dim):
        v = _solve([h.normal for h in group], [h.offset for h in group])
        if v is not None:
            verts.add(v)
    pts = set(verts)
    step = Fraction(1, 3)
    for v in list(verts):
        for _ in range(2):
            pts.add(tuple(a + step * rng.choice((-1, 0, 1)) / rng.choice((1, 2)) for a in v))
    grid = [Fraction(k, 2) for k in range(-2 * window, 2 * window + 1)]
    for _ in range(budget):
        pts.add(tuple(rng.choice(grid) for _ in range(dim)))
    pts = sorted(pts)
    if len(pts) > budget:
        pts = sorted(set(rng.sample(sorted(verts), min(len(verts), budget // 2))) | set(rng.sample(pts, budget // 2)))
    return pts
