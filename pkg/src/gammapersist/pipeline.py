"""Sublevel-set persistence of piecewise linear functions on finite meshes.

A PL function on a simplicial mesh is filtered by its lower star: a simplex
enters at the largest value on its vertices.  Reducing the boundary matrix
over F2 pairs births with deaths, giving half-open bars ``[birth, death)``.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .barcodes1d import GradedBarcode, Interval
from .convolution1d import distance_bounds, is_a_isomorphic
from .foundations import POS_INF, DomainError, ExtRat, RatLike, format_rat, rat

Point = tuple[Fraction, ...]



def _is_number(text: str) -> bool:
    try:
        rat(text)
    except (ValueError, ZeroDivisionError):
        return False
    return True


@dataclass(frozen=True)
class PointCloud:
    points: tuple[Point, ...]
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        pts = tuple(tuple(rat(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = tuple(rat(x) for x in self.weights)
            if len(w) != len(pts):
                raise DomainError("one weight per point is required")
            if any(x < 0 for x in w):
                raise DomainError("weights must be nonnegative")
            object.__setattr__(self, "weights", w)
        if len({len(p) for p in pts}) > 1:
            raise DomainError("points of different dimensions")

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points else 0

    @classmethod
    def parse_csv(cls, text: str) -> "PointCloud":
        """One point per row; a trailing ``w=`` column sets its weight.
        A first row that is not numeric is taken as a header."""
        pts, weights = [], []
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
        for k, row in enumerate(rows):
            cells = [c.strip() for c in row]
            w = None
            if cells[-1].startswith("w="):
                w = rat(cells.pop()[2:])
            if k == 0 and not all(_is_number(c) for c in cells):
                continue
            pts.append(tuple(rat(c) for c in cells))
            weights.append(w)
        if any(w is not None for w in weights):
            return cls(tuple(pts), tuple(Fraction(1) if w is None else w for w in weights))
        return cls(tuple(pts))


@dataclass(frozen=True)
class SimplicialMesh:
    """Vertices with rational coordinates and a face-closed list of simplices."""

    vertices: tuple[Point, ...]
    simplices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(rat(c) for c in v) for v in self.vertices))
        closed = set()
        for s in self.simplices:
            s = tuple(sorted(s))
            if any(i < 0 or i >= len(self.vertices) for i in s):
                raise DomainError(f"simplex {s} refers to a missing vertex")
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        closed.update((i,) for i in range(len(self.vertices)))
        object.__setattr__(self, "simplices", tuple(sorted(closed, key=lambda s: (len(s), s))))

    @classmethod
    def interval(cls, coords: Iterable) -> "SimplicialMesh":
        xs = sorted({rat(x) for x in coords})
        return cls(tuple((x,) for x in xs), tuple((i, i + 1) for i in range(len(xs) - 1)))

    @classmethod
    def grid(cls, xs: Iterable, ys: Iterable) -> "SimplicialMesh":
        """Rectangular grid with every square cut along its rising diagonal."""
        xs, ys = sorted({rat(x) for x in xs}), sorted({rat(y) for y in ys})
        idx = {}
        verts = []
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                idx[(i, j)] = len(verts)
                verts.append((x, y))
        tris = []
        for j in range(len(ys) - 1):
            for i in range(len(xs) - 1):
                a, b, c, d = idx[(i, j)], idx[(i + 1, j)], idx[(i, j + 1)], idx[(i + 1, j + 1)]
                tris += [(a, b, d), (a, c, d)]
        return cls(tuple(verts), tuple(tris))

    @property
    def dim(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    def to_json(self) -> dict:
        return {
            "vertices": [[format_rat(c) for c in v] for v in self.vertices],
            "simplices": [list(s) for s in self.simplices if len(s) > 1],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialMesh":
        if "grid" in data:
            return cls.grid(data["grid"]["x"], data["grid"]["y"])
        if "interval" in data:
            return cls.interval(data["interval"])
        return cls(tuple(tuple(v) for v in data["vertices"]), tuple(tuple(s) for s in data.get("simplices", [])))


@dataclass(frozen=True)
class MeshFunction:
    mesh: SimplicialMesh
    values: tuple[Fraction, ...]
    compact_sublevels: bool = True

    def __post_init__(self):
        vals = tuple(rat(v) for v in self.values)
        if len(vals) != len(self.mesh.vertices):
            raise DomainError("one value per mesh vertex is required")
        object.__setattr__(self, "values", vals)

    def entrance(self, simplex: Sequence[int]) -> Fraction:
        return max(self.values[i] for i in simplex)

    def sup_distance(self, other: "MeshFunction") -> Fraction:
        if other.mesh != self.mesh:
            raise DomainError("functions live on different meshes")
        return max((abs(a - b) for a, b in zip(self.values, other.values)), default=Fraction(0))

    def __call__(self, x: Fraction) -> Fraction:
        """PL interpolation on a one-dimensional mesh."""
        x = rat(x)
        vs = [v[0] for v in self.mesh.vertices]
        for s in self.mesh.simplices:
            if len(s) == 2:
                lo, hi = vs[s[0]], vs[s[1]]
                if lo > hi:
                    lo, hi = hi, lo
                    s = (s[1], s[0])
                if lo <= x <= hi:
                    t = (x - lo) / (hi - lo)
                    return self.values[s[0]] + t * (self.values[s[1]] - self.values[s[0]])
        for i, v in enumerate(vs):
            if v == x:
                return self.values[i]
        raise DomainError(f"{x} lies outside the mesh")

    def to_json(self) -> dict:
        return {"mesh": self.mesh.to_json(), "values": [format_rat(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "MeshFunction":
        return cls(SimplicialMesh.from_json(data["mesh"]), tuple(data["values"]))


def _metric(name: str) -> Callable[[Point, Point], Fraction]:
    if name == "linf":
        return lambda p, q: max((abs(a - b) for a, b in zip(p, q)), default=Fraction(0))
    if name == "l1":
        return lambda p, q: sum((abs(a - b) for a, b in zip(p, q)), Fraction(0))
    if name == "l2sq":
        return lambda p, q: sum(((a - b) ** 2 for a, b in zip(p, q)), Fraction(0))
    raise DomainError(f"unknown metric {name!r} (use linf, l1 or l2sq)")


def distance_function(cloud: PointCloud, mesh: SimplicialMesh, metric: str = "linf") -> MeshFunction:
    """Vertexwise ``min_s d(x, s) / ρ(s)``.

    A zero weight makes a point reachable only from itself.  ``l2sq`` is the
    squared Euclidean distance, so its thresholds are squared radii.
    """
    if not cloud.points:
        raise DomainError("the point cloud is empty")
    if cloud.dim != mesh.dim:
        raise DomainError("cloud and mesh dimensions differ")
    d = _metric(metric)
    weights = cloud.weights or tuple(Fraction(1) for _ in cloud.points)
    values = []
    for v in mesh.vertices:
        best = None
        for s, w in zip(cloud.points, weights):
            dist = d(v, s)
            if w == 0:
                cand = Fraction(0) if dist == 0 else None
            else:
                cand = dist / w
            if cand is not None and (best is None or cand < best):
                best = cand
        if best is None:
            raise DomainError(f"vertex {v} is at infinite weighted distance from the cloud")
        values.append(best)
    return MeshFunction(mesh, tuple(values))


@dataclass(frozen=True)
class PersistencePair:
    degree: int
    birth: Fraction
    death: Fraction | None  # None for an essential class


def persistence_pairs(f: MeshFunction) -> list[PersistencePair]:
    """Lower-star persistence pairs by column reduction over F2."""
    order = sorted(f.mesh.simplices, key=lambda s: (f.entrance(s), len(s), s))
    index = {s: k for k, s in enumerate(order)}
    times = [f.entrance(s) for s in order]
    low_of: dict[int, int] = {}
    pivot_col: dict[int, int] = {}
    paired = set()
    pairs = []
    for j, s in enumerate(order):
        col = 0
        if len(s) > 1:
            for k in range(len(s)):
                col |= 1 << index[s[:k] + s[k + 1 :]]
        while col:
            low = col.bit_length() - 1
            other = pivot_col.get(low)
            if other is None:
                break
            col ^= low_of[other]
        if col:
            low = col.bit_length() - 1
            pivot_col[low] = j
            low_of[j] = col
            paired.update((low, j))
            if times[low] < times[j]:
                pairs.append(PersistencePair(len(order[low]) - 1, times[low], times[j]))
    for k, s in enumerate(order):
        if k not in paired:
            pairs.append(PersistencePair(len(s) - 1, times[k], None))
    return pairs


def sublevel_persistence(f: MeshFunction) -> GradedBarcode:
    """Bars ``[birth, death)`` in degree ``j`` for the ``j``-th cohomology of sublevel sets."""
    if not f.compact_sublevels:
        raise DomainError("sublevel sets are not declared compact")
    bars = []
    for p in persistence_pairs(f):
        death = POS_INF if p.death is None else p.death
        bars.append((Interval.gamma_bar(p.birth, death), p.degree))
    return GradedBarcode.from_bars(bars)


def betti_at(barcode: GradedBarcode, t: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for interval, degree in barcode.bars():
        if interval.contains(t):
            out[degree] = out.get(degree, 0) + 1
    return out


# stability and approximation ---------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    epsilon: Fraction
    decision: bool | None
    upper: ExtRat | None = None
    barcodes: tuple[GradedBarcode, GradedBarcode] | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.decision is True and (self.upper is None or self.upper <= ExtRat.of(self.epsilon))

    def to_json(self) -> dict:
        out = {"epsilon": format_rat(self.epsilon), "pass": self.passed, "decision": self.decision}
        if self.upper is not None:
            out["upper"] = self.upper.to_json()
        return out


def stability_experiment(f1: MeshFunction, f2: MeshFunction, with_distance: bool = False) -> StabilityReport:
    eps = f1.sup_distance(f2)
    b1, b2 = sublevel_persistence(f1), sublevel_persistence(f2)
    decision, _ = is_a_isomorphic(b1, b2, eps)
    upper = distance_bounds(b1, b2).upper if with_distance else None
    return StabilityReport(eps, decision, upper, (b1, b2))


def random_pl_function(mesh: SimplicialMesh, rng: random.Random, scale: int = 8, den: int = 4) -> MeshFunction:
    return MeshFunction(mesh, tuple(Fraction(rng.randint(-scale * den, scale * den), den) for _ in mesh.vertices))


def perturb(f: MeshFunction, eps: Fraction, rng: random.Random, steps: int = 8) -> MeshFunction:
    """Add a vertexwise perturbation of sup-norm at most ``eps``."""
    eps = rat(eps)
    return MeshFunction(f.mesh, tuple(v + eps * Fraction(rng.randint(-steps, steps), steps) for v in f.values))


def stability_trials(
    trials: int, eps: RatLike, vertices: int = 64, seed: int = 0
) -> list[StabilityReport]:
    rng = random.Random(seed)
    mesh = SimplicialMesh.interval(range(vertices))
    out = []
    for _ in range(trials):
        f1 = random_pl_function(mesh, rng)
        out.append(stability_experiment(f1, perturb(f1, rat(eps), rng)))
    return out


@dataclass(frozen=True)
class Approximation:
    function: MeshFunction
    refinements: int
    max_error: Fraction


def pl_approximate(
    func: Callable[[Fraction], Fraction] | MeshFunction,
    coarse: Iterable,
    eps: object,
    max_depth: int = 20,
) -> Approximation:
    """Bisect the edges of a 1-D mesh until the interpolant is within ``eps``
    of ``func`` at every edge midpoint."""
    eps = rat(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    f = func
    xs = sorted({rat(x) for x in coarse})
    if len(xs) < 2:
        raise DomainError("the coarse mesh needs two vertices")
    stack = [(xs[i], xs[i + 1], 0) for i in range(len(xs) - 1)]
    verts = set(xs)
    refinements = 0
    max_err = Fraction(0)
    while stack:
        a, b, depth = stack.pop()
        m = (a + b) / 2
        err = abs(rat(f(m)) - (rat(f(a)) + rat(f(b))) / 2)
        if err > eps and depth < max_depth:
            refinements += 1
            verts.add(m)
            stack += [(a, m, depth + 1), (m, b, depth + 1)]
        else:
            max_err = max(max_err, err)
    mesh = SimplicialMesh.interval(verts)
    values = tuple(rat(f(v[0])) for v in mesh.vertices)
    return Approximation(MeshFunction(mesh, values), refinements, max_err)


# two-parameter support ----------------------------------------------------


def support_corner(fs: Sequence[MeshFunction]) -> Point:
    """Componentwise minimum ``y`` of a vector-valued PL map.

    Every value of the map, and hence the support of its direct image, lies in
    ``y + γ^a`` for the negative orthant ``γ``.
    """
    return tuple(min(f.values) for f in fs)
