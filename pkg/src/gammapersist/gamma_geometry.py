"""Exact convex polyhedra with mixed strict/weak facets, polyhedral cones, and
the cone-relative topology predicates built from them.

All arithmetic is over ``Fraction``; emptiness and inclusion are decided with the
exact simplex in :mod:`gammapersist.exact_lp`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from .exact_lp import feasible_point, maximize
from .foundations import DomainError, format_rat, rat

Vector = tuple[Fraction, ...]
ZERO = Fraction(0)


def vec(values: Iterable) -> Vector:
    return tuple(rat(v) for v in values)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), ZERO)


def primitive(v: Sequence[Fraction]) -> Vector:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        return tuple(ZERO for _ in v)
    return tuple(Fraction(i // g) for i in ints)


def _matrix_rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class HalfSpace:
    """``{x : normal · x <= offset}``, or ``<`` when ``strict``."""

    normal: Vector
    offset: Fraction
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "normal", vec(self.normal))
        object.__setattr__(self, "offset", rat(self.offset))
        if all(x == 0 for x in self.normal):
            raise DomainError("half-space normal must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def contains(self, x: Sequence) -> bool:
        value = dot(self.normal, vec(x))
        return value < self.offset if self.strict else value <= self.offset

    def negate(self) -> "HalfSpace":
        """The complementary half-space."""
        return HalfSpace(tuple(-a for a in self.normal), -self.offset, not self.strict)

    def normalize(self) -> "HalfSpace":
        """Rescale so the normal is a primitive integer vector."""
        scaled = primitive(self.normal)
        factor = next(s / a for s, a in zip(scaled, self.normal) if a != 0)
        return HalfSpace(scaled, self.offset * factor, self.strict)

    def with_strict(self, strict: bool) -> "HalfSpace":
        return HalfSpace(self.normal, self.offset, strict)

    def translate(self, v: Sequence) -> "HalfSpace":
        return HalfSpace(self.normal, self.offset + dot(self.normal, vec(v)), self.strict)

    def to_json(self) -> dict:
        return {
            "normal": [format_rat(a) for a in self.normal],
            "offset": format_rat(self.offset),
            "strict": self.strict,
        }

    @classmethod
    def from_json(cls, data: dict) -> "HalfSpace":
        return cls(vec(data["normal"]), rat(data["offset"]), bool(data.get("strict", False)))

    def __str__(self) -> str:
        terms = " + ".join(f"{format_rat(a)}*x{i}" for i, a in enumerate(self.normal) if a)
        return f"{terms} {'<' if self.strict else '<='} {format_rat(self.offset)}"


def _dedupe(constraints: Iterable[HalfSpace]) -> list[HalfSpace]:
    """Keep the tightest constraint per normal direction."""
    best: dict[Vector, HalfSpace] = {}
    for c in constraints:
        c = c.normalize()
        old = best.get(c.normal)
        if old is None or c.offset < old.offset or (c.offset == old.offset and c.strict):
            best[c.normal] = c
    return [best[k] for k in sorted(best)]


@dataclass(frozen=True)
class HPolyhedron:
    """A convex set cut out by finitely many open or closed half-spaces."""

    dim: int
    constraints: tuple[HalfSpace, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.dim != self.dim:
                raise DomainError(f"constraint of dimension {c.dim} in a {self.dim}-dimensional set")

    # constructors
    @classmethod
    def universe(cls, dim: int) -> "HPolyhedron":
        return cls(dim, ())

    @classmethod
    def empty(cls, dim: int) -> "HPolyhedron":
        e = tuple(Fraction(1) if i == 0 else ZERO for i in range(dim))
        return cls(dim, (HalfSpace(e, 0, True), HalfSpace(tuple(-a for a in e), 0, True)))

    @classmethod
    def point(cls, p: Sequence) -> "HPolyhedron":
        p = vec(p)
        cons = []
        for i in range(len(p)):
            e = tuple(Fraction(1) if j == i else ZERO for j in range(len(p)))
            cons.append(HalfSpace(e, p[i]))
            cons.append(HalfSpace(tuple(-a for a in e), -p[i]))
        return cls(len(p), tuple(cons))

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence, lower_closed=True, upper_closed=True) -> "HPolyhedron":
        """Product of intervals; the closedness flags apply to every coordinate."""
        lower, upper = vec(lower), vec(upper)
        n = len(lower)
        cons = []
        for i in range(n):
            e = tuple(Fraction(1) if j == i else ZERO for j in range(n))
            cons.append(HalfSpace(e, upper[i], not upper_closed))
            cons.append(HalfSpace(tuple(-a for a in e), -lower[i], not lower_closed))
        return cls(n, tuple(cons))

    @classmethod
    def from_halfspaces(cls, dim: int, spec: Iterable[tuple[Sequence, object, bool]]) -> "HPolyhedron":
        return cls(dim, tuple(HalfSpace(vec(n), rat(b), s) for n, b, s in spec))

    # queries
    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        return all(c.contains(x) for c in self.constraints)

    @cached_property
    def witness(self) -> Vector | None:
        """Some point of the set, or None when it is empty."""
        if not self.constraints:
            return tuple(ZERO for _ in range(self.dim))
        return feasible_point(
            [c.normal for c in self.constraints],
            [c.offset for c in self.constraints],
            [c.strict for c in self.constraints],
        )

    def is_empty(self) -> bool:
        return self.witness is None

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DomainError("dimension mismatch in intersection")
        return HPolyhedron(self.dim, self.constraints + other.constraints)

    def add_constraint(self, c: HalfSpace) -> "HPolyhedron":
        return HPolyhedron(self.dim, self.constraints + (c,))

    def is_subset(self, other: "HPolyhedron") -> bool:
        return self.escape_point(other) is None

    def equals(self, other: "HPolyhedron") -> bool:
        """Set equality (mutual inclusion)."""
        return self.is_subset(other) and other.is_subset(self)

    def escape_point(self, other: "HPolyhedron") -> Vector | None:
        """A point of ``self`` outside ``other``, if any."""
        for c in other.constraints:
            w = self.add_constraint(c.negate()).witness
            if w is not None:
                return w
        return None

    def difference_witness(self, other: "HPolyhedron") -> Vector | None:
        """A point in exactly one of the two sets, or None when they are equal."""
        w = self.escape_point(other)
        return w if w is not None else other.escape_point(self)

    def is_bounded(self) -> bool:
        if self.is_empty():
            return True
        weak = [c.normal for c in self.constraints]
        for i in range(self.dim):
            for sign in (1, -1):
                obj = tuple(Fraction(sign) if j == i else ZERO for j in range(self.dim))
                if maximize(obj, weak, [c.offset for c in self.constraints]).status == "unbounded":
                    return False
        return True

    def affine_dimension(self) -> int:
        """Dimension of the affine hull (-1 for the empty set)."""
        if self.is_empty():
            return -1
        base = self.closure().canonical()
        implicit = [c.normal for c in base.constraints if base.add_constraint(c.with_strict(True)).is_empty()]
        return self.dim - (_matrix_rank(implicit) if implicit else 0)

    # topology
    def closure(self) -> "HPolyhedron":
        if self.is_empty():
            return self
        return HPolyhedron(self.dim, tuple(c.with_strict(False) for c in self.constraints))

    def interior(self) -> "HPolyhedron":
        opened = HPolyhedron(self.dim, tuple(c.with_strict(True) for c in self.constraints))
        return HPolyhedron.empty(self.dim) if opened.is_empty() else opened

    def is_open(self) -> bool:
        return self.equals(self.interior())

    def is_closed(self) -> bool:
        return self.equals(self.closure())

    # representation
    def canonical(self) -> "HPolyhedron":
        """Equivalent system with duplicate and redundant half-spaces removed."""
        return _canonical(self)

    def _canonical(self) -> "HPolyhedron":
        if self.is_empty():
            return HPolyhedron.empty(self.dim)
        cons = _dedupe(self.constraints)
        i = 0
        while i < len(cons):
            rest = HPolyhedron(self.dim, tuple(cons[:i] + cons[i + 1 :]))
            if rest.add_constraint(cons[i].negate()).is_empty():
                cons.pop(i)
            else:
                i += 1
        return HPolyhedron(self.dim, tuple(cons))

    def translate(self, v: Sequence) -> "HPolyhedron":
        return HPolyhedron(self.dim, tuple(c.translate(v) for c in self.constraints))

    def negate(self) -> "HPolyhedron":
        """The point reflection ``-P``."""
        return HPolyhedron(
            self.dim, tuple(HalfSpace(tuple(-a for a in c.normal), c.offset, c.strict) for c in self.constraints)
        )

    def preimage(self, matrix: Sequence[Sequence], shift: Sequence) -> "HPolyhedron":
        """``{x : matrix @ x + shift ∈ P}`` for a matrix with ``self.dim`` rows."""
        m = [vec(row) for row in matrix]
        shift = vec(shift)
        src = len(m[0]) if m else 0
        out = []
        for c in self.constraints:
            normal = tuple(sum((c.normal[r] * m[r][j] for r in range(self.dim)), ZERO) for j in range(src))
            offset = c.offset - dot(c.normal, shift)
            if all(a == 0 for a in normal):
                if (0 < offset) if c.strict else (0 <= offset):
                    continue
                return HPolyhedron.empty(src)
            out.append(HalfSpace(normal, offset, c.strict))
        return HPolyhedron(src, tuple(out))

    def to_json(self) -> dict:
        return {"dim": self.dim, "constraints": [c.to_json() for c in self.constraints]}

    @classmethod
    def from_json(cls, data: dict) -> "HPolyhedron":
        return cls(int(data["dim"]), tuple(HalfSpace.from_json(c) for c in data.get("constraints", [])))

    def __str__(self) -> str:
        if not self.constraints:
            return f"R^{self.dim}"
        return "{" + ", ".join(str(c) for c in self.constraints) + "}"


@lru_cache(maxsize=8192)
def _canonical(p: HPolyhedron) -> HPolyhedron:
    return p._canonical()


def _in_cone_of(v: Vector, gens: Sequence[Vector]) -> bool:
    """Is ``v`` a nonnegative combination of ``gens``?"""
    if not gens:
        return all(a == 0 for a in v)
    n = len(gens)
    a_eq = [[g[i] for g in gens] for i in range(len(v))]
    a_ub = [[Fraction(-1) if j == k else ZERO for j in range(n)] for k in range(n)]
    res = maximize([ZERO] * n, a_ub, [ZERO] * n, a_eq, list(v))
    return res.status == "optimal"


def _prune(gens: list[Vector]) -> list[Vector]:
    out = list(dict.fromkeys(primitive(g) for g in gens if any(g)))
    i = 0
    while i < len(out):
        if _in_cone_of(out[i], out[:i] + out[i + 1 :]):
            out.pop(i)
        else:
            i += 1
    return sorted(out)


def dual_generators(dim: int, vectors: Sequence[Vector]) -> list[Vector]:
    """Generators of ``{y : v · y <= 0 for all v in vectors}`` by double description."""
    gens: list[Vector] = []
    for i in range(dim):
        e = tuple(Fraction(1) if j == i else ZERO for j in range(dim))
        gens += [e, tuple(-a for a in e)]
    for v in vectors:
        vals = [dot(v, g) for g in gens]
        keep = [g for g, s in zip(gens, vals) if s <= 0]
        pos = [(g, s) for g, s in zip(gens, vals) if s > 0]
        neg = [(g, s) for g, s in zip(gens, vals) if s < 0]
        for gp, sp in pos:
            for gn, sn in neg:
                keep.append(tuple(sp * b - sn * a for a, b in zip(gp, gn)))
        gens = _prune(keep)
    return gens


@dataclass(frozen=True)
class Cone:
    """Closed convex polyhedral cone, kept as both rays and normals.

    The cone equals the nonnegative span of ``rays`` and also
    ``{x : n · x <= 0 for n in normals}``.
    """

    dim: int
    rays: tuple[Vector, ...]
    normals: tuple[Vector, ...]

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence], dim: int | None = None) -> "Cone":
        rays = [vec(r) for r in rays]
        if dim is None:
            if not rays:
                raise DomainError("dimension required for a cone without rays")
            dim = len(rays[0])
        rays = _prune(rays)
        return cls(dim, tuple(rays), tuple(dual_generators(dim, rays)))

    @classmethod
    def from_normals(cls, normals: Iterable[Sequence], dim: int | None = None) -> "Cone":
        normals = [vec(n) for n in normals]
        if dim is None:
            if not normals:
                raise DomainError("dimension required for a cone without normals")
            dim = len(normals[0])
        normals = _prune(normals)
        return cls(dim, tuple(dual_generators(dim, normals)), tuple(normals))

    @classmethod
    def negative_orthant(cls, dim: int) -> "Cone":
        return cls.from_rays([[Fraction(-1) if j == i else 0 for j in range(dim)] for i in range(dim)])

    @classmethod
    def whole_space(cls, dim: int) -> "Cone":
        return cls.from_normals([], dim)

    @classmethod
    def zero(cls, dim: int) -> "Cone":
        return cls.from_rays([], dim)

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        return all(dot(n, x) <= 0 for n in self.normals)

    def polar(self) -> "Cone":
        """``{ξ : ξ · v >= 0 for v in the cone}``."""
        return Cone(
            self.dim,
            tuple(sorted(tuple(-a for a in n) for n in self.normals)),
            tuple(sorted(tuple(-a for a in r) for r in self.rays)),
        )

    def antipodal(self) -> "Cone":
        return Cone(
            self.dim,
            tuple(sorted(tuple(-a for a in r) for r in self.rays)),
            tuple(sorted(tuple(-a for a in n) for n in self.normals)),
        )

    def is_proper(self) -> bool:
        """No line through the origin lies in the cone."""
        return _matrix_rank(self.normals) == self.dim if self.normals else self.dim == 0

    def is_solid(self) -> bool:
        return _matrix_rank(self.rays) == self.dim if self.rays else self.dim == 0

    def as_polyhedron(self) -> HPolyhedron:
        return HPolyhedron(self.dim, tuple(HalfSpace(n, 0) for n in self.normals))

    def interior(self) -> HPolyhedron:
        return self.as_polyhedron().interior()

    def same_cone(self, other: "Cone") -> bool:
        return self.dim == other.dim and set(self.rays) == set(other.rays)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [[format_rat(a) for a in r] for r in self.rays],
            "normals": [[format_rat(a) for a in n] for n in self.normals],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cone":
        if "rays" in data:
            return cls.from_rays(data["rays"], int(data["dim"]) if "dim" in data else None)
        return cls.from_normals(data["normals"], int(data["dim"]) if "dim" in data else None)


def _eliminate_last(constraints: list[HalfSpace], dim: int) -> list[HalfSpace] | None:
    """Fourier–Motzkin elimination of the last coordinate; None if infeasible.

    A combined constraint is strict iff one of its parents is strict, which
    is exact for mixed systems.
    """
    zero, pos, neg = [], [], []
    for c in constraints:
        a = c.normal[-1]
        (zero if a == 0 else pos if a > 0 else neg).append(c)
    out: list[tuple[Vector, Fraction, bool]] = [(c.normal[:-1], c.offset, c.strict) for c in zero]
    for p in pos:
        for q in neg:
            sp, sq = p.normal[-1], -q.normal[-1]
            normal = tuple(sq * a + sp * b for a, b in zip(p.normal[:-1], q.normal[:-1]))
            out.append((normal, sq * p.offset + sp * q.offset, p.strict or q.strict))
    result = []
    for normal, offset, strict in out:
        if all(a == 0 for a in normal):
            if (0 < offset) if strict else (0 <= offset):
                continue
            return None
        result.append(HalfSpace(normal, offset, strict))
    return result


def _project_away(constraints: list[HalfSpace], keep: int, total: int) -> HPolyhedron | None:
    cons = constraints
    for k in range(total, keep, -1):
        reduced = _eliminate_last(cons, k)
        if reduced is None:
            return None
        cons = HPolyhedron(k - 1, tuple(reduced)).canonical().constraints if reduced else []
    return HPolyhedron(keep, tuple(cons))


@lru_cache(maxsize=4096)
def minkowski_sum(p: HPolyhedron, q: HPolyhedron) -> HPolyhedron:
    """Exact H-representation of ``p + q``."""
    if p.dim != q.dim:
        raise DomainError("dimension mismatch in Minkowski sum")
    n = p.dim
    if p.is_empty() or q.is_empty():
        return HPolyhedron.empty(n)
    if not q.constraints:
        return HPolyhedron.universe(n)
    # variables (x, y): y in q, x - y in p
    lifted = []
    for c in p.constraints:
        lifted.append(HalfSpace(c.normal + tuple(-a for a in c.normal), c.offset, c.strict))
    for c in q.constraints:
        lifted.append(HalfSpace(tuple(ZERO for _ in range(n)) + c.normal, c.offset, c.strict))
    out = _project_away(lifted, n, 2 * n)
    if out is None:
        return HPolyhedron.empty(n)
    return out.canonical()


@lru_cache(maxsize=4096)
def minkowski_cone(p: HPolyhedron, c: Cone) -> HPolyhedron:
    """``p + c`` computed by sweeping ``p`` along each ray."""
    if p.dim != c.dim:
        raise DomainError("dimension mismatch in Minkowski sum")
    if p.is_empty():
        return HPolyhedron.empty(p.dim)
    if not c.rays:
        return p.canonical()
    n, m = p.dim, len(c.rays)
    # variables (x, λ): λ >= 0 and x - Σ λ_j r_j in p
    lifted = []
    for h in p.constraints:
        lam = tuple(-dot(h.normal, r) for r in c.rays)
        lifted.append(HalfSpace(h.normal + lam, h.offset, h.strict))
    for j in range(m):
        e = tuple(Fraction(-1) if k == j else ZERO for k in range(m))
        lifted.append(HalfSpace(tuple(ZERO for _ in range(n)) + e, 0))
    out = _project_away(lifted, n, n + m)
    if out is None:
        return HPolyhedron.empty(n)
    return out.canonical()


def _check_cone(c: Cone) -> None:
    if not c.is_proper():
        raise DomainError("cone is not proper (it contains a line)")
    if not c.is_solid():
        raise DomainError("cone has empty interior")


@dataclass(frozen=True)
class GammaPredicates:
    open: bool
    closed: bool
    gamma_open: bool
    gamma_closed: bool
    gamma_locally_closed: bool
    gamma_flat: bool
    gamma_proper: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def is_gamma_flat(p: HPolyhedron, c: Cone) -> bool:
    return p.equals(minkowski_cone(p, c).intersect(minkowski_cone(p, c.antipodal())))


def is_gamma_locally_closed(p: HPolyhedron, c: Cone) -> bool:
    # a set is an intersection of a cone-open and a cone-closed set exactly
    # when it equals Int(A + c) ∩ cl(A + c^a)
    up = minkowski_cone(p, c).interior()
    down = minkowski_cone(p, c.antipodal()).closure()
    return p.equals(up.intersect(down))


def is_gamma_proper(p: HPolyhedron, c: Cone) -> bool:
    """Every ``cl(p) ∩ (x + c)`` is compact: the recession cone of ``cl(p)`` meets ``c`` only at 0."""
    if p.is_empty():
        return True
    n = p.dim
    rows = [h.normal for h in p.constraints] + list(c.normals)
    total = tuple(-sum((nv[i] for nv in c.normals), ZERO) for i in range(n))
    res = maximize([ZERO] * n, rows, [ZERO] * len(rows), [total], [Fraction(1)])
    return res.status == "infeasible"


def gamma_predicates(p: HPolyhedron, c: Cone) -> GammaPredicates:
    _check_cone(c)
    if p.dim != c.dim:
        raise DomainError("dimension mismatch between set and cone")
    is_open, is_closed = p.is_open(), p.is_closed()
    return GammaPredicates(
        open=is_open,
        closed=is_closed,
        gamma_open=is_open and minkowski_cone(p, c).equals(p),
        gamma_closed=is_closed and minkowski_cone(p, c.antipodal()).equals(p),
        gamma_locally_closed=is_gamma_locally_closed(p, c),
        gamma_flat=is_gamma_flat(p, c),
        gamma_proper=is_gamma_proper(p, c),
    )


def omega_to_z(omega: HPolyhedron, c: Cone) -> HPolyhedron:
    """``(Ω + c) ∩ cl(Ω + c^a)`` for an open cone-flat ``Ω``."""
    _check_cone(c)
    if omega.is_empty():
        return HPolyhedron.empty(omega.dim)
    if not omega.is_open():
        raise DomainError("input set is not open")
    if not is_gamma_flat(omega, c):
        raise DomainError("input set is not flat for the cone")
    up = minkowski_cone(omega, c)
    down = minkowski_cone(omega, c.antipodal()).closure()
    return up.intersect(down).canonical()


def z_to_omega(z: HPolyhedron, c: Cone) -> HPolyhedron:
    """Interior of a cone-locally-closed set."""
    _check_cone(c)
    if z.is_empty():
        return HPolyhedron.empty(z.dim)
    if not is_gamma_locally_closed(z, c):
        raise DomainError("input set is not locally closed for the cone")
    return z.interior().canonical()
