"""Hyperplane arrangements, stratifications into cone-locally-closed polytopes,
and direct sums of constant sheaves on such polytopes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .foundations import DomainError, format_rat, rat
from .gamma_geometry import (
    Cone,
    HalfSpace,
    HPolyhedron,
    Vector,
    dot,
    is_gamma_locally_closed,
    minkowski_cone,
    omega_to_z,
    vec,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class Hyperplane:
    normal: Vector
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", vec(self.normal))
        object.__setattr__(self, "offset", rat(self.offset))
        if not any(self.normal):
            raise DomainError("hyperplane normal must be nonzero")

    def side(self, sign: int) -> HPolyhedron:
        """Open side (sign ±1) or the hyperplane itself (sign 0)."""
        d = len(self.normal)
        below = HalfSpace(self.normal, self.offset, True)
        if sign < 0:
            return HPolyhedron(d, (below,))
        above = HalfSpace(tuple(-a for a in self.normal), -self.offset, True)
        if sign > 0:
            return HPolyhedron(d, (above,))
        return HPolyhedron(d, (below.with_strict(False), above.with_strict(False)))

    def canonical_key(self) -> tuple:
        h = HalfSpace(self.normal, self.offset).normalize()
        if h.normal < tuple(-a for a in h.normal):
            h = HalfSpace(tuple(-a for a in h.normal), -h.offset)
        return h.normal, h.offset

    def __str__(self) -> str:
        terms = " + ".join(f"{format_rat(a)}*x{i}" for i, a in enumerate(self.normal) if a)
        return f"{terms} = {format_rat(self.offset)}"


@dataclass(frozen=True)
class Arrangement:
    dim: int
    hyperplanes: tuple[Hyperplane, ...] = ()

    def __post_init__(self):
        seen, unique = set(), []
        for h in self.hyperplanes:
            h = h if isinstance(h, Hyperplane) else Hyperplane(*h)
            if len(h.normal) != self.dim:
                raise DomainError(f"hyperplane {h} does not live in dimension {self.dim}")
            key = h.canonical_key()
            if key not in seen:
                seen.add(key)
                unique.append(h)
        object.__setattr__(self, "hyperplanes", tuple(unique))

    def extend(self, extra: Iterable[Hyperplane]) -> "Arrangement":
        return Arrangement(self.dim, self.hyperplanes + tuple(extra))

    def incompatible(self, cone: Cone) -> list[Hyperplane]:
        """Hyperplanes whose normal is in neither the polar cone nor its antipode."""
        bad = []
        for h in self.hyperplanes:
            signs = {(dot(h.normal, r) > 0) - (dot(h.normal, r) < 0) for r in cone.rays}
            if 1 in signs and -1 in signs:
                bad.append(h)
        return bad

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "hyperplanes": [
                {"normal": [format_rat(a) for a in h.normal], "offset": format_rat(h.offset)}
                for h in self.hyperplanes
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Arrangement":
        return cls(
            int(data["dim"]),
            tuple(Hyperplane(vec(h["normal"]), rat(h["offset"])) for h in data.get("hyperplanes", [])),
        )


def facet_hyperplanes(p: HPolyhedron) -> list[Hyperplane]:
    if p.is_empty():
        return []
    return [Hyperplane(c.normal, c.offset) for c in p.canonical().constraints]


def enumerate_cells(arr: Arrangement, region: HPolyhedron | None = None) -> list[HPolyhedron]:
    """Nonempty open cells of the arrangement inside the interior of ``region``."""
    start = HPolyhedron.universe(arr.dim) if region is None else region.interior()
    cells = [] if start.is_empty() else [start]
    for h in arr.hyperplanes:
        split = []
        for c in cells:
            for s in (-1, 1):
                piece = c.intersect(h.side(s))
                if not piece.is_empty():
                    split.append(piece)
        cells = split
    return [c.canonical() for c in cells]


def enumerate_faces(arr: Arrangement, region: HPolyhedron | None = None) -> list[tuple[tuple[int, ...], HPolyhedron]]:
    """All nonempty relatively open faces with their sign vectors."""
    start = HPolyhedron.universe(arr.dim) if region is None else region
    faces = [] if start.is_empty() else [((), start)]
    for h in arr.hyperplanes:
        split = []
        for signs, f in faces:
            for s in (-1, 0, 1):
                piece = f.intersect(h.side(s))
                if not piece.is_empty():
                    split.append((signs + (s,), piece))
        faces = split
    return faces


def subtract(p: HPolyhedron, q: HPolyhedron) -> list[HPolyhedron]:
    """``p ∖ q`` as a list of pairwise disjoint nonempty polyhedra."""
    out, rest = [], p
    for c in q.constraints:
        piece = rest.add_constraint(c.negate())
        if not piece.is_empty():
            out.append(piece)
        rest = rest.add_constraint(c)
        if rest.is_empty():
            break
    return out


def uncovered(p: HPolyhedron, pieces: Sequence[HPolyhedron]) -> list[HPolyhedron]:
    """Nonempty parts of ``p`` outside the union of ``pieces``."""
    rest = [] if p.is_empty() else [p]
    for q in pieces:
        rest = [r for part in rest for r in subtract(part, q)]
        if not rest:
            break
    return rest


def union_covers(pieces: Sequence[HPolyhedron], target: Sequence[HPolyhedron]) -> bool:
    return all(not uncovered(p, target) for p in pieces)


@dataclass(frozen=True)
class PLGammaSheafSpec:
    arrangement: Arrangement
    support: tuple[HPolyhedron, ...]
    cone: Cone
    boxes: int = 0
    box_vector: Vector | None = None

    def to_json(self) -> dict:
        out = {
            "arrangement": self.arrangement.to_json(),
            "support": [p.to_json() for p in self.support],
            "cone": self.cone.to_json(),
        }
        if self.boxes:
            out["boxes"] = self.boxes
        if self.box_vector is not None:
            out["box_vector"] = [format_rat(a) for a in self.box_vector]
        return out

    @classmethod
    def from_json(cls, data: dict, cone: Cone | None = None) -> "PLGammaSheafSpec":
        cone = cone if cone is not None else Cone.from_json(data["cone"])
        arr = Arrangement.from_json(data.get("arrangement", {"dim": cone.dim}))
        bv = data.get("box_vector")
        return cls(
            arr,
            tuple(HPolyhedron.from_json(p) for p in data.get("support", [])),
            cone,
            int(data.get("boxes", 0)),
            vec(bv) if bv is not None else None,
        )


@dataclass(frozen=True)
class Stratification:
    strata: tuple[HPolyhedron, ...]
    cells: tuple[HPolyhedron, ...] = ()

    def __len__(self) -> int:
        return len(self.strata)

    def to_json(self) -> list[dict]:
        return [dict(z.to_json(), role="stratum") for z in self.strata]


def _boxing_hyperplanes(cone: Cone, v: Vector, levels: int) -> list[Hyperplane]:
    out = []
    for n in cone.normals:
        for m in range(-levels, levels + 1):
            out.append(Hyperplane(n, m * dot(n, v)))
    return out


def stratify(spec: PLGammaSheafSpec) -> Stratification:
    """Strata ``(Ω+γ) ∩ cl(Ω+γ^a)`` over the open cells ``Ω`` inside the support."""
    cone = spec.cone
    if not (cone.is_proper() and cone.is_solid()):
        raise DomainError("cone must be proper with nonempty interior")
    support = [p for p in spec.support if not p.is_empty()]
    for p in support:
        if p.dim != cone.dim:
            raise DomainError("support and cone dimensions differ")
        if not p.is_closed():
            raise DomainError(f"support piece {p} is not closed")
    arr = spec.arrangement
    for p in support:
        arr = arr.extend(facet_hyperplanes(p))
    if spec.boxes:
        v = spec.box_vector
        if v is None:
            v = tuple(sum((r[i] for r in cone.rays), ZERO) for i in range(cone.dim))
        elif not cone.interior().contains(v):
            raise DomainError("boxing vector must lie in the interior of the cone")
        arr = arr.extend(_boxing_hyperplanes(cone, vec(v), spec.boxes))
    bad = arr.incompatible(cone)
    if bad:
        raise DomainError(f"hyperplane {bad[0]} has a normal outside the polar cone and its antipode")
    if not support:
        return Stratification(())
    cells = [c for c in enumerate_cells(arr) if any(c.is_subset(p) for p in support)]
    strata = tuple(omega_to_z(c, cone) for c in cells)
    return Stratification(strata, tuple(cells))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "violations": list(self.violations)}


def validate_stratification(
    strata: Stratification | Sequence[HPolyhedron], target: Sequence[HPolyhedron], cone: Cone
) -> ValidationReport:
    zs = list(strata.strata if isinstance(strata, Stratification) else strata)
    rep = ValidationReport()
    for i, z in enumerate(zs):
        rep.checked += 1
        if z.is_empty():
            rep.violations.append(f"stratum {i} is empty")
            continue
        if not is_gamma_locally_closed(z, cone):
            rep.violations.append(f"stratum {i} is not locally closed for the cone")
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            rep.checked += 1
            w = zs[i].intersect(zs[j]).witness
            if w is not None:
                rep.violations.append(f"strata {i} and {j} meet at {[format_rat(a) for a in w]}")
    closures = [z.closure() for z in zs if not z.is_empty()]
    target = [t for t in target if not t.is_empty()]
    for i, t in enumerate(target):
        rep.checked += 1
        left = uncovered(t, closures)
        if left:
            rep.violations.append(f"support piece {i} not covered near {[format_rat(a) for a in left[0].witness]}")
    for i, c in enumerate(closures):
        rep.checked += 1
        left = uncovered(c, target)
        if left:
            rep.violations.append(f"closure of stratum {i} leaves the support at {[format_rat(a) for a in left[0].witness]}")
    return rep


# barcode sheaves in several variables ------------------------------------


@dataclass(frozen=True)
class Piece:
    region: HPolyhedron
    multiplicity: int = 1
    degree: int = 0


@dataclass(frozen=True)
class BarcodeSheafND:
    """``⊕ k_Z[-degree]^multiplicity`` over cone-locally-closed convex polytopes."""

    dim: int
    pieces: tuple[Piece, ...] = ()

    def __post_init__(self):
        clean = []
        for p in self.pieces:
            p = p if isinstance(p, Piece) else Piece(*p)
            if p.region.dim != self.dim:
                raise DomainError("piece dimension mismatch")
            if p.multiplicity < 0:
                raise DomainError("negative multiplicity")
            if p.multiplicity and not p.region.is_empty():
                clean.append(p)
        object.__setattr__(self, "pieces", tuple(clean))

    @classmethod
    def of(cls, *regions: HPolyhedron, degree: int = 0) -> "BarcodeSheafND":
        return cls(regions[0].dim, tuple(Piece(r, 1, degree) for r in regions))

    def validate(self, cone: Cone) -> list[int]:
        """Indices of pieces that are not cone-locally closed."""
        return [i for i, p in enumerate(self.pieces) if not is_gamma_locally_closed(p.region, cone)]

    def stalk_dims(self, x: Sequence) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in self.pieces:
            if p.region.contains(x):
                out[p.degree] = out.get(p.degree, 0) + p.multiplicity
        return out

    def direct_sum(self, other: "BarcodeSheafND") -> "BarcodeSheafND":
        return BarcodeSheafND(self.dim, self.pieces + other.pieces)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pieces": [
                {"region": p.region.to_json(), "multiplicity": p.multiplicity, "degree": p.degree}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BarcodeSheafND":
        return cls(
            int(data["dim"]),
            tuple(
                Piece(HPolyhedron.from_json(p["region"]), int(p.get("multiplicity", 1)), int(p.get("degree", 0)))
                for p in data.get("pieces", [])
            ),
        )


def hom_dim_nd(s: HPolyhedron, t: HPolyhedron) -> int:
    """1 when ``S ∩ T`` is nonempty, closed in ``S`` and open in ``T``; else 0."""
    both = s.intersect(t)
    if both.is_empty():
        return 0
    # closed in S: cl(S∩T) ∩ S stays inside T
    if not both.closure().intersect(s).is_subset(t):
        return 0
    # open in T: T∖S is closed in T, i.e. no limit point of T∖S lies in S∩T
    for c in s.constraints:
        outside = t.add_constraint(c.negate())
        if not outside.is_empty() and not outside.closure().intersect(both).is_empty():
            return 0
    return 1


@dataclass(frozen=True)
class HomSpace:
    dim: int
    blocks: tuple[tuple[int, int, int], ...]  # (source piece, target piece, block size)

    def to_json(self) -> dict:
        return {"dim": self.dim, "blocks": [list(b) for b in self.blocks]}


def hom_space_nd(a: BarcodeSheafND, b: BarcodeSheafND) -> HomSpace:
    """Morphisms between pieces of equal degree, one block per nonzero pair."""
    blocks = []
    for i, p in enumerate(a.pieces):
        for j, q in enumerate(b.pieces):
            if p.degree == q.degree and hom_dim_nd(p.region, q.region):
                blocks.append((i, j, p.multiplicity * q.multiplicity))
    return HomSpace(sum(k for _, _, k in blocks), tuple(blocks))


def compose_generators(s: HPolyhedron, t: HPolyhedron, u: HPolyhedron) -> bool:
    """Whether the composite of the generators ``k_S → k_T → k_U`` is the generator of ``Hom(k_S, k_U)``."""
    if not (hom_dim_nd(s, t) and hom_dim_nd(t, u) and hom_dim_nd(s, u)):
        return False
    return s.intersect(u).is_subset(t)


def tensor_nd(a: BarcodeSheafND, b: BarcodeSheafND) -> BarcodeSheafND:
    pieces = []
    for p in a.pieces:
        for q in b.pieces:
            region = p.region.intersect(q.region)
            if not region.is_empty():
                pieces.append(Piece(region.canonical(), p.multiplicity * q.multiplicity, p.degree + q.degree))
    return BarcodeSheafND(a.dim, tuple(pieces))


def maps_cone_into(matrix: Sequence[Sequence], source: Cone, target: Cone) -> bool:
    m = [vec(r) for r in matrix]
    return all(target.contains(tuple(dot(row, r) for row in m)) for r in source.rays)


def pullback_linear(
    matrix: Sequence[Sequence],
    b: BarcodeSheafND,
    source_cone: Cone | None = None,
    target_cone: Cone | None = None,
) -> tuple[BarcodeSheafND, bool | None]:
    """Preimages of the pieces under ``x ↦ matrix @ x``.

    The flag reports whether the source cone is mapped into the target cone
    (None when no cones are given); without it the result is only PL.
    """
    m = [vec(r) for r in matrix]
    if len(m) != b.dim:
        raise DomainError("matrix rows must match the target dimension")
    src = len(m[0]) if m else 0
    zero = tuple(ZERO for _ in range(b.dim))
    pieces = tuple(Piece(p.region.preimage(m, zero).canonical(), p.multiplicity, p.degree) for p in b.pieces)
    ok = None
    if source_cone is not None and target_cone is not None:
        ok = maps_cone_into(m, source_cone, target_cone)
    return BarcodeSheafND(src, pieces), ok


def quadrant_fixture() -> dict:
    """Three translated closed quadrants; the kernel of ``k_A ⊕ k_B → k_C`` is indecomposable."""
    g = Cone.negative_orthant(2)

    def up(p):
        return HPolyhedron.from_halfspaces(2, [((-1, 0), -p[0], False), ((0, -1), -p[1], False)])

    return {"cone": g, "A": up((1, 0)), "B": up((0, 1)), "C": up((2, 2))}


def twisted_fixture() -> dict:
    """Cone ``x <= -(|y|+|z|)`` and the four convex pieces of ``(S + γ^a) ∩ {x < 1}``
    for the square loop ``S = {x = 0, |y|+|z| = 1}``; a locally constant
    nonconstant twist of ``k_Z`` is not a sum of constant sheaves."""
    g = Cone.from_rays([(-1, 1, 0), (-1, -1, 0), (-1, 0, 1), (-1, 0, -1)])
    ga = g.antipodal()

    corners = [(0, 1, 0), (0, 0, 1), (0, -1, 0), (0, 0, -1)]
    pieces = []
    for k in range(4):
        p, q = corners[k], corners[(k + 1) % 4]
        # segment from p to q inside the plane x = 0
        n = (0, q[2] - p[2], -(q[1] - p[1]))
        seg = HPolyhedron.from_halfspaces(
            3,
            [
                ((1, 0, 0), 0, False),
                ((-1, 0, 0), 0, False),
                (n, dot(vec(n), vec(p)), False),
                (tuple(-a for a in n), -dot(vec(n), vec(p)), False),
                (tuple(a - b for a, b in zip(p, q)), dot(vec(tuple(a - b for a, b in zip(p, q))), vec(p)), False),
                (tuple(b - a for a, b in zip(p, q)), dot(vec(tuple(b - a for a, b in zip(p, q))), vec(q)), False),
            ],
        )
        piece = minkowski_cone(seg, ga).add_constraint(HalfSpace((1, 0, 0), 1, True))
        pieces.append(piece.canonical())
    return {"cone": g, "pieces": pieces}


__all__ = [
    "Arrangement",
    "BarcodeSheafND",
    "HomSpace",
    "Hyperplane",
    "PLGammaSheafSpec",
    "Piece",
    "Stratification",
    "ValidationReport",
    "compose_generators",
    "enumerate_cells",
    "enumerate_faces",
    "facet_hyperplanes",
    "hom_dim_nd",
    "hom_space_nd",
    "maps_cone_into",
    "pullback_linear",
    "quadrant_fixture",
    "stratify",
    "subtract",
    "tensor_nd",
    "twisted_fixture",
    "uncovered",
    "union_covers",
    "validate_stratification",
]
