"""Intervals, barcodes and the barcode category on the real line.

A ``Barcode`` is a canonical multiset of intervals.  A ``GradedBarcode`` adds a
cohomological degree, so it stands for a split complex ``⊕_j H^j[-j]``.
Morphisms between barcodes are block matrices indexed by pairs of bars.  A block
may be nonzero only where the interval Hom space is one-dimensional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .foundations import (
    NEG_INF,
    POS_INF,
    DomainError,
    ExtRat,
    Field,
    Matrix,
    RatLike,
    default_field,
)

Endpoint = ExtRat | RatLike


@dataclass(frozen=True)
class Interval:
    lower: ExtRat
    upper: ExtRat
    lower_closed: bool
    upper_closed: bool

    def __post_init__(self) -> None:
        lo, hi = ExtRat.of(self.lower), ExtRat.of(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if (not lo.is_finite and self.lower_closed) or (not hi.is_finite and self.upper_closed):
            raise ValueError("an infinite endpoint cannot be closed")
        if lo == POS_INF or hi == NEG_INF:
            raise ValueError("interval endpoints out of order")
        if hi < lo or (lo == hi and not (self.lower_closed and self.upper_closed)):
            raise ValueError(f"empty interval {_fmt(lo, hi, self.lower_closed, self.upper_closed)}")

    # constructors -----------------------------------------------------------
    @staticmethod
    def make(lower: Endpoint, upper: Endpoint, lower_closed: bool, upper_closed: bool) -> "Interval":
        lo, hi = ExtRat.of(lower), ExtRat.of(upper)
        return Interval(lo, hi, lower_closed and lo.is_finite, upper_closed and hi.is_finite)

    @staticmethod
    def closed(a: Endpoint, b: Endpoint) -> "Interval":
        return Interval.make(a, b, True, True)

    @staticmethod
    def open(a: Endpoint, b: Endpoint) -> "Interval":
        return Interval.make(a, b, False, False)

    @staticmethod
    def gamma_bar(a: Endpoint, b: Endpoint) -> "Interval":
        """The half-open bar ``[a, b)`` (open at an infinite birth)."""
        return Interval.make(a, b, True, False)

    @staticmethod
    def point(x: Endpoint) -> "Interval":
        return Interval.make(x, x, True, True)

    @staticmethod
    def real_line() -> "Interval":
        return Interval(NEG_INF, POS_INF, False, False)

    @staticmethod
    def parse(text: str) -> "Interval":
        """Parse ``[0,2)``, ``(-inf,1/2]`` or ``{3}``."""
        text = text.strip()
        m = re.fullmatch(r"\{\s*([^}]+)\s*\}", text)
        if m:
            return Interval.point(m.group(1))
        m = re.fullmatch(r"([\[(])\s*([^,]+?)\s*,\s*([^\])]+?)\s*([\])])", text)
        if not m:
            raise ValueError(f"cannot parse interval {text!r}")
        return Interval.make(m.group(2), m.group(3), m.group(1) == "[", m.group(4) == "]")

    # predicates -------------------------------------------------------------
    @property
    def is_point(self) -> bool:
        return self.lower == self.upper

    @property
    def is_gamma_bar(self) -> bool:
        return (self.lower_closed or not self.lower.is_finite) and not self.upper_closed

    @property
    def is_bounded(self) -> bool:
        return self.lower.is_finite and self.upper.is_finite

    @property
    def bounded_above(self) -> bool:
        return self.upper.is_finite

    @property
    def bounded_below(self) -> bool:
        return self.lower.is_finite

    @property
    def is_compact(self) -> bool:
        return self.lower_closed and self.upper_closed

    @property
    def is_open(self) -> bool:
        return not self.lower_closed and not self.upper_closed

    def contains(self, x: Endpoint) -> bool:
        x = ExtRat.of(x)
        if not x.is_finite:
            return False
        above = self.lower < x or (self.lower == x and self.lower_closed)
        below = x < self.upper or (x == self.upper and self.upper_closed)
        return above and below

    def contains_left_of(self, x: Endpoint) -> bool:
        """True when all points slightly to the left of ``x`` lie in the interval."""
        x = ExtRat.of(x)
        return self.lower < x and x <= self.upper

    def contains_right_of(self, x: Endpoint) -> bool:
        x = ExtRat.of(x)
        return self.lower <= x and x < self.upper

    def finite_endpoints(self) -> list[Fraction]:
        return [e.value for e in (self.lower, self.upper) if e.is_finite]

    def intersect(self, other: "Interval") -> "Interval | None":
        if self.lower > other.lower:
            lo, lc = self.lower, self.lower_closed
        elif self.lower < other.lower:
            lo, lc = other.lower, other.lower_closed
        else:
            lo, lc = self.lower, self.lower_closed and other.lower_closed
        if self.upper < other.upper:
            hi, uc = self.upper, self.upper_closed
        elif self.upper > other.upper:
            hi, uc = other.upper, other.upper_closed
        else:
            hi, uc = self.upper, self.upper_closed and other.upper_closed
        if lo < hi or (lo == hi and lc and uc):
            return Interval(lo, hi, lc, uc)
        return None

    def is_subset(self, other: "Interval") -> bool:
        return self.intersect(other) == self

    def closed_in(self, ambient: "Interval") -> bool:
        """Whether ``self`` (assumed contained in ``ambient``) is relatively closed."""
        if self.lower.is_finite and not self.lower_closed and ambient.contains(self.lower):
            return False
        if self.upper.is_finite and not self.upper_closed and ambient.contains(self.upper):
            return False
        return True

    def open_in(self, ambient: "Interval") -> bool:
        """Whether ``self`` (assumed contained in ``ambient``) is relatively open."""
        if self.lower.is_finite and self.lower_closed and ambient.lower != self.lower:
            return False
        if self.upper.is_finite and self.upper_closed and ambient.upper != self.upper:
            return False
        return True

    def translate(self, t: RatLike) -> "Interval":
        return Interval(self.lower + t, self.upper + t, self.lower_closed, self.upper_closed)

    def sort_key(self) -> tuple:
        return (self.lower, self.lower_closed, self.upper, self.upper_closed)

    def __lt__(self, other: "Interval") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return _fmt(self.lower, self.upper, self.lower_closed, self.upper_closed)

    def __repr__(self) -> str:
        return f"Interval({self})"

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "lower_closed": self.lower_closed,
            "upper_closed": self.upper_closed,
        }

    @staticmethod
    def from_json(obj: Mapping) -> "Interval":
        return Interval.make(
            ExtRat.of(str(obj["lower"])),
            ExtRat.of(str(obj["upper"])),
            bool(obj["lower_closed"]),
            bool(obj["upper_closed"]),
        )


def _fmt(lo: ExtRat, hi: ExtRat, lc: bool, uc: bool) -> str:
    if lo == hi and lc and uc:
        return "{" + lo.to_json() + "}"
    return f"{'[' if lc else '('}{lo.to_json()},{hi.to_json()}{']' if uc else ')'}"


# ----------------------------------------------------------------------------
# Barcodes


@dataclass(frozen=True)
class Barcode:
    """Canonical multiset of intervals: sorted, distinct, positive multiplicities."""

    bars: tuple[tuple[Interval, int], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[Interval, int] = {}
        for interval, mult in self.bars:
            if mult < 0:
                raise ValueError("multiplicities must be nonnegative")
            if mult:
                merged[interval] = merged.get(interval, 0) + mult
        canon = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key()))
        object.__setattr__(self, "bars", canon)

    @staticmethod
    def of(items: Iterable[Interval | tuple[Interval, int] | str]) -> "Barcode":
        bars = []
        for item in items:
            if isinstance(item, str):
                bars.append((Interval.parse(item), 1))
            elif isinstance(item, Interval):
                bars.append((item, 1))
            else:
                bars.append((item[0], int(item[1])))
        return Barcode(tuple(bars))

    def expanded(self) -> list[Interval]:
        return [i for i, m in self.bars for _ in range(m)]

    def intervals(self) -> list[Interval]:
        return [i for i, _ in self.bars]

    def multiplicity(self, interval: Interval) -> int:
        return dict(self.bars).get(interval, 0)

    def __len__(self) -> int:
        return sum(m for _, m in self.bars)

    def __bool__(self) -> bool:
        return bool(self.bars)

    @property
    def is_gamma(self) -> bool:
        return all(i.is_gamma_bar for i, _ in self.bars)

    def finite_endpoints(self) -> list[Fraction]:
        return sorted({e for i, _ in self.bars for e in i.finite_endpoints()})

    def __str__(self) -> str:
        parts = [str(i) if m == 1 else f"{i}x{m}" for i, m in self.bars]
        return "{" + ", ".join(parts) + "}"

    def to_json(self) -> dict:
        return {"bars": [dict(i.to_json(), mult=m) for i, m in self.bars]}

    @staticmethod
    def from_json(obj: Mapping) -> "Barcode":
        return Barcode(tuple((Interval.from_json(b), int(b.get("mult", 1))) for b in obj["bars"]))


def direct_sum(a: Barcode, b: Barcode) -> Barcode:
    return Barcode(a.bars + b.bars)


@dataclass(frozen=True)
class GradedBarcode:
    """Finitely many barcodes indexed by cohomological degree."""

    components: tuple[tuple[int, Barcode], ...] = ()

    def __post_init__(self) -> None:
        acc: dict[int, Barcode] = {}
        for degree, bc in self.components:
            acc[degree] = direct_sum(acc.get(degree, Barcode()), bc)
        canon = tuple(sorted((d, b) for d, b in acc.items() if b))
        object.__setattr__(self, "components", canon)

    @staticmethod
    def from_bars(items: Iterable[tuple[Interval, int] | tuple[Interval, int, int]]) -> "GradedBarcode":
        """Build from ``(interval, degree)`` or ``(interval, degree, mult)`` triples."""
        comps = []
        for item in items:
            interval, degree = item[0], item[1]
            mult = item[2] if len(item) > 2 else 1
            comps.append((degree, Barcode(((interval, mult),))))
        return GradedBarcode(tuple(comps))

    @staticmethod
    def concentrated(barcode: Barcode, degree: int = 0) -> "GradedBarcode":
        return GradedBarcode(((degree, barcode),))

    @staticmethod
    def single(interval: Interval | str, degree: int = 0) -> "GradedBarcode":
        if isinstance(interval, str):
            interval = Interval.parse(interval)
        return GradedBarcode(((degree, Barcode(((interval, 1),))),))

    @staticmethod
    def zero() -> "GradedBarcode":
        return GradedBarcode()

    def degrees(self) -> list[int]:
        return [d for d, _ in self.components]

    def __getitem__(self, degree: int) -> Barcode:
        return dict(self.components).get(degree, Barcode())

    def bars(self) -> list[tuple[Interval, int]]:
        """Expanded list of ``(interval, degree)``, one entry per copy."""
        return [(i, d) for d, bc in self.components for i in bc.expanded()]

    def total_bars(self) -> int:
        return sum(len(bc) for _, bc in self.components)

    def is_zero(self) -> bool:
        return not self.components

    def shift(self, n: int) -> "GradedBarcode":
        """``F[n]``: a bar in degree ``j`` moves to degree ``j - n``."""
        return GradedBarcode(tuple((d - n, bc) for d, bc in self.components))

    def direct_sum(self, other: "GradedBarcode") -> "GradedBarcode":
        return GradedBarcode(self.components + other.components)

    def finite_endpoints(self) -> list[Fraction]:
        return sorted({e for _, bc in self.components for e in bc.finite_endpoints()})

    @property
    def is_gamma(self) -> bool:
        return all(bc.is_gamma for _, bc in self.components)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return " + ".join(f"{bc}[{-d}]" if d else str(bc) for d, bc in self.components)

    def to_json(self) -> dict:
        bars = []
        for d, bc in self.components:
            for i, m in bc.bars:
                bars.append(dict(i.to_json(), mult=m, degree=d))
        return {"bars": bars}

    @staticmethod
    def from_json(obj: Mapping) -> "GradedBarcode":
        return GradedBarcode.from_bars(
            (Interval.from_json(b), int(b.get("degree", 0)), int(b.get("mult", 1))) for b in obj["bars"]
        )


# ----------------------------------------------------------------------------
# Hom spaces and composition


def hom_dim(i: Interval, j: Interval) -> int:
    """Dimension of ``Hom(k_i, k_j)``: one iff the overlap is closed in ``i`` and open in ``j``."""
    if i.is_gamma_bar and j.is_gamma_bar:
        return int(i.lower <= j.lower < i.upper <= j.upper)
    meet = i.intersect(j)
    if meet is None:
        return 0
    return int(meet.closed_in(i) and meet.open_in(j))


def generator_composite(i: Interval, j: Interval, l: Interval) -> int:
    """Coefficient of the composite of canonical generators ``k_i -> k_j -> k_l``.

    A map ``k_i -> k_l`` is constant on the connected overlap, so the composite is
    the generator exactly when the overlap of ``i`` and ``l`` passes through ``j``.
    """
    if not (hom_dim(i, j) and hom_dim(j, l) and hom_dim(i, l)):
        return 0
    meet = i.intersect(l)
    return int(meet is not None and meet.is_subset(j))


@dataclass(frozen=True)
class BarcodeMorphism:
    """Block matrix; block ``(s, t)`` has one row per copy of source bar ``s``."""

    source: Barcode
    target: Barcode
    blocks: Mapping[tuple[int, int], Matrix] = field(default_factory=dict)
    field_: Field = field(default_factory=default_field)

    def __post_init__(self) -> None:
        clean = {}
        for (s, t), block in self.blocks.items():
            si, sm = self.source.bars[s]
            ti, tm = self.target.bars[t]
            if block.shape != (sm, tm):
                raise ValueError(f"block {(s, t)} has shape {block.shape}, expected {(sm, tm)}")
            if block.field is not self.field_:
                raise DomainError("field mismatch in morphism block")
            if block.is_zero():
                continue
            if not hom_dim(si, ti):
                raise DomainError(f"no nonzero morphism {si} -> {ti}")
            clean[(s, t)] = block
        object.__setattr__(self, "blocks", dict(sorted(clean.items())))

    @staticmethod
    def identity(barcode: Barcode, field_: Field | None = None) -> "BarcodeMorphism":
        f = field_ or default_field()
        blocks = {(k, k): Matrix.identity(f, m) for k, (_, m) in enumerate(barcode.bars)}
        return BarcodeMorphism(barcode, barcode, blocks, f)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BarcodeMorphism):
            return NotImplemented
        return (self.source, self.target, self.field_, self.blocks) == (
            other.source,
            other.target,
            other.field_,
            other.blocks,
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, tuple(self.blocks.items())))


def compose(u: BarcodeMorphism, v: BarcodeMorphism) -> BarcodeMorphism:
    """``v ∘ u`` written in diagrammatic order: first ``u``, then ``v``."""
    if u.target != v.source:
        raise ValueError("compose: target of the first map differs from source of the second")
    if u.field_ is not v.field_:
        raise DomainError("field mismatch in compose")
    f = u.field_
    by_middle: dict[int, list[tuple[int, Matrix]]] = {}
    for (b, c), block in v.blocks.items():
        by_middle.setdefault(b, []).append((c, block))
    out: dict[tuple[int, int], Matrix] = {}
    for (a, b), ub in u.blocks.items():
        for c, vb in by_middle.get(b, []):
            coeff = generator_composite(u.source.bars[a][0], u.target.bars[b][0], v.target.bars[c][0])
            if not coeff:
                continue
            prod = ub @ vb
            out[(a, c)] = out[(a, c)] + prod if (a, c) in out else prod
    return BarcodeMorphism(u.source, v.target, out, f)


def psi_stalk_rank(b: Barcode, x: Endpoint, side: str = "at") -> int:
    """Stalk dimension of ``⊕ k_I`` at ``x`` or just to its left/right."""
    x = ExtRat.of(x)
    if not x.is_finite:
        raise ValueError("stalk rank needs a finite point")
    test = {
        "at": Interval.contains,
        "left_limit": Interval.contains_left_of,
        "right_limit": Interval.contains_right_of,
    }.get(side)
    if test is None:
        raise ValueError(f"unknown side {side!r}")
    return sum(m for i, m in b.bars if test(i, x))
