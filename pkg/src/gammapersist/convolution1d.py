"""Convolution on the line, the kernels ``K_a`` and the convolution distance.

Single-pair products use the slice rule: the stalk of ``k_I ⋆ k_J`` at ``t`` is
the compactly supported cohomology of the fiber ``I ∩ (t − J)``.  A compact
fiber contributes in degree 0, an open one in degree 1, a half-open one not
at all.

The a-isomorphism decision works with "shifted bars" ``(interval, degree)``.
Morphisms between shifted bars are Hom or Ext^1 classes; all spaces are at
most one-dimensional, so over F2 a morphism is a 0/1 coefficient per pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable

import networkx as nx

from .barcodes1d import GradedBarcode, Interval, generator_composite, hom_dim
from .cellular1d import (
    CriticalGrid,
    global_sections,
    interval_ext,
    module_from_barcode,
    rhom_complex,
)
from .barcodes1d import Barcode
from .foundations import (
    POS_INF,
    DomainError,
    ExtRat,
    Field,
    Matrix,
    RatLike,
    format_rat,
    lowest_bit,
    rat,
)

ShiftedBar = tuple[Interval, int]

DEFAULT_EXACT_BOUND = 8


class NonProperConvolution(DomainError):
    pass


# ----------------------------------------------------------------------------
# Slice rule


def _fiber(i: Interval, j: Interval, t: Fraction) -> Interval | None:
    """``I ∩ (t − J)``."""
    reflected = Interval.make(ExtRat.of(t) - j.upper, ExtRat.of(t) - j.lower, j.upper_closed, j.lower_closed)
    return i.intersect(reflected)


def _fiber_degree(fiber: Interval | None) -> int | None:
    if fiber is None:
        return None
    if fiber.is_compact:
        return 0
    if fiber.is_open:
        return 1
    return None


def _check_proper(i: Interval, j: Interval) -> None:
    if (not i.bounded_above and not j.bounded_below) or (not i.bounded_below and not j.bounded_above):
        raise NonProperConvolution(f"non-proper convolution: {i} ⋆ {j}")


@lru_cache(maxsize=None)
def convolve_intervals(i: Interval, j: Interval) -> tuple[ShiftedBar, ...]:
    """``k_I ⋆ k_J`` as shifted bars (at most one per degree)."""
    _check_proper(i, j)
    breaks = sorted(
        {x.value + y.value for x in (i.lower, i.upper) for y in (j.lower, j.upper) if x.is_finite and y.is_finite}
    )
    grid = CriticalGrid(tuple(breaks))
    by_degree: dict[int, list[int]] = {}
    for cell in range(grid.n_cells):
        deg = _fiber_degree(_fiber(i, j, grid.cell_sample(cell)))
        if deg is not None:
            by_degree.setdefault(deg, []).append(cell)
    out = []
    for deg, cells in sorted(by_degree.items()):
        if cells != list(range(cells[0], cells[-1] + 1)):
            raise AssertionError(f"disconnected degree-{deg} support in {i} ⋆ {j}")
        lo, lc = grid.lower_endpoint(cells[0])
        hi, uc = grid.upper_endpoint(cells[-1])
        out.append((Interval.make(lo, hi, lc, uc), deg))
    return tuple(out)


def convolve(f: GradedBarcode, g: GradedBarcode) -> GradedBarcode:
    parts = []
    for i, di in f.bars():
        for j, dj in g.bars():
            for interval, deg in convolve_intervals(i, j):
                parts.append((interval, di + dj + deg, 1))
    return GradedBarcode.from_bars(parts)


def kernel(a: RatLike) -> GradedBarcode:
    """``K_a``: the closed ball of radius ``a`` for ``a >= 0``, the open ball
    of radius ``-a`` placed in degree -1 for ``a < 0``."""
    a = rat(a)
    if a >= 0:
        return GradedBarcode.single(Interval.closed(-a, a), 0)
    return GradedBarcode.single(Interval.open(a, -a), -1)


def _kernel_bar(a: Fraction) -> ShiftedBar:
    return kernel(a).bars()[0]


@lru_cache(maxsize=None)
def shift_by_kernel(a: Fraction, bar: ShiftedBar) -> ShiftedBar:
    """``K_a ⋆ bar``; always a single shifted bar because ``K_a ⋆`` is an equivalence."""
    k_interval, k_degree = _kernel_bar(a)
    pieces = convolve_intervals(k_interval, bar[0])
    if len(pieces) != 1:
        raise AssertionError(f"K_{a} ⋆ {bar[0]} is not a single bar")
    interval, deg = pieces[0]
    return interval, bar[1] + k_degree + deg


# ----------------------------------------------------------------------------
# Morphisms between shifted bars


def morphism_kind(x: ShiftedBar, y: ShiftedBar) -> int | None:
    """0 for a Hom class, 1 for an Ext^1 class, None when ``Hom_D(x, y) = 0``."""
    e = x[1] - y[1]
    if e == 0:
        return 0 if hom_dim(x[0], y[0]) else None
    if e == 1:
        dim = interval_ext(x[0], y[0])[1]
        if dim > 1:
            raise AssertionError("Ext^1 between intervals exceeds one")
        return 1 if dim else None
    return None


def _bar_on(interval: Interval, grid: CriticalGrid):
    return module_from_barcode(Barcode(((interval, 1),)), grid, Field.F2)


@lru_cache(maxsize=None)
def _chain_composite(i: Interval, j: Interval, l: Interval, ext_first: bool) -> int:
    """Composite of generators when exactly one factor is an Ext^1 class.

    ``ext_first`` selects ``Hom(J, L) ∘ Ext^1(I, J)``; otherwise
    ``Ext^1(J, L) ∘ Hom(I, J)``.  Products are formed on cochains over a
    common grid and the result is tested against the coboundaries.
    """
    grid = CriticalGrid(tuple(sorted({*i.finite_endpoints(), *j.finite_endpoints(), *l.finite_endpoints()})))
    mi, mj, ml = (_bar_on(x, grid) for x in (i, j, l))
    arrows = mi.arrows()

    def ext_generator(src, tgt) -> dict[int, int]:
        cx = rhom_complex(src, tgt)
        full = cx.restrict(set(range(grid.n_cells)), set(range(len(arrows))))[2]
        _, pivots = full.transpose().rref()
        free = [k for k in range(len(cx.c1)) if k not in set(pivots)]
        return {cx.c1[free[0]][0]: 1}

    if ext_first:
        e = ext_generator(mi, mj)
        # post-compose with the Hom generator J -> L, which is 1 on cells of J ∩ L
        vec = {a: v for a, v in e.items() if mj.dims[arrows[a][1]] and ml.dims[arrows[a][1]]}
    else:
        e = ext_generator(mj, ml)
        vec = {a: v for a, v in e.items() if mi.dims[arrows[a][0]] and mj.dims[arrows[a][0]]}
    cx = rhom_complex(mi, ml)
    full = cx.restrict(set(range(grid.n_cells)), set(range(len(arrows))))[2]
    target = [1 if cx.c1[k][0] in vec else 0 for k in range(len(cx.c1))]
    rank_before = full.rank()
    augmented = full.hstack(Matrix.from_columns(Field.F2, len(cx.c1), [target]))
    return int(augmented.rank() > rank_before)


def composite(x: ShiftedBar, y: ShiftedBar, z: ShiftedBar) -> int:
    """Coefficient of (generator y→z) ∘ (generator x→y) on the generator x→z."""
    k1, k2 = morphism_kind(x, y), morphism_kind(y, z)
    if k1 is None or k2 is None or k1 + k2 > 1 or morphism_kind(x, z) is None:
        return 0
    if k1 == 0 and k2 == 0:
        return generator_composite(x[0], y[0], z[0])
    return _chain_composite(x[0], y[0], z[0], ext_first=(k1 == 1))


def chi_coefficient(c: Fraction, bar: ShiftedBar) -> int:
    """Coefficient of ``χ_{0,c} ⋆ k_I``; nonzero exactly when the target space is."""
    if c < 0:
        raise ValueError("chi needs a nonnegative radius")
    return int(morphism_kind(shift_by_kernel(c, bar), bar) is not None)


@dataclass(frozen=True)
class ChiMorphism:
    """``χ_{b,a} ⋆ F`` as coefficients between matching shifted bars."""

    b: Fraction
    a: Fraction
    components: tuple[tuple[ShiftedBar, ShiftedBar, int], ...]

    def is_zero(self) -> bool:
        return not any(c for _, _, c in self.components)


def chi(b: RatLike, a: RatLike, f: GradedBarcode) -> ChiMorphism:
    b, a = rat(b), rat(a)
    if a < b:
        raise DomainError("chi(b, a) requires a >= b")
    comps = []
    for bar in f.bars():
        src = shift_by_kernel(a, bar)
        tgt = shift_by_kernel(b, bar)
        comps.append((src, tgt, chi_coefficient(a - b, bar)))
    return ChiMorphism(b, a, tuple(comps))


def compose_chi(first: ChiMorphism, second: ChiMorphism) -> ChiMorphism:
    """``second ∘ first`` for ``first = χ_{b,a}`` and ``second = χ_{c,b}``."""
    if first.b != second.a or len(first.components) != len(second.components):
        raise ValueError("chi morphisms are not composable")
    comps = []
    for (x, y, c1), (y2, z, c2) in zip(first.components, second.components):
        if y != y2:
            raise ValueError("chi morphisms are not composable")
        comps.append((x, z, c1 * c2 * composite(x, y, z)))
    return ChiMorphism(second.b, first.a, tuple(comps))


# ----------------------------------------------------------------------------
# a-isomorphism


@dataclass(frozen=True)
class _Setup:
    a: Fraction
    fbars: tuple[ShiftedBar, ...]
    gbars: tuple[ShiftedBar, ...]

    def __post_init__(self) -> None:
        a = self.a
        object.__setattr__(self, "f1", tuple(shift_by_kernel(a, x) for x in self.fbars))
        object.__setattr__(self, "f2", tuple(shift_by_kernel(2 * a, x) for x in self.fbars))
        object.__setattr__(self, "g1", tuple(shift_by_kernel(a, y) for y in self.gbars))
        object.__setattr__(self, "g2", tuple(shift_by_kernel(2 * a, y) for y in self.gbars))
        object.__setattr__(self, "chi_f", tuple(chi_coefficient(2 * a, x) for x in self.fbars))
        object.__setattr__(self, "chi_g", tuple(chi_coefficient(2 * a, y) for y in self.gbars))
        f_slots = [
            (p, q) for p in range(len(self.fbars)) for q in range(len(self.gbars)) if morphism_kind(self.f1[p], self.gbars[q]) is not None
        ]
        g_slots = [
            (q, p) for q in range(len(self.gbars)) for p in range(len(self.fbars)) if morphism_kind(self.g1[q], self.fbars[p]) is not None
        ]
        object.__setattr__(self, "f_slots", tuple(f_slots))
        object.__setattr__(self, "g_slots", tuple(g_slots))

    def c1(self, p: int, q: int, r: int) -> int:
        """K_{2a}⋆F_p → K_a⋆G_q → F_r."""
        return composite(self.f2[p], self.g1[q], self.fbars[r])

    def c2(self, q: int, p: int, s: int) -> int:
        """K_{2a}⋆G_q → K_a⋆F_p → G_s."""
        return composite(self.g2[q], self.f1[p], self.gbars[s])


@dataclass(frozen=True)
class InterleavingWitness:
    """Maps ``f: K_a⋆F → G`` and ``g: K_a⋆G → F`` satisfying both composition
    identities.  ``f`` and ``g`` list the nonzero components ``(source, target)``
    between expanded bars; each component is a Hom or an Ext^1 class."""

    a: Fraction
    fbars: tuple[ShiftedBar, ...]
    gbars: tuple[ShiftedBar, ...]
    f: frozenset[tuple[int, int]]
    g: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        problems = _violations(_Setup(self.a, self.fbars, self.gbars), self.f, self.g)
        if problems:
            raise AssertionError(f"invalid interleaving witness: {problems[:3]}")

    def component_kinds(self) -> tuple[dict, dict]:
        s = _Setup(self.a, self.fbars, self.gbars)
        fk = {pq: morphism_kind(s.f1[pq[0]], s.gbars[pq[1]]) for pq in self.f}
        gk = {qp: morphism_kind(s.g1[qp[0]], s.fbars[qp[1]]) for qp in self.g}
        return fk, gk

    def to_json(self) -> dict:
        fk, gk = self.component_kinds()

        def bars(items):
            return [dict(i.to_json(), degree=d) for i, d in items]

        def comps(items, kinds):
            return [{"from": s, "to": t, "kind": "hom" if kinds[(s, t)] == 0 else "ext1", "coeff": 1} for s, t in sorted(items)]

        return {
            "a": format_rat(self.a),
            "source_bars": bars(self.fbars),
            "target_bars": bars(self.gbars),
            "f": comps(self.f, fk),
            "g": comps(self.g, gk),
        }


def _violations(s: _Setup, f: Iterable[tuple[int, int]], g: Iterable[tuple[int, int]]) -> list[str]:
    f, g = set(f), set(g)
    if not f <= set(s.f_slots) or not g <= set(s.g_slots):
        return ["component outside the nonzero Hom spaces"]
    out = []
    nf, ng = len(s.fbars), len(s.gbars)
    g_from: dict[int, list[int]] = {}
    for q, r in g:
        g_from.setdefault(q, []).append(r)
    f_from: dict[int, list[int]] = {}
    for p, q in f:
        f_from.setdefault(p, []).append(q)
    for p in range(nf):
        acc = [0] * nf
        for q in f_from.get(p, []):
            for r in g_from.get(q, []):
                acc[r] ^= s.c1(p, q, r)
        for r in range(nf):
            want = s.chi_f[p] if r == p else 0
            if morphism_kind(s.f2[p], s.fbars[r]) is None:
                continue
            if acc[r] != want:
                out.append(f"F side ({p},{r})")
    for q in range(ng):
        acc = [0] * ng
        for p in g_from.get(q, []):
            for t in f_from.get(p, []):
                acc[t] ^= s.c2(q, p, t)
        for t in range(ng):
            want = s.chi_g[q] if t == q else 0
            if morphism_kind(s.g2[q], s.gbars[t]) is None:
                continue
            if acc[t] != want:
                out.append(f"G side ({q},{t})")
    return out


def _matching_witness(s: _Setup) -> InterleavingWitness | None:
    nf, ng = len(s.fbars), len(s.gbars)
    f_slots, g_slots = set(s.f_slots), set(s.g_slots)
    graph = nx.Graph()
    # every bar gets a diagonal partner; only bars killed by chi may use it
    left = [("f", p) for p in range(nf)] + [("gd", q) for q in range(ng)]
    right = [("g", q) for q in range(ng)] + [("fd", p) for p in range(nf)]
    graph.add_nodes_from(left)
    graph.add_nodes_from(right)
    for p in range(nf):
        for q in range(ng):
            if (p, q) in f_slots and (q, p) in g_slots and s.c1(p, q, p) == s.chi_f[p] and s.c2(q, p, q) == s.chi_g[q]:
                graph.add_edge(("f", p), ("g", q))
        if not s.chi_f[p]:
            graph.add_edge(("f", p), ("fd", p))
    for q in range(ng):
        if not s.chi_g[q]:
            graph.add_edge(("gd", q), ("g", q))
        for p in range(nf):
            graph.add_edge(("gd", q), ("fd", p))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    if any(node not in matching for node in left):
        return None
    pairs = [(node[1], matching[node][1]) for node in left if node[0] == "f" and matching[node][0] == "g"]
    try:
        return InterleavingWitness(s.a, s.fbars, s.gbars, frozenset(pairs), frozenset((q, p) for p, q in pairs))
    except AssertionError:
        return None


def _solve_f2(rows: list[int], n: int) -> int | None:
    """Solve equations packed as bitmasks (bits 0..n-1 unknowns, bit n the rhs)."""
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            p = lowest_bit(row)
            if p == n:
                return None
            if p in pivots:
                row ^= pivots[p]
            else:
                pivots[p] = row
                break
    solution = 0
    for p in sorted(pivots, reverse=True):
        row = pivots[p]
        val = (row >> n) & 1
        rest = row & ~(1 << p) & ((1 << n) - 1)
        val ^= bin(rest & solution).count("1") & 1
        if val:
            solution |= 1 << p
    return solution


def _exhaustive_witness(s: _Setup) -> InterleavingWitness | None:
    nf, ng = len(s.fbars), len(s.gbars)
    g_slots = list(s.g_slots)
    g_index = {slot: k for k, slot in enumerate(g_slots)}
    n = len(g_slots)
    f_targets = [(p, r) for p in range(nf) for r in range(nf) if morphism_kind(s.f2[p], s.fbars[r]) is not None]
    g_targets = [(q, t) for q in range(ng) for t in range(ng) if morphism_kind(s.g2[q], s.gbars[t]) is not None]
    for choice in product((0, 1), repeat=len(s.f_slots)):
        f = {slot for slot, bit in zip(s.f_slots, choice) if bit}
        rows = []
        for p, r in f_targets:
            row = 0
            for q in range(ng):
                if (p, q) in f and (q, r) in g_index and s.c1(p, q, r):
                    row ^= 1 << g_index[(q, r)]
            if (s.chi_f[p] if p == r else 0):
                row ^= 1 << n
            rows.append(row)
        for q, t in g_targets:
            row = 0
            for p in range(nf):
                if (p, t) in f and (q, p) in g_index and s.c2(q, p, t):
                    row ^= 1 << g_index[(q, p)]
            if (s.chi_g[q] if q == t else 0):
                row ^= 1 << n
            rows.append(row)
        sol = _solve_f2(rows, n)
        if sol is not None:
            g = {g_slots[k] for k in range(n) if (sol >> k) & 1}
            return InterleavingWitness(s.a, s.fbars, s.gbars, frozenset(f), frozenset(g))
    return None


def is_a_isomorphic(
    f: GradedBarcode, g: GradedBarcode, a: RatLike, exact_bound: int = DEFAULT_EXACT_BOUND
) -> tuple[bool | None, InterleavingWitness | None]:
    """Decide whether ``f`` and ``g`` are a-isomorphic over F2.

    A bar matching is tried first and, when found, is a certified witness.
    Otherwise small instances are settled by enumerating ``f`` and solving for
    ``g``; larger ones return ``(None, None)``.
    """
    a = rat(a)
    if a < 0:
        raise DomainError("a must be nonnegative")
    s = _Setup(a, tuple(f.bars()), tuple(g.bars()))
    witness = _matching_witness(s)
    if witness is not None:
        return True, witness
    if len(s.fbars) + len(s.gbars) > exact_bound:
        return None, None
    witness = _exhaustive_witness(s)
    return (witness is not None), witness


# ----------------------------------------------------------------------------
# Distance bounds


@dataclass(frozen=True)
class DistanceBounds:
    lower: ExtRat
    upper: ExtRat
    witness: InterleavingWitness | None = field(default=None, compare=False)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        return {"lower": self.lower.to_json(), "upper": self.upper.to_json(), "exact": self.exact}


def candidate_thresholds(f: GradedBarcode, g: GradedBarcode) -> list[Fraction]:
    """Values of ``a`` where some shifted-bar comparison can change.

    Endpoints move by ``±a`` under ``K_a`` and by ``±2a`` under ``K_{2a}``, so
    comparisons flip at ``|x − y| / k`` for ``k`` in 1..4.
    """
    ends = sorted(set(f.finite_endpoints()) | set(g.finite_endpoints()))
    out = {Fraction(0)}
    for x in ends:
        for y in ends:
            if x < y:
                for k in (1, 2, 3, 4):
                    out.add((y - x) / k)
    return sorted(out)


def distance_bounds(f: GradedBarcode, g: GradedBarcode, exact_bound: int = DEFAULT_EXACT_BOUND) -> DistanceBounds:
    if f == g:
        return DistanceBounds(ExtRat.of(0), ExtRat.of(0), is_a_isomorphic(f, g, 0)[1])
    for variant in ("RGamma", "RGamma_c"):
        if global_sections(f, variant, Field.F2) != global_sections(g, variant, Field.F2):
            return DistanceBounds(POS_INF, POS_INF)
    cands = candidate_thresholds(f, g)
    memo: dict[Fraction, tuple] = {}

    def decide(a: Fraction):
        if a not in memo:
            memo[a] = is_a_isomorphic(f, g, a, exact_bound)
        return memo[a]

    beyond = cands[-1] + 1
    if decide(beyond)[0] is not True:
        if decide(beyond)[0] is False:
            return DistanceBounds(POS_INF, POS_INF)
        return DistanceBounds(ExtRat.of(0), POS_INF)
    lo, hi = 0, len(cands)  # cands[hi] stands for `beyond`
    while lo < hi:
        mid = (lo + hi) // 2
        if decide(cands[mid])[0] is True:
            hi = mid
        else:
            lo = mid + 1
    if lo == len(cands):
        # constant past the last candidate, so the infimum is that candidate
        top = cands[-1]
        lower = ExtRat.of(top) if decide(top)[0] is False else ExtRat.of(0)
        return DistanceBounds(lower, ExtRat.of(beyond), decide(beyond)[1])
    best = cands[lo]
    upper = ExtRat.of(best)
    witness = decide(best)[1]
    if lo == 0:
        return DistanceBounds(ExtRat.of(0), upper, witness)
    prev = cands[lo - 1]
    if decide((prev + best) / 2)[0] is False:
        return DistanceBounds(upper, upper, witness)
    if decide(prev)[0] is False:
        return DistanceBounds(ExtRat.of(prev), upper, witness)
    return DistanceBounds(ExtRat.of(0), upper, witness)
