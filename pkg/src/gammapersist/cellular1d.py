"""Cellular model of constructible sheaves on the real line.

A critical grid ``c_1 < ... < c_m`` cuts the line into ``2m + 1`` cells indexed
from the left: even indices are open intervals, odd indices are the points.
A ``ZigzagModule`` stores a vector space per cell and, for every point cell,
the two generization maps to its neighbouring open cells.  Every such
representation is a constructible sheaf, so no gluing condition is needed.

Derived operations (RHom, duality, gammafication, sections) are computed on
chain-level complexes of representations and normalized with ``decompose``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .barcodes1d import Barcode, GradedBarcode, Interval
from .foundations import (
    NEG_INF,
    POS_INF,
    DomainError,
    F2Echelon,
    Field,
    Matrix,
    default_field,
    format_rat,
    rat,
)


# ----------------------------------------------------------------------------
# Grids and modules


@dataclass(frozen=True)
class CriticalGrid:
    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        vals = tuple(Fraction(v) for v in self.values)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("grid values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @staticmethod
    def of(values: Iterable) -> "CriticalGrid":
        return CriticalGrid(tuple(sorted({rat(v) if not isinstance(v, Fraction) else v for v in values})))

    @property
    def n_cells(self) -> int:
        return 2 * len(self.values) + 1

    @staticmethod
    def is_point(cell: int) -> bool:
        return cell % 2 == 1

    def cell_interval(self, cell: int) -> Interval:
        if cell % 2:
            return Interval.point(self.values[cell // 2])
        k = cell // 2
        lo = self.values[k - 1] if k > 0 else NEG_INF
        hi = self.values[k] if k < len(self.values) else POS_INF
        return Interval.open(lo, hi)

    def cell_sample(self, cell: int) -> Fraction:
        if cell % 2:
            return self.values[cell // 2]
        k, vals = cell // 2, self.values
        if not vals:
            return Fraction(0)
        if k == 0:
            return vals[0] - 1
        if k == len(vals):
            return vals[-1] + 1
        return (vals[k - 1] + vals[k]) / 2

    def locate(self, x: Fraction) -> int:
        """Index of the cell containing ``x``."""
        for i, v in enumerate(self.values):
            if x < v:
                return 2 * i
            if x == v:
                return 2 * i + 1
        return 2 * len(self.values)

    def union(self, other: "CriticalGrid") -> "CriticalGrid":
        return CriticalGrid(tuple(sorted(set(self.values) | set(other.values))))

    def lower_endpoint(self, cell: int) -> tuple:
        """(value, closed) for a bar whose support starts at ``cell``."""
        if cell % 2:
            return self.values[cell // 2], True
        k = cell // 2
        return (self.values[k - 1] if k > 0 else NEG_INF), False

    def upper_endpoint(self, cell: int) -> tuple:
        if cell % 2:
            return self.values[cell // 2], True
        k = cell // 2
        return (self.values[k] if k < len(self.values) else POS_INF), False


def rank_key(cell: int) -> int:
    """Order used to decide which bars may absorb which during propagation.

    Bar ``beta`` may be modified by adding bar ``alpha`` exactly when
    ``rank_key(alpha.start) <= rank_key(beta.start)``.
    """
    return -cell if cell % 2 else cell


@dataclass(frozen=True)
class ZigzagModule:
    grid: CriticalGrid
    dims: tuple[int, ...]
    left: tuple[Matrix, ...]
    right: tuple[Matrix, ...]
    field: Field = Field.F2

    def __post_init__(self) -> None:
        m = len(self.grid.values)
        if len(self.dims) != 2 * m + 1 or len(self.left) != m or len(self.right) != m:
            raise ValueError("module data does not match the grid")
        for p in range(m):
            src = self.dims[2 * p + 1]
            if self.left[p].shape != (self.dims[2 * p], src):
                raise ValueError(f"left map at point {p} has shape {self.left[p].shape}")
            if self.right[p].shape != (self.dims[2 * p + 2], src):
                raise ValueError(f"right map at point {p} has shape {self.right[p].shape}")
            if self.left[p].field is not self.field or self.right[p].field is not self.field:
                raise DomainError("field mismatch inside module")

    @property
    def n_cells(self) -> int:
        return len(self.dims)

    def arrows(self) -> list[tuple[int, int, Matrix]]:
        """All generization arrows as ``(source cell, target cell, matrix)``."""
        out = []
        for p in range(len(self.grid.values)):
            out.append((2 * p + 1, 2 * p, self.left[p]))
            out.append((2 * p + 1, 2 * p + 2, self.right[p]))
        return out

    @staticmethod
    def constant(grid: CriticalGrid, field: Field, dim: int = 1) -> "ZigzagModule":
        m = len(grid.values)
        eye = Matrix.identity(field, dim)
        return ZigzagModule(grid, (dim,) * (2 * m + 1), (eye,) * m, (eye,) * m, field)

    def refine(self, grid: CriticalGrid) -> "ZigzagModule":
        """The same sheaf on a finer grid."""
        if not set(self.grid.values) <= set(grid.values):
            raise ValueError("refine needs a grid containing the current one")
        new_dims = [self.dims[self.grid.locate(grid.cell_sample(c))] for c in range(grid.n_cells)]
        left, right = [], []
        for v in grid.values:
            old = self.grid.locate(v)
            if old % 2:
                left.append(self.left[old // 2])
                right.append(self.right[old // 2])
            else:
                eye = Matrix.identity(self.field, self.dims[old])
                left.append(eye)
                right.append(eye)
        return ZigzagModule(grid, tuple(new_dims), tuple(left), tuple(right), self.field)

    def to_json(self) -> dict:
        maps = []
        for p in range(len(self.grid.values)):
            for side, mat in (("left", self.left[p]), ("right", self.right[p])):
                maps.append(
                    {
                        "point": p,
                        "side": side,
                        "rows": mat.nrows,
                        "cols": mat.ncols,
                        "entries": [self.field.format(x) for r in mat.entries for x in r],
                    }
                )
        return {
            "field": self.field.value,
            "grid": [format_rat(v) for v in self.grid.values],
            "dims": list(self.dims),
            "maps": maps,
        }

    @staticmethod
    def from_json(obj: Mapping) -> "ZigzagModule":
        field = Field(obj.get("field", "f2"))
        grid = CriticalGrid(tuple(rat(str(v)) for v in obj["grid"]))
        m = len(grid.values)
        left: list = [None] * m
        right: list = [None] * m
        for entry in obj["maps"]:
            r, c, vals = int(entry["rows"]), int(entry["cols"]), list(entry["entries"])
            if len(vals) != r * c:
                raise ValueError("map entry count does not match its shape")
            rows = [vals[i * c : (i + 1) * c] for i in range(r)]
            mat = Matrix.from_rows(field, rows, c)
            (left if entry["side"] == "left" else right)[int(entry["point"])] = mat
        if any(x is None for x in left + right):
            raise ValueError("every point cell needs a left and a right map")
        return ZigzagModule(grid, tuple(int(d) for d in obj["dims"]), tuple(left), tuple(right), field)


def module_from_barcode(barcode: Barcode, grid: CriticalGrid | None = None, field: Field | None = None) -> ZigzagModule:
    """Cellular model of ``⊕ k_I``; basis vectors at a cell are the bars covering it."""
    field = field or default_field()
    if grid is None:
        grid = CriticalGrid(tuple(barcode.finite_endpoints()))
    elif not set(barcode.finite_endpoints()) <= set(grid.values):
        raise ValueError("grid must contain every finite endpoint")
    bars = barcode.expanded()
    members = []
    for c in range(grid.n_cells):
        x = grid.cell_sample(c)
        members.append([k for k, bar in enumerate(bars) if bar.contains(x)])
    z, o = field.zero(), field.one()

    def incidence(src: list[int], tgt: list[int]) -> Matrix:
        rows = [[o if a == b else z for a in src] for b in tgt]
        return Matrix(field, len(tgt), len(src), tuple(tuple(r) for r in rows))

    m = len(grid.values)
    left = tuple(incidence(members[2 * p + 1], members[2 * p]) for p in range(m))
    right = tuple(incidence(members[2 * p + 1], members[2 * p + 2]) for p in range(m))
    return ZigzagModule(grid, tuple(len(x) for x in members), left, right, field)


def from_barcode(g: GradedBarcode, field: Field | None = None, grid: CriticalGrid | None = None) -> dict[int, ZigzagModule]:
    """Per-degree cellular models on a common grid."""
    grid = grid or CriticalGrid(tuple(g.finite_endpoints()))
    return {d: module_from_barcode(bc, grid, field) for d, bc in g.components}


# ----------------------------------------------------------------------------
# Vector backends for the decomposition


class _F2Ops:
    zero = 0

    @staticmethod
    def columns(m: Matrix) -> list[int]:
        return m.column_masks()

    @staticmethod
    def unit(i: int) -> int:
        return 1 << i

    @staticmethod
    def apply(cols: Sequence[int], v: int) -> int:
        out = 0
        while v:
            low = v & -v
            out ^= cols[low.bit_length() - 1]
            v ^= low
        return out

    @staticmethod
    def echelon() -> F2Echelon:
        return F2Echelon()

    @staticmethod
    def coords(ech: F2Echelon, v: int) -> int:
        resid, tag = ech.reduce(v, 0)
        assert not resid, "vector outside the span"
        return tag


class _QEchelon:
    """Sparse rational echelon with lowest-key pivots and combination tags."""

    def __init__(self) -> None:
        self.rows: dict[int, tuple[dict, dict]] = {}

    @staticmethod
    def _axpy(y: dict, a: Fraction, x: dict) -> dict:
        out = dict(y)
        for k, v in x.items():
            nv = out.get(k, 0) - a * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return out

    def reduce(self, vec: dict, tag: dict) -> tuple[dict, dict]:
        while vec:
            p = min(vec)
            entry = self.rows.get(p)
            if entry is None:
                break
            f = vec[p] / entry[0][p]
            vec = self._axpy(vec, f, entry[0])
            tag = self._axpy(tag, f, entry[1])
        return vec, tag

    def insert(self, vec: dict, tag: dict) -> tuple[bool, dict]:
        vec, tag = self.reduce(vec, tag)
        if vec:
            self.rows[min(vec)] = (vec, tag)
            return True, tag
        return False, tag

    def __len__(self) -> int:
        return len(self.rows)


class _QOps:
    zero: dict = {}

    @staticmethod
    def columns(m: Matrix) -> list[dict]:
        return [{i: x for i, x in enumerate(m.column(j)) if x} for j in range(m.ncols)]

    @staticmethod
    def unit(i: int) -> dict:
        return {i: Fraction(1)}

    @staticmethod
    def apply(cols: Sequence[dict], v: dict) -> dict:
        out: dict = {}
        for j, a in v.items():
            for i, x in cols[j].items():
                nv = out.get(i, 0) + a * x
                if nv:
                    out[i] = nv
                else:
                    out.pop(i, None)
        return out

    @staticmethod
    def echelon() -> _QEchelon:
        return _QEchelon()

    @staticmethod
    def coords(ech: _QEchelon, v: dict) -> dict:
        resid, tag = ech.reduce(v, {})
        assert not resid, "vector outside the span"
        return {k: -x for k, x in tag.items()}


def _ops(field: Field):
    return _F2Ops if field is Field.F2 else _QOps


def _pivots(ech) -> list[int]:
    return sorted(ech.rows)


def decompose_cells(z: ZigzagModule) -> list[tuple[int, int]]:
    """Interval decomposition as ``(start cell, end cell)`` pairs.

    Bars are propagated left to right.  At a backward arrow the image is
    brought into a form spanned by a subset of bar vectors, using only the
    basis changes permitted by ``rank_key``; at a forward arrow images of bars
    are reduced in increasing ``rank_key`` order and dependent bars end.
    """
    ops = _ops(z.field)
    live: list[tuple[int, object]] = [(0, ops.unit(i)) for i in range(z.dims[0])]
    finished: list[tuple[int, int]] = []
    for p in range(len(z.grid.values)):
        open_left, point, open_right = 2 * p, 2 * p + 1, 2 * p + 2

        # point -> open_left: keep the bars that span the image
        order = sorted(range(len(live)), key=lambda k: (-rank_key(live[k][0]), k))
        position = {k: i for i, k in enumerate(order)}
        bar_basis = ops.echelon()
        for k, (_, vec) in enumerate(live):
            bar_basis.insert(vec, ops.unit(position[k]))
        image = ops.echelon()
        kernel = []
        g_cols = ops.columns(z.left[p])
        for j in range(z.dims[point]):
            coords = ops.coords(bar_basis, g_cols[j])
            independent, tag = image.insert(coords, ops.unit(j))
            if not independent:
                kernel.append(tag)
        survivors = {}
        for piv, (_, tag) in image.rows.items():
            survivors[order[piv]] = tag
        nxt = []
        for k, (start, _) in enumerate(live):
            if k in survivors:
                nxt.append((start, survivors[k]))
            else:
                finished.append((start, open_left))
        nxt.extend((point, v) for v in kernel)
        live = nxt

        # point -> open_right: bars with dependent images end at the point
        f_cols = ops.columns(z.right[p])
        order = sorted(range(len(live)), key=lambda k: (rank_key(live[k][0]), k))
        kept = ops.echelon()
        alive = set()
        images = {}
        for k in order:
            img = ops.apply(f_cols, live[k][1])
            independent, _ = kept.insert(img, ops.zero)
            if independent:
                alive.add(k)
                images[k] = img
        nxt = []
        for k, (start, _) in enumerate(live):
            if k in alive:
                nxt.append((start, images[k]))
            else:
                finished.append((start, point))
        for i in range(z.dims[open_right]):
            independent, _ = kept.insert(ops.unit(i), ops.zero)
            if independent:
                nxt.append((open_right, ops.unit(i)))
        live = nxt
    last = z.n_cells - 1
    finished.extend((start, last) for start, _ in live)
    return finished


def decompose(z: ZigzagModule) -> Barcode:
    """The unique interval multiset of a zigzag module."""
    bars = []
    for start, end in decompose_cells(z):
        lo, lc = z.grid.lower_endpoint(start)
        hi, uc = z.grid.upper_endpoint(end)
        bars.append((Interval.make(lo, hi, lc, uc), 1))
    return Barcode(tuple(bars))


def decompose_graded(modules: Mapping[int, ZigzagModule]) -> GradedBarcode:
    return GradedBarcode(tuple((d, decompose(z)) for d, z in modules.items()))


# ----------------------------------------------------------------------------
# Quiver RHom


def _common(m: ZigzagModule, n: ZigzagModule) -> tuple[ZigzagModule, ZigzagModule]:
    if m.field is not n.field:
        raise DomainError("field mismatch")
    grid = m.grid.union(n.grid)
    return m.refine(grid), n.refine(grid)


@dataclass(frozen=True)
class RHomComplex:
    """Two-term complex computing RHom between representations on one grid.

    Degree 0 coordinates are ``(cell, row, col)`` entries of stalkwise maps,
    degree 1 coordinates are ``(arrow, row, col)`` entries of arrow defects.
    ``delta`` lists, per degree 0 coordinate, its image as a sparse column.
    """

    field: Field
    c0: tuple[tuple[int, int, int], ...]
    c1: tuple[tuple[int, int, int], ...]
    delta: tuple[dict, ...]

    def restrict(self, cells: set[int], arrows: set[int]) -> tuple[list[int], list[int], Matrix]:
        """Sub-complex on a set of cells and arrows closed under endpoints."""
        cols = [i for i, (c, _, _) in enumerate(self.c0) if c in cells]
        rows = [i for i, (a, _, _) in enumerate(self.c1) if a in arrows]
        row_pos = {r: k for k, r in enumerate(rows)}
        z = self.field.zero()
        grid_rows = [[z] * len(cols) for _ in rows]
        for k, ci in enumerate(cols):
            for r, v in self.delta[ci].items():
                if r in row_pos:
                    grid_rows[row_pos[r]][k] = v
        mat = Matrix(self.field, len(rows), len(cols), tuple(tuple(r) for r in grid_rows))
        return cols, rows, mat


def rhom_complex(m: ZigzagModule, n: ZigzagModule) -> RHomComplex:
    """``φ ↦ (N_a φ_s − φ_t M_a)_a`` for stalkwise maps ``φ_c : M_c → N_c``."""
    m, n = _common(m, n)
    f = m.field
    arrows = m.arrows()
    n_arrows = n.arrows()
    c0 = [(c, r, s) for c in range(m.n_cells) for r in range(n.dims[c]) for s in range(m.dims[c])]
    c1 = []
    c1_index = {}
    for a, (src, tgt, _) in enumerate(arrows):
        for r in range(n.dims[tgt]):
            for s in range(m.dims[src]):
                c1_index[(a, r, s)] = len(c1)
                c1.append((a, r, s))
    outgoing: dict[int, list[int]] = {}
    incoming: dict[int, list[int]] = {}
    for a, (src, tgt, _) in enumerate(arrows):
        outgoing.setdefault(src, []).append(a)
        incoming.setdefault(tgt, []).append(a)
    delta = []
    for c, r, s in c0:
        col: dict = {}

        def bump(key, value):
            idx = c1_index[key]
            nv = f.add(col.get(idx, f.zero()), value)
            if nv:
                col[idx] = nv
            else:
                col.pop(idx, None)

        for a in outgoing.get(c, []):
            na = n_arrows[a][2]
            for r2 in range(na.nrows):
                if na.entries[r2][r]:
                    bump((a, r2, s), na.entries[r2][r])
        for a in incoming.get(c, []):
            ma = arrows[a][2]
            for s2 in range(ma.ncols):
                if ma.entries[s][s2]:
                    bump((a, r, s2), f.sub(f.zero(), ma.entries[s][s2]))
        delta.append(col)
    return RHomComplex(f, tuple(c0), tuple(c1), tuple(delta))


def _delta_rank(cx: RHomComplex) -> int:
    if cx.field is Field.F2:
        from .foundations import f2_rank

        masks = []
        for col in cx.delta:
            mask = 0
            for r in col:
                mask |= 1 << r
            masks.append(mask)
        return f2_rank(masks)
    cols = sorted({c for c, _, _ in cx.c0})
    arrows = sorted({a for a, _, _ in cx.c1})
    return cx.restrict(set(cols), set(arrows))[2].rank()


def ext_dims(m: ZigzagModule, n: ZigzagModule) -> tuple[int, int]:
    """``(dim Hom(M, N), dim Ext^1(M, N))`` for representations."""
    cx = rhom_complex(m, n)
    r = _delta_rank(cx)
    return len(cx.c0) - r, len(cx.c1) - r


def resolution_length(m: ZigzagModule) -> int:
    """Verify the standard projective resolution of ``m`` has length at most one.

    For each vertex ``x`` the resolution reads
    ``0 → ⊕_a P_t(a)(x) ⊗ M_s(a) → ⊕_i P_i(x) ⊗ M_i → M_x → 0``.
    The left map is checked injective and the sequence exact by counting ranks,
    which certifies ``Ext^j(m, ·) = 0`` for every ``j > 1``.
    """
    f = m.field
    arrows = m.arrows()

    def paths(i: int, x: int) -> bool:
        return i == x or (i % 2 == 1 and abs(i - x) == 1)

    longest = 0
    for x in range(m.n_cells):
        middle = [(i, s) for i in range(m.n_cells) if paths(i, x) for s in range(m.dims[i])]
        mid_pos = {key: k for k, key in enumerate(middle)}
        left_basis = [(a, s) for a, (src, tgt, _) in enumerate(arrows) if paths(tgt, x) for s in range(m.dims[src])]
        cols = []
        for a, s in left_basis:
            src, tgt, mat = arrows[a]
            col = [f.zero()] * len(middle)
            # p ⊗ m with p the path tgt → x, sent to (p·a) ⊗ m − p ⊗ M_a(m)
            col[mid_pos[(src, s)]] = f.add(col[mid_pos[(src, s)]], f.one())
            for r in range(mat.nrows):
                if mat.entries[r][s]:
                    k = mid_pos[(tgt, r)]
                    col[k] = f.sub(col[k], mat.entries[r][s])
            cols.append(col)
        d1 = Matrix.from_columns(f, len(middle), cols) if cols else Matrix.zeros(f, len(middle), 0)
        rk = d1.rank()
        if rk != len(left_basis):
            longest = max(longest, 2)
        if len(middle) - rk != m.dims[x]:
            raise AssertionError("standard resolution is not exact")
        if left_basis:
            longest = max(longest, 1)
    if longest > 1:
        raise AssertionError("projective resolution longer than one step")
    return longest


# ----------------------------------------------------------------------------
# Cohomology sheaves of a family of sub-complexes


@dataclass
class _Local:
    cols: list[int]
    rows: list[int]
    kernel: list[tuple]
    free: list[int]
    image_rows: list[list]
    image_pivots: list[int]


def _local_data(cx: RHomComplex, cells: set[int], arrows: set[int]) -> _Local:
    cols, rows, mat = cx.restrict(cells, arrows)
    rref, pivots = mat.rref()
    pivot_set = set(pivots)
    free = [j for j in range(len(cols)) if j not in pivot_set]
    kernel = mat.nullspace()
    img, img_piv = mat.transpose().rref()
    image_rows = [list(img.entries[k]) for k in range(len(img_piv))]
    return _Local(cols, rows, kernel, free, image_rows, list(img_piv))


def _quotient_coords(field: Field, local: _Local, vec: list) -> list:
    vec = list(vec)
    for row, piv in zip(local.image_rows, local.image_pivots):
        if vec[piv]:
            f = vec[piv]
            vec = [field.sub(x, field.mul(f, y)) for x, y in zip(vec, row)]
    piv = set(local.image_pivots)
    return [vec[i] for i in range(len(vec)) if i not in piv]


def _cohomology_modules(
    cx: RHomComplex,
    grid: CriticalGrid,
    support: Callable[[int], set[int]],
    arrows_of: Callable[[set[int]], set[int]],
) -> tuple[ZigzagModule, ZigzagModule]:
    """H^0 and H^1 sheaves of cell-indexed restrictions of ``cx``.

    ``support(x)`` gives the quiver cells whose data make up the stalk at
    output cell ``x``; a point's support must contain its neighbours' supports
    and the generization maps are the coordinate projections.
    """
    f = cx.field
    locals_ = []
    for x in range(grid.n_cells):
        cells = support(x)
        locals_.append(_local_data(cx, cells, arrows_of(cells)))

    def h0_map(src: _Local, tgt: _Local) -> Matrix:
        pos = {c: k for k, c in enumerate(src.cols)}
        cols = []
        for vec in src.kernel:
            projected = [vec[pos[c]] for c in tgt.cols]
            cols.append([projected[j] for j in tgt.free])
        return Matrix.from_columns(f, len(tgt.free), cols) if cols else Matrix.zeros(f, len(tgt.free), 0)

    def h1_map(src: _Local, tgt: _Local) -> Matrix:
        piv = set(src.image_pivots)
        basis = [i for i in range(len(src.rows)) if i not in piv]
        pos = {r: k for k, r in enumerate(src.rows)}
        tdim = len(tgt.rows) - len(tgt.image_pivots)
        cols = []
        for b in basis:
            vec = [f.one() if pos[r] == b else f.zero() for r in tgt.rows]
            cols.append(_quotient_coords(f, tgt, vec))
        return Matrix.from_columns(f, tdim, cols) if cols else Matrix.zeros(f, tdim, 0)

    m = len(grid.values)
    h0 = ZigzagModule(
        grid,
        tuple(len(l.kernel) for l in locals_),
        tuple(h0_map(locals_[2 * p + 1], locals_[2 * p]) for p in range(m)),
        tuple(h0_map(locals_[2 * p + 1], locals_[2 * p + 2]) for p in range(m)),
        f,
    )
    h1 = ZigzagModule(
        grid,
        tuple(len(l.rows) - len(l.image_pivots) for l in locals_),
        tuple(h1_map(locals_[2 * p + 1], locals_[2 * p]) for p in range(m)),
        tuple(h1_map(locals_[2 * p + 1], locals_[2 * p + 2]) for p in range(m)),
        f,
    )
    return h0, h1


def _arrow_selector(module: ZigzagModule) -> Callable[[set[int]], set[int]]:
    arrows = module.arrows()

    def select(cells: set[int]) -> set[int]:
        return {a for a, (s, t, _) in enumerate(arrows) if s in cells and t in cells}

    return select


def _star(grid: CriticalGrid, x: int) -> set[int]:
    if x % 2:
        return {x - 1, x, x + 1}
    return {x}


def internal_rhom(m: ZigzagModule, n: ZigzagModule) -> tuple[ZigzagModule, ZigzagModule]:
    """Cohomology sheaves ``(H^0, H^1)`` of the internal RHom; stalks via stars."""
    m, n = _common(m, n)
    cx = rhom_complex(m, n)
    return _cohomology_modules(cx, m.grid, lambda x: _star(m.grid, x), _arrow_selector(m))


def dual_module(m: ZigzagModule) -> tuple[ZigzagModule, ZigzagModule]:
    """``(H^0, H^1)`` of ``RHom(m, k)``."""
    return internal_rhom(m, ZigzagModule.constant(m.grid, m.field))


def gammafy_module(m: ZigzagModule) -> tuple[ZigzagModule, ZigzagModule]:
    """``(H^0, H^1)`` of the gammafication; the stalk at a cell is the
    cohomology of sections over the prefix of cells up to the next open cell."""
    k = ZigzagModule.constant(m.grid, m.field)
    cx = rhom_complex(k, m)

    def prefix(x: int) -> set[int]:
        return set(range(x + 2 if x % 2 else x + 1))

    return _cohomology_modules(cx, m.grid, prefix, _arrow_selector(m))


# ----------------------------------------------------------------------------
# Graded operations (additive over bars, cached per interval)


def _bar_module(interval: Interval, field: Field) -> ZigzagModule:
    return module_from_barcode(Barcode(((interval, 1),)), None, field)


@lru_cache(maxsize=None)
def _dual_of_bar(interval: Interval, field: Field) -> tuple[Barcode, Barcode]:
    h0, h1 = dual_module(_bar_module(interval, field))
    return decompose(h0), decompose(h1)


@lru_cache(maxsize=None)
def _gammafy_bar(interval: Interval, field: Field) -> tuple[Barcode, Barcode]:
    h0, h1 = gammafy_module(_bar_module(interval, field))
    return decompose(h0), decompose(h1)


@lru_cache(maxsize=None)
def _sections_of_bar(interval: Interval, field: Field) -> tuple[tuple[int, int], tuple[int, int]]:
    """((RΓ degree 0, degree 1), (RΓ_c degree 0, degree 1)) of ``k_I``."""
    bar = _bar_module(interval, field)
    const = ZigzagModule.constant(bar.grid, field)
    gamma = ext_dims(const, bar)
    hom, ext1 = ext_dims(bar, const)
    return gamma, (ext1, hom)


@lru_cache(maxsize=None)
def interval_ext(i: Interval, j: Interval, field: Field = Field.F2) -> tuple[int, int]:
    """``(dim Hom, dim Ext^1)`` between ``k_i`` and ``k_j`` from the cellular model."""
    return ext_dims(_bar_module(i, field), _bar_module(j, field))


def _field(field: Field | None) -> Field:
    return field or default_field()


def tensor(f: GradedBarcode, g: GradedBarcode) -> GradedBarcode:
    parts = []
    for i, di in f.bars():
        for j, dj in g.bars():
            meet = i.intersect(j)
            if meet is not None:
                parts.append((meet, di + dj, 1))
    return GradedBarcode.from_bars(parts)


@dataclass(frozen=True)
class SheafHom:
    """Hom and Ext^1 dimensions per pair of degrees ``(j, k)``.

    ``blocks[(j, k)] = (dim Hom(H^j F, H^k G), dim Ext^1(H^j F, H^k G))``.
    ``ext_higher`` is the total dimension of ``Ext^{>=2}`` between cohomology
    sheaves, certified zero by a length-one resolution.
    """

    blocks: Mapping[tuple[int, int], tuple[int, int]]
    ext_higher: int = 0

    def total(self, n: int) -> int:
        """``dim Hom_D(F, G[n])`` for the split complexes."""
        out = 0
        for (j, k), (hom, ext1) in self.blocks.items():
            e = n + k - j
            out += hom if e == 0 else ext1 if e == 1 else 0
        return out


def sheaf_hom(f: GradedBarcode, g: GradedBarcode, field: Field | None = None) -> SheafHom:
    field = _field(field)
    grid = CriticalGrid(tuple(sorted(set(f.finite_endpoints()) | set(g.finite_endpoints()))))
    fm = from_barcode(f, field, grid)
    gm = from_barcode(g, field, grid)
    blocks = {}
    higher = 0
    for j, mj in fm.items():
        if resolution_length(mj) > 1:
            higher += 1
        for k, nk in gm.items():
            blocks[(j, k)] = ext_dims(mj, nk)
    return SheafHom(blocks, higher)


def dualize(f: GradedBarcode, variant: str = "D", field: Field | None = None) -> GradedBarcode:
    """``D'(F) = RHom(F, k)``; ``D(F) = D'(F)[1]``."""
    if variant not in ("D", "D_prime"):
        raise ValueError("variant must be 'D' or 'D_prime'")
    field = _field(field)
    extra = 1 if variant == "D" else 0
    comps = []
    for interval, degree in f.bars():
        hom, ext1 = _dual_of_bar(interval, field)
        comps.append((-degree - extra, hom))
        comps.append((1 - degree - extra, ext1))
    return GradedBarcode(tuple(comps))


def dualize_modules(modules: Mapping[int, ZigzagModule], variant: str = "D") -> GradedBarcode:
    """Same as ``dualize`` but computed on whole per-degree modules."""
    extra = 1 if variant == "D" else 0
    comps = []
    for degree, z in modules.items():
        h0, h1 = dual_module(z)
        comps.append((-degree - extra, decompose(h0)))
        comps.append((1 - degree - extra, decompose(h1)))
    return GradedBarcode(tuple(comps))


def gammafy(f: GradedBarcode, field: Field | None = None) -> GradedBarcode:
    field = _field(field)
    comps = []
    for interval, degree in f.bars():
        h0, h1 = _gammafy_bar(interval, field)
        comps.append((degree, h0))
        comps.append((degree + 1, h1))
    return GradedBarcode(tuple(comps))


def gammafy_modules(modules: Mapping[int, ZigzagModule]) -> GradedBarcode:
    comps = []
    for degree, z in modules.items():
        h0, h1 = gammafy_module(z)
        comps.append((degree, decompose(h0)))
        comps.append((degree + 1, decompose(h1)))
    return GradedBarcode(tuple(comps))


def global_sections(f: GradedBarcode, variant: str = "RGamma", field: Field | None = None) -> dict[int, int]:
    """Cohomology dimensions of ``RΓ(ℝ; F)`` or ``RΓ_c(ℝ; F)`` by degree."""
    if variant not in ("RGamma", "RGamma_c"):
        raise ValueError("variant must be 'RGamma' or 'RGamma_c'")
    field = _field(field)
    out: dict[int, int] = {}
    for interval, degree in f.bars():
        gamma, compact = _sections_of_bar(interval, field)
        dims = gamma if variant == "RGamma" else compact
        for j, d in enumerate(dims):
            if d:
                out[degree + j] = out.get(degree + j, 0) + d
    return dict(sorted(out.items()))


def constructible_function(f: GradedBarcode) -> Callable[[Fraction], int]:
    """``x ↦ Σ_j (−1)^j dim H^j(F)_x``."""
    bars = f.bars()

    def value(x) -> int:
        x = rat(x) if not isinstance(x, Fraction) else x
        return sum((-1) ** (d % 2) for i, d in bars if i.contains(x))

    return value


def euler_characteristic_c(f: GradedBarcode) -> int:
    """Compactly supported Euler characteristic, integrated cellwise
    (a point contributes +1, an open cell −1)."""
    grid = CriticalGrid(tuple(f.finite_endpoints()))
    phi = constructible_function(f)
    return sum(phi(grid.cell_sample(c)) * (1 if c % 2 else -1) for c in range(grid.n_cells))
