"""Exact scalars, extended rationals, coefficient fields and dense linear algebra.

Everything here is immutable and exact.  Rationals are ``fractions.Fraction``;
``ExtRat`` adds the two infinities needed for interval endpoints.  Matrices
carry their coefficient field and store raw payloads (``0``/``1`` ints for F2,
``Fraction`` for Q).  Over F2 the elimination routines run on integer bitmasks,
which keeps the decomposition code fast enough for property testing.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

Rat = Fraction
RatLike = Union[int, str, Fraction]


class DomainError(ValueError):
    """Raised when an operation is mathematically undefined for its inputs."""


def rat(value: RatLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` / decimal strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rat(value: Fraction) -> str:
    """Serialize as ``"p"`` or ``"p/q"`` in lowest terms."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class ExtTag(enum.IntEnum):
    NEG_INF = 0
    FINITE = 1
    POS_INF = 2


@total_ordering
@dataclass(frozen=True)
class ExtRat:
    """A rational number or one of the two infinities."""

    tag: ExtTag
    value: Fraction | None = None

    def __post_init__(self) -> None:
        if self.tag == ExtTag.FINITE:
            if self.value is None:
                raise ValueError("finite ExtRat needs a value")
            object.__setattr__(self, "value", Fraction(self.value))
        elif self.value is not None:
            raise ValueError("infinite ExtRat carries no value")

    @staticmethod
    def of(value: "ExtRat | RatLike | float") -> "ExtRat":
        if isinstance(value, ExtRat):
            return value
        if isinstance(value, float):
            if value == float("inf"):
                return POS_INF
            if value == float("-inf"):
                return NEG_INF
            raise TypeError("finite floats are not accepted; pass an exact rational")
        if isinstance(value, str):
            text = value.strip()
            if text in ("+inf", "inf", "+∞", "∞"):
                return POS_INF
            if text in ("-inf", "-∞", "−∞"):
                return NEG_INF
        return ExtRat(ExtTag.FINITE, rat(value))

    @property
    def is_finite(self) -> bool:
        return self.tag == ExtTag.FINITE

    def _key(self) -> tuple:
        return (int(self.tag), self.value if self.is_finite else 0)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, ExtRat):
            other = ExtRat.of(other)  # type: ignore[arg-type]
        return self._key() < other._key()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtRat.of(other)
        if not isinstance(other, ExtRat):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __neg__(self) -> "ExtRat":
        if self.tag == ExtTag.NEG_INF:
            return POS_INF
        if self.tag == ExtTag.POS_INF:
            return NEG_INF
        return ExtRat(ExtTag.FINITE, -self.value)

    def __add__(self, other: "ExtRat | RatLike") -> "ExtRat":
        other = ExtRat.of(other)
        if self.is_finite and other.is_finite:
            return ExtRat(ExtTag.FINITE, self.value + other.value)
        tags = {self.tag, other.tag} - {ExtTag.FINITE}
        if len(tags) == 2:
            raise DomainError("undefined sum of opposite infinities")
        return POS_INF if ExtTag.POS_INF in tags else NEG_INF

    __radd__ = __add__

    def __sub__(self, other: "ExtRat | RatLike") -> "ExtRat":
        return self + (-ExtRat.of(other))

    def __rsub__(self, other: "ExtRat | RatLike") -> "ExtRat":
        return ExtRat.of(other) + (-self)

    def scale(self, factor: RatLike) -> "ExtRat":
        """Multiply by a rational; a zero factor on an infinity is undefined."""
        factor = rat(factor)
        if self.is_finite:
            return ExtRat(ExtTag.FINITE, self.value * factor)
        if factor == 0:
            raise DomainError("undefined product of zero and infinity")
        return self if factor > 0 else -self

    def to_json(self) -> str:
        if self.tag == ExtTag.NEG_INF:
            return "-inf"
        if self.tag == ExtTag.POS_INF:
            return "+inf"
        return format_rat(self.value)

    def __str__(self) -> str:
        return self.to_json()

    def __repr__(self) -> str:
        return f"ExtRat({self.to_json()})"


NEG_INF = ExtRat(ExtTag.NEG_INF)
POS_INF = ExtRat(ExtTag.POS_INF)


def ext_cmp(x: ExtRat | RatLike, y: ExtRat | RatLike) -> int:
    """Three-way comparison: -1, 0 or 1."""
    x, y = ExtRat.of(x), ExtRat.of(y)
    if x < y:
        return -1
    if y < x:
        return 1
    return 0


# ----------------------------------------------------------------------------
# Coefficient fields


class Field(enum.Enum):
    F2 = "f2"
    Q = "q"

    def coerce(self, value: object) -> int | Fraction:
        if isinstance(value, FieldElem):
            if value.field is not self:
                raise DomainError("elements of different fields cannot be mixed")
            return value.payload
        if self is Field.F2:
            if isinstance(value, Fraction):
                if value.denominator % 2 == 0:
                    raise DomainError(f"{value} has no image in F2")
                return value.numerator % 2
            if isinstance(value, str):
                return self.coerce(rat(value))
            return int(value) % 2
        if isinstance(value, str):
            return rat(value)
        return Fraction(value)

    def zero(self) -> int | Fraction:
        return 0 if self is Field.F2 else Fraction(0)

    def one(self) -> int | Fraction:
        return 1 if self is Field.F2 else Fraction(1)

    def add(self, x, y):
        return (x ^ y) if self is Field.F2 else x + y

    def sub(self, x, y):
        return (x ^ y) if self is Field.F2 else x - y

    def mul(self, x, y):
        return (x & y) if self is Field.F2 else x * y

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("zero has no inverse")
        return 1 if self is Field.F2 else 1 / x

    def format(self, x) -> str:
        return str(x) if self is Field.F2 else format_rat(x)


def default_field() -> Field:
    """Field selected by the ``GP_FIELD`` environment variable (F2 when unset)."""
    name = os.environ.get("GP_FIELD", "f2").strip().lower()
    try:
        return Field(name)
    except ValueError as exc:
        raise DomainError(f"unknown field {name!r}; expected 'f2' or 'q'") from exc


@dataclass(frozen=True)
class FieldElem:
    field: Field
    payload: int | Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "payload", self.field.coerce(self.payload))

    def _check(self, other: "FieldElem") -> None:
        if other.field is not self.field:
            raise DomainError("elements of different fields cannot be mixed")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.field, self.field.add(self.payload, other.payload))

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.field, self.field.sub(self.payload, other.payload))

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check(other)
        return FieldElem(self.field, self.field.mul(self.payload, other.payload))

    def __neg__(self) -> "FieldElem":
        return FieldElem(self.field, self.field.sub(self.field.zero(), self.payload))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.payload))

    def __bool__(self) -> bool:
        return bool(self.payload)


# ----------------------------------------------------------------------------
# F2 bitmask helpers


def bits_of(row: Sequence[int]) -> int:
    """Pack a 0/1 sequence into an int with bit ``j`` holding entry ``j``."""
    out = 0
    for j, v in enumerate(row):
        if v & 1:
            out |= 1 << j
    return out


def unpack_bits(mask: int, length: int) -> tuple[int, ...]:
    return tuple((mask >> j) & 1 for j in range(length))


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def f2_rank(masks: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in masks:
        while v:
            p = lowest_bit(v)
            if p in basis:
                v ^= basis[p]
            else:
                basis[p] = v
                break
    return len(basis)


class F2Echelon:
    """Incremental F2 basis with lowest-bit pivots that records combinations.

    Each inserted vector carries a tag bitmask; after reduction every stored
    row satisfies ``row == xor of original vectors named by its tag``.
    """

    def __init__(self) -> None:
        self.rows: dict[int, tuple[int, int]] = {}

    def reduce(self, vector: int, tag: int = 0) -> tuple[int, int]:
        while vector:
            p = lowest_bit(vector)
            entry = self.rows.get(p)
            if entry is None:
                break
            vector ^= entry[0]
            tag ^= entry[1]
        return vector, tag

    def insert(self, vector: int, tag: int = 0) -> tuple[bool, int]:
        """Insert; return (independent, combination tag of the residual)."""
        vector, tag = self.reduce(vector, tag)
        if vector:
            self.rows[lowest_bit(vector)] = (vector, tag)
            return True, tag
        return False, tag

    def __len__(self) -> int:
        return len(self.rows)


# ----------------------------------------------------------------------------
# Dense matrices


def _eliminate(field: Field, rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form with lowest-index pivoting (generic path)."""
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pick = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pick is None:
            continue
        rows[r], rows[pick] = rows[pick], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


@dataclass(frozen=True)
class Matrix:
    field: Field
    nrows: int
    ncols: int
    entries: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.nrows or any(len(r) != self.ncols for r in self.entries):
            raise ValueError("matrix entries do not match the declared shape")

    # construction -----------------------------------------------------------
    @staticmethod
    def from_rows(field: Field, rows: Sequence[Sequence[object]], ncols: int | None = None) -> "Matrix":
        rows = [tuple(field.coerce(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return Matrix(field, len(rows), ncols, tuple(rows))

    @staticmethod
    def zeros(field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field.zero()
        return Matrix(field, nrows, ncols, tuple(tuple(z for _ in range(ncols)) for _ in range(nrows)))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return Matrix(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def from_columns(field: Field, nrows: int, columns: Sequence[Sequence[object]]) -> "Matrix":
        cols = [[field.coerce(x) for x in c] for c in columns]
        rows = [tuple(c[i] for c in cols) for i in range(nrows)]
        return Matrix(field, nrows, len(cols), tuple(rows))

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def elem(self, i: int, j: int) -> FieldElem:
        return FieldElem(self.field, self.entries[i][j])

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    def column_masks(self) -> list[int]:
        """F2 only: each column packed as a bitmask over row indices."""
        self._need_f2()
        return [bits_of(self.column(j)) for j in range(self.ncols)]

    def row_masks(self) -> list[int]:
        self._need_f2()
        return [bits_of(r) for r in self.entries]

    @staticmethod
    def from_column_masks(nrows: int, masks: Sequence[int]) -> "Matrix":
        cols = [unpack_bits(m, nrows) for m in masks]
        rows = tuple(tuple(c[i] for c in cols) for i in range(nrows))
        return Matrix(Field.F2, nrows, len(masks), rows)

    def _need_f2(self) -> None:
        if self.field is not Field.F2:
            raise DomainError("bitmask view is only available over F2")

    # algebra ----------------------------------------------------------------
    def _check_field(self, other: "Matrix") -> None:
        if other.field is not self.field:
            raise DomainError("field mismatch between matrices")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        cols = [other.column(j) for j in range(other.ncols)]
        rows = []
        for r in self.entries:
            out = []
            for c in cols:
                acc = f.zero()
                for x, y in zip(r, c):
                    if x and y:
                        acc = f.add(acc, f.mul(x, y))
                out.append(acc)
            rows.append(tuple(out))
        return Matrix(f, self.nrows, other.ncols, tuple(rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        f = self.field
        rows = tuple(tuple(f.add(x, y) for x, y in zip(a, b)) for a, b in zip(self.entries, other.entries))
        return Matrix(f, self.nrows, self.ncols, rows)

    def transpose(self) -> "Matrix":
        rows = tuple(self.column(j) for j in range(self.ncols))
        return Matrix(self.field, self.ncols, self.nrows, rows)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch in hstack")
        rows = tuple(a + b for a, b in zip(self.entries, other.entries))
        return Matrix(self.field, self.nrows, self.ncols + other.ncols, rows)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch in vstack")
        return Matrix(self.field, self.nrows + other.nrows, self.ncols, self.entries + other.entries)

    # elimination ------------------------------------------------------------
    def rank(self) -> int:
        if self.field is Field.F2:
            return f2_rank(self.row_masks())
        return len(_eliminate(self.field, [list(r) for r in self.entries], self.ncols)[1])

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        rows, pivots = _eliminate(self.field, [list(r) for r in self.entries], self.ncols)
        return Matrix(self.field, self.nrows, self.ncols, tuple(tuple(r) for r in rows)), tuple(pivots)

    def nullspace(self) -> list[tuple]:
        """Basis of the kernel; one vector per free column, free entry set to one."""
        rows, pivots = _eliminate(self.field, [list(r) for r in self.entries], self.ncols)
        f = self.field
        pivot_set = set(pivots)
        basis = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            vec = [f.zero()] * self.ncols
            vec[free] = f.one()
            for r, p in enumerate(pivots):
                vec[p] = f.sub(f.zero(), rows[r][free])
            basis.append(tuple(vec))
        return basis

    def solve(self, b: "Matrix") -> "Matrix | None":
        """Some x with ``self @ x == b``; free variables are set to zero."""
        self._check_field(b)
        if b.nrows != self.nrows:
            raise ValueError("solve needs matching row counts")
        f = self.field
        aug = [list(ra) + list(rb) for ra, rb in zip(self.entries, b.entries)]
        rows, pivots = _eliminate(f, aug, self.ncols)
        r = len(pivots)
        for i in range(r, len(rows)):
            if any(rows[i][self.ncols:]):
                return None
        out = [[f.zero()] * b.ncols for _ in range(self.ncols)]
        for i, p in enumerate(pivots):
            out[p] = rows[i][self.ncols:]
        return Matrix(f, self.ncols, b.ncols, tuple(tuple(x) for x in out))


def rank(m: Matrix) -> int:
    return m.rank()


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    return a.solve(b)
