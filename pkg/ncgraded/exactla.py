"""Exact fields and sparse linear algebra.

Scalars are plain Python values: ``Fraction`` over the rationals and ``int``
in ``range(p)`` over a prime field.  A ``FieldSpec`` knows how to coerce
values into its representation and how to move them in and out of the
matching sympy domain.  Whole-matrix elimination (``rref``, ``rank`` and the
kernels) runs on sympy's sparse ``SDM``; ``RowSpace`` keeps an echelon basis
that grows one vector at a time.
"""

import re
from collections import namedtuple
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import GF, QQ
from sympy.polys.matrices.sdm import SDM

from . import exceptions

Scalar = Union[int, Fraction]
Vector = Dict[int, Scalar]

DEFAULT_PRIME = 32003


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The base field: rationals when ``characteristic`` is 0, else F_p."""

    characteristic: int = 0

    def __post_init__(self):
        if self.characteristic and not is_prime(self.characteristic):
            raise exceptions.InvalidFieldError(f"F{self.characteristic}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``Q``, ``QQ``, ``Fp``, ``F<p>``, ``GF(p)`` or ``Z/p``."""
        spec = (text or "").strip()
        if spec.upper() in ("Q", "QQ"):
            return cls.rationals()
        if spec in ("Fp", "FP"):
            return cls.prime()
        match = re.fullmatch(r"(?:F_?|GF\(|Z/)(\d+)\)?", spec, re.IGNORECASE)
        if not match:
            raise exceptions.InvalidFieldError(text)
        return cls(int(match.group(1)))

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def size(self) -> Optional[int]:
        return self.characteristic or None

    def coerce(self, value) -> Scalar:
        p = self.characteristic
        if not p:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"{value} has no image in F{p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def inv(self, value: Scalar) -> Scalar:
        if not value:
            raise ZeroDivisionError("zero has no inverse")
        if self.characteristic:
            return pow(value, -1, self.characteristic)
        return 1 / value

    def cross_check_prime(self) -> "FieldSpec":
        """The next prime below ``p`` (3 for F2), used to confirm a suspicious rank."""
        p = self.characteristic or DEFAULT_PRIME
        if p == 2:
            return FieldSpec(3)
        q = p - 1
        while not is_prime(q):
            q -= 1
        return FieldSpec(q)

    @property
    def domain(self):
        return _domain(self.characteristic)

    def to_domain(self, value: Scalar):
        value = self.coerce(value)
        if self.characteristic:
            return self.domain(value)
        return QQ(value.numerator, value.denominator)

    def from_domain(self, element) -> Scalar:
        K = self.domain
        if self.characteristic:
            # sympy may hand back the symmetric representative
            return int(K.to_int(element)) % self.characteristic
        return Fraction(int(K.numer(element)), int(K.denom(element)))

    def render(self, value: Scalar) -> str:
        return str(value)

    def __str__(self):
        return "Q" if self.is_rational else f"F{self.characteristic}"


@lru_cache(maxsize=None)
def _domain(p: int):
    return GF(p) if p else QQ


@dataclass(frozen=True)
class SparseMatrix:
    """Row-major sparse matrix; ``entries[row][col]`` holds nonzero scalars."""

    rows: int
    cols: int
    field: FieldSpec
    entries: Mapping[int, Mapping[int, Scalar]] = dc_field(default_factory=dict)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Mapping[int, Scalar]], cols: int, field: FieldSpec
    ) -> "SparseMatrix":
        entries = {}
        for i, row in enumerate(rows):
            clean = {}
            for j, value in row.items():
                if not 0 <= j < cols:
                    raise IndexError(f"column {j} out of range for {cols} columns")
                value = field.coerce(value)
                if value:
                    clean[j] = value
            if clean:
                entries[i] = MappingProxyType(clean)
        return cls(len(rows), cols, field, MappingProxyType(entries))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field: FieldSpec) -> "SparseMatrix":
        cols = len(rows[0]) if rows else 0
        return cls.from_rows(
            [{j: v for j, v in enumerate(row) if v} for row in rows], cols, field
        )

    @classmethod
    def from_columns(
        cls, columns: Sequence[Mapping[int, Scalar]], rows: int, field: FieldSpec
    ) -> "SparseMatrix":
        return transpose(cls.from_rows(columns, rows, field))

    def row(self, i: int) -> Vector:
        return dict(self.entries.get(i, {}))

    def row_list(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def column_list(self) -> List[Vector]:
        return transpose(self).row_list()

    def to_dense(self) -> List[List[Scalar]]:
        zero = self.field.coerce(0)
        return [
            [self.entries.get(i, {}).get(j, zero) for j in range(self.cols)]
            for i in range(self.rows)
        ]

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.entries.values())

    def to_sdm(self) -> SDM:
        f = self.field
        elements = {
            i: {j: f.to_domain(v) for j, v in row.items()} for i, row in self.entries.items() if row
        }
        return SDM(elements, (self.rows, self.cols), f.domain)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.field) == (
            other.rows,
            other.cols,
            other.field,
        ) and {i: dict(r) for i, r in self.entries.items()} == {
            i: dict(r) for i, r in other.entries.items()
        }

    def __hash__(self):
        return hash((self.rows, self.cols, self.field, self.nnz))


def transpose(m: SparseMatrix) -> SparseMatrix:
    columns: Dict[int, Dict[int, Scalar]] = {}
    for i, row in m.entries.items():
        for j, value in row.items():
            columns.setdefault(j, {})[i] = value
    return SparseMatrix.from_rows(
        [columns.get(j, {}) for j in range(m.cols)], m.rows, m.field
    )


def matmul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch {a.rows}x{a.cols} * {b.rows}x{b.cols}")
    f = a.field
    out = []
    for i in range(a.rows):
        acc: Vector = {}
        for k, a_ik in a.entries.get(i, {}).items():
            for j, b_kj in b.entries.get(k, {}).items():
                acc[j] = acc.get(j, 0) + a_ik * b_kj
        out.append(acc)
    return SparseMatrix.from_rows(out, b.cols, f)


def apply(m: SparseMatrix, vector: Mapping[int, Scalar]) -> Vector:
    """``m · v`` for a sparse column vector ``v``."""
    f = m.field
    out: Vector = {}
    for i, row in m.entries.items():
        acc = 0
        for j, value in row.items():
            v = vector.get(j)
            if v:
                acc += value * v
        acc = f.coerce(acc)
        if acc:
            out[i] = acc
    return out


def add_scaled(target: Vector, source: Mapping[int, Scalar], scale: Scalar, field: FieldSpec):
    """In place ``target += scale * source``, dropping cancelled entries."""
    for j, value in source.items():
        new = field.coerce(target.get(j, 0) + scale * value)
        if new:
            target[j] = new
        else:
            target.pop(j, None)


class RowSpace(object):
    """Incrementally grown row space kept in echelon form.

    Each pivot row is monic at its leftmost column.  ``add`` returns whether
    the vector enlarged the space, which is how minimal generators are
    picked degree by degree.
    """

    def __init__(self, field: FieldSpec):
        self.field = field
        self.pivots: Dict[int, Vector] = {}

    def __len__(self):
        return len(self.pivots)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vector: Mapping[int, Scalar]) -> Vector:
        f = self.field
        row = {j: f.coerce(v) for j, v in vector.items() if v}
        row = {j: v for j, v in row.items() if v}
        while row:
            lead = min(row)
            pivot_row = self.pivots.get(lead)
            if pivot_row is None:
                # the leading column is free; finish the reduction past it
                tail = {j: v for j, v in row.items() if j != lead}
                reduced_tail = self._reduce_tail(tail)
                reduced_tail[lead] = row[lead]
                return reduced_tail
            add_scaled(row, pivot_row, -row[lead], f)
        return row

    def _reduce_tail(self, row: Vector) -> Vector:
        f = self.field
        row = dict(row)
        result: Vector = {}
        while row:
            lead = min(row)
            pivot_row = self.pivots.get(lead)
            if pivot_row is None:
                result[lead] = row.pop(lead)
            else:
                add_scaled(row, pivot_row, -row[lead], f)
        return result

    def contains(self, vector: Mapping[int, Scalar]) -> bool:
        return not self.reduce(vector)

    def add(self, vector: Mapping[int, Scalar]) -> bool:
        row = self.reduce(vector)
        if not row:
            return False
        lead = min(row)
        scale = self.field.inv(row[lead])
        self.pivots[lead] = {j: self.field.coerce(v * scale) for j, v in row.items()}
        return True

    def extend(self, vectors: Iterable[Mapping[int, Scalar]]) -> int:
        return sum(1 for v in vectors if self.add(v))

    def reduced_rows(self) -> List[Tuple[int, Vector]]:
        """Back-substitute into reduced row echelon form, ordered by pivot."""
        f = self.field
        ordered = sorted(self.pivots)
        rows = {c: dict(self.pivots[c]) for c in ordered}
        for c in reversed(ordered):
            pivot_row = rows[c]
            for other in ordered:
                if other >= c:
                    break
                row = rows[other]
                coeff = row.get(c)
                if coeff:
                    add_scaled(row, pivot_row, -coeff, f)
        return [(c, rows[c]) for c in ordered]


Echelon = namedtuple("Echelon", ["matrix", "rank", "pivots"])


def rref(m: SparseMatrix) -> Echelon:
    """Reduced row echelon form, its rank and pivot columns."""
    f = m.field
    reduced, pivots = m.to_sdm().rref()
    rows = [
        {j: f.from_domain(v) for j, v in row.items()}
        for row in sorted((row for row in reduced.values() if row), key=min)
    ]
    rows.extend({} for _ in range(m.rows - len(rows)))
    return Echelon(SparseMatrix.from_rows(rows, m.cols, f), len(pivots), sorted(pivots))


def rank(m: SparseMatrix) -> int:
    if not m.entries:
        return 0
    _, pivots = m.to_sdm().rref()
    return len(pivots)


def kernel_vectors(m: SparseMatrix) -> List[Vector]:
    """Right kernel basis, one vector per free column in increasing order."""
    echelon = rref(m)
    pivot_rows = [(c, echelon.matrix.row(i)) for i, c in enumerate(echelon.pivots)]
    pivot_set = set(echelon.pivots)
    f = m.field
    one = f.coerce(1)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vector = {free: one}
        for c, row in pivot_rows:
            value = row.get(free)
            if value:
                vector[c] = f.coerce(-value)
        basis.append(vector)
    return basis


def kernel_basis(m: SparseMatrix) -> SparseMatrix:
    """Matrix whose columns form a basis of the right kernel of ``m``."""
    return SparseMatrix.from_columns(kernel_vectors(m), m.cols, m.field)


def solve(vectors: Sequence[Mapping[int, Scalar]], target: Mapping[int, Scalar], field: FieldSpec) -> Optional[List[Scalar]]:
    """Coefficients ``c`` with ``sum(c[k] * vectors[k]) == target`` or None.

    Free coefficients are set to zero, so the answer is deterministic.
    """
    n = len(vectors)
    by_coordinate: Dict[int, Vector] = {}
    for k, vector in enumerate(vectors):
        for i, value in vector.items():
            if value:
                by_coordinate.setdefault(i, {})[k] = value
    for i, value in target.items():
        if value:
            by_coordinate.setdefault(i, {})[n] = value
    rows = [by_coordinate[i] for i in sorted(by_coordinate)]
    echelon = rref(SparseMatrix.from_rows(rows, n + 1, field))
    if n in echelon.pivots:
        return None
    solution = [field.coerce(0)] * n
    for i, c in enumerate(echelon.pivots):
        solution[c] = echelon.matrix.row(i).get(n, field.coerce(0))
    return solution


def rank_cross_check(integer_rows: Sequence[Sequence[int]], field: FieldSpec) -> Tuple[int, int]:
    """Rank over Q and over ``field`` of an integer matrix.

    When the modular rank drops, the second prime is tried before the
    disagreement is reported.
    """
    q_rank = rank(SparseMatrix.from_dense(integer_rows, FieldSpec.rationals()))
    p_rank = rank(SparseMatrix.from_dense(integer_rows, field))
    if p_rank != q_rank and not field.is_rational:
        p_rank = rank(SparseMatrix.from_dense(integer_rows, field.cross_check_prime()))
    return q_rank, p_rank
