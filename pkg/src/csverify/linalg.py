"""Exact dense linear algebra over the rationals.

Everything downstream (filtrations, monodromy, the sequence verifiers)
reduces to the subspace lattice implemented here: canonical reduced
row-echelon bases, sums, intersections, images, kernels and preimages.
No floating point is used anywhere; scalars are arbitrary-precision
rationals (gmpy2.mpq when available, fractions.Fraction otherwise).

Conventions:
  * vectors are tuples of rationals, acted on as column vectors;
  * a matrix of shape (m, n) maps Q^n -> Q^m;
  * a Subspace stores a basis whose rows are in reduced row-echelon
    form, so two subspaces are equal as sets iff they compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

try:
    from gmpy2 import mpq as _mpq

    def Q(value: Union[int, str, "_mpq"] = 0, den: Optional[int] = None):
        if den is not None:
            return _mpq(value, den)
        return _mpq(value)

except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as _mpq

    def Q(value=0, den=None):
        if den is not None:
            return _mpq(value, den)
        if isinstance(value, str):
            return _mpq(value)
        return _mpq(value)


QLike = Union[int, str, "_mpq"]

_ZERO = Q(0)
_ONE = Q(1)


class DimensionMismatchError(ValueError):
    """Shapes of the operands are incompatible."""


def qstr(x) -> str:
    """Render a rational as "p/q" (or "p" when integral)."""
    return str(x)


def _row(values: Iterable[QLike]) -> tuple:
    return tuple(Q(v) for v in values)


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with explicit shape (rows may be empty)."""

    nrows: int
    ncols: int
    rows: tuple

    @staticmethod
    def from_rows(rows: Sequence[Sequence[QLike]], ncols: Optional[int] = None) -> "Matrix":
        rows = [_row(r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise DimensionMismatchError("rows have varying lengths")
            if ncols is not None and ncols != width:
                raise DimensionMismatchError(f"expected {ncols} columns, got {width}")
            ncols = width
        elif ncols is None:
            raise DimensionMismatchError("column count required for a matrix with no rows")
        return Matrix(len(rows), ncols, tuple(rows))

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(m: int, n: int) -> "Matrix":
        return Matrix(m, n, tuple(tuple(_ZERO for _ in range(n)) for _ in range(m)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        # transpose the right factor once; inner loops then run over rows
        bt = list(zip(*other.rows)) if other.rows and other.ncols else [()] * other.ncols
        out = []
        for r in self.rows:
            out.append(tuple(sum((r[k] * col[k] for k in range(self.ncols)), _ZERO) for col in bt))
        return Matrix(self.nrows, other.ncols, tuple(out))

    def apply(self, vec: Sequence[QLike]) -> tuple:
        """Matrix times column vector."""
        v = _row(vec)
        if len(v) != self.ncols:
            raise DimensionMismatchError(f"vector of length {len(v)} for {self.nrows}x{self.ncols}")
        return tuple(sum((r[k] * v[k] for k in range(self.ncols)), _ZERO) for r in self.rows)

    def transpose(self) -> "Matrix":
        return transpose(self)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("shape mismatch in matrix sum")
        return Matrix(self.nrows, self.ncols,
                      tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)))

    def scale(self, c: QLike) -> "Matrix":
        c = Q(c)
        return Matrix(self.nrows, self.ncols, tuple(tuple(c * x for x in r) for r in self.rows))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def power(self, e: int) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionMismatchError("power of a non-square matrix")
        result = Matrix.identity(self.nrows)
        for _ in range(e):
            result = result @ self
        return result

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def __repr__(self) -> str:
        if self.nrows == 0 or self.ncols == 0:
            return f"Matrix({self.nrows}x{self.ncols})"
        body = "; ".join(" ".join(qstr(x) for x in r) for r in self.rows)
        return f"Matrix[{body}]"


def transpose(m: Matrix) -> Matrix:
    if m.nrows == 0:
        return Matrix(m.ncols, 0, tuple(() for _ in range(m.ncols)))
    return Matrix(m.ncols, m.nrows, tuple(zip(*m.rows)))


def vstack(a: Matrix, b: Matrix) -> Matrix:
    if a.ncols != b.ncols:
        raise DimensionMismatchError("vstack with differing column counts")
    return Matrix(a.nrows + b.nrows, a.ncols, a.rows + b.rows)


def hstack(a: Matrix, b: Matrix) -> Matrix:
    if a.nrows != b.nrows:
        raise DimensionMismatchError("hstack with differing row counts")
    return Matrix(a.nrows, a.ncols + b.ncols, tuple(r1 + r2 for r1, r2 in zip(a.rows, b.rows)))


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    top = hstack(a, Matrix.zero(a.nrows, b.ncols))
    bottom = hstack(Matrix.zero(b.nrows, a.ncols), b)
    return vstack(top, bottom)


def rref(m: Matrix) -> tuple:
    """Reduced row-echelon form.

    Returns (rows, pivots) where rows are the nonzero reduced rows and
    pivots the strictly increasing pivot column indices.
    """
    rows = [list(r) for r in m.rows]
    nrows, ncols = m.nrows, m.ncols
    pivots = []
    pr = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(pr, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
        inv = _ONE / rows[pr][c]
        if inv != 1:
            row = rows[pr]
            for j in range(c, ncols):
                row[j] = row[j] * inv
        prow = rows[pr]
        for i in range(nrows):
            if i == pr:
                continue
            factor = rows[i][c]
            if factor != 0:
                row = rows[i]
                for j in range(c, ncols):
                    row[j] = row[j] - factor * prow[j]
        pivots.append(c)
        pr += 1
        if pr == nrows:
            break
    reduced = tuple(tuple(rows[i]) for i in range(pr))
    return reduced, tuple(pivots)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim with canonical echelon basis.

    Construct through :func:`canonicalize`; the canonical form makes
    set equality coincide with structural equality.
    """

    ambient_dim: int
    basis: Matrix
    pivots: tuple

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def basis_rows(self) -> tuple:
        return self.basis.rows

    def contains_vector(self, vec: Sequence[QLike]) -> bool:
        v = list(_row(vec))
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError("vector/ambient dimension mismatch")
        for row, p in zip(self.basis.rows, self.pivots):
            c = v[p]
            if c != 0:
                for j in range(p, self.ambient_dim):
                    v[j] = v[j] - c * row[j]
        return all(x == 0 for x in v)

    def contains(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        if other.dim > self.dim:
            return False
        return all(self.contains_vector(r) for r in other.basis.rows)

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        return canonicalize(vstack(self.basis, other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Intersection via the kernel of the stacked-coefficient system.

        A combination x.A = y.B of the two bases lies in both spaces; the
        pairs (x, y) form the kernel of [A^T | -B^T].
        """
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        p, q = self.dim, other.dim
        if p == 0 or q == 0:
            return zero_subspace(self.ambient_dim)
        stacked = hstack(transpose(self.basis), transpose(other.basis).scale(-1))
        combos = kernel(stacked)
        rows = []
        for comb in combos.basis.rows:
            x = comb[:p]
            rows.append(tuple(sum((x[i] * self.basis.rows[i][j] for i in range(p)), _ZERO)
                              for j in range(self.ambient_dim)))
        return canonicalize(Matrix.from_rows(rows, ncols=self.ambient_dim))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"


def canonicalize(m: Matrix) -> Subspace:
    """Row space of m in canonical reduced-echelon form."""
    reduced, pivots = rref(m)
    return Subspace(m.ncols, Matrix(len(reduced), m.ncols, reduced), pivots)


def zero_subspace(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, Matrix(0, ambient_dim, ()), ())


def full_subspace(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, Matrix.identity(ambient_dim), tuple(range(ambient_dim)))


def span_of_vectors(vectors: Sequence[Sequence[QLike]], ambient_dim: int) -> Subspace:
    return canonicalize(Matrix.from_rows(list(vectors), ncols=ambient_dim))


def image(f: Matrix, s: Optional[Subspace] = None) -> Subspace:
    """Image f(s), defaulting to the full column space of f."""
    if s is None:
        return canonicalize(transpose(f))
    if s.ambient_dim != f.ncols:
        raise DimensionMismatchError("subspace not in the domain of f")
    if s.dim == 0:
        return zero_subspace(f.nrows)
    mapped = s.basis @ transpose(f)
    return canonicalize(mapped)


def kernel(f: Matrix) -> Subspace:
    """Kernel of f as a canonical subspace of the domain."""
    reduced, pivots = rref(f)
    n = f.ncols
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    rows = []
    for fc in free_cols:
        v = [_ZERO] * n
        v[fc] = _ONE
        for r, p in zip(reduced, pivots):
            v[p] = -r[fc]
        rows.append(tuple(v))
    return canonicalize(Matrix.from_rows(rows, ncols=n))


def preimage(f: Matrix, s: Subspace) -> Subspace:
    """{v : f(v) in s}, computed as the kernel of (membership of s) . f."""
    if s.ambient_dim != f.nrows:
        raise DimensionMismatchError("subspace not in the codomain of f")
    return kernel(membership_matrix(s) @ f)


def membership_matrix(s: Subspace) -> Matrix:
    """A square matrix E with kernel exactly s (residual after reduction)."""
    n = s.ambient_dim
    bt = transpose(s.basis)
    sel = coords_map(s)
    return Matrix.identity(n) + (bt @ sel).scale(-1)


def coords_map(s: Subspace) -> Matrix:
    """Selector P with P.v = coordinates of v in the basis of s (valid on s)."""
    rows = []
    for p in s.pivots:
        rows.append(tuple(_ONE if j == p else _ZERO for j in range(s.ambient_dim)))
    return Matrix(s.dim, s.ambient_dim, tuple(rows))


def quotient_map(s: Subspace) -> Matrix:
    """Surjection Q^n -> Q^(n-dim s) with kernel exactly s."""
    n = s.ambient_dim
    e = membership_matrix(s)
    pivot_set = set(s.pivots)
    rows = tuple(e.rows[j] for j in range(n) if j not in pivot_set)
    return Matrix(n - s.dim, n, rows)


def section_of_quotient(s: Subspace) -> Matrix:
    """Canonical right inverse of quotient_map(s) (columns on free coords)."""
    n = s.ambient_dim
    pivot_set = set(s.pivots)
    free = [j for j in range(n) if j not in pivot_set]
    rows = []
    for i in range(n):
        rows.append(tuple(_ONE if i == free[c] else _ZERO for c in range(len(free))))
    return Matrix(n, len(free), tuple(rows))


def solve(a: Matrix, b: Sequence[QLike]) -> Optional[tuple]:
    """One solution of a.x = b, or None when inconsistent (free vars 0)."""
    bv = _row(b)
    if len(bv) != a.nrows:
        raise DimensionMismatchError("right-hand side has wrong length")
    aug = Matrix(a.nrows, a.ncols + 1, tuple(r + (bv[i],) for i, r in enumerate(a.rows)))
    reduced, pivots = rref(aug)
    x = [_ZERO] * a.ncols
    for row, p in zip(reduced, pivots):
        if p == a.ncols:
            return None
        x[p] = row[a.ncols]
    return tuple(x)


def inverse(a: Matrix) -> Matrix:
    if a.nrows != a.ncols:
        raise DimensionMismatchError("inverse of a non-square matrix")
    n = a.nrows
    aug = hstack(a, Matrix.identity(n))
    reduced, pivots = rref(aug)
    if pivots != tuple(range(n)):
        raise DimensionMismatchError("matrix is singular")
    return Matrix(n, n, tuple(r[n:] for r in reduced))


def rank(a: Matrix) -> int:
    return len(rref(a)[1])
