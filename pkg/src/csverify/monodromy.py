"""Nilpotent operators and their centered weight filtrations.

For a nilpotent endomorphism N of Q^d and a center k there is a unique
finite increasing filtration M with N.M_i contained in M_{i-2} such that
the i-th power of N induces an isomorphism Gr_{k+i} -> Gr_{k-i}.  Two
independent constructions are implemented:

* ``monodromy_filtration`` builds Jordan chains of N by the kernel-flag
  procedure (the only eigenvalue is 0, so no eigenvalue machinery is
  needed) and assigns a chain of length m the weights k+m-1, k+m-3, ...,
  k-m+1 from head to tail;

* ``monodromy_filtration_recursive`` uses the classical recursion: with
  N^m nonzero and N^{m+1} = 0 the extreme steps are forced (full space,
  ker N^m, im N^m, zero) and the middle ones are lifted from the centered
  filtration of the operator induced on ker(N^m)/im(N^m).

Uniqueness makes agreement of the two a sharp cross-check, exercised at
scale by the test suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .filtration import FilteredSpace, tate_twist
from .linalg import (
    DimensionMismatchError,
    Matrix,
    canonicalize,
    coords_map,
    image,
    kernel,
    quotient_map,
    rank,
    section_of_quotient,
    span_of_vectors,
    transpose,
)


class NilpotencyError(ValueError):
    """The matrix is not nilpotent."""


def nilpotency_index(m: Matrix) -> int:
    """Least p with m^p = 0; raises if no power up to the dimension vanishes."""
    if m.nrows != m.ncols:
        raise DimensionMismatchError("nilpotency index of a non-square matrix")
    power = Matrix.identity(m.nrows)
    for p in range(m.nrows + 1):
        if power.is_zero():
            return p
        power = power @ m
    raise NilpotencyError("matrix is not nilpotent")


class NilpotentOp:
    """A nilpotent endomorphism N of a filtered space, viewed as landing
    in the space twisted by -1.

    Weight compatibility in that twisted sense means N may raise stored
    weights by at most two: N.W_i must land in W_{i+2}.
    """

    __slots__ = ("space", "matrix", "index")

    def __init__(self, space: FilteredSpace, matrix: Matrix):
        if matrix.nrows != space.dim or matrix.ncols != space.dim:
            raise DimensionMismatchError(
                f"operator is {matrix.nrows}x{matrix.ncols} on a space of dimension {space.dim}")
        self.index = nilpotency_index(matrix)
        for w in space.jumps:
            if not space.step(w + 2).contains(image(matrix, space.step(w))):
                raise NilpotencyError(f"operator raises weight {w} by more than two")
        self.space = space
        self.matrix = matrix

    @property
    def twisted_space(self) -> FilteredSpace:
        return tate_twist(self.space, -1)

    def __repr__(self) -> str:
        return f"NilpotentOp(dim {self.space.dim}, index {self.index})"


@dataclass(frozen=True)
class CenteredFiltration:
    """A candidate monodromy filtration: a center and the step data."""

    center: int
    filtration: FilteredSpace


def _jordan_chains(matrix: Matrix, d: int):
    """Jordan chains of a nilpotent matrix via the kernel flag.

    Returns a list of chains, each a list of vectors head-first, so a
    chain of length m is (v, Nv, ..., N^{m-1}v) with N^m v = 0.
    """
    p = nilpotency_index(matrix)
    kernels = []
    power = Matrix.identity(d)
    for _ in range(p + 1):
        kernels.append(kernel(power))
        power = power @ matrix
    chains = []
    alive = []  # chains whose most recent vector sits at the current level
    for level in range(p, 0, -1):
        pushed = []
        for chain in alive:
            nxt = matrix.apply(chain[-1])
            chain.append(nxt)
            pushed.append(nxt)
        have = kernels[level - 1]
        if pushed:
            have = have.sum(span_of_vectors(pushed, d))
        for row in kernels[level].basis.rows:
            if not have.contains_vector(row):
                chain = [row]
                chains.append(chain)
                alive.append(chain)
                have = have.sum(span_of_vectors([row], d))
    total = sum(len(c) for c in chains)
    if total != d:
        raise AssertionError(f"Jordan chain vectors span dimension {total}, expected {d}")
    return chains


def centered_filtration(matrix: Matrix, dim: int, k: int) -> FilteredSpace:
    """Centered weight filtration of a nilpotent matrix, by Jordan chains."""
    if dim == 0:
        return FilteredSpace.zero()
    weighted = []  # (weight, vector)
    for chain in _jordan_chains(matrix, dim):
        m = len(chain)
        for pos, vec in enumerate(chain):
            weighted.append((k + m - 1 - 2 * pos, vec))
    weights = sorted({w for w, _ in weighted})
    steps = {}
    for w in weights:
        rows = [vec for wt, vec in weighted if wt <= w]
        steps[w] = span_of_vectors(rows, dim)
    return FilteredSpace(dim, steps)


def monodromy_filtration(n: NilpotentOp, k: int) -> CenteredFiltration:
    """The unique filtration centered at k attached to the nilpotent n."""
    return CenteredFiltration(k, centered_filtration(n.matrix, n.space.dim, k))


def centered_filtration_recursive(matrix: Matrix, dim: int, k: int,
                                  section_rng: Optional[random.Random] = None) -> FilteredSpace:
    """Centered filtration by the classical recursion on ker(N^m)/im(N^m).

    The induced operator on the subquotient is computed through a linear
    section of ker(N^m) onto the quotient; any section gives the same
    induced matrix, and ``section_rng`` perturbs the canonical choice by
    an arbitrary correction into im(N^m) to let tests exercise that.
    """
    if dim == 0:
        return FilteredSpace.zero()
    p = nilpotency_index(matrix)
    if p <= 1:
        return FilteredSpace.pure(dim, k)
    m = p - 1
    npow = matrix.power(m)
    ker_nm = kernel(npow)
    im_nm = image(npow)
    k_basis = ker_nm.basis          # kappa x dim
    k_coords = coords_map(ker_nm)   # kappa x dim
    n_on_ker = k_coords @ matrix @ transpose(k_basis)
    im_in_k = image(k_coords, im_nm)
    q2 = quotient_map(im_in_k)
    sigma = section_of_quotient(im_in_k)
    if section_rng is not None and im_in_k.dim > 0 and q2.nrows > 0:
        correction = Matrix.from_rows(
            [[section_rng.randint(-3, 3) for _ in range(q2.nrows)] for _ in range(im_in_k.dim)],
            ncols=q2.nrows)
        sigma = sigma + (transpose(im_in_k.basis) @ correction)
    induced = q2 @ n_on_ker @ sigma
    inner = centered_filtration_recursive(induced, q2.nrows, k, section_rng)

    steps = {k + m: canonicalize(Matrix.identity(dim)), k + m - 1: ker_nm, k - m: im_nm}
    lift = transpose(k_basis) @ sigma  # quotient coords -> ambient
    for w, sub in inner.steps:
        if w <= k - m or w > k + m - 2:
            continue
        rows = list(im_nm.basis.rows)
        for row in sub.basis.rows:
            rows.append(lift.apply(row))
        steps[w] = span_of_vectors(rows, dim)
    return FilteredSpace(dim, steps)


def monodromy_filtration_recursive(n: NilpotentOp, k: int,
                                   section_rng: Optional[random.Random] = None) -> CenteredFiltration:
    """Same object as monodromy_filtration, by the independent recursion."""
    return CenteredFiltration(k, centered_filtration_recursive(n.matrix, n.space.dim, k, section_rng))


@dataclass(frozen=True)
class AxiomVerdict:
    """Result of checking the two centered-filtration axioms."""

    ok: bool
    failed_axiom: Optional[str] = None   # "shift" or "graded_iso"
    failed_index: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_centered_axioms(f: CenteredFiltration, n: NilpotentOp) -> AxiomVerdict:
    """Check N.M_i <= M_{i-2} and that N^i induces Gr_{k+i} ~ Gr_{k-i}.

    Returns the first failing axiom with its witness index; this is a
    verdict, not an exception.
    """
    space = f.filtration
    if space.dim != n.space.dim:
        raise DimensionMismatchError("filtration and operator live on different spaces")
    k = f.center
    for w in space.jumps:
        if not space.step(w - 2).contains(image(n.matrix, space.step(w))):
            return AxiomVerdict(False, failed_axiom="shift", failed_index=w)
    spread = max((abs(w - k) for w in space.jumps), default=0)
    power = n.matrix
    for i in range(1, spread + 1):
        up = _graded_complement(space, k + i)
        down_proj = _graded_projection(space, k - i)
        dim_up = up.nrows
        dim_down = down_proj.nrows
        if dim_up != dim_down:
            return AxiomVerdict(False, failed_axiom="graded_iso", failed_index=i)
        if dim_up:
            induced = down_proj @ power @ transpose(up)
            if rank(induced) != dim_up:
                return AxiomVerdict(False, failed_axiom="graded_iso", failed_index=i)
        power = power @ n.matrix
    return AxiomVerdict(True)


def _graded_projection(space: FilteredSpace, w: int) -> Matrix:
    from .filtration import graded_piece

    return graded_piece(space, w).projection


def _graded_complement(space: FilteredSpace, w: int) -> Matrix:
    """Rows spanning W_w modulo W_{w-1} (representatives of Gr_w)."""
    lower = space.step(w - 1)
    rows = []
    current = lower
    for row in space.step(w).basis.rows:
        if not current.contains_vector(row):
            rows.append(row)
            current = current.sum(span_of_vectors([row], space.dim))
    return Matrix.from_rows(rows, ncols=space.dim)


@dataclass(frozen=True)
class BoundsVerdict:
    """Outcome of the kernel/cokernel weight-bound check.

    ``status`` is "ok", "hypothesis_not_satisfied" (the space's weight
    filtration is not the centered filtration of the operator, so the
    bounds are not even in question), "ker_bound_failed" or
    "coker_bound_failed".
    """

    status: str
    detail: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def __bool__(self) -> bool:
        return self.ok


def ker_coker_weight_bounds(n: NilpotentOp, k: int) -> BoundsVerdict:
    """ker N has weights <= k and coker(N: V -> V(-1)) has weights >= k+2.

    Requires the weight filtration of n.space to equal the centered
    filtration of n at k.  The cokernel bound is checked in quotient
    form: W_{k+1} of the cokernel vanishes iff W_{k-1}(V) lies in im N.
    """
    expected = centered_filtration(n.matrix, n.space.dim, k)
    if expected != n.space:
        return BoundsVerdict("hypothesis_not_satisfied",
                             "weight filtration differs from the centered filtration")
    ker_n = kernel(n.matrix)
    if not n.space.step(k).contains(ker_n):
        return BoundsVerdict("ker_bound_failed", f"ker N not contained in W_{k}")
    im_n = image(n.matrix)
    if not im_n.contains(n.space.step(k - 1)):
        return BoundsVerdict("coker_bound_failed", f"W_{k - 1} not contained in im N")
    return BoundsVerdict("ok")
