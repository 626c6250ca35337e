"""Finite-dimensional rational vector spaces with increasing weight filtrations.

A FilteredSpace is Q^d together with a finite increasing, exhaustive and
bounded filtration W recorded sparsely at its jump weights.  Maps between
filtered spaces must not raise weights; the strict ones are exactly those
whose kernel/image/cokernel inherit well-behaved filtrations, which is what
every exactness argument downstream leans on.

Tate twist convention: ``tate_twist(v, n)`` models v(n) and shifts every
weight by -2n, so twisting by -1 raises all weights by 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, NamedTuple, Optional, Tuple

from .linalg import (
    DimensionMismatchError,
    Matrix,
    Subspace,
    canonicalize,
    coords_map,
    full_subspace,
    image,
    kernel,
    quotient_map,
    zero_subspace,
)


class FiltrationError(ValueError):
    """The given steps do not form a nested, exhaustive filtration."""


class WeightCompatibilityError(ValueError):
    """A map sends some W_i of its source outside W_i of its target."""


class ComposabilityError(ValueError):
    """Two maps do not share the middle filtered space."""


class NotStrictError(ValueError):
    """Operation requires a strict map."""


class FilteredSpace:
    """Q^dim with a finite increasing weight filtration.

    Steps are stored only at jump weights; W_i is constant between jumps,
    zero below the smallest jump and the full space at and above the
    largest one.  Equality is structural: same dimension, same canonical
    jump data.
    """

    __slots__ = ("dim", "steps")

    def __init__(self, dim: int, steps: Mapping[int, Subspace]):
        if dim < 0:
            raise FiltrationError("negative dimension")
        normalized = []
        prev = zero_subspace(dim)
        for w in sorted(steps):
            sub = steps[w]
            if sub.ambient_dim != dim:
                raise FiltrationError(f"step at weight {w} lives in Q^{sub.ambient_dim}, not Q^{dim}")
            if sub == prev:
                continue
            if not sub.contains(prev):
                raise FiltrationError(f"filtration not increasing at weight {w}")
            normalized.append((w, sub))
            prev = sub
        if dim > 0 and (not normalized or normalized[-1][1].dim != dim):
            raise FiltrationError("filtration is not exhaustive (top step must be the full space)")
        self.dim = dim
        self.steps = tuple(normalized)

    @staticmethod
    def pure(dim: int, weight: int) -> "FilteredSpace":
        if dim == 0:
            return FilteredSpace(0, {})
        return FilteredSpace(dim, {weight: full_subspace(dim)})

    @staticmethod
    def zero() -> "FilteredSpace":
        return FilteredSpace(0, {})

    @property
    def jumps(self) -> Tuple[int, ...]:
        return tuple(w for w, _ in self.steps)

    def step(self, i: int) -> Subspace:
        """W_i: the largest recorded step at weight <= i."""
        current = zero_subspace(self.dim)
        for w, sub in self.steps:
            if w > i:
                break
            current = sub
        return current

    def graded_dims(self) -> Dict[int, int]:
        out = {}
        prev = 0
        for w, sub in self.steps:
            out[w] = sub.dim - prev
            prev = sub.dim
        return out

    def min_weight(self) -> Optional[int]:
        return self.steps[0][0] if self.steps else None

    def max_weight(self) -> Optional[int]:
        return self.steps[-1][0] if self.steps else None

    def is_pure(self, weight: int) -> bool:
        return self.dim == 0 or self.jumps == (weight,)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FilteredSpace):
            return NotImplemented
        return self.dim == other.dim and self.steps == other.steps

    def __hash__(self):
        return hash((self.dim, self.steps))

    def __repr__(self) -> str:
        parts = ", ".join(f"{w}:{sub.dim}" for w, sub in self.steps)
        return f"FilteredSpace(dim {self.dim}; W {parts})"


@dataclass(frozen=True)
class PurityCertificate:
    """Witness that a space is pure: all graded pieces vanish off one weight."""

    space: FilteredSpace
    weight: int

    def __post_init__(self):
        if not self.space.is_pure(self.weight):
            raise FiltrationError(f"space is not pure of weight {self.weight}")


def tate_twist(v: FilteredSpace, n: int) -> FilteredSpace:
    """v(n): same underlying space, weights shifted by -2n."""
    return FilteredSpace(v.dim, {w - 2 * n: sub for w, sub in v.steps})


def direct_sum(x: FilteredSpace, y: FilteredSpace) -> FilteredSpace:
    """Block direct sum, x in the leading coordinates."""
    dim = x.dim + y.dim
    weights = sorted(set(x.jumps) | set(y.jumps))
    steps = {}
    for w in weights:
        xs, ys = x.step(w), y.step(w)
        rows = [r + (0,) * y.dim for r in xs.basis.rows]
        rows += [(0,) * x.dim + r for r in ys.basis.rows]
        steps[w] = canonicalize(Matrix.from_rows(rows, ncols=dim))
    return FilteredSpace(dim, steps)


def weights_leq(v: FilteredSpace, k: int) -> bool:
    """True iff W_k is the full space."""
    return v.step(k).dim == v.dim


def weights_geq(v: FilteredSpace, k: int) -> bool:
    """True iff W_{k-1} vanishes."""
    return v.step(k - 1).dim == 0


class GradedPiece(NamedTuple):
    dim: int
    projection: Matrix  # ambient -> Q^dim; kernel meets W_i exactly in W_{i-1}


def graded_piece(v: FilteredSpace, i: int) -> GradedPiece:
    """Gr_i = W_i / W_{i-1} with an explicit projection matrix."""
    wi = v.step(i)
    wim1 = v.step(i - 1)
    q = quotient_map(wim1)
    graded_image = image(q, wi)
    proj = coords_map(graded_image) @ q
    return GradedPiece(graded_image.dim, proj)


class FilteredMap:
    """A weight-compatible linear map between filtered spaces.

    The twist tag is bookkeeping: it records that the target's weights
    were produced by an n-fold Tate twist, for reporting purposes only.
    """

    __slots__ = ("source", "target", "matrix", "twist")

    def __init__(self, source: FilteredSpace, target: FilteredSpace, matrix: Matrix, twist: int = 0):
        if matrix.nrows != target.dim or matrix.ncols != source.dim:
            raise DimensionMismatchError(
                f"map matrix is {matrix.nrows}x{matrix.ncols}, expected {target.dim}x{source.dim}")
        for w in source.jumps:
            if not target.step(w).contains(image(matrix, source.step(w))):
                raise WeightCompatibilityError(f"W_{w} of the source is not carried into W_{w} of the target")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.twist = twist

    def __repr__(self) -> str:
        return f"FilteredMap({self.source!r} -> {self.target!r}, twist {self.twist})"


@dataclass(frozen=True)
class StrictnessVerdict:
    strict: bool
    failing_weight: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.strict


def is_strict(f: FilteredMap) -> bool:
    return strictness(f).strict


def strictness(f: FilteredMap) -> StrictnessVerdict:
    """Check im(f) . W_i(target) = f(W_i(source)) at every jump weight."""
    im = image(f.matrix)
    for w in sorted(set(f.source.jumps) | set(f.target.jumps)):
        lhs = im.intersect(f.target.step(w))
        rhs = image(f.matrix, f.source.step(w))
        if lhs != rhs:
            return StrictnessVerdict(False, failing_weight=w)
    return StrictnessVerdict(True)


@dataclass(frozen=True)
class ExactnessVerdict:
    """Outcome of an image-equals-kernel test, with a failure witness.

    On failure the witness is either a vector of ker(g) outside im(f)
    (reason "kernel_exceeds_image") or a vector of im(f) not killed by g
    (reason "composite_nonzero").
    """

    exact: bool
    reason: Optional[str] = None
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.exact


def exactness_at(f: Matrix, g: Matrix) -> ExactnessVerdict:
    """Exactness of the two-map matrix sequence . -f-> . -g-> . at the middle."""
    if g.ncols != f.nrows:
        raise ComposabilityError(
            f"maps do not compose: f lands in Q^{f.nrows}, g starts from Q^{g.ncols}")
    im = image(f)
    ker = kernel(g)
    if im == ker:
        return ExactnessVerdict(True)
    for row in im.basis.rows:
        if any(x != 0 for x in g.apply(row)):
            return ExactnessVerdict(False, reason="composite_nonzero", witness=row)
    for row in ker.basis.rows:
        if not im.contains_vector(row):
            return ExactnessVerdict(False, reason="kernel_exceeds_image", witness=row)
    raise AssertionError("unreachable: im != ker without a witness")


def check_exact_at(f: FilteredMap, g: FilteredMap) -> ExactnessVerdict:
    """Exactness at the shared middle space of two filtered maps."""
    if f.target != g.source:
        raise ComposabilityError("target of f and source of g differ as filtered spaces")
    return exactness_at(f.matrix, g.matrix)


class SubQuotient(NamedTuple):
    kernel: FilteredSpace
    image: FilteredSpace
    cokernel: FilteredSpace


def induced_on_sub_quotient(f: FilteredMap) -> SubQuotient:
    """Kernel, image and cokernel of a strict map with induced filtrations.

    The kernel carries ker . W_i(source), the image im . W_i(target),
    the cokernel the quotient filtration.  Refuses non-strict input:
    without strictness the induced graded pieces stop being additive.
    """
    verdict = strictness(f)
    if not verdict.strict:
        raise NotStrictError(f"map is not strict (fails at weight {verdict.failing_weight})")
    ker = kernel(f.matrix)
    ker_coords = coords_map(ker)
    ker_steps = {w: image(ker_coords, ker.intersect(f.source.step(w))) for w in f.source.jumps}
    ker_fs = FilteredSpace(ker.dim, ker_steps)

    im = image(f.matrix)
    im_coords = coords_map(im)
    im_steps = {w: image(im_coords, im.intersect(f.target.step(w))) for w in f.target.jumps}
    im_fs = FilteredSpace(im.dim, im_steps)

    q = quotient_map(im)
    coker_steps = {w: image(q, f.target.step(w)) for w in f.target.jumps}
    coker_fs = FilteredSpace(f.target.dim - im.dim, coker_steps)
    return SubQuotient(ker_fs, im_fs, coker_fs)
