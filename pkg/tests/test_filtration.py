import random

import pytest

from csverify.filtration import (
    ComposabilityError,
    FiltrationError,
    FilteredMap,
    FilteredSpace,
    NotStrictError,
    PurityCertificate,
    WeightCompatibilityError,
    check_exact_at,
    direct_sum,
    exactness_at,
    graded_piece,
    induced_on_sub_quotient,
    is_strict,
    strictness,
    tate_twist,
    weights_geq,
    weights_leq,
)
from csverify.generators import GenProfile, gen_cs_instance
from csverify.linalg import (
    Matrix,
    full_subspace,
    image,
    kernel,
    solve,
    span_of_vectors,
)


def two_step():
    # W_0 = <e1> inside Q^2, W_2 = everything
    return FilteredSpace(2, {0: span_of_vectors([[1, 0]], 2), 2: full_subspace(2)})


# -- FilteredSpace construction ------------------------------------------

def test_normalization_drops_non_jumps():
    fs = FilteredSpace(2, {-5: span_of_vectors([], 2),
                           0: span_of_vectors([[1, 0]], 2),
                           1: span_of_vectors([[1, 0]], 2),
                           2: full_subspace(2)})
    assert fs.jumps == (0, 2)
    assert fs == two_step()


def test_non_nested_rejected():
    with pytest.raises(FiltrationError):
        FilteredSpace(2, {0: span_of_vectors([[1, 0]], 2), 1: span_of_vectors([[0, 1]], 2)})


def test_non_exhaustive_rejected():
    with pytest.raises(FiltrationError):
        FilteredSpace(2, {0: span_of_vectors([[1, 0]], 2)})


def test_zero_space():
    z = FilteredSpace.zero()
    assert z.dim == 0 and z.jumps == ()
    assert weights_leq(z, -100) and weights_geq(z, 100)


def test_purity_certificate():
    PurityCertificate(FilteredSpace.pure(3, 5), 5)
    PurityCertificate(FilteredSpace.zero(), 17)
    with pytest.raises(FiltrationError):
        PurityCertificate(two_step(), 0)


# -- graded pieces --------------------------------------------------------

def test_graded_pure():
    fs = FilteredSpace.pure(4, 3)
    assert graded_piece(fs, 3).dim == 4
    assert graded_piece(fs, 2).dim == 0
    assert graded_piece(fs, 4).dim == 0


def test_graded_two_step():
    fs = two_step()
    assert [graded_piece(fs, i).dim for i in (0, 1, 2)] == [1, 0, 1]


def test_graded_projection_kernel():
    fs = two_step()
    gp = graded_piece(fs, 2)
    # kernel of the projection inside W_2 is exactly W_0
    assert gp.projection.apply((1, 0)) == (0,) * gp.dim
    assert gp.projection.apply((0, 1)) != (0,) * gp.dim


def test_graded_dims_sum_random():
    # dimension-count oracle on a 5-dim space with jumps at -1, 0, 3
    rng = random.Random(12)
    for _ in range(20):
        basis = None
        while basis is None or basis.dim < 5:
            basis = span_of_vectors([[rng.randint(-3, 3) for _ in range(5)] for _ in range(5)], 5)
        rows = basis.basis.rows
        fs = FilteredSpace(5, {-1: span_of_vectors(rows[:2], 5),
                               0: span_of_vectors(rows[:3], 5),
                               3: full_subspace(5)})
        assert sum(graded_piece(fs, i).dim for i in range(-2, 5)) == 5
        assert sum(fs.graded_dims().values()) == 5


# -- Tate twists -----------------------------------------------------------

def test_twist_examples():
    assert tate_twist(FilteredSpace.pure(1, 0), -1) == FilteredSpace.pure(1, 2)
    v = two_step()
    assert tate_twist(tate_twist(v, -1), 1) == v
    assert tate_twist(v, -1).jumps == (2, 4)


def test_twist_preserves_graded_dims():
    v = two_step()
    tw = tate_twist(v, -2)
    assert tw.graded_dims() == {w + 4: d for w, d in v.graded_dims().items()}


# -- weight predicates -----------------------------------------------------

def test_weight_predicates():
    p = FilteredSpace.pure(2, 5)
    assert weights_leq(p, 5) and weights_geq(p, 5)
    assert not weights_leq(p, 4) and not weights_geq(p, 6)
    v = two_step()
    assert not weights_leq(v, 1)
    assert weights_leq(v, 2)
    assert weights_geq(v, 0) and not weights_geq(v, 1)


# -- strictness ------------------------------------------------------------

def test_identity_and_zero_strict():
    v = two_step()
    assert is_strict(FilteredMap(v, v, Matrix.identity(2)))
    assert is_strict(FilteredMap(v, FilteredSpace.pure(1, 2), Matrix.zero(1, 2)))


def test_weight_dropping_identity_not_strict():
    # compatible because weights only drop; not strict because the image
    # meets W_0 of the target while W_0 of the source is zero
    f = FilteredMap(FilteredSpace.pure(1, 2), FilteredSpace.pure(1, 0), Matrix.identity(1))
    verdict = strictness(f)
    assert not verdict.strict and verdict.failing_weight == 0


def test_weight_raising_identity_rejected():
    with pytest.raises(WeightCompatibilityError):
        FilteredMap(FilteredSpace.pure(1, 0), FilteredSpace.pure(1, 2), Matrix.identity(1))


def test_strict_graded_additivity_on_generated_maps():
    # strictness <=> graded additivity dim Gr_i(src) = dim Gr_i(ker) + dim Gr_i(im)
    inst = gen_cs_instance(GenProfile(seed=202, max_dim_per_node=8))
    checked = 0
    for k in inst.degrees():
        for src, tgt, mat in [
            (inst.space_b(k), inst.space_a(k), inst.map_b(k)),
            (inst.space_a(k), inst.space_c(k), inst.map_a(k)),
            (inst.space_c(k), inst.space_p(k), inst.map_s(k)),
        ]:
            if src.dim == 0 or tgt.dim == 0:
                continue
            f = FilteredMap(src, tgt, mat)
            assert is_strict(f)
            ker_fs, im_fs, _ = induced_on_sub_quotient(f)
            for i in set(src.jumps) | set(tgt.jumps):
                assert (graded_piece(src, i).dim
                        == graded_piece(ker_fs, i).dim + graded_piece(im_fs, i).dim)
            checked += 1
    assert checked


def test_composites_of_generated_strict_maps_are_compatible():
    inst = gen_cs_instance(GenProfile(seed=203, max_dim_per_node=6))
    for k in inst.degrees():
        if inst.space_a(k).dim and inst.space_p(k).dim:
            # A_k -> C_k -> P_k composes to a weight-compatible map
            FilteredMap(inst.space_a(k), inst.space_p(k), inst.map_a_to_p(k))


# -- exactness -------------------------------------------------------------

def test_exact_identity_and_split():
    v = two_step()
    f = FilteredMap(FilteredSpace.zero(), v, Matrix.zero(2, 0))
    g = FilteredMap(v, v, Matrix.identity(2))
    assert check_exact_at(f, g).exact

    q = FilteredSpace.pure(1, 0)
    q2 = FilteredSpace.pure(2, 0)
    inj = FilteredMap(q, q2, Matrix.from_rows([[1], [0]]))
    proj_second = FilteredMap(q2, q, Matrix.from_rows([[0, 1]]))
    assert check_exact_at(inj, proj_second).exact


def test_not_exact_composite_nonzero():
    q = FilteredSpace.pure(1, 0)
    q2 = FilteredSpace.pure(2, 0)
    inj = FilteredMap(q, q2, Matrix.from_rows([[1], [0]]))
    proj_first = FilteredMap(q2, q, Matrix.from_rows([[1, 0]]))
    verdict = check_exact_at(inj, proj_first)
    assert not verdict.exact
    assert verdict.reason == "composite_nonzero"
    assert verdict.witness is not None


def test_not_exact_kernel_exceeds_image():
    q2 = FilteredSpace.pure(2, 0)
    f = FilteredMap(FilteredSpace.zero(), q2, Matrix.zero(2, 0))
    g = FilteredMap(q2, FilteredSpace.zero(), Matrix.zero(0, 2))
    verdict = check_exact_at(f, g)
    assert not verdict.exact
    assert verdict.reason == "kernel_exceeds_image"
    assert verdict.witness in ((1, 0), (0, 1))


def test_composability_checked():
    v = two_step()
    f = FilteredMap(v, v, Matrix.identity(2))
    g = FilteredMap(FilteredSpace.pure(1, 2), FilteredSpace.pure(1, 2), Matrix.identity(1))
    with pytest.raises(ComposabilityError):
        check_exact_at(f, g)


def brute_force_exact(f, g):
    im = image(f)
    ker = kernel(g)
    for row in im.basis.rows:
        if any(x != 0 for x in g.apply(row)):
            return False
    for row in ker.basis.rows:
        if im.dim == 0:
            if any(x != 0 for x in row):
                return False
        elif solve(im.basis.transpose(), row) is None:
            return False
    return True


def test_exactness_matches_brute_force_oracle():
    rng = random.Random(77)
    for _ in range(200):
        a, b, c = (rng.randint(0, 6) for _ in range(3))
        f = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(a)] for _ in range(b)], ncols=a)
        g = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(b)] for _ in range(c)], ncols=b)
        assert exactness_at(f, g).exact == brute_force_exact(f, g)


# -- induced filtrations ---------------------------------------------------

def test_induced_identity_and_zero():
    v = two_step()
    ker_fs, im_fs, coker_fs = induced_on_sub_quotient(FilteredMap(v, v, Matrix.identity(2)))
    assert ker_fs == FilteredSpace.zero()
    assert im_fs == v
    assert coker_fs == FilteredSpace.zero()

    w = FilteredSpace.pure(1, 2)
    ker_fs, im_fs, coker_fs = induced_on_sub_quotient(FilteredMap(v, w, Matrix.zero(1, 2)))
    assert ker_fs == v and coker_fs == w and im_fs == FilteredSpace.zero()


def test_induced_projection_example():
    # (a, b) -> b from Q^2 (weights 0, 2; W_0 = <e1>) onto Q of weight 2
    v = two_step()
    w = FilteredSpace.pure(1, 2)
    f = FilteredMap(v, w, Matrix.from_rows([[0, 1]]))
    ker_fs, im_fs, _ = induced_on_sub_quotient(f)
    assert ker_fs == FilteredSpace.pure(1, 0)
    assert im_fs == FilteredSpace.pure(1, 2)
    assert ker_fs.dim + im_fs.dim == v.dim


def test_induced_refuses_non_strict():
    f = FilteredMap(FilteredSpace.pure(1, 2), FilteredSpace.pure(1, 0), Matrix.identity(1))
    with pytest.raises(NotStrictError):
        induced_on_sub_quotient(f)


def test_direct_sum():
    v = direct_sum(FilteredSpace.pure(1, 0), FilteredSpace.pure(2, 2))
    assert v.dim == 3
    assert v.graded_dims() == {0: 1, 2: 2}
