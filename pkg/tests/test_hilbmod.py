import numpy as np
import pytest
from hypothesis import given, strategies as st

from bicomm.algebra import generate_algebra
from bicomm.commutant import dcp_check
from bicomm.errors import NotInvariantError, RepresentationError
from bicomm.families import T2Rep, build_t2, random_t2, t2_algebra
from bicomm.hilbmod import (
    Representation,
    adjointable_intertwiners,
    cyclic_submodule,
    direct_sum,
    intertwiners,
    invariance_residual,
    multiple,
    quasi_equivalent,
    quotient,
    reject_module,
    restrict,
    trace_module,
    unitarily_equivalent,
)
from bicomm.linalg import Subspace, span_of, subspace_equal

from conftest import brute_kernel, ginibre, unit

seeds = st.integers(0, 2**32 - 1)
E11, E12, E21, E22 = unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 0), unit(2, 1, 1)

USUAL = build_t2(T2Rep.a([[1.0]]), name="usual")
B1 = build_t2(T2Rep.b(1), name="b")
C1 = build_t2(T2Rep.c(1), name="c")


def m2_identity():
    M2 = generate_algebra([E12, E21])
    return Representation(M2, M2.basis, "M2")


def random_module(rng):
    kind = int(rng.integers(0, 5))
    if kind == 0:
        return build_t2(T2Rep.b(int(rng.integers(1, 3))))
    if kind == 1:
        return build_t2(T2Rep.c(int(rng.integers(1, 3))))
    return build_t2(random_t2(rng, max_dim=3))


def brute_hom_dim(H, K):
    return brute_kernel(
        lambda T: [T @ a - b @ T for a, b in zip(H.images, K.images)], K.dim_H, H.dim_H
    )[0]


# construction and validation


def test_representation_validates_multiplicativity():
    A = t2_algebra()
    with pytest.raises(RepresentationError):
        Representation(A, [E11, E12, E11])
    with pytest.raises(RepresentationError):
        Representation(A, [E11, E12])


def test_from_generators_extends_multiplicatively():
    gens = [E12, E21]
    M2 = generate_algebra(gens)
    U, _ = np.linalg.qr(ginibre(np.random.default_rng(1), 2))
    rho = Representation.from_generators(M2, [U @ g @ U.conj().T for g in gens])
    for b, img in zip(M2.basis, rho.images):
        assert np.allclose(img, U @ b @ U.conj().T)


def test_from_generators_rejects_non_homomorphism():
    gens = [E12, E21]
    M2 = generate_algebra(gens)
    # E12 -> E12, E21 -> 0 would force E11 = E12 E21 -> 0 but E11 E12 = E12 -/-> 0
    with pytest.raises(RepresentationError):
        Representation.from_generators(M2, [E12, np.zeros((2, 2))])


# intertwiners


def test_intertwiner_examples():
    M2 = m2_identity()
    H = intertwiners(M2, M2)
    assert H.dim == 1 and H.contains(np.eye(2))
    hom = intertwiners(USUAL, C1)
    assert hom.dim == 1 and hom.contains(np.array([[0, 1.0]]))
    assert intertwiners(USUAL, B1).dim == 0


@given(seeds)
def test_intertwiners_match_entrywise_oracle(seed):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    hom = intertwiners(H, K)
    assert hom.dim == brute_hom_dim(H, K)
    for T in hom.basis:
        for a, b in zip(H.images, K.images):
            assert np.linalg.norm(T @ a - b @ T) < 1e-8


def test_intertwiners_need_same_algebra():
    with pytest.raises(RepresentationError):
        intertwiners(USUAL, m2_identity())


@given(seeds)
def test_adjoint_duality(seed):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    hom = intertwiners(H, K)
    dual = intertwiners(K.adjoint(), H.adjoint())
    assert dual.dim == hom.dim
    assert subspace_equal(dual, hom.adjoint())


@given(seeds)
def test_hom_is_additive_over_direct_sums(seed):
    rng = np.random.default_rng(seed)
    Hs = [random_module(rng) for _ in range(2)]
    K = random_module(rng)
    assert intertwiners(direct_sum(Hs), K).dim == sum(intertwiners(H, K).dim for H in Hs)


@given(seeds, st.integers(1, 3))
def test_hom_of_multiple(seed, k):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    assert intertwiners(multiple(H, k), K).dim == k * intertwiners(H, K).dim


# adjointable maps


def test_adjointable_examples():
    M2 = m2_identity()
    assert subspace_equal(adjointable_intertwiners(M2, M2), intertwiners(M2, M2))
    assert adjointable_intertwiners(USUAL, C1).dim == 0


def test_adjointable_maps_of_double_copy():
    M2 = m2_identity()
    both = direct_sum([M2, M2])
    adj = adjointable_intertwiners(both, both)
    # the copy swap and the copy scalings are all adjointable
    swap = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
    assert adj.contains(swap)
    assert adj.dim == 4


@given(seeds)
def test_adjointable_maps_are_module_maps_with_module_adjoints(seed):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    adj = adjointable_intertwiners(H, K)
    hom = intertwiners(H, K)
    back = intertwiners(K, H)
    for T in adj.basis:
        assert hom.contains(T)
        assert back.contains(T.conj().T)


# trace and reject


def test_trace_examples():
    assert trace_module(USUAL, B1).dim == 0
    assert trace_module(USUAL, C1).dim == 1
    M2 = m2_identity()
    assert trace_module(M2, M2).dim == 2


def test_reject_examples():
    assert reject_module(USUAL, USUAL).dim == 0
    # every map usual -> b is zero, so the reject is everything
    assert reject_module(USUAL, B1).dim == 2


def test_reject_of_b_in_usual_by_direct_solve():
    # maps C_b -> usual: t = E11 t, E12 t = 0, E22 t = 0, so t = (t1, 0); injective
    hom = intertwiners(B1, USUAL)
    assert hom.dim == 1 and hom.contains(np.array([[1.0], [0.0]]))
    assert reject_module(B1, USUAL).dim == 0


@given(seeds)
def test_trace_and_reject_are_submodules(seed):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    for W in (trace_module(H, K), reject_module(K, H)):
        if W.dim:
            assert invariance_residual(K, W) < 1e-8


@given(seeds)
def test_trace_dimension_oracle(seed):
    rng = np.random.default_rng(seed)
    H, K = random_module(rng), random_module(rng)
    _, maps = brute_kernel(lambda T: [T @ a - b @ T for a, b in zip(H.images, K.images)], K.dim_H, H.dim_H)
    expected = np.linalg.matrix_rank(np.hstack(maps), tol=1e-8) if maps else 0
    assert trace_module(H, K).dim == expected


# constructions


def test_direct_sum_and_multiple_dims():
    assert direct_sum([USUAL, B1, C1]).dim_H == 4
    assert multiple(USUAL, 3).dim_H == 6
    with pytest.raises(ValueError):
        multiple(USUAL, 0)


def test_dcp_is_invariant_under_multiples():
    for T in ([[1.0]], [[1.0], [0.0]], [[0.0]]):
        rho = build_t2(T2Rep.a(T))
        assert dcp_check(multiple(rho, 2)).holds == dcp_check(rho).holds


def test_cyclic_submodule_examples():
    N = generate_algebra([E12])
    rep = Representation(N, N.basis)
    assert cyclic_submodule(rep, [0, 1]).dim == 2
    assert cyclic_submodule(rep, [0, 1], strict=True).equal(Subspace(2, np.array([1.0, 0])))
    M2 = m2_identity()
    assert cyclic_submodule(M2, [1, 1j]).dim == 2
    with pytest.raises(ValueError):
        cyclic_submodule(rep, [0, 0])


def test_cyclic_submodule_of_eigenvector_of_abelian_algebra():
    D = generate_algebra([np.diag([1.0, 2.0, 3.0])])
    rep = Representation(D, D.basis)
    assert cyclic_submodule(rep, [0, 1, 0]).dim == 1


def test_restrict_and_quotient_of_usual_rep():
    W = Subspace(2, np.array([1.0, 0]))
    sub, quo = restrict(USUAL, W), quotient(USUAL, W)
    assert np.allclose(np.array(sub.images).ravel(), B1.images.ravel())
    assert np.allclose(np.array(quo.images).ravel(), C1.images.ravel())
    assert subspace_equal(span_of(list(restrict(USUAL, Subspace.full(2)).images)), span_of(list(USUAL.images)))


def test_restrict_rejects_non_invariant_subspace():
    with pytest.raises(NotInvariantError):
        restrict(USUAL, Subspace(2, np.array([0, 1.0])))


@given(seeds)
def test_restrict_plus_quotient_dimension(seed):
    rng = np.random.default_rng(seed)
    H = random_module(rng)
    x = ginibre(rng, H.dim_H, 1).ravel()
    W = cyclic_submodule(H, x)
    if W.dim == H.dim_H:
        return
    assert restrict(H, W).dim_H + quotient(H, W).dim_H == H.dim_H


# equivalence


def test_unitary_equivalence_examples():
    assert unitarily_equivalent(USUAL, USUAL).verdict == "yes"
    half = build_t2(T2Rep.a([[0.5]]))
    assert unitarily_equivalent(USUAL, half).verdict == "no"


def test_unitary_equivalence_detects_unitary_conjugates():
    rng = np.random.default_rng(7)
    T = np.diag([1 / 2, 1 / 3])
    U, _ = np.linalg.qr(ginibre(rng, 2))
    V, _ = np.linalg.qr(ginibre(rng, 2))
    a = build_t2(T2Rep.a(T))
    b = build_t2(T2Rep.a(U @ T @ V.conj().T))
    v = unitarily_equivalent(a, b)
    assert v.verdict == "yes" and v.bound == 32


def test_unitary_equivalence_short_words_are_inconclusive():
    v = unitarily_equivalent(USUAL, USUAL, word_len=2, exhaustive_len=1)
    assert v.verdict == "inconclusive"


def test_unitary_equivalence_dimension_mismatch():
    assert unitarily_equivalent(USUAL, B1).verdict == "no"


def test_quasi_equivalence_examples():
    rho = build_t2(T2Rep.a([[0.7]]))
    v = quasi_equivalent(rho, direct_sum([rho, rho]))
    assert v.verdict == "yes" and v.witness == (2, 1)
    v = quasi_equivalent(B1, build_t2(T2Rep.b(3)))
    assert v.verdict == "yes" and v.witness == (3, 1)
    v = quasi_equivalent(B1, C1)
    assert v.verdict == "not found up to bound" and not v.heuristic
