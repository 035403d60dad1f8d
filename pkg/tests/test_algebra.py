import numpy as np
import pytest
from hypothesis import given, strategies as st

from bicomm.algebra import (
    MatrixAlgebra,
    cyclic_membership,
    find_identity,
    generate_algebra,
    is_faithful,
    is_nondegenerate,
    star_closure,
    structure_constants,
)
from bicomm.errors import ShapeError, VerificationError
from bicomm.families import T2Rep, build_t2
from bicomm.hilbmod import Representation
from bicomm.linalg import span_of, subspace_equal, subspace_leq

from conftest import ginibre, unit

seeds = st.integers(0, 2**32 - 1)
E11, E12, E21, E22 = unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 0), unit(2, 1, 1)


def identity_rep(A):
    return Representation(A, A.basis, "id")


def random_generators(rng, n, k, style):
    mats = [ginibre(rng, n) for _ in range(k)]
    if style == 1:
        mats = [np.triu(m) for m in mats]
    elif style == 2:
        mats = [np.triu(m, 1) for m in mats]
    return mats


def brute_closure_dim(gens, rounds=20):
    # span of all words in the generators, grown until the rank stops changing
    words = list(gens)
    dim = 0
    for _ in range(rounds):
        words = words + [w @ g for w in words for g in gens]
        V = np.column_stack([w.reshape(-1) for w in words])
        u, s, _ = np.linalg.svd(V, full_matrices=False)
        r = int(np.sum(s > 1e-9 * s[0])) if s[0] > 0 else 0
        if r == dim:
            break
        dim = r
        # an orthonormal basis of the current span generates the same words
        words = [u[:, i].reshape(gens[0].shape) for i in range(r)]
    return dim


# generate_algebra


def test_generate_algebra_examples():
    assert generate_algebra([E12]).dim == 1
    assert generate_algebra([E12, E21]).dim == 4
    assert generate_algebra([E11, E12, E22]).dim == 3


def test_generate_algebra_bad_input():
    with pytest.raises(ShapeError):
        generate_algebra([np.eye(2), np.eye(3)])
    with pytest.raises(ShapeError):
        generate_algebra([])
    with pytest.raises(ValueError):
        generate_algebra([np.zeros((2, 2))])


def test_from_basis_rejects_non_closed_basis():
    with pytest.raises(VerificationError):
        MatrixAlgebra.from_basis([E12, E21])
    with pytest.raises(ValueError):
        MatrixAlgebra.from_basis([E11, 2 * E11])


@given(seeds, st.integers(1, 4), st.integers(1, 3), st.integers(0, 2))
def test_generated_algebra_is_closed_and_minimal(seed, n, k, style):
    rng = np.random.default_rng(seed)
    gens = random_generators(rng, n, k, style)
    if style == 2 and n == 1:
        return
    A = generate_algebra(gens)
    worst = max(A.space.residual(a @ b) for a in A.basis for b in A.basis)
    assert worst < 1e-8
    for g in gens:
        assert A.space.contains(g)
    assert A.dim == brute_closure_dim(gens)


# star closure


def test_star_closure_examples():
    assert star_closure([E12]).dim == 4
    assert star_closure([np.eye(2)]).dim == 1
    gens = [E11, E22]
    assert subspace_equal(star_closure(gens).space, generate_algebra(gens).space)


@given(seeds, st.integers(1, 4), st.integers(1, 2), st.integers(0, 2))
def test_star_closure_contains_generated_algebra(seed, n, k, style):
    rng = np.random.default_rng(seed)
    gens = random_generators(rng, n, k, style)
    if style == 2 and n == 1:
        return
    S = star_closure(gens)
    assert subspace_leq(generate_algebra(gens).space, S.space)
    assert subspace_equal(S.space.adjoint(), S.space)
    sym = gens + [g.conj().T for g in gens]
    assert subspace_equal(generate_algebra(sym).space, S.space)


# identity


def test_find_identity_examples():
    assert np.allclose(find_identity(generate_algebra([E12, E21])), np.eye(2))
    assert find_identity(generate_algebra([E12])) is None
    e = find_identity(generate_algebra([E11]))
    assert np.allclose(e, E11)


def test_identity_field_is_populated():
    assert generate_algebra([E11, E12, E22]).identity is not None
    assert generate_algebra([E12]).identity is None


@given(seeds, st.integers(1, 4))
def test_found_identity_is_two_sided_unit(seed, n):
    rng = np.random.default_rng(seed)
    A = generate_algebra([np.triu(ginibre(rng, n)), np.eye(n)])
    e = find_identity(A)
    for b in A.basis:
        assert np.allclose(e @ b, b) and np.allclose(b @ e, b)


# structure constants


def test_structure_constants_of_t2():
    A = MatrixAlgebra.from_basis([E11, E12, E22])
    c = structure_constants(A)
    # E11 E12 = E12
    assert np.allclose(c[0, 1], [0, 1, 0])
    assert np.allclose(c[1, 0], 0)


def test_structure_constants_of_scalars():
    A = MatrixAlgebra.from_basis([np.eye(3)])
    assert np.allclose(structure_constants(A), [[[1]]])


@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_structure_constants_reconstruct_products(seed, n, k):
    rng = np.random.default_rng(seed)
    A = generate_algebra([ginibre(rng, n) for _ in range(k)])
    c = A.structure
    for i in range(A.dim):
        for j in range(A.dim):
            recon = np.tensordot(c[i, j], A.basis, axes=1)
            assert np.linalg.norm(recon - A.basis[i] @ A.basis[j]) < 1e-8 * max(1, np.linalg.norm(A.basis[i]) ** 2 * 10)


# faithfulness and nondegeneracy


def test_is_faithful_examples():
    M2 = generate_algebra([E12, E21])
    assert is_faithful(identity_rep(M2))
    assert not is_faithful(build_t2(T2Rep.b(1)))
    assert is_faithful(build_t2(T2Rep.a([[0.3]])))


def test_is_nondegenerate_examples():
    M2 = generate_algebra([E12, E21])
    assert is_nondegenerate(identity_rep(M2))
    N = generate_algebra([E12])
    assert not is_nondegenerate(identity_rep(N))
    assert is_nondegenerate(build_t2(T2Rep.a([[0.0]])))


# cyclic membership


def test_cyclic_membership_examples():
    N = identity_rep(generate_algebra([E12]))
    assert not cyclic_membership(N, [0, 1])
    assert not cyclic_membership(N, [1, 0])
    T2 = build_t2(T2Rep.a([[1.0]]))
    assert cyclic_membership(T2, [0.3, -2j])
    with pytest.raises(ValueError):
        cyclic_membership(T2, [0, 0])


@given(seeds, st.integers(1, 4))
def test_identity_implies_cyclic_membership(seed, n):
    rng = np.random.default_rng(seed)
    A = generate_algebra([np.triu(ginibre(rng, n)), ginibre(rng, n) * (rng.random((n, n)) < 0.3)])
    if find_identity(A) is None:
        return
    rep = identity_rep(A)
    x = ginibre(rng, n, 1).ravel()
    assert cyclic_membership(rep, x)
