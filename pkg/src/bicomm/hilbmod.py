"""Hilbert modules as data: representations, intertwiners, trace and reject.

A :class:`Representation` is anchored to a concrete reference algebra and
stores the images of its basis.  Multiplicativity is validated on
construction.  Complete contractivity is *not* validated: statements about
generators and the double commutant property assume it, and callers who
care must check norms themselves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import MatrixAlgebra, generate_algebra, star_closure
from .commutant import cyclic_hull
from .errors import NotInvariantError, RepresentationError, VerificationError
from .linalg import (
    DEFAULT_TOL,
    OperatorSubspace,
    Subspace,
    Tolerance,
    _frozen,
    ampliate,
    as_cmatrix,
    block_diag,
    column_space,
    left_mult,
    matrix_kernel,
    rank_nullspace,
    right_mult,
    subspace_equal,
)


@dataclass(frozen=True, eq=False)
class Representation:
    """A Hilbert module over ``algebra``: ``images[i]`` is ``rho(algebra.basis[i])``."""

    algebra: MatrixAlgebra
    images: np.ndarray
    name: str = ""
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        imgs = [as_cmatrix(m, "image") for m in self.images]
        if len(imgs) != self.algebra.dim:
            raise RepresentationError(
                f"need {self.algebra.dim} images (one per algebra basis element), got {len(imgs)}"
            )
        n = imgs[0].shape[0]
        if n == 0:
            raise RepresentationError("zero-dimensional modules are not supported")
        for m in imgs:
            if m.shape != (n, n):
                raise RepresentationError(f"images must all be {n}x{n}, got {m.shape}")
        R = np.array(imgs)
        object.__setattr__(self, "images", _frozen(R))
        res = multiplicativity_residual(self.algebra, R)
        scale = max(1.0, max(np.linalg.norm(m) for m in imgs)) ** 2
        if res > self.tol.match_abs * scale:
            raise RepresentationError(f"images are not multiplicative (residual {res:.2e})")

    @property
    def dim_H(self) -> int:
        return self.images.shape[1]

    @classmethod
    def from_generators(cls, algebra: MatrixAlgebra, gen_images, tol: Tolerance = DEFAULT_TOL, name: str = ""):
        """Extend images of ``algebra.generators`` to a homomorphism.

        Builds the algebra generated by the pairs ``g (+) rho(g)``; the
        assignment extends to a well-defined homomorphism iff that joint
        algebra projects isomorphically onto ``algebra``.
        """
        if algebra.generators is None:
            raise RepresentationError("algebra was not built from generators")
        gens = list(algebra.generators)
        imgs = [as_cmatrix(m, "generator image") for m in gen_images]
        if len(imgs) != len(gens):
            raise RepresentationError(f"need {len(gens)} generator images, got {len(imgs)}")
        n = algebra.dim_H
        joint = generate_algebra([block_diag(g, h) for g, h in zip(gens, imgs)], tol)
        if joint.dim != algebra.dim:
            raise RepresentationError(
                "generator images do not extend to a homomorphism "
                f"(joint algebra has dim {joint.dim}, algebra has dim {algebra.dim})"
            )
        left = joint.basis[:, :n, :n]
        right = joint.basis[:, n:, n:]
        # coordinates of the algebra basis in terms of the joint basis' left halves
        L = np.column_stack([m.reshape(-1, order="F") for m in left])
        coef, *_ = np.linalg.lstsq(L, np.column_stack([b.reshape(-1, order="F") for b in algebra.basis]), rcond=None)
        images = np.einsum("jk,jab->kab", coef, right)
        return cls(algebra, images, name=name, tol=tol)

    def image_of(self, a) -> np.ndarray:
        """``rho(a)`` for an element ``a`` of the reference algebra."""
        return np.tensordot(self.algebra.coordinates(a), self.images, axes=1)

    def adjoint(self) -> "Representation":
        """The representation of ``A^*`` by image adjoints."""
        star = MatrixAlgebra.from_basis(np.conj(np.transpose(self.algebra.basis, (0, 2, 1))), self.tol)
        return Representation(star, np.conj(np.transpose(self.images, (0, 2, 1))), self.name + "*", self.tol)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Representation{label}(dim_H={self.dim_H}, algebra_dim={self.algebra.dim})"


def multiplicativity_residual(algebra: MatrixAlgebra, images: np.ndarray) -> float:
    prods = np.einsum("iab,jbc->ijac", images, images)
    expected = np.einsum("ijk,kab->ijab", algebra.structure, images)
    return float(np.max(np.abs(prods - expected), initial=0.0))


def _check_same_algebra(a: Representation, b: Representation):
    if not a.algebra.same_as(b.algebra):
        raise RepresentationError("representations are over different reference algebras")


# ---------------------------------------------------------------------------
# intertwiners


def _intertwiner_space(src_images, dst_images, tol) -> OperatorSubspace:
    m = src_images[0].shape[0]
    n = dst_images[0].shape[0]
    blocks = [right_mult(a, n) - left_mult(b, m) for a, b in zip(src_images, dst_images)]
    scale = max(np.linalg.norm(x, 2) for x in (*src_images, *dst_images))
    return matrix_kernel(blocks, n, m, tol, scale)


def intertwiners(rhoH: Representation, rhoK: Representation, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Basis of ``{T : H -> K with T rhoH(b) = rhoK(b) T}`` (matrices ``dim K x dim H``)."""
    _check_same_algebra(rhoH, rhoK)
    return _intertwiner_space(rhoH.images, rhoK.images, tol)


def adjointable_intertwiners(rhoH: Representation, rhoK: Representation, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Module maps ``T`` whose adjoint is also a module map.

    Computed twice: once by adding the adjoint images as extra constraints,
    once as intertwiners of the *-algebra generated by the paired images.
    A disagreement raises :class:`VerificationError`.
    """
    _check_same_algebra(rhoH, rhoK)
    direct = _intertwiner_space(
        list(rhoH.images) + [m.conj().T for m in rhoH.images],
        list(rhoK.images) + [m.conj().T for m in rhoK.images],
        tol,
    )
    m = rhoH.dim_H
    joint = star_closure([block_diag(a, b) for a, b in zip(rhoH.images, rhoK.images)], tol)
    via_star = _intertwiner_space(joint.basis[:, :m, :m], joint.basis[:, m:, m:], tol)
    if not subspace_equal(direct, via_star, tol):
        raise VerificationError(
            "adjointable intertwiners: constraint solve and star-closure solve disagree "
            f"(dims {direct.dim} vs {via_star.dim})"
        )
    return direct


def trace_module(rhoH: Representation, rhoK: Representation, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``Tr_K(H)``: span of the ranges of all module maps ``H -> K``."""
    hom = intertwiners(rhoH, rhoK, tol)
    if hom.dim == 0:
        return Subspace.zero(rhoK.dim_H)
    return column_space(np.hstack(list(hom.basis)), tol, tol.match_abs)


def reject_module(rhoK: Representation, rhoH: Representation, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``Rej_K(H)``: common kernel of all module maps ``K -> H``."""
    hom = intertwiners(rhoK, rhoH, tol)
    if hom.dim == 0:
        return Subspace.full(rhoK.dim_H)
    return rank_nullspace(np.vstack(list(hom.basis)), tol, tol.match_abs)[1]


# ---------------------------------------------------------------------------
# constructions


def direct_sum(reps: Sequence[Representation]) -> Representation:
    reps = list(reps)
    if not reps:
        raise ValueError("direct sum of no representations")
    for r in reps[1:]:
        _check_same_algebra(reps[0], r)
    images = [block_diag(*(r.images[i] for r in reps)) for i in range(reps[0].algebra.dim)]
    name = " + ".join(r.name or "?" for r in reps)
    return Representation(reps[0].algebra, images, name, reps[0].tol)


def multiple(rho: Representation, k: int) -> Representation:
    """``rho^k`` acting on ``H^(k)``, copies ordered one after another."""
    if k < 1:
        raise ValueError("multiplicity must be >= 1")
    return Representation(rho.algebra, [ampliate(m, k) for m in rho.images], f"{rho.name}^{k}", rho.tol)


def cyclic_submodule(rho: Representation, x, tol: Tolerance = DEFAULT_TOL, strict: bool = False) -> Subspace:
    """``span{x} + span{rho(b) x}``; without ``x`` itself when ``strict``."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != rho.dim_H:
        raise ValueError(f"vector has length {x.size}, module has dimension {rho.dim_H}")
    if not np.any(x):
        raise ValueError("cyclic submodule of the zero vector")
    return cyclic_hull(list(rho.images), x, tol, strict)


def invariance_residual(rho: Representation, W: Subspace) -> float:
    Q = W.basis
    return max(float(np.linalg.norm(m @ Q - Q @ (Q.conj().T @ m @ Q))) for m in rho.images)


def _require_invariant(rho, W, tol):
    if W.ambient_dim != rho.dim_H:
        raise ValueError(f"subspace lives in C^{W.ambient_dim}, module has dimension {rho.dim_H}")
    res = invariance_residual(rho, W)
    scale = max(1.0, max(np.linalg.norm(m, 2) for m in rho.images))
    if res > tol.match_abs * scale:
        raise NotInvariantError(f"subspace is not invariant under the module action (residual {res:.2e})")


def restrict(rho: Representation, W: Subspace, tol: Tolerance = DEFAULT_TOL) -> Representation:
    """The submodule ``W`` in its orthonormal coordinates."""
    _require_invariant(rho, W, tol)
    if W.dim == 0:
        raise ValueError("cannot restrict to the zero submodule")
    Q = W.basis
    return Representation(rho.algebra, [Q.conj().T @ m @ Q for m in rho.images], f"{rho.name}|W", tol)


def quotient(rho: Representation, W: Subspace, tol: Tolerance = DEFAULT_TOL) -> Representation:
    """The quotient module ``H / W``, realized on the orthocomplement of ``W``."""
    _require_invariant(rho, W, tol)
    C = W.complement(tol)
    if C.dim == 0:
        raise ValueError("quotient by the whole module is zero")
    Q = C.basis
    return Representation(rho.algebra, [Q.conj().T @ m @ Q for m in rho.images], f"{rho.name}/W", tol)


# ---------------------------------------------------------------------------
# equivalence


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Result of the word-trace comparison.

    ``heuristic`` is true when a ``yes`` rests on random words rather than
    on exhausting every word up to ``bound``.
    """

    verdict: str  # "yes" | "no" | "inconclusive"
    heuristic: bool
    bound: int
    exhaustive_len: int
    max_word_len: int
    words_checked: int
    witness: Optional[tuple[int, ...]] = None


def _letters(rhoH, rhoK):
    A, B = [], []
    for a, b in zip(rhoH.images, rhoK.images):
        s = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2))
        if s == 0:
            continue
        A += [a / s, a.conj().T / s]
        B += [b / s, b.conj().T / s]
    return A, B


def unitarily_equivalent(
    rhoH: Representation,
    rhoK: Representation,
    word_len: Optional[int] = None,
    samples: int = 500,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    exhaustive_len: int = 3,
) -> EquivalenceVerdict:
    """Decide unitary equivalence of two modules by traces of words.

    Two modules are unitarily equivalent as modules over ``A`` iff they are
    so over the *-algebra generated, and for tuples of matrices that is the
    case iff the traces of all words in the images and their adjoints agree
    (Specht's criterion; words of length ``2 n^2`` suffice).  All words up
    to ``exhaustive_len`` are compared, then ``samples`` random words with
    lengths up to ``word_len`` (default ``2 n^2``).
    """
    _check_same_algebra(rhoH, rhoK)
    n = rhoH.dim_H
    bound = 2 * n * n
    if word_len is None:
        word_len = bound
    if n != rhoK.dim_H:
        return EquivalenceVerdict("no", False, bound, 0, 0, 0)
    A, B = _letters(rhoH, rhoK)
    thresh = tol.match_abs * max(1, n)
    checked = 0

    def differ(pa, pb):
        return abs(np.trace(pa) - np.trace(pb)) > thresh

    # exhaustive words, grown one letter at a time
    level = [((), np.eye(n), np.eye(n))]
    for _ in range(exhaustive_len):
        nxt = []
        for w, pa, pb in level:
            for i in range(len(A)):
                qa, qb = pa @ A[i], pb @ B[i]
                checked += 1
                if differ(qa, qb):
                    return EquivalenceVerdict("no", False, bound, exhaustive_len, len(w) + 1, checked, w + (i,))
                nxt.append((w + (i,), qa, qb))
        level = nxt

    rng = np.random.default_rng(seed)
    longest = exhaustive_len
    if A and word_len > exhaustive_len:
        for _ in range(samples):
            L = int(rng.integers(exhaustive_len + 1, word_len + 1))
            w = tuple(int(i) for i in rng.integers(0, len(A), size=L))
            pa, pb = np.eye(n), np.eye(n)
            for i in w:
                pa, pb = pa @ A[i], pb @ B[i]
            checked += 1
            longest = max(longest, L)
            if differ(pa, pb):
                return EquivalenceVerdict("no", False, bound, exhaustive_len, longest, checked, w)

    if exhaustive_len >= bound:
        return EquivalenceVerdict("yes", False, bound, exhaustive_len, longest, checked)
    if word_len >= bound:
        return EquivalenceVerdict("yes", True, bound, exhaustive_len, longest, checked)
    return EquivalenceVerdict("inconclusive", True, bound, exhaustive_len, longest, checked)


@dataclass(frozen=True)
class QuasiVerdict:
    verdict: str  # "yes" | "not found up to bound"
    witness: Optional[tuple[int, int]]
    max_mult: int
    heuristic: bool = True


def quasi_equivalent(
    rhoH: Representation,
    rhoK: Representation,
    max_mult: int = 4,
    samples: int = 500,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> QuasiVerdict:
    """Bounded search for multiples ``rhoH^k`` and ``rhoK^l`` that are unitarily equivalent."""
    if max_mult < 1:
        raise ValueError("max_mult must be >= 1")
    _check_same_algebra(rhoH, rhoK)
    # equivalent multiples force a nonzero module map H -> K
    if intertwiners(rhoH, rhoK, tol).dim == 0:
        return QuasiVerdict("not found up to bound", None, max_mult, heuristic=False)
    for k, l in itertools.product(range(1, max_mult + 1), repeat=2):
        if k * rhoH.dim_H != l * rhoK.dim_H:
            continue
        v = unitarily_equivalent(multiple(rhoH, k), multiple(rhoK, l), samples=samples, tol=tol, seed=seed)
        if v.verdict == "yes":
            return QuasiVerdict("yes", (k, l), max_mult, v.heuristic)
    return QuasiVerdict("not found up to bound", None, max_mult)
