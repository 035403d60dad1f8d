"""Upper-triangular algebras: T2 and U(X), closed forms and engine cross-checks.

Every T2-module is one of four kinds:

* (a) ``H = H1 (+) H2`` with a contraction ``T : H2 -> H1`` and
  ``rho(a)(z + h) = a11 z + a12 T h + a22 h``;
* (b) ``rho(a) = a11 I``;  (c) ``rho(a) = a22 I``;  (d) the zero module.

For kind (a), with ``T`` of shape ``dim_H1 x dim_H2``:

====================  =====================================
property              holds iff
====================  =====================================
double commutant      T is not invertible
semigenerator         range of T is not all of H1
semicogenerator       T is not injective
generator             range of T is not all of H1, T != 0
cogenerator           T is not injective, T != 0
sub-tracing           range of T is not all of H1
====================  =====================================

U(X) is the algebra of 2x2 upper-triangular matrices with scalars on the
diagonal and an operator space ``X`` (here ``C^d``) in the corner; its
modules are given by ``d`` independent corner images ``alpha(x_j)``.
Complete contractivity of ``alpha`` is not checked.

Closed forms here are always compared with the generic engine; a
mismatch raises :class:`VerificationError`.
"""

from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .algebra import MatrixAlgebra
from .classify import ModuleFamily, PropertyReport, is_semicogenerator_rel, is_semigenerator_rel, property_report
from .commutant import bicommutant, commutant
from .errors import ImplicationError, RepresentationError, VerificationError
from .hilbmod import Representation
from .linalg import (
    DEFAULT_TOL,
    OperatorSubspace,
    Tolerance,
    as_cmatrix,
    as_space,
    block_diag,
    left_mult,
    matrix_kernel,
    numerical_rank,
    rank_nullspace,
    right_mult,
    span_of,
    subspace_equal,
    subspace_residual,
    unvec,
)


log = logging.getLogger(__name__)


def _plain(M) -> list:
    """Nested lists in the inline matrix format: reals, or ``[re, im]`` pairs if any entry is complex."""
    M = np.round(np.asarray(M), 12)
    if np.all(M.imag == 0):
        return M.real.tolist()
    return np.stack([M.real, M.imag], axis=-1).tolist()


def _unit(n, i, j, m=None):
    E = np.zeros((n, n if m is None else m), dtype=np.complex128)
    E[i, j] = 1
    return E


@functools.lru_cache(maxsize=None)
def t2_algebra() -> MatrixAlgebra:
    """Reference T2 with basis ``(E11, E12, E22)``."""
    return MatrixAlgebra.from_basis([_unit(2, 0, 0), _unit(2, 0, 1), _unit(2, 1, 1)], name="T2")


# ---------------------------------------------------------------------------
# T2


@dataclass(frozen=True, eq=False)
class T2Rep:
    kind: str
    dim_H1: int
    dim_H2: int
    T: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("a", "b", "c", "d"):
            raise ValueError(f"unknown T2 module kind {self.kind!r}")
        if self.kind == "a":
            T = as_cmatrix(self.T, "T")
            if T.shape != (self.dim_H1, self.dim_H2) or min(T.shape) < 1:
                raise ValueError(f"kind (a) needs T of shape dim_H1 x dim_H2 >= 1, got {T.shape}")
            T.setflags(write=False)
            object.__setattr__(self, "T", T)
        elif self.kind == "b" and not (self.dim_H1 >= 1 and self.dim_H2 == 0):
            raise ValueError("kind (b) lives on H1 only")
        elif self.kind == "c" and not (self.dim_H2 >= 1 and self.dim_H1 == 0):
            raise ValueError("kind (c) lives on H2 only")
        elif self.kind == "d" and (self.dim_H1 or self.dim_H2):
            raise ValueError("kind (d) is the zero module")

    @classmethod
    def a(cls, T) -> "T2Rep":
        T = as_cmatrix(T, "T")
        return cls("a", T.shape[0], T.shape[1], T)

    @classmethod
    def b(cls, n: int = 1) -> "T2Rep":
        return cls("b", n, 0)

    @classmethod
    def c(cls, n: int = 1) -> "T2Rep":
        return cls("c", 0, n)

    def describe(self) -> dict:
        d = {"kind": self.kind, "dim_H1": self.dim_H1, "dim_H2": self.dim_H2}
        if self.T is not None:
            d["T"] = _plain(self.T)
        return d


def build_t2(t: T2Rep, tol: Tolerance = DEFAULT_TOL, name: str = "") -> Representation:
    A = t2_algebra()
    if t.kind == "d":
        raise ValueError("the zero module has no matrix representation")
    if t.kind == "b":
        n = t.dim_H1
        images = [np.eye(n), np.zeros((n, n)), np.zeros((n, n))]
    elif t.kind == "c":
        n = t.dim_H2
        images = [np.zeros((n, n)), np.zeros((n, n)), np.eye(n)]
    else:
        norm = np.linalg.norm(t.T, 2)
        if norm > 1 + tol.match_abs:
            raise ValueError(f"T must be a contraction, has norm {norm:.6g}")
        n1, n2 = t.dim_H1, t.dim_H2
        Z = np.zeros((n1 + n2, n1 + n2), dtype=np.complex128)
        P1, N, P2 = Z.copy(), Z.copy(), Z.copy()
        P1[:n1, :n1] = np.eye(n1)
        N[:n1, n1:] = t.T
        P2[n1:, n1:] = np.eye(n2)
        images = [P1, N, P2]
    return Representation(A, images, name or f"T2({t.kind})", tol)


@dataclass(frozen=True)
class ClosedFormVerdict:
    dcp: bool
    semigen: bool
    semicogen: bool
    generator: bool
    cogenerator: bool
    subtracing: bool
    invertible: bool
    dense_range: bool
    injective: bool
    nonzero: bool
    rank: int

    def flags(self) -> dict:
        return {k: getattr(self, k) for k in ("dcp", "semigen", "semicogen", "generator", "cogenerator", "subtracing")}

    def notes(self) -> list[str]:
        return [
            f"rank T = {self.rank}; invertible={self.invertible}, dense range={self.dense_range}, "
            f"injective={self.injective}, nonzero={self.nonzero}",
            "double commutant property iff T not invertible",
            "semigenerator and sub-tracing iff range not dense; generator additionally needs T != 0",
            "semicogenerator iff T not injective; cogenerator additionally needs T != 0",
        ]


def t2_closed_form(t: T2Rep, tol: Tolerance = DEFAULT_TOL) -> ClosedFormVerdict:
    """Property flags of a kind-(a) module read off from the rank of ``T``."""
    if t.kind != "a":
        raise ValueError("closed forms are for kind (a) modules")
    s = np.linalg.svd(t.T, compute_uv=False)
    r = numerical_rank(s, tol)
    n1, n2 = t.T.shape
    invertible = n1 == n2 == r
    dense = r == n1
    injective = r == n2
    nonzero = r > 0
    return ClosedFormVerdict(
        dcp=not invertible,
        semigen=not dense,
        semicogen=not injective,
        generator=(not dense) and nonzero,
        cogenerator=(not injective) and nonzero,
        subtracing=not dense,
        invertible=invertible,
        dense_range=dense,
        injective=injective,
        nonzero=nonzero,
        rank=r,
    )


def intertwining_pairs(mats, n1: int, n2: int, tol: Tolerance = DEFAULT_TOL) -> list[tuple[np.ndarray, np.ndarray]]:
    """Basis of ``{(A, D) : A T = T D for every T in mats}``, ``A`` being ``n1 x n1``, ``D`` ``n2 x n2``."""
    blocks = [np.hstack([right_mult(T, n1), -left_mult(T, n2)]) for T in mats]
    if blocks:
        _, null = rank_nullspace(np.vstack(blocks), tol, tol.match_abs)
        Z = null.basis
    else:
        Z = np.eye(n1 * n1 + n2 * n2, dtype=np.complex128)
    k = n1 * n1
    return [(unvec(Z[:k, i], n1, n1), unvec(Z[k:, i], n2, n2)) for i in range(Z.shape[1])]


def _pairs_as_space(pairs, n1, n2, tol) -> OperatorSubspace:
    return span_of([block_diag(A, D) for A, D in pairs], tol, shape=(n1 + n2, n1 + n2))


def _require_match(name, closed: OperatorSubspace, engine: OperatorSubspace, tol):
    if not subspace_equal(closed, engine, tol):
        res = max(subspace_residual(closed, engine), subspace_residual(engine, closed))
        raise VerificationError(
            f"{name}: block-pair solve (dim {closed.dim}) and generic commutant (dim {engine.dim}) "
            f"disagree, residual {res:.2e}"
        )


def t2_commutant_closed_form(t: T2Rep, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """The commutant as ``{A (+) D : A T = T D}``, checked against :func:`commutant`."""
    if t.kind != "a":
        raise ValueError("closed forms are for kind (a) modules")
    n1, n2 = t.T.shape
    closed = _pairs_as_space(intertwining_pairs([t.T], n1, n2, tol), n1, n2, tol)
    _require_match("T2 commutant", closed, commutant(build_t2(t, tol).images, tol), tol)
    return closed


def t2_bicommutant_excess(t: T2Rep, tol: Tolerance = DEFAULT_TOL) -> Optional[np.ndarray]:
    """For invertible ``T``: the operator equal to ``T^-1`` from H1 to H2, zero on H2.

    It lies in the bicommutant but not in the span of the images.  Returns
    ``None`` when ``T`` is not invertible.
    """
    cf = t2_closed_form(t, tol)
    if not cf.invertible:
        return None
    n = t.dim_H1
    z = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    z[n:, :n] = np.linalg.inv(t.T)
    rep = build_t2(t, tol)
    B = bicommutant(rep.images, tol)
    P = span_of(list(rep.images), tol)
    scale = max(1.0, np.linalg.norm(z))
    if B.residual(z) > tol.match_abs * scale:
        raise VerificationError(f"witness is not in the bicommutant (residual {B.residual(z):.2e})")
    if P.residual(z) <= tol.match_abs * scale:
        raise VerificationError("witness unexpectedly lies in the span of the images")
    return z


def random_contraction(rng: np.random.Generator, n1: int, n2: int, rank: Optional[int] = None) -> np.ndarray:
    """Ginibre matrix of the given rank, rescaled to operator norm 1 (``rank=0`` gives zero)."""
    r = min(n1, n2) if rank is None else rank
    if r == 0:
        return np.zeros((n1, n2), dtype=np.complex128)
    G = (rng.standard_normal((n1, r)) + 1j * rng.standard_normal((n1, r))) @ (
        rng.standard_normal((r, n2)) + 1j * rng.standard_normal((r, n2))
    )
    return G / np.linalg.norm(G, 2)


def random_t2(rng: np.random.Generator, max_dim: int = 6) -> T2Rep:
    """A kind-(a) module drawn from a mix of invertible, rank-deficient, rectangular and zero ``T``."""
    mode = rng.integers(0, 4)
    n1 = int(rng.integers(1, max_dim + 1))
    n2 = n1 if mode == 0 else int(rng.integers(1, max_dim + 1))
    if mode == 0:
        return T2Rep.a(random_contraction(rng, n1, n2))
    if mode == 1:
        return T2Rep.a(random_contraction(rng, n1, n2, int(rng.integers(0, min(n1, n2)))))
    if mode == 2:
        return T2Rep.a(random_contraction(rng, n1, n2))
    return T2Rep.a(np.zeros((n1, n2)))


def canonical_t2_family(seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> ModuleFamily:
    """Three random kind-(a) modules of sizes 1x1, 2x1, 1x2 plus the scalar kinds (b) and (c).

    The random ``T`` are full rank, so the family contains modules with
    invertible, injective non-surjective and surjective non-injective ``T``.
    """
    rng = np.random.default_rng(seed)
    members = [
        build_t2(T2Rep.a(random_contraction(rng, n1, n2)), tol, f"a{n1}x{n2}")
        for n1, n2 in ((1, 1), (2, 1), (1, 2))
    ]
    members += [build_t2(T2Rep.b(1), tol, "b"), build_t2(T2Rep.c(1), tol, "c")]
    return ModuleFamily(t2_algebra(), members, f"canonical-T2(seed={seed})")


# ---------------------------------------------------------------------------
# U(X)


@functools.lru_cache(maxsize=None)
def ux_algebra(d: int) -> MatrixAlgebra:
    """Reference U(C^d) on ``C (+) C^d`` with basis ``(P1, P2, x_1, ..., x_d)``.

    ``P1 = E_00``, ``P2 = 0 (+) I_d`` and ``x_j = E_0j``; corner elements
    multiply to zero and ``P1 x = x = x P2``.
    """
    if d < 1:
        raise ValueError("U(X) needs dim X >= 1")
    n = d + 1
    P2 = np.eye(n, dtype=np.complex128)
    P2[0, 0] = 0
    basis = [_unit(n, 0, 0), P2] + [_unit(n, 0, j) for j in range(1, n)]
    return MatrixAlgebra.from_basis(basis, name=f"U(C^{d})")


@dataclass(frozen=True, eq=False)
class UXRep:
    dim_H1: int
    dim_H2: int
    alpha_images: np.ndarray  # (d, dim_H1, dim_H2)

    def __post_init__(self):
        imgs = np.array([as_cmatrix(a, "alpha image") for a in self.alpha_images])
        if self.dim_H1 < 1 or self.dim_H2 < 1:
            raise ValueError("U(X) modules of kind (a) need dim_H1, dim_H2 >= 1")
        if imgs.ndim != 3 or imgs.shape[1:] != (self.dim_H1, self.dim_H2):
            raise ValueError(f"alpha images must be {self.dim_H1}x{self.dim_H2}")
        V = imgs.reshape(len(imgs), -1).T
        if numerical_rank(np.linalg.svd(V, compute_uv=False)) != len(imgs):
            raise ValueError("alpha images must be linearly independent")
        imgs.setflags(write=False)
        object.__setattr__(self, "alpha_images", imgs)

    @classmethod
    def of(cls, alpha_images) -> "UXRep":
        imgs = [as_cmatrix(a) for a in alpha_images]
        return cls(imgs[0].shape[0], imgs[0].shape[1], np.array(imgs))

    @property
    def d(self) -> int:
        return self.alpha_images.shape[0]


def build_ux(u: UXRep, tol: Tolerance = DEFAULT_TOL, name: str = "") -> Representation:
    n1, n2 = u.dim_H1, u.dim_H2
    n = n1 + n2
    P1 = block_diag(np.eye(n1), np.zeros((n2, n2)))
    P2 = block_diag(np.zeros((n1, n1)), np.eye(n2))
    corners = []
    for a in u.alpha_images:
        X = np.zeros((n, n), dtype=np.complex128)
        X[:n1, n1:] = a
        corners.append(X)
    return Representation(ux_algebra(u.d), [P1, P2] + corners, name or f"U(X) d={u.d}", tol)


def ux_scalar_rep(d: int, kind: str, n: int = 1, tol: Tolerance = DEFAULT_TOL) -> Representation:
    """Kind (b) (``P1 -> I``) or (c) (``P2 -> I``) module of U(C^d) on ``C^n``."""
    I, Z = np.eye(n), np.zeros((n, n))
    first = [I, Z] if kind == "b" else [Z, I]
    if kind not in ("b", "c"):
        raise ValueError("kind must be 'b' or 'c'")
    return Representation(ux_algebra(d), first + [Z] * d, kind, tol)


def ux_commutant_pairs(u: UXRep, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """``{A (+) D : A alpha(x) = alpha(x) D}``, checked against the generic commutant."""
    closed = _pairs_as_space(intertwining_pairs(u.alpha_images, u.dim_H1, u.dim_H2, tol), u.dim_H1, u.dim_H2, tol)
    _require_match("U(X) commutant", closed, commutant(build_ux(u, tol).images, tol), tol)
    return closed


def canonical_ux_family(d: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> ModuleFamily:
    """Random kind-(a) U(C^d) modules at three sizes plus kinds (b) and (c)."""
    rng = np.random.default_rng(seed)
    m = int(np.ceil(np.sqrt(d)))
    members = []
    for n1, n2 in ((m, m), (m + 1, m), (m, m + 1)):
        imgs = [random_contraction(rng, n1, n2) for _ in range(d)]
        members.append(build_ux(UXRep(n1, n2, np.array(imgs)), tol, f"a{n1}x{n2}"))
    members += [ux_scalar_rep(d, "b", 1, tol), ux_scalar_rep(d, "c", 1, tol)]
    return ModuleFamily(ux_algebra(d), members, f"canonical-U(C^{d})(seed={seed})")


def ux_semi_criteria(u: UXRep, tol: Tolerance = DEFAULT_TOL, family: Optional[ModuleFamily] = None) -> tuple[bool, bool]:
    """(semigenerator, semicogenerator) from ranks of the stacked corner images.

    Semigenerator iff the ranges of the ``alpha(x)`` do not span H1;
    semicogenerator iff the ``alpha(x)`` have a common nonzero kernel
    vector.  Both are cross-checked against the relative definitions over
    ``family`` (default: the canonical U(C^d) family).
    """
    imgs = list(u.alpha_images)
    range_rank = numerical_rank(np.linalg.svd(np.hstack(imgs), compute_uv=False), tol)
    kernel_rank = numerical_rank(np.linalg.svd(np.vstack(imgs), compute_uv=False), tol)
    semigen = range_rank < u.dim_H1
    semicogen = kernel_rank < u.dim_H2
    F = family or canonical_ux_family(u.d, tol=tol)
    rep = build_ux(u, tol)
    rel = (is_semigenerator_rel(rep, F, tol), is_semicogenerator_rel(rep, F, tol))
    if rel != (semigen, semicogen):
        raise VerificationError(f"U(X) semi criteria: rank tests give {(semigen, semicogen)}, family gives {rel}")
    return semigen, semicogen


def shift_diag_ux(k: int, offset: int = 0) -> UXRep:
    """Truncation of ``x -> S diag(x)`` (``offset=1``: ``S diag(0, x)``) to ``C^(k+offset) -> C^(k+offset+1)``.

    ``S`` is the forward shift; the corner images are ``E_{j+1, j}`` for the
    nonzero diagonal slots ``j``.
    """
    if k < 1:
        raise ValueError("truncation size must be >= 1")
    n2 = k + offset
    n1 = n2 + 1
    imgs = [_unit(n1, j + 1, j, n2) for j in range(offset, n2)]
    return UXRep(n1, n2, np.array(imgs))


# ---------------------------------------------------------------------------
# reflexive closure of an operator space


def refl_closure(S, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """All ``S'`` with ``A S' = S' D`` whenever ``A T = T D`` for every ``T`` in ``S``.

    ``S`` is a space (or list) of ``n1 x n2`` matrices; ``A`` ranges over
    ``n1 x n1`` and ``D`` over ``n2 x n2`` matrices.
    """
    space = as_space(S, tol)
    n1, n2 = space.shape
    pairs = intertwining_pairs(list(space.basis), n1, n2, tol)
    blocks = [left_mult(A, n2) - right_mult(D, n1) for A, D in pairs]
    return matrix_kernel(blocks, n1, n2, tol)


def corner_of(space: OperatorSubspace, n1: int, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """The 1-2 corner blocks ``H2 -> H1`` of a space of block matrices."""
    return span_of([b[:n1, n1:] for b in space.basis], tol, shape=(n1, space.cols - n1))


# ---------------------------------------------------------------------------
# counterexample search


def _candidates(rng: np.random.Generator, tol: Tolerance) -> Iterator[tuple[dict, Representation, ModuleFamily]]:
    t2_fam = canonical_t2_family(int(rng.integers(2**31)), tol)
    structured = [
        np.array([[1.0]]),
        np.array([[0.0]]),
        np.array([[1.0], [0.0]]),
        np.array([[1.0, 0.0]]),
        np.diag([1.0, 0.0]),
        np.array([[0.0, 1.0], [0.0, 0.0]]),
        np.diag([1.0, 0.5]),
    ]
    ux_cache: dict[int, ModuleFamily] = {}

    def ux_item(u: UXRep, label: dict):
        if u.d not in ux_cache:
            ux_cache[u.d] = canonical_ux_family(u.d, int(rng.integers(2**31)), tol)
        return label, build_ux(u, tol), ux_cache[u.d]

    for T in structured:
        t = T2Rep.a(T)
        yield {"algebra": "T2", **t.describe()}, build_t2(t, tol), t2_fam
    for k in (1, 2, 3):
        for off in (0, 1):
            yield ux_item(shift_diag_ux(k, off), {"algebra": f"U(C^{k})", "shift_diag": k, "offset": off})
    for i in itertools.count():
        if i % 2 == 0:
            t = random_t2(rng, max_dim=3)
            yield {"algebra": "T2", **t.describe()}, build_t2(t, tol), t2_fam
        else:
            d = int(rng.integers(1, 4))
            n1, n2 = (int(x) for x in rng.integers(1, 4, size=2))
            if n1 * n2 < d:
                continue
            rank = int(rng.integers(1, min(n1, n2) + 1))
            imgs = [random_contraction(rng, n1, n2, rank) for _ in range(d)]
            try:
                u = UXRep(n1, n2, np.array(imgs))
            except ValueError:
                continue
            yield ux_item(u, {"algebra": f"U(C^{d})", "alpha": [_plain(a) for a in u.alpha_images]})


def counterexample_search(
    target: dict,
    seed: int = 0,
    budget: int = 50,
    tol: Tolerance = DEFAULT_TOL,
    samples: int = 50,
) -> list[PropertyReport]:
    """Evaluate up to ``budget`` T2 / U(X) modules and return those whose flags match ``target``.

    ``target`` maps flag names (see :data:`bicomm.classify.FLAGS`) to
    booleans; "evidence-true" counts as true.  Candidates start with
    structured ``T`` (rank-deficient, nilpotent, shift-diagonal
    truncations) and continue with random ones, since random dense ``T``
    is almost surely invertible.
    """
    rng = np.random.default_rng(seed)
    found = []
    for label, rep, fam in itertools.islice(_candidates(rng, tol), budget):
        try:
            report = property_report(rep, fam, samples=samples, tol=tol, seed=seed, instance=label)
        except ImplicationError as exc:
            # the family was too small to decide this instance
            log.debug("skipping %s: %s", label, exc)
            continue
        if report.matches(target):
            found.append(report)
    return found
