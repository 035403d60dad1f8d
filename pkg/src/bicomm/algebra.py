"""Concrete matrix algebras: generation, star-closure, identity, structure constants.

The representation predicates at the bottom (faithfulness, nondegeneracy,
cyclic membership) only need ``rep.algebra``, ``rep.images`` and
``rep.dim_H``, so they work on any :class:`~bicomm.hilbmod.Representation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ShapeError, VerificationError
from .linalg import (
    DEFAULT_TOL,
    OperatorSubspace,
    Tolerance,
    _frozen,
    as_cmatrix,
    numerical_rank,
    span_of,
    span_vectors,
    vec,
)


@dataclass(frozen=True, eq=False)
class MatrixAlgebra:
    """A subalgebra of ``M_n(C)`` with a fixed, linearly independent basis.

    ``basis`` need not be orthonormal (the upper-triangular reference
    algebras use matrix units); ``space`` is the orthonormalized span used
    for subspace comparisons.  ``structure[i, j, k]`` are the coordinates of
    ``basis[i] @ basis[j]`` on ``basis[k]``.
    """

    dim_H: int
    basis: np.ndarray
    structure: np.ndarray
    space: OperatorSubspace
    identity: Optional[np.ndarray] = None
    generators: Optional[np.ndarray] = None
    name: str = ""
    _coord_map: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_basis(cls, basis, tol: Tolerance = DEFAULT_TOL, *, generators=None, name: str = "") -> "MatrixAlgebra":
        mats = [as_cmatrix(b, "basis element") for b in basis]
        if not mats:
            raise ShapeError("an algebra needs at least one basis element")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ShapeError(f"algebra basis elements must be {n}x{n}, got {m.shape}")
        B = np.array(mats)
        V = np.column_stack([vec(m) for m in mats])
        s = np.linalg.svd(V, compute_uv=False)
        if numerical_rank(s, tol) != len(mats):
            raise ValueError("algebra basis is linearly dependent")
        coord = np.linalg.pinv(V)
        d = len(mats)
        prods = np.einsum("iab,jbc->ijac", B, B)
        pv = prods.transpose(0, 1, 3, 2).reshape(d, d, n * n)  # column-stacking vec
        c = np.einsum("kp,ijp->ijk", coord, pv)
        recon = np.einsum("ijk,kab->ijab", c, B)
        scale = max(1.0, max(np.linalg.norm(m) for m in mats) ** 2)
        if np.max(np.abs(recon - prods)) > tol.match_abs * scale:
            raise VerificationError("basis is not closed under multiplication")
        gens = None if generators is None else _frozen(np.array([as_cmatrix(g) for g in generators]))
        alg = cls(
            dim_H=n,
            basis=_frozen(B),
            structure=_frozen(c),
            space=span_of(mats, tol),
            generators=gens,
            name=name,
            _coord_map=_frozen(coord),
        )
        e = find_identity(alg, tol)
        object.__setattr__(alg, "identity", None if e is None else _frozen(e))
        return alg

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, M) -> np.ndarray:
        """Coordinates of ``M`` in ``basis`` (least squares if ``M`` is not in the algebra)."""
        return self._coord_map @ vec(M)

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=np.complex128), self.basis, axes=1)

    def same_as(self, other: "MatrixAlgebra", tol: Tolerance = DEFAULT_TOL) -> bool:
        if self is other:
            return True
        return (
            self.dim_H == other.dim_H
            and self.dim == other.dim
            and bool(np.max(np.abs(self.basis - other.basis), initial=0.0) <= tol.match_abs)
        )

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"MatrixAlgebra{label}(dim_H={self.dim_H}, dim={self.dim}, unital={self.identity is not None})"


def _closure(gens, tol: Tolerance, with_adjoints: bool) -> OperatorSubspace:
    mats = [as_cmatrix(g, "generator") for g in gens]
    if not mats:
        raise ShapeError("need at least one generator")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ShapeError(f"generators must be square and of equal size; got {m.shape}")
    if with_adjoints:
        mats = mats + [m.conj().T for m in mats]
    S = span_of(mats, tol)
    if S.dim == 0:
        return S
    for _ in range(n * n + 1):
        cur = list(S.basis)
        extra = [a @ b for a in cur for b in cur]
        if with_adjoints:
            extra += [a.conj().T for a in cur]
        new = span_of(cur + extra, tol)
        if new.dim == S.dim:
            return new
        S = new
    raise VerificationError(f"algebra closure did not stabilize within {n * n} rounds")


def generate_algebra(gens: Sequence, tol: Tolerance = DEFAULT_TOL, name: str = "") -> MatrixAlgebra:
    """Smallest multiplicatively closed subspace containing ``gens``."""
    S = _closure(gens, tol, with_adjoints=False)
    if S.dim == 0:
        raise ValueError("generators span the zero algebra")
    return MatrixAlgebra.from_basis(S.basis, tol, generators=gens, name=name)


def star_closure(gens: Sequence, tol: Tolerance = DEFAULT_TOL, name: str = "") -> MatrixAlgebra:
    """The *-algebra generated by ``gens`` (finite-dimensional C*-algebra)."""
    S = _closure(gens, tol, with_adjoints=True)
    if S.dim == 0:
        raise ValueError("generators span the zero algebra")
    return MatrixAlgebra.from_basis(S.basis, tol, generators=gens, name=name)


def structure_constants(A: MatrixAlgebra) -> np.ndarray:
    return A.structure


def find_identity(A: MatrixAlgebra, tol: Tolerance = DEFAULT_TOL) -> Optional[np.ndarray]:
    """The unit of ``A`` if it has one, else ``None``.

    Solves ``e b = b e = b`` for all basis ``b`` by least squares over the
    basis coordinates of ``e`` and accepts the solution only if the residual
    is below ``match_abs``.  The unit may differ from the identity matrix
    (``span{E11}`` has unit ``E11``).
    """
    B = A.basis
    d = A.dim
    blocks, rhs = [], []
    for j in range(d):
        blocks.append(np.column_stack([vec(B[k] @ B[j]) for k in range(d)]))
        blocks.append(np.column_stack([vec(B[j] @ B[k]) for k in range(d)]))
        rhs += [vec(B[j]), vec(B[j])]
    M = np.vstack(blocks)
    y = np.concatenate(rhs)
    c, *_ = np.linalg.lstsq(M, y, rcond=None)
    if np.linalg.norm(M @ c - y) > tol.match_abs * max(1.0, np.linalg.norm(y)):
        return None
    return A.element(c)


# ---------------------------------------------------------------------------
# predicates on representations


def is_faithful(rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff basis coordinates -> images has trivial kernel."""
    V = np.column_stack([vec(m) for m in rep.images])
    return numerical_rank(np.linalg.svd(V, compute_uv=False), tol) == rep.algebra.dim


def is_nondegenerate(rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the vectors ``rho(b) xi`` span the whole space."""
    stacked = np.hstack(list(rep.images))
    s = np.linalg.svd(stacked, compute_uv=False)
    return numerical_rank(s, tol, atol=tol.match_abs) == rep.dim_H


def cyclic_membership(rep, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``x`` lies in the span of ``{rho(b) x}`` (``x`` itself excluded)."""
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("cyclic membership needs a nonzero vector")
    K = span_vectors([m @ x for m in rep.images], rep.dim_H, tol, atol=tol.match_abs * nx)
    return K.residual(x) <= tol.match_abs * max(1.0, nx)
