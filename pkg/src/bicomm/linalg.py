"""Dense complex linear algebra with an explicit numerical-rank policy.

Everything downstream (commutants, intertwiners, traces) reduces to kernels
and column spaces of complex matrices, so the rank decision lives here and
nowhere else.

Conventions
-----------
* Numerical rank: the number of singular values strictly greater than
  ``tol.rank_rel * sigma_max``.  A zero matrix has rank 0.
* ``vec`` stacks columns: ``vec(M)[i + j * rows] == M[i, j]``.  With this
  order ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
* Operator spaces carry the trace inner product ``<X, Y> = tr(Y^* X)``,
  which is the ordinary inner product of the vectorizations.
* ``ampliate(M, k)`` is the block-diagonal matrix with ``k`` copies of ``M``;
  coordinates of ``H^(k)`` are ordered copy by copy.

Arbitrary-precision arithmetic is not supported; for ill-conditioned inputs
the usual alternative is to redo the kernel computations exactly with
``sympy`` or ``mpmath`` matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every computation.

    rank_rel
        Relative singular-value cutoff used for all rank decisions.
    match_abs
        Absolute threshold for residual comparisons (subspace membership,
        multiplicativity checks, trace comparisons).
    """

    rank_rel: float = 1e-9
    match_abs: float = 1e-8

    def __post_init__(self):
        if not (self.rank_rel > 0 and self.match_abs > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerance()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_cmatrix(M, name: str = "matrix") -> np.ndarray:
    """Promote ``M`` to a 2-d complex128 array, rejecting NaN/Inf."""
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def numerical_rank(singular_values: np.ndarray, tol: Tolerance = DEFAULT_TOL, atol: float = 0.0) -> int:
    """Count singular values above ``rank_rel * sigma_max`` (and above ``atol``)."""
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > max(tol.rank_rel * s[0], atol)))


def _svd(M: np.ndarray):
    m, n = M.shape
    return np.linalg.svd(M, full_matrices=m < n)


# ---------------------------------------------------------------------------
# vector subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``C^ambient_dim`` held as orthonormal columns."""

    ambient_dim: int
    basis: np.ndarray  # (ambient_dim, k)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0), dtype=np.complex128))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def residual(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to this subspace."""
        v = np.asarray(v, dtype=np.complex128)
        return float(np.linalg.norm(v - self.basis @ (self.basis.conj().T @ v)))

    def contains(self, v, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.residual(v) <= tol.match_abs

    def complement(self, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        """Orthogonal complement in the ambient space."""
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        return rank_nullspace(self.basis.conj().T, tol)[1]

    def leq(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        _same_ambient(self, other)
        return all(other.residual(self.basis[:, i]) <= tol.match_abs for i in range(self.dim))

    def equal(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.dim == other.dim and self.leq(other, tol) and other.leq(self, tol)

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise ShapeError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def rank_nullspace(M, tol: Tolerance = DEFAULT_TOL, atol: float = 0.0) -> tuple[int, Subspace]:
    """Numerical rank of ``M`` and an orthonormal basis of its kernel."""
    M = as_cmatrix(M)
    m, n = M.shape
    if m == 0 or n == 0:
        return 0, Subspace.full(n)
    _, s, vh = _svd(M)
    r = numerical_rank(s, tol, atol)
    return r, Subspace(n, vh[r:].conj().T)


def column_space(M, tol: Tolerance = DEFAULT_TOL, atol: float = 0.0) -> Subspace:
    """Orthonormal basis of the range of ``M``.

    ``atol`` adds an absolute floor under the relative cutoff; it is used
    where every column may legitimately be rounding noise (e.g. ``A @ x``
    for a nilpotent ``A``).
    """
    M = as_cmatrix(M)
    m, n = M.shape
    if m == 0 or n == 0:
        return Subspace.zero(m)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    return Subspace(m, u[:, : numerical_rank(s, tol, atol)])


def span_vectors(vectors: Iterable, n: int, tol: Tolerance = DEFAULT_TOL, atol: float = 0.0) -> Subspace:
    vs = [np.asarray(v, dtype=np.complex128).reshape(n) for v in vectors]
    if not vs:
        return Subspace.zero(n)
    return column_space(np.column_stack(vs), tol, atol)


def subspace_sum(spaces: Sequence[Subspace], tol: Tolerance = DEFAULT_TOL) -> Subspace:
    n = spaces[0].ambient_dim
    return column_space(np.hstack([s.basis for s in spaces]), tol) if spaces else Subspace.zero(n)


# ---------------------------------------------------------------------------
# vectorization and ampliation


def vec(M) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(M, dtype=np.complex128).reshape(-1, order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.size != rows * cols:
        raise ShapeError(f"cannot unvec a vector of length {v.size} into {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def block_diag(*mats) -> np.ndarray:
    mats = [as_cmatrix(m) for m in mats]
    r = sum(m.shape[0] for m in mats)
    c = sum(m.shape[1] for m in mats)
    out = np.zeros((r, c), dtype=np.complex128)
    i = j = 0
    for m in mats:
        out[i : i + m.shape[0], j : j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def ampliate(M, k: int) -> np.ndarray:
    """``k`` diagonal copies of ``M`` (the operator ``M (x) I_k`` on ``H^(k)``)."""
    if k < 1:
        raise ValueError("ampliation multiplicity must be >= 1")
    M = as_cmatrix(M)
    return np.kron(np.eye(k), M)


# ---------------------------------------------------------------------------
# operator subspaces


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """A subspace of ``rows x cols`` complex matrices.

    ``basis`` has shape ``(dim, rows, cols)`` and is orthonormal for the
    trace inner product.
    """

    rows: int
    cols: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128).reshape(-1, self.rows, self.cols)
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def from_vecs(cls, V: np.ndarray, rows: int, cols: int) -> "OperatorSubspace":
        """Build from orthonormal columns of vectorized matrices."""
        mats = [unvec(V[:, i], rows, cols) for i in range(V.shape[1])]
        return cls(rows, cols, np.array(mats).reshape(-1, rows, cols))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "OperatorSubspace":
        return cls(rows, cols, np.zeros((0, rows, cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.basis)

    def vecs(self) -> np.ndarray:
        """Matrix whose columns are ``vec`` of the basis elements."""
        if self.dim == 0:
            return np.zeros((self.rows * self.cols, 0), dtype=np.complex128)
        return np.column_stack([vec(b) for b in self.basis])

    def coordinates(self, M) -> np.ndarray:
        return self.vecs().conj().T @ vec(M)

    def project(self, M) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((self.rows, self.cols), dtype=np.complex128)
        return np.tensordot(self.coordinates(M), self.basis, axes=1)

    def residual(self, M) -> float:
        M = np.asarray(M, dtype=np.complex128)
        return float(np.linalg.norm(M - self.project(M)))

    def contains(self, M, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.residual(M) <= tol.match_abs

    def adjoint(self) -> "OperatorSubspace":
        """The space ``{X^* : X in S}``; adjoints of an orthonormal basis stay orthonormal."""
        return OperatorSubspace(self.cols, self.rows, np.conj(np.transpose(self.basis, (0, 2, 1))))

    def complement_in(self, other: "OperatorSubspace", tol: Tolerance = DEFAULT_TOL) -> "OperatorSubspace":
        """Orthonormal basis of ``other`` minus this space (orthogonal complement inside ``other``).

        The returned dimension is exactly ``other.dim - self.dim`` clipped at 0,
        which keeps ``dim(self) + dim(excess) == dim(other)`` when ``self <= other``.
        """
        _check_same_shape(self, other)
        k = max(other.dim - self.dim, 0)
        if k == 0:
            return OperatorSubspace.zero(self.rows, self.cols)
        W = other.vecs()
        Q = self.vecs()
        R = W - Q @ (Q.conj().T @ W) if self.dim else W
        u, _, _ = np.linalg.svd(R, full_matrices=False)
        return OperatorSubspace.from_vecs(u[:, :k], self.rows, self.cols)

    def __repr__(self):
        return f"OperatorSubspace({self.rows}x{self.cols}, dim={self.dim})"


def _check_same_shape(a: OperatorSubspace, b: OperatorSubspace):
    if a.shape != b.shape:
        raise ShapeError(f"operator spaces of different shapes: {a.shape} vs {b.shape}")


def as_space(S, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Accept either an ``OperatorSubspace`` or a list of matrices."""
    if isinstance(S, OperatorSubspace):
        return S
    return span_of(S, tol)


def span_of(mats, tol: Tolerance = DEFAULT_TOL, shape: tuple[int, int] | None = None) -> OperatorSubspace:
    """Orthonormal basis of the linear span of ``mats``.

    ``shape`` is needed only when ``mats`` may be empty.
    """
    mats = [as_cmatrix(m) for m in mats]
    if not mats:
        if shape is None:
            raise ShapeError("span of an empty list needs an explicit shape")
        return OperatorSubspace.zero(*shape)
    rows, cols = mats[0].shape
    for m in mats[1:]:
        if m.shape != (rows, cols):
            raise ShapeError(f"mixed shapes in span: {(rows, cols)} and {m.shape}")
    if shape is not None and shape != (rows, cols):
        raise ShapeError(f"expected shape {shape}, got {(rows, cols)}")
    V = np.column_stack([vec(m) for m in mats])
    basis = column_space(V, tol).basis
    return OperatorSubspace.from_vecs(basis, rows, cols)


def subspace_residual(S1: OperatorSubspace, S2: OperatorSubspace) -> float:
    """Largest distance from a basis element of ``S1`` to ``S2``."""
    _check_same_shape(S1, S2)
    if S1.dim == 0:
        return 0.0
    return max(S2.residual(b) for b in S1.basis)


def subspace_leq(S1: OperatorSubspace, S2: OperatorSubspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    return subspace_residual(S1, S2) <= tol.match_abs


def subspace_equal(S1: OperatorSubspace, S2: OperatorSubspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    return S1.dim == S2.dim and subspace_leq(S1, S2, tol) and subspace_leq(S2, S1, tol)


def ampliate_space(S: OperatorSubspace, k: int, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    if k < 1:
        raise ValueError("ampliation multiplicity must be >= 1")
    if S.dim == 0:
        return OperatorSubspace.zero(S.rows * k, S.cols * k)
    return span_of([ampliate(b, k) for b in S.basis], tol)


# ---------------------------------------------------------------------------
# kernels of linear maps on matrices


def left_mult(A, cols: int) -> np.ndarray:
    """Matrix of ``X -> A @ X`` on vec(X), X having ``cols`` columns."""
    return np.kron(np.eye(cols), A)


def right_mult(B, rows: int) -> np.ndarray:
    """Matrix of ``X -> X @ B`` on vec(X), X having ``rows`` rows."""
    return np.kron(np.asarray(B).T, np.eye(rows))


def matrix_kernel(
    blocks: Sequence[np.ndarray],
    rows: int,
    cols: int,
    tol: Tolerance = DEFAULT_TOL,
    scale: float = 1.0,
) -> OperatorSubspace:
    """Common kernel of linear maps on ``rows x cols`` matrices.

    ``blocks`` are coefficient matrices acting on ``vec(X)``; the result is
    ``{X : L @ vec(X) == 0 for every L in blocks}``.  ``scale`` is the size
    of the operators the blocks were built from: singular values below
    ``match_abs * scale`` count as zero even when every block is rounding
    noise (e.g. commutators of a multiple of the identity).
    """
    n = rows * cols
    if not blocks:
        return OperatorSubspace.from_vecs(np.eye(n, dtype=np.complex128), rows, cols)
    L = np.vstack(blocks)
    if L.shape[0] > 2 * n:
        # same singular values, much smaller SVD
        L = np.linalg.qr(L, mode="r")
    _, null = rank_nullspace(L, tol, tol.match_abs * scale)
    return OperatorSubspace.from_vecs(null.basis, rows, cols)
