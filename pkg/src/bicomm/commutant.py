"""Commutants, bicommutants and double-commutant verdicts.

The commutant of ``S`` is the kernel of the stacked linear map
``X -> (X A_i - A_i X)_i`` on ``vec(X)``, taken over an orthonormal basis
of ``span S`` rather than the raw generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import VerificationError
from .linalg import (
    DEFAULT_TOL,
    OperatorSubspace,
    Subspace,
    Tolerance,
    ampliate,
    ampliate_space,
    as_cmatrix,
    as_space,
    left_mult,
    matrix_kernel,
    right_mult,
    span_of,
    span_vectors,
    subspace_equal,
    subspace_leq,
    subspace_residual,
)


def _square_space(S, tol) -> OperatorSubspace:
    space = as_space(S, tol)
    if space.rows != space.cols:
        raise ValueError(f"commutants need square matrices, got {space.shape}")
    return space


def commutant(S, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    """Orthonormal basis of ``{X : X A = A X for all A in S}``."""
    space = _square_space(S, tol)
    n = space.rows
    blocks = [right_mult(A, n) - left_mult(A, n) for A in space.basis]
    return matrix_kernel(blocks, n, n, tol)


def bicommutant(S, tol: Tolerance = DEFAULT_TOL) -> OperatorSubspace:
    return commutant(commutant(S, tol), tol)


@dataclass(frozen=True)
class DcpVerdict:
    """Outcome of comparing ``span rho(A)`` with ``rho(A)''``.

    ``excess`` is an orthonormal basis of the part of the bicommutant
    orthogonal to the span; it is empty exactly when ``holds``.
    """

    holds: bool
    span_dim: int
    bicommutant_dim: int
    excess: OperatorSubspace
    span: OperatorSubspace = field(repr=False)
    bicommutant: OperatorSubspace = field(repr=False)


def dcp_check(rep, tol: Tolerance = DEFAULT_TOL) -> DcpVerdict:
    """Double commutant property of a representation at finite dimension.

    At finite dimension the weak* closure of ``rho(A)`` is its linear span,
    so the property holds iff ``span rho(A)`` and ``rho(A)''`` have equal
    dimension (the span is always contained in the bicommutant).
    """
    images = rep.images if hasattr(rep, "images") else rep
    P = span_of(list(images), tol)
    B = bicommutant(P, tol)
    if not subspace_leq(P, B, tol):
        raise VerificationError(
            f"span of the images is not inside its bicommutant (residual {subspace_residual(P, B):.2e})"
        )
    excess = P.complement_in(B, tol)
    return DcpVerdict(P.dim == B.dim, P.dim, B.dim, excess, P, B)


def is_selfadjoint_space(S, tol: Tolerance = DEFAULT_TOL) -> bool:
    space = as_space(S, tol)
    return subspace_equal(space.adjoint(), space, tol)


# ---------------------------------------------------------------------------
# invariant subspaces


def invariant_hull(mats, start: Subspace, tol: Tolerance = DEFAULT_TOL, atol: float = 0.0) -> Subspace:
    """Smallest subspace containing ``start`` and invariant under every matrix in ``mats``."""
    K = start
    n = start.ambient_dim
    for _ in range(n + 1):
        if K.dim == 0 or K.dim == n:
            return K
        vecs = [K.basis] + [A @ K.basis for A in mats]
        new = span_vectors(np.hstack(vecs).T, n, tol, atol)
        if new.dim == K.dim:
            return new
        K = new
    return K


def cyclic_hull(mats, x, tol: Tolerance = DEFAULT_TOL, strict: bool = False) -> Subspace:
    """Smallest invariant subspace containing ``x`` (``strict``: containing ``{A x}``).

    When ``mats`` span an algebra this is ``span{x} + span{A x}``, or
    ``span{A x}`` in strict mode.
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    n = x.size
    atol = tol.match_abs * np.linalg.norm(x)
    if strict:
        start = span_vectors([A @ x for A in mats], n, tol, atol)
    else:
        start = span_vectors([x], n, tol)
    return invariant_hull(mats, start, tol, atol)


def _probe_vectors(mats, n: int, samples: int, rng: np.random.Generator) -> list[np.ndarray]:
    probes = list(np.eye(n, dtype=np.complex128))
    if mats:
        coeffs = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        generic = np.tensordot(coeffs, np.array(mats), axes=1)
        probes += list(np.linalg.eig(generic)[1].T)
    for _ in range(samples):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        probes.append(v / np.linalg.norm(v))
    return probes


def alg_lat_member(
    X,
    S,
    samples: int = 200,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    strict: bool = False,
) -> bool:
    """One-sided randomized test of ``X in alg lat S``.

    For each probe vector ``x`` checks that ``X`` maps the cyclic subspace
    ``K_x`` (see :func:`cyclic_hull`) into itself.  Probes are the standard
    basis, the eigenvectors of one random combination of ``S`` (these catch
    the common eigenvectors that generate small invariant subspaces) and
    ``samples`` complex Gaussian unit vectors.  ``False`` is definitive;
    ``True`` is evidence only.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    X = as_cmatrix(X)
    space = _square_space(S, tol)
    mats = list(space.basis)
    n = space.rows
    rng = np.random.default_rng(seed)
    xnorm = max(1.0, np.linalg.norm(X, 2))
    for x in _probe_vectors(mats, n, samples, rng):
        K = cyclic_hull(mats, x, tol, strict)
        if K.dim in (0, n):
            continue
        XK = X @ K.basis
        if np.linalg.norm(XK - K.basis @ (K.basis.conj().T @ XK)) > tol.match_abs * xnorm:
            return False
    return True


# ---------------------------------------------------------------------------
# identities for ampliations and adjoints


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    residual: float
    dims: tuple[int, int]


def _compare(name, lhs, rhs, tol) -> IdentityCheck:
    res = max(subspace_residual(lhs, rhs), subspace_residual(rhs, lhs))
    return IdentityCheck(name, subspace_equal(lhs, rhs, tol), res, (lhs.dim, rhs.dim))


def identity_suite(S, k: int, tol: Tolerance = DEFAULT_TOL) -> list[IdentityCheck]:
    """Check the ampliation and adjoint identities for spans and bicommutants.

    Each side is computed on its own path: e.g. ``(S (x) I)''`` takes the
    bicommutant of the ampliated matrices, while ``S'' (x) I`` ampliates
    the bicommutant of ``S``.
    """
    if k < 1:
        raise ValueError("ampliation multiplicity must be >= 1")
    mats = list(S.basis) if isinstance(S, OperatorSubspace) else [as_cmatrix(m) for m in S]
    amp = [ampliate(m, k) for m in mats]
    adj = [m.conj().T for m in mats]
    span_S = span_of(mats, tol)
    bic_S = bicommutant(span_S, tol)
    return [
        _compare("span(S (x) I) = span(S) (x) I", span_of(amp, tol), ampliate_space(span_S, k, tol), tol),
        _compare("(S (x) I)'' = S'' (x) I", bicommutant(amp, tol), ampliate_space(bic_S, k, tol), tol),
        _compare("span(S*) = (span S)*", span_of(adj, tol), span_S.adjoint(), tol),
        _compare("(S*)'' = (S'')*", bicommutant(adj, tol), bic_S.adjoint(), tol),
    ]
