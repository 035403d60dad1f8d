"""Generator-type properties of a module, relative to an explicit module family.

"For every Hilbert module K" cannot be quantified at finite dimension, so
every verdict here is relative to a :class:`ModuleFamily`, and the family's
identifier travels with the report.  Sub-tracing is checked on sampled
submodules and is one-sided: a ``False`` comes with a witness, a positive
answer is only evidence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import MatrixAlgebra, is_faithful
from .commutant import DcpVerdict, commutant, dcp_check
from .errors import ImplicationError, RepresentationError, VerificationError
from .hilbmod import (
    Representation,
    cyclic_submodule,
    intertwiners,
    multiple,
    quotient,
    reject_module,
    restrict,
    trace_module,
    _require_invariant,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance, column_space, numerical_rank, rank_nullspace, vec


class Verdict(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    EVIDENCE = "evidence-true"

    @classmethod
    def of(cls, b: bool) -> "Verdict":
        return cls.TRUE if b else cls.FALSE

    @property
    def positive(self) -> bool:
        return self is not Verdict.FALSE

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModuleFamily:
    """The finite set of test modules that stands in for "all modules"."""

    algebra: MatrixAlgebra
    members: tuple
    name: str = "family"

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a module family needs at least one member")
        for m in self.members:
            if not m.algebra.same_as(self.algebra):
                raise RepresentationError(f"family member {m.name!r} is over a different algebra")

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


# ---------------------------------------------------------------------------
# semi-properties


def is_semigenerator_rel(H: Representation, F: ModuleFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every member receives a nonzero module map from ``H``."""
    return all(intertwiners(H, K, tol).dim > 0 for K in F)


def is_semicogenerator_rel(H: Representation, F: ModuleFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every member maps nonzero into ``H``."""
    return all(intertwiners(K, H, tol).dim > 0 for K in F)


# ---------------------------------------------------------------------------
# generators and cogenerators


def _annihilated(R_basis, T_basis, compose, tol) -> bool:
    """Is there a nonzero R in span(R_basis) with compose(R, T) = 0 for all T?"""
    if len(R_basis) == 0:
        return False
    if len(T_basis) == 0:
        return True
    cols = [np.concatenate([vec(compose(R, T)) for T in T_basis]) for R in R_basis]
    M = np.column_stack(cols)
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(np.linalg.norm(T, 2) for T in T_basis)
    return numerical_rank(s, tol, atol=tol.match_abs * scale) < len(R_basis)


def _raw_generator(H, F, tol) -> bool:
    # codomains: the family plus each K / Tr_K(H), the object the trace argument uses
    codomains = list(F)
    for K in F:
        tr = trace_module(H, K, tol)
        if 0 < tr.dim < K.dim_H:
            codomains.append(quotient(K, tr, tol))
    for K in F:
        T_basis = intertwiners(H, K, tol).basis
        for L in codomains:
            R_basis = intertwiners(K, L, tol).basis
            if _annihilated(R_basis, T_basis, lambda R, T: R @ T, tol):
                return False
    return True


def _raw_cogenerator(H, F, tol) -> bool:
    # domains: the family plus each Rej_L(H) as a submodule of L
    for L in F:
        T_basis = intertwiners(L, H, tol).basis
        domains = list(F)
        rej = reject_module(L, H, tol)
        if 0 < rej.dim < L.dim_H:
            domains.append(restrict(L, rej, tol))
        for K in domains:
            R_basis = intertwiners(K, L, tol).basis
            if _annihilated(R_basis, T_basis, lambda R, T: T @ R, tol):
                return False
    return True


def is_generator_rel(H: Representation, F: ModuleFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``Tr_K(H) = K`` for every member ``K``.

    Cross-checked against the definition (every nonzero module map ``R``
    out of a member has some ``T : H -> K`` with ``R T != 0``); the two
    must agree or :class:`VerificationError` is raised.
    """
    by_trace = all(trace_module(H, K, tol).dim == K.dim_H for K in F)
    raw = _raw_generator(H, F, tol)
    if by_trace != raw:
        raise VerificationError(f"generator verdicts disagree: trace says {by_trace}, definition says {raw}")
    return by_trace


def is_cogenerator_rel(H: Representation, F: ModuleFamily, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``Rej_K(H) = 0`` for every member ``K``, cross-checked like :func:`is_generator_rel`."""
    by_reject = all(reject_module(K, H, tol).dim == 0 for K in F)
    raw = _raw_cogenerator(H, F, tol)
    if by_reject != raw:
        raise VerificationError(f"cogenerator verdicts disagree: reject says {by_reject}, definition says {raw}")
    return by_reject


# ---------------------------------------------------------------------------
# sub-tracing


@dataclass(frozen=True)
class SubtracingVerdict:
    verdict: Verdict
    witness: Optional[Subspace]
    submodules_checked: int


def candidate_submodules(H: Representation, samples: int, rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL):
    """Distinct nonzero submodules of ``H`` found by structured and random probing.

    Sources: cyclic submodules of the standard basis, of eigenvectors of a
    random element of the image algebra and of the commutant, and of
    ``samples`` random vectors; ranges and kernels of random commutant
    elements (these are always invariant).
    """
    n = H.dim_H
    imgs = list(H.images)
    comm = commutant(imgs, tol)
    probes = list(np.eye(n, dtype=np.complex128))
    for mats in (imgs, list(comm.basis)):
        if not mats:
            continue
        c = rng.standard_normal(len(mats)) + 1j * rng.standard_normal(len(mats))
        probes += list(np.linalg.eig(np.tensordot(c, np.array(mats), axes=1))[1].T)
    probes += [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(samples)]

    found: list[Subspace] = []

    def add(W: Subspace):
        if W.dim == 0:
            return
        if any(W.equal(V, tol) for V in found):
            return
        found.append(W)

    for x in probes:
        add(cyclic_submodule(H, x, tol))
    for _ in range(3):
        c = rng.standard_normal(comm.dim) + 1j * rng.standard_normal(comm.dim)
        X = np.tensordot(c, comm.basis, axes=1)
        add(column_space(X, tol))
        add(rank_nullspace(X, tol)[1])
    return found


def is_subtracing(
    H: Representation,
    samples: int = 200,
    extra_submodules: Sequence[Subspace] = (),
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> SubtracingVerdict:
    """Check ``Tr_K(H) = K`` over sampled submodules ``K`` of ``H``.

    Caller-supplied subspaces must be invariant (``NotInvariantError``
    otherwise).  A failure returns the offending submodule as ``witness``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    for W in extra_submodules:
        _require_invariant(H, W, tol)
    rng = np.random.default_rng(seed)
    subs = [W for W in extra_submodules if W.dim > 0] + candidate_submodules(H, samples, rng, tol)
    for W in subs:
        K = restrict(H, W, tol)
        if trace_module(H, K, tol).dim < W.dim:
            return SubtracingVerdict(Verdict.FALSE, W, len(subs))
    return SubtracingVerdict(Verdict.EVIDENCE, None, len(subs))


def is_completely_subtracing(
    H: Representation,
    multiplicities: Sequence[int] = (1, 2, 4),
    samples: int = 200,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> SubtracingVerdict:
    """Finite probe of complete sub-tracing: sub-tracing of ``H^(k)`` for each ``k``."""
    checked = 0
    for k in multiplicities:
        v = is_subtracing(multiple(H, k), samples, tol=tol, seed=seed)
        checked += v.submodules_checked
        if v.verdict is Verdict.FALSE:
            return SubtracingVerdict(Verdict.FALSE, v.witness, checked)
    return SubtracingVerdict(Verdict.EVIDENCE, None, checked)


# ---------------------------------------------------------------------------
# reports

FLAGS = ("dcp", "faithful", "semigen", "semicogen", "generator", "cogenerator", "subtracing")


def implication_violations(flags: dict, family_has_faithful: bool = False) -> list[str]:
    """Known implications that ``flags`` break (empty when consistent)."""
    f = {k: Verdict(v).positive for k, v in flags.items()}
    out = []
    if f["generator"] and not f["semigen"]:
        out.append("generator => semigenerator")
    if f["cogenerator"] and not f["semicogen"]:
        out.append("cogenerator => semicogenerator")
    if (f["generator"] or f["cogenerator"]) and not f["dcp"]:
        out.append("generator or cogenerator => double commutant property")
    if family_has_faithful and (f["generator"] or f["cogenerator"]) and not f["faithful"]:
        out.append("generator/cogenerator (family with a faithful member) => faithful")
    return out


@dataclass
class PropertyReport:
    flags: dict
    family_id: str
    seed: int
    notes: list = field(default_factory=list)
    dcp: Optional[DcpVerdict] = field(default=None, repr=False)
    instance: dict = field(default_factory=dict)

    def matches(self, target: dict) -> bool:
        return all(Verdict(self.flags[k]).positive == bool(v) for k, v in target.items())

    def to_dict(self) -> dict:
        d = {
            "flags": {k: str(v) for k, v in self.flags.items()},
            "family_id": self.family_id,
            "seed": self.seed,
            "notes": list(self.notes),
            "instance": self.instance,
        }
        if self.dcp is not None:
            d["dims"] = {"span": self.dcp.span_dim, "bicommutant": self.dcp.bicommutant_dim}
        return d


def property_report(
    H: Representation,
    F: ModuleFamily,
    samples: int = 200,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
    complete: bool = False,
    instance: Optional[dict] = None,
) -> PropertyReport:
    """Run every check and enforce the implications between the properties.

    Raises :class:`ImplicationError` if the verdicts are inconsistent; with a
    truncated family this can mean the family is too small to witness a
    failure, so the message names the family.
    """
    dcp = dcp_check(H, tol)
    sub = (is_completely_subtracing if complete else is_subtracing)(H, samples=samples, tol=tol, seed=seed)
    flags = {
        "dcp": Verdict.of(dcp.holds),
        "faithful": Verdict.of(is_faithful(H, tol)),
        "semigen": Verdict.of(is_semigenerator_rel(H, F, tol)),
        "semicogen": Verdict.of(is_semicogenerator_rel(H, F, tol)),
        "generator": Verdict.of(is_generator_rel(H, F, tol)),
        "cogenerator": Verdict.of(is_cogenerator_rel(H, F, tol)),
        "subtracing": sub.verdict,
    }
    has_faithful = any(is_faithful(K, tol) for K in F)
    bad = implication_violations(flags, has_faithful)
    if bad:
        raise ImplicationError(f"inconsistent verdicts relative to family {F.name!r}: " + "; ".join(bad))
    notes = [
        f"module properties are relative to family {F.name!r} ({len(F)} members)",
        "faithfulness is reported in place of complete isometry",
        f"sub-tracing: {sub.submodules_checked} sampled submodules" + (" of multiples 1,2,4" if complete else ""),
    ]
    return PropertyReport(flags, F.name, seed, notes, dcp, dict(instance or {}))
