"""The acceptance scoreboard run by ``bicomm suite``.

Each criterion is a function ``(seed, tol) -> CriterionResult``; the
instance counts and tolerances are fixed here and are not configurable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import cyclic_membership, generate_algebra, star_closure
from .classify import (
    ModuleFamily,
    _raw_cogenerator,
    _raw_generator,
    is_semicogenerator_rel,
    is_semigenerator_rel,
    is_subtracing,
    is_generator_rel,
    is_cogenerator_rel,
)
from .commutant import alg_lat_member, bicommutant, dcp_check, identity_suite
from .families import (
    T2Rep,
    build_t2,
    canonical_t2_family,
    random_contraction,
    random_t2,
    refl_closure,
    t2_bicommutant_excess,
    t2_closed_form,
)
from .hilbmod import Representation, reject_module, trace_module
from .linalg import DEFAULT_TOL, Tolerance, span_of, subspace_equal, subspace_leq


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _unit(n, i, j):
    E = np.zeros((n, n), dtype=np.complex128)
    E[i, j] = 1
    return E


def _ginibre(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_operator_set(rng: np.random.Generator, n_max: int = 5) -> list[np.ndarray]:
    """1-3 matrices with a random structure (generic, triangular, diagonal, nilpotent, block, scalar)."""
    n = int(rng.integers(1, n_max + 1))
    size = int(rng.integers(1, 4))
    style = int(rng.integers(0, 6))
    out = []
    for _ in range(size):
        G = _ginibre(rng, n)
        if style == 1:
            G = np.triu(G)
        elif style == 2:
            G = np.diag(np.diag(G))
        elif style == 3:
            G = np.triu(G, 1)
        elif style == 4:
            h = max(1, n // 2)
            G[h:, :h] = 0
            G[:h, h:] = 0
        elif style == 5:
            G = G[0, 0] * np.eye(n)
        out.append(G)
    return out


def random_star_generators(rng: np.random.Generator, n_max: int = 5) -> list[np.ndarray]:
    """Adjoint-closed generators of a random block *-algebra, conjugated by a random unitary.

    Blocks may repeat (multiplicity) so the generated *-algebra is a proper
    subalgebra with a nontrivial commutant.
    """
    n = int(rng.integers(1, n_max + 1))
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    repeat = len(sizes) > 1 and sizes[0] == sizes[1] and rng.random() < 0.5
    gens = []
    for _ in range(int(rng.integers(1, 3))):
        blocks = [_ginibre(rng, s) for s in sizes]
        if repeat:
            blocks[1] = blocks[0]
        M = np.zeros((n, n), dtype=np.complex128)
        i = 0
        for b in blocks:
            M[i : i + len(b), i : i + len(b)] = b
            i += len(b)
        gens.append(M)
    U, _ = np.linalg.qr(_ginibre(rng, n))
    gens = [U @ g @ U.conj().T for g in gens]
    return gens + [g.conj().T for g in gens]


# ---------------------------------------------------------------------------


def c1_dcp_equivalence(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    bad = 0
    n = 500
    for _ in range(n):
        t = random_t2(rng, max_dim=6)
        if dcp_check(build_t2(t, tol), tol).holds != t2_closed_form(t, tol).dcp:
            bad += 1
    secs = time.perf_counter() - start
    return bad == 0 and secs < 60, f"{n} instances, {bad} disagreements, {secs:.1f}s (limit 60s)"


def c2_intro_example(seed: int, tol: Tolerance) -> tuple[bool, str]:
    usual = dcp_check(build_t2(T2Rep.a([[1.0]]), tol), tol)
    rho = dcp_check(build_t2(T2Rep.a([[1.0], [0.0]]), tol), tol)
    ok = (not usual.holds and usual.span_dim == 3 and usual.bicommutant_dim == 4) and (
        rho.holds and rho.span_dim == 3 and rho.bicommutant_dim == 3
    )
    return ok, (
        f"usual: holds={usual.holds} span {usual.span_dim} bicommutant {usual.bicommutant_dim}; "
        f"with evaluation summand: holds={rho.holds} span {rho.span_dim} bicommutant {rho.bicommutant_dim}"
    )


def c3_invertible_witness(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    bad = []
    worst_in, worst_out = 0.0, np.inf
    for i in range(100):
        n = int(rng.integers(1, 6))
        T = random_contraction(rng, n, n)
        t = T2Rep.a(T)
        rep = build_t2(t, tol)
        B = bicommutant(rep.images, tol)
        P = span_of(list(rep.images), tol)
        z = t2_bicommutant_excess(t, tol)
        d_in = B.residual(z)
        d_out = P.residual(z)
        worst_in, worst_out = max(worst_in, d_in), min(worst_out, d_out)
        if B.dim != 4 or d_in >= 1e-8 or d_out <= 0.1:
            bad.append(i)
    return not bad, (
        f"100 invertible T; failures {len(bad)}; max dist(z, bicommutant) {worst_in:.1e}; "
        f"min dist(z, span) {worst_out:.2f}"
    )


def c4_closed_form_vs_relative(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    F = canonical_t2_family(seed, tol)
    n = 200
    bad = 0
    for i in range(n):
        t = random_t2(rng, max_dim=4)
        H = build_t2(t, tol)
        cf = t2_closed_form(t, tol)
        rel = {
            "semigen": is_semigenerator_rel(H, F, tol),
            "semicogen": is_semicogenerator_rel(H, F, tol),
            "generator": is_generator_rel(H, F, tol),
            "cogenerator": is_cogenerator_rel(H, F, tol),
            "subtracing": is_subtracing(H, samples=50, tol=tol, seed=seed + i).verdict.positive,
        }
        if any(rel[k] != getattr(cf, k) for k in rel):
            bad += 1
    return bad == 0, f"{n} instances over a {len(F)}-member family, {bad} disagreements"


def c5_identity_suite(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    fails = 0
    worst = 0.0
    for _ in range(100):
        S = random_operator_set(rng, 5)
        k = int(rng.integers(1, 4))
        checks = identity_suite(S, k, tol)
        worst = max(worst, max(c.residual for c in checks))
        fails += sum(not c.passed for c in checks)
    return fails == 0, f"100 sets x 4 identities, {fails} failures, max residual {worst:.1e}"


def c6_von_neumann(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(100):
        gens = random_star_generators(rng, 5)
        if not subspace_equal(bicommutant(gens, tol), star_closure(gens, tol).space, tol):
            fails += 1
    return fails == 0, f"100 adjoint-closed sets, {fails} mismatches"


def _random_t2_member(rng, tol):
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return build_t2(T2Rep.b(int(rng.integers(1, 3))), tol, "b")
    if kind == 1:
        return build_t2(T2Rep.c(int(rng.integers(1, 3))), tol, "c")
    return build_t2(random_t2(rng, max_dim=2), tol, "a")


def c7_trace_vs_definition(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    pairs = 0
    bad = 0
    for f in range(50):
        members = [_random_t2_member(rng, tol) for _ in range(int(rng.integers(2, 5)))]
        F = ModuleFamily(members[0].algebra, members, f"random-{f}")
        for H in members:
            gen_trace = all(trace_module(H, K, tol).dim == K.dim_H for K in F)
            cogen_rej = all(reject_module(K, H, tol).dim == 0 for K in F)
            pairs += 1
            if gen_trace != _raw_generator(H, F, tol) or cogen_rej != _raw_cogenerator(H, F, tol):
                bad += 1
    return bad == 0, f"50 families, {pairs} (module, family) pairs, {bad} disagreements"


def c8_alg_lat_chain(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    checked = 0
    failed = 0
    while checked < 30:
        t = random_t2(rng, max_dim=4)
        if not t2_closed_form(t, tol).subtracing:
            continue
        rep = build_t2(t, tol)
        for X in bicommutant(rep.images, tol).basis:
            if not alg_lat_member(X, list(rep.images), samples=200, tol=tol, seed=seed + checked):
                failed += 1
        checked += 1
    usual = build_t2(T2Rep.a([[1.0]]), tol)
    excess_fails = not alg_lat_member(_unit(2, 1, 0), list(usual.images), samples=200, tol=tol, seed=seed)
    return failed == 0 and excess_fails, (
        f"{checked} sub-tracing instances, {failed} bicommutant elements outside alg lat; "
        f"E21 rejected for T=1: {excess_fails}"
    )


def _random_space(rng, tol):
    n1, n2 = (int(x) for x in rng.integers(1, 4, size=2))
    k = int(rng.integers(1, min(3, n1 * n2) + 1))
    mats = []
    for _ in range(k):
        G = _ginibre(rng, n1, n2)
        if rng.random() < 0.5:
            G = G * (rng.random((n1, n2)) < 0.5)
        mats.append(G)
    return mats, n1, n2


def c9_closure_operator(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    fails = {"extensive": 0, "monotone": 0, "idempotent": 0}
    for _ in range(100):
        mats, n1, n2 = _random_space(rng, tol)
        S = span_of(mats, tol)
        cl = refl_closure(S, tol)
        if not subspace_leq(S, cl, tol):
            fails["extensive"] += 1
        if not subspace_equal(refl_closure(cl, tol), cl, tol):
            fails["idempotent"] += 1
        bigger = span_of(mats + [_ginibre(rng, n1, n2) * (rng.random((n1, n2)) < 0.5)], tol)
        if not subspace_leq(cl, refl_closure(bigger, tol), tol):
            fails["monotone"] += 1
    e11 = refl_closure([_unit(2, 0, 0)], tol)
    e11_ok = e11.dim == 1 and subspace_equal(e11, span_of([_unit(2, 0, 0)], tol), tol)
    ok = not any(fails.values()) and e11_ok
    return ok, f"100 spaces, failures {fails}; closure of span{{E11}} has dim {e11.dim}"


def c10_cyclic_membership(seed: int, tol: Tolerance) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    A = generate_algebra([np.eye(3), np.triu(_ginibre(rng, 3)), _ginibre(rng, 3) * np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])], tol)
    rep = Representation(A, A.basis, "identity", tol)
    misses = 0
    for _ in range(100):
        x = _ginibre(rng, 3, 1).ravel()
        misses += not cyclic_membership(rep, x, tol)
    N = generate_algebra([_unit(2, 0, 1)], tol)
    nil = Representation(N, N.basis, "span E12", tol)
    strict_false = not cyclic_membership(nil, [0, 1], tol)
    return misses == 0 and strict_false, f"unital: {misses}/100 misses; span{{E12}}, x=e2 excluded: {strict_false}"


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "DCP iff T not invertible (engine vs closed form)", c1_dcp_equivalence),
    (2, "upper-triangular intro example", c2_intro_example),
    (3, "invertible T: bicommutant dim 4 and the T^-1 witness", c3_invertible_witness),
    (4, "closed-form flags vs relative classification", c4_closed_form_vs_relative),
    (5, "ampliation / adjoint identities", c5_identity_suite),
    (6, "bicommutant = generated *-algebra for adjoint-closed sets", c6_von_neumann),
    (7, "trace/reject verdicts vs raw definitions", c7_trace_vs_definition),
    (8, "sub-tracing => bicommutant inside alg lat", c8_alg_lat_chain),
    (9, "reflexive closure is a closure operator", c9_closure_operator),
    (10, "cyclic membership for unital vs nilpotent algebras", c10_cyclic_membership),
]


def run_criterion(number: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            start = time.perf_counter()
            passed, detail = fn(seed, tol)
            return CriterionResult(num, name, bool(passed), detail, time.perf_counter() - start)
    raise KeyError(f"no criterion {number}")


def run_suite(seed: int = 0, tol: Tolerance = DEFAULT_TOL, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for num, _, _ in CRITERIA:
        r = run_criterion(num, seed, tol)
        if echo:
            echo(r.line())
        results.append(r)
    return results
