import numpy as np
import pytest
from hypothesis import given, strategies as st

from bicomm.algebra import is_faithful
from bicomm.classify import (
    FLAGS,
    ModuleFamily,
    Verdict,
    _raw_cogenerator,
    _raw_generator,
    implication_violations,
    is_cogenerator_rel,
    is_completely_subtracing,
    is_generator_rel,
    is_semicogenerator_rel,
    is_semigenerator_rel,
    is_subtracing,
    property_report,
)
from bicomm.errors import ImplicationError, NotInvariantError, RepresentationError
from bicomm.families import T2Rep, build_t2, canonical_t2_family, random_t2, t2_closed_form
from bicomm.algebra import generate_algebra
from bicomm.commutant import alg_lat_member, bicommutant
from bicomm.hilbmod import Representation, direct_sum, reject_module, trace_module
from bicomm.linalg import Subspace

from conftest import unit

seeds = st.integers(0, 2**32 - 1)

USUAL = build_t2(T2Rep.a([[1.0]]), name="usual")
INTRO = build_t2(T2Rep.a([[1.0], [0.0]]), name="intro")
ZERO = build_t2(T2Rep.a([[0.0]]), name="zero")
F = canonical_t2_family(0)


def t2(T):
    return build_t2(T2Rep.a(T))


def test_family_rejects_mixed_algebras():
    M2 = generate_algebra([unit(2, 0, 1), unit(2, 1, 0)])
    with pytest.raises(RepresentationError):
        ModuleFamily(USUAL.algebra, [USUAL, Representation(M2, M2.basis)])
    with pytest.raises(ValueError):
        ModuleFamily(USUAL.algebra, [])


# semi-properties


def test_semigenerator_examples():
    assert is_semigenerator_rel(INTRO, F)
    assert not is_semigenerator_rel(USUAL, F)
    for H in (USUAL, INTRO, ZERO):
        assert is_semigenerator_rel(H, ModuleFamily(H.algebra, [H]))


def test_semicogenerator_examples():
    assert is_semicogenerator_rel(t2([[1.0, 0.0]]), F)
    assert not is_semicogenerator_rel(USUAL, F)
    for H in (USUAL, INTRO, ZERO):
        assert is_semicogenerator_rel(H, ModuleFamily(H.algebra, [H]))


# generators and cogenerators


def test_generator_examples():
    assert is_generator_rel(INTRO, F)
    assert not is_generator_rel(ZERO, F)
    assert not is_generator_rel(USUAL, F)


def test_cogenerator_examples():
    assert is_cogenerator_rel(t2([[1.0, 0.0]]), F)
    assert not is_cogenerator_rel(USUAL, F)
    assert not is_cogenerator_rel(ZERO, F)


@given(seeds)
def test_trace_route_agrees_with_definition(seed):
    rng = np.random.default_rng(seed)
    members = [build_t2(random_t2(rng, max_dim=2)) for _ in range(2)] + [build_t2(T2Rep.b(1))]
    fam = ModuleFamily(members[0].algebra, members)
    H = build_t2(random_t2(rng, max_dim=3))
    gen_trace = all(trace_module(H, K).dim == K.dim_H for K in fam)
    assert gen_trace == _raw_generator(H, fam, H.tol)


@given(seeds)
def test_reject_route_agrees_with_definition(seed):
    rng = np.random.default_rng(seed)
    members = [build_t2(random_t2(rng, max_dim=2)) for _ in range(2)] + [build_t2(T2Rep.c(1))]
    fam = ModuleFamily(members[0].algebra, members)
    H = build_t2(random_t2(rng, max_dim=3))
    assert all(reject_module(K, H).dim == 0 for K in fam) == _raw_cogenerator(H, fam, H.tol)


@given(seeds)
def test_generator_survives_direct_sums(seed):
    rng = np.random.default_rng(seed)
    extra = build_t2(random_t2(rng, max_dim=2))
    for G, check in ((INTRO, is_generator_rel), (t2([[1.0, 0.0]]), is_cogenerator_rel)):
        assert check(G, F)
        assert check(direct_sum([G, extra]), F)


@given(seeds)
def test_generators_over_faithful_families_are_faithful(seed):
    rng = np.random.default_rng(seed)
    H = build_t2(random_t2(rng, max_dim=3))
    assert any(is_faithful(K) for K in F)
    if is_generator_rel(H, F) or is_cogenerator_rel(H, F):
        assert is_faithful(H)


# sub-tracing


def test_subtracing_examples():
    v = is_subtracing(INTRO)
    assert v.verdict is Verdict.EVIDENCE
    v = is_subtracing(USUAL)
    assert v.verdict is Verdict.FALSE
    assert v.witness.equal(Subspace(2, np.array([1.0, 0])))
    M2 = generate_algebra([unit(2, 0, 1), unit(2, 1, 0)])
    assert is_subtracing(Representation(M2, M2.basis)).verdict is Verdict.EVIDENCE


def test_subtracing_extra_submodules_must_be_invariant():
    with pytest.raises(NotInvariantError):
        is_subtracing(USUAL, extra_submodules=[Subspace(2, np.array([0, 1.0]))])
    with pytest.raises(ValueError):
        is_subtracing(USUAL, samples=0)


def test_completely_subtracing():
    assert is_completely_subtracing(INTRO, samples=20).verdict is Verdict.EVIDENCE
    assert is_completely_subtracing(USUAL, samples=20).verdict is Verdict.FALSE


@given(seeds)
def test_subtracing_bicommutant_lies_in_alg_lat(seed):
    rng = np.random.default_rng(seed)
    H = build_t2(random_t2(rng, max_dim=3))
    if is_subtracing(H, samples=30, seed=seed % 1000).verdict is Verdict.FALSE:
        return
    for X in bicommutant(H.images).basis:
        assert alg_lat_member(X, list(H.images), samples=30, seed=seed % 1000)


# verdicts and reports


def test_verdict_strings():
    assert str(Verdict.EVIDENCE) == "evidence-true"
    assert Verdict.EVIDENCE.positive and Verdict.TRUE.positive and not Verdict.FALSE.positive
    assert Verdict.of(False) is Verdict.FALSE


def test_implication_violations():
    ok = {k: "false" for k in FLAGS}
    assert implication_violations(ok) == []
    bad = dict(ok, generator="true", dcp="true", faithful="true")
    assert "generator => semigenerator" in implication_violations(bad)
    bad = dict(ok, cogenerator="true", semicogen="true", faithful="true")
    assert any("double commutant" in v for v in implication_violations(bad))
    bad = dict(ok, generator="true", semigen="true", dcp="true")
    assert implication_violations(bad) == []
    assert implication_violations(bad, family_has_faithful=True) != []


def test_property_report_examples():
    r = property_report(INTRO, F, samples=50)
    want = {"dcp": True, "generator": True, "cogenerator": False, "semigen": True, "semicogen": False, "subtracing": True}
    assert r.matches(want)
    r = property_report(USUAL, F, samples=50)
    assert r.matches({k: False for k in want})
    r = property_report(ZERO, F, samples=50)
    assert r.matches({"dcp": True, "generator": False, "cogenerator": False, "semigen": True, "semicogen": True})
    d = r.to_dict()
    assert d["family_id"] == F.name and d["dims"] == {"span": 2, "bicommutant": 2}


def test_property_report_raises_on_inconsistent_family():
    # a family containing only the module itself makes everything a generator,
    # which contradicts the failing double commutant property of T = 1
    fam = ModuleFamily(USUAL.algebra, [USUAL])
    with pytest.raises(ImplicationError):
        property_report(USUAL, fam, samples=10)


@given(seeds)
def test_property_report_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    t = random_t2(rng, max_dim=3)
    r = property_report(build_t2(t), F, samples=30, seed=seed % 1000)
    assert r.matches(t2_closed_form(t).flags())
