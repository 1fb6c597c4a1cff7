from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qcext import (
    CertifiedBound,
    DefectEstimate,
    FreeGroup,
    FreeProduct,
    FreeProductPairSpec,
    FreeRelCyclicSpec,
    QuasiCocycle,
    TrivialReals,
    antisymmetrize,
    brooks,
    brooks_homogenized,
    coboundary1,
    coboundary2,
    cyclic_homomorphism,
    defect,
    delta,
    embed_on_factor,
    homogenize_numeric,
    step_quasimorphism,
    tree_edge_cocycle,
    zero_cocycle,
)
from qcext.errors import CertificateError, DomainError, MixedContextError

F2 = FreeGroup(["x", "y"])
REL_X = FreeRelCyclicSpec(F2, F2.parse("x"))


def words(max_size=8):
    return st.lists(
        st.sampled_from([1, -1, 2, -2]), min_size=0, max_size=max_size
    ).map(lambda ls: F2.word(ls))


def test_brooks_counting_values():
    h = brooks(F2, F2.parse("x y"))
    assert h.scalar_value(F2.parse("x y x y")) == 2
    assert h.scalar_value(F2.parse("y^-1 x^-1")) == -1
    assert h.scalar_value(F2.parse("y x")) == 0
    assert h.scalar_value(F2.identity()) == 0
    # greedy scan counts disjoint copies only
    h2 = brooks(F2, F2.parse("x^2"))
    assert h2.scalar_value(F2.parse("x^5")) == 2


def test_brooks_input_validation():
    with pytest.raises(DomainError):
        brooks(F2, F2.identity())
    other = FreeGroup(["a"])
    with pytest.raises(MixedContextError):
        brooks(F2, other.parse("a"))


@given(words())
def test_brooks_antisymmetry_identity(g):
    h = brooks(F2, F2.parse("x y"))
    assert h.scalar_value(g.inverse()) == -h.scalar_value(g)


def test_brooks_defect_within_certificate():
    h = brooks(F2, F2.parse("x y"))
    ball = [F2.word(ls) for ls in _ball_letters(3)]
    est = defect(h, ball)
    assert est.leq_exact(h.certified_defect.value)
    assert est.pairs_checked == len(ball) ** 2


def _ball_letters(radius):
    out = [()]
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for tup in frontier:
            for c in (1, -1, 2, -2):
                if tup and tup[-1] == -c:
                    continue
                nxt.append(tup + (c,))
        out.extend(nxt)
        frontier = nxt
    return out


def test_homogenized_brooks_values():
    psi = brooks_homogenized(F2, F2.parse("x y"))
    assert psi.homogeneous and psi.antisymmetric
    assert psi.certified_defect.value == 6
    assert psi.certified_defect.provenance == "derived"
    xy = F2.parse("x y")
    assert psi.scalar_value(xy) == 1
    assert psi.scalar_value(xy**5) == 5
    assert psi.scalar_value(xy**-1) == -1
    # conjugation invariance through cyclic reduction
    assert psi.scalar_value(F2.parse("y x")) == 1
    assert psi.scalar_value(F2.parse("x")) == 0
    assert psi.scalar_value(F2.identity()) == 0


@given(words(6), st.integers(min_value=1, max_value=4))
def test_homogenized_value_is_power_stable(g, n):
    psi = brooks_homogenized(F2, F2.parse("x y"))
    assert psi.scalar_value(g**n) == n * psi.scalar_value(g)


def test_numeric_homogenization_brackets_exact_psi():
    h = brooks(F2, F2.parse("x y"))
    psi = brooks_homogenized(F2, F2.parse("x y"))
    for text in ("x y", "x y x", "x^2 y", "y x^-1"):
        g = F2.parse(text)
        for n in (5, 30):
            val, err = homogenize_numeric(h, g, n)
            assert abs(psi.scalar_value(g) - val) <= err
            assert err == Fraction(3, n)
    with pytest.raises(DomainError):
        homogenize_numeric(h, F2.parse("x"), 0)
    bare = QuasiCocycle("bare", F2, h.module, lambda g: h(g))
    with pytest.raises(CertificateError):
        homogenize_numeric(bare, F2.parse("x"), 3)


def test_step_quasimorphism_and_antisymmetrization():
    q = step_quasimorphism(REL_X)
    assert q.scalar_value(F2.parse("x^4")) == 1
    assert q.scalar_value(F2.identity()) == 1
    assert q.scalar_value(F2.parse("x^-2")) == 0
    assert not q.antisymmetric
    assert q.certified_defect.value == 1
    assert q.certified_defect.provenance == "combinatorial-certificate"
    with pytest.raises(DomainError):
        q(F2.parse("y"))

    alpha = antisymmetrize(q)
    assert alpha.antisymmetric
    assert alpha.certified_defect.value == 1
    assert alpha.certified_defect.provenance == "derived"
    assert alpha.scalar_value(F2.parse("x^3")) == Fraction(1, 2)
    assert alpha.scalar_value(F2.identity()) == 0
    assert alpha.scalar_value(F2.parse("x^-3")) == Fraction(-1, 2)


def test_step_defect_scan_hits_certificate_exactly():
    q = step_quasimorphism(REL_X)
    elems = [F2.parse("x") ** k for k in range(-3, 4)]
    est = defect(q, elems)
    assert est.exact_pth_power_max == 1
    assert est.leq_exact(1)
    assert not est.leq_exact(Fraction(99, 100))


def test_cyclic_homomorphism_rel_and_fp():
    hom = cyclic_homomorphism(REL_X, slope=Fraction(3, 2))
    assert hom.scalar_value(F2.parse("x^4")) == 6
    assert hom.exact_cocycle and hom.homogeneous and hom.antisymmetric
    assert hom.certified_defect.value == 0
    assert hom.certified_defect.provenance == "homomorphism-zero"
    with pytest.raises(DomainError):
        hom(F2.parse("x y"))

    A, B = FreeGroup(["a"]), FreeGroup(["b"])
    spec = FreeProductPairSpec(FreeProduct([A, B]), ["A", "B"])
    fhom = cyclic_homomorphism(spec, "A", slope=2)
    assert fhom.scalar_value(spec.group.syllable(0, A.parse("a^-3"))) == -6
    with pytest.raises(DomainError):
        cyclic_homomorphism(spec)


def test_tree_edge_cocycle_values_and_norm():
    q = tree_edge_cocycle(F2)
    v = q(F2.parse("x y"))
    want = delta(q.module, (F2.identity(), "e:x")) + delta(
        q.module, (F2.parse("x"), "e:y")
    )
    assert v == want
    assert v.norm_pth_power() == 2
    assert q(F2.parse("x^-1")) == delta(q.module, (F2.parse("x^-1"), "e:x"), -1)
    assert q.exact_cocycle
    assert q.certified_defect.value == 0


@given(words(5), words(5))
def test_tree_edge_cocycle_identity_is_exact(f, g):
    q = tree_edge_cocycle(F2)
    assert coboundary1(q)(f, g).is_zero()


@given(words(4), words(4), words(4))
def test_d2_after_d1_vanishes(f, g, h):
    for q in (brooks(F2, F2.parse("x y")), tree_edge_cocycle(F2)):
        assert coboundary2(coboundary1(q))(f, g, h).is_zero()


def test_embed_on_factor():
    A, B = FreeGroup(["x", "y"]), FreeGroup(["t"])
    spec = FreeProductPairSpec(FreeProduct([A, B]), ["A", "B"])
    h = brooks(A, A.parse("x y"))
    amb = embed_on_factor(spec, "A", h)
    assert amb.group is spec.group
    assert amb.antisymmetric == h.antisymmetric
    assert amb.certified_defect.value == 3
    g = spec.group.syllable(0, A.parse("x y x y"))
    assert amb.scalar_value(g) == 2
    assert amb.scalar_value(spec.group.identity()) == 0
    with pytest.raises(DomainError):
        amb(spec.group.syllable(1, B.parse("t")))
    with pytest.raises(DomainError):
        embed_on_factor(spec, "A", tree_edge_cocycle(A))


def test_tree_edge_cocycle_on_free_product_factor():
    A, B = FreeGroup(["x", "y"]), FreeGroup(["t"])
    spec = FreeProductPairSpec(FreeProduct([A, B]), ["A", "B"])
    q = tree_edge_cocycle(spec, "A")
    g = spec.group.syllable(0, A.parse("x y"))
    v = q(g)
    assert v.norm_pth_power() == 2
    keys = set(v.coeffs)
    assert (spec.group.identity(), "e:x") in keys
    assert (spec.group.syllable(0, A.parse("x")), "e:y") in keys
    # ambient action relocates the index set
    t = spec.group.syllable(1, B.parse("t"))
    moved = v.act(t)
    assert (t, "e:x") in set(moved.coeffs)


def test_certified_bound_validation():
    with pytest.raises(CertificateError):
        CertifiedBound(-1, "derived")
    with pytest.raises(CertificateError):
        CertifiedBound(1, "word-of-mouth")
    b = CertifiedBound(Fraction(1, 2), "user-supplied", "given")
    assert b.to_json()["value"] == "1/2"


def test_defect_estimate_exact_comparison():
    est = DefectEstimate(Fraction(2), 2, (), 1)
    assert est.leq_exact(Fraction(3, 2))
    assert not est.leq_exact(Fraction(7, 5))


def test_combinators_accumulate_certificates():
    q = step_quasimorphism(REL_X)
    s = q + q
    assert s.certified_defect.value == 2
    assert s.certified_defect.provenance == "derived"
    assert s.scalar_value(F2.parse("x")) == 2
    tripled = q.scale(-3)
    assert tripled.certified_defect.value == 3
    assert tripled.scalar_value(F2.parse("x")) == -3
    z = zero_cocycle(F2, TrivialReals())
    assert z.exact_cocycle and z.antisymmetric and z.homogeneous
    assert z.scalar_value(F2.parse("x y")) == 0
