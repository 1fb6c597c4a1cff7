from __future__ import annotations

from fractions import Fraction

import pytest

from qcext import (
    FreeGroup,
    FreeProduct,
    FreeProductPairSpec,
    FreeRelCyclicSpec,
    QuasiCocycle,
    asnec_demo,
    averaged_value,
    brooks,
    combed_value,
    cyclic_homomorphism,
    defect,
    elementary_bicombing,
    embed_on_factor,
    extend,
    extend_general,
    k_constant,
    restriction_check,
    root_upper,
    step_quasimorphism,
    tree_edge_cocycle,
)
from qcext.errors import CertificateError, DomainError, MixedContextError

F2 = FreeGroup(["x", "y"])
REL_X = FreeRelCyclicSpec(F2, F2.parse("x"))


def fp_spec():
    A, B = FreeGroup(["a"]), FreeGroup(["b"])
    return FreeProductPairSpec(FreeProduct([A, B]), ["A", "B"])


def test_root_upper_is_certified():
    r = root_upper(Fraction(2), 2)
    assert r**2 >= 2
    assert (r - Fraction(2, 10**9)) ** 2 < 2
    assert root_upper(Fraction(5, 7), 1) == Fraction(5, 7)
    assert root_upper(Fraction(0), 3) == 0
    with pytest.raises(DomainError):
        root_upper(Fraction(-1), 2)


def test_elementary_bicombing_values():
    spec = fp_spec()
    G = spec.group
    q = cyclic_homomorphism(spec, "A")
    r = elementary_bicombing(spec, "A", q)
    assert r(G.parse("a"), G.parse("a^4")).scalar() == 3
    assert r(G.parse("a^4"), G.parse("a")).scalar() == -3
    with pytest.raises(DomainError):
        r(G.identity(), G.parse("b"))


def test_averaged_and_combed_values():
    spec = fp_spec()
    G = spec.group
    qa = cyclic_homomorphism(spec, "A")
    qb = cyclic_homomorphism(spec, "B")
    one, g = G.identity(), G.parse("a b a^2")
    pair = (G.parse("a"), G.parse("a b"))
    assert averaged_value(spec, "B", qb, [pair]).scalar() == 1
    with pytest.raises(DomainError):
        averaged_value(spec, "B", qb, [])
    # coset contributions along a b a^2: slopes 1 and 2 on the A side
    assert combed_value(spec, "A", qa, one, g).scalar() == 3
    assert combed_value(spec, "B", qb, one, g).scalar() == 1


def test_free_product_extension_values_and_certificate():
    spec = fp_spec()
    G = spec.group
    g = G.parse("a b a^2 b^-3")

    res = extend(spec, {
        "A": cyclic_homomorphism(spec, "A"),
        "B": cyclic_homomorphism(spec, "B"),
    })
    assert res.iota(g).scalar() == 1
    assert res.certificate.value == 0
    assert res.certificate.provenance == "extension-certificate"
    assert res.iota.exact_cocycle
    assert res.iota.antisymmetric
    assert not res.conditional
    for lam in ("A", "B"):
        info = res.per_lambda[lam]
        assert info["K"] == 0 and not info["K_conditional"]

    res2 = extend(spec, {
        "A": cyclic_homomorphism(spec, "A"),
        "B": cyclic_homomorphism(spec, "B", slope=2),
    })
    assert res2.iota(g).scalar() == -1


def test_extension_restriction_and_antisymmetry():
    spec = fp_spec()
    res = extend(spec, {
        "A": cyclic_homomorphism(spec, "A"),
        "B": cyclic_homomorphism(spec, "B"),
    })
    for lam in ("A", "B"):
        rep = restriction_check(res, lam, samples=15)
        assert rep["ok"] and rep["checked"] > 0
    g = spec.group.parse("a b a^-1 b^2")
    assert (res.iota(g.inverse()) + res.iota(g)).is_zero()


def test_rel_extension_frozen_values():
    res = extend(REL_X, {"C": cyclic_homomorphism(REL_X)})
    assert res.iota(F2.parse("y x^3 y x^2")).scalar() == 5
    assert res.iota(F2.parse("x^7")).scalar() == 7
    assert res.iota(F2.parse("y")).scalar() == 0
    assert not res.iota.exact_cocycle  # telescoping is only proven for free products
    ball = [F2.word(ls) for ls in _letters(2)]
    est = defect(res.iota, ball)
    assert est.leq_exact(res.certificate.value)


def _letters(radius):
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


def test_k_constant_rel_ball():
    q = cyclic_homomorphism(REL_X)
    k0, cond0 = k_constant(REL_X, "C", q, Fraction(0))
    assert k0 == 0 and not cond0
    # C = 1: the strict 15-ball is {x^n : |n| <= 14}, so the slope-1
    # homomorphism peaks at 14
    k1, cond1 = k_constant(REL_X, "C", q, Fraction(1))
    assert k1 == 14 and not cond1
    k3, _ = k_constant(REL_X, "C", q, Fraction(1, 3))
    assert k3 == 4


def test_antisymmetry_gate():
    step = step_quasimorphism(REL_X)
    with pytest.raises(CertificateError):
        extend(REL_X, {"C": step})
    # a false declaration is caught by the exact spot-check
    liar = QuasiCocycle(
        "liar", REL_X.group, step.module, step._fn, antisymmetric=True,
        certified_defect=step.certified_defect,
    )
    with pytest.raises(CertificateError):
        extend(REL_X, {"C": liar})


def test_extension_input_validation():
    spec = fp_spec()
    qa = cyclic_homomorphism(spec, "A")
    with pytest.raises(DomainError):
        extend(spec, {})
    with pytest.raises(DomainError):
        extend(spec, {"Z": qa})
    with pytest.raises(MixedContextError):
        extend(spec, {"A": qa, "B": tree_edge_cocycle(spec, "B")})
    bare = QuasiCocycle("bare", spec.group, qa.module, qa._fn, antisymmetric=True)
    with pytest.raises(CertificateError):
        extend(spec, {"A": bare, "B": cyclic_homomorphism(spec, "B")})


def test_extend_general_symmetrizes():
    res = extend_general(REL_X, {"C": step_quasimorphism(REL_X)})
    assert res.iota(F2.parse("x^3")).scalar() == Fraction(1, 2)
    assert res.iota(F2.parse("x^-3")).scalar() == Fraction(-1, 2)
    assert res.certificate.value == 66  # 66 * carried defect bound 1


def test_brooks_input_on_free_factor():
    A, B = FreeGroup(["x", "y"]), FreeGroup(["t"])
    spec = FreeProductPairSpec(FreeProduct([A, B]), ["A", "B"])
    psi = embed_on_factor(spec, "A", brooks(A, A.parse("x y")))
    res = extend(spec, {"A": psi, "B": cyclic_homomorphism(spec, "B")})
    g = spec.group.syllable(0, A.parse("x y x y")) * spec.group.syllable(1, B.parse("t^2"))
    assert res.iota(g).scalar() == 4
    assert res.certificate.value == 66 * 3


def test_asnec_demo_rows_and_rerun():
    out = asnec_demo(n=1, k_max=5)
    for row in out["rows"]:
        assert row["antisymmetry_violation"] == str(row["k"])
    assert out["violation_grows"] or out["max_violation"] == "5"
    sym = out["symmetrized"]
    assert sym["certificate"]["value"] == "33"
    assert sym["defect_within_certificate"]
