from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qcext import FreeGroup, IndexedLp, TrivialReals, delta, real_value, zero
from qcext.coeffs import project_to_submodule, sum_vectors
from qcext.errors import MixedContextError


F2 = FreeGroup(["x", "y"])
LP = IndexedLp(F2, p=2, tags=("e",))


def lp_vectors():
    elems = st.sampled_from([F2.identity(), F2.gen("x"), F2.parse("x y")])
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=6)
    entry = st.tuples(elems, coeff)
    return st.lists(entry, max_size=4).map(
        lambda entries: sum_vectors(
            [delta(LP, (g, "e"), c) for g, c in entries], LP
        )
    )


def test_trivial_reals_scalar():
    v = real_value(Fraction(3, 2))
    assert v.scalar() == Fraction(3, 2)
    assert v.norm_pth_power() == Fraction(3, 2)
    assert (v - v).is_zero()


def test_trivial_action_is_trivial():
    v = real_value(Fraction(5))
    assert v.act(F2.parse("x y")) == v


def test_mixed_module_arithmetic_rejected():
    with pytest.raises(MixedContextError):
        real_value(1) + delta(LP, (F2.identity(), "e"))


def test_delta_and_norm():
    v = delta(LP, (F2.gen("x"), "e"), Fraction(3))
    assert v.norm_pth_power() == Fraction(9)
    assert v.coefficient((F2.gen("x"), "e")) == Fraction(3)
    assert v.coefficient((F2.gen("y"), "e")) == Fraction(0)


def test_action_moves_support():
    v = delta(LP, (F2.identity(), "e"))
    moved = v.act(F2.gen("x"))
    assert moved.coefficient((F2.gen("x"), "e")) == Fraction(1)
    assert moved.coefficient((F2.identity(), "e")) == Fraction(0)


@given(lp_vectors())
def test_action_is_isometric(v):
    assert v.act(F2.parse("y x^-1")).norm_pth_power() == v.norm_pth_power()


@given(lp_vectors(), lp_vectors())
def test_action_additive(a, b):
    g = F2.parse("x^2 y")
    assert (a + b).act(g) == a.act(g) + b.act(g)


@given(lp_vectors())
def test_neg_and_scale(v):
    assert -v == v.scale(-1)
    assert v.scale(Fraction(1, 2)).scale(2) == v


def test_norm_leq_exact():
    v = delta(LP, (F2.identity(), "e"), Fraction(1)) + delta(
        LP, (F2.gen("x"), "e"), Fraction(1)
    )
    # |v|_2 = sqrt(2): compare p-th powers, no floats
    assert v.norm_leq_exact(Fraction(3, 2))
    assert not v.norm_leq_exact(Fraction(7, 5))


def test_zero_and_projection():
    z = zero(LP)
    assert z.is_zero()
    v = delta(LP, (F2.gen("x"), "e")) + delta(LP, (F2.gen("y"), "e"))
    kept = project_to_submodule(v, lambda idx: idx[0] == F2.gen("x"))
    assert kept.support() == [(F2.gen("x"), "e")]


def test_invalid_index_rejected():
    with pytest.raises(Exception):
        delta(LP, (F2.identity(), "nope"))
