"""Tests for unification."""

import pytest
from conftest import context, term

from core.errors import UnificationError
from core.terms import (
    PROP,
    App,
    Const,
    Decl,
    Def,
    Lambda,
    Meta,
    Prod,
    Rel,
    type_sort,
)
from core.types import ConvMode
from kernel.conversion import Converter
from refine.state import RefinerState
from refine.unify import Unifier, delift

N = Const("N")
O = Const("O")
S = Const("S")


def succ(t):
    return App(S, (t,))


@pytest.fixture
def unifier(full_env) -> Unifier:
    return Unifier(full_env)


class TestInstantiation:
    """A bare open metavariable against a term."""

    def test_assigns_closed_term(self, unifier, st):
        m, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), m, succ(O))
        assert result.instantiate(m) == succ(O)
        assert not result.is_open(m.index)

    def test_symmetric(self, unifier, st):
        m, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), succ(O), m)
        assert result.instantiate(m) == succ(O)

    def test_inverts_local_substitution(self, unifier, st, full_env):
        ctx = context(full_env, ("n", "N"))
        m, st = st.fresh_meta(ctx, N)
        result = unifier.unify(st, ctx, m, succ(Rel(0)))
        assert result.subst[m.index].body == succ(Rel(0))

    def test_variable_outside_meta_context(self, unifier, st, full_env):
        ctx = context(full_env, ("n", "N"))
        m, st = st.fresh_meta((), N)
        with pytest.raises(UnificationError):
            unifier.unify(st, ctx, m, Rel(0))

    def test_local_definitions_are_unfolded(self, unifier, st):
        ctx = (Def("x", O, N),)
        m, st = st.fresh_meta((), N)
        result = unifier.unify(st, ctx, m, Rel(0))
        assert result.instantiate(m) == O

    def test_occurs_check(self, unifier, st):
        m, st = st.fresh_meta((), N)
        with pytest.raises(UnificationError):
            unifier.unify(st, (), m, succ(m))

    def test_assignment_is_typed(self, unifier, st):
        m, st = st.fresh_meta((), N)
        with pytest.raises(UnificationError):
            unifier.unify(st, (), m, PROP)

    def test_type_of_meta_is_refined(self, unifier, st):
        ty, st = st.fresh_meta((), type_sort())
        m, st = st.fresh_meta((), ty)
        result = unifier.unify(st, (), m, O)
        assert result.instantiate(ty) == N

    def test_result_refines_input(self, unifier, st):
        m, st = st.fresh_meta((), N)
        other, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), m, O)
        assert result.refines(st)
        assert result.is_open(other.index)


class TestApplied:
    """Metavariables applied to arguments."""

    def test_miller_pattern(self, unifier, st, full_env):
        ctx = context(full_env, ("n", "N"))
        f, st = st.fresh_meta((), term(full_env, "N -> N"))
        result = unifier.unify(st, ctx, App(f, (Rel(0),)), succ(Rel(0)))
        assert result.instantiate(f) == Lambda("x", N, succ(Rel(0)))

    def test_pattern_with_repeated_variable_falls_back(self, unifier, st, full_env):
        ctx = context(full_env, ("n", "N"))
        f, st = st.fresh_meta((), term(full_env, "N -> N -> N"))
        lhs = App(f, (Rel(0), Rel(0)))
        result = unifier.unify(st, ctx, lhs, term(full_env, "plus n n", ["n"]))
        assert result.instantiate(f) == Const("plus")

    def test_peel_arguments(self, unifier, st, full_env):
        p, st = st.fresh_meta((), term(full_env, "N -> Prop"))
        result = unifier.unify(st, (), App(p, (Const("0"),)), term(full_env, "gt 2 0"))
        assert result.instantiate(p) == term(full_env, "gt 2")

    def test_abstract_arguments(self, unifier, st, full_env):
        p, st = st.fresh_meta((), term(full_env, "N -> Prop"))
        result = unifier.unify(st, (), App(p, (Const("2"),)), term(full_env, "gt 2 0"))
        assert result.instantiate(p) == term(full_env, "fun x : N => gt x 0")

    def test_constant_motive(self, unifier, st, full_env):
        r, st = st.fresh_meta((), term(full_env, "N -> Type"))
        result = unifier.unify(st, (), App(r, (O,)), N)
        assert result.instantiate(r) == term(full_env, "fun x : N => N")


class TestFlexFlex:
    def test_younger_meta_is_assigned(self, unifier, st):
        m1, st = st.fresh_meta((), N)
        m2, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), m1, m2)
        assert result.instantiate(m2) == m1
        assert result.is_open(m1.index)

    def test_either_side_keeps_the_older(self, unifier, st):
        m1, st = st.fresh_meta((), N)
        m2, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), m2, m1)
        assert result.instantiate(m2) == m1
        assert result.is_open(m1.index)

    def test_dependent_meta_goes_first(self, unifier, st):
        ty, st = st.fresh_meta((), type_sort())
        m, st = st.fresh_meta((), ty)
        order = unifier._flex_flex_order(st, ty, m)
        assert order[0] == (m, ty)

    def test_same_meta_unifies_pointwise(self, unifier, st, full_env):
        ctx = context(full_env, ("n", "N"))
        m, st = st.fresh_meta(ctx, N)
        other, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), Meta(m.index, (O,)), Meta(m.index, (other,)))
        assert result.instantiate(other) == O


class TestSortMetas:
    """Sort-flagged metavariables."""

    def test_below_top_without_assignment(self, unifier, st):
        s, st = st.fresh_sort_meta()
        result = unifier.unify(st, (), s, type_sort("top"))
        assert result.is_open(s.index)

    def test_assigned_a_sort(self, unifier, st):
        s, st = st.fresh_sort_meta()
        result = unifier.unify(st, (), s, PROP)
        assert result.instantiate(s) == PROP

    def test_rejects_non_sort(self, unifier, st):
        s, st = st.fresh_sort_meta()
        with pytest.raises(UnificationError):
            unifier.unify(st, (), s, N)

    def test_declared_in_context_occurs_closed(self, st, full_env):
        ctx = context(full_env, ("n", "N"))
        s, st = st.fresh_sort_meta(ctx)
        assert s.local_subst == ()
        assert st.problem[s.index].context == ctx

    def test_younger_sort_meta_survives(self, unifier, st, full_env):
        outer, st = st.fresh_sort_meta()
        inner, st = st.fresh_sort_meta(context(full_env, ("n", "N")))
        result = unifier.unify(st, (), inner, outer)
        assert result.instantiate(outer) == inner
        assert result.is_open(inner.index)


class TestRigid:
    """Structural comparison and reduction."""

    def test_cumulative_sorts(self, unifier, st):
        assert unifier.try_unify(st, (), PROP, type_sort()) is st
        assert unifier.try_unify(st, (), PROP, type_sort(), ConvMode.EXACT) is None

    def test_product_domains_are_exact(self, unifier, st):
        a = Prod("x", PROP, N)
        b = Prod("x", type_sort(), N)
        assert unifier.try_unify(st, (), a, b) is None

    def test_arguments_are_unified(self, unifier, st, full_env):
        m, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), App(Const("gt"), (m, O)), term(full_env, "gt 2 O"))
        assert result.instantiate(m) == Const("2")

    def test_distinct_heads(self, unifier, st):
        assert unifier.try_unify(st, (), O, succ(O)) is None

    def test_reduction_fallback(self, unifier, st, full_env):
        m, st = st.fresh_meta((), N)
        result = unifier.unify(st, (), term(full_env, "plus O 1"), succ(m))
        assert Converter(full_env, result.problem, result.subst).convert(
            (), result.instantiate(m), O
        )

    def test_error_carries_both_sides(self, unifier, st):
        with pytest.raises(UnificationError) as exc:
            unifier.unify(st, (), O, succ(O))
        assert exc.value.inferred == O
        assert exc.value.expected == succ(O)
        assert exc.value.rule == "unify"


class TestDelift:
    def test_projection_is_preferred(self, full_env):
        st = RefinerState()
        ctx = (Decl("n", N),)
        m, st = st.fresh_meta(ctx, N)
        assert delift(st, ctx, m, succ(Rel(0))) == succ(Rel(0))

    def test_subterm_matching_substitution_entry(self, full_env):
        st = RefinerState()
        m, st = st.fresh_meta((Decl("x", N),), N)
        occurrence = Meta(m.index, (succ(O),))
        assert delift(st, (), occurrence, succ(succ(O))) == succ(Rel(0))

    def test_impossible(self, full_env):
        st = RefinerState()
        m, st = st.fresh_meta((), N)
        assert delift(st, (Decl("n", N),), m, Rel(0)) is None
