"""Internal terms come out of the refiner unchanged.

Every closed, kernel-typed term forced against its kernel type must refine
to itself, in both the bidirectional and the outside-in refiner.
"""

import pytest
from conftest import term

from core.terms import App, Const, Decl, Lambda, Meta, Rel
from refine.refiner import Refiner, RefinerOptions
from refine.state import RefinerState

N = Const("N")

CORPUS = [
    # Constants and applications
    "O",
    "S O",
    "S (S (S O))",
    "plus 2 1",
    "plus O",
    "plus",
    "gt",
    "gt 2 0",
    "length N (Cons N O (Nil N))",
    "tau",
    "tau c1",
    "c3",
    "P2 c1 c2",
    "zeros O",
    # Binders
    "fun x : N => x",
    "fun x : N => S (plus x x)",
    "fun f : N -> N => f (f O)",
    "fun (A : Type) (x : A) => x",
    "fun (x : N) (h : P x) => tau x h",
    "fun _ : N => N",
    "forall n : N, gt n 0",
    "forall (A : Type) (n : N), Vect A n -> Vect A (S n)",
    "N -> N",
    "N -> Prop",
    "let x : N := S O in plus x x",
    "let f : N -> N := fun y : N => S y in f O",
    # Sorts
    "Prop",
    "Type",
    # Inductive types and constructors
    "List N",
    "Nil N",
    "Cons N O (Nil N)",
    "Cons (List N) (Nil N) (Nil (List N))",
    "Vect N 0",
    "Vnil N",
    "Vcons N 0 (Vnil N) O",
    "Vcons N (plus 0 1) (Vcons N 0 (Vnil N) O) (S O)",
    "Ex N (fun x : N => gt x 0)",
    "fun p : gt 2 0 => Ex_intro N (fun x : N => gt x 0) 2 p",
    "Stream",
    "SCons O (zeros O)",
    # Matches
    "match O in N return fun _ : N => N with | O => O | S (p : N) => p end",
    (
        "fun n : N => match n in N return fun _ : N => N with "
        "| O => S O | S (p : N) => plus p p end"
    ),
    (
        "fun n : N => match n in N return fun _ : N => Prop with "
        "| O => gt n 0 | S (p : N) => gt p n end"
    ),
    (
        "match Cons N O (Nil N) in List return fun _ : List N => N with "
        "| Nil => O | Cons (a : N) (tl : List N) => a end"
    ),
    (
        "match Vnil N in Vect return fun (k : N) (_ : Vect N k) => N with "
        "| Vnil => O | Vcons (k : N) (v : Vect N k) (a : N) => a end"
    ),
    (
        "fun (q : gt 1 0) (e : Ex N (fun x : N => gt x 0)) => "
        "match e in Ex return fun _ : Ex N (fun x : N => gt x 0) => gt 1 0 with "
        "| Ex_intro (x : N) (h : gt x 0) => q end"
    ),
    (
        "match zeros O in Stream return fun _ : Stream => N with "
        "| SCons (h : N) (t : Stream) => h end"
    ),
]


def refine_against_kernel_type(refiner: Refiner, st: RefinerState, ctx, t):
    ty = st.checker(refiner.env).infer(ctx, t)
    r = refiner.force(st, ctx, t, ty)
    return r.state.instantiate(r.term), r


@pytest.fixture(params=[False, True], ids=["bidirectional", "mono"])
def any_refiner(request, full_env) -> Refiner:
    return Refiner(full_env, options=RefinerOptions(mono=request.param))


class TestInternalTerms:
    """Refining an internal term is the identity."""

    @pytest.mark.parametrize("text", CORPUS)
    def test_closed_term(self, any_refiner, full_env, text):
        t = term(full_env, text)
        st = RefinerState()
        result, r = refine_against_kernel_type(any_refiner, st, (), t)
        assert result == t
        assert r.state.new_metas(st) == []

    def test_open_context(self, any_refiner, full_env):
        ctx = (Decl("y", N), Decl("H", App(Const("P"), (Rel(0),))))
        t = App(Const("tau"), (Rel(1), Rel(0)))
        result, _ = refine_against_kernel_type(any_refiner, RefinerState(), ctx, t)
        assert result == t


class TestOpenMetavariables:
    """Open metavariables of the input stay open and unchanged."""

    def test_closed_meta(self, any_refiner):
        st = RefinerState()
        m, st = st.fresh_meta((), N)
        t = App(Const("S"), (m,))
        result, r = refine_against_kernel_type(any_refiner, st, (), t)
        assert result == t
        assert r.state.is_open(m.index)

    def test_meta_with_local_substitution(self, any_refiner):
        st = RefinerState()
        m, st = st.fresh_meta((Decl("x", N),), N)
        body = App(Const("plus"), (Rel(0), Meta(m.index, (Rel(0),))))
        t = Lambda("x", N, body)
        result, r = refine_against_kernel_type(any_refiner, st, (), t)
        assert result == t
        assert r.state.is_open(m.index)
