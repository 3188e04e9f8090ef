"""Tests for refine/coercions.py - skeletons, declaration, composition and lookup."""

import pytest
from conftest import NAT, load, term

from core.errors import CoercionDeclarationError
from core.terms import App, Const, Lambda, Prod, Rel, Sort, type_sort
from refine import coercions
from refine.coercions import (
    FUNCLASS,
    SORT,
    WILDCARD,
    CoercionDB,
    Skeleton,
    coerced_argument,
    declare_coercion,
    make_entry,
    skeleton,
)
from refine.refiner import Refiner, RefinerOptions
from refine.state import RefinerState

CHAIN = """
axiom A : Type.
axiom B : Type.
axiom C : Type.
axiom a : A.
axiom ab : A -> B.
axiom ab2 : A -> B.
axiom bc : B -> C.
"""

STRUCTURES = """
axiom G : Type.
axiom carrier : G -> Type.
axiom g : G.
axiom F : Type.
axiom apply : F -> N -> N.
axiom f : F.
"""


@pytest.fixture(scope="module")
def chain_env():
    return load(CHAIN).env


@pytest.fixture(scope="module")
def structure_env():
    return load(NAT + STRUCTURES).env


class TestSkeleton:
    """Tests for skeleton() and Skeleton.matches()."""

    def test_constant_application(self, full_env):
        t = term(full_env, "Vect N (plus O 1)")
        assert skeleton(t) == Skeleton(
            "Vect", (Skeleton("N"), Skeleton("plus", (Skeleton("O"), Skeleton("1"))))
        )

    def test_variables_become_wildcards(self):
        assert skeleton(App(Const("List"), (Rel(0),))) == Skeleton("List", (WILDCARD,))

    def test_sorts_and_products(self):
        assert skeleton(type_sort()) == SORT
        assert skeleton(Sort(None)) == SORT
        assert skeleton(Prod("x", Const("N"), Const("N"))) == FUNCLASS

    def test_lambda_is_wildcard(self):
        assert skeleton(Lambda("x", Const("N"), Rel(0))) == WILDCARD

    def test_wildcard_matches_everything(self):
        assert WILDCARD.matches(Skeleton("Vect", (Skeleton("N"), WILDCARD)))
        assert Skeleton("List", (WILDCARD,)).matches(Skeleton("List", (Skeleton("N"),)))

    def test_heads_and_arity_must_agree(self):
        assert not Skeleton("List", (WILDCARD,)).matches(Skeleton("Vect", (WILDCARD,)))
        assert not Skeleton("Vect", (WILDCARD,)).matches(Skeleton("Vect", (WILDCARD, WILDCARD)))

    def test_str(self):
        assert str(Skeleton("Vect", (WILDCARD, Skeleton("plus", (WILDCARD, Skeleton("1")))))) == (
            "Vect _ (plus _ 1)"
        )


class TestMakeEntry:
    """Tests for make_entry()."""

    def test_full_arity(self, full_env):
        entry = make_entry(full_env, "v_to_nel", 3)
        assert entry.n == 4
        assert entry.source == Skeleton("Vect", (WILDCARD, WILDCARD))
        assert entry.target == Skeleton("Ex", (Skeleton("List", (WILDCARD,)), WILDCARD))

    def test_explicit_source(self, full_env):
        source = Skeleton("Vect", (WILDCARD, Skeleton("plus", (WILDCARD, Skeleton("1")))))
        entry = make_entry(full_env, "nev_to_nel", 3, priority=1, source=source)
        assert entry.source == source
        assert entry.priority == 1

    def test_partial_arity_targets_functions(self, structure_env):
        entry = make_entry(structure_env, "apply", 1, arity=1)
        assert entry.target == FUNCLASS

    def test_sort_target(self, structure_env):
        assert make_entry(structure_env, "carrier", 1).target == SORT

    def test_unknown_constant(self, full_env):
        with pytest.raises(CoercionDeclarationError, match="unknown constant"):
            make_entry(full_env, "nope", 1)

    def test_k_out_of_range(self, full_env):
        with pytest.raises(CoercionDeclarationError):
            make_entry(full_env, "v_to_nel", 5)
        with pytest.raises(CoercionDeclarationError):
            make_entry(full_env, "v_to_nel", 0)

    def test_arity_below_k(self, full_env):
        with pytest.raises(CoercionDeclarationError, match="arity"):
            make_entry(full_env, "v_to_nel", 3, arity=2)

    def test_describe(self, full_env):
        assert make_entry(full_env, "v_to_nel", 3).describe() == (
            "v_to_nel (k=3, n=4) : Vect _ _ >-> Ex (List _) _"
        )


class TestDatabase:
    """Tests for CoercionDB ordering and declaration."""

    def test_priority_then_declaration_order(self, full_env):
        db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
        db, env = declare_coercion(db, env, "nev_to_nel", 3, priority=1)
        assert [e.const for e in db.ordered()] == ["nev_to_nel", "v_to_nel"]

    def test_ties_keep_declaration_order(self, full_env):
        db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
        db, env = declare_coercion(db, env, "nev_to_nel", 3)
        assert [e.const for e in db.ordered()] == ["v_to_nel", "nev_to_nel"]

    def test_redeclaration_is_ignored(self, full_env):
        db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
        again, env2 = declare_coercion(db, env, "v_to_nel", 3)
        assert again is db
        assert env2 is env
        assert ("v_to_nel", 3) in db

    def test_overlap_is_warned(self, chain_env, monkeypatch):
        warnings = []
        monkeypatch.setattr(coercions.logger, "warning", warnings.append)
        db, env = declare_coercion(CoercionDB(), chain_env, "ab", 1)
        declare_coercion(db, env, "ab2", 1)
        assert warnings == ["overlapping coercions: ab and ab2"]

    def test_overlap_warning_can_be_disabled(self, chain_env, monkeypatch, tmp_path):
        (tmp_path / "refiner.jsonc").write_text('{"coercions": {"warn_overlap": false}}')
        warnings = []
        monkeypatch.setattr(coercions.logger, "warning", warnings.append)
        db, env = declare_coercion(CoercionDB(), chain_env, "ab", 1)
        declare_coercion(db, env, "ab2", 1)
        assert warnings == []


class TestComposition:
    """Composites are added as definitions when a chain lines up."""

    def test_composite_is_defined(self, chain_env):
        db, env = declare_coercion(CoercionDB(), chain_env, "bc", 1)
        db, env = declare_coercion(db, env, "ab", 1)
        assert "bc__o__ab" in env
        composite = next(e for e in db.entries if e.const == "bc__o__ab")
        assert composite.source == Skeleton("A")
        assert composite.target == Skeleton("C")
        assert env.lookup_type("bc__o__ab") == Prod("_", Const("A"), Const("C"))

    def test_declaration_order_does_not_matter(self, chain_env):
        db, env = declare_coercion(CoercionDB(), chain_env, "ab", 1)
        db, env = declare_coercion(db, env, "bc", 1)
        assert "bc__o__ab" in env

    def test_composite_is_inserted_in_one_step(self, chain_env):
        db, env = declare_coercion(CoercionDB(), chain_env, "bc", 1)
        db, env = declare_coercion(db, env, "ab", 1)
        refiner = Refiner(env, db, RefinerOptions())
        r = refiner.force(RefinerState(), (), Const("a"), Const("C"))
        assert r.state.instantiate(r.term) == App(Const("bc__o__ab"), (Const("a"),))

    def test_coerced_argument(self, full_env):
        entry = make_entry(full_env, "v_to_nel", 3)
        t = term(full_env, "v_to_nel N 0 (Vnil N)")
        assert coerced_argument(t, entry) == term(full_env, "Vnil N")
        assert coerced_argument(term(full_env, "Vnil N"), entry) is None


class TestLookup:
    """Coercions to sorts and to function types."""

    def test_candidate_carries_fresh_metas(self, full_env):
        db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
        st = RefinerState()
        (candidate,) = db.lookup(
            env,
            st,
            (),
            term(env, "Vect N 0"),
            term(env, "Ex (List N) (fun l : List N => gt (length N l) 0)"),
        )
        assert candidate.entry.const == "v_to_nel"
        assert len(candidate.state.new_metas(st)) == 4
        assert candidate.slot == candidate.term.args[2]

    def test_no_candidate_for_other_target(self, full_env):
        db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
        assert db.lookup(env, RefinerState(), (), term(env, "Vect N 0"), term(env, "N")) == []

    def test_sort_coercion(self, structure_env):
        db, env = declare_coercion(CoercionDB(), structure_env, "carrier", 1)
        refiner = Refiner(env, db, RefinerOptions())
        ty, sort, st = refiner.enforce_type(RefinerState(), (), Const("g"))
        assert st.instantiate(ty) == App(Const("carrier"), (Const("g"),))
        assert sort == type_sort()

    def test_function_coercion(self, structure_env):
        db, env = declare_coercion(CoercionDB(), structure_env, "apply", 1, arity=1)
        refiner = Refiner(env, db, RefinerOptions())
        r = refiner.infer(RefinerState(), (), term(env, "f O"))
        assert r.state.instantiate(r.term) == term(env, "apply f O")
        assert r.state.instantiate(r.ty) == Const("N")
