"""Tests for cli/parser.py and cli/scope.py."""

import pytest
from conftest import term

from cli.parser import (
    CheckCommand,
    CoercionCommand,
    ConstraintCommand,
    MetaCommand,
    ObjectCommand,
    UniverseCommand,
    parse,
    parse_term,
)
from cli.report import format_object
from cli.scope import Scope, resolve_object
from core.errors import ParseError, ScopeError
from core.objects import Axiom, Definition, InductiveBlock, RecBlock
from core.terms import (
    PROP,
    App,
    Const,
    Lambda,
    Match,
    Meta,
    Placeholder,
    PlaceholderVec,
    Prod,
    Rel,
    Sort,
    type_sort,
)
from core.types import CommandKind
from refine.coercions import WILDCARD, Skeleton

N = Const("N")


class TestTerms:
    """Tests for parse_term()."""

    def test_application_is_flat(self):
        assert parse_term("f a b") == App(Const("f"), (Const("a"), Const("b")))

    def test_arrow_is_right_associative(self):
        assert parse_term("N -> N -> Prop") == Prod("_", N, Prod("_", N, PROP))

    def test_binder_groups(self):
        t = parse_term("fun (A : Type) (x y : A) => x")
        assert t == Lambda(
            "A", type_sort(), Lambda("x", Const("A"), Lambda("y", Const("A"), Const("x")))
        )

    def test_binder_without_type(self):
        assert parse_term("fun x => x") == Lambda("x", Placeholder(), Const("x"))

    def test_sorts(self):
        assert parse_term("Prop") == PROP
        assert parse_term("Type") == type_sort()
        assert parse_term("Type(u+1)") == Sort("u+1")

    def test_placeholders(self):
        t = parse_term("tau ... ?")
        assert t == App(Const("tau"), (PlaceholderVec(), Placeholder()))

    def test_metavariable_with_local_substitution(self):
        assert parse_term("?4[x; S y]") == Meta(
            4, (Const("x"), App(Const("S"), (Const("y"),)))
        )

    def test_let_without_type(self):
        t = parse_term("let x := O in x")
        assert t.ty == Placeholder()

    def test_match_defaults(self):
        t = parse_term("match n with | O => O | S p => p end")
        assert isinstance(t, Match)
        assert t.ind == ""
        assert t.return_ty == Placeholder()
        assert [b.constructor for b in t.branches] == ["O", "S"]
        assert t.branches[1].binders[0].ty == Placeholder()

    def test_typed_pattern(self):
        t = parse_term("match v in Vect with | Vcons (n : N) (w : Vect A n) (a : A) => a end")
        assert [b.name for b in t.branches[0].binders] == ["n", "w", "a"]
        assert t.branches[0].binders[0].ty == N

    def test_comments_are_ignored(self):
        assert parse_term("S (* successor *) O") == App(Const("S"), (Const("O"),))


class TestSpans:
    def test_argument_span(self):
        t = parse_term("S Prop")
        assert (t.span.line, t.span.column) == (1, 1)
        assert (t.args[0].span.line, t.args[0].span.column) == (1, 3)

    def test_multiline(self):
        t = parse_term("plus\n  O\n  n")
        assert t.args[1].span.line == 3
        assert str(t.args[1].span) == "3:3"


class TestCommands:
    """Tests for parse()."""

    def test_axiom(self):
        (command,) = parse("axiom gt : N -> N -> Prop.")
        assert command == ObjectCommand(
            CommandKind.AXIOM, 1, Axiom("gt", Prod("_", N, Prod("_", N, PROP)))
        )

    def test_definition_parameters_become_binders(self):
        (command,) = parse("definition twice (f : N -> N) (n : N) : N := f (f n).")
        obj = command.obj
        assert isinstance(obj, Definition)
        assert isinstance(obj.ty, Prod) and isinstance(obj.body, Lambda)
        assert obj.ty.body.body == N

    def test_definition_without_type(self):
        (command,) = parse("definition three := S 2.")
        assert command.obj.ty == Placeholder()

    def test_inductive_block(self):
        (command,) = parse(
            "inductive Even : N -> Prop := | ev0 : Even O "
            "with Odd : N -> Prop := | od1 : Odd (S O)."
        )
        block = command.obj
        assert isinstance(block, InductiveBlock)
        assert block.names == ("Even", "Odd")
        assert [k.name for t in block.types for k in t.constructors] == ["ev0", "od1"]
        assert not block.coinductive

    def test_coinductive(self):
        (command,) = parse("coinductive Stream : Type := | SCons : N -> Stream -> Stream.")
        assert command.obj.coinductive

    def test_rec_on_names_the_argument(self):
        (command,) = parse(
            "let rec plus (n : N) (m : N) on m : N :=\n"
            "  match m with | O => n | S p => S (plus n p) end."
        )
        block = command.obj
        assert isinstance(block, RecBlock)
        assert block.functions[0].rec_arg == 1
        assert not block.corecursive

    def test_rec_without_on(self):
        (command,) = parse("let corec ones (u : N) : Stream := SCons (S O) (ones u).")
        assert command.obj.corecursive
        assert command.obj.functions[0].rec_arg is None

    def test_coercion(self):
        (command,) = parse("coercion nev_to_nel 3 priority 1 source Vect _ (plus _ 1).")
        assert command == CoercionCommand(
            CommandKind.COERCION,
            1,
            "nev_to_nel",
            3,
            1,
            Skeleton("Vect", (WILDCARD, Skeleton("plus", (WILDCARD, Skeleton("1"))))),
        )

    def test_coercion_arity(self):
        (command,) = parse("coercion apply 1 arity 1.")
        assert command.arity == 1
        assert command.source is None

    def test_check(self):
        (command,) = parse("check S ? : N.")
        assert command == CheckCommand(
            CommandKind.CHECK, 1, App(Const("S"), (Placeholder(),)), N
        )

    def test_universes(self):
        universe, constraint = parse("universe u.\nconstraint u < v+1.")
        assert universe == UniverseCommand(CommandKind.UNIVERSE, 1, "u")
        assert constraint == ConstraintCommand(CommandKind.CONSTRAINT, 2, "u", "v+1", strict=True)

    def test_meta(self):
        (command,) = parse("meta ?1 : N.")
        assert command == MetaCommand(CommandKind.META, 1, 1, N)

    def test_lines(self):
        commands = parse("axiom A : Type.\n\naxiom a : A.")
        assert [c.line for c in commands] == [1, 3]


class TestErrors:
    def test_unexpected_token(self):
        with pytest.raises(ParseError) as exc:
            parse("axiom x : .")
        assert exc.value.line == 1
        assert exc.value.column == 11

    def test_unexpected_end(self):
        with pytest.raises(ParseError, match="unexpected end of input"):
            parse("axiom x : N")

    def test_rec_on_unknown_argument(self):
        with pytest.raises(ParseError, match="no argument named k"):
            parse("let rec f (n : N) on k : N := n.")

    def test_mutual_parameters_must_agree(self):
        with pytest.raises(ParseError, match="same parameters"):
            parse("inductive A (X : Type) : Type := with B : Type := .")


class TestScope:
    """Name resolution."""

    def test_bound_names_become_indices(self, nat_env):
        t = Scope(nat_env).resolve(parse_term("fun x : N => fun y : N => plus x y"))
        assert t == Lambda("x", N, Lambda("y", N, App(Const("plus"), (Rel(1), Rel(0)))))

    def test_innermost_binding_wins(self, nat_env):
        t = Scope(nat_env).resolve(parse_term("fun x : N => fun x : N => x"))
        assert t.body.body == Rel(0)

    def test_free_names(self, nat_env):
        t = Scope(nat_env).resolve(parse_term("S n"), ["n"])
        assert t == App(Const("S"), (Rel(0),))

    def test_unknown_identifier(self, nat_env):
        with pytest.raises(ScopeError, match="unknown identifier 'nope'"):
            Scope(nat_env).resolve(parse_term("S nope"))

    def test_match_inductive_from_branches(self, nat_env):
        t = Scope(nat_env).resolve(parse_term("match O with | O => O | S p => p end"))
        assert t.ind == "N"
        assert t.branches[1].body == Rel(0)

    def test_empty_match_needs_inductive(self, nat_env):
        with pytest.raises(ScopeError, match="needs 'in"):
            Scope(nat_env).resolve(parse_term("match O with end"))

    def test_block_members_are_in_scope(self, nat_env):
        (command,) = parse("inductive T : Type := | leaf : T | node : T -> T -> T.")
        block = resolve_object(nat_env, command.obj)
        assert block.types[0].constructors[1].ty == Prod(
            "_", Const("T"), Prod("_", Const("T"), Const("T"))
        )


class TestFormatObject:
    """Printed objects parse back to themselves."""

    @pytest.mark.parametrize(
        "source",
        [
            "axiom gt2 : forall n : N, gt n 2.",
            "definition double : N -> N := fun n : N => plus n n.",
            "inductive Tree (A : Type) : Type := | leaf : Tree A | node : A -> Tree A -> Tree A.",
            "let rec pred (n : N) on n : N := match n in N return fun _ : N => N "
            "with | O => O | S (p : N) => p end.",
        ],
    )
    def test_round_trip(self, nat_env, source):
        (command,) = parse(source)
        obj = resolve_object(nat_env, command.obj)
        printed = "\n".join(format_object(obj))
        (again,) = parse(printed)
        assert resolve_object(nat_env, again.obj) == obj

    def test_definition_layout(self, nat_env):
        (command,) = parse("definition double : N -> N := fun n : N => plus n n.")
        obj = resolve_object(nat_env, command.obj)
        assert format_object(obj) == ["definition double : N -> N := fun n : N => plus n n."]

    def test_binder_groups_match_nested_binders(self, nat_env):
        grouped = term(nat_env, "fun (n : N) (m : N) => plus (S n) m")
        assert grouped == term(nat_env, "fun n : N => fun m : N => plus (S n) m")
        assert grouped.body.body.args[0] == App(Const("S"), (Rel(1),))
