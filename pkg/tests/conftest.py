"""Pytest configuration and shared fixtures."""

import sys
from collections.abc import Sequence
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from cli.driver import Session
from cli.parser import parse, parse_term
from cli.report import Report
from cli.scope import Scope
from core.terms import Context, Decl, Term
from kernel.environment import GlobalEnv
from lib.config import clear_cache
from refine.refiner import Refiner, RefinerOptions
from refine.state import RefinerState

NAT = """
inductive N : Type :=
  | O : N
  | S : N -> N.
definition 0 : N := O.
definition 1 : N := S O.
definition 2 : N := S 1.
let rec plus (n : N) (m : N) on m : N :=
  match m with
  | O => n
  | S p => S (plus n p)
  end.
axiom gt : N -> N -> Prop.
"""

LIST = """
inductive List (A : Type) : Type :=
  | Nil : List A
  | Cons : A -> List A -> List A.
let rec length (A : Type) (l : List A) on l : N :=
  match l with
  | Nil => O
  | Cons a tl => S (length A tl)
  end.
"""

VECT = """
inductive Vect (A : Type) : N -> Type :=
  | Vnil : Vect A 0
  | Vcons : forall n : N, Vect A n -> A -> Vect A (plus n 1).
"""

EX = """
inductive Ex (A : Type) (P : A -> Prop) : Prop :=
  | Ex_intro : forall x : A, P x -> Ex A P.
"""

# Non-empty lists, the target of the vector coercions
NEL = """
axiom v_to_nel : forall (A : Type) (n : N), Vect A n -> gt n 0 ->
  Ex (List A) (fun l : List A => gt (length A l) 0).
axiom nev_to_nel : forall (A : Type) (m : N), Vect A (plus m 1) ->
  Ex (List A) (fun l : List A => gt (length A l) 0).
"""

# Terms indexed by the set of names they may use
BINDERS = """
inductive Name : Type :=
  | x : Name
  | y : Name.
inductive VSet : Type :=
  | empty : VSet
  | add : Name -> VSet -> VSet.
inductive True : Prop :=
  | I : True.
inductive False : Prop := .
let rec mem (n : Name) (s : VSet) on s : Prop :=
  match s with
  | empty => False
  | add m rest =>
    match n in Name return fun _ : Name => Prop with
    | x => match m in Name return fun _ : Name => Prop with
           | x => True
           | y => mem n rest
           end
    | y => match m in Name return fun _ : Name => Prop with
           | x => mem n rest
           | y => True
           end
    end
  end.
inductive Term : VSet -> Type :=
  | Var : forall (s : VSet) (n : Name), mem n s -> Term s
  | Lambda : forall (s : VSet) (n : Name), Term (add n s) -> Term s.
"""

TAU = """
axiom P : N -> Prop.
axiom Q : N -> Prop.
axiom tau : forall x : N, P x -> Q x.
"""

STREAM = """
coinductive Stream : Type :=
  | SCons : N -> Stream -> Stream.
let corec zeros (u : N) : Stream := SCons O (zeros u).
"""

DEPENDENT = """
axiom c1 : N.
axiom P1 : N -> Prop.
axiom c2 : P1 c1.
axiom P2 : forall x : N, P1 x -> Prop.
axiom c3 : P2 c1 c2.
"""


def load(source: str, **options) -> Session:
    """Run a script that must succeed and return the session."""
    session = Session(RefinerOptions(**options))
    report = Report()
    for command in parse(source):
        session.execute(command, report, allow_obligations=False)
    return session


def term(env: GlobalEnv, text: str, names: Sequence[str] = ()) -> Term:
    """Parse and resolve a term with free variables ``names`` (outermost first)."""
    return Scope(env).resolve(parse_term(text), names)


def context(env: GlobalEnv, *entries: tuple[str, str]) -> Context:
    """Build a context from (name, type text) pairs."""
    ctx: list[Decl] = []
    for name, ty in entries:
        ctx.append(Decl(name, term(env, ty, [d.name for d in ctx])))
    return tuple(ctx)


@pytest.fixture(autouse=True)
def fresh_config(tmp_path, monkeypatch):
    """Run every test with the default configuration."""
    monkeypatch.delenv("REFINER_CONFIG", raising=False)
    monkeypatch.chdir(tmp_path)
    clear_cache()
    yield
    clear_cache()


@pytest.fixture(scope="session")
def nat_env() -> GlobalEnv:
    return load(NAT).env


@pytest.fixture(scope="session")
def full_env() -> GlobalEnv:
    """Naturals, lists, vectors, existentials, the vector coercion axioms and τ."""
    return load(NAT + LIST + VECT + EX + NEL + TAU + STREAM + DEPENDENT).env


@pytest.fixture(scope="session")
def binder_env() -> GlobalEnv:
    return load(BINDERS).env


@pytest.fixture
def refiner(full_env) -> Refiner:
    return Refiner(full_env, options=RefinerOptions())


@pytest.fixture
def st() -> RefinerState:
    return RefinerState()
