"""Randomized checks: erase parts of well-typed terms and refine them back.

Whenever refinement succeeds, in either refiner and with the vector coercions
declared, the output state must refine the input one and be well formed, and
the result must be well typed and admissible.
"""

import random

import pytest
from conftest import term
from test_completeness import CORPUS

from core.errors import RefinerToolError
from core.terms import (
    App,
    Branch,
    Binder,
    LetIn,
    Lambda,
    Match,
    Placeholder,
    PlaceholderVec,
    Prod,
    Term,
)
from kernel.environment import GlobalEnv
from refine.admissible import is_admissible
from refine.coercions import WILDCARD, CoercionDB, Skeleton, declare_coercion
from refine.refiner import Refiner, RefinerOptions
from refine.state import RefinerState

TRIALS_PER_TERM = 200
ERASE = 0.2
VECTOR = 0.15

NEL = "Ex (List N) (fun l : List N => gt (length N l) 0)"

# Terms that only meet NEL through a coercion
COERCED = [
    "Vcons N 0 (Vnil N) 2",
    "Vcons N (plus 0 1) (Vcons N 0 (Vnil N) O) (S O)",
]


def erase(rng: random.Random, t: Term, top: bool = True) -> Term:
    """Replace random subterms by ``?`` and random argument runs by ``...``."""
    if not top and rng.random() < ERASE:
        return Placeholder()
    match t:
        case App(head=head, args=args):
            new_args = [erase(rng, a, False) for a in args]
            if rng.random() < VECTOR:
                start = rng.randrange(len(new_args) + 1)
                stop = rng.randrange(start, len(new_args) + 1)
                new_args[start:stop] = [PlaceholderVec()]
            return App(erase(rng, head, False), tuple(new_args))
        case Lambda(name=name, ty=ty, body=body):
            return Lambda(name, erase(rng, ty, False), erase(rng, body, False))
        case Prod(name=name, ty=ty, body=body):
            return Prod(name, erase(rng, ty, False), erase(rng, body, False))
        case LetIn(name=name, ty=ty, value=value, body=body):
            return LetIn(
                name, erase(rng, ty, False), erase(rng, value, False), erase(rng, body, False)
            )
        case Match(scrutinee=scrutinee, ind=ind, return_ty=return_ty, branches=branches):
            return Match(
                erase(rng, scrutinee, False),
                ind,
                erase(rng, return_ty, False),
                tuple(
                    Branch(
                        b.constructor,
                        tuple(Binder(x.name, erase(rng, x.ty, False)) for x in b.binders),
                        erase(rng, b.body, False),
                    )
                    for b in branches
                ),
            )
    return t


def attempt(env, db: CoercionDB, options: RefinerOptions, t: Term, expected: Term):
    # The step budget is per refiner
    try:
        return Refiner(env, db, options).force(RefinerState(), (), t, expected)
    except RefinerToolError:
        return None


@pytest.fixture(scope="module")
def coerced(full_env) -> tuple[CoercionDB, GlobalEnv]:
    """The test environment with both vector coercions declared."""
    source = Skeleton("Vect", (WILDCARD, Skeleton("plus", (WILDCARD, Skeleton("1")))))
    db, env = declare_coercion(CoercionDB(), full_env, "v_to_nel", 3)
    return declare_coercion(db, env, "nev_to_nel", 3, priority=1, source=source)


def assert_sound(env, db: CoercionDB, erased: Term, expected: Term, r) -> None:
    start = RefinerState()
    assert r.state.refines(start), repr(erased)
    assert r.state.is_valid(), repr(erased)
    r.state.check(env)
    checker = r.state.checker(env)
    assert checker.convert((), checker.infer((), r.term), expected), repr(erased)
    assert is_admissible(erased, r.term, r.state.subst, db), repr(erased)


@pytest.mark.slow
class TestErasedTerms:
    """Refinement of randomly erased corpus terms."""

    @pytest.mark.parametrize("mono", [False, True], ids=["bidirectional", "mono"])
    @pytest.mark.parametrize("text", CORPUS)
    def test_refined_terms_are_sound(self, coerced, text, mono):
        db, env = coerced
        rng = random.Random(text)
        original = term(env, text)
        expected = RefinerState().checker(env).infer((), original)
        options = RefinerOptions(mono=mono, max_steps=20_000)

        for _ in range(TRIALS_PER_TERM):
            erased = erase(rng, original)
            r = attempt(env, db, options, erased, expected)
            if r is not None:
                assert_sound(env, db, erased, expected, r)

    @pytest.mark.parametrize("mono", [False, True], ids=["bidirectional", "mono"])
    @pytest.mark.parametrize("text", COERCED)
    def test_coerced_terms_are_sound(self, coerced, text, mono):
        db, env = coerced
        rng = random.Random(text)
        original = term(env, text)
        expected = term(env, NEL)
        options = RefinerOptions(mono=mono, max_steps=20_000)

        assert attempt(env, db, options, original, expected) is not None
        for _ in range(TRIALS_PER_TERM):
            erased = erase(rng, original)
            r = attempt(env, db, options, erased, expected)
            if r is not None:
                assert_sound(env, db, erased, expected, r)
