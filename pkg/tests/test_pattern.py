"""Pattern AST: variable extraction, validation, value-pattern evaluation."""

import pytest
from hypothesis import given, settings, strategies as st

from nfmatch.errors import UnboundValuePatternRef, ValidationError
from nfmatch.pattern import (
    EMPTY_ENV,
    WILDCARD,
    And,
    Constructor,
    Later,
    Not,
    Or,
    TuplePattern,
    ValuePattern,
    Var,
    const_value_pattern,
    env_bind,
    env_get,
    env_names,
    env_to_dict,
    eval_value_pattern,
    extract_pattern_variables,
    validate_pattern,
)
from nfmatch.values import Symbol

A, B, C = Symbol("a"), Symbol("b"), Symbol("c")
CONS, JOIN = Symbol("cons"), Symbol("join")


def cons(px, py):
    return Constructor(CONS, (px, py))


def test_extract_in_order():
    p = cons(Var(A), cons(Var(B), Var(C)))
    assert extract_pattern_variables(p) == (A, B, C)


def test_extract_or_uses_first_branch():
    p = Or((cons(Var(A), Var(B)), cons(Var(A), Var(B))))
    assert extract_pattern_variables(p) == (A, B)


def test_extract_skips_not_and_wildcard():
    p = cons(Var(A), Not(cons(Var(B), WILDCARD)))
    assert extract_pattern_variables(p) == (A,)


def test_extract_later_transparent():
    p = cons(Later(Var(A)), Var(B))
    assert extract_pattern_variables(p) == (A, B)


def test_extract_and_union():
    p = And((Var(A), Var(B)))
    assert extract_pattern_variables(p) == (A, B)


def test_validate_accepts_linear():
    p = cons(Var(A), cons(Var(B), WILDCARD))
    validate_pattern(p)


def test_validate_rejects_duplicate_binding():
    with pytest.raises(ValidationError):
        validate_pattern(cons(Var(A), Var(A)))


def test_validate_rejects_mismatched_or_branches():
    with pytest.raises(ValidationError):
        validate_pattern(Or((Var(A), Var(B))))
    with pytest.raises(ValidationError):
        validate_pattern(Or((Var(A), WILDCARD)))


def test_validate_or_branches_may_rebind_same_names():
    validate_pattern(Or((cons(Var(A), WILDCARD), cons(Var(A), WILDCARD))))


def test_validate_not_scope():
    vp = ValuePattern(lambda env: env_get(env, A), (A,))
    # visible: a bound outside the not
    validate_pattern(cons(Var(A), Not(cons(vp, WILDCARD))))
    # a bound only inside a not is invisible outside it
    bad = cons(Not(Var(A)), ValuePattern(lambda env: env_get(env, A), (A,)))
    with pytest.raises(ValidationError):
        validate_pattern(bad)
    # inside the same not, inner binders are visible
    inner_vp = ValuePattern(lambda env: env_get(env, B), (B,))
    validate_pattern(cons(Var(A), Not(cons(Var(B), cons(inner_vp, WILDCARD)))))


def test_validate_unbound_vp_ref():
    vp = ValuePattern(lambda env: env_get(env, B), (B,))
    with pytest.raises(ValidationError):
        validate_pattern(cons(Var(A), vp))


def test_env_bind_get_shadowing():
    env = env_bind(EMPTY_ENV, A, 1)
    env = env_bind(env, B, 2)
    shadowed = env + ((A, 9),)  # not-scope overlays rebind without removal
    assert env_get(shadowed, A) == 9
    assert env_get(env, A) == 1
    assert env_names(env) == (A, B)
    assert env_to_dict(shadowed) == {A: 9, B: 2}


def test_eval_value_pattern():
    vp = ValuePattern(lambda env: env_get(env, A) + 1, (A,))
    env = env_bind(EMPTY_ENV, A, 41)
    assert eval_value_pattern(vp, env) == 42
    with pytest.raises(UnboundValuePatternRef):
        eval_value_pattern(vp, EMPTY_ENV)


def test_const_value_pattern():
    vp = const_value_pattern(7)
    assert vp.has_value and vp.value == 7 and vp.refs == ()


names = st.sampled_from([A, B, C, Symbol("d"), Symbol("e")])


@st.composite
def linear_patterns(draw, depth=3):
    used = draw(st.lists(names, unique=True, max_size=5))
    fresh = iter(used)

    def build(d):
        choice = draw(st.integers(0, 5 if d > 0 else 3))
        if choice == 0:
            name = next(fresh, None)
            return Var(name) if name is not None else WILDCARD
        if choice == 1:
            return WILDCARD
        if choice == 2:
            return const_value_pattern(draw(st.integers(0, 3)))
        if choice == 3:
            return Constructor(Symbol("nil"), ())
        if choice == 4:
            return cons(build(d - 1), build(d - 1))
        return Constructor(JOIN, (build(d - 1), build(d - 1)))

    return build(depth)


@settings(max_examples=200)
@given(linear_patterns())
def test_generated_linear_patterns_validate(p):
    validate_pattern(p)
    seen = extract_pattern_variables(p)
    assert len(seen) == len(set(seen))


@settings(max_examples=200)
@given(linear_patterns())
def test_wrapping_preserves_extraction(p):
    base = extract_pattern_variables(p)
    assert extract_pattern_variables(Later(p)) == base
    assert extract_pattern_variables(Not(p)) == ()
    assert extract_pattern_variables(And((p,))) == base
    assert extract_pattern_variables(Or((p, p))) == base
    assert extract_pattern_variables(TuplePattern((p,))) == base
