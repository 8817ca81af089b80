"""The matching-state machine.

A matching state is a stack of matching atoms plus the bindings made so
far. One reduction step pops the top atom and either binds (Something),
handles a logical pattern (or/and/not/later), or asks the matcher to
decompose the target. An empty stack is a successful match.

Three searches over the induced tree: strict depth-first collecting every
result, first-result (stops early), and a fair dovetailing search whose
results stream on demand even when some branches are infinite.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, NamedTuple, Optional

from .errors import MatchError
from .matchers import SOMETHING
from .pattern import (
    And,
    BindingEnv,
    Constructor,
    Later,
    Not,
    Or,
    TuplePattern,
    ValuePattern,
    Var,
    Wildcard,
    const_value_pattern,
    env_get,
    eval_value_pattern,
    extract_pattern_variables,
    validate_pattern,
)


class MatchingAtom(NamedTuple):
    pattern: object
    matcher: object
    target: object


class MatchingState(NamedTuple):
    stack: tuple
    env: BindingEnv


class MatchClause(NamedTuple):
    pattern: object
    body: Callable


_NONE = object()


def _step(stack, env):
    """Reference reduction step: successors of one non-final state.

    Returns a list of (stack, env) pairs, or a generator when the matcher
    enumerates decompositions lazily. Patterns are assumed validated, so
    bindings are appended unchecked.
    """
    p, m, t = stack[0]
    tp = type(p)
    if tp is Var:
        if m is SOMETHING:
            return [(stack[1:], env + ((p.name, t),))]
    elif tp is Wildcard:
        if m is SOMETHING:
            return [(stack[1:], env)]
    elif tp is ValuePattern:
        p = const_value_pattern(eval_value_pattern(p, env))
    elif tp is Or:
        rest = stack[1:]
        return [(((b, m, t),) + rest, env) for b in p.args]
    elif tp is And:
        return [(tuple((a, m, t) for a in p.args) + stack[1:], env)]
    elif tp is Not:
        if _exists(((p.arg, m, t),), env):
            return []
        return [(stack[1:], env)]
    elif tp is Later:
        return [(stack[1:] + ((p.arg, m, t),), env)]
    if m is SOMETHING:
        raise MatchError(f"the Something matcher cannot interpret {p!r}")
    enumeration = m.fn(p, t)
    rest = stack[1:]
    if type(enumeration) is list:
        return [(atoms + rest, env) for atoms in enumeration]
    return ((atoms + rest, env) for atoms in enumeration)


def _dfs(stack, env):
    """Depth-first search from one state, yielding final environments.

    This inlines _step's dispatch: the same reductions in the same order,
    arranged so the common steps (bind, wildcard, single decomposition)
    stay inside one loop without building per-step successor lists. A
    frame is (atom-lists iterator, remaining stack, env); drawing from it
    reconstructs the successor states _step would have produced, in order.
    """
    frames = []
    fpush = frames.append
    while True:
        while True:
            if not stack:
                yield env
                break
            p, m, t = stack[0]
            tp = type(p)
            if m is SOMETHING:
                if tp is Var:
                    env = env + ((p.name, t),)
                    stack = stack[1:]
                    continue
                if tp is Wildcard:
                    stack = stack[1:]
                    continue
            if tp is ValuePattern:
                p = const_value_pattern(eval_value_pattern(p, env))
            elif tp is Or:
                fpush((iter([((b, m, t),) for b in p.args]), stack[1:], env))
                break
            elif tp is And:
                stack = tuple((a, m, t) for a in p.args) + stack[1:]
                continue
            elif tp is Not:
                if _exists(((p.arg, m, t),), env):
                    break
                stack = stack[1:]
                continue
            elif tp is Later:
                stack = stack[1:] + ((p.arg, m, t),)
                continue
            if m is SOMETHING:
                raise MatchError(f"the Something matcher cannot interpret {p!r}")
            enumeration = m.fn(p, t)
            rest = stack[1:]
            if type(enumeration) is list:
                n = len(enumeration)
                if n == 0:
                    break
                if n == 1:
                    stack = enumeration[0] + rest
                    continue
            fpush((iter(enumeration), rest, env))
            break
        while frames:
            top = frames[-1]
            atoms = next(top[0], _NONE)
            if atoms is _NONE:
                frames.pop()
                continue
            stack = atoms + top[1]
            env = top[2]
            break
        else:
            return


def _exists(stack, env) -> bool:
    # existence subsearch for not patterns: only emptiness matters
    for _ in _dfs(stack, env):
        return True
    return False


def _dovetail(stack, env):
    """Fair search: yield final environments in dovetailed order.

    The queue holds lazily advancing successor enumerations. Each round
    draws one state from the oldest enumeration, emits it if final, and
    otherwise queues its own successors; the drawn-from enumeration goes
    to the back. Every final state at finite depth is eventually reached,
    even when some enumerations never end.
    """
    queue = deque()
    queue.append(iter(((stack, env),)))
    while queue:
        it = queue.popleft()
        st = next(it, _NONE)
        if st is _NONE:
            continue
        stack, env = st
        if not stack:
            queue.append(it)
            yield env
            continue
        succ = _step(stack, env)
        if type(succ) is list:
            if succ:
                queue.append(iter(succ))
        else:
            queue.append(succ)
        queue.append(it)


def _as_raw(s) -> tuple:
    return (tuple(s[0]), tuple(s[1]))


def process_matching_state(s) -> list:
    """One reduction step: all successor states of a non-final state.

    Materializes the successors; for matchers that enumerate lazily and
    endlessly, use the stream search instead.
    """
    stack, env = _as_raw(s)
    if not stack:
        raise MatchError("a final matching state has no successors")
    return [MatchingState(st, en) for (st, en) in _step(stack, env)]


def process_matching_states_all(ss) -> list:
    """Depth-first search from the given states; every final env, in order."""
    out = []
    for s in ss:
        stack, env = _as_raw(s)
        out.extend(_dfs(stack, env))
    return out


def process_matching_states_first(ss) -> Optional[BindingEnv]:
    """Like process_matching_states_all but stops at the first result."""
    for s in ss:
        stack, env = _as_raw(s)
        for result in _dfs(stack, env):
            return result
    return None


def gen_match_results(pattern, matcher, target) -> list:
    """All binding environments for one pattern/matcher/target match."""
    validate_pattern(pattern)
    return list(_dfs(((pattern, matcher, target),), ()))


def _result_vector(env, names):
    # bindings usually arrive in extraction order; fall back to lookup
    if len(env) == len(names):
        vals = []
        k = 0
        for n, v in env:
            if n is not names[k]:
                break
            vals.append(v)
            k += 1
        else:
            return vals
    return [env_get(env, n) for n in names]


def match_all(target, matcher, clauses) -> list:
    """Evaluate each clause body over every match; concatenate clause outputs."""
    out = []
    append = out.append
    for pattern, body in clauses:
        validate_pattern(pattern)
        names = extract_pattern_variables(pattern)
        if names:
            for env in _dfs(((pattern, matcher, target),), ()):
                append(body(*_result_vector(env, names)))
        else:
            for _ in _dfs(((pattern, matcher, target),), ()):
                append(body())
    return out


def match_first(target, matcher, clauses):
    """Body value of the first clause that matches; None when none does."""
    for pattern, body in clauses:
        validate_pattern(pattern)
        names = extract_pattern_variables(pattern)
        for env in _dfs(((pattern, matcher, target),), ()):
            return body(*_result_vector(env, names))
    return None


def stream_match_all(target, matcher, clause):
    """Generator of clause-body results under the fair dovetailing search.

    Stays productive on infinite search trees: any result at finite depth
    is eventually yielded. On finite trees it yields exactly match_all's
    results for the clause, generally in a different order.
    """
    pattern, body = clause
    validate_pattern(pattern)
    names = extract_pattern_variables(pattern)
    for env in _dovetail(((pattern, matcher, target),), ()):
        yield body(*_result_vector(env, names))
