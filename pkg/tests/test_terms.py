"""Unit tests for the term layer: substitution, matching, unification,
orderings and clausification."""

import hypothesis.strategies as st
from hypothesis import given, settings

from hooplab.terms import (
    GREATER, INCOMPARABLE, LESS, canonical_clause, canonical_renaming,
    clause_weight, clausify, compare_lpo, compose, lpo_gt, match, positions,
    rename_apart, replace_at, substitute, subterm_at, subterms, term_size,
    term_vars, unify, var,
)

X, Y, Z = var("x"), var("y"), var("z")
ZERO = ("0",)
ONE = ("1",)


def plus(a, b):
    return ("+", a, b)


def minus(a, b):
    return ("~", a, b)


terms_strategy = st.recursive(
    st.sampled_from([X, Y, Z, ZERO, ONE]),
    lambda sub: st.builds(plus, sub, sub) | st.builds(minus, sub, sub),
    max_leaves=8)


def test_vars_and_size():
    t = plus(X, minus(Y, ZERO))
    assert term_vars(t) == {"x", "y"}
    assert term_size(t) == 5
    assert term_size(X) == 1


def test_subterms_and_positions():
    t = plus(X, minus(Y, ZERO))
    assert t in subterms(t)
    assert ZERO in subterms(t)
    for p in positions(t):
        s = subterm_at(t, p)
        assert replace_at(t, p, s) == t
    assert subterm_at(t, ()) == t
    assert subterm_at(t, (1, 0)) == Y


def test_substitute_and_compose():
    t = plus(X, Y)
    s1 = {"x": minus(Y, ZERO)}
    s2 = {"y": ONE}
    lhs = substitute(substitute(t, s1), s2)
    rhs = substitute(t, compose(s1, s2))
    assert lhs == rhs == plus(minus(ONE, ZERO), ONE)


def test_match_basic():
    pat = plus(X, minus(Y, X))
    subj = plus(ZERO, minus(ONE, ZERO))
    b = match(pat, subj)
    assert b == {"x": ZERO, "y": ONE}
    assert match(pat, plus(ZERO, minus(ONE, ONE))) is None


def test_unify_basic():
    mgu = unify(plus(X, ZERO), plus(ONE, Y))
    assert mgu == {"x": ONE, "y": ZERO}
    assert unify(plus(X, X), plus(ZERO, ONE)) is None
    # occurs check
    assert unify(X, plus(X, ZERO)) is None


@settings(max_examples=100)
@given(terms_strategy, terms_strategy)
def test_unify_produces_a_unifier(s, t):
    mgu = unify(s, t)
    if mgu is not None:
        assert substitute(s, mgu) == substitute(t, mgu)


@settings(max_examples=100)
@given(terms_strategy, terms_strategy)
def test_match_is_one_sided(pat, subj):
    b = match(pat, subj)
    if b is not None:
        assert substitute(pat, b) == subj


def test_canonical_renaming():
    t1 = plus(var("p4"), var("q7"))
    t2 = plus(X, Y)
    assert (substitute(t1, canonical_renaming([t1]))
            == substitute(t2, canonical_renaming([t2])))


def test_rename_apart():
    c = (((True, ("=", plus(X, Y), Y)),))
    r = rename_apart(c, 7)
    used = set()
    for _, atom in r:
        used |= term_vars(atom[1]) | term_vars(atom[2])
    assert used.isdisjoint({"x", "y"})


PREC = {"0": 0, "1": 1, "+": 2, "~": 3}


def test_lpo_orientation():
    # x + 0 > x, and the subterm property
    assert lpo_gt(plus(X, ZERO), X, PREC)
    assert not lpo_gt(X, plus(X, ZERO), PREC)
    assert compare_lpo(X, X, PREC) not in (GREATER, LESS)
    # variables are incomparable with fresh variables
    assert compare_lpo(X, Y, PREC) == INCOMPARABLE


@settings(max_examples=60)
@given(terms_strategy, terms_strategy)
def test_lpo_antisymmetric(s, t):
    if lpo_gt(s, t, PREC):
        assert not lpo_gt(t, s, PREC)


def test_clause_weight_counts_symbols():
    c = ((True, ("=", plus(X, ZERO), X)),)
    assert clause_weight(c) == 4


def test_canonical_clause_is_renaming_invariant():
    c1 = ((True, ("=", plus(var("u1"), var("w2")), var("u1"))),)
    c2 = ((True, ("=", plus(X, Y), X)),)
    assert canonical_clause(c1) == canonical_clause(c2)


def test_clausify_equation():
    f = ("atom", ("=", plus(X, Y), plus(Y, X)))
    cls = clausify(f, "assumption")
    assert cls == [((True, ("=", plus(X, Y), plus(Y, X))),)]


def test_clausify_iff_gives_two_clauses():
    f = ("iff", ("atom", (">=", X, Y)),
         ("atom", ("=", minus(Y, X), ZERO)))
    cls = clausify(f, "assumption")
    assert len(cls) == 2
    for c in cls:
        assert len(c) == 2


def test_clausify_denied_goal_introduces_constants():
    f = ("atom", ("=", plus(X, X), X))
    cls = clausify(f, "denied_goal")
    assert len(cls) == 1
    (lit,) = cls[0]
    assert lit[0] is False
    assert not term_vars(lit[1][1])  # variables became Skolem constants
