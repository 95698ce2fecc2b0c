"""Finite models: evaluation, satisfaction, isomorphism, serialization."""

import pytest

from hooplab.hoops import lukasiewicz
from hooplab.model import (
    FiniteModel, ModelError, deserialize_model, isomorphic, serialize_model,
)
from hooplab.syntax import Theory, parse_formula_text

L3 = lukasiewicz(3)


def f(text):
    th = Theory(op_decls=[(500, "infix", "+"), (500, "infix", "~")])
    return parse_formula_text(text, th)


def test_eval_term_tables():
    # 1 + 1 saturates at the top in L_3
    assert L3.eval_term({}, ("+", ("1",), ("1",))) == 2
    assert L3.eval_term({"x": 1}, ("~", ("V", "x"), ("V", "x"))) == 0


def test_holds_and_satisfies():
    assert L3.satisfies(f("x ~ x = 0"))
    assert L3.satisfies(f("x + y = y + x"))
    assert not L3.satisfies(f("x + x = x"))


def test_counterexample_env():
    env = L3.counterexample_env(f("x + x = x"))
    assert env is not None
    assert L3.eval_term(env, ("+", ("V", "x"), ("V", "x"))) != env["x"]
    assert L3.counterexample_env(f("x ~ x = 0")) is None


def test_relations():
    m = FiniteModel(2, {"0": 0}, {},
                    {">=": ((True, False), (True, True))})
    assert m.satisfies(f("x >= 0"))
    assert not m.satisfies(f("0 >= x"))


def test_uninterpreted_symbol_error():
    with pytest.raises(ModelError):
        L3.eval_term({}, ("mystery", ("0",)))


def test_isomorphic_permutation():
    perm = [2, 1, 0]  # relabel but keep structure
    m2 = L3.permuted(perm)
    assert isomorphic(L3, m2)
    assert not isomorphic(L3, lukasiewicz(4))


def test_isomorphic_distinguishes_structure():
    a = FiniteModel(2, {}, {"f": ((0, 0), (0, 0))})
    b = FiniteModel(2, {}, {"f": ((0, 1), (1, 0))})
    assert not isomorphic(a, b)


def test_canonical_form_is_invariant():
    m2 = L3.permuted([1, 2, 0])
    assert L3.canonical_form() == m2.canonical_form()


def test_serialize_roundtrip():
    line = serialize_model(L3)
    again = deserialize_model(line)
    assert again == L3
    assert serialize_model(again) == line


def test_model_validation():
    with pytest.raises(ModelError):
        FiniteModel(0)
    with pytest.raises(ModelError):
        FiniteModel(2, {"c": 5})
    with pytest.raises(ModelError):
        FiniteModel(2, {}, {"f": ((0, 3), (0, 0))})
