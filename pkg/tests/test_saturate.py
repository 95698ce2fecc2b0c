"""Saturation prover: outcomes, proof objects, verification, transforms,
text format, mining."""

import pytest

from hooplab.hoops import builtin_theory
from hooplab.saturate import (
    ProverError, ProverLimits, mine_patterns, parse_proof, prove,
    render_proof, transform_proof, verify_proof,
)
from hooplab.syntax import Theory, parse_formula_text, parse_source

SL = builtin_theory("semilattice")


def with_goal(base, text):
    th = Theory(op_decls=list(base.op_decls),
                assumptions=list(base.assumptions))
    th.goals.append(parse_formula_text(text, th))
    return th


def test_idempotency_goal_proved():
    th = with_goal(SL, "x cup (x cup x) = x")
    out = prove(th, ProverLimits(max_seconds=30))
    assert out.status == "proved"
    assert out.proof.steps[-1].clause == ()
    ok, report = verify_proof(th, out.proof)
    assert ok, report


def test_transitivity_proved():
    th = with_goal(builtin_theory("semilattice_ge"),
                   "x >= y & y >= z -> x >= z")
    out = prove(th, ProverLimits(max_seconds=60))
    assert out.status == "proved"
    assert verify_proof(th, out.proof)[0]


def test_total_order_never_proved():
    th = with_goal(builtin_theory("semilattice_ge"), "x >= y | y >= x")
    out = prove(th, ProverLimits(max_seconds=5, max_given=2000))
    assert out.status in ("exhausted", "limit")


def test_limit_reached_reports_which():
    th = with_goal(builtin_theory("hoop"),
                   "(x + (y ~ x)) + (z ~ (x + (y ~ x))) = "
                   "x + ((y + (z ~ y)) ~ x)")
    out = prove(th, ProverLimits(max_given=5))
    assert out.status == "limit"
    assert out.which == "max_given"


def test_bad_limits_rejected():
    with pytest.raises(ProverError):
        ProverLimits(max_seconds=-1)


def test_verify_rejects_mutations():
    th = with_goal(SL, "x cup (x cup x) = x")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    for i, step in enumerate(proof.steps):
        if step.clause:
            (pol, atom) = step.clause[0]
            mutated = ((pol, (atom[0], atom[2], atom[1])),) \
                + step.clause[1:]
            if mutated == step.clause:
                continue
            broken = type(proof)(list(proof.steps))
            broken.steps[i] = type(step)(step.id, mutated,
                                         step.justification)
            ok, report = verify_proof(th, broken)
            # a flipped equation may be harmless; a genuinely different
            # clause must be rejected with a step report
            if not ok:
                assert "step" in report
            break


def test_transform_renumber():
    th = with_goal(SL, "x cup (x cup x) = x")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    ren = transform_proof(proof, "renumber")
    assert [s.id for s in ren.steps] == list(range(1, len(ren.steps) + 1))
    assert verify_proof(th, ren)[0]
    again = transform_proof(ren, "renumber")
    assert [s.id for s in again.steps] == [s.id for s in ren.steps]


def test_transform_expand_rewrites():
    th = with_goal(SL, "x cup (x cup x) = x")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    exp = transform_proof(proof, "expand_rewrites")
    assert verify_proof(th, exp)[0]
    for step in exp.steps:
        for op in step.justification:
            if op[0] == "rewrite":
                assert len(op[1]) == 1


def test_proof_text_roundtrip():
    th = with_goal(SL, "x cup (x cup x) = x")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    text = render_proof(proof, th)
    assert "$F" in text
    assert "[goal]" in text
    again = parse_proof(text, th)
    assert verify_proof(th, again)[0]
    assert render_proof(again, th) == text


def test_parse_proof_rejects_garbage():
    with pytest.raises(ProverError):
        parse_proof("1 nonsense without a period", SL)


def test_determinism():
    th = with_goal(SL, "x cup (x cup x) = x")
    a = prove(th, ProverLimits(max_seconds=30)).proof
    b = prove(th, ProverLimits(max_seconds=30)).proof
    assert render_proof(a, th) == render_proof(b, th)


def test_mine_patterns():
    th = with_goal(SL, "(x cup y) cup (x cup y) = y cup x")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    pats = mine_patterns(proof, min_count=2, min_size=3)
    assert all(count >= 2 for _, count in pats)
    assert any("cup" in str(pat) for pat, _ in pats)
    assert mine_patterns(proof, min_count=10 ** 6, min_size=1) == []


def test_soundness_on_models():
    """Every Skolem-free step clause of a hoop proof holds in every hoop of
    size <= 3 (clauses descending from the denial mention Skolem constants
    and are exempt: they are contradictory with the theory by design)."""
    from hooplab.model import ModelError
    from hooplab.search import SearchOptions, enumerate_models
    from hooplab.terms import lit_vars

    hoop = builtin_theory("hoop")
    th = with_goal(hoop, "x + (y ~ x) = y + (x ~ y)")
    proof = prove(th, ProverLimits(max_seconds=30)).proof
    models = list(enumerate_models(hoop, SearchOptions(3, upto_iso=True)))
    checked = 0
    for step in proof.steps:
        if not step.clause:
            continue
        clause_vars = set()
        for lit in step.clause:
            clause_vars |= lit_vars(lit)
        for m in models:
            try:
                for env in _environments(sorted(clause_vars), m.size):
                    ok = False
                    for pol, atom in step.clause:
                        if m.eval_atom(env, atom) == pol:
                            ok = True
                            break
                    assert ok, (step.id, env)
                checked += 1
            except ModelError:
                break  # mentions a Skolem constant
    assert checked > 0


def _environments(names, n):
    import itertools
    for vals in itertools.product(range(n), repeat=len(names)):
        yield dict(zip(names, vals))
