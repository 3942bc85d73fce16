import pytest
from hypothesis import given, strategies as st

from normengine.terms import (
    Atom, Combine, Constant, Literal, Not, Number, StateExpr, StateOutOfRange, TermError,
    UnboundVariable, Variable, apply_substitution, combine, complement, holds, is_ground,
    match_literal, must, pretty, variables,
)

A, B = Constant("a"), Constant("b")
T, V, W, P = Variable("T"), Variable("V"), Variable("W"), Variable("P")


def test_combine_shapes():
    assert combine(Constant("shock"), A) == Combine(Constant("shock"), A)
    inner = combine(Variable("Q"), Variable("X"))
    outer = combine(inner, T)
    assert outer.depth == 2 and outer.base == inner
    with pytest.raises(TermError):
        combine(outer, A)
    with pytest.raises(TermError):
        combine(Constant("x"), inner)


def test_state_offsets_limited_to_one():
    with pytest.raises(TermError):
        StateExpr(T, 2)
    with pytest.raises(TermError):
        StateExpr(T, 0)


def test_modal_atoms_need_three_args():
    with pytest.raises(TermError):
        Atom("holds", (Constant("stop"), A))


def test_complement():
    pos = holds(Constant("stop"), A, Number(2))
    assert not complement(pos).positive
    assert complement(complement(pos)) == pos
    assert complement(pos).atom == pos.atom


def test_substitution_follow_backward():
    pattern = holds(combine(Constant("follow"), V), W, StateExpr(T, -1))
    got = apply_substitution(pattern, {"V": B, "W": A, "T": Number(2)})
    assert got == holds(Combine(Constant("follow"), B), A, Number(1))
    assert pretty(got) == "Holds(Combine(Follow, B), A, 1)"


def test_substitution_identity_and_errors():
    ground = must(Constant("stop"), A, Number(1))
    assert apply_substitution(ground, {}) == ground
    with pytest.raises(StateOutOfRange) as exc:
        apply_substitution(holds(P, A, StateExpr(T, -1)), {"T": Number(1), "P": Constant("stop")})
    assert exc.value.value == 0
    with pytest.raises(StateOutOfRange):
        apply_substitution(holds(P, A, StateExpr(T, 1)), {"T": Number(3), "P": Constant("stop")}, max_state=3)
    with pytest.raises(UnboundVariable):
        apply_substitution(holds(P, A, T), {"T": Number(1)})


def test_not_wraps_literal():
    n = Not(holds(P, A, T))
    assert variables(n) == {"P", "T"}
    assert str(apply_substitution(n, {"P": Constant("stop"), "T": Number(1)})) == "not holds(stop, a, 1)"


def test_match_solves_state_expressions():
    pattern = holds(Constant("stop"), V, StateExpr(T, 1))
    s = match_literal(pattern, holds(Constant("stop"), A, Number(2)))
    assert s == {"V": A, "T": Number(1)}
    assert match_literal(pattern, holds(Constant("stop"), A, Number(1))) is None
    assert match_literal(pattern, complement(holds(Constant("stop"), A, Number(2)))) is None


def test_narrator_rendering():
    lit = Literal(Atom("an", (Constant("b_narrator"), Number(1), Constant("stop"))))
    assert pretty(lit) == "An(B, 1, Stop)"
    assert pretty(complement(holds(Constant("stop"), A, Number(2)))) == "-Holds(Stop, A, 2)"


names = st.sampled_from(["stop", "bump", "follow", "a", "b", "c"])
vars_ = st.sampled_from(["V", "W", "X"])
simple = st.one_of(names.map(Constant), vars_.map(Variable))
props = st.one_of(
    simple,
    st.builds(combine, names.map(Constant), simple),
    st.builds(lambda b, x, y: combine(combine(Constant(b), x), y), names, simple, simple),
)
states = st.one_of(st.integers(1, 5).map(Number), st.just(T), st.sampled_from([-1, 1]).map(lambda o: StateExpr(T, o)))
literals = st.builds(lambda p, ag, s, pos: Literal(Atom("holds", (p, ag, s)), pos), props, simple, states, st.booleans())


@given(literals)
def test_complement_is_an_involution(lit):
    assert complement(complement(lit)) == lit
    assert complement(lit) != lit


@given(literals, st.integers(2, 4))
def test_full_substitution_grounds(lit, t):
    s = {name: Constant("k") for name in variables(lit)}
    s["T"] = Number(t)
    out = apply_substitution(lit, s, max_state=5)
    assert is_ground(out)
    assert match_literal(lit, out) is not None
