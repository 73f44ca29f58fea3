import itertools
import random

import pytest

from autoseq.automata import (Dfa, Nfa, complement, determinize, eps_eliminate,
                              equivalent, inflate, is_empty, is_finite, load,
                              minimize, pad_closure, permute_tracks, product,
                              project, store)
from autoseq.numeration import DigitWord


def contains_one():
    """Base-2 arity-1 DFA for words containing the digit 1."""
    return Dfa(2, 1, [[0, 1], [1, 1]], 0, {1})


def singleton_13():
    """Accepts exactly the canonical lsd word 1011."""
    rows = [[5, 1], [2, 5], [5, 3], [5, 4], [5, 5], [5, 5]]
    return Dfa(2, 1, rows, 0, {4})


def all_words(k, arity, maxlen):
    syms = list(itertools.product(range(k), repeat=arity))
    for length in range(maxlen + 1):
        for combo in itertools.product(syms, repeat=length):
            yield DigitWord(k, arity, combo)


def lang_equal_on_words(a, b, maxlen=6):
    return all(a.accepts(w) == b.accepts(w) for w in all_words(a.base, a.arity, maxlen))


def test_determinize_examples():
    sigma_star = Nfa(2, 1, 1, initials=[0], finals=[0])
    sigma_star.add_edge(0, 0, 0)
    sigma_star.add_edge(0, 1, 0)
    d = determinize(sigma_star)
    assert all(d.accepts(w) for w in all_words(2, 1, 4))

    guess = Nfa(2, 1, 2, initials=[0], finals=[1])
    for dgt in (0, 1):
        guess.add_edge(0, dgt, 0)
        guess.add_edge(1, dgt, 1)
    guess.add_edge(0, 1, 1)
    got = determinize(guess)
    eq, _ = equivalent(minimize(got), minimize(contains_one()))
    assert eq

    twice = Nfa(2, 1, 2, initials=[0], finals=[1])
    twice.add_edge(0, 1, 1, mult=2)
    twice.add_edge(1, 1, 1)
    d = determinize(twice)
    assert d.accepts(DigitWord(2, 1, ((1,), (1,))))


def test_complement():
    every = Dfa(2, 1, [[0, 0]], 0, {0})
    nothing = complement(every)
    assert not any(nothing.accepts(w) for w in all_words(2, 1, 4))
    flip = complement(contains_one())
    for w in all_words(2, 1, 4):
        assert flip.accepts(w) == all(s == (0,) for s in w.symbols)
    eq, _ = equivalent(complement(flip), contains_one())
    assert eq


def test_product():
    a = contains_one()
    assert lang_equal_on_words(product(a, a, "and"), a)
    e, _ = is_empty(product(a, complement(a), "and"))
    assert e
    both = product(complement(a), a, "or")
    assert all(both.accepts(w) for w in all_words(2, 1, 4))
    conj = product(a, singleton_13(), "and")
    for w in all_words(2, 1, 5):
        assert not conj.accepts(w) or a.accepts(w)


def test_project_and_inflate():
    # {(n, i) : i = n}: every n has a witness, so the projection is everything
    eq = Dfa(2, 2, [[0, 1, 1, 0], [1] * 4], 0, {0})
    all_n = pad_closure(determinize(project(eq, 1)))
    assert all(all_n.accepts_values((n,)) for n in range(20))

    # {(n, i) : n = 2i}: project the witness, keep even n
    from autoseq.logic import parse, compile as lcompile
    from autoseq.seqgen import thue_morse
    dfa = lcompile(parse("n = 2*i"), {"x": thue_morse()})  # tracks (i, n)
    evens = pad_closure(determinize(project(dfa, 0)))
    for n in range(17):
        assert evens.accepts_values((n,)) == (n % 2 == 0)

    nothing = Dfa(2, 2, [[0] * 4], 0, set())
    empty_proj = determinize(project(nothing, 0))
    e, _ = is_empty(empty_proj)
    assert e

    grown = inflate(Dfa(2, 1, [[0, 0]], 0, {0}), 0)
    assert grown.arity == 2 and all(grown.accepts(w) for w in all_words(2, 2, 3))
    assert not any(inflate(Dfa(2, 1, [[0, 0]], 0, set()), 0).accepts(w)
                   for w in all_words(2, 2, 3))


def test_pad_closure_examples():
    only_1 = Dfa(2, 1, [[2, 1], [2, 2], [2, 2]], 0, {1})
    closed = pad_closure(only_1)
    for j in range(4):
        assert closed.accepts(DigitWord(2, 1, ((1,),) + ((0,),) * j))
    assert not closed.accepts(DigitWord(2, 1, ((0,), (1,))))
    assert pad_closure(closed) == closed

    # accepts exactly "10" (value 1 with one pad): closure restores both sides
    one_pad = Dfa(2, 1, [[3, 1], [2, 3], [3, 3], [3, 3]], 0, {2})
    closed = pad_closure(one_pad)
    for n in range(32):
        assert closed.accepts_values((n,)) == (n == 1)


def test_minimize_idempotent_and_canonical():
    redundant = Dfa(2, 1, [[1, 3], [2, 3], [1, 3], [3, 3]], 0, {0, 1, 2})
    m = minimize(redundant)
    assert m.n_states == 2
    assert minimize(m) == m
    # language-equal automata minimize to structurally identical results
    other = Dfa(2, 1, [[0, 1], [1, 1]], 0, {0})
    eq, _ = equivalent(redundant, other)
    assert eq
    assert minimize(other) == m


def test_is_empty_examples():
    nothing = Dfa(2, 1, [[0, 0]], 0, set())
    e, wit = is_empty(nothing)
    assert e and wit is None
    every = Dfa(2, 1, [[0, 0]], 0, {0})
    e, wit = is_empty(every)
    assert not e and len(wit) == 0
    e, wit = is_empty(singleton_13())
    assert not e and str(wit) == "1011"


def test_is_finite_examples():
    assert is_finite(Dfa(2, 1, [[0, 0]], 0, set()))
    assert not is_finite(Dfa(2, 1, [[0, 0]], 0, {0}))
    assert is_finite(singleton_13())


def test_equivalent_examples():
    a = contains_one()
    eq, _ = equivalent(a, a)
    assert eq
    eq, cex = equivalent(a, complement(a))
    assert not eq and cex is not None
    with pytest.raises(ValueError):
        equivalent(a, Dfa(3, 1, [[0, 0, 0]], 0, set()))


def test_eps_eliminate():
    plain = Nfa(2, 1, 2, initials=[0], finals=[1])
    plain.add_edge(0, 1, 1)
    out = eps_eliminate(plain)
    assert determinize(out).accepts(DigitWord(2, 1, ((1,),)))

    chained = Nfa(2, 1, 2, initials=[0], finals=[1])
    chained.add_eps(0, 1)
    out = eps_eliminate(chained)
    assert 0 in out.finals  # the initial state became accepting

    loop = Nfa(2, 1, 2, initials=[0], finals=[1])
    loop.add_eps(0, 0)
    loop.add_eps(0, 1)
    loop.add_edge(1, 1, 1)
    out = eps_eliminate(loop)
    d = determinize(out)
    assert d.accepts(DigitWord(2, 1, ((1,),)))
    assert d.accepts(DigitWord(2, 1, ()))


def test_permute_tracks():
    from autoseq.logic import parse, compile as lcompile
    from autoseq.seqgen import thue_morse
    lt = lcompile(parse("i < n"), {"x": thue_morse()})  # tracks (i, n)
    gt = permute_tracks(lt, [1, 0])
    for i in range(8):
        for n in range(8):
            assert gt.accepts_values((n, i)) == (i < n)


def test_store_load_roundtrip():
    d = singleton_13()
    assert load(store(d)) == d
    n = Nfa(2, 1, 3, initials=[0, 1], finals=[2])
    n.add_edge(0, 1, 2, mult=3)
    n.add_eps(1, 2)
    text = store(n)
    again = load(text)
    assert store(again) == text
    with pytest.raises(ValueError):
        load("dfa base=2 arity=1 states=2 initial=0 finals=1\n0 0 1 1\n")


def test_random_projection_inflation_roundtrip():
    rng = random.Random(42)
    for _ in range(25):
        n = rng.randrange(1, 6)
        rows = [[rng.randrange(n) for _ in range(4)] for _ in range(n)]
        finals = {q for q in range(n) if rng.random() < 0.4}
        a = Dfa(2, 2, rows, 0, finals)
        t = rng.randrange(3)
        grown = inflate(a, t)
        back = pad_closure(determinize(project(grown, t)))
        eq, cex = equivalent(back, pad_closure(a))
        assert eq, (rows, finals, t, cex)
