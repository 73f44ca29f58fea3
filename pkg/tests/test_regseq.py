import itertools
import random
from fractions import Fraction

import pytest

from autoseq.automata import Dfa, Nfa, is_empty, minimize, permute_tracks
from autoseq.logic import parse, compile as compile_formula
from autoseq.numeration import DigitWord
from autoseq.regseq import (INF, InfDecomposition, LinRep, count_measure,
                            count_parameter, decompose_infinity, eps_saturate,
                            kernel_relations, linrep_from_nfa, load,
                            nfa_from_linrep, normalize_leading,
                            normalize_trailing, push_infinity_to_u,
                            representation_count, reverse_series, store,
                            trim_nfa, verify_relation, zero_rep)
from autoseq.seqgen import prefix, thue_morse

TM = thue_morse()
ENV = {"x": TM}


def words(k, maxlen):
    for length in range(maxlen + 1):
        yield from itertools.product(range(k), repeat=length)


def rand_linrep(rng, k, rank, top=2):
    def mat():
        return tuple(tuple(rng.randrange(top + 1) for _ in range(rank))
                     for _ in range(rank))
    return LinRep("nat", k,
                  tuple(rng.randrange(top + 1) for _ in range(rank)),
                  tuple(mat() for _ in range(k)),
                  tuple(rng.randrange(top + 1) for _ in range(rank)))


def rand_nfa(rng, k, n, eps_p=0.0, edge_p=0.22, mult_top=2):
    nfa = Nfa(k, 1, n, initials={rng.randrange(n): 1}, finals={})
    for q in range(n):
        if rng.random() < 0.5:
            nfa.finals[q] = 1
        for d in range(k):
            for t in range(n):
                if rng.random() < edge_p:
                    nfa.add_edge(q, d, t, rng.randrange(1, mult_top + 1))
        for t in range(n):
            if rng.random() < eps_p:
                nfa.add_eps(q, t)
    return nfa


def rand_natinf(rng, k, rank):
    def entry():
        return INF if rng.random() < 0.12 else rng.randrange(3)
    def mat():
        return tuple(tuple(entry() for _ in range(rank)) for _ in range(rank))
    return LinRep("natinf", k, tuple(entry() for _ in range(rank)),
                  tuple(mat() for _ in range(k)), tuple(entry() for _ in range(rank)))


def brute_paths(nfa, w):
    total = 0

    def rec(state, pos, weight):
        nonlocal total
        if pos == len(w):
            total += weight * nfa.finals.get(state, 0)
            return
        for t, mult in nfa.steps[state].get(w[pos], {}).items():
            rec(t, pos + 1, weight * mult)

    for q, iw in nfa.initials.items():
        rec(q, 0, iw)
    return total


def capped_paths(nfa, w, cap):
    """Weighted accepting paths whose epsilon runs stay below the cap, by
    forward dynamic programming; an infinite family keeps growing with cap."""
    cur = {}
    for q, iw in nfa.initials.items():
        cur[(0, q)] = cur.get((0, q), 0) + iw

    def eps_expand(layer):
        out = dict(layer)
        frontier = dict(layer)
        while frontier:
            nxt = {}
            for (run, q), wgt in frontier.items():
                if run >= cap:
                    continue
                for t, mult in nfa.eps[q].items():
                    key = (run + 1, t)
                    nxt[key] = nxt.get(key, 0) + wgt * mult
            for key, wgt in nxt.items():
                out[key] = out.get(key, 0) + wgt
            frontier = nxt
        return out

    cur = eps_expand(cur)
    for d in w:
        nxt = {}
        for (run, q), wgt in cur.items():
            for t, mult in nfa.steps[q].get(d, {}).items():
                nxt[(0, t)] = nxt.get((0, t), 0) + wgt * mult
        cur = eps_expand(nxt)
    return sum(wgt * nfa.finals.get(q, 0) for (run, q), wgt in cur.items())


def test_sum_of_digits_representation():
    # rank-2 representation of the binary digit sum: f(n) = u mu(w) v
    s2 = LinRep("nat", 2, (0, 1),
                (((1, 0), (0, 1)), ((1, 0), (1, 1))), (1, 0))
    assert s2.evaluate(27) == 4
    for n in range(200):
        assert s2.evaluate(n) == bin(n).count("1")
    norm = normalize_trailing(s2)
    for n in range(100):
        assert norm.evaluate(n) == s2.evaluate(n)
    digits = [1, 1, 0, 1]
    for pads in range(4):
        assert norm.eval_word(digits + [0] * pads) == 3


def test_reverse_series_involution():
    rng = random.Random(7)
    for _ in range(10):
        l = rand_linrep(rng, 2, 3)
        r = reverse_series(l)
        assert r.rank == l.rank
        for w in words(2, 6):
            assert r.eval_word(w) == l.eval_word(tuple(reversed(w)))
            assert reverse_series(r).eval_word(w) == l.eval_word(w)


def test_leading_trailing_contracts_100_random():
    rng = random.Random(12345)
    for _ in range(100):
        k = rng.choice([2, 3])
        l = rand_linrep(rng, k, rng.randrange(1, 4))
        g = normalize_leading(l)
        assert g.leading_normalized()
        h = normalize_trailing(l)
        assert h.trailing_normalized()
        for w in words(k, 5):
            if not (w and w[0] == 0):
                for i in range(4):
                    assert g.eval_word((0,) * i + w) == l.eval_word(w)
            if not (w and w[-1] == 0):
                for i in range(4):
                    assert h.eval_word(w + (0,) * i) == l.eval_word(w)


def test_zero_representation_normalizes_to_zero():
    z = zero_rep(2)
    g = normalize_leading(z)
    assert all(g.eval_word(w) == 0 for w in words(2, 4))


def test_path_count_fidelity():
    rng = random.Random(777)
    for _ in range(40):
        nfa = rand_nfa(rng, 2, rng.randrange(1, 6))
        rep = linrep_from_nfa(nfa)
        for w in words(2, 7):
            assert rep.eval_word(w) == brute_paths(nfa, w)


def test_deterministic_gives_characteristic():
    d = Dfa(2, 1, [[0, 1], [1, 1]], 0, {1})
    nfa = Nfa(2, 1, 2, initials=[0], finals=[1])
    for q in range(2):
        for dgt in range(2):
            nfa.add_edge(q, dgt, d.transitions[q][dgt])
    rep = linrep_from_nfa(nfa)
    for w in words(2, 6):
        word = DigitWord(2, 1, tuple((x,) for x in w))
        assert rep.eval_word(w) == (1 if d.accepts(word) else 0)


def test_roundtrip_nfa_linrep_100_random():
    rng = random.Random(424)
    for _ in range(100):
        l = rand_linrep(rng, 2, rng.randrange(1, 4))
        back = linrep_from_nfa(nfa_from_linrep(l))
        for w in words(2, 8):
            if w:
                assert back.eval_word(w) == l.eval_word(w)
    with pytest.raises(ValueError):
        nfa_from_linrep(rand_natinf(rng, 2, 2))


def test_eps_saturation_50_random():
    rng = random.Random(999)
    confirmed_infinite = 0
    for _ in range(50):
        nfa = rand_nfa(rng, 2, rng.randrange(1, 5), eps_p=0.22, edge_p=0.18)
        sat = eps_saturate(nfa)
        assert not sat.has_eps()
        rep = linrep_from_nfa(sat)
        n = max(nfa.n_states, 2)
        for w in words(2, 4):
            got = rep.eval_word(w)
            lo = capped_paths(nfa, w, n + 1)
            hi = capped_paths(nfa, w, 2 * n + 2)
            if got == INF:
                assert hi > lo
                confirmed_infinite += 1
            else:
                assert got == lo == hi
    assert confirmed_infinite > 0


def test_eps_saturate_examples():
    plain = Nfa(2, 1, 1, initials=[0], finals=[0])
    plain.add_edge(0, 1, 0)
    assert eps_saturate(plain) is plain  # eps-free input unchanged

    # two parallel eps edges into an accepting state
    par = Nfa(2, 1, 2, initials=[0], finals=[1])
    par.add_eps(0, 1, mult=2)
    rep = linrep_from_nfa(eps_saturate(par))
    assert rep.eval_word(()) == 2

    # eps self-loop on a useful state
    loop = Nfa(2, 1, 1, initials=[0], finals=[0])
    loop.add_eps(0, 0)
    rep = linrep_from_nfa(eps_saturate(loop))
    assert rep.eval_word(()) == INF


def test_decompose_infinity_50_random():
    rng = random.Random(31337)
    for _ in range(50):
        l = rand_natinf(rng, 2, rng.randrange(1, 4))
        dec = decompose_infinity(l)
        for w in words(2, 6):
            val = l.eval_word(w)
            member = dec.infinite_part.accepts(
                DigitWord(2, 1, tuple((d,) for d in w)))
            assert member == (val == INF)
            if not member:
                assert dec.finite_part.eval_word(w) == val


def test_decompose_all_finite():
    rng = random.Random(5)
    l = rand_linrep(rng, 2, 3)
    linf = LinRep("natinf", 2, l.u, l.mats, l.v)
    dec = decompose_infinity(linf)
    empty, _ = is_empty(dec.infinite_part)
    assert empty
    for w in words(2, 6):
        assert dec.finite_part.eval_word(w) == l.eval_word(w)


def test_push_infinity_to_u_50_random():
    rng = random.Random(2718)
    for _ in range(50):
        l = rand_natinf(rng, 2, rng.randrange(1, 3))
        p = push_infinity_to_u(l)
        for m in p.mats:
            for row in m:
                assert INF not in row
        assert INF not in p.v
        for w in words(2, 5):
            assert p.eval_word(w) == l.eval_word(w)


def test_count_parameter_basic():
    lt = compile_formula(parse("i < n"), ENV)  # tracks (i, n)
    pair = minimize(permute_tracks(lt, [1, 0]))
    rep = count_parameter(pair)
    assert rep.semiring == "nat"
    for n in range(60):
        assert rep.evaluate(n) == n
    empty, _ = is_empty(rep.inf_part.infinite_part)
    assert empty


def test_count_parameter_infinite():
    allp = compile_formula(parse("(n = n) & (i = i)"), ENV)
    pair = minimize(permute_tracks(allp, [1, 0]))
    rep = count_parameter(pair)
    assert rep.semiring == "natinf"
    for n in range(10):
        assert rep.evaluate(n) == INF
    empty, _ = is_empty(rep.inf_part.infinite_part)
    assert not empty


def test_count_parameter_requires_pad_closed():
    rows = [[3, 1], [2, 3], [3, 3], [3, 3]]
    not_closed = Dfa(2, 2, [[r[0], r[0], r[1], r[1]] for r in rows], 0, {2})
    with pytest.raises(ValueError, match="pad-closed"):
        count_parameter(not_closed)
    with pytest.raises(ValueError, match="arity"):
        count_parameter(Dfa(2, 1, [[0, 0]], 0, {0}))


def test_count_parameter_empty_language():
    nothing = Dfa(2, 2, [[0, 0, 0, 0]], 0, set())
    rep = count_parameter(nothing)
    assert all(rep.evaluate(n) == 0 for n in range(12))


def test_count_parameter_subword_complexity():
    f = parse("A j (j < i) => (E t (t < n) & (x[i+t] != x[j+t]))")
    pair = minimize(permute_tracks(compile_formula(f, ENV), [1, 0]))
    rep = count_parameter(pair)
    w = prefix(TM, 10 ** 4)
    for n in range(1, 14):
        brute = len({tuple(w[i:i + n]) for i in range(len(w) - n)})
        assert rep.evaluate(n) == brute
    assert rep.evaluate(0) == 1


def test_count_measure_identity_and_zero():
    lt = compile_formula(parse("t < n"), ENV)  # tracks (n, t) already sorted
    rep = count_measure(lt)
    for n in range(40):
        assert rep.evaluate(n) == n
    nothing = Dfa(2, 2, [[0, 0, 0, 0]], 0, set())
    rep = count_measure(nothing)
    assert all(rep.evaluate(n) == 0 for n in range(10))


def test_count_measure_rejects_non_downward_closed():
    # p(n, t) iff t = n is not downward closed in t
    eq = compile_formula(parse("t = n"), ENV)
    with pytest.raises(ValueError, match="downward"):
        count_measure(eq)


def test_representation_count_binary():
    rep = representation_count({0, 1}, 2)
    for n in range(1001):
        assert rep.evaluate(n) == 1


def test_representation_count_stern():
    rep = representation_count({0, 1, 2}, 2)
    assert rep.evaluate(4) == 3
    stern = [0, 1]
    for i in range(2, 300):
        stern.append(stern[i // 2] if i % 2 == 0
                     else stern[(i - 1) // 2] + stern[(i + 1) // 2])
    for n in range(200):
        assert rep.evaluate(n) == stern[n + 1]


def test_representation_count_zero_digit_only():
    rep = representation_count({0}, 2)
    assert rep.evaluate(0) == 1
    for n in range(1, 40):
        assert rep.evaluate(n) == 0


def test_representation_count_negative_digits_infinite():
    rep = representation_count({-1, 0, 1}, 2)
    assert rep.semiring == "natinf"
    assert rep.evaluate(1) == INF


def test_kernel_relations_digit_sum():
    s2 = LinRep("nat", 2, (0, 1),
                (((1, 0), (0, 1)), ((1, 0), (1, 1))), (1, 0))
    ks = kernel_relations(s2, 2)
    assert ks.closed
    # s_2(2n) = s_2(n) and s_2(2n+1) = s_2(n) + s_2(2n+1)-style basis
    rel_map = {r.lhs: r.combo for r in ks.relations}
    assert rel_map[(2, 0)] == {(1, 0): Fraction(1)}
    assert verify_relation(s2, (2, 0), {(1, 0): 1})
    # s_2(2n+1) = s_2(n) + 1 is affine, not linear; over the kernel it shows
    # up as s_2(4n+1) = s_2(2n+1) etc.
    assert verify_relation(s2, (4, 1), {(2, 1): 1})
    assert verify_relation(s2, (4, 2), {(2, 1): 1})
    assert not verify_relation(s2, (2, 0), {(2, 1): 1})


def test_kernel_relations_zero_rep():
    ks = kernel_relations(zero_rep(2), 2)
    # the zero sequence spans nothing: everything is a trivial relation
    assert all(r.combo == {} for r in ks.relations)


def test_kernel_relations_partial_flag():
    s2 = LinRep("nat", 2, (0, 1),
                (((1, 0), (0, 1)), ((1, 0), (1, 1))), (1, 0))
    ks = kernel_relations(s2, 0)
    assert not ks.closed


def test_store_load_roundtrip():
    rng = random.Random(1)
    l = rand_linrep(rng, 2, 3)
    assert load(store(l)) == l
    linf = LinRep("natinf", 2, (1, INF), (((0, 1), (2, INF)), ((1, 0), (0, 1))),
                  (1, 0))
    assert load(store(linf)) == linf
    lrat = LinRep("rat", 2, (Fraction(1, 2), 3),
                  (((Fraction(0), 1), (2, Fraction(5, 7))), ((1, 0), (0, 1))),
                  (1, Fraction(2, 3)))
    assert load(store(lrat)) == lrat


def test_trim_drops_dead_eps_cycle():
    nfa = Nfa(2, 1, 3, initials=[0], finals=[1])
    nfa.add_edge(0, 1, 1)
    nfa.add_eps(2, 2)  # unreachable eps loop
    trimmed = trim_nfa(nfa)
    assert trimmed.n_states == 2
    rep = linrep_from_nfa(eps_saturate(trimmed))
    assert rep.semiring == "nat"
