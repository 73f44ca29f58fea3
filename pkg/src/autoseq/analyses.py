"""Canned decision and enumeration analyses for automatic sequences.

Each builder phrases a combinatorial quantity as a first-order predicate
over a bound sequence, compiles it, and (for counting quantities) runs the
two-track counting pipeline.  Position-anchored kinds follow these
conventions: a square "centered" at i has the boundary between its two
halves at i; a palindrome centered at i covers both the odd case (center
letter at i) and the even case (center boundary at i); an object "ending"
at i has its last letter at position i and must fit entirely to the left.
"""

from dataclasses import dataclass

from . import automata, logic, regseq
from .automata import Dfa, Nfa, minimize, pad_closure, permute_tracks, is_empty, is_finite
from .logic import (parse, compile as compile_formula, decide, characteristic,
                    CompileConfig, Var, Add, Compare, Not, And, Implies, Iff,
                    Forall, Call)
from .seqgen import prefix

ANCHORED_KINDS = {
    "square-count-at": ("begin", "center", "end"),
    "longest-square-at": ("begin", "center", "end"),
    "palindrome-count-at": ("begin", "center", "end"),
    "longest-palindrome-at": ("begin", "center", "end"),
    "longest-fractional-power-at": ("begin", "end"),
}

MEASURE_KINDS = (
    "subword-complexity",
    "palindrome-complexity",
    "unbordered-count",
    "square-count-at",
    "longest-square-at",
    "palindrome-count-at",
    "longest-palindrome-at",
    "longest-fractional-power-at",
    "recurrent-factor-count",
    "factors-in-x-not-y",
    "factors-in-both",
    "recurrence-R",
    "appearance-A",
    "separator-S",
    "repetitivity-I",
    "permutation-complexity",
)

TWO_SEQUENCE_KINDS = ("factors-in-x-not-y", "factors-in-both")

# Shared predicate fragments ("x" is the bound sequence, i the position,
# n the length).
_FIRST_OCC = "(A j ((j < i) => (E t (t < n) & (x[i+t] != x[j+t]))))"
_UNBORDERED_AT = "(A l ((1 <= l & 2*l <= n) => (E s (s < l) & (x[i+s] != x[i+n-l+s]))))"
_PALINDROME_AT = "(A t ((2*t + 1 <= n) => (x[i+t] = x[i+n-t-1])))"


def _pair_counting_dfa(text_or_ast, env, param, witness, config):
    """Pad-closed DFA with the parameter on track 0, the witness on track 1."""
    f = parse(text_or_ast) if isinstance(text_or_ast, str) else text_or_ast
    free = sorted(logic.free_variables(f))
    if free != sorted((param, witness)):
        raise ValueError(f"expected free variables {param}, {witness}; got {free}")
    dfa = compile_formula(f, env, config)
    if free[0] != param:
        dfa = minimize(permute_tracks(dfa, [1, 0]))
    return dfa


def indicator(x, kind, anchor="begin", config=None):
    """0/1 sequence over positions i: an object of the kind sits at i."""
    env = {"x": x}
    combos = {
        ("square", "begin"):
            "E q (1 <= q) & (A t (t < q) => (x[i+t] = x[i+q+t]))",
        ("square", "center"):
            "E q (1 <= q) & (A t (t < q) => (x[i-q+t] = x[i+t]))",
        ("square", "end"):
            "E q (1 <= q) & (A t (t < q) => (x[i+1-2*q+t] = x[i+1-q+t]))",
        ("overlap", "begin"):
            "E q (1 <= q) & (A t (t <= q) => (x[i+t] = x[i+q+t]))",
        ("overlap", "end"):
            "E q (1 <= q) & (A t (t <= q) => (x[i-2*q+t] = x[i-q+t]))",
        ("palindrome", "begin"):
            "E n (1 <= n) & (A t ((2*t + 1 <= n) => (x[i+t] = x[i+n-t-1])))",
        ("palindrome", "center"):
            "(E r (A t (t < r) => (x[i-r+t] = x[i+r-t])))"
            " | (E r (1 <= r) & (A t (t < r) => (x[i-r+t] = x[i+r-1-t])))",
        ("palindrome", "end"):
            "E n (1 <= n) & (A t ((2*t + 1 <= n) => (x[i+1-n+t] = x[i-t])))",
        ("unbordered", "begin"):
            "E n (1 <= n) & (A l ((1 <= l & 2*l <= n) => "
            "(E s (s < l) & (x[i+s] != x[i+n-l+s]))))",
        ("unbordered", "end"):
            "E n (1 <= n) & (A l ((1 <= l & 2*l <= n) => "
            "(E s (s < l) & (x[i+1-n+s] != x[i+1-l+s]))))",
    }
    text = combos.get((kind, anchor))
    if text is None:
        raise ValueError(f"indicator kind {kind!r} with anchor {anchor!r} is not defined")
    return characteristic(parse(text), env, config)


def unbordered_characteristic(x, config=None):
    """b(n) = 1 iff the sequence has an unbordered factor of length n."""
    text = ("E j A l ((1 <= l & 2*l <= n) => "
            "(E i (i < l) & (x[j+i] != x[j+n-l+i])))")
    return characteristic(parse(text), {"x": x}, config)


def _measure_formula(kind, anchor):
    """(formula text, parameter var, witness var) for one measure kind."""
    pal_center = ("((E r ((2*r + 1 = m) & (A t (t < r) => (x[n-r+t] = x[n+r-t]))))"
                  " | (E r ((2*r = m) & (1 <= r) & (A t (t < r) => (x[n-r+t] = x[n+r-1-t])))))")
    table = {
        ("subword-complexity", None): (
            _FIRST_OCC, "n", "i"),
        ("palindrome-complexity", None): (
            f"{_PALINDROME_AT} & {_FIRST_OCC}", "n", "i"),
        ("unbordered-count", None): (
            f"{_UNBORDERED_AT} & {_FIRST_OCC}", "n", "i"),
        ("square-count-at", "begin"): (
            "(1 <= q) & (A t (t < q) => (x[n+t] = x[n+q+t]))", "n", "q"),
        ("square-count-at", "center"): (
            "(1 <= q) & (A t (t < q) => (x[n-q+t] = x[n+t]))", "n", "q"),
        ("square-count-at", "end"): (
            "(1 <= q) & (A t (t < q) => (x[n+1-2*q+t] = x[n+1-q+t]))", "n", "q"),
        ("longest-square-at", "begin"): (
            "E q (1 <= q) & (u < 2*q) & (A t (t < q) => (x[n+t] = x[n+q+t]))", "n", "u"),
        ("longest-square-at", "center"): (
            "E q (1 <= q) & (u < 2*q) & (A t (t < q) => (x[n-q+t] = x[n+t]))", "n", "u"),
        ("longest-square-at", "end"): (
            "E q (1 <= q) & (u < 2*q) & (A t (t < q) => (x[n+1-2*q+t] = x[n+1-q+t]))",
            "n", "u"),
        ("palindrome-count-at", "begin"): (
            "(1 <= m) & (A t ((2*t + 1 <= m) => (x[n+t] = x[n+m-t-1])))", "n", "m"),
        ("palindrome-count-at", "center"): (
            f"(1 <= m) & {pal_center}", "n", "m"),
        ("palindrome-count-at", "end"): (
            "(1 <= m) & (A t ((2*t + 1 <= m) => (x[n+1-m+t] = x[n-t])))", "n", "m"),
        ("longest-palindrome-at", "begin"): (
            "E m (u < m) & (A t ((2*t + 1 <= m) => (x[n+t] = x[n+m-t-1])))", "n", "u"),
        ("longest-palindrome-at", "center"): (
            f"E m (u < m) & (1 <= m) & {pal_center}", "n", "u"),
        ("longest-palindrome-at", "end"): (
            "E m (u < m) & (A t ((2*t + 1 <= m) => (x[n+1-m+t] = x[n-t])))", "n", "u"),
        # Exponent at least 2: with any smaller threshold the value is
        # trivially infinite at every position (two equal letters at
        # distance d already form a (d+1)/d-power).
        ("longest-fractional-power-at", "begin"): (
            "E d (1 <= d) & (E t (u < t) & (2*d <= t) & "
            "(A s ((s + d < t) => (x[n+s] = x[n+d+s]))))", "n", "u"),
        ("longest-fractional-power-at", "end"): (
            "E d (1 <= d) & (E t (u < t) & (2*d <= t) & "
            "(A s ((s + d < t) => (x[n+1-t+s] = x[n+1-t+d+s]))))", "n", "u"),
        ("recurrent-factor-count", None): (
            "(A j ((A t (t < n) => (x[j+t] = x[i+t])) => "
            "(E m (j < m) & (A s (s < n) => (x[m+s] = x[i+s]))))) & " + _FIRST_OCC,
            "n", "i"),
        ("factors-in-x-not-y", None): (
            f"(A j (E t (t < n) & (x[i+t] != y[j+t]))) & {_FIRST_OCC}", "n", "i"),
        ("factors-in-both", None): (
            f"(E j (A t (t < n) => (x[i+t] = y[j+t]))) & {_FIRST_OCC}", "n", "i"),
        ("recurrence-R", None): (
            "E i E j A l ((i <= l & l + n <= i + t) => "
            "(E m (m < n) & (x[l+m] != x[j+m])))", "n", "t"),
        ("appearance-A", None): (
            "E j (A l ((l + n <= t) => (E m (m < n) & (x[l+m] != x[j+m]))))", "n", "t"),
        ("separator-S", None): (
            "A i ((i <= t) => (E j (j < n) & (A s ((s < i) => (x[n+s] = x[j+s])))))",
            "n", "t"),
        ("repetitivity-I", None): (
            "A i A d ((1 <= d & (A m ((m < n) => (x[i+m] = x[i+d+m])))) => (t < d))",
            "n", "t"),
    }
    return table[(kind, anchor)]


_LEVEL_KINDS = {"longest-square-at", "longest-palindrome-at",
                "longest-fractional-power-at", "recurrence-R",
                "appearance-A", "separator-S", "repetitivity-I"}


def measure(x, kind, y=None, anchor=None, config=None):
    """Linear representation of the named quantity for the sequence x.

    Two-sequence kinds require y.  The result carries the infinity-locus
    decomposition as .inf_part; kinds with possibly infinite values come
    back over the extended naturals.
    """
    if kind not in MEASURE_KINDS:
        raise ValueError(f"unknown measure kind {kind!r}")
    if (y is not None) != (kind in TWO_SEQUENCE_KINDS):
        need = "requires" if kind in TWO_SEQUENCE_KINDS else "does not take"
        raise ValueError(f"measure kind {kind!r} {need} a second sequence")
    if kind in ANCHORED_KINDS:
        anchor = anchor or "begin"
        if anchor not in ANCHORED_KINDS[kind]:
            raise ValueError(f"kind {kind!r} does not accept anchor {anchor!r}")
    elif anchor is not None:
        raise ValueError(f"kind {kind!r} does not take an anchor")
    cfg = config or CompileConfig()
    env = {"x": x} if y is None else {"x": x, "y": y}
    if kind == "permutation-complexity":
        return _permutation_complexity(x, cfg)
    text, param, witness = _measure_formula(kind, anchor if kind in ANCHORED_KINDS else None)
    pair = _pair_counting_dfa(text, env, param, witness, cfg)
    if kind in _LEVEL_KINDS:
        return regseq.count_measure(pair)
    return regseq.count_parameter(pair)


def permutation_order(x, config=None):
    """Pad-closed DFA over (i, j): the shift at i precedes the shift at j
    in lexicographic order of the infinite suffixes."""
    if len(set(x.outputs)) < 1:
        raise ValueError("output alphabet is empty")
    text = "E t ((A l (l < t) => (x[i+l] = x[j+l])) & (x[i+t] < x[j+t]))"
    return compile_formula(parse(text), {"x": x}, config)


def _permutation_complexity(x, cfg):
    """Count distinct length-n order patterns of consecutive shifts.

    The shift order is compiled once and reused as a relation atom; a
    pattern at i is new when no earlier j induces the same pairwise order
    on offsets below n.
    """
    less = permutation_order(x, cfg)
    # Precompile "shift at b+l precedes shift at b+m" once; the pattern
    # match then reuses it as a plain three-track relation.
    offset_less = compile_formula(
        Call(less, (Add(Var("b"), Var("l")), Add(Var("b"), Var("m")))),
        {"x": x}, cfg)
    guard = And(Compare(Var("l_"), "<", Var("n")), Compare(Var("m_"), "<", Var("n")))
    pm = Forall("l_", Forall("m_", Implies(
        guard,
        Iff(Call(offset_less, (Var("i"), Var("l_"), Var("m_"))),
            Call(offset_less, (Var("j"), Var("l_"), Var("m_")))))))
    first = Forall("j", Implies(Compare(Var("j"), "<", Var("i")), Not(pm)))
    pair = _pair_counting_dfa(first, {"x": x}, "n", "i", cfg)
    return regseq.count_parameter(pair)


def has_unbounded_exponent(x, config=None):
    """Whether the sequence contains fractional powers of arbitrarily
    large exponent.

    The repetition pairs (n, j) with a length-n block equal to its shift
    by j form a regular set; exponents are unbounded exactly when that
    set contains pairs whose first component outgrows the second by
    arbitrarily many digits, i.e. when the trimmed pair automaton has a
    cycle over symbols with zero second track that can still reach
    acceptance through a nonzero first-track digit.
    """
    cfg = config or CompileConfig()
    f = parse("(1 <= j) & (E i (A t (t < n) => (x[i+t] = x[i+j+t])))")
    dfa = compile_formula(f, {"x": x}, cfg)  # tracks (j, n)
    dfa = minimize(permute_tracks(dfa, [1, 0]))  # tracks (n, j)
    syms = automata.sym_tuples(dfa.base, 2)
    g0 = [s for s, sym in enumerate(syms) if sym[1] == 0]
    last = [s for s, sym in enumerate(syms) if sym[1] == 0 and sym[0] != 0]
    reach = {dfa.initial}
    stack = [dfa.initial]
    while stack:
        q = stack.pop()
        for t in dfa.transitions[q]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    # States with a zero-second-track path ending in a final via a nonzero
    # first digit.
    target = set()
    stack = []
    pre = {q: set() for q in reach}
    for q in reach:
        for s in g0:
            t = dfa.transitions[q][s]
            if t in reach:
                pre[t].add(q)
        if any(dfa.transitions[q][s] in dfa.finals for s in last):
            target.add(q)
            stack.append(q)
    closed = set(target)
    while stack:
        q = stack.pop()
        for p in pre[q]:
            if p not in closed:
                closed.add(p)
                stack.append(p)
    # States on a cycle inside the zero-second-track subgraph.
    succ = {q: [dfa.transitions[q][s] for s in g0 if dfa.transitions[q][s] in reach]
            for q in reach}
    on_cycle = _cycle_states(reach, succ)
    return bool(on_cycle & closed)


def _cycle_states(nodes, succ):
    """States belonging to some cycle of the given subgraph."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    counter = [0]
    out = set()
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for t in it:
                if t not in index:
                    index[t] = low[t] = counter[0]
                    counter[0] += 1
                    stack.append(t)
                    on_stack.add(t)
                    work.append((t, iter(succ[t])))
                    advanced = True
                    break
                elif t in on_stack:
                    low[node] = min(low[node], index[t])
            if not advanced:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index[node]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == node:
                            break
                    if len(comp) > 1 or comp[0] in succ[comp[0]]:
                        out.update(comp)
    return out


def _canonical_only(dfa):
    """Restrict an arity-1 language to canonical words (no trailing zero),
    one word per value, so finiteness questions are about value sets."""
    canon = Dfa(dfa.base, 1,
                [[1, 0] + [0] * (dfa.base - 2), [1, 0] + [0] * (dfa.base - 2)],
                0, {0})
    return automata.product(dfa, canon, "and")


def has_arbitrarily_large_unbordered(x, config=None):
    """Whether unbordered factors of unboundedly many lengths exist."""
    ch = unbordered_characteristic(x, config)
    ones = Dfa(ch.base, 1, ch.transitions, ch.initial,
               {q for q in range(ch.n_states) if ch.outputs[q] == 1})
    return not is_finite(_canonical_only(ones))


def recurrence_flags(x, config=None):
    """(recurrent, uniformly recurrent, ultimately periodic) decisions."""
    env = {"x": x}
    cfg = config or CompileConfig()
    rec = decide(parse(
        "A n A r E m (n < m) & (A j (j < r) => (x[n+j] = x[m+j]))"), env, cfg)
    urec = decide(parse(
        "A r E t A n E m (n < m) & (m < n + t) & (A i (i < r) => (x[n+i] = x[m+i]))"),
        env, cfg)
    up = decide(parse(
        "E p (1 <= p) & (E s A n (s <= n) => (x[n] = x[n+p]))"), env, cfg)
    return rec.value, urec.value, up.value


@dataclass
class FactorComparison:
    equal: bool
    x_subset_of_y: bool
    y_subset_of_x: bool
    distinguishing_length: int | None
    distinguishing_factor: tuple | None  # (side, factor values)
    tower_bound: str


def factor_set_compare(x, y, config=None):
    """Compare the factor sets of two sequences over the same base.

    When they differ, reports the shortest distinguishing length, a
    concrete factor of that length present on one side only, and the
    theoretical worst-case length bound for the two automata.
    """
    if x.base != y.base:
        raise ValueError("sequences must share the base")
    cfg = config or CompileConfig()
    env = {"x": x, "y": y}
    sub_xy = decide(parse(
        "A i A n E j (A t (t < n) => (x[i+t] = y[j+t]))"), env, cfg).value
    sub_yx = decide(parse(
        "A i A n E j (A t (t < n) => (y[i+t] = x[j+t]))"), env, cfg).value
    q = max(x.n_states, y.n_states)
    tower = f"2^(2^(2^(2*{q}^2)))"
    if sub_xy and sub_yx:
        return FactorComparison(True, True, True, None, None, tower)
    missing_x = "E i (A j (E t (t < n) & (x[i+t] != y[j+t])))"   # x-factor not in y
    missing_y = "E i (A j (E t (t < n) & (y[i+t] != x[j+t])))"
    diff = compile_formula(parse(f"({missing_x}) | ({missing_y})"), env, cfg)
    _, word = is_empty(diff)
    n0 = 0
    for sym in reversed(word.symbols):
        n0 = n0 * diff.base + sym[0]
    side, seqs = ("x", (x, y)) if not sub_xy else ("y", (y, x))
    a, b = seqs
    env2 = {"x": a, "y": b}
    g = parse(f"(n = {n0}) & (A j (E t (t < n) & (x[i+t] != y[j+t])))")
    gdfa = compile_formula(g, env2, cfg)
    _, w2 = is_empty(gdfa)
    from .numeration import decode_lsd, project_track
    i0 = decode_lsd(project_track(w2, 0))
    factor = tuple(prefix(a, i0 + n0)[i0:])
    return FactorComparison(False, sub_xy, sub_yx, n0, (side, factor), tower)


@dataclass
class LinearBound:
    bounded: bool
    coefficient: int | None = None
    offset: int | None = None

    def __str__(self):
        if not self.bounded:
            return "unbounded"
        return f"bounded-by-linear ({self.coefficient}*n + {self.offset})"


def linear_complexity_check(l):
    """Decide linear boundedness of a counting series.

    Needs the infinity-locus decomposition attached by the counting
    pipeline: the count is unbounded exactly when the locus is nonempty
    (a pumpable witness family exists); otherwise witnesses for n have at
    most rank extra digits, giving the explicit linear bound reported.
    """
    if l.inf_part is None:
        raise ValueError("series has no infinity decomposition; "
                         "use a count_parameter/count_measure result")
    empty, _ = is_empty(l.inf_part.infinite_part)
    if not empty:
        return LinearBound(False)
    k = l.base
    r = l.rank
    m = 1
    for mat in l.mats:
        for row in mat:
            for entry in row:
                if isinstance(entry, int) and entry > m:
                    m = entry
    return LinearBound(True, k ** (r + 1) * m ** r, k ** r * m ** r)


def conjectured_bordered_lengths(config=None):
    """Lsd DFA for the conjectured set of lengths all of whose Thue-Morse
    factors are bordered: msd expansions matching 1(01*0)*10*1.

    Built by reversing a small epsilon-NFA for the msd pattern and closing
    under padding, so it can be compared against compiled characteristic
    automata.
    """
    states = [0]

    def new_state():
        states.append(len(states))
        return len(states) - 1

    edges = []  # (src, digit-or-None, dst)

    def lit(d):
        a, b = new_state(), new_state()
        edges.append((a, d, b))
        return a, b

    def concat(f1, f2):
        edges.append((f1[1], None, f2[0]))
        return f1[0], f2[1]

    def star(f):
        a, b = new_state(), new_state()
        edges.append((a, None, f[0]))
        edges.append((f[1], None, b))
        edges.append((a, None, b))
        edges.append((f[1], None, f[0]))
        return a, b

    frag = lit(1)
    frag = concat(frag, star(concat(lit(0), concat(star(lit(1)), lit(0)))))
    frag = concat(frag, lit(1))
    frag = concat(frag, star(lit(0)))
    frag = concat(frag, lit(1))
    nfa = Nfa(2, 1, len(states), initials={frag[1]: 1}, finals={frag[0]: 1})
    for src, d, dst in edges:
        # reversed: lsd automaton reads the msd pattern backwards
        if d is None:
            nfa.add_eps(dst, src)
        else:
            nfa.add_edge(dst, d, src)
    det = automata.determinize(automata.eps_eliminate(nfa))
    return pad_closure(det)
