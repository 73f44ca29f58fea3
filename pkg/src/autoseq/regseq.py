"""Linear representations of recognizable series and k-regular sequences.

A linear representation (u, mu, v) over a semiring evaluates a base-k
word lsd-first: value(d0 d1 ... dm) = u . mu(d0) . mu(d1) ... mu(dm) . v.
Supported semirings: the naturals ('nat'), the naturals extended with an
absorbing infinity ('natinf', where 0 * inf = 0), and the rationals
('rat').  All arithmetic is exact; there is no floating point anywhere in
this module.

The counting pipeline turns a pad-closed two-track predicate automaton
into the series counting witnesses on the second track: rewrite each
value pair to a unique representative whose first-track padding is a
marker consumed as epsilon, saturate the epsilon moves exactly (infinite
path families become the absorbing infinity), and read the linear
representation off the resulting weighted automaton.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import automata
from .automata import Dfa, Nfa, equivalent, minimize, pad_closure
from .numeration import encode_lsd


class _Infinity:
    """Absorbing infinity of the extended naturals; 0 * inf = 0."""

    __slots__ = ()

    def __add__(self, other):
        if isinstance(other, (int, _Infinity)):
            return INF
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, _Infinity):
            return INF
        if isinstance(other, int):
            return 0 if other == 0 else INF
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("autoseq-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "inf"


INF = _Infinity()


def _vec_mat(u, m):
    n = len(m[0]) if m else 0
    return tuple(sum(u[i] * m[i][j] for i in range(len(u))) for j in range(n))


def _mat_vec(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def _mat_mul(a, b):
    cols = len(b[0]) if b else 0
    return tuple(
        tuple(sum(a_row[x] * b[x][j] for x in range(len(b))) for j in range(cols))
        for a_row in a)


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def _transpose(m):
    return tuple(tuple(row[i] for row in m) for i in range(len(m[0]))) if m else ()


_SEMIRINGS = ("nat", "natinf", "rat")


class LinRep:
    """Linear representation (u, mu, v) over a declared semiring."""

    def __init__(self, semiring, base, u, mats, v):
        if semiring not in _SEMIRINGS:
            raise ValueError(f"unknown semiring {semiring!r}")
        self.semiring = semiring
        self.base = base
        self.u = tuple(u)
        self.mats = tuple(tuple(tuple(row) for row in m) for m in mats)
        self.v = tuple(v)
        self.inf_part = None  # optional InfDecomposition, set by producers
        r = len(self.u)
        if len(self.mats) != base:
            raise ValueError(f"need one matrix per digit, got {len(self.mats)}")
        for m in self.mats:
            if len(m) != r or any(len(row) != r for row in m):
                raise ValueError("matrix rank mismatch")
        if len(self.v) != r:
            raise ValueError("vector rank mismatch")
        for entry in self._entries():
            self._check_entry(entry)

    def _entries(self):
        yield from self.u
        for m in self.mats:
            for row in m:
                yield from row
        yield from self.v

    def _check_entry(self, x):
        if self.semiring == "nat":
            if not (isinstance(x, int) and x >= 0):
                raise ValueError(f"entry {x!r} is not a natural number")
        elif self.semiring == "natinf":
            if not ((isinstance(x, int) and x >= 0) or isinstance(x, _Infinity)):
                raise ValueError(f"entry {x!r} is not in the extended naturals")
        else:
            if not isinstance(x, (int, Fraction)):
                raise ValueError(f"entry {x!r} is not rational")

    @property
    def rank(self):
        return len(self.u)

    def eval_word(self, digits):
        """Value of the series at an lsd-first digit sequence."""
        row = self.u
        for d in digits:
            row = _vec_mat(row, self.mats[d])
        return _dot(row, self.v)

    def evaluate(self, n):
        """Value at the natural number n (canonical lsd digits)."""
        return self.eval_word(encode_lsd(n, self.base).digits())

    def trailing_normalized(self):
        """Whether mu(0) . v = v holds structurally."""
        return _mat_vec(self.mats[0], self.v) == self.v

    def leading_normalized(self):
        return _vec_mat(self.u, self.mats[0]) == self.u

    def __eq__(self, other):
        return (isinstance(other, LinRep)
                and (self.semiring, self.base, self.u, self.mats, self.v)
                == (other.semiring, other.base, other.u, other.mats, other.v))

    def __repr__(self):
        return f"<LinRep {self.semiring} base={self.base} rank={self.rank}>"


@dataclass
class InfDecomposition:
    """Split of an extended-natural series into its infinity locus and a
    natural-valued part that agrees wherever the value is finite."""
    infinite_part: Dfa
    finite_part: LinRep


def evaluate(l, n):
    return l.evaluate(n)


def zero_rep(base, semiring="nat"):
    zero = Fraction(0) if semiring == "rat" else 0
    return LinRep(semiring, base, (zero,), tuple(((zero,),) for _ in range(base)), (zero,))


# ---------------------------------------------------------------------------
# NFA <-> linear representation

def linrep_from_nfa(a):
    """Path-counting series of an epsilon-free NFA.

    u and v are the initial and final weight vectors, mu(d) the
    multiplicity matrices; the word value equals the number of accepting
    paths (weighted by multiplicities).
    """
    if a.has_eps():
        raise ValueError("linrep_from_nfa requires an epsilon-free NFA; use eps_saturate")
    if a.arity != 1:
        raise ValueError("series are over arity-1 words")
    n = a.n_states
    u = tuple(a.initials.get(q, 0) for q in range(n))
    v = tuple(a.finals.get(q, 0) for q in range(n))
    mats = []
    for d in range(a.base):
        m = [[0] * n for _ in range(n)]
        for q in range(n):
            for t, mult in a.steps[q].get(d, {}).items():
                m[q][t] = mult
        mats.append(m)
    semiring = "natinf" if any(isinstance(x, _Infinity) for x in _iter_all(u, mats, v)) else "nat"
    return LinRep(semiring, a.base, u, mats, v)


def _iter_all(u, mats, v):
    yield from u
    for m in mats:
        for row in m:
            yield from row
    yield from v


def _rank_pad(l):
    """Rank-(r+2) representation with unit u, v and value 0 at the empty word."""
    r = l.rank
    u2 = (1,) + (0,) * (r + 1)
    v2 = (0,) * (r + 1) + (1,)
    mats2 = []
    for m in l.mats:
        um = _vec_mat(l.u, m)
        umv = _dot(um, l.v)
        mv = _mat_vec(m, l.v)
        top = (0,) + um + (umv,)
        middle = [(0,) + m[i] + (mv[i],) for i in range(r)]
        bottom = (0,) * (r + 2)
        mats2.append((top, *middle, bottom))
    return LinRep(l.semiring, l.base, u2, mats2, v2)


def nfa_from_linrep(l):
    """NFA whose path counts realize the series on nonempty words.

    The representation is first padded to have indicator end vectors and
    value 0 at the empty word; each state is then copied once per unit of
    the largest matrix entry so that multiplicities become path counts.
    """
    if l.semiring not in ("nat",):
        raise ValueError("nfa_from_linrep needs a series over the naturals")
    l2 = _rank_pad(l)
    n = l2.rank
    m = max((x for mat in l2.mats for row in mat for x in row), default=0)
    m = max(m, 1)
    nfa = Nfa(l.base, 1, n * m, initials={0: 1}, finals={})
    for s in range(m):
        nfa.finals[(n - 1) * m + s] = 1
    for d, mat in enumerate(l2.mats):
        for i in range(n):
            for r in range(n):
                count = mat[i][r]
                for j in range(m):
                    for s in range(count):
                        nfa.add_edge(i * m + j, d, r * m + s)
    return nfa


# ---------------------------------------------------------------------------
# Exact epsilon saturation

def _tarjan_sccs(n, succ):
    """SCCs in reverse topological order (every SCC before its predecessors)."""
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    sccs = []
    counter = [0]
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            node, it = work[-1]
            advanced = False
            for t in it:
                if index[t] is None:
                    index[t] = low[t] = counter[0]
                    counter[0] += 1
                    stack.append(t)
                    on_stack[t] = True
                    work.append((t, iter(succ[t])))
                    advanced = True
                    break
                elif on_stack[t]:
                    if index[t] < low[node]:
                        low[node] = index[t]
            if not advanced:
                work.pop()
                if work:
                    parent = work[-1][0]
                    if low[node] < low[parent]:
                        low[parent] = low[node]
                if low[node] == index[node]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == node:
                            break
                    sccs.append(comp)
    return sccs


def _eps_star(n, eps):
    """D = sum of all epsilon-path weights; entry INF iff some connecting
    path passes through an epsilon cycle."""
    succ = [list(eps[q].keys()) for q in range(n)]
    sccs = _tarjan_sccs(n, succ)
    scc_of = [0] * n
    cyclic = [False] * n
    for ci, comp in enumerate(sccs):
        has_cycle = len(comp) > 1 or any(q in eps[q] for q in comp)
        for q in comp:
            scc_of[q] = ci
            cyclic[q] = has_cycle
    # D rows, processed sinks-first so successors are already known.
    rows = [None] * n
    inf_targets = [0] * n  # bitmask of states j with D[q][j] = INF
    reach = [0] * n        # bitmask of epsilon-reachable states (incl. q)
    for comp in sccs:
        comp_reach = 0
        comp_inf = 0
        for q in comp:
            comp_reach |= 1 << q
        for q in comp:
            for t in succ[q]:
                if scc_of[t] != scc_of[q]:
                    comp_reach |= reach[t]
                    comp_inf |= inf_targets[t]
        if cyclic[comp[0]]:
            comp_inf |= comp_reach
        for q in comp:
            reach[q] = comp_reach
            inf_targets[q] = comp_inf
        for q in comp:
            if cyclic[q]:
                continue  # finite entries of cyclic states are never used
            row = {q: 1}
            for t, mult in eps[q].items():
                if cyclic[t]:
                    continue
                for j, c in rows[t].items():
                    row[j] = row.get(j, 0) + mult * c
            rows[q] = row
    d = []
    for q in range(n):
        row = [0] * n
        mask = inf_targets[q]
        if not cyclic[q] and rows[q]:
            for j, c in rows[q].items():
                row[j] = c
        rem = mask
        while rem:
            low = rem & -rem
            row[low.bit_length() - 1] = INF
            rem ^= low
        d.append(tuple(row))
    return tuple(d)


def eps_saturate(a):
    """Epsilon-free NFA with the same path counts, over extended naturals.

    Computes the exact epsilon-path weight matrix D (INF where a cycle
    makes the family infinite) and folds it into the transitions and the
    final weights.
    """
    if not a.has_eps():
        return a
    n = a.n_states
    d = _eps_star(n, a.eps)
    out = Nfa(a.base, a.arity, n, initials=dict(a.initials), finals={})
    v = [a.finals.get(q, 0) for q in range(n)]
    new_v = _mat_vec(d, v)
    for q in range(n):
        if new_v[q] != 0:
            out.finals[q] = new_v[q]
    nsym = a.base ** a.arity
    for s in range(nsym):
        # mu(s) = D . D_s, rows computed sparsely
        for q in range(n):
            acc = {}
            row = d[q]
            for mid in range(n):
                w = row[mid]
                if w == 0:
                    continue
                for t, mult in a.steps[mid].get(s, {}).items():
                    prev = acc.get(t, 0)
                    acc[t] = prev + w * mult
            for t, mult in acc.items():
                if mult != 0:
                    out.steps[q].setdefault(s, {})[t] = mult
    return out


def trim_nfa(a):
    """Restrict to states on some path from an initial to a final state."""
    fwd = [set() for _ in range(a.n_states)]
    for q in range(a.n_states):
        for row in a.steps[q].values():
            fwd[q].update(row)
        fwd[q].update(a.eps[q])
    reach = set(a.initials)
    stack = list(a.initials)
    while stack:
        q = stack.pop()
        for t in fwd[q]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    back = [set() for _ in range(a.n_states)]
    for q in range(a.n_states):
        for t in fwd[q]:
            back[t].add(q)
    useful = {q for q in a.finals if q in reach}
    stack = list(useful)
    while stack:
        q = stack.pop()
        for t in back[q]:
            if t in reach and t not in useful:
                useful.add(t)
                stack.append(t)
    keep = sorted(useful)
    renum = {q: i for i, q in enumerate(keep)}
    out = Nfa(a.base, a.arity, len(keep),
              initials={renum[q]: w for q, w in a.initials.items() if q in useful},
              finals={renum[q]: w for q, w in a.finals.items() if q in useful})
    for q in keep:
        for s, row in a.steps[q].items():
            for t, mult in row.items():
                if t in useful:
                    out.add_edge(renum[q], s, renum[t], mult)
        for t, mult in a.eps[q].items():
            if t in useful:
                out.add_eps(renum[q], renum[t], mult)
    return out


# ---------------------------------------------------------------------------
# Leading and trailing zeros

def reverse_series(l):
    """Representation of the mirror series: value(w) = original(reversed w)."""
    return LinRep(l.semiring, l.base,
                  l.v, tuple(_transpose(m) for m in l.mats), l.u)


def normalize_leading(l):
    """Representation g with (g, 0^i w) = (f, w) for canonical w, built by
    the doubled-block construction; satisfies u . mu(0) = u structurally."""
    r = l.rank
    zero = Fraction(0) if l.semiring == "rat" else 0
    u2 = (zero,) * r + l.u
    mats2 = []
    for d, m in enumerate(l.mats):
        rows = [tuple(m[i]) + (zero,) * r for i in range(r)]
        if d == 0:
            rows += [(zero,) * r + tuple(1 if i == j else 0 for j in range(r))
                     for i in range(r)]
        else:
            rows += [tuple(m[i]) + (zero,) * r for i in range(r)]
        mats2.append(tuple(rows))
    v2 = l.v + l.v
    return LinRep(l.semiring, l.base, u2, mats2, v2)


def normalize_trailing(l):
    """Representation g with (g, w 0^i) = (f, w) for w without trailing
    zeros; satisfies mu(0) . v = v, the form evaluate() relies on."""
    return reverse_series(normalize_leading(reverse_series(l)))


# ---------------------------------------------------------------------------
# Infinity handling

_RP_ZERO, _RP_POS, _RP_INF = 0, 1, 2


def _tau(x):
    if isinstance(x, _Infinity):
        return _RP_INF
    return _RP_ZERO if x == 0 else _RP_POS


def _rp_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return a if a >= b else b


def _xi(x):
    return 0 if isinstance(x, _Infinity) else x


def decompose_infinity(l, limit=1_000_000):
    """Split an extended-natural series into (infinity locus, finite part).

    The locus automaton runs the abstraction of the representation onto
    {zero, positive, infinity}, exploring only the row vectors reachable
    from the abstracted u; a word is accepted exactly when the series
    value is infinite.  The finite part replaces every infinity entry by
    zero, which cannot change any finite value because such entries only
    ever meet zero there.
    """
    if l.semiring == "rat":
        raise ValueError("decompose_infinity applies to nat/natinf series")
    k = l.base
    mhat = [[tuple(_tau(x) for x in row) for row in m] for m in l.mats]
    vhat = tuple(_tau(x) for x in l.v)
    start = tuple(_tau(x) for x in l.u)
    ids = {start: 0}
    order = [start]
    rows = []
    finals = set()
    i = 0
    while i < len(order):
        row = order[i]
        if max((_rp_mul(row[j], vhat[j]) for j in range(len(row))), default=0) == _RP_INF:
            finals.add(i)
        table_row = []
        for d in range(k):
            m = mhat[d]
            nxt = tuple(
                max((_rp_mul(row[x], m[x][j]) for x in range(len(row))), default=0)
                for j in range(len(row)))
            t = ids.get(nxt)
            if t is None:
                t = len(order)
                if limit is not None and t >= limit:
                    raise automata.StateLimit(
                        f"infinity-locus exploration exceeded {limit} rows")
                ids[nxt] = t
                order.append(nxt)
            table_row.append(t)
        rows.append(table_row)
        i += 1
    dfa = minimize(Dfa(k, 1, rows, 0, finals))
    finite = LinRep("nat", k, tuple(_xi(x) for x in l.u),
                    tuple(tuple(tuple(_xi(x) for x in row) for row in m) for m in l.mats),
                    tuple(_xi(x) for x in l.v))
    return InfDecomposition(dfa, finite)


def _char_rep(dfa):
    """0/1 linear representation of a DFA's characteristic series."""
    n = dfa.n_states
    u = tuple(1 if q == dfa.initial else 0 for q in range(n))
    v = tuple(1 if q in dfa.finals else 0 for q in range(n))
    mats = []
    for d in range(dfa.base):
        m = [[0] * n for _ in range(n)]
        for q in range(n):
            m[q][dfa.transitions[q][d]] = 1
        mats.append(m)
    return LinRep("nat", dfa.base, u, mats, v)


def _hadamard(a, b):
    """Tensor-product representation of the pointwise product of two series."""
    if a.base != b.base:
        raise ValueError("base mismatch")
    ra, rb = a.rank, b.rank
    u = tuple(a.u[i] * b.u[j] for i in range(ra) for j in range(rb))
    v = tuple(a.v[i] * b.v[j] for i in range(ra) for j in range(rb))
    mats = []
    for d in range(a.base):
        ma, mb = a.mats[d], b.mats[d]
        m = [[ma[i][x] * mb[j][y] for x in range(ra) for y in range(rb)]
             for i in range(ra) for j in range(rb)]
        mats.append(m)
    return LinRep(a.semiring if a.semiring != "nat" else b.semiring, a.base, u, mats, v)


def push_infinity_to_u(l):
    """Value-equal representation whose infinity entries all sit in u.

    Uses the locus decomposition: the finite part is masked by the
    complement of the locus via a tensor product, and the locus itself is
    re-added as a characteristic block scaled by infinity in u.
    """
    dec = decompose_infinity(l)
    locus = dec.infinite_part
    masked = _hadamard(_char_rep(automata.complement(locus)), dec.finite_part)
    chi = _char_rep(locus)
    u = masked.u + tuple(INF if x == 1 else 0 for x in chi.u)
    v = masked.v + chi.v
    mats = []
    for d in range(l.base):
        ma, mb = masked.mats[d], chi.mats[d]
        ra, rb = masked.rank, chi.rank
        rows = [tuple(ma[i]) + (0,) * rb for i in range(ra)]
        rows += [(0,) * ra + tuple(mb[i]) for i in range(rb)]
        mats.append(rows)
    out = LinRep("natinf", l.base, u, mats, v)
    out.inf_part = dec
    return out


# ---------------------------------------------------------------------------
# Counting pipelines

def _unique_representative_nfa(p):
    """Epsilon NFA counting second-track witnesses of a pad-closed pair DFA.

    Each value pair gets exactly one representative: the joint word of
    length max(|n|, |i|) whose first-track padding is replaced by a marker
    read as epsilon.  Modes: 0 digit zone (first track canonical so far),
    1 digit zone ending in zero, 2 marker zone after a nonzero second
    digit, 3 marker zone after a zero second digit.
    """
    k = p.base
    index = automata.sym_index(k, 2)
    nfa = Nfa(k, 1, 4 * p.n_states, initials={p.initial * 4: 1}, finals={})
    for q in range(p.n_states):
        row = p.transitions[q]
        for a in range(k):
            for b in range(k):
                t = row[index[(a, b)]]
                for mode in (0, 1):
                    nfa.add_edge(q * 4 + mode, a, t * 4 + (1 if a == 0 else 0))
        for b in range(k):
            t = row[index[(0, b)]]
            tmode = 2 if b != 0 else 3
            nfa.add_eps(q * 4 + 0, t * 4 + tmode)
            nfa.add_eps(q * 4 + 2, t * 4 + tmode)
            nfa.add_eps(q * 4 + 3, t * 4 + tmode)
    for q in p.finals:
        nfa.finals[q * 4 + 0] = 1
        nfa.finals[q * 4 + 2] = 1
    return nfa


def _attach_decomposition(rep):
    dec = decompose_infinity(rep)
    empty, _ = automata.is_empty(dec.infinite_part)
    if empty:
        out = dec.finite_part
        out.inf_part = dec
        return out
    rep.inf_part = dec
    return rep


def count_parameter(p):
    """Series n -> |{ i : (n, i) accepted by p }| for a pad-closed pair DFA.

    Track 0 is the parameter, track 1 the counted witness.  The result is
    over the naturals when every count is finite, else over the extended
    naturals; either way the infinity-locus decomposition is attached as
    .inf_part.
    """
    if p.arity != 2:
        raise ValueError(f"count_parameter needs an arity-2 automaton, got {p.arity}")
    pmin = minimize(p)
    same, witness = equivalent(pmin, pad_closure(pmin))
    if not same:
        raise ValueError(f"automaton is not pad-closed (differs at {witness})")
    nfa = trim_nfa(_unique_representative_nfa(pmin))
    if nfa.n_states == 0:
        out = zero_rep(p.base)
        out.inf_part = InfDecomposition(
            minimize(Dfa(p.base, 1, [[0] * p.base], 0, set())), zero_rep(p.base))
        return out
    rep = linrep_from_nfa(eps_saturate(nfa))
    return _attach_decomposition(rep)


def count_measure(p, sample_limit=24):
    """Measure value from its strict level predicate: p(n, t) holds iff the
    measure at n exceeds t, so counting witnesses t >= 0 yields the value.

    Downward closure in t is the caller's obligation; a small sample is
    checked and violations raise.
    """
    if p.arity != 2:
        raise ValueError(f"count_measure needs an arity-2 automaton, got {p.arity}")
    for n in range(min(sample_limit, 12)):
        seen_false = False
        for t in range(sample_limit):
            member = p.accepts_values((n, t))
            if member and seen_false:
                raise ValueError(
                    f"level predicate is not downward closed in t at n={n}, t={t}")
            if not member:
                seen_false = True
    return count_parameter(p)


def representation_count(digit_set, k):
    """Series counting lsd base-k digit strings over the given digit set
    (no trailing zeros) whose weighted digit sum is n.

    A carry automaton guesses the string digit by digit against the input;
    positions beyond the input are epsilon moves, which the saturation
    step turns into exact counts or infinity.
    """
    if k < 2:
        raise ValueError(f"base must be >= 2, got {k}")
    digit_set = sorted(set(digit_set))
    # phases: 0 start, 1 last guess zero, 2 last guess nonzero,
    #         3 string finished (consuming padded input),
    #         4/5 tail guesses past the input end (last zero / nonzero)
    ids = {(0, 0): 0}
    order = [(0, 0)]
    edges = []  # (src, digit-or-None, dst)

    def state(c, ph):
        sid = ids.get((c, ph))
        if sid is None:
            sid = len(order)
            ids[(c, ph)] = sid
            order.append((c, ph))
        return sid

    i = 0
    while i < len(order):
        c, ph = order[i]
        src = i
        i += 1
        if ph in (0, 1, 2):
            for d in range(k):
                for e in digit_set:
                    if (c + e - d) % k == 0:
                        edges.append((src, d, state((c + e - d) // k, 1 if e == 0 else 2)))
                if ph in (0, 2) and (c - d) % k == 0:
                    edges.append((src, d, state((c - d) // k, 3)))
            for e in digit_set:
                if (c + e) % k == 0:
                    edges.append((src, None, state((c + e) // k, 4 if e == 0 else 5)))
        elif ph == 3:
            for d in range(k):
                if (c - d) % k == 0:
                    edges.append((src, d, state((c - d) // k, 3)))
        else:
            for e in digit_set:
                if (c + e) % k == 0:
                    edges.append((src, None, state((c + e) // k, 4 if e == 0 else 5)))
    nfa = Nfa(k, 1, len(order), initials={0: 1}, finals={})
    for sid, (c, ph) in enumerate(order):
        if c == 0 and ph in (0, 2, 3, 5):
            nfa.finals[sid] = 1
    for src, d, dst in edges:
        if d is None:
            nfa.add_eps(src, dst)
        else:
            nfa.add_edge(src, d, dst)
    nfa = trim_nfa(nfa)
    if nfa.n_states == 0:
        out = zero_rep(k)
        out.inf_part = InfDecomposition(
            minimize(Dfa(k, 1, [[0] * k], 0, set())), zero_rep(k))
        return out
    rep = linrep_from_nfa(eps_saturate(nfa))
    return _attach_decomposition(rep)


# ---------------------------------------------------------------------------
# Kernel relations

def _to_rat(l):
    if l.semiring == "natinf":
        if any(isinstance(x, _Infinity) for x in l._entries()):
            raise ValueError("kernel relations need a series without infinities")
    conv = Fraction
    return LinRep("rat", l.base,
                  tuple(conv(x) for x in l.u),
                  tuple(tuple(tuple(conv(x) for x in row) for row in m) for m in l.mats),
                  tuple(conv(x) for x in l.v))


def _echelon_insert(basis, vec):
    """Reduce vec against an echelon basis [(pivot, vector)]; insert if new.

    Returns True when the vector enlarged the span.
    """
    vec = list(vec)
    for pivot, b in basis:
        if vec[pivot] != 0:
            coef = vec[pivot] / b[pivot]
            for j in range(len(vec)):
                vec[j] -= coef * b[j]
    for j, x in enumerate(vec):
        if x != 0:
            basis.append((j, vec))
            return True
    return False


def _observability_basis(l):
    """Basis of span{ mu(w) v : w }, closed under left products."""
    basis = []
    queue = []
    if _echelon_insert(basis, l.v):
        queue.append(l.v)
    while queue:
        vec = queue.pop()
        for m in l.mats:
            nxt = _mat_vec(m, vec)
            if _echelon_insert(basis, nxt):
                queue.append(nxt)
    return [tuple(b) for _, b in basis]


def _kernel_row(l, modulus, residue):
    """Row functional of the kernel sequence n -> f(modulus * n + residue)."""
    e = 0
    m = modulus
    while m > 1:
        if m % l.base != 0:
            raise ValueError(f"modulus {modulus} is not a power of the base {l.base}")
        m //= l.base
        e += 1
    if not 0 <= residue < modulus:
        raise ValueError(f"residue {residue} out of range for modulus {modulus}")
    digits = []
    r = residue
    for _ in range(e):
        r, d = divmod(r, l.base)
        digits.append(d)
    row = l.u
    for d in digits:
        row = _vec_mat(row, l.mats[d])
    return row


@dataclass
class Relation:
    """One discovered identity: f(m n + c) = sum of coef * f(m' n + c')."""
    lhs: tuple
    combo: dict

    def __str__(self):
        def term(mc):
            m, c = mc
            inner = "n" if m == 1 else f"{m}n"
            return f"f({inner}+{c})" if c else f"f({inner})"

        if not self.combo:
            return f"{term(self.lhs)} = 0"
        parts = []
        for mc, coef in self.combo.items():
            if coef == 0:
                continue
            mag = abs(coef)
            text = term(mc) if mag == 1 else f"{mag}*{term(mc)}"
            parts.append(("- " if coef < 0 else "+ ") + text)
        body = " ".join(parts).lstrip("+ ") or "0"
        return f"{term(self.lhs)} = {body}"


@dataclass
class KernelSystem:
    relations: list
    basis: list
    closed: bool
    depth: int


def _functional(l, obasis, modulus, residue):
    row = _kernel_row(l, modulus, residue)
    return tuple(_dot(row, b) for b in obasis)


def _solve_combo(columns, target):
    """Exact rational solve of sum(coef_i * columns_i) = target, or None."""
    if not columns:
        return None if any(x != 0 for x in target) else []
    rows = len(target)
    aug = [[col[r] for col in columns] + [target[r]] for r in range(rows)]
    ncols = len(columns)
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][ncols] != 0:
            return None
    coeffs = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        coeffs[c] = aug[i][ncols]
    return coeffs


def kernel_relations(l, depth):
    """Discover an exact linear recurrence system among kernel sequences.

    Kernel sequences n -> f(k^e n + c) for e <= depth are scanned
    breadth-first; each is either expressed exactly (over the rationals,
    verified against the full reachable observability space, not sampled)
    in terms of the independent ones found so far, or becomes a new basis
    sequence.  The system is closed when every basis sequence has all its
    children expressed; otherwise the result is flagged partial.
    """
    lr = _to_rat(l if l.trailing_normalized() else normalize_trailing(l))
    obasis = _observability_basis(lr)
    k = l.base
    basis = []        # [(modulus, residue)]
    basis_funcs = []  # matching functionals
    relations = []
    expressed = set()
    for e in range(depth + 1):
        modulus = k ** e
        for c in range(modulus):
            func = _functional(lr, obasis, modulus, c)
            combo = _solve_combo(basis_funcs, func)
            if combo is None:
                basis.append((modulus, c))
                basis_funcs.append(func)
            else:
                relations.append(Relation(
                    (modulus, c),
                    {basis[i]: combo[i] for i in range(len(basis)) if combo[i] != 0}))
                expressed.add((modulus, c))
    closed = all(m * k <= k ** depth for m, _ in basis)
    return KernelSystem(relations, basis, closed, depth)


def verify_relation(l, lhs, combo):
    """Exact check of f(m n + c) = sum coef * f(m' n + c') for all n.

    lhs is (m, c); combo maps (m', c') to rational coefficients.  The
    comparison runs over the reachable observability space, which decides
    the identity for every n at once.
    """
    lr = _to_rat(l if l.trailing_normalized() else normalize_trailing(l))
    obasis = _observability_basis(lr)
    target = list(_functional(lr, obasis, *lhs))
    for (m, c), coef in combo.items():
        func = _functional(lr, obasis, m, c)
        for j in range(len(target)):
            target[j] -= Fraction(coef) * func[j]
    return all(x == 0 for x in target)


# ---------------------------------------------------------------------------
# Text format

def _entry_str(x):
    if isinstance(x, _Infinity):
        return "inf"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def _entry_parse(text, semiring):
    if text == "inf":
        if semiring != "natinf":
            raise ValueError("inf entry outside the natinf semiring")
        return INF
    if "/" in text:
        if semiring != "rat":
            raise ValueError("rational entry outside the rat semiring")
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    value = int(text)
    return Fraction(value) if semiring == "rat" else value


def store(l):
    """Text form: header, u row, the base matrices row by row, then v."""
    lines = [f"linrep semiring={l.semiring} base={l.base} rank={l.rank}"]
    lines.append(" ".join(_entry_str(x) for x in l.u))
    for m in l.mats:
        for row in m:
            lines.append(" ".join(_entry_str(x) for x in row))
    lines.append(" ".join(_entry_str(x) for x in l.v))
    return "\n".join(lines) + "\n"


def load(text):
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    header = lines[0].split()
    if header[0] != "linrep":
        raise ValueError("expected linrep header")
    fields = dict(p.partition("=")[::2] for p in header[1:])
    semiring = fields["semiring"]
    base = int(fields["base"])
    rank = int(fields["rank"])
    need = 2 + base * rank
    if len(lines) != 1 + need:
        raise ValueError(f"expected {need} data lines, got {len(lines) - 1}")
    rows = [[_entry_parse(x, semiring) for x in ln.split()] for ln in lines[1:]]
    for row in rows:
        if len(row) != rank:
            raise ValueError("row width disagrees with the declared rank")
    u = rows[0]
    mats = []
    at = 1
    for _ in range(base):
        mats.append(rows[at:at + rank])
        at += rank
    v = rows[at]
    return LinRep(semiring, base, u, mats, v)
