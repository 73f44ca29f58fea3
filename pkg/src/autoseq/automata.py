"""Finite automata over tuple-digit alphabets.

Words are lsd-first digit words (see numeration).  A symbol of an arity-r
automaton in base k is an r-tuple over {0, ..., k-1}; internally symbols
are integers in [0, k^r) in lexicographic tuple order (track 0 most
significant), which keeps transition tables flat and canonical orderings
reproducible.

DFAs are always complete and have a single initial state.  NFAs admit
epsilon transitions and positive transition multiplicities; initial and
final states may additionally carry multiplicities, which path-counting
constructions need (a plain state set means multiplicity one).
"""

from .numeration import DigitWord, encode_tuple


class StateLimit(RuntimeError):
    """A construction exceeded its state-count ceiling."""


_ALPHABETS = {}


def alphabet(k, arity):
    """Lex-ordered tuple alphabet for base k and the given arity (cached)."""
    key = (k, arity)
    cached = _ALPHABETS.get(key)
    if cached is None:
        syms = [()]
        for _ in range(arity):
            syms = [s + (d,) for s in syms for d in range(k)]
        index = {s: i for i, s in enumerate(syms)}
        cached = (tuple(syms), index)
        _ALPHABETS[key] = cached
    return cached


def sym_tuples(k, arity):
    return alphabet(k, arity)[0]


def sym_index(k, arity):
    return alphabet(k, arity)[1]


class Dfa:
    """Complete deterministic automaton over the tuple-digit alphabet."""

    __slots__ = ("base", "arity", "transitions", "initial", "finals")

    def __init__(self, base, arity, transitions, initial, finals):
        self.base = base
        self.arity = arity
        self.transitions = tuple(tuple(row) for row in transitions)
        self.initial = initial
        self.finals = frozenset(finals)
        nsym = base ** arity
        for row in self.transitions:
            if len(row) != nsym:
                raise ValueError("transition table is not total")
            for t in row:
                if not 0 <= t < len(self.transitions):
                    raise ValueError(f"transition target {t} out of range")
        if not 0 <= initial < len(self.transitions):
            raise ValueError("initial state out of range")
        if any(f >= len(self.transitions) for f in self.finals):
            raise ValueError("final state out of range")

    @property
    def n_states(self):
        return len(self.transitions)

    def step(self, state, sym_id):
        return self.transitions[state][sym_id]

    def run(self, word):
        """Final state reached on a DigitWord or iterable of digit tuples."""
        index = sym_index(self.base, self.arity)
        q = self.initial
        for sym in word:
            q = self.transitions[q][index[tuple(sym)]]
        return q

    def accepts(self, word):
        return self.run(word) in self.finals

    def accepts_values(self, values):
        """Membership of the value tuple, via its canonical joint encoding."""
        values = tuple(values)
        if all(v == 0 for v in values):
            return self.initial in self.finals
        return self.accepts(encode_tuple(values, self.base))

    def __eq__(self, other):
        return (
            isinstance(other, Dfa)
            and self.base == other.base
            and self.arity == other.arity
            and self.transitions == other.transitions
            and self.initial == other.initial
            and self.finals == other.finals
        )

    def __hash__(self):
        return hash((self.base, self.arity, self.transitions, self.initial, self.finals))

    def __repr__(self):
        return f"<Dfa base={self.base} arity={self.arity} states={self.n_states}>"


class Nfa:
    """Nondeterministic automaton with epsilon moves and multiplicities.

    `steps[q]` maps symbol id -> {target: multiplicity}; `eps[q]` maps
    target -> multiplicity.  `initials` and `finals` map state -> weight.
    """

    __slots__ = ("base", "arity", "n_states", "steps", "eps", "initials", "finals")

    def __init__(self, base, arity, n_states, steps=None, eps=None, initials=(), finals=()):
        self.base = base
        self.arity = arity
        self.n_states = n_states
        self.steps = [dict() for _ in range(n_states)] if steps is None else steps
        self.eps = [dict() for _ in range(n_states)] if eps is None else eps
        self.initials = dict(initials) if isinstance(initials, dict) else {q: 1 for q in initials}
        self.finals = dict(finals) if isinstance(finals, dict) else {q: 1 for q in finals}

    def add_edge(self, src, sym_id, dst, mult=1):
        if mult < 1:
            raise ValueError("multiplicity must be positive")
        row = self.steps[src].setdefault(sym_id, {})
        row[dst] = row.get(dst, 0) + mult

    def add_eps(self, src, dst, mult=1):
        if mult < 1:
            raise ValueError("multiplicity must be positive")
        self.eps[src][dst] = self.eps[src].get(dst, 0) + mult

    def has_eps(self):
        return any(self.eps[q] for q in range(self.n_states))

    def __repr__(self):
        return f"<Nfa base={self.base} arity={self.arity} states={self.n_states}>"


def determinize(a, limit=None):
    """Subset construction; multiplicities collapse to plain membership."""
    if a.has_eps():
        raise ValueError("determinize requires an epsilon-free NFA; call eps_eliminate first")
    nsym = a.base ** a.arity
    masks = [[0] * nsym for _ in range(a.n_states)]
    for q in range(a.n_states):
        for s, row in a.steps[q].items():
            m = 0
            for t in row:
                m |= 1 << t
            masks[q][s] = m
    final_mask = 0
    for q in a.finals:
        final_mask |= 1 << q
    start = 0
    for q in a.initials:
        start |= 1 << q
    subset_ids = {start: 0}
    order = [start]
    trans = []
    finals = set()
    i = 0
    while i < len(order):
        subset = order[i]
        row = []
        if subset & final_mask:
            finals.add(i)
        for s in range(nsym):
            target = 0
            rem = subset
            while rem:
                low = rem & -rem
                target |= masks[low.bit_length() - 1][s]
                rem ^= low
            t_id = subset_ids.get(target)
            if t_id is None:
                t_id = len(order)
                if limit is not None and t_id >= limit:
                    raise StateLimit(f"determinization exceeded {limit} states")
                subset_ids[target] = t_id
                order.append(target)
            row.append(t_id)
        trans.append(row)
        i += 1
    return Dfa(a.base, a.arity, trans, 0, finals)


def complement(a):
    """Swap accepting and non-accepting states of a complete DFA."""
    return Dfa(a.base, a.arity, a.transitions, a.initial,
               set(range(a.n_states)) - a.finals)


_BOOL_OPS = {
    "and": lambda x, y: x and y,
    "or": lambda x, y: x or y,
    "and-not": lambda x, y: x and not y,
    "xor": lambda x, y: x != y,
}


def product(a, b, op, limit=None):
    """Pairing construction; membership is the boolean op of memberships."""
    if a.base != b.base or a.arity != b.arity:
        raise ValueError("product requires matching base and arity")
    fn = _BOOL_OPS[op]
    nsym = a.base ** a.arity
    pair_ids = {(a.initial, b.initial): 0}
    order = [(a.initial, b.initial)]
    trans = []
    finals = set()
    i = 0
    while i < len(order):
        qa, qb = order[i]
        if fn(qa in a.finals, qb in b.finals):
            finals.add(i)
        rowa = a.transitions[qa]
        rowb = b.transitions[qb]
        row = []
        for s in range(nsym):
            key = (rowa[s], rowb[s])
            t = pair_ids.get(key)
            if t is None:
                t = len(order)
                if limit is not None and t >= limit:
                    raise StateLimit(f"product exceeded {limit} states")
                pair_ids[key] = t
                order.append(key)
            row.append(t)
        trans.append(row)
        i += 1
    return Dfa(a.base, a.arity, trans, 0, finals)


def project(a, track):
    """Drop one track; the result guesses the removed digits (an NFA)."""
    if not 0 <= track < a.arity:
        raise IndexError(f"track {track} out of range for arity {a.arity}")
    return project_many(a, {track})


def project_many(a, tracks):
    """Drop several tracks at once.

    For adjacent existential quantifiers this is far cheaper than
    projecting one track at a time: the single subset construction decides
    all removed witnesses together.
    """
    tracks = set(tracks)
    if not tracks <= set(range(a.arity)):
        raise IndexError(f"tracks {sorted(tracks)} out of range for arity {a.arity}")
    if len(tracks) >= a.arity:
        raise ValueError("cannot project every track; use is_empty instead")
    keep = [t for t in range(a.arity) if t not in tracks]
    syms = sym_tuples(a.base, a.arity)
    new_index = sym_index(a.base, len(keep))
    out = Nfa(a.base, len(keep), a.n_states, initials={a.initial: 1},
              finals={q: 1 for q in a.finals})
    for q in range(a.n_states):
        row = a.transitions[q]
        for s, sym in enumerate(syms):
            reduced = new_index[tuple(sym[t] for t in keep)]
            out.add_edge(q, reduced, row[s])
    return out


def inflate(a, position):
    """Insert a new, ignored track at the given position."""
    if not 0 <= position <= a.arity:
        raise IndexError(f"position {position} out of range for arity {a.arity}")
    k = a.base
    new_arity = a.arity + 1
    new_syms = sym_tuples(k, new_arity)
    old_index = sym_index(k, a.arity)
    mapping = [old_index[s[:position] + s[position + 1:]] for s in new_syms]
    trans = [[row[m] for m in mapping] for row in a.transitions]
    return Dfa(k, new_arity, trans, a.initial, a.finals)


def permute_tracks(a, order):
    """Reorder tracks; order[i] is the old track placed at new position i."""
    if sorted(order) != list(range(a.arity)):
        raise ValueError(f"order {order} is not a permutation of the tracks")
    old_index = sym_index(a.base, a.arity)
    new_syms = sym_tuples(a.base, a.arity)
    inverse = [0] * a.arity
    for new_pos, old_pos in enumerate(order):
        inverse[old_pos] = new_pos
    mapping = []
    for s in new_syms:
        old_sym = tuple(s[inverse[j]] for j in range(a.arity))
        mapping.append(old_index[old_sym])
    trans = [[row[m] for m in mapping] for row in a.transitions]
    return Dfa(a.base, a.arity, trans, a.initial, a.finals)


def pad_closure(a):
    """Close acceptance under adding and removing trailing zero symbols.

    Afterwards membership depends only on the decoded value tuple.  The
    result is minimized, which makes pad_closure a structural fixed point.
    """
    zero = 0  # lex id of the all-zero symbol
    # Step 1: accept w whenever some w·0^j is accepted (strip closure).
    # Following the zero-symbol chain from q either hits a final state or
    # cycles; memoize along the chain.
    accept_via_zeros = [None] * a.n_states
    for q in range(a.n_states):
        if accept_via_zeros[q] is not None:
            continue
        chain = []
        seen = {}
        cur = q
        while accept_via_zeros[cur] is None and cur not in seen:
            seen[cur] = len(chain)
            chain.append(cur)
            if cur in a.finals:
                break
            cur = a.transitions[cur][zero]
        if accept_via_zeros[cur] is not None:
            verdict = accept_via_zeros[cur]
        else:
            verdict = cur in a.finals
        for s in chain:
            accept_via_zeros[s] = verdict
    finals1 = {q for q in range(a.n_states) if accept_via_zeros[q]}
    # Step 2: also accept w·0^j for accepted w.  Track a bit meaning "some
    # split of the input as u·0^j with u accepted exists"; deterministic.
    nsym = a.base ** a.arity
    ids = {}
    order = []
    trans = []
    finals = set()

    def state_id(q, bit):
        sid = ids.get((q, bit))
        if sid is None:
            sid = len(order)
            ids[(q, bit)] = sid
            order.append((q, bit))
        return sid

    state_id(a.initial, a.initial in finals1)
    i = 0
    while i < len(order):
        q, bit = order[i]
        if bit:
            finals.add(i)
        row = []
        for s in range(nsym):
            t = a.transitions[q][s]
            nbit = (t in finals1) or (bit and s == zero)
            row.append(state_id(t, nbit))
        trans.append(row)
        i += 1
    return minimize(Dfa(a.base, a.arity, trans, 0, finals))


def minimize(a):
    """Minimal complete DFA in canonical form.

    States are renumbered in breadth-first discovery order from the initial
    state with symbols taken in lexicographic order, so language-equal
    minimal automata are structurally identical.
    """
    nsym = a.base ** a.arity
    # Restrict to reachable states.
    reach = [a.initial]
    seen = {a.initial: 0}
    for q in reach:
        for t in a.transitions[q]:
            if t not in seen:
                seen[t] = len(reach)
                reach.append(t)
    trans = [[seen[a.transitions[q][s]] for s in range(nsym)] for q in reach]
    finals = {seen[q] for q in a.finals if q in seen}
    n = len(reach)
    # Hopcroft partition refinement.
    inverse = [[[] for _ in range(n)] for _ in range(nsym)]
    for q in range(n):
        for s in range(nsym):
            inverse[s][trans[q][s]].append(q)
    block_of = [0] * n
    fin = sorted(finals)
    nonfin = [q for q in range(n) if q not in finals]
    blocks = []
    if fin:
        for q in fin:
            block_of[q] = len(blocks)
        blocks.append(set(fin))
    if nonfin:
        for q in nonfin:
            block_of[q] = len(blocks)
        blocks.append(set(nonfin))
    worklist = list(range(len(blocks)))
    in_work = set(worklist)
    while worklist:
        b = worklist.pop()
        in_work.discard(b)
        splitter = list(blocks[b])
        for s in range(nsym):
            pre = set()
            for q in splitter:
                pre.update(inverse[s][q])
            touched = {}
            for q in pre:
                touched.setdefault(block_of[q], set()).add(q)
            for bid, inter in touched.items():
                blk = blocks[bid]
                if len(inter) == len(blk):
                    continue
                rest = blk - inter
                blocks[bid] = inter
                new_id = len(blocks)
                blocks.append(rest)
                for q in rest:
                    block_of[q] = new_id
                if bid in in_work:
                    worklist.append(new_id)
                    in_work.add(new_id)
                else:
                    smaller = new_id if len(rest) <= len(inter) else bid
                    worklist.append(smaller)
                    in_work.add(smaller)
    # Canonical BFS renumbering of the quotient.
    start = block_of[0]
    renum = {start: 0}
    bfs = [start]
    for b in bfs:
        rep = next(iter(blocks[b]))
        for s in range(nsym):
            t = block_of[trans[rep][s]]
            if t not in renum:
                renum[t] = len(bfs)
                bfs.append(t)
    out_trans = []
    out_finals = set()
    for b in bfs:
        rep = next(iter(blocks[b]))
        out_trans.append([renum[block_of[trans[rep][s]]] for s in range(nsym)])
        if rep in finals:
            out_finals.add(renum[b])
    return Dfa(a.base, a.arity, out_trans, 0, out_finals)


def is_empty(a):
    """(True, None) if L(a) is empty, else (False, shortest witness word).

    The witness is the lexicographically least among the shortest accepted
    words.
    """
    if a.initial in a.finals:
        return False, DigitWord(a.base, a.arity, ())
    syms = sym_tuples(a.base, a.arity)
    parent = {a.initial: None}
    queue = [a.initial]
    i = 0
    while i < len(queue):
        q = queue[i]
        for s in range(len(syms)):
            t = a.transitions[q][s]
            if t not in parent:
                parent[t] = (q, s)
                if t in a.finals:
                    word = []
                    cur = t
                    while parent[cur] is not None:
                        prev, sym = parent[cur]
                        word.append(syms[sym])
                        cur = prev
                    word.reverse()
                    return False, DigitWord(a.base, a.arity, tuple(word))
                queue.append(t)
        i += 1
    return True, None


def _trim_states(a):
    """States both reachable from the initial state and co-reachable to a final."""
    reach = {a.initial}
    stack = [a.initial]
    while stack:
        q = stack.pop()
        for t in a.transitions[q]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    pre = [[] for _ in range(a.n_states)]
    for q in reach:
        for t in a.transitions[q]:
            pre[t].append(q)
    co = set(f for f in a.finals if f in reach)
    stack = list(co)
    while stack:
        q = stack.pop()
        for p in pre[q]:
            if p not in co:
                co.add(p)
                stack.append(p)
    return reach & co


def is_finite(a):
    """True iff L(a) is finite: the trimmed automaton has no cycle."""
    useful = _trim_states(a)
    color = {}

    for root in useful:
        if root in color:
            continue
        stack = [(root, iter(a.transitions[root]))]
        color[root] = 1
        while stack:
            q, it = stack[-1]
            advanced = False
            for t in it:
                if t not in useful:
                    continue
                c = color.get(t)
                if c == 1:
                    return False
                if c is None:
                    color[t] = 1
                    stack.append((t, iter(a.transitions[t])))
                    advanced = True
                    break
            if not advanced:
                color[q] = 2
                stack.pop()
    return True


def equivalent(a, b):
    """(True, None) if same language, else (False, shortest difference word)."""
    if a.base != b.base or a.arity != b.arity:
        raise ValueError("equivalent requires matching base and arity")
    diff = product(a, b, "xor")
    empty, witness = is_empty(diff)
    return (True, None) if empty else (False, witness)


def eps_eliminate(a):
    """Language-preserving epsilon removal (multiplicities collapse to 1).

    Path counts are not preserved; use regseq.eps_saturate when they matter.
    """
    closures = []
    for q in range(a.n_states):
        cl = {q}
        stack = [q]
        while stack:
            p = stack.pop()
            for t in a.eps[p]:
                if t not in cl:
                    cl.add(t)
                    stack.append(t)
        closures.append(cl)
    out = Nfa(a.base, a.arity, a.n_states,
              initials=dict(a.initials), finals=dict(a.finals))
    for q in range(a.n_states):
        targets = {}
        for p in closures[q]:
            for s, row in a.steps[p].items():
                acc = targets.setdefault(s, set())
                for t in row:
                    acc.update(closures[t])
        for s, ts in targets.items():
            for t in ts:
                out.add_edge(q, s, t)
    for q in range(a.n_states):
        if any(t in a.finals for t in closures[q]):
            out.finals[q] = 1
    return out


def store(aut):
    """Text form of a Dfa or Nfa; bit-exact round trip with load()."""
    lines = []
    if isinstance(aut, Dfa):
        finals = ",".join(str(q) for q in sorted(aut.finals))
        lines.append(f"dfa base={aut.base} arity={aut.arity} states={aut.n_states} "
                     f"initial={aut.initial} finals={finals}")
        syms = sym_tuples(aut.base, aut.arity)
        for q in range(aut.n_states):
            for s, sym in enumerate(syms):
                label = ",".join(str(d) for d in sym)
                lines.append(f"{q} {label} 1 {aut.transitions[q][s]}")
    else:
        for weights, what in ((aut.initials, "initial"), (aut.finals, "final")):
            if any(w != 1 for w in weights.values()):
                raise ValueError(f"cannot store NFA with non-unit {what} weights")
        initials = ",".join(str(q) for q in sorted(aut.initials))
        finals = ",".join(str(q) for q in sorted(aut.finals))
        lines.append(f"nfa base={aut.base} arity={aut.arity} states={aut.n_states} "
                     f"initial={initials} finals={finals}")
        syms = sym_tuples(aut.base, aut.arity)
        for q in range(aut.n_states):
            for s in sorted(aut.steps[q]):
                label = ",".join(str(d) for d in syms[s])
                for t in sorted(aut.steps[q][s]):
                    lines.append(f"{q} {label} {aut.steps[q][s][t]} {t}")
            for t in sorted(aut.eps[q]):
                lines.append(f"{q} eps {aut.eps[q][t]} {t}")
    return "\n".join(lines) + "\n"


def load(text):
    """Parse the text automaton format produced by store()."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty automaton text")
    header = lines[0].split()
    kind = header[0]
    fields = {}
    for part in header[1:]:
        key, _, val = part.partition("=")
        fields[key] = val
    base = int(fields["base"])
    arity = int(fields["arity"])
    n_states = int(fields["states"])
    finals = [int(x) for x in fields["finals"].split(",") if x != ""]
    index = sym_index(base, arity)
    if kind == "dfa":
        initial = int(fields["initial"])
        nsym = base ** arity
        table = [[None] * nsym for _ in range(n_states)]
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: malformed transition {ln!r}")
            src, label, mult, dst = parts
            if mult != "1":
                raise ValueError(f"line {lineno}: DFA transitions must have multiplicity 1")
            sym = tuple(int(d) for d in label.split(","))
            table[int(src)][index[sym]] = int(dst)
        for q, row in enumerate(table):
            if any(t is None for t in row):
                raise ValueError(f"state {q}: transition table is not total")
        return Dfa(base, arity, table, initial, finals)
    if kind == "nfa":
        initials = [int(x) for x in fields["initial"].split(",") if x != ""]
        out = Nfa(base, arity, n_states, initials=initials, finals=finals)
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: malformed transition {ln!r}")
            src, label, mult, dst = parts
            if label == "eps":
                out.add_eps(int(src), int(dst), int(mult))
            else:
                sym = tuple(int(d) for d in label.split(","))
                out.add_edge(int(src), index[sym], int(dst), int(mult))
        return out
    raise ValueError(f"unknown automaton kind {kind!r}")
