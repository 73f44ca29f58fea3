"""First-order predicates over natural numbers and automatic sequences.

Formulas quantify over naturals, compare linear terms, and index bound
sequences; compilation turns a formula into a complete DFA over the
lsd-first joint encoding of its free variables (tracks sorted by variable
name), with acceptance depending only on the encoded values.

Concrete syntax (parse)::

    quantifiers    E v [, w ...] [< t | <= t] [:] BODY     (exists)
                   A v [, w ...] [< t | <= t] [:] BODY     (forall)
    connectives    ~ f     f & g     f | g     f => g     f <=> g
    comparisons    t1 = t2   t1 != t2   t1 < t2  <=  >  >=
    sequence atoms x[t] = c (c a literal output), x[t1] = y[t2], also
                   != < <= > >= between two indexed values
    terms          variables, decimal constants, t1 + t2, t1 - t2, c*t
    congruence     t ≡ a mod m     or equivalently     mod(t, m, a)

A quantifier's body extends as far to the right as possible; parenthesize
where that is not what you mean.  Subtraction is sugar: comparisons move
the negative part across (`a - b >= c` becomes `a >= b + c`, the natural
reading over the naturals), and an index expression with a negative part
is rewritten with a fresh existential witness, so an atom whose index
would be negative is simply false.
"""

import re
from dataclasses import dataclass, field

from . import automata
from .automata import (Dfa, determinize, complement, product, inflate,
                       pad_closure, minimize, is_empty, sym_tuples)
from .numeration import decode_lsd, project_track
from .seqgen import Dfao


class ParseError(ValueError):
    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} (at position {pos})")
        self.pos = pos


class CompileError(ValueError):
    pass


class ResourceLimit(automata.StateLimit):
    """Raised when an intermediate automaton exceeds the state ceiling."""


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    coeff: int
    term: object


@dataclass(frozen=True)
class Compare:
    left: object
    op: str
    right: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SeqCmp:
    """x[t1] <op> y[t2], comparing output symbols."""
    xname: str
    t1: object
    op: str
    yname: str
    t2: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SeqIs:
    """x[t] = c or x[t] != c for a literal output symbol c."""
    xname: str
    t: object
    op: str
    symbol: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    """Membership of a term tuple in a fixed pad-closed relation automaton.

    Not produced by the parser; built programmatically to reuse compiled
    relations inside larger formulas.
    """
    dfa: Dfa
    args: tuple
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: object
    right: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: object
    right: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Implies:
    left: object
    right: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Iff:
    left: object
    right: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    body: object
    pos: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Forall:
    var: str
    body: object
    pos: int | None = field(default=None, compare=False, repr=False)


def free_variables(f):
    """Set of free variable names of a formula or term."""
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Const):
        return set()
    if isinstance(f, Add):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Mul):
        return free_variables(f.term)
    if isinstance(f, Compare):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, SeqCmp):
        return free_variables(f.t1) | free_variables(f.t2)
    if isinstance(f, SeqIs):
        return free_variables(f.t)
    if isinstance(f, Call):
        out = set()
        for t in f.args:
            out |= free_variables(t)
        return out
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula node: {f!r}")


def sequence_names(f):
    """Set of sequence names referenced by a formula."""
    if isinstance(f, SeqCmp):
        return {f.xname, f.yname}
    if isinstance(f, SeqIs):
        return {f.xname}
    if isinstance(f, Not):
        return sequence_names(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return sequence_names(f.left) | sequence_names(f.right)
    if isinstance(f, (Exists, Forall)):
        return sequence_names(f.body)
    return set()


# ---------------------------------------------------------------------------
# Linear forms: dict var -> int coefficient, plus an int constant.

def _form_add(a, b):
    coeffs = dict(a[0])
    for v, c in b[0].items():
        coeffs[v] = coeffs.get(v, 0) + c
    return {v: c for v, c in coeffs.items() if c != 0}, a[1] + b[1]


def _form_scale(a, s):
    return {v: c * s for v, c in a[0].items() if c * s != 0}, a[1] * s


def _term_form(t):
    if isinstance(t, Var):
        return {t.name: 1}, 0
    if isinstance(t, Const):
        return {}, t.value
    if isinstance(t, Add):
        return _form_add(_term_form(t.left), _term_form(t.right))
    if isinstance(t, Mul):
        return _form_scale(_term_form(t.term), t.coeff)
    raise TypeError(f"not a term node: {t!r}")


def _form_to_term(form):
    """Clean Term for a linear form with nonnegative coefficients."""
    coeffs, const = form
    parts = []
    for v in sorted(coeffs):
        c = coeffs[v]
        if c < 0:
            raise ValueError("internal: negative coefficient in clean term")
        parts.append(Var(v) if c == 1 else Mul(c, Var(v)))
    if const < 0:
        raise ValueError("internal: negative constant in clean term")
    if const > 0 or not parts:
        parts.append(Const(const))
    out = parts[0]
    for p in parts[1:]:
        out = Add(out, p)
    return out


def _split_form(form):
    """(positive-part form, negative-part form) with LHS - RHS == form."""
    coeffs, const = form
    pos = {v: c for v, c in coeffs.items() if c > 0}
    neg = {v: -c for v, c in coeffs.items() if c < 0}
    return (pos, const if const > 0 else 0), (neg, -const if const < 0 else 0)


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(r"""
    \s*(?:
      (?P<arrow><=>|=>)
    | (?P<relop>!=|<=|>=|≤|≥|≠|<|>|=|≡)
    | (?P<num>\d+)
    | (?P<name>[A-Za-z][A-Za-z0-9_]*)
    | (?P<punct>[()\[\]+\-*,:&|~])
    )""", re.VERBOSE)

_RELOP_CANON = {"≤": "<=", "≥": ">=", "≠": "!="}


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", pos)
        pos = m.end()
        kind = m.lastgroup
        val = m.group(kind)
        tokens.append((kind, _RELOP_CANON.get(val, val), m.start(kind)))
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.fresh = 0
        self.scope = []

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def error(self, message):
        raise ParseError(message, self.peek()[2])

    def fresh_var(self):
        self.fresh += 1
        return f"_s{self.fresh}"

    # formula := quantified | iff-chain
    def formula(self):
        kind, val, pos = self.peek()
        if kind == "name" and val in ("E", "A"):
            return self.quantified()
        return self.iff()

    def quantified(self):
        kind, quant, pos = self.next()
        names = [self.ident()]
        while self.peek()[1] == ",":
            self.next()
            names.append(self.ident())
        for name in names:
            if name in self.scope:
                raise ParseError(f"variable {name!r} shadows an enclosing quantifier", pos)
        bound = None
        if self.peek()[1] in ("<", "<="):
            op = self.next()[1]
            bound = (op, self.term())
        if self.peek()[1] == ":":
            self.next()
        self.scope.extend(names)
        body = self.formula()
        del self.scope[-len(names):]
        for name in reversed(names):
            if bound is not None:
                guard = self.compare_atom(({name: 1}, 0), bound[0], bound[1], pos)
                body = And(guard, body, pos=pos) if quant == "E" else Implies(guard, body, pos=pos)
            body = Exists(name, body, pos=pos) if quant == "E" else Forall(name, body, pos=pos)
        return body

    def ident(self):
        kind, val, pos = self.next()
        if kind != "name" or val in ("E", "A", "mod"):
            raise ParseError(f"expected a variable name, found {val!r}", pos)
        return val

    def iff(self):
        left = self.implies()
        while self.peek()[1] == "<=>":
            pos = self.next()[2]
            left = Iff(left, self.implies(), pos=pos)
        return left

    def implies(self):
        left = self.or_()
        if self.peek()[1] == "=>":
            pos = self.next()[2]
            return Implies(left, self.implies(), pos=pos)
        return left

    def or_(self):
        left = self.and_()
        while self.peek()[1] == "|":
            pos = self.next()[2]
            left = Or(left, self.and_(), pos=pos)
        return left

    def and_(self):
        left = self.unary()
        while self.peek()[1] == "&":
            pos = self.next()[2]
            left = And(left, self.unary(), pos=pos)
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary(), pos=pos)
        if val == "(":
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.next()
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "name" and val in ("E", "A"):
            return self.quantified()
        return self.atom()

    # Atoms.  An operand is either a term or a single sequence index.
    def atom(self):
        kind, val, pos = self.peek()
        if kind == "name" and val == "mod" and self.tokens[self.i + 1][1] == "(":
            self.next()
            self.next()
            t = self.term()
            self.expect(",")
            m = self.const_value()
            self.expect(",")
            a = self.term()
            self.expect(")")
            return self.congruence(t, m, a, pos)
        left_seq = self.try_seqindex()
        if left_seq is not None:
            return self.seq_atom(left_seq, pos)
        left = self.term()
        kind2, op, pos2 = self.next()
        if kind2 != "relop":
            raise ParseError(f"expected a comparison operator, found {op or 'end of input'!r}", pos2)
        if op == "≡":
            a = self.term()
            kw_kind, kw, kw_pos = self.next()
            if kw != "mod":
                raise ParseError("expected 'mod' after '≡'", kw_pos)
            m = self.const_value()
            return self.congruence(left, m, a, pos)
        right_seq = self.try_seqindex()
        if right_seq is not None:
            name, idx = right_seq
            flipped = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}[op]
            return self.seq_atom_vs_term(name, idx, flipped, left, pos)
        right = self.term()
        return self.compare_atom(left, op, right, pos)

    def try_seqindex(self):
        kind, val, pos = self.peek()
        if kind == "name" and val not in ("E", "A", "mod") and self.tokens[self.i + 1][1] == "[":
            self.next()
            self.next()
            idx = self.term()
            self.expect("]")
            return (val, idx)
        return None

    def seq_atom(self, left_seq, pos):
        name1, idx1 = left_seq
        kind, op, pos2 = self.next()
        if kind != "relop" or op == "≡":
            raise ParseError(f"expected a comparison after {name1}[...]", pos2)
        right_seq = self.try_seqindex()
        if right_seq is not None:
            name2, idx2 = right_seq
            return self.wrap_indices(
                [idx1, idx2],
                lambda ts: SeqCmp(name1, ts[0], op, name2, ts[1], pos=pos))
        return self.seq_atom_vs_term(name1, idx1, op, self.term(), pos)

    def seq_atom_vs_term(self, name, idx, op, form, pos):
        coeffs, const = form
        if coeffs:
            raise ParseError(
                "a sequence value can only be compared with another sequence "
                "value or a literal output symbol", pos)
        if op not in ("=", "!="):
            raise ParseError("only = and != compare a sequence value with a literal", pos)
        return self.wrap_indices([idx], lambda ts: SeqIs(name, ts[0], op, const, pos=pos))

    def wrap_indices(self, forms, build):
        """Clean negative parts out of index forms via fresh witnesses."""
        terms = []
        wrappers = []
        for form in forms:
            if all(c >= 0 for c in form[0].values()) and form[1] >= 0:
                terms.append(_form_to_term(form))
            else:
                w = self.fresh_var()
                posf, negf = _split_form(form)
                eq = Compare(_form_to_term(_form_add(({w: 1}, 0), negf)),
                             "=", _form_to_term(posf))
                terms.append(Var(w))
                wrappers.append((w, eq))
        out = build(terms)
        for w, eq in reversed(wrappers):
            out = Exists(w, And(eq, out))
        return out

    def compare_atom(self, left, op, right, pos):
        # Move each side's negative part to the other side; variables that
        # appear on both sides are kept (cancellation is the compiler's job).
        lpos, lneg = _split_form(left)
        rpos, rneg = _split_form(right)
        lhs = _form_add(lpos, rneg)
        rhs = _form_add(rpos, lneg)
        return Compare(_form_to_term(lhs), op, _form_to_term(rhs), pos=pos)

    def congruence(self, t, m, a, pos):
        if m < 1:
            raise ParseError("modulus must be a positive constant", pos)
        if not a[0]:
            residue = ({}, a[1] % m)
            q = self.fresh_var()
            rhs = _form_add(({q: m}, 0), residue)
            return Exists(q, self.compare_atom(t, "=", rhs, pos))
        q1 = self.fresh_var()
        q2 = self.fresh_var()
        lhs = _form_add(t, ({q1: m}, 0))
        rhs = _form_add(a, ({q2: m}, 0))
        return Exists(q1, Exists(q2, self.compare_atom(lhs, "=", rhs, pos)))

    # term := factor (('+'|'-') factor)*, returned as a linear form
    def term(self):
        form = self.factor()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            nxt = self.factor()
            form = _form_add(form, nxt if op == "+" else _form_scale(nxt, -1))
        return form

    def factor(self):
        kind, val, pos = self.next()
        if kind == "num":
            if self.peek()[1] == "*":
                self.next()
                inner = self.factor()
                return _form_scale(inner, int(val))
            return ({}, int(val))
        if kind == "name":
            if val in ("E", "A", "mod"):
                raise ParseError(f"{val!r} is reserved and cannot be a variable", pos)
            if self.peek()[1] == "[":
                raise ParseError(
                    "sequence values cannot appear inside arithmetic; compare "
                    "them directly", pos)
            return ({val: 1}, 0)
        if val == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos)

    def const_value(self):
        form = self.term()
        if form[0]:
            raise ParseError("expected a constant here", self.peek()[2])
        return form[1]


def parse(text):
    """Parse concrete syntax into a Formula AST (sugar expanded)."""
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return f


# ---------------------------------------------------------------------------
# Compilation

class CompileConfig:
    """Shared compilation limits and statistics.

    default_base applies to formulas that never index a sequence.
    """

    def __init__(self, max_states=2_000_000, default_base=2):
        self.max_states = max_states
        self.default_base = default_base
        self.peak_states = 0
        self.operations = 0

    def note(self, dfa):
        self.operations += 1
        if dfa.n_states > self.peak_states:
            self.peak_states = dfa.n_states
        if dfa.n_states > self.max_states:
            raise ResourceLimit(
                f"intermediate automaton has {dfa.n_states} states "
                f"(ceiling {self.max_states})")
        return dfa


def _check_env(f, env):
    for name in sequence_names(f):
        if name not in env:
            raise CompileError(f"sequence {name!r} is not bound")
    bases = {env[name].base for name in sequence_names(f)}
    if len(bases) > 1:
        raise CompileError(f"bound sequences disagree on the base: {sorted(bases)}")


def _linear_atom(k, coeffs, const, mode, cfg):
    """DFA for sum(coeffs)+const = 0 (mode 'eq') or <= 0 (mode 'le').

    Carry construction over lsd digits: for '=' the carry must stay an
    exact integer, for '<=' it is the ceiling of the running quotient,
    so the final sign decides the comparison.
    """
    names = tuple(sorted(coeffs))
    weights = [coeffs[v] for v in names]
    arity = len(names)
    syms = sym_tuples(k, arity)
    dots = [sum(w * d for w, d in zip(weights, sym)) for sym in syms]
    ids = {const: 0}
    order = [const]
    rows = []
    sink = None
    i = 0
    while i < len(order):
        gamma = order[i]
        i += 1
        if gamma is None:  # dead state
            rows.append([sink] * len(syms))
            continue
        row = []
        for dot in dots:
            total = gamma + dot
            if mode == "eq":
                if total % k != 0:
                    if sink is None:
                        sink = len(order)
                        order.append(None)
                    row.append(sink)
                    continue
                nxt = total // k
            else:
                nxt = -((-total) // k)
            t = ids.get(nxt)
            if t is None:
                t = len(order)
                ids[nxt] = t
                order.append(nxt)
            row.append(t)
        rows.append(row)
    if mode == "eq":
        finals = {ids[0]} if 0 in ids else set()
    else:
        finals = {sid for g, sid in ids.items() if g <= 0}
    dfa = cfg.note(minimize(Dfa(k, arity, rows, 0, finals)))
    return dfa, names


def _seq_pair_dfa(x, y, op, same_track, cfg):
    """Product of two DFAOs comparing final outputs; one or two tracks."""
    k = x.base
    pair_ids = {(x.initial, y.initial): 0}
    order = [(x.initial, y.initial)]
    rows = []
    finals = set()
    if same_track:
        symlist = [(d, d) for d in range(k)]
    else:
        symlist = [(d1, d2) for d1 in range(k) for d2 in range(k)]
    i = 0
    while i < len(order):
        qx, qy = order[i]
        if _cmp_outputs(x.outputs[qx], y.outputs[qy], op):
            finals.add(i)
        row = []
        for d1, d2 in symlist:
            key = (x.transitions[qx][d1], y.transitions[qy][d2])
            t = pair_ids.get(key)
            if t is None:
                t = len(order)
                pair_ids[key] = t
                order.append(key)
            row.append(t)
        rows.append(row)
        i += 1
    return cfg.note(minimize(Dfa(k, 1 if same_track else 2, rows, 0, finals)))


def _cmp_outputs(a, b, op):
    try:
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
    except TypeError:
        raise CompileError(f"output symbols {a!r} and {b!r} are not comparable") from None
    raise CompileError(f"unknown comparison operator {op!r}")


class _Compiler:
    def __init__(self, env, cfg):
        self.env = env
        self.cfg = cfg
        self.base = None
        for s in env.values():
            if self.base is None:
                self.base = s.base
            elif s.base != self.base:
                raise CompileError("bound sequences disagree on the base")
        self.fresh = 0

    def fresh_var(self):
        self.fresh += 1
        return f"_c{self.fresh}"

    def need_base(self):
        if self.base is None:
            self.base = self.cfg.default_base
        return self.base

    # -- helpers over (dfa, vars) pairs ------------------------------------

    def align(self, a, avars, want):
        cur = list(avars)
        for i, v in enumerate(want):
            if i >= len(cur) or cur[i] != v:
                a = inflate(a, i)
                cur.insert(i, v)
        if tuple(cur) != tuple(want):
            raise AssertionError("track alignment failed")
        return self.cfg.note(a)

    def combine(self, a, avars, b, bvars, op):
        want = tuple(sorted(set(avars) | set(bvars)))
        a = self.align(a, avars, want)
        b = self.align(b, bvars, want)
        out = self.cfg.note(minimize(product(a, b, op, limit=self.cfg.max_states)))
        return out, want

    def exists(self, v, value):
        return self.exists_many([v], value)

    def exists_many(self, names, value):
        if isinstance(value, bool):
            return value
        dfa, vars_ = value
        drop = {vars_.index(v) for v in set(names) if v in vars_}
        if not drop:
            return value
        if len(drop) == len(vars_):
            empty, _ = is_empty(dfa)
            return not empty
        nfa = automata.project_many(dfa, drop)
        det = determinize(nfa, limit=self.cfg.max_states)
        out = self.cfg.note(pad_closure(det))
        return out, tuple(w for i, w in enumerate(vars_) if i not in drop)

    def negate(self, value):
        if isinstance(value, bool):
            return not value
        dfa, vars_ = value
        return complement(dfa), vars_

    # -- compilation over formula nodes ------------------------------------

    def compile(self, f):
        if isinstance(f, Compare):
            return self.atom_compare(f)
        if isinstance(f, SeqCmp):
            return self.atom_seqcmp(f)
        if isinstance(f, SeqIs):
            return self.atom_seqis(f)
        if isinstance(f, Call):
            return self.atom_call(f)
        if isinstance(f, Not):
            return self.negate(self.compile(f.body))
        if isinstance(f, And):
            a = self.compile(f.left)
            if a is False:
                return False
            b = self.compile(f.right)
            if isinstance(a, bool):
                return b if a else False
            if isinstance(b, bool):
                return a if b else False
            return self.combine(*a, *b, "and")
        if isinstance(f, Or):
            a = self.compile(f.left)
            if a is True:
                return True
            b = self.compile(f.right)
            if isinstance(a, bool):
                return True if a else b
            if isinstance(b, bool):
                return True if b else a
            return self.combine(*a, *b, "or")
        if isinstance(f, Implies):
            a = self.compile(f.left)
            if a is False:
                return True
            b = self.compile(f.right)
            if isinstance(a, bool):
                return b
            if isinstance(b, bool):
                return True if b else self.negate(a)
            dfa, vars_ = self.combine(*a, *b, "and-not")
            return complement(dfa), vars_
        if isinstance(f, Iff):
            a = self.compile(f.left)
            b = self.compile(f.right)
            if isinstance(a, bool):
                return b if a else self.negate(b)
            if isinstance(b, bool):
                return a if b else self.negate(a)
            dfa, vars_ = self.combine(*a, *b, "xor")
            return complement(dfa), vars_
        if isinstance(f, Exists):
            names = []
            body = f
            while isinstance(body, Exists):
                names.append(body.var)
                body = body.body
            return self.exists_many(names, self.compile(body))
        if isinstance(f, Forall):
            names = []
            body = f
            while isinstance(body, Forall):
                names.append(body.var)
                body = body.body
            return self.negate(self.exists_many(names, self.negate(self.compile(body))))
        raise TypeError(f"not a formula node: {f!r}")

    def atom_compare(self, f):
        form = _form_add(_term_form(f.left), _form_scale(_term_form(f.right), -1))
        coeffs, const = form
        op = f.op
        if op in (">", ">="):
            coeffs = {v: -c for v, c in coeffs.items()}
            const = -const
            op = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}[op]
        if not coeffs:
            return {"=": const == 0, "!=": const != 0,
                    "<": const < 0, "<=": const <= 0}[op]
        k = self.need_base()
        if op == "=":
            dfa, names = _linear_atom(k, coeffs, const, "eq", self.cfg)
            return dfa, names
        if op == "!=":
            dfa, names = _linear_atom(k, coeffs, const, "eq", self.cfg)
            return complement(dfa), names
        if op == "<":
            const += 1
        dfa, names = _linear_atom(k, coeffs, const, "le", self.cfg)
        return dfa, names

    def resolve_seq(self, name):
        s = self.env.get(name)
        if s is None:
            raise CompileError(f"sequence {name!r} is not bound")
        if self.base is None:
            self.base = s.base
        elif s.base != self.base:
            raise CompileError("bound sequences disagree on the base")
        return s

    def term_as_var(self, term):
        """(var name, extra equation atoms, fresh vars) for an index term."""
        form = _term_form(term)
        coeffs, const = form
        if const == 0 and len(coeffs) == 1 and next(iter(coeffs.values())) == 1:
            return next(iter(coeffs)), [], []
        w = self.fresh_var()
        diff = _form_add(({w: 1}, 0), _form_scale(form, -1))
        eq = (dict(diff[0]), diff[1])
        return w, [eq], [w]

    def atom_with_core(self, core, corevars, equations, freshvars):
        value = (core, tuple(corevars)) if not isinstance(core, bool) else core
        for coeffs, const in equations:
            dfa, names = _linear_atom(self.need_base(), coeffs, const, "eq", self.cfg)
            if isinstance(value, bool):
                value = (dfa, names) if value else False
                if value is False:
                    return False
            else:
                value = self.combine(*value, dfa, names, "and")
        for w in freshvars:
            value = self.exists(w, value)
        return value

    def atom_seqcmp(self, f):
        x = self.resolve_seq(f.xname)
        y = self.resolve_seq(f.yname)
        v1, eqs1, fresh1 = self.term_as_var(f.t1)
        v2, eqs2, fresh2 = self.term_as_var(f.t2)
        if v1 == v2:
            if x is y:
                # Identical value on both sides.
                return f.op in ("=", "<=", ">=")
            core = _seq_pair_dfa(x, y, f.op, True, self.cfg)
            corevars = (v1,)
        else:
            core = _seq_pair_dfa(x, y, f.op, False, self.cfg)
            if v1 > v2:
                core = automata.permute_tracks(core, [1, 0])
            corevars = tuple(sorted((v1, v2)))
        return self.atom_with_core(core, corevars, eqs1 + eqs2, fresh1 + fresh2)

    def atom_seqis(self, f):
        x = self.resolve_seq(f.xname)
        v, eqs, fresh = self.term_as_var(f.t)
        want = f.symbol
        matching = {q for q in range(x.n_states)
                    if (x.outputs[q] == want) == (f.op == "=")}
        core = self.cfg.note(minimize(Dfa(x.base, 1, x.transitions, x.initial, matching)))
        return self.atom_with_core(core, (v,), eqs, fresh)

    def atom_call(self, f):
        dfa = f.dfa
        if len(f.args) != dfa.arity:
            raise CompileError(
                f"relation automaton has arity {dfa.arity}, got {len(f.args)} arguments")
        if self.base is None:
            self.base = dfa.base
        elif dfa.base != self.base:
            raise CompileError("relation automaton base mismatch")
        argvars = []
        equations = []
        freshvars = []
        for t in f.args:
            v, eqs, fresh = self.term_as_var(t)
            argvars.append(v)
            equations.extend(eqs)
            freshvars.extend(fresh)
        want = tuple(sorted(set(argvars)))
        old_index = automata.sym_index(dfa.base, dfa.arity)
        new_syms = sym_tuples(dfa.base, len(want))
        positions = [want.index(v) for v in argvars]
        mapping = [old_index[tuple(s[p] for p in positions)] for s in new_syms]
        rows = [[row[m] for m in mapping] for row in dfa.transitions]
        core = self.cfg.note(minimize(
            Dfa(dfa.base, len(want), rows, dfa.initial, dfa.finals)))
        return self.atom_with_core(core, want, equations, freshvars)


def compile(f, env, config=None):
    """Compile a formula to a minimized, pad-closed DFA over its free variables.

    Tracks are sorted by variable name.  A closed formula does not compile
    to an automaton; use decide().
    """
    cfg = config or CompileConfig()
    _check_env(f, env)
    free = free_variables(f)
    if not free:
        raise CompileError("formula has no free variables; use decide()")
    value = _Compiler(env, cfg).compile(f)
    if isinstance(value, bool):
        # Constant truth over free variables the automaton never inspected.
        k = next(iter(env.values())).base if env else cfg.default_base
        nsym = k ** len(free)
        return Dfa(k, len(free), [[0] * nsym], 0, {0} if value else set())
    dfa, vars_ = value
    if set(vars_) != free:
        # Vacuous variables never reached an atom; add ignored tracks.
        comp = _Compiler(env, cfg)
        dfa = comp.align(dfa, vars_, tuple(sorted(free)))
        dfa = minimize(dfa)
    return dfa


class Decision:
    """Outcome of deciding a sentence."""

    def __init__(self, value, witness=None, counterexample=None):
        self.value = value
        self.witness = witness
        self.counterexample = counterexample

    def __bool__(self):
        return self.value

    def __repr__(self):
        extra = ""
        if self.witness is not None:
            extra = f" witness={self.witness}"
        if self.counterexample is not None:
            extra = f" counterexample={self.counterexample}"
        return f"<Decision {self.value}{extra}>"


def _assignment_from_word(word, vars_):
    return {v: decode_lsd(project_track(word, i)) for i, v in enumerate(vars_)}


def decide(f, env, config=None):
    """Decide a sentence; attaches a witness or counterexample when a
    leading quantifier block admits one."""
    cfg = config or CompileConfig()
    _check_env(f, env)
    free = free_variables(f)
    if free:
        raise CompileError(f"decide() needs a sentence; free variables: {sorted(free)}")
    comp = _Compiler(env, cfg)
    value = comp.compile(f)
    if not isinstance(value, bool):
        raise AssertionError("sentence compiled to an automaton")
    leading = []
    body = f
    while isinstance(body, Exists):
        leading.append(body.var)
        body = body.body
    if value and leading:
        inner = comp.compile(body)
        if isinstance(inner, bool):
            return Decision(True, witness={v: 0 for v in leading})
        dfa, vars_ = inner
        _, word = is_empty(dfa)
        assignment = _assignment_from_word(word, vars_)
        for v in leading:
            assignment.setdefault(v, 0)
        return Decision(True, witness=assignment)
    leading = []
    body = f
    while isinstance(body, Forall):
        leading.append(body.var)
        body = body.body
    if not value and leading:
        inner = comp.compile(Not(body))
        if isinstance(inner, bool):
            return Decision(False, counterexample={v: 0 for v in leading})
        dfa, vars_ = inner
        _, word = is_empty(dfa)
        assignment = _assignment_from_word(word, vars_)
        for v in leading:
            assignment.setdefault(v, 0)
        return Decision(False, counterexample=assignment)
    return Decision(value)


def characteristic(f, env, config=None):
    """0/1 Dfao over the single free variable of f."""
    free = free_variables(f)
    if len(free) != 1:
        raise CompileError(f"characteristic() needs exactly one free variable, got {sorted(free)}")
    dfa = compile(f, env, config)
    outputs = [1 if q in dfa.finals else 0 for q in range(dfa.n_states)]
    return Dfao(dfa.base, dfa.transitions, dfa.initial, outputs)
