"""Terms, formulas, substitutions, positions, parsing and printing.

The shared vocabulary of every other module.  Everything here is an
immutable value: terms and formulas are frozen dataclasses, substitutions
never mutate their bindings, so values can be shared freely between
concurrent tasks.

ASCII grammar (UTF-8 text)::

    formula  := iff
    iff      := imp ('<->' imp)*          right associative
    imp      := disj ['->' imp]           right associative
    disj     := conj ('|' conj)*          left associative
    conj     := unary ('&' unary)*        left associative
    unary    := '~' unary | '!' vars '.' formula | '?' vars '.' formula
              | primary
    primary  := '(' formula ')' | term '=' term | term '!=' term | atom
    term     := ident ['(' term (',' term)* ')'] | '0'
    vars     := ident (',' ident)*        sugar for nested quantifiers
    ident    := [A-Za-z][A-Za-z0-9_]*

Precedence: ~  binds tighter than &, then |, then ->, then <->; a
quantifier body extends maximally to the right.  `t != u` is sugar for
`~(t = u)` and `0` is a nullary function symbol.

Identifier conventions (beyond the grammar):

* names bound by an enclosing quantifier are variables;
* names passed in the caller's ``frees`` set are free variables;
* the reserved lexicon name ``l`` is always a variable and may not be
  declared or bound by user input;
* every other bare identifier is a constant, and an applied identifier
  is a function or predicate symbol with arity fixed by usage;
* names of the shape ``<base>_star<k>`` are reserved for Skolem symbols
  and parse back as such (internally they are spelled ``<base>*<k>``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

LEXICON = "l"

PLAIN_FUNCTION = "plain-function"
SKOLEM_FUNCTION = "skolem-function"
SKOLEM_CONSTANT = "skolem-constant"
PREDICATE = "predicate"

_KINDS = (PLAIN_FUNCTION, SKOLEM_FUNCTION, SKOLEM_CONSTANT, PREDICATE)

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_SKOLEM_PRINT_RE = re.compile(r"\A(?P<base>[A-Za-z][A-Za-z0-9_]*?)_star(?P<counter>[0-9]*)\Z")


class SyntaxError_(Exception):
    """Parse failure with 1-based line/column information."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class ArityMismatchError(Exception):
    """A symbol is used with two different arities (or kinds)."""


class CaptureError(Exception):
    """Substitution would move a free variable under a binder of that name."""


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str = PLAIN_FUNCTION

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == SKOLEM_CONSTANT and self.arity != 0:
            raise ValueError("a Skolem constant must be nullary")
        if self.arity < 0:
            raise ValueError("arity must be a natural number")

    @property
    def is_skolem(self) -> bool:
        return self.kind in (SKOLEM_FUNCTION, SKOLEM_CONSTANT)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    sym: Symbol
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if self.sym.kind == PREDICATE:
            raise ValueError("predicate symbol used as a function")
        if len(self.args) != self.sym.arity:
            raise ArityMismatchError(
                f"{self.sym.name} expects {self.sym.arity} arguments, got {len(self.args)}"
            )


Term = Union[Var, App]


@dataclass(frozen=True)
class Atom:
    pred: Symbol
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if self.pred.kind != PREDICATE:
            raise ValueError("atom head must be a predicate symbol")
        if len(self.args) != self.pred.arity:
            raise ArityMismatchError(
                f"{self.pred.name} expects {self.pred.arity} arguments, got {len(self.args)}"
            )


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Not, Or, And, Implies, Iff, Forall, Exists]

BINARY = (Or, And, Implies, Iff)
QUANT = (Forall, Exists)

Position = tuple[int, ...]


# ---------------------------------------------------------------------------
# substitutions


class Subst:
    """A finite map from variable names to terms, applied simultaneously.

    Instances are immutable; `compose` and friends return fresh maps.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Optional[Mapping[str, Term]] = None):
        m = dict(bindings or {})
        # identity pairs carry no information
        self._map = {v: t for v, t in m.items() if t != Var(v)}

    def __bool__(self) -> bool:
        return bool(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subst) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __contains__(self, var: str) -> bool:
        return var in self._map

    def __repr__(self):
        inside = ", ".join(f"{v} -> {print_term(t)}" for v, t in sorted(self._map.items()))
        return "{" + inside + "}"

    def get(self, var: str) -> Optional[Term]:
        return self._map.get(var)

    def domain(self) -> frozenset[str]:
        return frozenset(self._map)

    def items(self):
        return self._map.items()

    def bind(self, var: str, term: Term) -> "Subst":
        m = dict(self._map)
        m[var] = term
        return Subst(m)

    def restrict(self, vars_: set[str]) -> "Subst":
        return Subst({v: t for v, t in self._map.items() if v in vars_})

    def is_idempotent(self) -> bool:
        bound = set(self._map)
        return all(not (term_vars(t) & bound) for t in self._map.values())


def compose(s1: Subst, s2: Subst) -> Subst:
    """apply(compose(s1, s2), x) == apply(s2, apply(s1, x))."""
    m = {v: apply_term(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        if v not in m:
            m[v] = t
    return Subst(m)


# ---------------------------------------------------------------------------
# basic term traversals


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_symbols(t: Term) -> set[Symbol]:
    if isinstance(t, Var):
        return set()
    out = {t.sym}
    for a in t.args:
        out |= term_symbols(a)
    return out


def height(t: Term) -> int:
    """Height of a term: 0 for variables, 1 + max child height otherwise.

    Nullary applications (constants, Skolem constants) have height 1.
    """
    if isinstance(t, Var):
        return 0
    return 1 + max([0] + [height(a) for a in t.args])


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def apply_term(s: Subst, t: Term) -> Term:
    if isinstance(t, Var):
        got = s.get(t.name)
        return got if got is not None else t
    return App(t.sym, tuple(apply_term(s, a) for a in t.args))


# ---------------------------------------------------------------------------
# formula traversals


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, QUANT):
        return (f.body,)
    return (f.left, f.right)


def with_children(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, Forall):
        return Forall(f.var, kids[0])
    if isinstance(f, Exists):
        return Exists(f.var, kids[0])
    return type(f)(kids[0], kids[1])


def subformulas(f: Formula) -> Iterator[tuple[Position, Formula]]:
    """Preorder traversal yielding (position, subformula) pairs."""
    stack: list[tuple[Position, Formula]] = [((), f)]
    while stack:
        pos, g = stack.pop()
        yield pos, g
        kids = children(g)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


def subformula_at(f: Formula, pos: Position) -> Formula:
    g = f
    for i in pos:
        kids = children(g)
        if i >= len(kids):
            raise IndexError(f"position {pos} does not exist in formula")
        g = kids[i]
    return g


def replace_at(f: Formula, pos: Position, new: Formula) -> Formula:
    if not pos:
        return new
    kids = list(children(f))
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return with_children(f, tuple(kids))


def polarity_at(f: Formula, pos: Position) -> int:
    """+1 if the position is positive, -1 if negative.

    A step through Not, or into the left operand of Implies, flips the
    sign; Iff has no polarity and makes every strictly deeper position
    ambiguous, which is reported as an error.
    """
    sign = 1
    g = f
    for i in pos:
        if isinstance(g, Iff):
            raise ValueError("no polarity below a biconditional; expand it first")
        if isinstance(g, Not):
            sign = -sign
        elif isinstance(g, Implies) and i == 0:
            sign = -sign
        g = children(g)[i]
    return sign


def free_vars(f: Formula) -> set[str]:
    def go(g: Formula, bound: frozenset[str]) -> set[str]:
        if isinstance(g, Atom):
            out: set[str] = set()
            for t in g.args:
                out |= term_vars(t)
            return out - bound
        if isinstance(g, QUANT):
            return go(g.body, bound | {g.var})
        out = set()
        for k in children(g):
            out |= go(k, bound)
        return out

    return go(f, frozenset())


def bound_vars(f: Formula) -> list[str]:
    """Binder names in preorder, with repetitions."""
    out = []
    for _, g in subformulas(f):
        if isinstance(g, QUANT):
            out.append(g.var)
    return out


def formula_symbols(f: Formula) -> set[Symbol]:
    out: set[Symbol] = set()
    for _, g in subformulas(f):
        if isinstance(g, Atom):
            out.add(g.pred)
            for t in g.args:
                out |= term_symbols(t)
    return out


def function_symbols(f: Formula) -> set[Symbol]:
    return {s for s in formula_symbols(f) if s.kind != PREDICATE}


def apply(s: Subst, f: Formula) -> Formula:
    """Simultaneous substitution of free occurrences.

    Raises CaptureError when a binder would capture a free variable of an
    image; callers rectify first.
    """
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(apply_term(s, t) for t in f.args))
    if isinstance(f, QUANT):
        inner = Subst({v: t for v, t in s.items() if v != f.var})
        if not inner:
            return f
        relevant = free_vars(f.body) - {f.var}
        for v, t in inner.items():
            if v in relevant and f.var in term_vars(t):
                raise CaptureError(
                    f"binder {f.var} would capture a variable of {print_term(t)}"
                )
        return with_children(f, (apply(inner, f.body),))
    return with_children(f, tuple(apply(s, k) for k in children(f)))


# ---------------------------------------------------------------------------
# rectification


def is_rectified(f: Formula) -> bool:
    """Every bound variable bound exactly once and never also free."""
    binders = bound_vars(f)
    return len(binders) == len(set(binders)) and not (set(binders) & free_vars(f))


def fresh_name(base: str, used: set[str]) -> str:
    k = 1
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def rectify(f: Formula) -> Formula:
    """Rename clashing binders so each one is unique and never free.

    Deterministic: binders are visited left to right and a clashing
    binder named b becomes b<k> for the smallest unused k.  Formulas that
    already satisfy the invariant come back unchanged.
    """
    frees = free_vars(f)
    binders = bound_vars(f)
    counts: dict[str, int] = {}
    for b in binders:
        counts[b] = counts.get(b, 0) + 1
    clashing = {b for b, c in counts.items() if c > 1} | (set(binders) & frees)
    if not clashing:
        return f

    used = set(frees) | set(binders)

    def go(g: Formula, ren: dict[str, str]) -> Formula:
        if isinstance(g, Atom):
            sub = Subst({v: Var(n) for v, n in ren.items()})
            return apply(sub, g)
        if isinstance(g, QUANT):
            if g.var in clashing:
                new = fresh_name(g.var, used)
                used.add(new)
            else:
                new = g.var
            inner = dict(ren)
            inner[g.var] = new
            body = go(g.body, inner)
            return Forall(new, body) if isinstance(g, Forall) else Exists(new, body)
        return with_children(g, tuple(go(k, ren) for k in children(g)))

    return go(f, {})


# ---------------------------------------------------------------------------
# alpha equivalence


def _alpha_key(f: Formula, env: dict[str, int], depth: int):
    if isinstance(f, Atom):
        return ("atom", f.pred.name, tuple(_alpha_term(t, env) for t in f.args))
    if isinstance(f, Not):
        return ("not", _alpha_key(f.body, env, depth))
    if isinstance(f, QUANT):
        tag = "all" if isinstance(f, Forall) else "ex"
        inner = dict(env)
        inner[f.var] = depth
        return (tag, _alpha_key(f.body, inner, depth + 1))
    tag = {Or: "or", And: "and", Implies: "imp", Iff: "iff"}[type(f)]
    return (tag, _alpha_key(f.left, env, depth), _alpha_key(f.right, env, depth))


def _alpha_term(t: Term, env: dict[str, int]):
    if isinstance(t, Var):
        return ("bv", env[t.name]) if t.name in env else ("fv", t.name)
    return ("app", t.sym.name, tuple(_alpha_term(a, env) for a in t.args))


def alpha_eq(f: Formula, g: Formula) -> bool:
    """Equality up to renaming of bound variables."""
    return f == g or _alpha_key(f, {}, 0) == _alpha_key(g, {}, 0)


# ---------------------------------------------------------------------------
# connective normalization


def expand_iff(f: Formula) -> Formula:
    """Rewrite every A <-> B into (A -> B) & (B -> A)."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Iff):
        a = expand_iff(f.left)
        b = expand_iff(f.right)
        return And(Implies(a, b), Implies(b, a))
    return with_children(f, tuple(expand_iff(k) for k in children(f)))


def to_primitive(f: Formula) -> Formula:
    """Rewrite ->, & and <-> in terms of ~ and |; quantifiers stay."""
    f = expand_iff(f)

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, Implies):
            return Or(Not(go(g.left)), go(g.right))
        if isinstance(g, And):
            return Not(Or(Not(go(g.left)), Not(go(g.right))))
        return with_children(g, tuple(go(k) for k in children(g)))

    return go(f)


# ---------------------------------------------------------------------------
# printing


def _print_symbol_name(sym: Symbol) -> str:
    if sym.is_skolem:
        base, _, counter = sym.name.partition("*")
        return f"{base}_star{counter}"
    return sym.name


def _print_var_name(name: str) -> str:
    # boxed variables (opaque Skolem-term names) print in brackets so
    # the result stays lexable and never rereads as a Skolem symbol
    if _IDENT_RE.fullmatch(name) and not _SKOLEM_PRINT_RE.match(name):
        return name
    return f"[{name}]"


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return _print_var_name(t.name)
    name = _print_symbol_name(t.sym)
    if not t.args:
        return name
    return f"{name}({', '.join(print_term(a) for a in t.args)})"


_PREC = {"iff": 1, "imp": 2, "or": 3, "and": 4, "unary": 5}


def print_formula(f: Formula) -> str:
    def go(g: Formula, level: int) -> str:
        if isinstance(g, Atom):
            if g.pred.name == "=" and len(g.args) == 2:
                return f"{print_term(g.args[0])} = {print_term(g.args[1])}"
            name = _print_symbol_name(g.pred)
            if not g.args:
                return name
            return f"{name}({', '.join(print_term(a) for a in g.args)})"
        if isinstance(g, Not):
            inner = g.body
            if (
                isinstance(inner, Atom)
                and inner.pred.name == "="
                and len(inner.args) == 2
            ):
                return par(
                    f"{print_term(inner.args[0])} != {print_term(inner.args[1])}",
                    _PREC["unary"],
                    level,
                )
            return f"~{go(inner, _PREC['unary'])}"
        if isinstance(g, Forall):
            return par(f"!{_print_var_name(g.var)}. {go(g.body, 0)}", 0, level)
        if isinstance(g, Exists):
            return par(f"?{_print_var_name(g.var)}. {go(g.body, 0)}", 0, level)
        op, prec, assoc = {
            Or: ("|", _PREC["or"], "l"),
            And: ("&", _PREC["and"], "l"),
            Implies: ("->", _PREC["imp"], "r"),
            Iff: ("<->", _PREC["iff"], "r"),
        }[type(g)]
        lp = prec if assoc == "l" else prec + 1
        rp = prec + 1 if assoc == "l" else prec
        return par(f"{go(g.left, lp)} {op} {go(g.right, rp)}", prec, level)

    def par(s: str, prec: int, level: int) -> str:
        return f"({s})" if prec < level else s

    return go(f, 0)


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<boxed>\[[^\[\]]*\])
      | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
      | (?P<zero>0)
      | (?P<op><->|->|!=|[~&|!?.,()=])
    """,
    re.VERBOSE,
)

EQ = Symbol("=", 2, PREDICATE)
ZERO = Symbol("0", 0, PLAIN_FUNCTION)


def _skolem_symbol_for(printed: str, arity: int) -> Optional[Symbol]:
    m = _SKOLEM_PRINT_RE.match(printed)
    if not m:
        return None
    name = m.group("base") + "*" + m.group("counter")
    kind = SKOLEM_CONSTANT if arity == 0 else SKOLEM_FUNCTION
    return Symbol(name, arity, kind)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


class _Parser:
    def __init__(self, text: str, frees: frozenset[str]):
        self.tokens = self._tokenize(text)
        self.pos = 0
        self.frees = frees
        self.symbols: dict[str, Symbol] = {}

    @staticmethod
    def _tokenize(text: str) -> list[_Token]:
        out = []
        line, col, i = 1, 1, 0
        while i < len(text):
            m = _TOKEN_RE.match(text, i)
            if not m:
                raise SyntaxError_(f"unexpected character {text[i]!r}", line, col)
            kind = m.lastgroup or ""
            tok = m.group()
            if kind != "ws":
                out.append(_Token(kind, tok, line, col))
            newlines = tok.count("\n")
            if newlines:
                line += newlines
                col = len(tok) - tok.rfind("\n")
            else:
                col += len(tok)
            i = m.end()
        out.append(_Token("eof", "", line, col))
        return out

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> _Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            raise SyntaxError_(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return self.next()

    def error(self, msg: str) -> SyntaxError_:
        t = self.peek()
        return SyntaxError_(msg, t.line, t.col)

    def lookup(self, name: str, arity: int, kind: str) -> Symbol:
        sk = _skolem_symbol_for(name, arity)
        if sk is not None and kind != PREDICATE:
            internal = sk.name
            known = self.symbols.get(internal)
            if known is None:
                self.symbols[internal] = sk
                return sk
            if known.arity != arity or known.kind == PREDICATE:
                raise ArityMismatchError(f"{name} used with inconsistent arity")
            return known
        known = self.symbols.get(name)
        if known is None:
            sym = Symbol(name, arity, kind)
            self.symbols[name] = sym
            return sym
        if known.arity != arity or (known.kind == PREDICATE) != (kind == PREDICATE):
            raise ArityMismatchError(f"{name} used with inconsistent arity")
        return known

    # formula levels -------------------------------------------------

    def formula(self, bound: frozenset[str]) -> Formula:
        return self.iff(bound)

    def iff(self, bound) -> Formula:
        left = self.imp(bound)
        if self.peek().text == "<->":
            self.next()
            return Iff(left, self.iff(bound))
        return left

    def imp(self, bound) -> Formula:
        left = self.disj(bound)
        if self.peek().text == "->":
            self.next()
            return Implies(left, self.imp(bound))
        return left

    def disj(self, bound) -> Formula:
        f = self.conj(bound)
        while self.peek().text == "|":
            self.next()
            f = Or(f, self.conj(bound))
        return f

    def conj(self, bound) -> Formula:
        f = self.unary(bound)
        while self.peek().text == "&":
            self.next()
            f = And(f, self.unary(bound))
        return f

    def unary(self, bound) -> Formula:
        t = self.peek()
        if t.text == "~":
            self.next()
            return Not(self.unary(bound))
        if t.text in ("!", "?"):
            self.next()
            names = [self.ident("quantified variable")]
            while self.peek().text == ",":
                self.next()
                names.append(self.ident("quantified variable"))
            self.expect(".")
            body = self.formula(bound | frozenset(names))
            ctor = Forall if t.text == "!" else Exists
            for name in reversed(names):
                body = ctor(name, body)
            return body
        return self.primary(bound)

    def ident(self, what: str) -> str:
        t = self.peek()
        if t.kind == "boxed":
            return self.next().text[1:-1]
        if t.kind != "ident":
            raise self.error(f"expected {what}")
        return self.next().text

    def primary(self, bound) -> Formula:
        t = self.peek()
        if t.text == "(":
            self.next()
            f = self.formula(bound)
            self.expect(")")
            return f
        if t.kind in ("ident", "zero"):
            term, head = self.term(bound, allow_predicate=True)
            nxt = self.peek().text
            if nxt == "=":
                self.next()
                rhs, _ = self.term(bound)
                self.lookup("=", 2, PREDICATE)
                return Atom(EQ, (term, rhs))
            if nxt == "!=":
                self.next()
                rhs, _ = self.term(bound)
                self.lookup("=", 2, PREDICATE)
                return Not(Atom(EQ, (term, rhs)))
            # not an equation: reread the head as a predicate
            if head is None:
                raise self.error("a variable is not a formula")
            name, args = head
            pred = self.lookup(name, len(args), PREDICATE)
            if pred.kind != PREDICATE:
                raise self.error(f"{name} is used both as function and predicate")
            return Atom(pred, args)
        raise self.error("expected a formula")

    def term(self, bound, allow_predicate=False):
        """Returns (term, head) where head=(name, args) when the term is a
        bare or applied identifier that could be reread as an atom."""
        t = self.peek()
        if t.kind == "zero":
            self.next()
            self.lookup("0", 0, PLAIN_FUNCTION)
            return App(ZERO), None
        if t.kind == "boxed":
            # a boxed variable: an opaque name standing for a Skolem term
            return Var(self.next().text[1:-1]), None
        if t.kind != "ident":
            raise self.error("expected a term")
        name = self.next().text
        if self.peek().text == "(":
            self.next()
            args = [self.term(bound)[0]]
            while self.peek().text == ",":
                self.next()
                args.append(self.term(bound)[0])
            self.expect(")")
            args_t = tuple(args)
            if allow_predicate:
                return (
                    self._function_app(name, args_t, defer=True),
                    (name, args_t),
                )
            sym = self.lookup(name, len(args_t), PLAIN_FUNCTION)
            return App(sym, args_t), None
        if name in bound or name in self.frees or name == LEXICON:
            return Var(name), None
        if allow_predicate:
            return self._function_app(name, (), defer=True), (name, ())
        sym = self.lookup(name, 0, PLAIN_FUNCTION)
        return App(sym), None

    def _function_app(self, name, args, defer=False):
        # when the identifier may still turn out to be a predicate, delay
        # committing it to the symbol table until '='/')' disambiguates
        if defer:
            existing = self.symbols.get(name)
            sk = _skolem_symbol_for(name, len(args))
            if sk is not None:
                existing = self.symbols.get(sk.name)
            if existing is not None and existing.kind != PREDICATE:
                return App(existing, args)
            sym = (
                sk
                if sk is not None
                else Symbol(name, len(args), PLAIN_FUNCTION)
            )
            return App(sym, args)
        sym = self.lookup(name, len(args), PLAIN_FUNCTION)
        return App(sym, args)


def _intern_symbols(f: Formula, parser: _Parser) -> Formula:
    """Second pass: commit deferred function symbols and check arities."""

    def fix_term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        sym = parser.lookup(t.sym.name, t.sym.arity, t.sym.kind)
        return App(sym, tuple(fix_term(a) for a in t.args))

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(fix_term(t) for t in g.args))
        return with_children(g, tuple(go(k) for k in children(g)))

    return go(f)


def parse(text: str, frees: Optional[set[str]] = None) -> Formula:
    """Parse a formula; see the module docstring for the grammar.

    `frees` declares which bare identifiers denote free variables.  The
    lexicon `l` cannot be declared: it is always a variable.
    """
    frees = set(frees or ())
    if LEXICON in frees:
        raise ValueError(f"the lexicon {LEXICON!r} is reserved and cannot be declared")
    p = _Parser(text, frozenset(frees))
    f = p.formula(frozenset())
    t = p.peek()
    if t.kind != "eof":
        raise SyntaxError_(f"unexpected trailing input {t.text!r}", t.line, t.col)
    return _intern_symbols(f, p)


def parse_term(text: str, frees: Optional[set[str]] = None) -> Term:
    """Parse a single term under the same identifier conventions."""
    frees = set(frees or ())
    p = _Parser(text, frozenset(frees))
    t, _ = p.term(frozenset())
    tok = p.peek()
    if tok.kind != "eof":
        raise SyntaxError_(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
    return t
