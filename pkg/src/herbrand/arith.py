"""Decision procedure for the first-order theory of zero, successor and
equality: quantifier elimination into a quantifier-free normal form, and
the derivability criterion "the normal form of the negation is 0 != 0".

Terms over this signature always have the shape S^k(0) or S^k(x), which
the whole module exploits: a literal is a pair of (offset, base) sides.
"""

from __future__ import annotations

from typing import Optional

from .syntax import (
    And,
    App,
    Atom,
    EQ,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    PLAIN_FUNCTION,
    QUANT,
    Symbol,
    Term,
    Var,
    ZERO,
    children,
    free_vars,
    print_formula,
    with_children,
)

S = Symbol("S", 1, PLAIN_FUNCTION)
ZERO_SYM = ZERO


class NotArithmeticError(Exception):
    """A symbol outside the 0/S/= signature."""


class FreeVariableError(Exception):
    """decide needs a closed sentence."""


TRUE = Atom(EQ, (App(ZERO), App(ZERO)))
FALSE = Not(TRUE)


def s_term(k: int, base: Optional[str]) -> Term:
    t: Term = Var(base) if base is not None else App(ZERO)
    for _ in range(k):
        t = App(S, (t,))
    return t


def peel(t: Term) -> tuple[int, Optional[str]]:
    """Decompose S^k(0) or S^k(x) into (k, base); base None for 0."""
    k = 0
    while isinstance(t, App) and t.sym == S:
        k += 1
        t = t.args[0]
    if isinstance(t, Var):
        return k, t.name
    if isinstance(t, App) and t.sym == ZERO:
        return k, None
    head = t.sym.name if isinstance(t, App) else t
    raise NotArithmeticError(f"term head {head!r} outside the 0/S signature")


def validate(f: Formula) -> None:
    def go(g: Formula):
        if isinstance(g, Atom):
            if g.pred != EQ:
                raise NotArithmeticError(
                    f"predicate {g.pred.name!r} outside the 0/S/= signature"
                )
            for t in g.args:
                peel(t)
            return
        for k in children(g):
            go(k)

    go(f)


# literals are ((a, u), (b, v), positive): S^a(u) = / != S^b(v)
Side = tuple[int, Optional[str]]
Lit = tuple[Side, Side, bool]


def _norm_lit(lit: Lit) -> object:
    """Cancel successors and decide the trivial cases.

    Returns True, False, or a canonically oriented literal.  After
    cancellation, same-base sides are decided by the offsets (this
    covers S^k(0) = 0 and S^k(x) = x), and a variable side with a
    positive offset never equals zero.
    """
    (a, u), (b, v), pos = lit
    cancel = min(a, b)
    a, b = a - cancel, b - cancel
    if u == v:
        return (a == b) == pos
    if u is None and a == 0 and b > 0:
        return not pos  # 0 = S^b(v) with v a variable
    if v is None and b == 0 and a > 0:
        return not pos  # S^a(u) = 0 with u a variable
    left, right = (a, u), (b, v)
    if _side_key(left) > _side_key(right):
        left, right = right, left
    return (left, right, pos)


def _side_key(side: Side):
    k, base = side
    return (base is None, base or "", k)


def _lit_formula(lit: Lit) -> Formula:
    (a, u), (b, v), pos = lit
    atom = Atom(EQ, (s_term(a, u), s_term(b, v)))
    return atom if pos else Not(atom)


def _nnf(f: Formula, sign: bool = True) -> Formula:
    if isinstance(f, Atom):
        return f if sign else Not(f)
    if isinstance(f, Not):
        return _nnf(f.body, not sign)
    if isinstance(f, Iff):
        both = And(Implies(f.left, f.right), Implies(f.right, f.left))
        return _nnf(both, sign)
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), sign)
    if isinstance(f, (And, Or)):
        flip = {And: Or, Or: And}[type(f)]
        ctor = type(f) if sign else flip
        return ctor(_nnf(f.left, sign), _nnf(f.right, sign))
    if isinstance(f, QUANT):
        flip_q = {Forall: Exists, Exists: Forall}[type(f)]
        ctor = type(f) if sign else flip_q
        return ctor(f.var, _nnf(f.body, sign))
    raise TypeError(f"not a formula: {f!r}")


def _dnf_lits(f: Formula) -> list[list[Lit]]:
    """DNF of a quantifier-free NNF formula as literal lists."""
    if isinstance(f, Atom):
        return [[((peel(f.args[0])), (peel(f.args[1])), True)]]
    if isinstance(f, Not):
        inner = f.body
        return [[((peel(inner.args[0])), (peel(inner.args[1])), False)]]
    if isinstance(f, Or):
        return _dnf_lits(f.left) + _dnf_lits(f.right)
    if isinstance(f, And):
        return [a + b for a in _dnf_lits(f.left) for b in _dnf_lits(f.right)]
    raise TypeError(f"unexpected node in nnf: {print_formula(f)}")


def _subst_side(side: Side, var: str, image: Side) -> Side:
    k, base = side
    if base != var:
        return side
    j, new_base = image
    return (k + j, new_base)


def _subst_lit(lit: Lit, var: str, image: Side) -> Lit:
    (a, u), (b, v), pos = lit
    return (_subst_side((a, u), var, image), _subst_side((b, v), var, image), pos)


def _eliminate_exists(var: str, conjunct: list[Lit]) -> Optional[list[Lit]]:
    """Literals equivalent to ?var over the conjunct, or None when the
    conjunct is contradictory."""
    work: list[Lit] = []
    for lit in conjunct:
        n = _norm_lit(lit)
        if n is True:
            continue
        if n is False:
            return None
        work.append(n)

    def mentions(lit: Lit) -> bool:
        return lit[0][1] == var or lit[1][1] == var

    pivot = next((l for l in work if mentions(l) and l[2]), None)
    if pivot is None:
        # only disequations constrain var: an infinite domain always has
        # a value avoiding finitely many exclusions
        return [l for l in work if not mentions(l)]

    work.remove(pivot)
    (a, u), (b, v), _ = pivot
    if u == var:
        d, (c, other) = a, (b, v)
    else:
        d, (c, other) = b, (a, u)

    out: list[Lit] = []
    # the pivot S^d(var) = S^c(other) itself: solvable for var exactly
    # when the other side reaches offset d
    if c < d:
        if other is None:
            return None  # S^d(var) = S^c(0) with c < d has no solution
        for j in range(d - c):
            out.append(((0, other), (j, None), False))
    # rewrite every other literal mentioning var: pad both sides of the
    # literal or of the pivot until the var occurrences coincide, then
    # substitute the pivot's other side (normalized literals never carry
    # var on both sides)
    for lit in work:
        if not mentions(lit):
            out.append(lit)
            continue
        (la, lu), (lb, lv), pos = lit
        if lu == var:
            e, rest = la, (lb, lv)
        else:
            e, rest = lb, (la, lu)
        if e <= d:
            new = ((c, other), (rest[0] + (d - e), rest[1]), pos)
        else:
            new = ((c + (e - d), other), rest, pos)
        n = _norm_lit(new)
        if n is True:
            continue
        if n is False:
            return None
        out.append(n)
    return out


def _conjunct_formula(conjunct: list[Lit]) -> Formula:
    if not conjunct:
        return TRUE
    parts = [_lit_formula(l) for l in conjunct]
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def _dnf_formula(conjuncts: list[list[Lit]]) -> Formula:
    if not conjuncts:
        return FALSE
    parts = [_conjunct_formula(c) for c in conjuncts]
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def _clean(conjuncts: list[list[Lit]]) -> list[list[Lit]]:
    """Normalize literals, drop refuted conjuncts, dedupe, sort."""
    out = []
    seen = set()
    for c in conjuncts:
        lits = []
        dead = False
        for lit in c:
            n = _norm_lit(lit)
            if n is True:
                continue
            if n is False:
                dead = True
                break
            if n not in lits:
                lits.append(n)
        if dead:
            continue
        lits.sort(key=lambda l: (_side_key(l[0]), _side_key(l[1]), l[2]))
        key = tuple(lits)
        if key not in seen:
            seen.add(key)
            out.append(lits)
    out.sort(key=lambda c: [(_side_key(l[0]), _side_key(l[1]), l[2]) for l in c])
    return out


def eliminate_quantifiers(f: Formula) -> Formula:
    """An equivalent quantifier-free formula with the same free
    variables, by innermost quantifier elimination."""
    validate(f)

    def neg(g: Formula) -> Formula:
        if g == TRUE:
            return FALSE
        if g == FALSE:
            return TRUE
        if isinstance(g, Not):
            return g.body
        return Not(g)

    def qe(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, Not):
            return neg(qe(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return with_children(g, tuple(qe(k) for k in children(g)))
        if isinstance(g, Exists):
            return _exists(g.var, qe(g.body))
        if isinstance(g, Forall):
            return neg(_exists(g.var, neg(qe(g.body))))
        raise TypeError(f"not a formula: {g!r}")

    def _exists(var: str, body: Formula) -> Formula:
        conjuncts = _dnf_lits(_nnf(body))
        surviving = []
        for c in conjuncts:
            eliminated = _eliminate_exists(var, c)
            if eliminated is not None:
                surviving.append(eliminated)
        return _dnf_formula(_clean(surviving))

    return qe(f)


def _conjunct_satisfiable(conjunct: list[Lit]) -> bool:
    """Satisfiability over the naturals of a conjunction of literals, by
    solved-form substitution; complete for this signature."""
    work = list(conjunct)
    while True:
        normalized = []
        for lit in work:
            n = _norm_lit(lit)
            if n is False:
                return False
            if n is not True:
                normalized.append(n)
        work = normalized
        eq = next(
            (l for l in work if l[2] and (l[0][1] is not None or l[1][1] is not None)),
            None,
        )
        if eq is None:
            # ground or disequation-only remainder: each normalized
            # disequation with distinct sides is satisfiable, and the
            # exclusions can always be avoided in an infinite domain
            return True
        (a, u), (b, v), _ = eq
        work.remove(eq)
        if u is not None:
            d, c, other = a, b, v
            var = u
        else:
            d, c, other = b, a, u
            var = v
        if c < d and other is None:
            return False
        if c >= d:
            image: Side = (c - d, other)
            work = [_subst_lit(l, var, image) for l in work]
        else:
            # S^d(var) = S^c(other): eliminate the other variable instead
            assert other is not None
            work = [_subst_lit(l, other, (d - c, var)) for l in work]
    return True


def qf_normal_form(f: Formula) -> Formula:
    """Canonical disjunctive normal form of a quantifier-free formula:
    contradictory input collapses to 0 != 0 and valid input to 0 = 0.
    """
    validate(f)
    for _, g in _walk(f):
        if isinstance(g, QUANT):
            raise ValueError("qf_normal_form expects a quantifier-free formula")
    conjuncts = _clean(
        [c for c in _dnf_lits(_nnf(f)) if _conjunct_satisfiable(c)]
    )
    if not conjuncts:
        return FALSE
    negated = _clean(
        [c for c in _dnf_lits(_nnf(f, sign=False)) if _conjunct_satisfiable(c)]
    )
    if not negated:
        return TRUE
    return _dnf_formula(conjuncts)


def _walk(f: Formula):
    yield (), f
    for i, k in enumerate(children(f)):
        for pos, g in _walk(k):
            yield (i,) + pos, g


def decide(sentence: Formula) -> str:
    """\"derivable\" or \"refutable\" for a closed sentence: derivable
    exactly when the normal form of the eliminated negation is 0 != 0.
    """
    validate(sentence)
    if free_vars(sentence):
        raise FreeVariableError(
            f"decide needs a closed sentence; free: {sorted(free_vars(sentence))}"
        )
    eliminated = eliminate_quantifiers(sentence)
    if qf_normal_form(Not(eliminated)) == FALSE:
        return "derivable"
    return "refutable"


# ---------------------------------------------------------------------------
# axioms and the bounded standard-model oracle


def axiom(tag: str) -> Formula:
    """Universal closures of the equality and successor axioms by tag:
    eq-refl, eq-sym, eq-trans, eq-subst, nat_1, nat_2, nat_3, and nat_k
    for k >= 4 meaning S^{k-3}(x) != x."""
    x, y, z = Var("x"), Var("y"), Var("z")

    def eq(a, b):
        return Atom(EQ, (a, b))

    if tag == "eq-refl":
        return Forall("x", eq(x, x))
    if tag == "eq-sym":
        return Forall("x", Forall("y", Implies(eq(x, y), eq(y, x))))
    if tag == "eq-trans":
        return Forall(
            "x",
            Forall(
                "y", Forall("z", Implies(And(eq(x, y), eq(y, z)), eq(x, z)))
            ),
        )
    if tag == "eq-subst":
        return Forall(
            "x", Forall("y", Implies(eq(x, y), eq(App(S, (x,)), App(S, (y,)))))
        )
    if tag == "nat_1":
        return Forall("x", Or(eq(x, App(ZERO)), Exists("y", eq(x, App(S, (y,))))))
    if tag == "nat_2":
        return Forall("x", Not(eq(App(S, (x,)), App(ZERO))))
    if tag == "nat_3":
        return Forall(
            "x",
            Forall("y", Implies(eq(App(S, (x,)), App(S, (y,))), eq(x, y))),
        )
    if tag.startswith("nat_"):
        k = int(tag[len("nat_"):])
        if k >= 4:
            return Forall("x", Not(eq(s_term(k - 3, "x"), x)))
    raise ValueError(f"unknown axiom tag {tag!r}")


def induction_instance(body: Formula, var: str) -> Formula:
    """The structural-induction scheme instantiated with a
    quantifier-free formula: body(0) and every step implies all of body.
    """
    validate(body)
    for _, g in _walk(body):
        if isinstance(g, QUANT):
            raise ValueError("the scheme takes a quantifier-free formula")
    from .syntax import Subst, apply

    base = apply(Subst({var: App(ZERO)}), body)
    fresh = "y" if var != "y" else "y0"
    stepped = apply(Subst({var: App(S, (Var(fresh),))}), body)
    hypothesis = apply(Subst({var: Var(fresh)}), body)
    step = Forall(fresh, Implies(hypothesis, stepped))
    return Implies(And(base, step), Forall(var, body))


def eval_nat(f: Formula, slack: int = 0, env: Optional[dict] = None) -> bool:
    """Exact truth over the naturals by bounded evaluation with
    value-relative quantifier ranges.

    A flat bound on every quantifier cannot decide this theory (for
    every B, `!x. ?y. y = S(x)` fails at x = B although it holds on the
    naturals).  Instead each quantifier ranges up to max(values in the
    environment, offsets in the formula) + delta, where delta exceeds
    every successor offset: any larger witness is indistinguishable from
    that one, so the evaluation is a decision procedure.  `slack` widens
    every range, which lets tests validate stability.
    """
    validate(f)
    delta = _max_offset(f) + 1

    def go(g: Formula, e: dict) -> bool:
        if isinstance(g, Atom):
            return _value(g.args[0], e) == _value(g.args[1], e)
        if isinstance(g, Not):
            return not go(g.body, e)
        if isinstance(g, And):
            return go(g.left, e) and go(g.right, e)
        if isinstance(g, Or):
            return go(g.left, e) or go(g.right, e)
        if isinstance(g, Implies):
            return (not go(g.left, e)) or go(g.right, e)
        if isinstance(g, Iff):
            return go(g.left, e) == go(g.right, e)
        if isinstance(g, (Forall, Exists)):
            top = max([delta] + list(e.values())) + delta + slack
            values = range(top + 1)
            if isinstance(g, Forall):
                return all(go(g.body, {**e, g.var: v}) for v in values)
            return any(go(g.body, {**e, g.var: v}) for v in values)
        raise TypeError(f"not a formula: {g!r}")

    def _value(t: Term, e: dict) -> int:
        k, base = peel(t)
        return k if base is None else k + e[base]

    return go(f, dict(env or {}))


def _max_offset(f: Formula) -> int:
    out = 0
    for _, g in _walk(f):
        if isinstance(g, Atom):
            for t in g.args:
                out = max(out, peel(t)[0])
    return out


def eval_standard(f: Formula, bound: int, env: Optional[dict] = None) -> bool:
    """Evaluate over the naturals with quantifiers bounded by 0..bound;
    a flat-bound evaluator (see eval_nat for the decision oracle)."""
    env = dict(env or {})

    def term_value(t: Term, e: dict) -> int:
        k, base = peel(t)
        return k if base is None else k + e[base]

    def go(g: Formula, e: dict) -> bool:
        if isinstance(g, Atom):
            return term_value(g.args[0], e) == term_value(g.args[1], e)
        if isinstance(g, Not):
            return not go(g.body, e)
        if isinstance(g, And):
            return go(g.left, e) and go(g.right, e)
        if isinstance(g, Or):
            return go(g.left, e) or go(g.right, e)
        if isinstance(g, Implies):
            return (not go(g.left, e)) or go(g.right, e)
        if isinstance(g, Iff):
            return go(g.left, e) == go(g.right, e)
        if isinstance(g, Forall):
            return all(go(g.body, {**e, g.var: n}) for n in range(bound + 1))
        if isinstance(g, Exists):
            return any(go(g.body, {**e, g.var: n}) for n in range(bound + 1))
        raise TypeError(f"not a formula: {g!r}")

    return go(f, env)


def formula_size(f: Formula) -> int:
    """Node count of the formula tree including term nodes."""

    def term_nodes(t: Term) -> int:
        if isinstance(t, Var):
            return 1
        return 1 + sum(term_nodes(a) for a in t.args)

    if isinstance(f, Atom):
        return 1 + sum(term_nodes(t) for t in f.args)
    return 1 + sum(formula_size(k) for k in children(f))
