"""Champs finis, Herbrand expansions and disjunctions, Property C and B,
Herbrand complexity, the order bound for a Rule of Passage step, finite
structures with evaluation, and falsifying-structure extraction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from . import sat
from .syntax import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    LEXICON,
    Not,
    Or,
    PREDICATE,
    QUANT,
    Subst,
    Symbol,
    Term,
    Var,
    apply,
    children,
    formula_symbols,
    free_vars,
    function_symbols,
    height,
    print_formula,
    print_term,
    rectify,
    subformulas,
    with_children,
)
from .transform import skolemize_outer, to_antiprenex

DEFAULT_BUDGET = 10**6


class BudgetExceededError(Exception):
    """The instance budget was hit; explicitly not a verdict."""


class UninterpretedSymbolError(Exception):
    """A symbol of the formula has no table in the structure."""


# ---------------------------------------------------------------------------
# champs finis


@dataclass(frozen=True)
class ChampFini:
    """The set of all terms of height < order over a signature.

    `terms` is deterministically ordered: by height, then by printed
    form.  The lexicon variable is included exactly when the set would
    otherwise be empty (or when forced by always_lexicon).
    """

    order: int
    signature: frozenset[Symbol]
    variables: frozenset[str]
    terms: tuple[Term, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __contains__(self, t: Term) -> bool:
        return t in set(self.terms)


def champ_fini(
    signature: Iterable[Symbol],
    free_variables: Iterable[str] = (),
    n: int = 1,
    always_lexicon: bool = False,
) -> ChampFini:
    """All terms of height < n over the function symbols and free
    variables given; n must be >= 1.
    """
    if n < 1:
        raise ValueError("the order of a champ fini is a positive natural number")
    funcs = sorted(
        {s for s in signature if s.kind != PREDICATE}, key=lambda s: (s.name, s.arity)
    )
    variables = set(free_variables)
    if always_lexicon:
        variables.add(LEXICON)

    def build(var_names: set[str]) -> list[Term]:
        levels: list[list[Term]] = [[Var(v) for v in sorted(var_names)]]
        for h in range(1, n):
            below = [t for lvl in levels for t in lvl]
            level: list[Term] = []
            for sym in funcs:
                if sym.arity == 0:
                    if h == 1:
                        level.append(App(sym))
                    continue
                for args in itertools.product(below, repeat=sym.arity):
                    if max(height(a) for a in args) == h - 1:
                        level.append(App(sym, args))
            levels.append(level)
        return [t for lvl in levels for t in lvl]

    terms = build(variables)
    if not terms:
        variables.add(LEXICON)
        terms = build(variables)
    terms.sort(key=lambda t: (height(t), print_term(t)))
    return ChampFini(n, frozenset(funcs), frozenset(variables), tuple(terms))


def _champ_for(f: Formula, n: int, always_lexicon: bool) -> ChampFini:
    """T_n over the function and free-variable symbols occurring in f."""
    return champ_fini(function_symbols(f), free_vars(f), n, always_lexicon)


# ---------------------------------------------------------------------------
# expansion and disjunction


def expand(f: Formula, terms: Sequence[Term]) -> Formula:
    """Herbrand expansion over a finite term set: ? becomes a
    disjunction, ! a conjunction, recursing outside in; connectives map
    through unchanged; quantifier-free formulas are fixpoints.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("expansion needs a nonempty term set")

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, QUANT):
            inner = go(g.body)
            instances = [apply(Subst({g.var: t}), inner) for t in terms]
            join = Or if isinstance(g, Exists) else And
            out = instances[-1]
            for inst in reversed(instances[:-1]):
                out = join(inst, out)
            return out
        return with_children(g, tuple(go(k) for k in children(g)))

    return go(f)


def strip_gamma_quantifiers(f: Formula) -> tuple[Formula, list[str]]:
    """Drop every quantifier of a Skolemized form, returning the matrix
    and the bound (gamma-) variables in binding order."""
    order: list[str] = []

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, QUANT):
            order.append(g.var)
            return go(g.body)
        return with_children(g, tuple(go(k) for k in children(g)))

    return go(f), order


@dataclass(frozen=True)
class HerbrandDisjunction:
    matrix: Formula
    gamma_vars: tuple[str, ...]
    champ: ChampFini
    skolemized: Formula

    @property
    def count(self) -> int:
        return len(self.champ) ** len(self.gamma_vars)

    def substitutions(self) -> Iterator[Subst]:
        """All maps from the gamma-variables into the champ fini, in
        deterministic odometer order (last variable fastest)."""
        if not self.gamma_vars:
            yield Subst()
            return
        for images in itertools.product(self.champ.terms, repeat=len(self.gamma_vars)):
            yield Subst(dict(zip(self.gamma_vars, images)))

    def instance(self, sigma: Subst) -> Formula:
        return apply(sigma, self.matrix)


def herbrand_disjunction(
    f: Formula, n: int, always_lexicon: bool = False
) -> HerbrandDisjunction:
    """Matrix, gamma-variable set and substitution family of f's
    Herbrand disjunction of order n.

    The champ fini is formed over the function and free-variable symbols
    occurring in the outer Skolemized form.
    """
    skolemized = skolemize_outer(rectify(f))
    matrix, gamma = strip_gamma_quantifiers(skolemized)
    champ = _champ_for(skolemized, n, always_lexicon)
    return HerbrandDisjunction(matrix, tuple(gamma), champ, skolemized)


@dataclass(frozen=True)
class PropertyCWitness:
    order: int
    substitutions: tuple[Subst, ...]
    matrix: Formula


def _disjoin(instances: list[Formula]) -> Formula:
    out = instances[-1]
    for inst in reversed(instances[:-1]):
        out = Or(inst, out)
    return out


def check_instances(
    f: Formula, sigmas: Sequence[Subst], engine: str = "dpll"
) -> tuple[bool, Optional[dict]]:
    """Is the disjunction of the given matrix instances a sentential
    tautology?  The tractable entry point when the full expansion is out
    of reach.  Every substitution must be total on the gamma-variables.
    """
    d = herbrand_disjunction(f, 1)
    for s in sigmas:
        missing = set(d.gamma_vars) - s.domain()
        if missing:
            raise ValueError(
                f"substitution not total on the gamma-variables: missing {sorted(missing)}"
            )
    if not sigmas:
        return False, None
    big = _disjoin([d.instance(s) for s in sigmas])
    return sat.is_tautology(big, engine)


def property_c(
    f: Formula,
    n: int,
    budget: int = DEFAULT_BUDGET,
    always_lexicon: bool = False,
    engine: str = "dpll",
) -> tuple[bool, Optional[PropertyCWitness]]:
    """Property C of order n: the full Herbrand disjunction over T_n is
    a sentential tautology.  Returns the witnessing substitution family
    when true.  Exceeding the instance budget raises, it never reports a
    silent False.
    """
    if n < 1:
        raise ValueError("Property C orders are positive natural numbers")
    d = herbrand_disjunction(f, n, always_lexicon)
    if d.count > budget:
        raise BudgetExceededError(
            f"order-{n} disjunction has {d.count} instances, budget is {budget}"
        )
    sigmas = list(d.substitutions())
    verdict, _ = check_instances(f, sigmas, engine) if sigmas else (False, None)
    if not verdict:
        return False, None
    return True, PropertyCWitness(n, tuple(sigmas), d.matrix)


def property_b(
    f: Formula,
    n: int,
    budget: int = DEFAULT_BUDGET,
    always_lexicon: bool = False,
) -> tuple[bool, Optional[PropertyCWitness]]:
    """Property C of the anti-prenex normal form."""
    return property_c(to_antiprenex(rectify(f)), n, budget, always_lexicon)


def herbrand_complexity(
    f: Formula,
    n: int,
    k_max: int,
    budget: int = DEFAULT_BUDGET,
) -> Optional[int]:
    """Smallest k <= k_max such that some k instances of the matrix over
    T_n disjoin to a sentential tautology; None when no k suffices.

    Candidate instance families come from a unification-guided search
    (engine module); each candidate is verified by check_instances.
    """
    from .engine import find_tautological_instances

    if n < 1 or k_max < 1:
        raise ValueError("order and instance bound are positive naturals")
    d = herbrand_disjunction(f, n)
    for k in range(1, k_max + 1):
        found = find_tautological_instances(d, k, budget)
        if found is not None:
            verdict, _ = check_instances(f, found)
            if not verdict:
                raise AssertionError("candidate witness failed verification")
            return k
    return None


def godel_dreben_order(n: int, r: int, N: int) -> int:
    """Order bound n * (N**r + 1) ** n restoring Property C invariance
    under one Rule of Passage, in exact integer arithmetic."""
    if n < 1 or N < 1 or r < 0:
        raise ValueError("need n, N >= 1 and r >= 0")
    return n * (N**r + 1) ** n


# ---------------------------------------------------------------------------
# finite structures


@dataclass(frozen=True)
class FiniteStructure:
    """A finite structure: total function tables, boolean predicate
    tables, and an assignment for the free variables."""

    domain: tuple[str, ...]
    fn_tables: dict
    pred_tables: dict
    var_env: dict

    def __post_init__(self):
        if not self.domain:
            raise ValueError("the domain must be nonempty")

    def eval_term(self, t: Term):
        if isinstance(t, Var):
            try:
                return self.var_env[t.name]
            except KeyError:
                raise UninterpretedSymbolError(f"free variable {t.name} unassigned")
        table = self.fn_tables.get((t.sym.name, t.sym.arity))
        if table is None:
            raise UninterpretedSymbolError(f"function {t.sym.name} uninterpreted")
        args = tuple(self.eval_term(a) for a in t.args)
        return table[args]


def eval_in_structure(s: FiniteStructure, f: Formula) -> bool:
    """Standard Tarskian truth value, quantifiers ranging over the
    domain."""

    def go(g: Formula, env: dict) -> bool:
        if isinstance(g, Atom):
            table = s.pred_tables.get((g.pred.name, g.pred.arity))
            if table is None:
                raise UninterpretedSymbolError(f"predicate {g.pred.name} uninterpreted")
            args = tuple(_eval_term(t, env) for t in g.args)
            return bool(table.get(args, False))
        if isinstance(g, Not):
            return not go(g.body, env)
        if isinstance(g, And):
            return go(g.left, env) and go(g.right, env)
        if isinstance(g, Or):
            return go(g.left, env) or go(g.right, env)
        if isinstance(g, Implies):
            return (not go(g.left, env)) or go(g.right, env)
        if isinstance(g, Iff):
            return go(g.left, env) == go(g.right, env)
        if isinstance(g, Forall):
            return all(go(g.body, {**env, g.var: e}) for e in s.domain)
        if isinstance(g, Exists):
            return any(go(g.body, {**env, g.var: e}) for e in s.domain)
        raise TypeError(f"not a formula: {g!r}")

    def _eval_term(t: Term, env: dict):
        if isinstance(t, Var):
            if t.name in env:
                return env[t.name]
            raise UninterpretedSymbolError(f"free variable {t.name} unassigned")
        table = s.fn_tables.get((t.sym.name, t.sym.arity))
        if table is None:
            raise UninterpretedSymbolError(f"function {t.sym.name} uninterpreted")
        return table[tuple(_eval_term(a, env) for a in t.args)]

    return go(f, dict(s.var_env))


def falsifying_structure(
    f: Formula,
    p: int,
    budget: int = DEFAULT_BUDGET,
    always_lexicon: bool = False,
) -> Optional[FiniteStructure]:
    """When Property C of order p fails, build a finite structure over
    the term domain T_{p+m} (m the maximal term height of the Skolemized
    form) in which the order-p expansion evaluates to false; None when
    Property C holds.

    Functions are interpreted as term constructors, truncated at the
    height bound by a designated sink element (the enumeration-maximal
    term).  Predicate tables come from the falsifying assignment.
    """
    if p < 1:
        raise ValueError("the order p is a positive natural number")
    d = herbrand_disjunction(f, p, always_lexicon)
    if d.count > budget:
        raise BudgetExceededError(
            f"order-{p} disjunction has {d.count} instances, budget is {budget}"
        )
    expansion = expand(d.skolemized, d.champ.terms)
    verdict, assignment = sat.is_tautology(expansion)
    if verdict:
        return None
    assert assignment is not None

    heights = [
        height(t)
        for _, g in subformulas(d.skolemized)
        if isinstance(g, Atom)
        for t in g.args
    ]
    m = max(heights, default=0)
    dom_champ = champ_fini(
        d.champ.signature, d.champ.variables, p + m, always_lexicon
    )
    domain = tuple(print_term(t) for t in dom_champ.terms)
    index = set(domain)
    sink = domain[-1]

    fn_tables: dict = {}
    for sym in sorted(dom_champ.signature, key=lambda s: (s.name, s.arity)):
        table = {}
        for args in itertools.product(dom_champ.terms, repeat=sym.arity):
            image = print_term(App(sym, args))
            table[tuple(print_term(a) for a in args)] = (
                image if image in index else sink
            )
        fn_tables[(sym.name, sym.arity)] = table

    pred_tables: dict = {}
    _, atom_table = sat.abstract(expansion)
    for key, atom in sorted(atom_table.items()):
        args = tuple(print_term(t) for t in atom.args)
        pred_tables.setdefault((atom.pred.name, atom.pred.arity), {})[args] = (
            assignment.get(key, False)
        )
    for sym in {s for s in formula_symbols(f) if s.kind == PREDICATE}:
        pred_tables.setdefault((sym.name, sym.arity), {})

    var_env = {v: v for v in dom_champ.variables}
    structure = FiniteStructure(domain, fn_tables, pred_tables, var_env)
    return structure


# ---------------------------------------------------------------------------
# finite substructures of successor arithmetic


def arith_substructure_witness(axioms: Sequence[Formula], n: int) -> FiniteStructure:
    """A finite substructure of arithmetic over {0..H+1} (H the maximal
    height in T_n) with capped successor and identity equality, in which
    every given axiom holds for all instances over T_n.

    This certifies that the negation of the axioms' conjunction lacks
    Property C of order n.
    """
    if n < 1:
        raise ValueError("n is a positive natural number")
    from .arith import S, ZERO_SYM  # local import; arith builds on syntax only

    champ = champ_fini([ZERO_SYM, S], (), n)
    H = max(height(t) for t in champ.terms)
    top = H + 1
    domain = tuple(str(i) for i in range(top + 1))

    succ = {(str(i),): str(min(i + 1, top)) for i in range(top + 1)}
    fn_tables = {("0", 0): {(): "0"}, ("S", 1): succ}
    eq = {
        (str(i), str(j)): (i == j) for i in range(top + 1) for j in range(top + 1)
    }
    pred_tables = {("=", 2): eq}
    var_env = {v: "0" for v in champ.variables}
    structure = FiniteStructure(domain, fn_tables, pred_tables, var_env)

    for axiom in axioms:
        for instance in _axiom_instances(axiom, champ):
            if not eval_in_structure(structure, instance):
                raise AssertionError(
                    f"substructure fails instance {print_formula(instance)}"
                )
    return structure


def _axiom_instances(axiom: Formula, champ: ChampFini) -> Iterator[Formula]:
    """Strip the universal closure and instantiate over the champ fini."""
    vars_: list[str] = []
    body = axiom
    while isinstance(body, Forall):
        vars_.append(body.var)
        body = body.body
    for images in itertools.product(champ.terms, repeat=len(vars_)):
        yield apply(Subst(dict(zip(vars_, images))), body)


# ---------------------------------------------------------------------------
# structure serialization (line-oriented text)


def dump_structure(s: FiniteStructure) -> str:
    lines = ["domain: " + " ".join(s.domain)]
    for v in sorted(s.var_env):
        lines.append(f"var {v}: {s.var_env[v]}")
    for (name, _arity), table in sorted(s.fn_tables.items()):
        for args in sorted(table):
            lines.append(f"fn {name}: ({' '.join(args)})->{table[args]}")
    for (name, _arity), table in sorted(s.pred_tables.items()):
        for args in sorted(table):
            value = "T" if table[args] else "F"
            lines.append(f"pred {name}: ({' '.join(args)})->{value}")
    return "\n".join(lines) + "\n"


def load_structure(text: str) -> FiniteStructure:
    domain: tuple[str, ...] = ()
    fn_tables: dict = {}
    pred_tables: dict = {}
    var_env: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("domain:"):
            domain = tuple(line[len("domain:"):].split())
        elif line.startswith("var "):
            head, _, value = line[len("var "):].partition(":")
            var_env[head.strip()] = value.strip()
        elif line.startswith(("fn ", "pred ")):
            is_fn = line.startswith("fn ")
            rest = line[3:] if is_fn else line[5:]
            name, _, mapping = rest.partition(":")
            args_part, _, value = mapping.strip().partition("->")
            args = tuple(args_part.strip().lstrip("(").rstrip(")").split())
            if is_fn:
                fn_tables.setdefault((name.strip(), len(args)), {})[args] = value.strip()
            else:
                pred_tables.setdefault((name.strip(), len(args)), {})[args] = (
                    value.strip() == "T"
                )
        else:
            raise ValueError(f"unrecognized structure line: {raw!r}")
    return FiniteStructure(domain, fn_tables, pred_tables, var_env)
