"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import random

from herbrand.expansion import FiniteStructure
from herbrand.sat import atom_key
from herbrand.syntax import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    PREDICATE,
    Symbol,
    Term,
    Var,
    children,
    formula_symbols,
    free_vars,
)

P1 = Symbol("P", 1, PREDICATE)
Q1 = Symbol("Q", 1, PREDICATE)
R2 = Symbol("R", 2, PREDICATE)
CONST_A = Symbol("a", 0)
CONST_B = Symbol("b", 0)
FUN_F = Symbol("f", 1)
FUN_G = Symbol("g", 2)


def random_term(rng: random.Random, vars_: list[str], depth: int,
                funcs=(CONST_A, CONST_B, FUN_F)) -> Term:
    choices = ["var"] * len(vars_) + ["fn"]
    if depth == 0:
        nullary = [f for f in funcs if f.arity == 0]
        if vars_ and (not nullary or rng.random() < 0.6):
            return Var(rng.choice(vars_))
        return App(rng.choice(nullary))
    kind = rng.choice(choices)
    if kind == "var" and vars_:
        return Var(rng.choice(vars_))
    sym = rng.choice(list(funcs))
    return App(sym, tuple(random_term(rng, vars_, depth - 1, funcs)
                          for _ in range(sym.arity)))


def random_formula(
    rng: random.Random,
    depth: int,
    vars_: list[str],
    preds=(P1, Q1),
    funcs=(CONST_A,),
    allow_iff: bool = False,
) -> Formula:
    if depth == 0 or rng.random() < 0.25:
        pred = rng.choice(list(preds))
        args = tuple(random_term(rng, vars_, 1, funcs) for _ in range(pred.arity))
        return Atom(pred, args)
    kinds = ["not", "and", "or", "imp", "all", "ex"]
    if allow_iff:
        kinds.append("iff")
    kind = rng.choice(kinds)
    if kind == "not":
        return Not(random_formula(rng, depth - 1, vars_, preds, funcs, allow_iff))
    if kind in ("and", "or", "imp", "iff"):
        ctor = {"and": And, "or": Or, "imp": Implies, "iff": Iff}[kind]
        return ctor(
            random_formula(rng, depth - 1, vars_, preds, funcs, allow_iff),
            random_formula(rng, depth - 1, vars_, preds, funcs, allow_iff),
        )
    v = f"q{len(vars_)}"
    ctor = Forall if kind == "all" else Exists
    return ctor(v, random_formula(rng, depth - 1, vars_ + [v], preds, funcs, allow_iff))


def truth_table_tautology(f: Formula) -> bool:
    """Independent truth-table oracle over the atom keys."""
    atoms = sorted({atom_key(g) for g in _atoms(f)})

    def ev(g: Formula, row: dict) -> bool:
        if isinstance(g, Atom):
            return row[atom_key(g)]
        if isinstance(g, Not):
            return not ev(g.body, row)
        if isinstance(g, And):
            return ev(g.left, row) and ev(g.right, row)
        if isinstance(g, Or):
            return ev(g.left, row) or ev(g.right, row)
        if isinstance(g, Implies):
            return (not ev(g.left, row)) or ev(g.right, row)
        if isinstance(g, Iff):
            return ev(g.left, row) == ev(g.right, row)
        raise TypeError(g)

    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not ev(f, dict(zip(atoms, bits))):
            return False
    return True


def _atoms(f: Formula):
    if isinstance(f, Atom):
        yield f
        return
    for k in children(f):
        yield from _atoms(k)


def random_structure(
    rng: random.Random, f: Formula, size: int
) -> FiniteStructure:
    """A random total structure interpreting every symbol of f."""
    domain = tuple(f"e{i}" for i in range(size))
    fn_tables: dict = {}
    pred_tables: dict = {}
    for sym in sorted(formula_symbols(f), key=lambda s: (s.name, s.arity)):
        if sym.kind == PREDICATE:
            table = {
                args: rng.random() < 0.5
                for args in itertools.product(domain, repeat=sym.arity)
            }
            pred_tables[(sym.name, sym.arity)] = table
        else:
            table = {
                args: rng.choice(domain)
                for args in itertools.product(domain, repeat=sym.arity)
            }
            fn_tables[(sym.name, sym.arity)] = table
    var_env = {v: rng.choice(domain) for v in free_vars(f) | {"l"}}
    return FiniteStructure(domain, fn_tables, pred_tables, var_env)


def all_structures(f: Formula, size: int):
    """Every structure of the given size for f's (small) signature.

    Only practical for a couple of unary predicates and constants; used
    for exhaustive semantic-equivalence checks.
    """
    domain = tuple(f"e{i}" for i in range(size))
    preds = sorted(
        (s for s in formula_symbols(f) if s.kind == PREDICATE),
        key=lambda s: (s.name, s.arity),
    )
    funcs = sorted(
        (s for s in formula_symbols(f) if s.kind != PREDICATE),
        key=lambda s: (s.name, s.arity),
    )
    frees = sorted(free_vars(f))

    pred_spaces = []
    for sym in preds:
        cells = list(itertools.product(domain, repeat=sym.arity))
        tables = [
            dict(zip(cells, bits))
            for bits in itertools.product((False, True), repeat=len(cells))
        ]
        pred_spaces.append(tables)
    fn_spaces = []
    for sym in funcs:
        cells = list(itertools.product(domain, repeat=sym.arity))
        tables = [
            dict(zip(cells, values))
            for values in itertools.product(domain, repeat=len(cells))
        ]
        fn_spaces.append(tables)
    env_space = [dict(zip(frees, values))
                 for values in itertools.product(domain, repeat=len(frees))]

    for pred_choice in itertools.product(*pred_spaces) if pred_spaces else [()]:
        for fn_choice in itertools.product(*fn_spaces) if fn_spaces else [()]:
            for env in env_space or [{}]:
                yield FiniteStructure(
                    domain,
                    {
                        (sym.name, sym.arity): table
                        for sym, table in zip(funcs, fn_choice)
                    },
                    {
                        (sym.name, sym.arity): table
                        for sym, table in zip(preds, pred_choice)
                    },
                    dict(env),
                )
