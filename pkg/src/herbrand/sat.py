"""Sentential cores: propositional abstraction, the multiplication
method, and DPLL.

A quantifier-free first-order formula is read propositionally by keying
every atomic subformula on its canonical printed form; two atoms are the
same propositional variable exactly when they print identically.  Terms
headed by Skolem functions need no special treatment under this reading:
they are just part of the atom's spelling.

Literals are (key, sign) pairs; a clause is a frozenset of literals and a
ClauseSet is a set of clauses tagged with its polarity (cnf = conjunction
of disjunctions, dnf = disjunction of conjunctions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import (
    And,
    Atom,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    QUANT,
    children,
    print_formula,
)

Literal = tuple[str, bool]
Clause = frozenset  # of Literal


class QuantifierPresentError(Exception):
    """Raised when a sentential operation meets a quantifier."""


_ATOM_KEYS: dict = {}


def atom_key(a: Atom) -> str:
    key = _ATOM_KEYS.get(a)
    if key is None:
        key = _ATOM_KEYS[a] = print_formula(a)
    return key


def abstract(f: Formula) -> tuple[Formula, dict[str, Atom]]:
    """Check f is quantifier-free and return it with its atom table.

    The atom table maps canonical keys back to the atoms they abbreviate,
    for witness reporting.
    """
    table: dict[str, Atom] = {}

    def go(g: Formula):
        if isinstance(g, QUANT):
            raise QuantifierPresentError(
                f"not sentential: quantifier ?/! in {print_formula(g)}"
            )
        if isinstance(g, Atom):
            table[atom_key(g)] = g
            return
        for k in children(g):
            go(k)

    go(f)
    return f, table


@dataclass(frozen=True)
class ClauseSet:
    polarity: str  # "cnf" | "dnf"
    clauses: frozenset

    def __post_init__(self):
        if self.polarity not in ("cnf", "dnf"):
            raise ValueError("polarity must be cnf or dnf")

    def prune_trivial(self) -> "ClauseSet":
        """Drop clauses containing both signs of one atom.

        In a cnf these clauses are valid disjunctions, in a dnf they are
        contradictory conjunctions; either way they carry no information.
        """
        kept = frozenset(c for c in self.clauses if not _has_complementary_pair(c))
        return ClauseSet(self.polarity, kept)


def _has_complementary_pair(clause: Clause) -> bool:
    keys = {}
    for key, sign in clause:
        if keys.get(key, sign) != sign:
            return True
        keys[key] = sign
    return False


def _nnf_literals(f: Formula, sign: bool) -> Formula:
    """Negation normal form with Iff expanded; output uses And/Or/Not-atom."""
    if isinstance(f, Atom):
        return f if sign else Not(f)
    if isinstance(f, Not):
        return _nnf_literals(f.body, not sign)
    if isinstance(f, Iff):
        return _nnf_literals(
            And(Implies(f.left, f.right), Implies(f.right, f.left)), sign
        )
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    if isinstance(f, Or):
        ctor = Or if sign else And
        return ctor(_nnf_literals(f.left, sign), _nnf_literals(f.right, sign))
    if isinstance(f, And):
        ctor = And if sign else Or
        return ctor(_nnf_literals(f.left, sign), _nnf_literals(f.right, sign))
    raise QuantifierPresentError(f"not sentential: {print_formula(f)}")


def _distribute(f: Formula, join) -> frozenset:
    """Clauses of a NNF formula; `join` names the inner connective.

    join=Or gives cnf clauses, join=And gives dnf clauses.  Naive
    distribution with subsumption pruning, no definitional forms.
    """
    outer = And if join is Or else Or

    def go(g: Formula) -> set[Clause]:
        if isinstance(g, Atom):
            return {frozenset([(atom_key(g), True)])}
        if isinstance(g, Not):
            return {frozenset([(atom_key(g.body), False)])}
        if isinstance(g, outer):
            return prune(go(g.left) | go(g.right))
        if isinstance(g, join):
            left, right = go(g.left), go(g.right)
            return prune({a | b for a in left for b in right})
        raise QuantifierPresentError(f"not sentential: {print_formula(g)}")

    def prune(clauses: set[Clause]) -> set[Clause]:
        out = set()
        for c in sorted(clauses, key=len):
            if not any(kept <= c for kept in out):
                out.add(c)
        return out

    return frozenset(go(f))


def cnf(f: Formula) -> ClauseSet:
    return ClauseSet("cnf", _distribute(_nnf_literals(f, True), Or))


def dnf(f: Formula) -> ClauseSet:
    return ClauseSet("dnf", _distribute(_nnf_literals(f, True), And))


def cnf_of_negation(f: Formula) -> ClauseSet:
    return ClauseSet("cnf", _distribute(_nnf_literals(f, False), Or))


# ---------------------------------------------------------------------------
# the multiplication method


def gilmore_check(cs: ClauseSet) -> bool:
    """Complementary-pair elimination over the multiplied-out form.

    With cnf polarity the input already is the multiplied-out form: true
    iff every disjunction contains an atom together with its negation.
    With dnf polarity the set is multiplied out first: every way of
    picking one literal from each conjunct must contain a complementary
    pair, which is checked path by path with early elimination.
    """
    if cs.polarity == "cnf":
        return all(_has_complementary_pair(c) for c in cs.clauses)
    return _all_paths_closed(sorted(cs.clauses, key=sorted), {}) is None


def _all_paths_closed(conjuncts: list, picked: dict) -> Optional[dict]:
    """Return a pair-free path (as an assignment dict) or None."""
    if not conjuncts:
        return dict(picked)
    first, rest = conjuncts[0], conjuncts[1:]
    for key, sign in sorted(first):
        if picked.get(key, sign) != sign:
            continue  # this pick closes the path; try another literal
        fresh = key not in picked
        picked[key] = sign
        result = _all_paths_closed(rest, picked)
        if result is not None:
            return result
        if fresh:
            del picked[key]
    return None


# ---------------------------------------------------------------------------
# DPLL


def dpll(cs: ClauseSet) -> tuple[bool, Optional[dict[str, bool]]]:
    """Satisfiability of a cnf clause set.

    Unit propagation, pure-literal elimination, then splitting on the
    lowest atom key, positive branch first.  Deterministic: identical
    inputs give identical models.  Atoms left unconstrained are fixed to
    False so the model is total over the input's atoms.
    """
    if cs.polarity != "cnf":
        raise ValueError("dpll expects cnf polarity")
    atoms = sorted({key for c in cs.clauses for key, _ in c})
    model = _dpll([set(c) for c in cs.clauses], {})
    if model is None:
        return False, None
    for key in atoms:
        model.setdefault(key, False)
    return True, model


def _dpll(clauses: list[set], assign: dict[str, bool]) -> Optional[dict[str, bool]]:
    clauses = [set(c) for c in clauses]
    while True:
        clauses = _simplify(clauses, assign)
        if clauses is None:
            return None
        if not clauses:
            return assign
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is not None:
            key, sign = next(iter(unit))
            assign[key] = sign
            continue
        pure = _pure_literal(clauses)
        if pure is not None:
            assign[pure[0]] = pure[1]
            continue
        break
    key = min(k for c in clauses for k, _ in c)
    for sign in (True, False):
        trial = dict(assign)
        trial[key] = sign
        result = _dpll(clauses, trial)
        if result is not None:
            return result
    return None


def _simplify(clauses: list[set], assign: dict[str, bool]) -> Optional[list[set]]:
    out = []
    for c in clauses:
        reduced = set()
        satisfied = False
        for key, sign in c:
            if key in assign:
                if assign[key] == sign:
                    satisfied = True
                    break
            else:
                reduced.add((key, sign))
        if satisfied:
            continue
        if not reduced:
            return None  # empty clause: conflict
        out.append(reduced)
    return out


def _pure_literal(clauses: list[set]) -> Optional[Literal]:
    polarity: dict[str, set[bool]] = {}
    for c in clauses:
        for key, sign in c:
            polarity.setdefault(key, set()).add(sign)
    for key in sorted(polarity):
        signs = polarity[key]
        if len(signs) == 1:
            return key, next(iter(signs))
    return None


# ---------------------------------------------------------------------------
# tautology entry point


def is_tautology(
    f: Formula, engine: str = "dpll"
) -> tuple[bool, Optional[dict[str, bool]]]:
    """Truth-functional validity of a quantifier-free formula.

    Returns (verdict, falsifying assignment when the verdict is False).
    The assignment maps atom keys to truth values.
    """
    abstract(f)  # rejects quantifiers, builds no state we need here
    if engine == "dpll":
        sat, model = dpll(cnf_of_negation(f))
        return (False, model) if sat else (True, None)
    if engine == "multiplication":
        d = dnf(f)
        path = _all_paths_closed(sorted(d.clauses, key=sorted), {})
        if path is None:
            return True, None
        atoms = {key for c in d.clauses for key, _ in c}
        assignment = {key: not sign for key, sign in path.items()}
        for key in atoms:
            assignment.setdefault(key, False)
        return False, assignment
    raise ValueError(f"unknown engine {engine!r}")


def dimacs_dump(cs: ClauseSet) -> str:
    """DIMACS-like text for debugging: atom table then clause lines."""
    atoms = sorted({key for c in cs.clauses for key, _ in c})
    index = {key: i + 1 for i, key in enumerate(atoms)}
    lines = [f"c polarity {cs.polarity}"]
    lines += [f"c atom {i + 1} {key}" for i, key in enumerate(atoms)]
    lines.append(f"p {cs.polarity} {len(atoms)} {len(cs.clauses)}")
    for c in sorted(cs.clauses, key=sorted):
        nums = sorted((index[k] if s else -index[k]) for k, s in c)
        lines.append(" ".join(str(n) for n in nums) + " 0")
    return "\n".join(lines) + "\n"
