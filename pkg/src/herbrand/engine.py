"""Unification and the classic semi-decision procedures: the expansion
loop with the multiplication method, the same loop with a DPLL core, and
resolution with a given-clause saturation, plus the unification-guided
instance search backing Herbrand-complexity queries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from . import sat
from .expansion import (
    BudgetExceededError,
    HerbrandDisjunction,
    check_instances,
    herbrand_disjunction,
    property_c,
)
from .syntax import (
    And,
    App,
    Atom,
    Formula,
    LEXICON,
    Not,
    Or,
    Subst,
    Var,
    apply_term,
    apply,
    compose,
    height,
    print_formula,
    print_term,
    term_vars,
)

# ---------------------------------------------------------------------------
# unification by equation transformation


@dataclass(frozen=True)
class Unifier:
    status: str  # "success" | "clash" | "occurs"
    substitution: Subst = field(default_factory=Subst)
    offending: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.status == "success"


def unify(s, t, under: Optional[Subst] = None) -> Unifier:
    """Most general unifier of two terms or two atoms.

    Equation-transformation method: decompose applications, eliminate
    the first variable equation, swap so the variable is on the left,
    fail on symbol clash or occurs check.  The result is idempotent.
    `under` pre-applies an existing substitution to both sides.
    """
    if isinstance(s, Atom) or isinstance(t, Atom):
        if not (isinstance(s, Atom) and isinstance(t, Atom)):
            raise TypeError("cannot unify an atom with a term")
        if s.pred != t.pred:
            return Unifier("clash", offending=(s.pred.name, t.pred.name))
        eqs = list(zip(s.args, t.args))
    else:
        eqs = [(s, t)]
    sigma = under or Subst()
    if sigma:
        eqs = [(apply_term(sigma, a), apply_term(sigma, b)) for a, b in eqs]
    while eqs:
        a, b = eqs.pop(0)
        if a == b:
            continue
        if isinstance(a, App) and isinstance(b, App):
            if a.sym != b.sym:
                return Unifier("clash", offending=(a.sym.name, b.sym.name))
            eqs = list(zip(a.args, b.args)) + eqs
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        # a is a variable
        if isinstance(b, App) and a.name in term_vars(b):
            return Unifier("occurs", offending=(a.name, print_term(b)))
        binding = Subst({a.name: b})
        sigma = compose(sigma, binding)
        eqs = [(apply_term(binding, x), apply_term(binding, y)) for x, y in eqs]
    return Unifier("success", sigma)


# ---------------------------------------------------------------------------
# clauses

Literal = tuple[bool, Atom]  # (sign, atom)


@dataclass(frozen=True)
class Clause:
    """A set of signed atoms with variables, plus the provenance needed
    to read a Herbrand witness out of a refutation: one substitution of
    the original gamma-variables per initial-clause copy in its
    derivation tree."""

    literals: frozenset
    provenance: tuple = ()  # of (initial_index, Subst over gamma vars)

    def __len__(self):
        return len(self.literals)

    def is_empty(self) -> bool:
        return not self.literals

    def is_tautologous(self) -> bool:
        keys = {(s, sat.atom_key(a)) for s, a in self.literals}
        return any((not s, k) in keys for s, k in keys)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for _, atom in self.literals:
            for t in atom.args:
                out |= term_vars(t)
        return out

    def rename(self, mapping: dict[str, str]) -> "Clause":
        sub = Subst({v: Var(n) for v, n in mapping.items()})
        return self.apply_sub(sub)

    def apply_sub(self, sub: Subst) -> "Clause":
        lits = frozenset((sign, apply(sub, atom)) for sign, atom in self.literals)
        prov = tuple((idx, compose(theta, sub)) for idx, theta in self.provenance)
        return Clause(lits, prov)

    def canonical(self) -> frozenset:
        """Literals under a variable renaming canonical in print order,
        for duplicate detection up to renaming."""
        printed = sorted(
            (("" if sign else "~") + print_formula(atom), sign, atom)
            for sign, atom in self.literals
        )
        mapping: dict[str, str] = {}
        for _, _, atom in printed:
            for t in atom.args:
                for v in sorted(term_vars(t)):
                    mapping.setdefault(v, f"v{len(mapping)}")
        sub = Subst({v: Var(n) for v, n in mapping.items()})
        return frozenset((sign, apply(sub, atom)) for _, sign, atom in printed)

    def pretty(self, dual: bool = False) -> str:
        if not self.literals:
            return "#" if dual else "[]"
        parts = sorted(
            ("" if sign else "~") + print_formula(atom) for sign, atom in self.literals
        )
        if dual:
            # the dual presentation: elements of a disjunctive set are
            # conjunctions of the literal complements
            parts = sorted(
                ("~" if sign else "") + print_formula(atom)
                for sign, atom in self.literals
            )
            return " & ".join(parts)
        return " | ".join(parts)


def formula_clauses(f: Formula) -> list[frozenset]:
    """First-order cnf clauses of a quantifier-free formula by naive
    distribution, literals as (sign, Atom)."""

    def go(g: Formula, sign: bool) -> list[set]:
        if isinstance(g, Atom):
            return [{(sign, g)}]
        if isinstance(g, Not):
            return go(g.body, not sign)
        from .syntax import Iff, Implies

        if isinstance(g, Iff):
            return go(And(Implies(g.left, g.right), Implies(g.right, g.left)), sign)
        if isinstance(g, Implies):
            return go(Or(Not(g.left), g.right), sign)
        conjunctive = (isinstance(g, And) and sign) or (isinstance(g, Or) and not sign)
        left, right = go(g.left, sign), go(g.right, sign)
        if conjunctive:
            return left + right
        return [a | b for a in left for b in right]

    out = []
    seen = set()
    for c in go(f, True):
        fc = frozenset(c)
        if fc not in seen:
            seen.add(fc)
            out.append(fc)
    return out


def standardize_apart(c: Clause, counter: Iterator[int]) -> Clause:
    # '@' keeps the fresh names outside the identifier grammar, so they
    # can never collide with user variables
    batch = next(counter)
    mapping = {
        v: f"{v.split('@')[0]}@{batch}.{i}"
        for i, v in enumerate(sorted(c.variables()))
    }
    return c.rename(mapping)


def resolve(c1: Clause, c2: Clause, l1: Literal, l2: Literal) -> Optional[Clause]:
    """Resolvent on the chosen literals, or None when they do not unify.

    The literals must be of opposite sign over the same predicate and
    the clauses standardized apart.
    """
    sign1, a1 = l1
    sign2, a2 = l2
    if sign1 == sign2 or a1.pred != a2.pred:
        raise ValueError("resolution needs opposite-sign literals of one predicate")
    u = unify(a1, a2)
    if not u.ok:
        return None
    rest = (c1.literals - {l1}) | (c2.literals - {l2})
    lits = frozenset((s, apply(u.substitution, a)) for s, a in rest)
    prov = tuple(
        (idx, compose(theta, u.substitution))
        for idx, theta in c1.provenance + c2.provenance
    )
    return Clause(lits, prov)


def factor(c: Clause, l1: Literal, l2: Literal) -> Optional[Clause]:
    """Binary factor collapsing two same-sign literals, or None."""
    sign1, a1 = l1
    sign2, a2 = l2
    if sign1 != sign2 or a1.pred != a2.pred or l1 == l2:
        raise ValueError("factoring needs two distinct same-sign literals")
    u = unify(a1, a2)
    if not u.ok:
        return None
    return c.apply_sub(u.substitution)


# ---------------------------------------------------------------------------
# proof attempt results


@dataclass(frozen=True)
class ProofResult:
    found: bool
    method: str
    order: Optional[int] = None
    steps: int = 0
    witness: tuple = ()
    reason: str = ""
    trace: tuple = ()

    @property
    def gave_up(self) -> bool:
        return not self.found


def _ground_residuals(sub: Subst, gamma_vars: Sequence[str]) -> Subst:
    filler = Var(LEXICON)
    out = {}
    for y in gamma_vars:
        image = sub.get(y)
        if image is None:
            out[y] = filler
            continue
        residual = Subst({v: filler for v in term_vars(image)})
        out[y] = apply_term(residual, image)
    return Subst(out)


def prove_resolution(
    f: Formula, step_budget: int = 2000, trace: bool = False, should_stop=None,
    dual: bool = False,
) -> ProofResult:
    """Refutation-side resolution with a fair given-clause loop.

    Clausifies the negation of the Skolemized matrix; on reaching the
    empty clause, extracts one substitution of the gamma-variables per
    initial-clause copy from the provenance, grounds residual variables
    with the lexicon, and returns them as a Property C style witness.
    Exhausting the budget means gave-up, never invalid.  With `dual` the
    trace presents clauses as the conjunctions of a disjunctive set.
    """
    d = herbrand_disjunction(f, 1)
    gamma = d.gamma_vars
    initial = [
        Clause(c, ((i, Subst()),))
        for i, c in enumerate(formula_clauses(Not(d.matrix)))
    ]
    events = []

    def log(kind: str, payload=None, clause: Optional[Clause] = None):
        if trace:
            body = clause.pretty(dual) if clause is not None else payload
            events.append(f"{kind} {body}")

    # propositional fast path: the clause set may already be unsat when
    # atoms are read as spelled; then one lexicon-grounding suffices
    prop = sat.ClauseSet(
        "cnf",
        frozenset(
            frozenset((sat.atom_key(a), s) for s, a in c.literals) for c in initial
        ),
    )
    satisfiable, _ = sat.dpll(prop)
    if not satisfiable:
        witness = (_ground_residuals(Subst(), gamma),)
        log("verdict", "proof-found 0 steps (propositionally closed)")
        return ProofResult(True, "resolution", steps=0, witness=witness, trace=tuple(events))

    import heapq

    counter = itertools.count()
    seen = {c.canonical() for c in initial}
    seq = itertools.count()
    # FIFO over the iteration a clause was produced in, clause size as
    # the tiebreak within one iteration: fair and deterministic
    passive: list[tuple[int, int, int, Clause]] = []
    for c in initial:
        heapq.heappush(passive, (0, len(c), next(seq), c))
        log("clause", clause=c)
    processed: list[Clause] = []
    steps = 0
    iteration = 0

    def sorted_literals(c: Clause):
        return sorted(c.literals, key=lambda l: (print_formula(l[1]), l[0]))

    while passive:
        if should_stop is not None and should_stop():
            return ProofResult(
                False, "resolution", steps=steps, reason="cancelled",
                trace=tuple(events),
            )
        iteration += 1
        _, _, _, given = heapq.heappop(passive)
        given = standardize_apart(given, counter)
        processed.append(given)

        new: list[Clause] = []
        for other in processed:
            right = standardize_apart(other, counter) if other is given else other
            for l1 in sorted_literals(given):
                for l2 in sorted_literals(right):
                    if l1[0] == l2[0] or l1[1].pred != l2[1].pred:
                        continue
                    if steps >= step_budget:
                        log("verdict", "gave-up (budget)")
                        return ProofResult(
                            False, "resolution", steps=steps,
                            reason="step budget exhausted", trace=tuple(events),
                        )
                    steps += 1
                    r = resolve(given, right, l1, l2)
                    if r is None:
                        continue
                    log("resolvent", clause=r)
                    if r.is_empty():
                        witness = _extract_witness(r, gamma)
                        log("verdict", f"proof-found {steps} steps")
                        return ProofResult(
                            True, "resolution", steps=steps, witness=witness,
                            trace=tuple(events),
                        )
                    new.append(r)
        lits = sorted_literals(given)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                if lits[i][0] != lits[j][0] or lits[i][1].pred != lits[j][1].pred:
                    continue
                fc = factor(given, lits[i], lits[j])
                if fc is not None and fc.literals != given.literals:
                    log("factor", clause=fc)
                    new.append(fc)
        for c in new:
            if c.is_tautologous():
                continue  # sound to drop: a tautologous clause never helps
            key = c.canonical()
            if key not in seen:
                seen.add(key)
                heapq.heappush(passive, (iteration, len(c), next(seq), c))
    log("verdict", "gave-up (saturated)")
    return ProofResult(
        False, "resolution", steps=steps, reason="saturated without refutation",
        trace=tuple(events),
    )


def _extract_witness(empty: Clause, gamma: Sequence[str]) -> tuple:
    subs = []
    for _idx, theta in empty.provenance:
        grounded = _ground_residuals(theta, gamma)
        if grounded not in subs:
            subs.append(grounded)
    return tuple(subs)


def prove_gilmore(
    f: Formula,
    n_max: int,
    budget: int = 10**6,
    always_lexicon: bool = False,
    should_stop=None,
) -> ProofResult:
    """Test Property C at orders 1..n_max with the multiplication
    method; report the first succeeding order."""
    return _order_loop(
        f, n_max, budget, always_lexicon, "gilmore", "multiplication", should_stop
    )


def prove_dp(
    f: Formula,
    n_max: int,
    budget: int = 10**6,
    always_lexicon: bool = False,
    should_stop=None,
) -> ProofResult:
    """The same order loop with the matrix negation converted to clause
    form once and the tautology test replaced by DPLL."""
    d = herbrand_disjunction(f, 1, always_lexicon)
    base_clauses = formula_clauses(Not(d.matrix))
    for n in range(1, n_max + 1):
        if should_stop is not None and should_stop():
            return ProofResult(False, "dp", reason="cancelled")
        dn = herbrand_disjunction(f, n, always_lexicon)
        if dn.count > budget:
            return ProofResult(
                False, "dp", order=None, reason=f"budget exceeded at order {n}"
            )
        clauses = set()
        for sigma in dn.substitutions():
            for c in base_clauses:
                clauses.add(
                    frozenset(
                        (sat.atom_key(apply(sigma, a)), s) for s, a in c
                    )
                )
        satisfiable, _ = sat.dpll(sat.ClauseSet("cnf", frozenset(clauses)))
        if not satisfiable:
            witness = tuple(dn.substitutions())
            return ProofResult(True, "dp", order=n, witness=witness)
    return ProofResult(False, "dp", reason=f"no proof up to order {n_max}")


def _order_loop(
    f, n_max, budget, always_lexicon, method, engine, should_stop=None
) -> ProofResult:
    for n in range(1, n_max + 1):
        if should_stop is not None and should_stop():
            return ProofResult(False, method, reason="cancelled")
        try:
            verdict, witness = property_c(
                f, n, budget, always_lexicon, engine=engine
            )
        except BudgetExceededError as e:
            return ProofResult(False, method, reason=str(e))
        if verdict:
            assert witness is not None
            return ProofResult(True, method, order=n, witness=witness.substitutions)
    return ProofResult(False, method, reason=f"no proof up to order {n_max}")


def minimize_witness(f: Formula, sigmas: Sequence[Subst]) -> tuple:
    """Greedy pruning of a verified substitution family: drop entries
    whose removal keeps the instance disjunction tautological."""
    kept = list(sigmas)
    changed = True
    while changed:
        changed = False
        for i in range(len(kept) - 1, -1, -1):
            if len(kept) == 1:
                break
            trial = kept[:i] + kept[i + 1:]
            verdict, _ = check_instances(f, trial)
            if verdict:
                kept = trial
                changed = True
    return tuple(kept)


# ---------------------------------------------------------------------------
# unification-guided instance search (connection-style matings)


def _paths(f: Formula) -> list[list[Literal]]:
    """Paths through the validity-side matrix in negation normal form:
    one literal from every disjunct, branching over conjuncts."""
    g = sat._nnf_literals(f, True)

    def go(h: Formula) -> list[list[Literal]]:
        if isinstance(h, Atom):
            return [[(True, h)]]
        if isinstance(h, Not):
            return [[(False, h.body)]]
        if isinstance(h, Or):
            return [a + b for a in go(h.left) for b in go(h.right)]
        if isinstance(h, And):
            return go(h.left) + go(h.right)
        raise TypeError(f"unexpected node in nnf: {h!r}")

    return go(g)


def find_tautological_instances(
    d: HerbrandDisjunction, k: int, budget: int = 10**6
) -> Optional[tuple]:
    """Search for k substitutions of the gamma-variables into the champ
    fini whose instance disjunction is a sentential tautology.

    Connection-method search over k renamed copies of the matrix: every
    path through the combined matrix must contain a complementary pair
    under one simultaneous most general unifier whose minimal grounding
    stays inside the champ fini.  Complete for the given k; returns the
    grounded substitutions or None.
    """
    if not d.champ.terms:
        return None
    filler = d.champ.terms[0]
    bound = d.champ.order

    per_copy = _paths(d.matrix)
    if len(per_copy) ** k > budget:
        raise BudgetExceededError(
            f"{len(per_copy)}^{k} paths exceed the search budget {budget}"
        )
    copies = []
    for i in range(k):
        ren = Subst({y: Var(f"{y}@{i}") for y in d.gamma_vars})
        copies.append(apply(ren, d.matrix))
    combined_paths: list[list[Literal]] = [[]]
    for c in copies:
        combined_paths = [p + q for p in combined_paths for q in _paths(c)]

    nodes = 0

    def grounded_ok(sub: Subst) -> bool:
        for _v, image in sub.items():
            residual = Subst({v: filler for v in term_vars(image)})
            if height(apply_term(residual, image)) >= bound:
                return False
        return True

    def closed(path: list[Literal], sub: Subst) -> bool:
        seen: dict[str, bool] = {}
        for sign, atom in path:
            key = sat.atom_key(apply(sub, atom))
            if seen.get(key, sign) != sign:
                return True
            seen[key] = sign
        return False

    def search(index: int, sub: Subst) -> Optional[Subst]:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError("instance search budget exhausted")
        if index == len(combined_paths):
            return sub
        path = combined_paths[index]
        if closed(path, sub):
            return search(index + 1, sub)
        for (s1, a1), (s2, a2) in itertools.combinations(path, 2):
            if s1 == s2 or a1.pred != a2.pred:
                continue
            u = unify(a1, a2, under=sub)
            if not u.ok or not grounded_ok(u.substitution):
                continue
            result = search(index + 1, u.substitution)
            if result is not None:
                return result
        return None

    solution = search(0, Subst())
    if solution is None:
        return None
    out = []
    for i in range(k):
        sigma = {}
        for y in d.gamma_vars:
            image = solution.get(f"{y}@{i}") or Var(f"{y}@{i}")
            residual = Subst({v: filler for v in term_vars(image)})
            sigma[y] = apply_term(residual, image)
        sub = Subst(sigma)
        if sub not in out:
            out.append(sub)
    return tuple(out)
