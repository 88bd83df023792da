"""Snapshot semantics: compile an agent into a plain Horn program.

Reactive and action rules are not ordinary implications, so the agent's
declarative meaning is given through a transformed program P' over an
extended alphabet {base atoms} + {past_E} + {now_E}:

  * a reactive rule `E :> R1,..,Rq` becomes the guarded pair
        E :- E, R1, .., Rq.
        past_E :- E, R1, .., Rq.
    so E can only fire if the event is true (from a unit clause), and
    firing records the corresponding past event;

  * for every action A and every clause `B :- D1,..,Dh, ..A..` that
    performs it, a clause
        A :- B, D1, .., Dh, C1, .., Cs.
    is added, where C1..Cs are the preconditions from A's action rule
    (empty if A has none) and D1..Dh are the non-action body atoms.  The
    action rule itself is removed: A becomes derivable exactly when some
    rule actually performs it and its preconditions hold;

  * events true at the start contribute unit clauses (`E.` plus `now_E.`
    for externals, `E.` for internals, `past_E.` for past events).

The least Herbrand model of P' is the "snapshot" of the agent's behavior
for that initial situation.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DaliConfigError
from .model import ACTION, PAST, PRESENT, REACTIVE, AgentProgram, Atom

# Provenance labels for transformed clauses.
RULE_ORDINARY = "ordinary"
RULE_REACTIVE = "reactive-transform"
RULE_PAST = "past-transform"
RULE_ACTION = "action-transform"
RULE_INIT = "initial-event"


def mangle(atom: Atom) -> str:
    """Name of an atom in the extended alphabet of P'."""
    if atom.marker == PAST:
        return f"past_{atom.name}"
    if atom.marker == PRESENT:
        return f"now_{atom.name}"
    return atom.name


@dataclass(frozen=True, slots=True)
class TransformedClause:
    """A plain Horn clause of P' with its provenance."""

    head: str
    body: tuple[str, ...] = ()
    rule: str = RULE_ORDINARY
    source: int | None = None  # index of the originating clause, if any

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(self.body)}."


@dataclass(frozen=True, slots=True)
class TransformedProgram:
    agent: str
    clauses: tuple[TransformedClause, ...] = ()

    def pairs(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return tuple((c.head, c.body) for c in self.clauses)


@dataclass(frozen=True, slots=True)
class InitialSituation:
    """Events assumed true at the beginning of the snapshot.

    Entries are plain external/internal event atoms, or past-marked
    event atoms for things remembered from before.
    """

    events: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def validated(self, program: AgentProgram) -> "InitialSituation":
        events = program.event_names
        for a in self.events:
            if a.marker == PRESENT:
                raise DaliConfigError(
                    f"init entry now({a.name}) is redundant: present markers "
                    f"are implied for initial external events"
                )
            if a.name not in events:
                kind = "past event" if a.marker == PAST else "event"
                raise DaliConfigError(
                    f"init {kind} '{a.name}' is not a declared event of "
                    f"agent {program.name}"
                )
        return self


def _dedupe_names(names: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for n in names:
        seen.setdefault(n)
    return tuple(seen)


def transform_program(
    p: AgentProgram, init: InitialSituation | Iterable[Atom] = ()
) -> TransformedProgram:
    """Build P' from a validated agent program and an initial situation."""
    if not isinstance(init, InitialSituation):
        init = InitialSituation(tuple(init))
    init.validated(p)
    action_names = p.action_names

    def guarded(idx, clause, head, rule):
        body = (clause.head.name,) + tuple(mangle(a) for a in clause.body)
        return TransformedClause(head, body, rule, idx)

    # Step 1: reactive rules become guarded pairs; ordinary clauses pass
    # through with markers renamed; action rules are dropped here and
    # folded into step 2 as preconditions.  Each group holds the step-1
    # output of one source clause; past-transform clauses are not scanned
    # for actions (anything they could generate is already subsumed by
    # the clause generated from the guarded pair's first half).
    groups: list[list[tuple[TransformedClause, bool]]] = []
    for idx, c in enumerate(p.clauses):
        if c.kind == REACTIVE:
            groups.append(
                [
                    (guarded(idx, c, c.head.name, RULE_REACTIVE), True),
                    (guarded(idx, c, f"past_{c.head.name}", RULE_PAST), False),
                ]
            )
        elif c.kind == ACTION:
            continue
        else:
            body = tuple(mangle(a) for a in c.body)
            groups.append(
                [(TransformedClause(c.head.name, body, RULE_ORDINARY, idx), True)]
            )

    preconditions: dict[str, tuple[str, ...]] = {}
    for name in action_names:
        rule = p.action_clause(name)
        if rule is not None:
            preconditions[name] = tuple(mangle(a) for a in rule.body)

    # Step 2: every performing clause yields one derivation clause per
    # action atom in its body, placed right after the clauses produced
    # from the same source clause.
    out: list[TransformedClause] = []
    for group in groups:
        out.extend(tc for tc, _ in group)
        for tc, scan in group:
            if not scan:
                continue
            non_actions = tuple(a for a in tc.body if a not in action_names)
            for a in tc.body:
                if a in action_names:
                    body = _dedupe_names(
                        (tc.head,) + non_actions + preconditions.get(a, ())
                    )
                    out.append(TransformedClause(a, body, RULE_ACTION, tc.source))

    # Step 3: unit clauses for the initial situation.
    ext = p.external_names
    for a in init.events:
        if a.marker == PAST:
            out.append(TransformedClause(f"past_{a.name}", (), RULE_INIT))
        else:
            out.append(TransformedClause(a.name, (), RULE_INIT))
            if a.name in ext:
                out.append(TransformedClause(f"now_{a.name}", (), RULE_INIT))

    return TransformedProgram(p.name, tuple(out))


HornClauses = Iterable[tuple[str, Sequence[str]]]


def least_model(program: TransformedProgram | HornClauses) -> frozenset[str]:
    """Least Herbrand model of a plain propositional Horn program.

    Agenda-driven: each clause keeps a count of unsatisfied body atoms
    and fires when it reaches zero, so the whole computation is linear
    in program size.
    """
    if isinstance(program, TransformedProgram):
        clauses = program.pairs()
    else:
        clauses = tuple((h, tuple(b)) for h, b in program)

    remaining = []
    watchers: dict[str, list[int]] = defaultdict(list)
    model: set[str] = set()
    queue: list[str] = []
    for i, (head, body) in enumerate(clauses):
        unsat = set(body)
        remaining.append(len(unsat))
        if not unsat:
            queue.append(head)
        for b in unsat:
            watchers[b].append(i)

    while queue:
        atom = queue.pop()
        if atom in model:
            continue
        model.add(atom)
        for i in watchers.get(atom, ()):
            remaining[i] -= 1
            if remaining[i] == 0:
                head = clauses[i][0]
                if head not in model:
                    queue.append(head)
    return frozenset(model)


def restrict_by_strategy(
    tp: TransformedProgram, keep: Callable[[TransformedClause], bool]
) -> TransformedProgram:
    """Drop the clauses a resolution strategy would never select."""
    return TransformedProgram(tp.agent, tuple(c for c in tp.clauses if keep(c)))


def snapshot(
    p: AgentProgram,
    init: InitialSituation | Iterable[Atom] = (),
    keep: Callable[[TransformedClause], bool] | None = None,
) -> frozenset[str]:
    """Least model of the (optionally restricted) transformed program."""
    tp = transform_program(p, init)
    if keep is not None:
        tp = restrict_by_strategy(tp, keep)
    return least_model(tp)


def render_transformed(tp: TransformedProgram) -> str:
    """P' as `.dali`-compatible ordinary clauses with provenance comments."""
    width = max((len(str(c)) for c in tp.clauses), default=0)
    lines = [f"agent {tp.agent}."]
    for c in tp.clauses:
        lines.append(f"{str(c):<{width}}  % {c.rule}")
    return "\n".join(lines) + "\n"
