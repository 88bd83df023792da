"""Core data model for DALI agents: atoms, clauses, role sets, validation.

A DALI agent is a propositional Horn-clause program plus three role sets:
external events (made true by the outside world), internal events (own
conclusions the agent reacts to) and actions (atoms whose success is an
effect on the environment).  Past and present markers wrap event atoms in
rule bodies so the agent can reason about what has happened already and
what is pending.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Atom markers.
PLAIN = "plain"
PAST = "past"
PRESENT = "present"
MARKERS = (PLAIN, PAST, PRESENT)

# Clause kinds.
ORDINARY = "ordinary"
REACTIVE = "reactive"
ACTION = "action"
KINDS = (ORDINARY, REACTIVE, ACTION)

ARROWS = {ORDINARY: ":-", REACTIVE: ":>", ACTION: ":<"}

_IDENT = re.compile(r"[A-Za-z_]\w*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT.match(name))


@dataclass(frozen=True, slots=True)
class Atom:
    """A propositional atom, optionally wrapped in a past/present marker."""

    name: str
    marker: str = PLAIN

    def __post_init__(self):
        if not is_identifier(self.name):
            raise ValueError(f"bad atom name: {self.name!r}")
        if self.marker not in MARKERS:
            raise ValueError(f"bad marker: {self.marker!r}")

    @classmethod
    def past(cls, name: str) -> "Atom":
        return cls(name, PAST)

    @classmethod
    def now(cls, name: str) -> "Atom":
        return cls(name, PRESENT)

    @property
    def base(self) -> "Atom":
        """The unmarked event atom this marker refers to."""
        return self if self.marker == PLAIN else Atom(self.name)

    def __str__(self) -> str:
        if self.marker == PAST:
            return f"past({self.name})"
        if self.marker == PRESENT:
            return f"now({self.name})"
        return self.name


@dataclass(frozen=True, slots=True)
class Clause:
    """One rule.  A fact is an ordinary clause with an empty body.

    Body order is significant and preserved: responses in a reactive body
    run left to right.
    """

    head: Atom
    body: tuple[Atom, ...] = ()
    kind: str = ORDINARY

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if self.kind not in KINDS:
            raise ValueError(f"bad clause kind: {self.kind!r}")

    @property
    def is_fact(self) -> bool:
        return self.kind == ORDINARY and not self.body

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        body = ", ".join(str(a) for a in self.body)
        return f"{self.head} {ARROWS[self.kind]} {body}."


def _dedupe(atoms) -> tuple[Atom, ...]:
    seen: dict[Atom, None] = {}
    for a in atoms:
        seen.setdefault(a)
    return tuple(seen)


@dataclass(frozen=True, slots=True)
class AgentProgram:
    """A named agent: ordered clauses plus declared role sets.

    Role sets keep declaration order (it drives the interpreter's
    round-robin over internal events) but behave as sets: duplicates are
    dropped on construction.
    """

    name: str
    clauses: tuple[Clause, ...] = ()
    externals: tuple[Atom, ...] = ()
    internals: tuple[Atom, ...] = ()
    actions: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "externals", _dedupe(self.externals))
        object.__setattr__(self, "internals", _dedupe(self.internals))
        object.__setattr__(self, "actions", _dedupe(self.actions))

    # -- role membership ------------------------------------------------

    @property
    def external_names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.externals)

    @property
    def internal_names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.internals)

    @property
    def action_names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.actions)

    @property
    def event_names(self) -> frozenset[str]:
        return self.external_names | self.internal_names

    # -- clause lookup ----------------------------------------------------

    def reactive_clause(self, name: str) -> Clause | None:
        for c in self.clauses:
            if c.kind == REACTIVE and c.head.name == name:
                return c
        return None

    def action_clause(self, name: str) -> Clause | None:
        for c in self.clauses:
            if c.kind == ACTION and c.head.name == name:
                return c
        return None

    def defining_clauses(self, name: str) -> tuple[Clause, ...]:
        """Clauses usable to prove `name`: ordinary rules and the action
        rule, in program order.  Reactive clauses never prove their head."""
        return tuple(
            c
            for c in self.clauses
            if c.head.name == name and c.kind in (ORDINARY, ACTION)
        )

    # -- derived marker sets (never declared) ---------------------------

    def past_marked(self) -> tuple[Atom, ...]:
        """All past-marked atoms appearing syntactically in the program."""
        return _dedupe(a for c in self.clauses for a in c.body if a.marker == PAST)

    def present_marked(self) -> tuple[Atom, ...]:
        """All present-marked atoms appearing syntactically in the program."""
        return _dedupe(
            a for c in self.clauses for a in c.body if a.marker == PRESENT
        )


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    clause_index: int | None
    rule: str
    message: str


@dataclass(frozen=True, slots=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_program(p: AgentProgram) -> ValidationReport:
    """Check every structural restriction on an agent program.

    Pure and deterministic; violations are reported as data, never raised.
    Programs with an empty error list are accepted by the engine.
    """
    errors: list[ValidationIssue] = []
    warnings: list[str] = []
    ext = p.external_names
    internal = p.internal_names
    act = p.action_names
    events = ext | internal

    def err(idx, rule, msg):
        errors.append(ValidationIssue(idx, rule, msg))

    # Role sets: an external event comes from outside, so it can be
    # neither an own conclusion nor an own action.  Internal+action is
    # fine (the agent reacts to its own actions).
    for name in sorted(ext & internal):
        err(None, "role-conflict", f"'{name}' declared both external and internal")
    for name in sorted(ext & act):
        err(None, "role-conflict", f"'{name}' declared both external and action")

    reactive_seen: set[str] = set()
    action_seen: set[str] = set()

    for i, c in enumerate(p.clauses):
        if c.head.marker != PLAIN:
            err(i, "marked-head", f"clause head {c.head} carries a marker")
            continue
        h = c.head.name

        if c.kind == REACTIVE:
            if h not in events:
                err(
                    i,
                    "undeclared-reactive-head",
                    f"reactive rule for '{h}', which is not a declared event",
                )
            if not c.body:
                err(i, "empty-reactive-body", f"reactive rule for '{h}' has no body")
            if h in reactive_seen:
                err(
                    i,
                    "multiple-reactive",
                    f"second reactive rule for '{h}'; only one is allowed",
                )
            reactive_seen.add(h)
        elif c.kind == ACTION:
            if h not in act:
                err(
                    i,
                    "undeclared-action-head",
                    f"action rule for '{h}', which is not a declared action",
                )
            if not c.body:
                err(i, "empty-action-body", f"action rule for '{h}' has no body")
            if h in action_seen:
                err(
                    i,
                    "multiple-action",
                    f"second action rule for '{h}'; only one is allowed",
                )
            action_seen.add(h)
        else:
            # Ordinary rules may not define externally-driven atoms or
            # actions: externals become true only from outside, actions
            # only through their single action rule.
            if h in ext:
                err(
                    i,
                    "external-ordinary-head",
                    f"ordinary rule defines external event '{h}'",
                )
            if h in act:
                err(
                    i,
                    "action-ordinary-head",
                    f"ordinary rule defines action '{h}'; use an action rule",
                )

        for a in c.body:
            if a.marker == PLAIN and a.name in ext:
                err(
                    i,
                    "external-in-body",
                    f"external event '{a.name}' used plain in a body; "
                    f"wrap it in past(..) or now(..)",
                )
            elif a.marker == PRESENT and a.name not in ext:
                err(
                    i,
                    "bad-now-marker",
                    f"now({a.name}) requires '{a.name}' to be a declared "
                    f"external event",
                )
            elif a.marker == PAST and a.name not in events:
                err(
                    i,
                    "bad-past-marker",
                    f"past({a.name}) requires '{a.name}' to be a declared event",
                )

    for e in p.externals:
        if p.reactive_clause(e.name) is None:
            warnings.append(
                f"external event '{e.name}' has no reactive rule; "
                f"it will be consumed without a reaction"
            )
    for e in p.internals:
        if p.reactive_clause(e.name) is None:
            warnings.append(f"internal event '{e.name}' has no reactive rule")

    return ValidationReport(tuple(errors), tuple(warnings))
