"""The extended-resolution interpreter for one agent.

A running goal is a disjunction of component goals; each component is a
conjunction evaluated left to right with chronological backtracking, its
own choice points, and an ancestor check that fails circular branches
(`p :- p` must fail, matching the least-model semantics).

Besides plain clause resolution the interpreter maintains three event
sets and performs actions.  Every transition is one of six step kinds,
recorded in the trace with a case label:

  i    resolve the selected atom with a defining clause (also used for
       past(e) lemma tests, which read the PV set and change nothing);
  ii   perform an action without preconditions, or record a completed
       subproof (a performed action and/or a proved internal event);
  iii  test now(e): succeeds while e is pending in EV, consuming nothing;
  iv   join a pending external event as a new reaction component,
       moving it from EV to PV;
  v    join a recorded internal event as a new reaction component,
       moving it from IV to PV;
  vi   join a self-triggered attempt of an internal event.

A proof of an internal event, wherever it happens, runs as a nested
subproof: when it completes, the event enters IV so the agent can react
to its own conclusion.  Likewise an action with an action rule is
performed exactly when its precondition subproof completes.

Scheduling is owned by a Strategy and is fully deterministic: pending
completions first, then the internal phase (reactions from IV, else one
attempt) on its period, then one step of the round-robin component, then
external event joins.  Periods shape priority only; whenever the
preferred work is absent, any applicable step fires, so the interpreter
never idles while work remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DaliConfigError, DaliValidationError
from .model import (
    ACTION,
    PAST,
    PRESENT,
    REACTIVE,
    AgentProgram,
    Atom,
    Clause,
    validate_program,
)
from .parser import EventScript, ScriptEntry, parse_atom_text

# Component origins.
QUERY = "query"
EXTERNAL_REACTION = "external-reaction"
INTERNAL_REACTION = "internal-reaction"
INTERNAL_ATTEMPT = "internal-attempt"

# Component status.
ACTIVE = "active"
SUCCEEDED = "succeeded"
FAILED = "failed"

TRACE_FIELDS = ("step", "case", "agent", "selected", "component", "ev", "iv", "pv", "performed")


@dataclass(frozen=True, slots=True)
class Strategy:
    """Deterministic scheduling policy.

    event_check_period (k) and internal_check_period (m) say how often
    external joins and the internal phase are given priority; attempts
    cycle through the internal events in declaration order.  seed is
    reserved for future randomized strategies.
    """

    event_check_period: int = 1
    internal_check_period: int = 2
    goal_schedule: str = "round-robin"
    clause_choice: str = "program-order"
    max_steps: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.event_check_period < 1 or self.internal_check_period < 1:
            raise ValueError("strategy periods must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.goal_schedule != "round-robin":
            raise ValueError(f"unsupported goal schedule {self.goal_schedule!r}")
        if self.clause_choice != "program-order":
            raise ValueError(f"unsupported clause choice {self.clause_choice!r}")


@dataclass(frozen=True, slots=True)
class GoalAtom:
    """One pending subgoal: the atom, its proof ancestors (for the loop
    check) and the open nested-subproof regions it belongs to."""

    atom: Atom
    ancestors: frozenset[str] = frozenset()
    regions: tuple[int, ...] = ()


@dataclass(slots=True)
class _Region:
    """An open nested subproof with its completion effects."""

    rid: int
    owner: Atom
    component: int
    perform: bool
    record_iv: bool
    done: bool = False


@dataclass(frozen=True, slots=True)
class _ChoicePoint:
    atoms: tuple[GoalAtom, ...]
    candidates: tuple[Clause, ...]


@dataclass(slots=True)
class Component:
    index: int
    origin: str
    origin_atom: Atom | None
    atoms: tuple[GoalAtom, ...]
    status: str = ACTIVE
    reaction_pending: bool = False
    choicepoints: list[_ChoicePoint] = field(default_factory=list)
    failure: str | None = None

    def goal_text(self) -> tuple[str, ...]:
        return tuple(str(g.atom) for g in self.atoms)


@dataclass(frozen=True, slots=True)
class ComponentOutcome:
    index: int
    origin: str
    atom: str | None
    status: str
    failure: str | None = None


@dataclass(slots=True)
class AgentState:
    """Mutable event state of one agent.

    ev and iv are FIFO ordered sets (arrival/derivation order); pv only
    grows.  performed logs (action, step) pairs; coalesced counts event
    arrivals merged into an already pending instance.
    """

    ev: list[Atom] = field(default_factory=list)
    iv: list[Atom] = field(default_factory=list)
    pv: set[Atom] = field(default_factory=set)
    performed: list[tuple[Atom, int]] = field(default_factory=list)
    coalesced: dict[str, int] = field(default_factory=dict)

    def ev_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.ev)

    def iv_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.iv)

    def pv_names(self) -> tuple[str, ...]:
        return tuple(sorted(a.name for a in self.pv))

    def performed_names(self) -> tuple[str, ...]:
        return tuple(a.name for a, _ in self.performed)


@dataclass(frozen=True, slots=True)
class StepRecord:
    """One interpreter transition, with post-state snapshots and deltas."""

    step: int
    case: str
    selected: str
    component: int
    goal: tuple[str, ...]
    ev: tuple[str, ...]
    iv: tuple[str, ...]
    pv: tuple[str, ...]
    performed: str | None = None
    ev_added: tuple[str, ...] = ()
    ev_removed: tuple[str, ...] = ()
    iv_added: tuple[str, ...] = ()
    iv_removed: tuple[str, ...] = ()
    pv_added: tuple[str, ...] = ()

    def trace_dict(self, agent: str) -> dict:
        return {
            "step": self.step,
            "case": self.case,
            "agent": agent,
            "selected": self.selected,
            "component": self.component,
            "ev": list(self.ev),
            "iv": list(self.iv),
            "pv": list(self.pv),
            "performed": self.performed,
        }


class Engine:
    """Interpreter instance owning one agent's state.

    Instances never share mutable state; inter-agent effects flow through
    the on_action callback, which fires once per performed action.
    """

    def __init__(
        self,
        program: AgentProgram,
        strategy: Strategy | None = None,
        on_action=None,
        validate: bool = True,
    ):
        if validate:
            report = validate_program(program)
            if not report.ok:
                raise DaliValidationError(program.name, report)
        self.program = program
        self.strategy = strategy or Strategy()
        self.on_action = on_action
        self.state = AgentState()
        self.components: list[Component] = []
        self.records: list[StepRecord] = []
        self._regions: dict[int, _Region] = {}
        self._pending: list[int] = []  # region ids awaiting a completion record
        self._next_region = 0
        self._rr = 0
        self._attempt_cursor = 0
        self._last_attempt: dict[str, int] = {}
        self._version = 0  # bumped on event traffic; gates re-attempts
        self._ext_names = program.external_names
        self._int_names = program.internal_names
        self._act_names = program.action_names

    # -- inputs ----------------------------------------------------------

    def inject(self, event: Atom | str) -> bool:
        """Deliver an external event.  Returns False if it was coalesced
        into an instance already pending."""
        atom = parse_atom_text(event).base if isinstance(event, str) else event.base
        if atom.name not in self._ext_names:
            raise DaliConfigError(
                f"'{atom.name}' is not a declared external event of "
                f"agent {self.program.name}"
            )
        self._version += 1
        if any(e.name == atom.name for e in self.state.ev):
            self.state.coalesced[atom.name] = self.state.coalesced.get(atom.name, 0) + 1
            return False
        self.state.ev.append(atom)
        return True

    def add_query(self, atom: Atom | str) -> int:
        """Add a user query as a new component; returns its index."""
        a = parse_atom_text(atom) if isinstance(atom, str) else atom
        comp = Component(len(self.components), QUERY, a, (GoalAtom(a),))
        self.components.append(comp)
        return comp.index

    # -- stepping ----------------------------------------------------------

    @property
    def steps_taken(self) -> int:
        return len(self.records)

    @property
    def quiescent(self) -> bool:
        if self._pending or self.state.ev or self.state.iv:
            return False
        if any(c.status == ACTIVE for c in self.components):
            return False
        return self._find_attempt() is None

    def step(self) -> StepRecord | None:
        """Apply one transition; None means no step kind is applicable."""
        if self._pending:
            return self._completion_step()
        n = len(self.records) + 1
        internal_due = (n - 1) % self.strategy.internal_check_period == 0
        external_due = (n - 1) % self.strategy.event_check_period == 0
        if internal_due:
            rec = self._internal_phase(n)
            if rec is not None:
                return rec
        rec = self._advance_components(n)
        if rec is not None:
            return rec
        # Off-schedule work still runs rather than idling; the periods
        # only decide who goes first when several step kinds apply.
        if self.state.ev and external_due:
            return self._join_external(n)
        if not internal_due:
            rec = self._internal_phase(n)
            if rec is not None:
                return rec
        if self.state.ev:
            return self._join_external(n)
        return None

    def run(self, max_steps: int | None = None) -> list[StepRecord]:
        """Step until quiescence or the budget runs out; returns the
        records produced by this call."""
        budget = self.strategy.max_steps if max_steps is None else max_steps
        out: list[StepRecord] = []
        while len(out) < budget:
            rec = self.step()
            if rec is None:
                break
            out.append(rec)
        return out

    def component_outcomes(self) -> tuple[ComponentOutcome, ...]:
        return tuple(
            ComponentOutcome(
                c.index,
                c.origin,
                str(c.origin_atom) if c.origin_atom else None,
                c.status,
                c.failure,
            )
            for c in self.components
        )

    # -- the six step kinds -------------------------------------------------

    def _record(self, n, case, selected, comp_index, goal, **deltas) -> StepRecord:
        st = self.state
        rec = StepRecord(
            step=n,
            case=case,
            selected=selected,
            component=comp_index,
            goal=goal,
            ev=st.ev_names(),
            iv=st.iv_names(),
            pv=st.pv_names(),
            **deltas,
        )
        self.records.append(rec)
        return rec

    def _internal_phase(self, n) -> StepRecord | None:
        st = self.state
        if st.iv:
            event = st.iv.pop(0)
            pv_added = ()
            if event not in st.pv:
                st.pv.add(event)
                pv_added = (event.name,)
            self._version += 1
            comp = Component(
                len(self.components),
                INTERNAL_REACTION,
                event,
                (GoalAtom(event),),
                reaction_pending=True,
            )
            self.components.append(comp)
            return self._record(
                n,
                "v",
                event.name,
                comp.index,
                comp.goal_text(),
                iv_removed=(event.name,),
                pv_added=pv_added,
            )
        atom = self._find_attempt()
        if atom is None:
            return None
        internals = self.program.internals
        self._attempt_cursor = (internals.index(atom) + 1) % len(internals)
        self._last_attempt[atom.name] = self._version
        comp = Component(len(self.components), INTERNAL_ATTEMPT, atom, (GoalAtom(atom),))
        self.components.append(comp)
        return self._record(n, "vi", atom.name, comp.index, comp.goal_text())

    def _find_attempt(self) -> Atom | None:
        """Next internal event worth attempting, in declaration order.

        Pure internal events only: attempting a dual action/internal atom
        would perform the action unprompted.  An event is skipped while
        pending or already reacted to, while an attempt of it is running,
        and when nothing changed since its last attempt.
        """
        internals = self.program.internals
        if not internals:
            return None
        iv_names = {a.name for a in self.state.iv}
        pv_names = {a.name for a in self.state.pv}
        attempting = {
            c.origin_atom.name
            for c in self.components
            if c.origin == INTERNAL_ATTEMPT and c.status == ACTIVE
        }
        for offset in range(len(internals)):
            a = internals[(self._attempt_cursor + offset) % len(internals)]
            if a.name in self._act_names:
                continue
            if a.name in iv_names or a.name in pv_names or a.name in attempting:
                continue
            if self._last_attempt.get(a.name) == self._version:
                continue
            return a
        return None

    def _join_external(self, n) -> StepRecord:
        st = self.state
        event = st.ev.pop(0)
        pv_added = ()
        if event not in st.pv:
            st.pv.add(event)
            pv_added = (event.name,)
        self._version += 1
        comp = Component(
            len(self.components),
            EXTERNAL_REACTION,
            event,
            (GoalAtom(event),),
            reaction_pending=True,
        )
        self.components.append(comp)
        return self._record(
            n,
            "iv",
            event.name,
            comp.index,
            comp.goal_text(),
            ev_removed=(event.name,),
            pv_added=pv_added,
        )

    def _advance_components(self, n) -> StepRecord | None:
        comps = self.components
        total = len(comps)
        for i in range(total):
            idx = (self._rr + i) % total
            comp = comps[idx]
            if comp.status != ACTIVE:
                continue
            rec = self._advance(comp, n)
            if rec is not None:
                self._rr = (idx + 1) % max(len(self.components), 1)
                return rec
            # the component failed; keep scanning for other work
        return None

    def _advance(self, comp: Component, n) -> StepRecord | None:
        """One transition inside a component; on a failed branch, resume
        at the newest choice point.  None means the component just failed
        for good (choice points exhausted)."""
        st = self.state
        ga = comp.atoms[0]
        atom = ga.atom
        if atom.marker == PRESENT:
            if any(e.name == atom.name for e in st.ev):
                return self._drop_leftmost(comp, n, "iii", str(atom))
            reason = f"now({atom.name}) unsatisfied: event not pending"
        elif atom.marker == PAST:
            if any(p.name == atom.name for p in st.pv):
                return self._drop_leftmost(comp, n, "i", str(atom))
            reason = f"past({atom.name}) unsatisfied: event never reacted to"
        elif comp.reaction_pending:
            comp.reaction_pending = False
            clause = self.program.reactive_clause(atom.name)
            if clause is not None:
                return self._resolve(comp, clause, n)
            reason = f"event '{atom.name}' has no reactive rule"
        elif atom.name in ga.ancestors:
            reason = f"loop detected on '{atom.name}'"
        else:
            candidates = self.program.defining_clauses(atom.name)
            if candidates:
                if len(candidates) > 1:
                    comp.choicepoints.append(
                        _ChoicePoint(comp.atoms, candidates[1:])
                    )
                return self._resolve(comp, candidates[0], n)
            if atom.name in self._act_names:
                return self._simple_action(comp, n)
            reason = f"no clause for '{atom.name}'"

        # Chronological backtracking: restore the goal as it was and try
        # the selected atom's next clause; that retry is the transition.
        cp = comp.choicepoints.pop() if comp.choicepoints else None
        if cp is None:
            comp.status = FAILED
            comp.failure = reason
            return None
        comp.atoms = cp.atoms
        if len(cp.candidates) > 1:
            comp.choicepoints.append(_ChoicePoint(cp.atoms, cp.candidates[1:]))
        return self._resolve(comp, cp.candidates[0], n)

    def _resolve(self, comp: Component, clause: Clause, n) -> StepRecord:
        """SLD step: replace the selected atom with the clause body."""
        ga = comp.atoms[0]
        ancestors = ga.ancestors | {ga.atom.name}
        regions = ga.regions
        opened: int | None = None
        if clause.kind == ACTION:
            opened = self._open_region(
                ga.atom, comp.index, perform=True,
                record_iv=ga.atom.name in self._int_names,
            )
        elif clause.kind != REACTIVE and ga.atom.name in self._int_names:
            # A proved internal event must be recorded; nest its subproof.
            # Resolving with the reactive rule is the reaction itself, so
            # it must not re-record the event.
            opened = self._open_region(
                ga.atom, comp.index, perform=False, record_iv=True
            )
        if opened is not None:
            regions = regions + (opened,)
        before = {r for g in comp.atoms for r in g.regions}
        if opened is not None:
            before.add(opened)
        children = tuple(GoalAtom(b, ancestors, regions) for b in clause.body)
        comp.atoms = children + comp.atoms[1:]
        self._scan_completions(comp, before)
        if not comp.atoms:
            comp.status = SUCCEEDED
        return self._record(n, "i", str(ga.atom), comp.index, comp.goal_text())

    def _drop_leftmost(self, comp, n, case, selected) -> StepRecord:
        before = {r for g in comp.atoms for r in g.regions}
        comp.atoms = comp.atoms[1:]
        self._scan_completions(comp, before)
        if not comp.atoms:
            comp.status = SUCCEEDED
        return self._record(n, case, selected, comp.index, comp.goal_text())

    def _simple_action(self, comp, n) -> StepRecord:
        """An action without an action rule always succeeds."""
        ga = comp.atoms[0]
        atom = ga.atom
        before = {r for g in comp.atoms for r in g.regions}
        comp.atoms = comp.atoms[1:]
        iv_added = self._perform(atom, n)
        self._scan_completions(comp, before)
        if not comp.atoms:
            comp.status = SUCCEEDED
        return self._record(
            n,
            "ii",
            atom.name,
            comp.index,
            comp.goal_text(),
            performed=atom.name,
            iv_added=iv_added,
        )

    # -- nested subproofs --------------------------------------------------

    def _open_region(self, owner, comp_index, perform, record_iv) -> int:
        rid = self._next_region
        self._next_region += 1
        self._regions[rid] = _Region(rid, owner, comp_index, perform, record_iv)
        return rid

    def _scan_completions(self, comp: Component, before: set[int]) -> None:
        present = {r for g in comp.atoms for r in g.regions}
        # Innermost regions were opened last, so higher ids complete first.
        for rid in sorted(before - present, reverse=True):
            region = self._regions[rid]
            if not region.done:
                region.done = True
                self._pending.append(rid)

    def _completion_step(self) -> StepRecord:
        rid = self._pending.pop(0)
        region = self._regions[rid]
        n = len(self.records) + 1
        performed = None
        iv_added: tuple[str, ...] = ()
        if region.perform:
            performed = region.owner.name
            iv_added = self._perform(region.owner, n)
        elif region.record_iv:
            iv_added = self._record_internal(region.owner)
        comp = self.components[region.component]
        return self._record(
            n,
            "ii",
            region.owner.name,
            region.component,
            comp.goal_text(),
            performed=performed,
            iv_added=iv_added,
        )

    def _perform(self, atom: Atom, step: int) -> tuple[str, ...]:
        self.state.performed.append((atom, step))
        if self.on_action is not None:
            self.on_action(atom, step)
        if atom.name in self._int_names:
            return self._record_internal(atom)
        return ()

    def _record_internal(self, atom: Atom) -> tuple[str, ...]:
        # One live instance per conclusion: re-deriving an event that is
        # still pending, or that the agent already reacted to, does not
        # queue another reaction.
        if any(e.name == atom.name for e in self.state.iv):
            return ()
        if any(p.name == atom.name for p in self.state.pv):
            return ()
        self.state.iv.append(atom.base)
        return (atom.name,)


@dataclass(frozen=True, slots=True)
class RunResult:
    state: AgentState
    records: tuple[StepRecord, ...]
    outcomes: tuple[ComponentOutcome, ...]
    truncated: bool
    query_succeeded: bool | None = None


def _normalize_inbox(inbox) -> list[ScriptEntry]:
    if isinstance(inbox, EventScript):
        entries = list(inbox.entries)
    else:
        entries = []
        for item in inbox:
            if isinstance(item, ScriptEntry):
                entries.append(item)
            else:
                tick, event = item
                atom = Atom(event) if isinstance(event, str) else event
                entries.append(ScriptEntry(int(tick), "", atom))
    return sorted(entries, key=lambda e: e.tick)


def run_agent(
    program: AgentProgram,
    query: Atom | str | None = None,
    inbox=(),
    strategy: Strategy | None = None,
    on_action=None,
    max_steps: int | None = None,
) -> RunResult:
    """Run one agent to quiescence (or the step budget).

    The inbox is an EventScript (agent fields ignored) or (tick, event)
    pairs; an entry at tick t is delivered once t interpreter steps have
    run, or immediately at quiescence if the agent got there early.
    """
    engine = Engine(program, strategy, on_action=on_action)
    query_index = None
    if query is not None:
        query_index = engine.add_query(query)
    pending = _normalize_inbox(inbox)
    budget = max_steps if max_steps is not None else engine.strategy.max_steps
    truncated = False
    while True:
        while pending and pending[0].tick <= engine.steps_taken:
            engine.inject(pending.pop(0).event)
        if engine.steps_taken >= budget:
            truncated = not engine.quiescent or bool(pending)
            break
        rec = engine.step()
        if rec is None:
            if pending:
                first = pending.pop(0)
                engine.inject(first.event)
                while pending and pending[0].tick == first.tick:
                    engine.inject(pending.pop(0).event)
                continue
            break
    outcomes = engine.component_outcomes()
    query_ok = None
    if query_index is not None:
        query_ok = outcomes[query_index].status == SUCCEEDED
    return RunResult(
        engine.state, tuple(engine.records), outcomes, truncated, query_ok
    )
