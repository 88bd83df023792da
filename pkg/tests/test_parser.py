import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dali.errors import DaliSyntaxError
from dali.model import ACTION, ORDINARY, REACTIVE, AgentProgram, Atom, Clause
from dali.parser import (
    parse_agent_file,
    parse_atom_text,
    parse_event_script,
    parse_init_atoms,
    pretty,
)


class TestAgentFiles:
    def test_henry_two_clauses(self):
        p = parse_agent_file(
            "agent Henry. @internal happy. @action sing_a_song. "
            "happy :- sunny_day. happy :> sing_a_song."
        )
        assert p.name == "Henry"
        assert len(p.clauses) == 2
        assert p.internals == (Atom("happy"),)
        assert p.actions == (Atom("sing_a_song"),)
        assert p.clauses[0].kind == ORDINARY
        assert p.clauses[1].kind == REACTIVE

    def test_empty_agent(self):
        p = parse_agent_file("agent A.")
        assert p.name == "A"
        assert p.clauses == ()
        assert p.externals == p.internals == p.actions == ()

    def test_present_marker_parses(self):
        p = parse_agent_file(
            "agent Mary. @external alarm_clock_rings. "
            "my_god_its_late :- now(alarm_clock_rings)."
        )
        body = p.clauses[0].body
        assert body == (Atom("alarm_clock_rings", "present"),)

    def test_action_rule_token(self):
        p = parse_agent_file("agent A. @action a. a :< c.")
        assert p.clauses[0].kind == ACTION

    def test_comments_and_whitespace(self):
        p = parse_agent_file(
            "agent A.  % a comment\n"
            "% full-line comment\n"
            "p :- q, r.   % trailing\n"
        )
        assert p.clauses == (Clause(Atom("p"), (Atom("q"), Atom("r"))),)

    def test_past_and_now_as_plain_atoms(self):
        # Only the "(" makes them markers.
        p = parse_agent_file("agent A. p :- past, now.")
        assert p.clauses[0].body == (Atom("past"), Atom("now"))

    def test_syntax_error_has_position(self):
        with pytest.raises(DaliSyntaxError) as exc:
            parse_agent_file("agent A.\np :- q,,r.", "f.dali")
        assert exc.value.span is not None
        assert exc.value.span.file == "f.dali"
        assert exc.value.span.line == 2

    def test_unknown_directive(self):
        with pytest.raises(DaliSyntaxError, match="unknown directive"):
            parse_agent_file("agent A. @wibble x.")

    def test_nested_marker_rejected(self):
        with pytest.raises(DaliSyntaxError):
            parse_agent_file("agent A. p :- past(now(x)).")

    def test_missing_header(self):
        with pytest.raises(DaliSyntaxError, match="agent"):
            parse_agent_file("p :- q.")

    def test_directive_after_clause_rejected(self):
        with pytest.raises(DaliSyntaxError):
            parse_agent_file("agent A. p. @external e.")


class TestEventScripts:
    def test_single_line(self):
        s = parse_event_script("0 Mary alarm_clock_rings")
        assert len(s.entries) == 1
        e = s.entries[0]
        assert (e.tick, e.agent, e.event) == (0, "Mary", Atom("alarm_clock_rings"))

    def test_repetition_allowed(self):
        s = parse_event_script("0 A danger\n3 A danger\n")
        assert [e.tick for e in s.entries] == [0, 3]
        assert s.entries[0].event == s.entries[1].event

    def test_decreasing_tick_rejected(self):
        with pytest.raises(DaliSyntaxError, match="decreases"):
            parse_event_script("5 A x\n2 A y\n")

    def test_non_integer_tick(self):
        with pytest.raises(DaliSyntaxError, match="not an integer"):
            parse_event_script("one A x")

    def test_malformed_line(self):
        with pytest.raises(DaliSyntaxError):
            parse_event_script("0 A")

    def test_comments_and_blanks(self):
        s = parse_event_script("# header\n\n0 A x  # same line\n")
        assert len(s.entries) == 1

    def test_due_and_after(self):
        s = parse_event_script("0 A x\n0 A y\n4 A z\n")
        assert [e.event.name for e in s.due(0)] == ["x", "y"]
        assert [e.tick for e in s.after(0)] == [4]


class TestInitAtoms:
    def test_mixed_markers(self):
        atoms = parse_init_atoms("e1, past(e2),now(e3)")
        assert atoms == (Atom("e1"), Atom.past("e2"), Atom.now("e3"))

    def test_single_atom_helper(self):
        assert parse_atom_text("past(x)") == Atom.past("x")
        with pytest.raises(DaliSyntaxError):
            parse_atom_text("not an atom")


# -- round-trip property -------------------------------------------------

idents = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
markers = st.sampled_from(["plain", "past", "present"])
atoms = st.builds(Atom, idents, markers)
plain_atoms = st.builds(Atom, idents)
kinds = st.sampled_from([ORDINARY, REACTIVE, ACTION])


@st.composite
def clauses(draw):
    kind = draw(kinds)
    min_body = 0 if kind == ORDINARY else 1
    body = tuple(draw(st.lists(atoms, min_size=min_body, max_size=4)))
    return Clause(draw(plain_atoms), body, kind)


programs = st.builds(
    AgentProgram,
    st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,8}", fullmatch=True),
    st.lists(clauses(), max_size=8).map(tuple),
    st.lists(plain_atoms, max_size=3).map(tuple),
    st.lists(plain_atoms, max_size=3).map(tuple),
    st.lists(plain_atoms, max_size=3).map(tuple),
)


@settings(max_examples=150)
@given(programs)
def test_pretty_parse_round_trip(program):
    assert parse_agent_file(pretty(program)) == program


@settings(max_examples=150)
@given(programs)
def test_round_trip_preserves_clause_and_body_order(program):
    again = parse_agent_file(pretty(program))
    assert again.clauses == program.clauses
    for mine, theirs in zip(program.clauses, again.clauses):
        assert mine.body == theirs.body
