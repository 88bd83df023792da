import pytest

from dali.model import (
    ACTION,
    ORDINARY,
    REACTIVE,
    AgentProgram,
    Atom,
    Clause,
    validate_program,
)


def ids(issues):
    return [i.rule for i in issues]


class TestAtom:
    def test_markers_render(self):
        assert str(Atom("x")) == "x"
        assert str(Atom.past("x")) == "past(x)"
        assert str(Atom.now("x")) == "now(x)"

    def test_base_strips_marker(self):
        assert Atom.past("x").base == Atom("x")
        a = Atom("x")
        assert a.base is a  # plain atoms are their own base

    @pytest.mark.parametrize("bad", ["", "1x", "a-b", "a b", "a."])
    def test_bad_names_rejected(self, bad):
        with pytest.raises(ValueError):
            Atom(bad)

    def test_bad_marker_rejected(self):
        with pytest.raises(ValueError):
            Atom("x", "future")


class TestClause:
    def test_fact(self):
        c = Clause(Atom("p"))
        assert c.is_fact
        assert str(c) == "p."

    def test_body_order_preserved(self):
        c = Clause(Atom("e"), (Atom("a"), Atom("b")), REACTIVE)
        assert str(c) == "e :> a, b."
        assert c.body == (Atom("a"), Atom("b"))


def henry() -> AgentProgram:
    return AgentProgram(
        "Henry",
        (
            Clause(Atom("happy"), (Atom("sunny_day"),)),
            Clause(Atom("happy"), (Atom("sing_a_song"),), REACTIVE),
            Clause(Atom("sunny_day")),
        ),
        internals=(Atom("happy"),),
        actions=(Atom("sing_a_song"),),
    )


class TestValidation:
    def test_henry_is_clean(self):
        report = validate_program(henry())
        assert report.ok
        assert report.errors == ()

    def test_validation_is_deterministic(self):
        assert validate_program(henry()) == validate_program(henry())

    def test_two_reactive_rules_for_one_event(self):
        p = AgentProgram(
            "A",
            (
                Clause(Atom("e"), (Atom("x"),), REACTIVE),
                Clause(Atom("e"), (Atom("y"),), REACTIVE),
            ),
            externals=(Atom("e"),),
        )
        report = validate_program(p)
        assert "multiple-reactive" in ids(report.errors)
        assert len([r for r in ids(report.errors) if r == "multiple-reactive"]) == 1

    def test_two_action_rules_for_one_action(self):
        p = AgentProgram(
            "A",
            (
                Clause(Atom("a"), (Atom("x"),), ACTION),
                Clause(Atom("a"), (Atom("y"),), ACTION),
            ),
            actions=(Atom("a"),),
        )
        assert "multiple-action" in ids(validate_program(p).errors)

    def test_external_event_plain_in_body(self):
        p = AgentProgram(
            "A",
            (
                Clause(Atom("rains"), (Atom("open_umbrella"),), REACTIVE),
                Clause(Atom("wet"), (Atom("rains"),)),
            ),
            externals=(Atom("rains"),),
        )
        assert "external-in-body" in ids(validate_program(p).errors)

    def test_external_event_marked_in_body_is_fine(self):
        p = AgentProgram(
            "A",
            (Clause(Atom("wet"), (Atom.past("rains"),)),),
            externals=(Atom("rains"),),
        )
        report = validate_program(p)
        assert report.ok  # only a no-reactive-rule warning
        assert report.warnings

    def test_reactive_head_must_be_declared_event(self):
        p = AgentProgram("A", (Clause(Atom("e"), (Atom("x"),), REACTIVE),))
        assert "undeclared-reactive-head" in ids(validate_program(p).errors)

    def test_action_rule_head_must_be_declared_action(self):
        p = AgentProgram("A", (Clause(Atom("a"), (Atom("x"),), ACTION),))
        assert "undeclared-action-head" in ids(validate_program(p).errors)

    def test_ordinary_rule_may_not_define_action(self):
        p = AgentProgram(
            "A",
            (Clause(Atom("a"), (Atom("x"),)),),
            actions=(Atom("a"),),
        )
        assert "action-ordinary-head" in ids(validate_program(p).errors)

    def test_now_marker_needs_external(self):
        p = AgentProgram(
            "A",
            (Clause(Atom("p"), (Atom.now("q"),)),),
            internals=(Atom("q"),),
        )
        assert "bad-now-marker" in ids(validate_program(p).errors)

    def test_past_marker_needs_event(self):
        p = AgentProgram("A", (Clause(Atom("p"), (Atom.past("q"),)),))
        assert "bad-past-marker" in ids(validate_program(p).errors)

    def test_external_cannot_be_internal_or_action(self):
        p = AgentProgram(
            "A",
            externals=(Atom("e"), Atom("f")),
            internals=(Atom("e"),),
            actions=(Atom("f"),),
        )
        assert ids(validate_program(p).errors).count("role-conflict") == 2

    def test_action_internal_dual_membership_allowed(self, scenario):
        assert validate_program(scenario("anne")).ok

    def test_duplicate_declarations_are_idempotent(self):
        p = AgentProgram("A", externals=(Atom("e"), Atom("e")))
        assert p.externals == (Atom("e"),)

    def test_accepted_program_has_one_reactive_clause_per_event(self, scenario):
        for name in ("henry", "danger", "anne", "mary"):
            p = scenario(name)
            assert validate_program(p).ok
            for e in p.externals + p.internals:
                count = sum(
                    1
                    for c in p.clauses
                    if c.kind == REACTIVE and c.head.name == e.name
                )
                assert count <= 1


class TestDerivedSets:
    def test_marked_sets_come_from_syntax_not_declarations(self, scenario):
        mary = scenario("mary")
        assert mary.present_marked() == (Atom.now("alarm_clock_rings"),)
        assert mary.past_marked() == ()
        george = scenario("george")
        assert george.past_marked() == (Atom.past("girlfriend_call"),)

    def test_defining_clauses_exclude_reactive(self):
        p = henry()
        heads = [c.kind for c in p.defining_clauses("happy")]
        assert heads == [ORDINARY]
        assert p.reactive_clause("happy") is not None
        assert p.reactive_clause("sunny_day") is None
