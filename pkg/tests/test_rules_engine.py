#!/usr/bin/env python3
"""
Tests for the fillability rules engine
"""
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.core.farey import Slope
from backend.core.models import (
    ConditionStatus, FillabilityStatus, FillingStrength, RuleConflictError, SurgeryInputError,
)
from backend.core.rules_engine import (
    WEAK_FILLING_NOTE, FillabilityRulesEngine, Rule, RuleOutcome, create_rules_engine,
    default_rules, evaluate, necessary_conditions,
)
from backend.core.surgery_calculus import LegendrianRep
from backend.database.database_manager import seed_database
from backend.database.models import KnotFacts
from config.settings_manager import get_settings_manager

FILLABLE = FillabilityStatus.FILLABLE
NOT_FILLABLE = FillabilityStatus.NOT_FILLABLE
UNKNOWN = FillabilityStatus.UNKNOWN


@pytest.fixture(scope="module")
def db():
    return seed_database()


@pytest.fixture
def engine():
    return create_rules_engine()


def max_tb_rep(db, name, rot=0):
    record = db.lookup(name)
    return LegendrianRep(record.name, record.facts.max_tb, rot), record.facts


def tags(verdict):
    return [c.tag for c in verdict.citations]


class TestTorusKnots:
    """Acceptance verdicts on max-tb positive torus knots"""

    def test_trefoil(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        for r in (Fraction(1, 2), 1, Fraction(3, 2), 2, Fraction(5, 2)):
            assert engine.evaluate(rep, facts, r).status == NOT_FILLABLE, r
        for r in (3, Fraction(7, 2), 4, 10):
            verdict = engine.evaluate(rep, facts, r)
            assert verdict.status == FILLABLE, r
            assert verdict.strength == FillingStrength.STEIN

    def test_trefoil_at_two_cites_slice_genus_bound(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        verdict = engine.evaluate(rep, facts, 2)
        assert "slice-genus-obstruction" in tags(verdict)
        assert "torus-2-2n+1" in tags(verdict)
        assert verdict.details['threshold'] == Slope(2)
        assert verdict.details['f_tau'] == 4

    def test_trefoil_at_three(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        verdict = engine.evaluate(rep, facts, 3)
        assert verdict.details['d3'] == 0
        assert verdict.details['h1_order'] == 4
        assert verdict.details['matching_structures'] == ['eta_1', 'eta_2']
        assert verdict.details['tight'] is True
        assert verdict.details['lens_space'] is False
        assert tags(verdict) == ["torus-2-2n+1"]

    def test_trefoil_lens_space_at_four(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        verdict = engine.evaluate(rep, facts, 4)
        assert verdict.details['lens_space'] is True
        assert "torus-large-surgery" in tags(verdict)

    def test_two_five_threshold(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,5)")
        assert engine.evaluate(rep, facts, 4).status == NOT_FILLABLE
        assert engine.evaluate(rep, facts, Fraction(9, 2)).status == NOT_FILLABLE
        assert engine.evaluate(rep, facts, Fraction(49, 10)).status == NOT_FILLABLE
        assert engine.evaluate(rep, facts, 5).status == FILLABLE

    def test_three_four(self, engine, db):
        rep, facts = max_tb_rep(db, "T(3,4)")
        assert (rep.tb, facts.tau) == (5, 3)
        for r in (Fraction(1, 3), 1, 2, 3):
            assert engine.evaluate(rep, facts, r).status == NOT_FILLABLE, r
        for r in (Fraction(13, 4), 4, Fraction(11, 2)):
            assert engine.evaluate(rep, facts, r).status == UNKNOWN, r
        for r in (6, Fraction(13, 2), 9):
            verdict = engine.evaluate(rep, facts, r)
            assert verdict.status == FILLABLE
            assert verdict.strength == FillingStrength.STEIN

    def test_stabilized_torus_knot_is_not_covered_by_torus_rules(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        rep = rep.stabilized()
        verdict = engine.evaluate(rep, facts, 10)
        assert verdict.status == UNKNOWN
        assert verdict.details['tight'] is None

    def test_tb_above_max_rejected(self, engine, db):
        _, facts = max_tb_rep(db, "T(2,3)")
        with pytest.raises(SurgeryInputError):
            engine.evaluate(LegendrianRep("T(2,3)", 2, 0), facts, 3)


class TestSeedKnots:

    def test_below_one_never_fillable(self, db):
        engine = create_rules_engine(compute_d3=False)
        for name in db.names():
            rep, facts = max_tb_rep(db, name)
            for r in (Fraction(1, 2), Fraction(2, 3), Fraction(99, 100)):
                verdict = engine.evaluate(rep, facts, r)
                assert verdict.status == NOT_FILLABLE, (name, r)
                assert WEAK_FILLING_NOTE in verdict.details['notes']

    def test_disk_knots_at_one(self, engine, db):
        for name in ("0_1", "m9_46", "m10_140", "11n139", "12n582", "m12n768", "12n838"):
            rep, facts = max_tb_rep(db, name)
            verdict = engine.evaluate(rep, facts, 1)
            assert verdict.status == FILLABLE, name
            assert verdict.strength == FillingStrength.STEIN
            assert "lagrangian-disk-theorem" in tags(verdict)

    def test_unknot_at_one_has_no_d3(self, engine, db):
        rep, facts = max_tb_rep(db, "0_1")
        verdict = engine.evaluate(rep, facts, 1)
        assert verdict.details['h1_order'] == 0
        assert verdict.details['d3'] is None

    def test_exact_when_disk_not_known_regular(self, engine):
        facts = KnotFacts(bounds_lagrangian_disk=True)
        verdict = engine.evaluate(LegendrianRep("k", -1, 0), facts, 1)
        assert verdict.status == FILLABLE
        assert verdict.strength == FillingStrength.EXACT

    def test_disk_needs_rotation_zero(self, engine, db):
        rep, facts = max_tb_rep(db, "m9_46", rot=2)
        verdict = engine.evaluate(rep, facts, 1)
        assert verdict.status == NOT_FILLABLE
        assert "disk-necessary-conditions" in tags(verdict)

    def test_figure_eight(self, engine, db):
        rep, facts = max_tb_rep(db, "4_1")
        for r in (Fraction(1, 5), 1, Fraction(3, 2), 7, Fraction(41, 3)):
            assert engine.evaluate(rep, facts, r).status == NOT_FILLABLE, r
        verdict = engine.evaluate(rep, facts, 5)
        assert "no-tight-positive-surgery" in tags(verdict)

    def test_quasipositive_slice_without_disk(self, engine, db):
        for name in ("8_20", "10_155"):
            rep, facts = max_tb_rep(db, name)
            verdict = engine.evaluate(rep, facts, 1)
            assert verdict.status == NOT_FILLABLE
            conditions = verdict.details['necessary_conditions']
            assert conditions['tb_minus_one'] == "fails"
            assert conditions['slice'] == "holds"

    def test_pretzel_family(self, engine, db):
        record = db.lookup("P(-8,-3,3)")
        verdict = engine.evaluate(LegendrianRep(record.name, -1, 0), record.facts, 1)
        assert verdict.status == FILLABLE
        assert verdict.strength == FillingStrength.EXACT


class TestNecessaryConditions:

    def test_unknown_facts(self):
        conditions = dict(necessary_conditions(LegendrianRep("k", -1, 0), KnotFacts()))
        assert conditions['tb_minus_one'] == ConditionStatus.HOLDS
        assert conditions['rot_zero'] == ConditionStatus.HOLDS
        assert conditions['quasipositive'] == ConditionStatus.UNKNOWN
        assert conditions['slice'] == ConditionStatus.UNKNOWN
        assert conditions['tau_epsilon_zero'] == ConditionStatus.UNKNOWN

    def test_known_bad_tau(self):
        conditions = dict(necessary_conditions(LegendrianRep("k", -1, 0), KnotFacts(tau=2)))
        assert conditions['tau_epsilon_zero'] == ConditionStatus.FAILS

    def test_max_tb_below_minus_one(self):
        conditions = dict(necessary_conditions(LegendrianRep("k", -3, 0), KnotFacts(max_tb=-3)))
        assert conditions['tb_minus_one'] == ConditionStatus.FAILS

    def test_non_negative_tau_without_epsilon_stays_unknown(self):
        conditions = dict(necessary_conditions(LegendrianRep("k", -1, 0), KnotFacts(tau=0)))
        assert conditions['tau_epsilon_zero'] == ConditionStatus.UNKNOWN

    def test_negative_tau_accepted(self):
        facts = KnotFacts(tau=-1)
        assert facts.validate() == []
        verdict = create_rules_engine().evaluate(LegendrianRep("k", -1, 0), facts, 1)
        assert verdict.status == NOT_FILLABLE
        assert verdict.details['threshold'] is None


class TestEngineMechanics:

    def test_rejects_bad_coefficients(self, engine):
        rep = LegendrianRep()
        for bad in (0, -1, Fraction(-1, 2), Slope(1, 0)):
            with pytest.raises(SurgeryInputError):
                engine.evaluate(rep, KnotFacts(), bad)

    def test_rejects_inconsistent_facts(self, engine):
        facts = KnotFacts(bounds_lagrangian_disk=True, tau=1)
        with pytest.raises(SurgeryInputError):
            engine.evaluate(LegendrianRep(), facts, 1)

    def test_conflict_raises(self):
        always = Rule(
            id="always", name="Always fillable", tag="test", quote="",
            check=lambda ctx: RuleOutcome(FILLABLE, FillingStrength.WEAK), priority=100,
        )
        engine = FillabilityRulesEngine(default_rules() + [always], compute_d3=False)
        with pytest.raises(RuleConflictError):
            engine.evaluate(LegendrianRep(), KnotFacts(), Fraction(1, 2))
        assert engine.statistics['conflicts'] == 1

    def test_disabled_rule(self):
        engine = create_rules_engine(compute_d3=False)
        engine.get_rule("below_one").enabled = False
        verdict = engine.evaluate(LegendrianRep(), KnotFacts(), Fraction(1, 2))
        assert verdict.status == UNKNOWN

    def test_statistics(self, db):
        engine = create_rules_engine(compute_d3=False)
        rep, facts = max_tb_rep(db, "T(2,3)")
        engine.evaluate(rep, facts, 3)
        engine.evaluate(rep, facts, 1)
        assert engine.statistics['evaluations'] == 2
        assert engine.get_rule("torus_two").trigger_count == 1
        assert engine.get_rule("tau_bound").trigger_count == 1

    def test_module_level_evaluate(self, db):
        rep, facts = max_tb_rep(db, "T(2,5)")
        assert evaluate(rep, facts, 5).status == FILLABLE

    def test_verdict_serializes(self, engine, db):
        rep, facts = max_tb_rep(db, "T(2,3)")
        data = engine.evaluate(rep, facts, 3).to_dict()
        assert data['status'] == "Fillable"
        assert data['strength'] == "Stein"
        assert data['citations'][0]['tag'] == "torus-2-2n+1"


class TestNoContradictions:
    """Random facts and coefficients never make two rules disagree"""

    def random_facts(self, rng):
        kind = rng.choice(["torus", "disk", "generic"])
        if kind == "torus":
            p = rng.randint(2, 6)
            q = rng.choice([x for x in range(p + 1, 15) if math.gcd(p, x) == 1])
            facts = KnotFacts(max_tb=p * q - p - q, tau=(p - 1) * (q - 1) // 2, torus=(p, q))
            return facts, facts.max_tb - rng.randint(0, 2)
        if kind == "disk":
            decomposable = rng.choice([True, None])
            facts = KnotFacts(
                bounds_lagrangian_disk=True, decomposable=decomposable,
                regular=True if decomposable else rng.choice([True, None]),
                tau=rng.choice([0, None]), slice=rng.choice([True, None]), max_tb=-1,
            )
            return facts, -1 - rng.randint(0, 2)
        tau = rng.choice([None, -2, -1, 0, 1, 2, 5])
        facts = KnotFacts(
            tau=tau,
            slice=rng.choice([None, False]) if tau not in (None, 0) else rng.choice([None, True, False]),
            quasipositive=rng.choice([None, True, False]),
            no_tight_positive_surgery=rng.choice([None, True, False]),
            epsilon=rng.choice([None, 0, 1, -1]),
        )
        return facts, rng.randint(-8, 8)

    def test_fuzz(self):
        rng = random.Random(20240611)
        engine = create_rules_engine(compute_d3=False)
        for _ in range(get_settings_manager().settings.fuzz_examples):
            facts, tb = self.random_facts(rng)
            rep = LegendrianRep("fuzz", tb, rng.randint(-3, 3))
            r = Fraction(rng.randint(1, 60), rng.randint(1, 12))
            engine.evaluate(rep, facts, r)
        assert engine.statistics['conflicts'] == 0
