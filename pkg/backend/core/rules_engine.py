"""
Fillability rules engine
Evaluates contact (r)-surgery on a Legendrian knot against the known
fillability results and returns a verdict citing every rule that fired
"""
import logging
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Callable, Dict, List, Optional, Tuple

from .farey import Slope, SlopeLike, as_slope
from .four_manifold import matching_structures, surgery_d3
from .models import (
    Citation, ConditionStatus, FillabilityStatus, FillingStrength, RuleConflictError,
    SurgeryInputError, Verdict,
)
from .obstructions import f_of_tau, taubound_threshold
from .surgery_calculus import LegendrianRep, ceiling_reduction, smooth_coefficient

if TYPE_CHECKING:
    from ..database.models import KnotFacts

logger = logging.getLogger(__name__)

WEAK_FILLING_NOTE = (
    "for r in (0, 1], weak fillability holds only at r = 1 and only if L bounds a "
    "null-homologous Lagrangian disk in a blow-up of the standard 4-ball; not decided here"
)


@dataclass
class RuleContext:
    """Everything a rule may look at for one evaluation"""
    rep: LegendrianRep
    facts: 'KnotFacts'
    r: Fraction
    threshold: Optional[Slope] = None
    torus_max_tb: bool = False
    conditions: List[Tuple[str, ConditionStatus]] = field(default_factory=list)

    @property
    def torus(self) -> Optional[Tuple[int, int]]:
        return self.facts.torus


@dataclass
class RuleOutcome:
    status: FillabilityStatus
    strength: Optional[FillingStrength] = None
    note: Optional[str] = None


@dataclass
class Rule:
    """A fillability result: when it applies and what it concludes"""
    id: str
    name: str
    tag: str
    quote: str
    check: Callable[[RuleContext], Optional[RuleOutcome]]
    enabled: bool = True
    priority: int = 0
    trigger_count: int = 0
    last_triggered: Optional[datetime] = None

    def fire(self, ctx: RuleContext) -> Optional[RuleOutcome]:
        if not self.enabled:
            return None
        outcome = self.check(ctx)
        if outcome is not None:
            self.trigger_count += 1
            self.last_triggered = datetime.now()
        return outcome

    @property
    def citation(self) -> Citation:
        return Citation(self.tag, self.quote)


def _three_valued(value: Optional[bool]) -> ConditionStatus:
    if value is None:
        return ConditionStatus.UNKNOWN
    return ConditionStatus.HOLDS if value else ConditionStatus.FAILS


def necessary_conditions(rep: LegendrianRep, facts: 'KnotFacts') -> List[Tuple[str, ConditionStatus]]:
    """Conditions that contact (+1)-surgery on rep needs in order to be fillable"""
    if facts.max_tb is not None and facts.max_tb < -1:
        tb_ok: Optional[bool] = False
    else:
        tb_ok = rep.tb == -1

    if facts.tau is None or facts.epsilon is None:
        known_bad = (facts.tau not in (None, 0)) or (facts.epsilon not in (None, 0))
        tau_eps: Optional[bool] = False if known_bad else None
    else:
        tau_eps = facts.tau == 0 and facts.epsilon == 0

    return [
        ('tb_minus_one', _three_valued(tb_ok)),
        ('rot_zero', _three_valued(rep.rot == 0)),
        ('quasipositive', _three_valued(facts.quasipositive)),
        ('slice', _three_valued(facts.slice)),
        ('tau_epsilon_zero', _three_valued(tau_eps)),
    ]


# Rule checks

def _check_below_one(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r < 1:
        return RuleOutcome(FillabilityStatus.NOT_FILLABLE)
    return None


def _check_disk_at_one(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r == 1 and ctx.facts.has_disk and ctx.rep.tb == -1 and ctx.rep.rot == 0:
        strength = FillingStrength.STEIN if ctx.facts.stein_disk else FillingStrength.EXACT
        return RuleOutcome(FillabilityStatus.FILLABLE, strength)
    return None


def _check_necessary_conditions(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r != 1:
        return None
    failed = [name for name, status in ctx.conditions if status == ConditionStatus.FAILS]
    if failed:
        return RuleOutcome(FillabilityStatus.NOT_FILLABLE, note=f"failed conditions: {', '.join(failed)}")
    return None


def _check_no_tight(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r > 1 and ctx.facts.no_tight_positive_surgery:
        return RuleOutcome(FillabilityStatus.NOT_FILLABLE)
    return None


def _check_tau_bound(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.threshold is not None and ctx.r <= ctx.threshold.to_fraction():
        return RuleOutcome(FillabilityStatus.NOT_FILLABLE)
    return None


def _check_torus_two(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r <= 1 or not ctx.torus_max_tb or ctx.torus[0] != 2:
        return None
    n = (ctx.torus[1] - 1) // 2
    if ctx.r >= 2 * n + 1:
        return RuleOutcome(FillabilityStatus.FILLABLE, FillingStrength.STEIN)
    return RuleOutcome(FillabilityStatus.NOT_FILLABLE)


def _check_torus_large(ctx: RuleContext) -> Optional[RuleOutcome]:
    if ctx.r <= 1 or not ctx.torus_max_tb:
        return None
    p, q = ctx.torus
    if ctx.r >= p + q - 1:
        return RuleOutcome(FillabilityStatus.FILLABLE, FillingStrength.STEIN)
    return None


def default_rules() -> List[Rule]:
    """The fillability results, in reporting order"""
    return [
        Rule(
            id="below_one", name="Surgery below one", tag="lagrangian-disk-theorem",
            quote="contact (r)-surgery on a Legendrian knot is never symplectically fillable for r in (0, 1)",
            check=_check_below_one, priority=8,
        ),
        Rule(
            id="disk_at_one", name="Lagrangian disk at one", tag="lagrangian-disk-theorem",
            quote=("contact (+1)-surgery on L is fillable iff L bounds a Lagrangian disk; minimal "
                   "fillings are exact, and Stein when the disk is regular or decomposable"),
            check=_check_disk_at_one, priority=7,
        ),
        Rule(
            id="necessary_conditions", name="Necessary conditions at one", tag="disk-necessary-conditions",
            quote=("a fillable contact (+1)-surgery needs tb(L) = -1, rot(L) = 0, a quasipositive "
                   "slice knot type and tau = epsilon = 0"),
            check=_check_necessary_conditions, priority=6,
        ),
        Rule(
            id="no_tight", name="No tight positive surgery", tag="no-tight-positive-surgery",
            quote="the knot type admits no tight positive contact surgery on any Legendrian representative",
            check=_check_no_tight, priority=5,
        ),
        Rule(
            id="tau_bound", name="Slice-genus bound", tag="slice-genus-obstruction",
            quote="contact (r)-surgery on L is not symplectically fillable for r <= f(tau(L)) - tb(L) - 1",
            check=_check_tau_bound, priority=4,
        ),
        Rule(
            id="torus_two", name="(2,2n+1) torus knots", tag="torus-2-2n+1",
            quote=("contact (r)-surgery on the max-tb (2,2n+1)-torus knot is fillable iff r >= 2n+1, "
                   "and then Stein fillable"),
            check=_check_torus_two, priority=3,
        ),
        Rule(
            id="torus_large", name="Large surgery on torus knots", tag="torus-large-surgery",
            quote="contact (r)-surgery on a max-tb positive (p,q)-torus knot is Stein fillable for r >= p+q-1",
            check=_check_torus_large, priority=2,
        ),
    ]


class FillabilityRulesEngine:
    """Runs every rule, checks agreement and assembles the verdict"""

    def __init__(self, rules: Optional[List[Rule]] = None, compute_d3: bool = True):
        self.rules: List[Rule] = rules if rules is not None else default_rules()
        self.compute_d3 = compute_d3
        self.statistics: Dict[str, Any] = {
            'evaluations': 0,
            'rules_fired': 0,
            'conflicts': 0,
            'last_evaluation': None,
        }

    def get_rule(self, rule_id: str) -> Optional[Rule]:
        return next((rule for rule in self.rules if rule.id == rule_id), None)

    def _context(self, rep: LegendrianRep, facts: 'KnotFacts', r: Fraction) -> RuleContext:
        errors = facts.validate()
        if errors:
            raise SurgeryInputError("Invalid knot facts: " + "; ".join(errors))

        max_tb = facts.max_tb
        if facts.torus is not None:
            p, q = facts.torus
            max_tb = p * q - p - q
        if max_tb is not None and rep.tb > max_tb:
            raise SurgeryInputError(f"tb = {rep.tb} exceeds the maximal tb {max_tb} of {rep.knot_id}")

        return RuleContext(
            rep=rep,
            facts=facts,
            r=r,
            threshold=taubound_threshold(facts, rep.tb),
            torus_max_tb=facts.torus is not None and rep.tb == max_tb,
            conditions=necessary_conditions(rep, facts),
        )

    def evaluate(self, rep: LegendrianRep, facts: 'KnotFacts', r: SlopeLike) -> Verdict:
        """Verdict for contact (r)-surgery on rep"""
        slope = as_slope(r)
        if slope.is_infinite or slope.to_fraction() <= 0:
            raise SurgeryInputError(f"contact surgery coefficient must be positive, got {slope}")
        value = slope.to_fraction()
        ctx = self._context(rep, facts, value)

        fired: List[Tuple[Rule, RuleOutcome]] = []
        for rule in sorted(self.rules, key=lambda rl: rl.priority, reverse=True):
            outcome = rule.fire(ctx)
            if outcome is not None:
                logger.debug(f"Rule '{rule.name}' fired: {outcome.status.value}")
                fired.append((rule, outcome))

        self.statistics['evaluations'] += 1
        self.statistics['rules_fired'] += len(fired)
        self.statistics['last_evaluation'] = datetime.now()

        statuses = {outcome.status for _, outcome in fired}
        if FillabilityStatus.FILLABLE in statuses and FillabilityStatus.NOT_FILLABLE in statuses:
            self.statistics['conflicts'] += 1
            names = ", ".join(f"{rule.id}={outcome.status.value}" for rule, outcome in fired)
            raise RuleConflictError(
                f"contradictory rules for {rep.knot_id} (tb={rep.tb}, rot={rep.rot}) at r={slope}: {names}"
            )

        verdict = Verdict(citations=[rule.citation for rule, _ in fired])
        if statuses:
            verdict.status = statuses.pop()
        strengths = [o.strength for _, o in fired if o.strength is not None]
        if strengths:
            verdict.strength = max(strengths, key=lambda s: s.rank)

        verdict.details = self._details(ctx, slope, [o.note for _, o in fired if o.note])
        logger.info(f"{rep.knot_id} r={slope}: {verdict.status.value}")
        return verdict

    def _details(self, ctx: RuleContext, slope: Slope, notes: List[str]) -> Dict[str, Any]:
        rep, facts = ctx.rep, ctx.facts
        details: Dict[str, Any] = {
            'smooth_coefficient': smooth_coefficient(rep, slope),
            'f_tau': f_of_tau(facts.tau) if facts.tau is not None and facts.tau >= 0 else None,
            'threshold': ctx.threshold,
            'ceiling_coefficient': ceiling_reduction(slope),
            'd3': None,
            'h1_order': None,
            'sigma': None,
            'chi': None,
            'c_squared': None,
            'tight': True if ctx.torus_max_tb else None,
            'lens_space': None,
            'matching_structures': None,
            'notes': list(notes),
        }
        if ctx.r <= 1:
            details['notes'].append(WEAK_FILLING_NOTE)

        if self.compute_d3:
            if rep.tb + ctx.r == 0:
                details['h1_order'] = 0
                details['notes'].append("smooth coefficient 0: boundary is not a rational homology sphere, no d3")
            else:
                result = surgery_d3(rep, slope)
                details.update(
                    d3=result.value, h1_order=result.h1_order, sigma=result.sigma, chi=result.chi,
                    c_squared=result.c_squared,
                )
                if result.extended_convention:
                    details['notes'].append(
                        f"d3 uses the extended convention with {result.plus_count} (+1)-surgeries"
                    )

        if ctx.torus_max_tb:
            p, q = ctx.torus
            details['lens_space'] = rep.tb + ctx.r == p * q - 1
            if p == 2:
                n = (q - 1) // 2
                if rep.tb + ctx.r == 4 * n:
                    details['matching_structures'] = matching_structures(n)

        if ctx.r == 1:
            details['necessary_conditions'] = {name: status.value for name, status in ctx.conditions}
        return details


_engine: Optional[FillabilityRulesEngine] = None


def create_rules_engine(compute_d3: bool = True) -> FillabilityRulesEngine:
    """Create an engine loaded with the default rules"""
    return FillabilityRulesEngine(default_rules(), compute_d3=compute_d3)


def get_rules_engine() -> FillabilityRulesEngine:
    """Get the shared engine instance"""
    global _engine
    if _engine is None:
        _engine = create_rules_engine()
    return _engine


def evaluate(rep: LegendrianRep, facts: 'KnotFacts', r: SlopeLike) -> Verdict:
    return get_rules_engine().evaluate(rep, facts, r)
