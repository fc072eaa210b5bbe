"""
Machine-readable output schemas
One JSON object per CLI invocation; rationals are rendered as "p/q" strings.
The field sets are frozen and documented in API.md.
"""
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict

from backend.core.farey import Slope
from backend.core.four_manifold import Cobordism, D3Result
from backend.core.models import Verdict
from backend.core.surgery_calculus import SurgeryDiagram
from backend.database.models import KnotRecord


def rational(value: Union[Fraction, Slope, int, None]) -> Optional[str]:
    """Render an exact value as "p/q" (∞ as "1/0")"""
    if value is None:
        return None
    if isinstance(value, Slope):
        return str(value)
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class CitationModel(FrozenModel):
    tag: str
    quote: str


class VerdictDetails(FrozenModel):
    smooth_coefficient: Optional[str] = None
    f_tau: Optional[int] = None
    threshold: Optional[str] = None
    d3: Optional[str] = None
    h1_order: Optional[int] = None
    sigma: Optional[int] = None
    chi: Optional[int] = None
    c_squared: Optional[str] = None
    ceiling_coefficient: Optional[int] = None
    tight: Optional[bool] = None
    lens_space: Optional[bool] = None
    matching_structures: Optional[List[str]] = None
    necessary_conditions: Optional[Dict[str, str]] = None
    notes: List[str] = []


class VerdictOutput(FrozenModel):
    knot: str
    tb: int
    rot: int
    coefficient: str
    status: str
    strength: Optional[str] = None
    citations: List[CitationModel] = []
    details: VerdictDetails


class ComponentModel(FrozenModel):
    contact_sign: int
    tb: int
    rot: int
    stabilizations: int
    parent: Optional[int] = None
    smooth_framing: int


class DecompositionOutput(FrozenModel):
    knot: str
    tb: int
    rot: int
    coefficient: str
    smooth_coefficient: str
    plus_count: int
    components: List[ComponentModel]


class LinkingOutput(FrozenModel):
    matrix: List[List[int]]
    rot: List[int]
    plus_count: int


class D3Output(FrozenModel):
    d3: str
    c_squared: str
    sigma: int
    chi: int
    h1_order: int
    plus_count: int
    extended_convention: bool


class D3TableOutput(FrozenModel):
    n: int
    values: Dict[str, str]
    matching_structures: List[str]


class FTableOutput(FrozenModel):
    values: Dict[int, int]
    lower_bounds: Dict[int, int]
    witnesses: Optional[Dict[int, List[int]]] = None


class SlopeOutput(FrozenModel):
    query: str
    result: Union[bool, str, List[str]]


class KnotOutput(FrozenModel):
    name: str
    facts: Dict[str, Any]
    provenance: Dict[str, str]
    synthetic: bool
    derived_from: List[str]
    same_as: Optional[str] = None


class ErrorOutput(FrozenModel):
    error: str
    diagnostics: List[str] = []
    exit_code: int


def verdict_output(verdict: Verdict, knot: str, tb: int, rot: int, coefficient: Slope) -> VerdictOutput:
    details = dict(verdict.details)
    for key in ('smooth_coefficient', 'threshold', 'd3', 'c_squared'):
        details[key] = rational(details.get(key))
    return VerdictOutput(
        knot=knot,
        tb=tb,
        rot=rot,
        coefficient=str(coefficient),
        status=verdict.status.value,
        strength=verdict.strength.value if verdict.strength else None,
        citations=[CitationModel(tag=c.tag, quote=c.quote) for c in verdict.citations],
        details=VerdictDetails(**details),
    )


def decomposition_output(diagram: SurgeryDiagram, smooth: Slope) -> DecompositionOutput:
    rep = diagram.original
    return DecompositionOutput(
        knot=rep.knot_id,
        tb=rep.tb,
        rot=rep.rot,
        coefficient=str(diagram.coefficient),
        smooth_coefficient=str(smooth),
        plus_count=diagram.plus_count,
        components=[
            ComponentModel(
                contact_sign=c.contact_sign, tb=c.tb, rot=c.rot, stabilizations=c.stabilizations,
                parent=c.parent, smooth_framing=c.smooth_framing,
            )
            for c in diagram.components
        ],
    )


def linking_output(cob: Cobordism) -> LinkingOutput:
    return LinkingOutput(matrix=[list(row) for row in cob.Q], rot=list(cob.rot), plus_count=cob.plus_count)


def d3_output(result: D3Result) -> D3Output:
    return D3Output(
        d3=rational(result.value),
        c_squared=rational(result.c_squared),
        sigma=result.sigma,
        chi=result.chi,
        h1_order=result.h1_order,
        plus_count=result.plus_count,
        extended_convention=result.extended_convention,
    )


def knot_output(record: KnotRecord) -> KnotOutput:
    return KnotOutput(**record.to_dict())
