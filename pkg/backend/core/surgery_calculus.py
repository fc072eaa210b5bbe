"""
Contact surgery calculus
Legendrian representatives, contact/smooth coefficient conversion and the
decomposition of contact (r)-surgery into contact (±1)-surgeries with every
stabilization negative
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Tuple

from .farey import Slope, SlopeLike, as_slope, negative_continued_fraction
from .models import SurgeryInputError

if TYPE_CHECKING:
    from .four_manifold import Cobordism

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LegendrianRep:
    """A Legendrian representative of a knot type"""
    knot_id: str = "0_1"
    tb: int = -1
    rot: int = 0

    def stabilized(self, times: int = 1) -> 'LegendrianRep':
        """Negative stabilization: (tb, rot) -> (tb - 1, rot - 1), `times` times"""
        if times < 0:
            raise SurgeryInputError("stabilization count cannot be negative")
        return LegendrianRep(self.knot_id, self.tb - times, self.rot - times)


@dataclass(frozen=True)
class SurgeryComponent:
    """One contact (±1)-surgery component of a decomposed diagram"""
    contact_sign: int
    tb: int
    rot: int
    stabilizations: int = 0
    parent: Optional[int] = None  # None for the original knot

    @property
    def smooth_framing(self) -> int:
        return self.tb + self.contact_sign


@dataclass(frozen=True)
class SurgeryDiagram:
    """Ordered (±1)-surgery components realizing contact (r)-surgery on `original`"""
    original: LegendrianRep
    coefficient: Slope
    components: Tuple[SurgeryComponent, ...] = ()

    @property
    def plus_count(self) -> int:
        return sum(1 for c in self.components if c.contact_sign == 1)


def _positive_coefficient(r: SlopeLike) -> Fraction:
    slope = as_slope(r)
    if slope.is_infinite:
        raise SurgeryInputError("contact (∞)-surgery is not a surgery")
    value = slope.to_fraction()
    if value <= 0:
        raise SurgeryInputError(f"only positive contact surgeries are supported, got {slope}")
    return value


def smooth_coefficient(rep: LegendrianRep, r: SlopeLike) -> Slope:
    """Smooth surgery coefficient tb + r of contact (r)-surgery"""
    slope = as_slope(r)
    if slope == Slope(0, 1):
        raise SurgeryInputError("contact (0)-surgery is excluded")
    if slope.is_infinite:
        raise SurgeryInputError("contact (∞)-surgery is not a surgery")
    return Slope.from_fraction(rep.tb + slope.to_fraction())


def ceiling_reduction(r: SlopeLike) -> int:
    """Least integer n >= r; fillability at r implies fillability at n"""
    return math.ceil(_positive_coefficient(r))


def _push_off_parent(components, stabilizations: int) -> int:
    # An unstabilized push-off of an unstabilized push-off of K is a push-off of K.
    last = len(components) - 1
    previous = components[last]
    if stabilizations == 0 and previous.stabilizations == 0 and previous.parent is not None:
        return previous.parent
    return last


def decompose(rep: LegendrianRep, r: SlopeLike) -> SurgeryDiagram:
    """Decompose contact (r)-surgery, r = p/q > 0, into (±1)-surgeries.

    First k = ceil(q/p) contact (+1)-surgeries on push-offs of the original.
    If q = k*p this is r = 1/k and we are done. Otherwise the residue is
    contact (r')-surgery with r' = p/(q - k*p) < 0 on a further push-off,
    realized by contact (-1)-surgeries on a chain L_1, L_2, ... where L_1 is a
    push-off stabilized |a_1 + 2| times and L_i is a push-off of L_{i-1}
    stabilized |a_i + 2| times, for r' - 1 = a_1 - 1/(a_2 - ...), a_i <= -2.

    Unstabilized push-offs hang from the knot they run parallel to: for
    integer r = n, components 2..n-1 are push-offs of component 1.
    """
    value = _positive_coefficient(r)
    p, q = value.numerator, value.denominator
    plus_block = max(1, -(-q // p))

    components = [SurgeryComponent(contact_sign=1, tb=rep.tb, rot=rep.rot)]
    for _ in range(1, plus_block):
        components.append(SurgeryComponent(
            contact_sign=1, tb=rep.tb, rot=rep.rot, parent=_push_off_parent(components, 0),
        ))

    residual_den = q - plus_block * p
    if residual_den != 0:
        residual = Fraction(p, residual_den)
        terms = negative_continued_fraction(residual - 1)
        tb, rot = rep.tb, rep.rot
        for a in terms:
            stabilizations = abs(a + 2)
            tb -= stabilizations
            rot -= stabilizations
            components.append(SurgeryComponent(
                contact_sign=-1,
                tb=tb,
                rot=rot,
                stabilizations=stabilizations,
                parent=_push_off_parent(components, stabilizations),
            ))
        logger.debug(f"Residual coefficient {residual} expands as {terms}")

    diagram = SurgeryDiagram(
        original=rep, coefficient=Slope.from_fraction(value), components=tuple(components)
    )
    logger.debug(
        f"Decomposed contact ({value})-surgery on {rep.knot_id} into "
        f"{diagram.plus_count} (+1) and {len(components) - diagram.plus_count} (-1) components"
    )
    return diagram


def linking_matrix(diagram: SurgeryDiagram) -> 'Cobordism':
    """Linking matrix of the 2-handle attachment along the decomposed link.

    Diagonal entries are the smooth framings tb_i + sign_i. Component j sits
    downstream of every earlier component i in the push-off chain, and a
    push-off of K (stabilized or not) links K and everything downstream of K
    exactly tb(K) times, so Q_ij = tb of the earlier component. An unstabilized
    push-off has the tb of the knot it is parallel to, so reading it off the
    chain or off its parent gives the same entry.
    """
    from .four_manifold import Cobordism

    comps = diagram.components
    size = len(comps)
    matrix = [[0] * size for _ in range(size)]
    for i, ci in enumerate(comps):
        matrix[i][i] = ci.smooth_framing
        for j in range(i + 1, size):
            matrix[i][j] = matrix[j][i] = ci.tb
    return Cobordism(
        Q=tuple(tuple(row) for row in matrix),
        rot=tuple(c.rot for c in comps),
        plus_count=diagram.plus_count,
    )
