"""
Farey tessellation arithmetic on torus slopes
Exact slopes p/q in Q ∪ {∞}, the edge relation, mediants, parents,
the circular order of the boundary circle and extremal-neighbor queries
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .models import ArcEnd, Direction, Openness, Orientation, SurgeryInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Slope:
    """A slope p/q on a torus: p meridians and q longitudes.

    Stored normalized: gcd(|p|, q) = 1, q >= 0, and ∞ is always 1/0.
    """
    p: int
    q: int = 1

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise SurgeryInputError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'q', q)

    @classmethod
    def parse(cls, text: str) -> 'Slope':
        """Parse '3/2', '-3', 'inf', '∞' or '1/0'"""
        raw = text.strip().replace(' ', '')
        if raw.lower() in ('inf', 'infinity', '∞', '-inf', '-∞'):
            return cls(1, 0)
        try:
            if '/' in raw:
                num, den = raw.split('/', 1)
                return cls(int(num), int(den))
            return cls(int(raw), 1)
        except ValueError:
            raise SurgeryInputError(f"Malformed slope: {text!r}") from None

    @classmethod
    def from_fraction(cls, value: Union[Fraction, int]) -> 'Slope':
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    @property
    def vector(self) -> Tuple[int, int]:
        return self.p, self.q

    def to_fraction(self) -> Fraction:
        if self.is_infinite:
            raise SurgeryInputError("∞ has no rational value")
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


ZERO = Slope(0, 1)
ONE = Slope(1, 1)
INFINITY = Slope(1, 0)

SlopeLike = Union[Slope, Fraction, int, str]


def as_slope(value: SlopeLike) -> Slope:
    """Coerce ints, Fractions and strings to a Slope"""
    if isinstance(value, Slope):
        return value
    if isinstance(value, str):
        return Slope.parse(value)
    return Slope.from_fraction(value)


def _position(s: Slope) -> Fraction:
    # Clockwise position on the boundary circle, in [0, 2): 0 at 0, 1 at ∞.
    if s.is_infinite:
        return Fraction(1)
    x = Fraction(s.p, s.q)
    if x >= 0:
        return x / (1 + x)
    return 2 + x / (1 - x)


def is_edge(a: Slope, b: Slope) -> bool:
    """True iff a and b span Z^2, i.e. are joined by a Farey edge"""
    return abs(a.p * b.q - b.p * a.q) == 1


def has_edge_to_one(r: Slope) -> bool:
    return abs(r.p - r.q) == 1


def _signed_vector(s: Slope, partner: Slope) -> Tuple[int, int]:
    # On the negative half of the disk ∞ is read as -1/0.
    if s.is_infinite and partner.p < 0:
        return -1, 0
    return s.p, s.q


def mediant(a: Slope, b: Slope) -> Slope:
    """The Farey child (p+p')/(q+q') of an edge"""
    if not is_edge(a, b):
        raise SurgeryInputError(f"{a} and {b} are not Farey neighbors")
    if {a, b} == {ZERO, INFINITY}:
        # The root edge has a child on each side; argument order picks the clockwise one.
        return ONE if a == ZERO else Slope(-1, 1)
    pa, qa = _signed_vector(a, b)
    pb, qb = _signed_vector(b, a)
    return Slope(pa + pb, qa + qb)


def continued_fraction(x: Fraction) -> List[int]:
    """Regular continued fraction [a0; a1, ..., an] of a rational"""
    x = Fraction(x)
    terms = []
    num, den = x.numerator, x.denominator
    while den:
        a = num // den
        terms.append(a)
        num, den = den, num - a * den
    return terms


def convergent(terms: List[int]) -> Tuple[int, int]:
    """Evaluate a continued fraction as (h, k); the empty expansion is 1/0"""
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for a in terms:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    return h, k


def negative_continued_fraction(x: Fraction) -> List[int]:
    """Expansion x = a1 - 1/(a2 - 1/(... - 1/an)) with every a_i <= -2.

    Defined for rationals x < -1.
    """
    x = Fraction(x)
    if x >= -1:
        raise SurgeryInputError(f"negative continued fraction needs x < -1, got {x}")
    terms = []
    while True:
        if x.denominator == 1:
            terms.append(int(x))
            return terms
        a = math.floor(x)
        terms.append(a)
        x = -1 / (x - a)


def parents(s: Slope) -> Tuple[Slope, Slope]:
    """The two Farey parents of s, in increasing order along their side of the disk.

    Read off the continued fraction: the previous convergent and the
    expansion with its last term decreased by one.
    """
    if s == ZERO or s == INFINITY:
        raise SurgeryInputError(f"{s} is a root of the tessellation and has no parents")
    sign = -1 if s.p < 0 else 1
    terms = continued_fraction(Fraction(abs(s.p), s.q))
    h1, k1 = convergent(terms[:-1])
    h2, k2 = convergent(terms[:-1] + [terms[-1] - 1])
    first, second = Slope(h1, k1), Slope(h2, k2)
    pair = sorted((first, second), key=_position)
    if sign < 0:
        return Slope(-pair[1].p, pair[1].q), Slope(-pair[0].p, pair[0].q)
    return pair[0], pair[1]


def circular_order(a: Slope, b: Slope, c: Slope) -> Orientation:
    """Orientation of (a, b, c): positive when b is met before c going clockwise from a"""
    if a == b or b == c or a == c:
        return Orientation.DEGENERATE
    origin = _position(a)
    if (_position(b) - origin) % 2 < (_position(c) - origin) % 2:
        return Orientation.POSITIVE
    return Orientation.NEGATIVE


@dataclass(frozen=True)
class CircularArc:
    """An arc of the boundary circle traversed from `from_` to `to`"""
    from_: Slope
    to: Slope
    direction: Direction = Direction.CLOCKWISE
    openness: Openness = Openness.OPEN

    def __post_init__(self):
        if self.from_ == self.to:
            raise SurgeryInputError("arc endpoints must differ")

    def offset(self, s: Slope) -> Fraction:
        """Distance travelled from `from_` to s in the arc's direction"""
        if self.direction == Direction.CLOCKWISE:
            return (_position(s) - _position(self.from_)) % 2
        return (_position(self.from_) - _position(s)) % 2

    def contains(self, s: Slope) -> bool:
        if s == self.from_:
            return self.openness in (Openness.CLOSED, Openness.HALF_OPEN_AT_TO)
        if s == self.to:
            return self.openness in (Openness.CLOSED, Openness.HALF_OPEN_AT_FROM)
        return self.offset(s) < self.offset(self.to)


def _partner(r: Slope) -> Tuple[int, int]:
    # Any vector completing r to a basis of Z^2.
    if r == ZERO:
        return 1, 0
    if r == INFINITY:
        return 0, 1
    return parents(r)[0].vector


def extremal_neighbor(r: Slope, arc: CircularArc, end: ArcEnd) -> Slope:
    """The Farey neighbor of r inside `arc` closest to the requested end.

    The neighbors of r are the slopes of v_k = parent + k*r, k in Z, and
    they run monotonically around the circle with k. The extremal one sits
    next to the parameter value of the arc end, so no search is needed.
    """
    anchor = arc.from_ if end == ArcEnd.NEAREST_TO_FROM else arc.to
    if anchor == r:
        raise SurgeryInputError(f"neighbors of {r} accumulate at {anchor}; no extremal neighbor")

    p, q = r.vector
    a, b = _partner(r)
    u, w = anchor.vector
    k0 = Fraction(u * b - a * w, p * w - q * u)

    candidates = []
    for k in range(math.floor(k0) - 1, math.ceil(k0) + 2):
        s = Slope(a + k * p, b + k * q)
        if arc.contains(s):
            candidates.append(s)
    if not candidates:
        raise SurgeryInputError(f"arc contains no Farey neighbor of {r}")

    if end == ArcEnd.NEAREST_TO_FROM:
        return min(candidates, key=arc.offset)
    return max(candidates, key=arc.offset)


def transverse_arc(r: Slope) -> CircularArc:
    """Slopes clockwise of r and counterclockwise of 0 inside the surgery torus"""
    if r == ZERO:
        raise SurgeryInputError("contact (0)-surgery is excluded")
    return CircularArc(r, ZERO, Direction.CLOCKWISE, Openness.OPEN)


def furthest_clockwise_neighbor(r: Slope) -> Slope:
    """The neighbor of r furthest clockwise of r while counterclockwise of 0"""
    return extremal_neighbor(r, transverse_arc(r), ArcEnd.NEAREST_TO_TO)


def walk_to_one(r: Slope) -> List[Slope]:
    """Farey path from r in (0, 1] to 1, each step jumping to the neighbor closest to 1"""
    value = r.to_fraction() if not r.is_infinite else None
    if value is None or not 0 < value <= 1:
        raise SurgeryInputError(f"walk to 1 needs r in (0, 1], got {r}")
    path = [r]
    current = r
    while current != ONE:
        arc = CircularArc(current, ONE, Direction.CLOCKWISE, Openness.HALF_OPEN_AT_FROM)
        current = extremal_neighbor(current, arc, ArcEnd.NEAREST_TO_TO)
        path.append(current)
    logger.debug(f"Farey walk from {r}: {' -> '.join(str(s) for s in path)}")
    return path
