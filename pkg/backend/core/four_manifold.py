"""
Algebraic invariants of surgery cobordisms
Signature, Euler characteristic, |det|, c^2 and the d3 invariant of the
resulting contact structure, in exact rational arithmetic
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .farey import SlopeLike
from .models import RecordValidationError, SurgeryInputError
from .surgery_calculus import LegendrianRep, decompose, linking_matrix

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]

# d3 of the tight structures on M_1 (small Seifert fibered, smooth 4-surgery on T(2,3))
FILLABLE_BASE_D3 = Fraction(0)
NONFILLABLE_BASE_D3 = Fraction(-1, 4)


@dataclass(frozen=True)
class Cobordism:
    """2-handle cobordism from S^3: linking matrix, rotation numbers, (+1)-count"""
    Q: Matrix = ()
    rot: Tuple[int, ...] = ()
    plus_count: int = 0

    def __post_init__(self):
        size = len(self.Q)
        if any(len(row) != size for row in self.Q):
            raise SurgeryInputError("linking matrix must be square")
        if any(self.Q[i][j] != self.Q[j][i] for i in range(size) for j in range(i)):
            raise SurgeryInputError("linking matrix must be symmetric")
        if len(self.rot) != size:
            raise SurgeryInputError(
                f"rotation vector has {len(self.rot)} entries for {size} handles"
            )
        if self.plus_count < 0:
            raise SurgeryInputError("plus count cannot be negative")

    @property
    def chi(self) -> int:
        return len(self.Q)


@dataclass(frozen=True)
class D3Result:
    """d3 together with the sub-invariants it was computed from"""
    value: Fraction
    c_squared: Fraction
    sigma: int
    chi: int
    h1_order: int
    plus_count: int = 1

    @property
    def extended_convention(self) -> bool:
        # Only plus_count = 1 is the literal "+1" formula.
        return self.plus_count != 1


def _domain_matrix(Q: Sequence[Sequence[int]]) -> DomainMatrix:
    size = len(Q)
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in Q], (size, size), ZZ)


def h1_order(Q: Sequence[Sequence[int]]) -> int:
    """|det Q| by fraction-free (Bareiss) elimination; 0 means b1 > 0"""
    if len(Q) == 0:
        return 1
    return abs(int(_domain_matrix(Q).det()))


def _swap(A: List[List[Fraction]], i: int, j: int):
    if i == j:
        return
    A[i], A[j] = A[j], A[i]
    for row in A:
        row[i], row[j] = row[j], row[i]


def signature(Q: Sequence[Sequence[int]]) -> int:
    """Signature by congruence diagonalization over Q with symmetric pivoting.

    A nonzero diagonal pivot splits off a 1x1 block; when the remaining
    diagonal vanishes a hyperbolic block [[0, b], [b, 0]] is split off and
    contributes +1 and -1.
    """
    A = [[Fraction(x) for x in row] for row in Q]
    n = len(A)
    positive = negative = 0
    k = 0
    while k < n:
        pivot = next((i for i in range(k, n) if A[i][i] != 0), None)
        if pivot is not None:
            _swap(A, k, pivot)
            d = A[k][k]
            if d > 0:
                positive += 1
            else:
                negative += 1
            column = [A[i][k] for i in range(n)]
            for i in range(k + 1, n):
                if column[i] == 0:
                    continue
                for j in range(k + 1, n):
                    A[i][j] -= column[i] * column[j] / d
            k += 1
            continue

        pair = next(
            ((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j] != 0), None
        )
        if pair is None:
            break  # remaining block is zero
        i, j = pair
        _swap(A, k, i)
        _swap(A, k + 1, j)
        b = A[k][k + 1]
        first = [A[r][k] for r in range(n)]
        second = [A[r][k + 1] for r in range(n)]
        for r in range(k + 2, n):
            for s in range(k + 2, n):
                A[r][s] -= (first[r] * second[s] + second[r] * first[s]) / b
        positive += 1
        negative += 1
        k += 2
    return positive - negative


def c_squared(Q: Sequence[Sequence[int]], rot: Sequence[int]) -> Fraction:
    """rot^T Q^{-1} rot, the square of the class evaluating to rot on the co-cores"""
    size = len(Q)
    if len(rot) != size:
        raise SurgeryInputError(f"rotation vector has {len(rot)} entries for {size} handles")
    if size == 0:
        return Fraction(0)
    M = _domain_matrix(Q)
    if M.det() == 0:
        raise SurgeryInputError("boundary is not a rational homology sphere")
    if not any(rot):
        return Fraction(0)
    rhs = DomainMatrix([[QQ(int(v))] for v in rot], (size, 1), QQ)
    solution = M.convert_to(QQ).lu_solve(rhs).to_Matrix()
    x = [Fraction(int(e.p), int(e.q)) for e in solution]
    return sum((xi * ri for xi, ri in zip(x, rot)), Fraction(0))


def d3(cob: Cobordism) -> D3Result:
    """d3 = (c^2 - 3 sigma - 2 chi) / 4 + plus_count"""
    order = h1_order(cob.Q)
    if order == 0:
        raise SurgeryInputError("boundary is not a rational homology sphere")
    c2 = c_squared(cob.Q, cob.rot)
    sigma = signature(cob.Q)
    chi = cob.chi
    value = (c2 - 3 * sigma - 2 * chi) / 4 + cob.plus_count
    result = D3Result(
        value=value, c_squared=c2, sigma=sigma, chi=chi, h1_order=order,
        plus_count=cob.plus_count,
    )
    if result.extended_convention:
        logger.warning(f"d3 computed with {cob.plus_count} (+1)-components (extended convention)")
    logger.debug(f"d3: c^2={c2} sigma={sigma} chi={chi} |H1|={order} -> {value}")
    return result


def d3_delta(cob: Cobordism, d3_initial: Fraction) -> Fraction:
    """d3 after a Stein cobordism: d3_initial + (c^2 - 3 sigma - 2 chi) / 4"""
    if cob.plus_count != 0:
        raise SurgeryInputError("d3 change is only defined across Legendrian-surgery cobordisms")
    d3_initial = Fraction(d3_initial)
    if cob.chi == 0:
        return d3_initial
    c2 = c_squared(cob.Q, cob.rot)
    return d3_initial + (c2 - 3 * signature(cob.Q) - 2 * cob.chi) / 4


def chain_cobordism(framings: Sequence[int], rots: Optional[Sequence[int]] = None) -> Cobordism:
    """Linear plumbing chain: consecutive unknots link once"""
    size = len(framings)
    rots = tuple(rots) if rots is not None else (0,) * size
    matrix = [[0] * size for _ in range(size)]
    for i, framing in enumerate(framings):
        matrix[i][i] = int(framing)
        if i + 1 < size:
            matrix[i][i + 1] = matrix[i + 1][i] = 1
    return Cobordism(Q=tuple(tuple(row) for row in matrix), rot=rots, plus_count=0)


def surgery_d3(rep: LegendrianRep, r: SlopeLike) -> D3Result:
    """Full pipeline: decompose, build the linking matrix, compute d3"""
    return d3(linking_matrix(decompose(rep, r)))


def d3_table(n: int) -> Dict[str, Fraction]:
    """d3 of the tight structures on smooth 4n-surgery on T(2, 2n+1).

    eta/theta come from the fillable/non-fillable structures on M_1 pushed
    along the chain W_n of n-1 (-2)-framed unknots; xi_n is the structure
    from contact (2n+1)-surgery on the max-tb representative.
    """
    if n < 1:
        raise SurgeryInputError("n must be at least 1")
    chain = chain_cobordism([-2] * (n - 1))
    eta = d3_delta(chain, FILLABLE_BASE_D3)
    theta = d3_delta(chain, NONFILLABLE_BASE_D3)
    xi = surgery_d3(LegendrianRep(f"T(2,{2 * n + 1})", 2 * n - 1, 0), 2 * n + 1).value
    return {
        'xi_n': xi,
        'eta_1': eta,
        'eta_2': eta,
        'theta_1': theta,
        'theta_2': theta,
    }


def matching_structures(n: int) -> List[str]:
    """Names of the tight structures whose d3 equals d3(xi_n)"""
    table = d3_table(n)
    target = table.pop('xi_n')
    return [name for name, value in table.items() if value == target]


def parse_diagram(text: str) -> Cobordism:
    """Read a diagram record: dimension m, m matrix rows, rotation vector, plus-count"""
    tokens = text.split()
    errors = []
    try:
        values = [int(tok) for tok in tokens]
    except ValueError:
        bad = next(tok for tok in tokens if not tok.lstrip('-+').isdigit())
        raise RecordValidationError("Malformed diagram", [f"non-integer token {bad!r}"]) from None
    if not values:
        raise RecordValidationError("Malformed diagram", ["file is empty"])
    size = values[0]
    expected = 1 + size * size + size + 1
    if size < 0:
        errors.append(f"negative dimension {size}")
    elif len(values) != expected:
        errors.append(f"expected {expected} integers for dimension {size}, found {len(values)}")
    if errors:
        raise RecordValidationError("Malformed diagram", errors)
    body = values[1:]
    rows = tuple(tuple(body[i * size:(i + 1) * size]) for i in range(size))
    rot = tuple(body[size * size:size * size + size])
    plus_count = body[-1]
    return Cobordism(Q=rows, rot=rot, plus_count=plus_count)


def read_diagram(path: Path) -> Cobordism:
    path = Path(path)
    if not path.exists():
        raise RecordValidationError(f"Diagram file not found: {path}")
    cob = parse_diagram(path.read_text(encoding='utf-8'))
    logger.info(f"Loaded {cob.chi}-handle diagram from {path}")
    return cob
