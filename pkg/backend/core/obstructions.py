"""
Slice-genus obstruction arithmetic
f(t) = min sum d_i^2 over tuples of non-negative integers with
sum (d_i^2 - d_i) >= 2t, its lower bound, and the resulting threshold
below which contact surgery cannot be fillable
"""
import itertools
import logging
import math
import threading
from fractions import Fraction
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

from .farey import Slope
from .models import SurgeryInputError

if TYPE_CHECKING:
    from ..database.models import KnotFacts

logger = logging.getLogger(__name__)

# _f_table[t] = f(t), _choice[t] = the d realizing it (0 for t = 0).
# Append-only: readers see a prefix, extension happens under the lock.
_f_table: List[int] = [0]
_choice: List[int] = [0]
_table_lock = threading.Lock()


def _check_t(t: int):
    if not isinstance(t, int) or isinstance(t, bool):
        raise SurgeryInputError(f"t must be an integer, got {t!r}")
    if t < 0:
        raise SurgeryInputError(f"f is only defined for t >= 0, got {t}")


def _extend_table(t: int):
    with _table_lock:
        for s in range(len(_f_table), t + 1):
            best, best_d = None, 0
            d = 2
            while True:
                gain = d * (d - 1) // 2
                value = d * d + _f_table[max(0, s - gain)]
                if best is None or value < best:
                    best, best_d = value, d
                if gain >= s:
                    break
                d += 1
            _f_table.append(best)
            _choice.append(best_d)


def f_of_tau(t: int) -> int:
    """Exact minimum of sum d_i^2 subject to sum (d_i^2 - d_i) >= 2t"""
    _check_t(t)
    if t >= len(_f_table):
        _extend_table(t)
    return _f_table[t]


def f_witness(t: int) -> Tuple[int, ...]:
    """An optimal tuple for f(t), largest entries first"""
    f_of_tau(t)
    witness = []
    remaining = t
    while remaining > 0:
        d = _choice[remaining]
        witness.append(d)
        remaining -= d * (d - 1) // 2
    return tuple(sorted(witness, reverse=True))


def f_brute_force(t: int, max_d: int = 6, max_size: int = 8) -> Optional[int]:
    """Exhaustive minimum over multisets of d in [2, max_d] of size <= max_size.

    Returns None when no multiset in range meets the constraint.
    """
    _check_t(t)
    best = 0 if t == 0 else None
    for size in range(1, max_size + 1):
        for combo in itertools.combinations_with_replacement(range(2, max_d + 1), size):
            if sum(d * d - d for d in combo) >= 2 * t:
                value = sum(d * d for d in combo)
                if best is None or value < best:
                    best = value
    return best


def f_lower_bound(t: int) -> int:
    """2t + ceil((sqrt(8t+1) + 1) / 2), from the relaxed problem; a bound on f only for t >= 1"""
    _check_t(t)
    n = 8 * t + 1
    root = math.isqrt(n)
    sqrt_ceil = root if root * root == n else root + 1
    # least m with 2m - 1 >= sqrt(8t+1)
    return 2 * t + (sqrt_ceil + 2) // 2


def slice_genus_bound_check(d: Sequence[int], tau: int, genus: int) -> bool:
    """2 tau + sum |d_i| - sum d_i^2 <= 2 genus"""
    return 2 * tau + sum(abs(x) for x in d) - sum(x * x for x in d) <= 2 * genus


def taubound_threshold(facts: 'KnotFacts', tb: int) -> Optional[Slope]:
    """f(tau) - tb - 1; contact (r)-surgery is not fillable for r at or below it"""
    if facts.tau is None or facts.tau < 0:
        return None
    threshold = f_of_tau(facts.tau) - tb - 1
    logger.debug(f"tau={facts.tau} tb={tb}: f={f_of_tau(facts.tau)} threshold={threshold}")
    return Slope.from_fraction(Fraction(threshold))
