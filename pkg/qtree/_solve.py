import logging
from typing import Callable, Tuple

from ._constants import BISECTION_MAX_ITER, BISECTION_TOL
from .errors import InvalidParameterError

logger = logging.getLogger(__name__)


def bisect_increasing(
    func: Callable[[float], float],
    target: float,
    lb: float = 0.0,
    ub: float = 1.0,
    tol: float = BISECTION_TOL,
    max_iter: int = BISECTION_MAX_ITER,
) -> Tuple[float, int]:
    """Find x in [lb, ub] with func(x) == target for a nondecreasing func.

    Returns the midpoint of the final bracket and the number of halvings.
    """
    flo, fhi = func(lb) - target, func(ub) - target
    if flo > 0 or fhi < 0:
        raise InvalidParameterError(
            f"target {target} not bracketed on [{lb}, {ub}] (f-target: {flo:.3g}, {fhi:.3g})"
        )
    iterations = 0
    while ub - lb > tol and iterations < max_iter:
        mid = 0.5 * (lb + ub)
        if func(mid) < target:
            lb = mid
        else:
            ub = mid
        iterations += 1
        logger.debug("iter %d: bracket [%.12f, %.12f]", iterations, lb, ub)
    return 0.5 * (lb + ub), iterations
