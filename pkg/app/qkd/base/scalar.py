import math
from typing import Callable, NamedTuple, Tuple

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class GridSearch(NamedTuple):
    """Outcome of a grid scan followed by golden-section refinement.

    ``grid`` and ``values`` keep the scan for auditing.
    """

    x: float
    value: float
    grid: np.ndarray
    values: np.ndarray


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-5) -> Tuple[float, float]:
    """Golden-section search for a minimum of ``f`` on [a, b].

    Args:
        f: Objective, assumed to have a single local minimum on the interval.
        a: One end of the interval.
        b: Other end of the interval.
        tol: Width of the returned interval.

    Returns:
        An interval (c, d) with d - c <= tol containing the minimum.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b

    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(steps - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
    if yc < yd:
        return a, d
    return c, b


def grid_then_refine(
    f: Callable[[float], float],
    low: float,
    high: float,
    points: int,
    tol: float,
    maximize: bool = False,
) -> GridSearch:
    """Scans ``f`` on a uniform grid, then refines around the best sample.

    The objective need not be unimodal on [low, high]; only the bracket
    between the neighbours of the best grid sample is refined. The result
    is never worse than the best grid sample.

    Args:
        f: Objective.
        low: Left end of the search interval.
        high: Right end of the search interval.
        points: Number of grid points (at least 2 unless low == high).
        tol: Final bracket width of the refinement.
        maximize: Search for a maximum instead of a minimum.

    Returns:
        The best point, its value and the scan.
    """
    sign = -1.0 if maximize else 1.0
    if high <= low:
        value = f(low)
        return GridSearch(low, value, np.array([low]), np.array([value]))
    grid = np.linspace(low, high, points)
    values = np.array([f(float(x)) for x in grid])
    best = int(np.argmin(sign * values))
    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, len(grid) - 1)])
    c, d = golden_section(lambda x: sign * f(x), left, right, tol)
    x = 0.5 * (c + d)
    value = f(x)
    if sign * value > sign * values[best]:
        x, value = float(grid[best]), float(values[best])
    return GridSearch(x, value, grid, values)
