"""Powell's conjugate-direction minimizer (derivative-free).

Successive line minimizations along a direction set; after each sweep the
direction of largest single decrease may be replaced by the sweep's overall
displacement, subject to the classic quadratic acceptance test. Line
minimization is bracketing (golden-ratio expansion) followed by
golden-section refinement to xtol. No gradients anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...
_EPS = 1e-12


class NonFiniteObjectiveError(ValueError):
    def __init__(self, x: np.ndarray):
        self.x = np.asarray(x, dtype=np.float64)
        super().__init__(f"objective returned a non-finite value at {self.x.tolist()}")


@dataclass(frozen=True)
class PowellResult:
    x: np.ndarray
    fval: float
    iterations: int
    n_evals: int
    trace: List[float]  # best objective after each sweep, non-increasing
    converged: bool  # True when ftol was met before max_iters


def _bracket(f: Callable[[float], float], f0: float, step: float):
    """Expand from t=0 until the objective turns upward; returns (a, b, c).

    Guarantees a < b < c (in search parameter t) with f(b) <= f(a), f(b) <= f(c).
    """
    a, fa = 0.0, f0
    b = step
    fb = f(b)
    if fb > fa:
        a, b = b, a
        fa, fb = fb, fa
    c = b + (b - a) * (1.0 + GOLDEN)
    fc = f(c)
    while fc < fb and abs(c) < 1e8:
        a, fa = b, fb
        b, fb = c, fc
        c = b + (b - a) * (1.0 + GOLDEN)
        fc = f(c)
    if a > c:
        a, c = c, a
        fa, fc = fc, fa
    return a, b, c, fb


def _golden_section(f: Callable[[float], float], a: float, b: float, c: float, fb: float, xtol: float):
    """Golden-section search on [a, c] containing b; returns (t, f(t))."""
    lo, hi = a, c
    best_t, best_f = b, fb
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while (hi - lo) > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
        if f1 < best_f:
            best_t, best_f = x1, f1
        if f2 < best_f:
            best_t, best_f = x2, f2
    return best_t, best_f


def powell_minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    ftol: float = 1e-6,
    xtol: float = 1e-4,
    max_iters: int = 200,
    steps: Optional[Sequence[float]] = None,
) -> PowellResult:
    """Minimize f over n reals starting at x0.

    ``steps`` sets the initial line-search scale per dimension (default 1).
    Terminates when a full sweep's decrease falls below ftol*(|f|+eps), or
    at max_iters.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    n = len(x)
    if n < 1:
        raise ValueError("x0 must have at least one dimension")
    step_scale = np.ones(n) if steps is None else np.asarray(steps, dtype=np.float64)
    evals = 0

    def evaluate(point: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        value = float(f(point))
        if not math.isfinite(value):
            raise NonFiniteObjectiveError(point)
        return value

    fx = evaluate(x)
    directions = [step_scale[i] * np.eye(n)[i] for i in range(n)]
    trace: List[float] = []
    converged = False
    iterations = 0

    def line_minimize(origin: np.ndarray, f_origin: float, direction: np.ndarray):
        def f1d(t: float) -> float:
            return evaluate(origin + t * direction)

        a, b, c, fb = _bracket(f1d, f_origin, 1.0)
        t, ft = _golden_section(f1d, a, b, c, fb, xtol)
        if ft >= f_origin:  # never accept a worse point
            return origin, f_origin
        return origin + t * direction, ft

    for iterations in range(1, max_iters + 1):
        x_start = x.copy()
        f_start = fx
        largest_drop = 0.0
        largest_idx = 0
        for i, direction in enumerate(directions):
            f_before = fx
            x, fx = line_minimize(x, fx, direction)
            drop = f_before - fx
            if drop > largest_drop:
                largest_drop = drop
                largest_idx = i
        decrease = f_start - fx
        trace.append(fx)
        if decrease < ftol * (abs(f_start) + _EPS):
            converged = True
            break

        # Powell's direction-replacement test on the sweep displacement.
        displacement = x - x_start
        if np.any(displacement != 0.0):
            extrapolated = x_start + 2.0 * displacement
            f_extra = evaluate(extrapolated)
            if f_extra < f_start:
                t = (
                    2.0
                    * (f_start - 2.0 * fx + f_extra)
                    * (f_start - fx - largest_drop) ** 2
                    - largest_drop * (f_start - f_extra) ** 2
                )
                if t < 0.0:
                    x, fx = line_minimize(x, fx, displacement)
                    directions[largest_idx] = displacement

    return PowellResult(
        x=x, fval=fx, iterations=iterations, n_evals=evals, trace=trace, converged=converged
    )
