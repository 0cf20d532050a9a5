"""Special functions, tail quadrature, and seedable sampling primitives.

Everything here is deliberately small: the rest of the package needs the
exponential integral E1, integrals of exponentially decaying densities over
``[lower, inf)``, and reproducible exponential draws. Nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

EULER_GAMMA = 0.5772156649015328606

# Below the switch the alternating power series converges in < 25 terms with
# no cancellation worth worrying about; above it the continued fraction does.
# x = 1 keeps both branches comfortably inside double precision.
E1_SERIES_CF_SWITCH = 1.0

_MAX_SERIES_TERMS = 80
_MAX_CF_ITERATIONS = 400


class ConvergenceError(ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    Carries the number of subdivisions performed and the last combined
    error estimate so callers can report or loosen the request.
    """

    def __init__(self, message: str, subdivisions: int, error_estimate: float):
        super().__init__(message)
        self.subdivisions = subdivisions
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and the subdivision budget for adaptive integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 400

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) = integral of exp(-t)/t over [x, inf).

    Uses the power series -gamma - ln(x) - sum_k (-x)^k / (k*k!) for
    x <= 1 and a modified-Lentz evaluation of the standard continued
    fraction e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))) for x > 1.
    Relative error is a few ulps on either branch, far inside the 1e-12
    budget the analytical power formulas need.
    """
    if x <= 0.0:
        raise ValueError(f"exp_integral_e1 requires x > 0, got {x!r}")
    if x <= E1_SERIES_CF_SWITCH:
        total = -EULER_GAMMA - math.log(x)
        term = 1.0
        for k in range(1, _MAX_SERIES_TERMS + 1):
            term *= -x / k
            delta = term / k
            total -= delta
            if abs(delta) < 1e-18 * abs(total):
                return total
        raise ConvergenceError(
            f"E1 series did not converge at x={x!r}", _MAX_SERIES_TERMS, abs(delta)
        )
    b = x + 1.0
    c = 1e308
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_CF_ITERATIONS + 1):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError(
        f"E1 continued fraction did not converge at x={x!r}",
        _MAX_CF_ITERATIONS,
        abs(delta - 1.0),
    )


# Gauss-Kronrod 7-15 pair: (node, Gauss weight, Kronrod weight). The seven
# Gauss nodes come first, then the eight Kronrod-only nodes (Gauss weight 0).
_GK15 = (
    (+0.949107912342759, 0.129484966168870, 0.063092092629979),
    (-0.949107912342759, 0.129484966168870, 0.063092092629979),
    (+0.741531185599394, 0.279705391489277, 0.140653259715525),
    (-0.741531185599394, 0.279705391489277, 0.140653259715525),
    (+0.405845151377397, 0.381830050505119, 0.190350578064785),
    (-0.405845151377397, 0.381830050505119, 0.190350578064785),
    (0.000000000000000, 0.417959183673469, 0.209482141084728),
    (+0.991455371120813, 0.0, 0.022935322010529),
    (-0.991455371120813, 0.0, 0.022935322010529),
    (+0.864864423359769, 0.0, 0.104790010322250),
    (-0.864864423359769, 0.0, 0.104790010322250),
    (+0.586087235467691, 0.0, 0.169004726639267),
    (-0.586087235467691, 0.0, 0.169004726639267),
    (+0.207784955007898, 0.0, 0.204432940075298),
    (-0.207784955007898, 0.0, 0.204432940075298),
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod panel on [a, b]: (integral, error estimate)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    gauss = 0.0
    kronrod = 0.0
    for node, wg, wk in _GK15:
        fx = f(mid + half * node)
        gauss += wg * fx
        kronrod += wk * fx
    err = half * (200.0 * abs(gauss - kronrod)) ** 1.5
    return kronrod * half, err


def integrate_tail(
    f: Callable[[float], float], lower: float, spec: QuadratureSpec | None = None
) -> float:
    """Integrate ``f`` over ``[lower, inf)`` for exponentially decaying ``f``.

    The half line is folded onto [0, 1) with x = lower + t/(1-t); the
    Jacobian 1/(1-t)^2 cannot outrun an exponential tail, so the mapped
    integrand is smooth and the Kronrod nodes (all interior) never touch
    the singular endpoint. Panels are bisected worst-error-first until the
    combined estimate meets ``spec``.
    """
    if lower < 0.0:
        raise ValueError(f"integrate_tail requires lower >= 0, got {lower!r}")
    if spec is None:
        spec = QuadratureSpec()

    def mapped(t: float) -> float:
        w = 1.0 - t
        return f(lower + t / w) / (w * w)

    panels = [(*_gk15(mapped, 0.0, 1.0),) + (0.0, 1.0)]
    subdivisions = 0
    while True:
        total = math.fsum(p[0] for p in panels)
        err = math.fsum(p[1] for p in panels)
        if err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total
        if subdivisions >= spec.max_subdivisions:
            raise ConvergenceError(
                f"tail integral from {lower!r} stalled at error {err:.3e} "
                f"after {subdivisions} subdivisions",
                subdivisions,
                err,
            )
        worst = max(range(len(panels)), key=lambda i: panels[i][1])
        _, _, a, b = panels[worst]
        mid = 0.5 * (a + b)
        panels[worst] = (*_gk15(mapped, a, mid),) + (a, mid)
        panels.append((*_gk15(mapped, mid, b),) + (mid, b))
        subdivisions += 1


def sample_exponential(mean: float, rng: np.random.Generator, size=None):
    """Draw from an exponential distribution with the given mean.

    Inverse-transform sampling, -mean * log1p(-U), from the generator's
    uniform double stream: a fixed seed fixes every draw, and the compiled
    and pure-python Monte Carlo kernels share this exact transform.
    Returns a float for ``size=None``, otherwise an ndarray.
    """
    if not mean > 0.0:
        raise ValueError(f"exponential mean must be positive, got {mean!r}")
    return mean * rng.standard_exponential(size=size, method="inv")


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Counter-based Philox generator for the given root seed.

    ``stream`` selects an independent substream via a SeedSequence spawn
    key; batches of a parallel run each take their own stream so serial
    and parallel executions consume identical draws.
    """
    if stream is None:
        seq = np.random.SeedSequence(seed)
    else:
        seq = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(seq))
