"""Observer-chain planning: critical sharpness chains, capacity counts, dimension search.

A "critical" chain lets every observer tune their sharpness to exactly saturate
the noncontextual bound given the visibility they inherit: eta_k = 1/(v_k sqrt(n)).
Strict violation needs an infinitesimally larger eta, so the counts reported
here are the number of observers who can saturate; any epsilon-increase of the
last sharpness turns all of them into strict violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sequence import quality_factor


@dataclass(frozen=True)
class ChainReport:
    """Greedy critical chain for n settings at ensemble visibility q.

    ``visibilities`` has one more entry than ``critical_etas``: it ends with
    the visibility available to the first observer who can no longer saturate,
    and ``next_required_eta`` is the (>1) sharpness that observer would need.
    ``final_visibility`` aliases the last entry of ``visibilities``.
    """

    n: int
    q: float
    critical_etas: tuple[float, ...]
    visibilities: tuple[float, ...]
    violations: int
    next_required_eta: float
    final_visibility: float


def critical_chain(n: int, q: float) -> ChainReport:
    """Run the saturation recursion until the required sharpness exceeds 1."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"visibility q must lie in [0, 1], got {q}")

    sqrt_n = math.sqrt(n)
    v = float(q)
    etas: list[float] = []
    visibilities = [v]
    # The loop always terminates: every saturating eta is >= 1/sqrt(n), which
    # bounds the quality factor away from 1, so visibilities decay geometrically.
    for _ in range(10 * n + 100):
        required = 1.0 / (v * sqrt_n) if v > 0 else math.inf
        if required > 1.0:
            return ChainReport(
                n=n,
                q=float(q),
                critical_etas=tuple(etas),
                visibilities=tuple(visibilities),
                violations=len(etas),
                next_required_eta=required,
                final_visibility=v,
            )
        etas.append(required)
        v *= quality_factor(n, required)
        visibilities.append(v)
    raise RuntimeError(f"critical chain for n={n}, q={q} failed to terminate")


def max_shared_observers(n: int, q: float) -> int:
    """Number of observers the critical chain can serve."""
    return critical_chain(n, q).violations


@dataclass(frozen=True)
class DimensionPlan:
    """Smallest parameter n serving m observers at visibility q.

    Two closed-form lower bounds are reported alongside the exact search
    result: ``bound_from_q`` = ceil(m/q) and ``bound_from_q_squared`` =
    ceil(m/q^2). They disagree in general; the recursion matches the squared
    form (each saturating step lowers the squared visibility by less than 1/n,
    starting from v_1^2 = q^2), so ``bound_from_q`` can be unachievable and is
    flagged via ``bound_from_q_sufficient``.
    """

    m: int
    q: float
    n: int
    bound_from_q: int
    bound_from_q_sufficient: bool
    bound_from_q_squared: int


def min_dimension_parameter(m: int, q: float) -> DimensionPlan:
    """Search the smallest n >= 2 with at least m critical-chain observers."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"visibility q must lie in (0, 1], got {q}")

    bound_linear = math.ceil(m / q)
    bound_squared = math.ceil(m / (q * q))
    # n = ceil(m/q^2) always suffices, so the search is bounded.
    cap = max(2, bound_squared) + 1
    n_found = None
    for n in range(2, cap + 1):
        if max_shared_observers(n, q) >= m:
            n_found = n
            break
    if n_found is None:
        raise RuntimeError(f"no n up to {cap} serves m={m} at q={q}; recursion bound violated")
    achievable = max(2, bound_linear) >= n_found
    return DimensionPlan(
        m=m,
        q=float(q),
        n=n_found,
        bound_from_q=bound_linear,
        bound_from_q_sufficient=achievable,
        bound_from_q_squared=bound_squared,
    )


def anonymous_chain_length(n: int, theta: float) -> float:
    """Real-valued chain length when every observer uses the same sharpness sin(theta).

    Valid for sin(theta) in [1/sqrt(n), 1): returns exactly 1.0 at the lower
    edge and raises below it (a single observer already fails to saturate).
    The integer number of saturating observers is floor of the result.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < theta < math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2), got {theta}")
    s = math.sin(theta)
    critical = 1.0 / math.sqrt(n)
    if s < critical - 1e-12:
        raise ValueError(f"sin(theta) = {s} is below the single-observer threshold {critical}")
    numerator = math.log(s) + 0.5 * math.log(n)
    if numerator <= 0.0:
        return 1.0
    denominator = math.log(1.0 + (n - 1) * math.cos(theta)) - math.log(n)
    return 1.0 - numerator / denominator


@dataclass(frozen=True)
class AnonymousOptimum:
    n: int
    theta_star: float
    k_star: float


def _golden_maximize(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    mid = 0.5 * (a + b)
    return mid, f(mid)


def anonymous_optimum(n: int, grid_points: int = 512, tol: float = 1e-10) -> AnonymousOptimum:
    """Maximize the anonymous chain length over the shared angle theta.

    Deterministic: a coarse grid scan brackets the maximum, then golden-section
    refines it to ``tol`` in theta.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    lo = math.asin(1.0 / math.sqrt(n)) + 1e-9
    hi = math.pi / 2 - 1e-9

    def f(theta: float) -> float:
        return anonymous_chain_length(n, theta)

    xs = [lo + (hi - lo) * i / (grid_points - 1) for i in range(grid_points)]
    best = max(range(grid_points), key=lambda i: f(xs[i]))
    bracket_lo = xs[max(best - 1, 0)]
    bracket_hi = xs[min(best + 1, grid_points - 1)]
    theta_star, k_star = _golden_maximize(f, bracket_lo, bracket_hi, tol)
    return AnonymousOptimum(n=n, theta_star=theta_star, k_star=k_star)
