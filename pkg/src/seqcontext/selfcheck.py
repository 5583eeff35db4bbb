"""Cross-checking invariant suite behind the CLI ``verify`` command.

Each check pits an implementation against an independent route to the same
quantity: the channel simulation against the closed-form visibility recursion,
the critical chain against its analytic envelope, the simplex against brute
vertex enumeration. All randomness is seeded so a verify run is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ensembles import (
    Ensemble,
    Preparation,
    all_bit_strings,
    build_ensemble,
    build_preparation,
    check_operational_equivalence,
)
from .operators import build_observables, verify_anticommutation
from .planner import critical_chain
from .sequence import UnsharpSetting, evolve_average, kraus_operator, visibility_chain
from .simplex import solve_lp


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def check_anticommutation(n_max: int = 10, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for n in range(2, n_max + 1):
        report = verify_anticommutation(build_observables(n), tol)
        worst = max(worst, report.max_residual)
        if not report.ok:
            return CheckResult(
                "anticommutation",
                False,
                f"n={n}: residual {report.max_residual:.3e} at pair {report.worst_pair}",
            )
    return CheckResult("anticommutation", True, f"n=2..{n_max}, max residual {worst:.3e}")


def check_povm_completeness(n_max: int = 6, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for n in range(2, n_max + 1):
        obs = build_observables(n)
        eye = np.eye(obs.dim)
        for y in range(1, n + 1):
            for eta in (0.0, 0.3, 0.7637, 1.0):
                total = np.zeros((obs.dim, obs.dim), dtype=complex)
                for b in (0, 1):
                    k = kraus_operator(UnsharpSetting(n=n, y=y, b=b, eta=eta), obs)
                    total += k.conj().T @ k
                worst = max(worst, float(np.max(np.abs(total - eye))))
    ok = worst <= tol
    return CheckResult("povm_completeness", ok, f"max |sum K'K - 1| = {worst:.3e}")


def check_visibility_lemma(seed: int = 20240, draws_per_n: int = 20, tol: float = 1e-9) -> CheckResult:
    """Evolved average states must equal v_k * rho_x(1) + (1 - v_k) * mix."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in range(2, 7):
        obs = build_observables(n)
        mix = np.eye(obs.dim) / obs.dim
        pure = {x: build_preparation(n, x, 1.0, obs).rho for x in all_bit_strings(n)}
        for _ in range(draws_per_n):
            q = float(rng.uniform(0.05, 1.0))
            etas = [float(e) for e in rng.uniform(0.0, 1.0, size=rng.integers(1, n + 1))]
            plan = visibility_chain(n, q, etas)
            for x, rho_pure in pure.items():
                state = build_preparation(n, x, q, obs).rho
                for k in range(len(etas)):
                    expected = plan.visibilities[k] * rho_pure + (1.0 - plan.visibilities[k]) * mix
                    worst = max(worst, float(np.max(np.abs(state - expected))))
                    if k + 1 < len(etas):
                        state = evolve_average(state, etas[k], n, obs)
    ok = worst <= tol
    return CheckResult("visibility_lemma", ok, f"max |simulated - closed form| = {worst:.3e}")


def check_sandwich(n_max: int = 12, margin: float = 1e-12) -> CheckResult:
    """Each critical step drops the squared visibility by strictly between
    (n-1)/n^2 and 1/n."""
    for n in range(2, n_max + 1):
        report = critical_chain(n, 1.0)
        lower = (n - 1) / n**2
        upper = 1.0 / n
        for k in range(report.violations):
            drop = report.visibilities[k] ** 2 - report.visibilities[k + 1] ** 2
            if not (lower + margin < drop < upper - margin):
                return CheckResult(
                    "visibility_sandwich",
                    False,
                    f"n={n}, step {k + 1}: drop {drop:.6e} outside ({lower:.6e}, {upper:.6e})",
                )
    return CheckResult("visibility_sandwich", True, f"strict for all steps, n=2..{n_max}")


def check_equivalence_preserved(tol: float = 1e-10) -> CheckResult:
    """Averaged channels are unital, so parity equivalences must survive evolution."""
    worst = 0.0
    for n, q, eta in [(2, 1.0, 0.9), (3, 1.0, 0.6441), (3, 0.4, 1.0), (4, 0.8, 0.5)]:
        ensemble = build_ensemble(n, q)
        obs = build_observables(n)
        evolved = Ensemble(
            n=n,
            q=q,
            preparations=tuple(
                Preparation(x=p.x, rho=evolve_average(p.rho, eta, n, obs)) for p in ensemble.preparations
            ),
            mix=ensemble.mix,
        )
        report = check_operational_equivalence(evolved, tol)
        worst = max(worst, report.residual)
        if not report.passed:
            return CheckResult(
                "equivalence_preserved",
                False,
                f"n={n}, q={q}, eta={eta}: residual {report.residual:.3e} at r={report.worst_r}",
            )
    return CheckResult("equivalence_preserved", True, f"max residual {worst:.3e}")


def enumerate_vertex_optimum(c, a_eq, b_eq, tol: float = 1e-9):
    """Brute-force LP oracle: scan all basic solutions of A x = b, x >= 0.

    Returns (feasible, best objective). Only sound for bounded feasible
    regions, which the callers arrange.
    """
    c = np.asarray(c, dtype=float)
    a = np.atleast_2d(np.asarray(a_eq, dtype=float))
    b = np.asarray(b_eq, dtype=float).reshape(-1)
    rank = np.linalg.matrix_rank(a)
    best = None
    for cols in combinations(range(c.size), rank):
        sub = a[:, cols]
        if np.linalg.matrix_rank(sub) < rank:
            continue
        xs, *_ = np.linalg.lstsq(sub, b, rcond=None)
        x = np.zeros(c.size)
        x[list(cols)] = xs
        if np.min(xs) < -tol or np.max(np.abs(a @ x - b)) > tol:
            continue
        value = float(c @ x)
        if best is None or value > best:
            best = value
    return best is not None, best


def check_lp_oracle(seed: int = 77, instances: int = 40, tol: float = 1e-9) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(instances):
        nvar = int(rng.integers(3, 7))
        extra = int(rng.integers(0, 3))
        x_feasible = rng.uniform(0.0, 1.0, size=nvar)
        x_feasible[rng.random(nvar) < 0.3] = 0.0
        if x_feasible.sum() == 0.0:
            x_feasible[0] = 1.0
        rows = [np.ones(nvar)] + [rng.normal(size=nvar) for _ in range(extra)]
        a = np.vstack(rows)
        b = a @ x_feasible  # bounded: first row caps the simplex
        c = rng.normal(size=nvar)
        result = solve_lp(c, a, b)
        feasible, best = enumerate_vertex_optimum(c, a, b, tol)
        if result.status != "optimal" or not feasible:
            return CheckResult("lp_vertex_oracle", False, f"instance {i}: status {result.status}")
        gap = abs(result.objective - best)
        worst = max(worst, gap)
        if gap > tol:
            return CheckResult(
                "lp_vertex_oracle", False, f"instance {i}: simplex {result.objective} vs vertices {best}"
            )
    return CheckResult("lp_vertex_oracle", True, f"{instances} instances, max gap {worst:.3e}")


def run_all() -> list[CheckResult]:
    return [
        check_anticommutation(),
        check_povm_completeness(),
        check_visibility_lemma(),
        check_sandwich(),
        check_equivalence_preserved(),
        check_lp_oracle(),
    ]
