"""Map recorded marginal tables onto exact parity equivalences with a linear program.

Recorded tables never satisfy the parity indistinguishability constraints
exactly. Every convex remix of the recorded preparations is operationally
realizable, so we search row-stochastic weights w[x, x'] whose remixed table
satisfies all parity constraints exactly while keeping the witness as large as
possible. The diagonal weight mass F measures how little remixing was needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import parity_strings
from .sequence import MarginalTable, witness
from .simplex import solve_lp

PRIMARY_OBJECTIVE_SLACK = 1e-9
PARITY_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class OutcomeTable:
    """Probabilities of outcome 0, p(b=0 | x, y), one row per x, one column per y."""

    n: int
    p0: np.ndarray

    def __post_init__(self):
        p0 = np.asarray(self.p0, dtype=float)
        if p0.shape != (2**self.n, self.n):
            raise ValueError(f"p0 must have shape ({2**self.n}, {self.n}), got {p0.shape}")
        if not np.all(np.isfinite(p0)) or p0.min() < -1e-12 or p0.max() > 1.0 + 1e-12:
            raise ValueError("outcome probabilities must lie in [0, 1]")
        object.__setattr__(self, "p0", p0)


@dataclass(frozen=True)
class WeightMatrix:
    """Row-stochastic remixing weights omega[x, x']."""

    n: int
    omega: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        size = 2**self.n
        if omega.shape != (size, size):
            raise ValueError(f"omega must have shape ({size}, {size}), got {omega.shape}")
        if omega.min() < -1e-12:
            raise ValueError("omega must be entrywise nonnegative")
        if np.max(np.abs(omega.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("omega rows must sum to 1 within 1e-9")
        object.__setattr__(self, "omega", omega)


def closeness(weights: WeightMatrix) -> float:
    """Diagonal weight mass F = sum_x omega[x, x], in [0, 2^n]."""
    return float(np.trace(weights.omega))


def normalized_closeness(weights: WeightMatrix) -> float:
    """F divided by 2^n, so the identity remix scores 1."""
    return closeness(weights) / 2**weights.n


def _winning_signs(n: int) -> np.ndarray:
    """sign[x, y] = +1 when bit y of x is 0 (winning outcome is 0), else -1."""
    size = 2**n
    signs = np.empty((size, n))
    for ix in range(size):
        for y in range(n):
            signs[ix, y] = -1.0 if (ix >> (n - 1 - y)) & 1 else 1.0
    return signs


def winning_to_outcome(table: MarginalTable) -> OutcomeTable:
    """Convert winning probabilities to outcome-0 probabilities (involutive)."""
    signs = _winning_signs(table.n)
    p0 = np.where(signs > 0, table.win, 1.0 - table.win)
    return OutcomeTable(n=table.n, p0=p0)


def outcome_to_winning(table: OutcomeTable) -> np.ndarray:
    """Winning-probability array for an outcome table (inverse of winning_to_outcome)."""
    signs = _winning_signs(table.n)
    return np.where(signs > 0, table.p0, 1.0 - table.p0)


def _parity_sign_matrix(n: int) -> np.ndarray:
    """rows: parity strings r with |r| >= 2; entry (r, x) = (-1)^(r.x)."""
    rs = parity_strings(n)
    size = 2**n
    signs = np.empty((len(rs), size))
    for ir, r in enumerate(rs):
        r_int = int(r, 2)
        for ix in range(size):
            signs[ir, ix] = -1.0 if bin(ix & r_int).count("1") % 2 else 1.0
    return signs


def parity_residual(p0: np.ndarray, n: int) -> float:
    """Largest parity-constraint violation max_{r,y} |sum_x (-1)^(r.x) p0[x, y]|."""
    signs = _parity_sign_matrix(n)
    return float(np.max(np.abs(signs @ p0))) if signs.size else 0.0


@dataclass(frozen=True)
class LPResult:
    status: str
    a_pre: float
    a_post: float | None
    omega: WeightMatrix | None
    closeness_raw: float | None
    closeness_normalized: float | None
    post_table: OutcomeTable | None
    max_parity_residual: float | None

    def to_json_dict(self) -> dict:
        return {
            "a_pre": self.a_pre,
            "a_post": self.a_post,
            "F_raw": self.closeness_raw,
            "F_normalized": self.closeness_normalized,
            "status": self.status,
            "residuals": {"max_parity": self.max_parity_residual},
            "omega": None if self.omega is None else [[float(v) for v in row] for row in self.omega.omega],
        }


def _build_program(p0: np.ndarray, n: int):
    """Assemble the equality system and witness objective over flattened w[x, x']."""
    size = 2**n
    nvar = size * size
    parity_signs = _parity_sign_matrix(n)
    n_parity = parity_signs.shape[0]

    rows = np.zeros((size + n_parity * n, nvar))
    rhs = np.zeros(size + n_parity * n)
    for x in range(size):
        rows[x, x * size : (x + 1) * size] = 1.0
        rhs[x] = 1.0
    row = size
    for ir in range(n_parity):
        for y in range(n):
            for x in range(size):
                rows[row, x * size : (x + 1) * size] = parity_signs[ir, x] * p0[:, y]
            row += 1

    win_signs = _winning_signs(n)
    coeff_per_source = p0 @ win_signs.T / (n * size)  # [x', x]
    c = coeff_per_source.T.reshape(-1)
    return c, rows, rhs


def enforce_equivalences(table: MarginalTable, tie_break_closeness: bool = True) -> LPResult:
    """Maximize the witness over remixed tables that satisfy every parity constraint.

    The uniform remix is always feasible, so valid input cannot come back
    infeasible. With ``tie_break_closeness`` a second solve maximizes F among
    weight matrices whose witness is within 1e-9 of the optimum, making the
    reported omega deterministic and minimally distorting.
    """
    n = table.n
    size = 2**n
    p0 = winning_to_outcome(table).p0
    a_pre = witness(table)

    c_primary, rows, rhs = _build_program(p0, n)
    first = solve_lp(c_primary, rows, rhs)
    if first.status != "optimal":
        return LPResult(
            status=first.status,
            a_pre=a_pre,
            a_post=None,
            omega=None,
            closeness_raw=None,
            closeness_normalized=None,
            post_table=None,
            max_parity_residual=None,
        )

    solution = first.x
    if tie_break_closeness:
        # max F subject to the original system plus c_primary.w >= optimum - slack.
        nvar = c_primary.size
        rows2 = np.zeros((rows.shape[0] + 1, nvar + 1))
        rows2[:-1, :nvar] = rows
        rows2[-1, :nvar] = c_primary
        rows2[-1, -1] = -1.0
        rhs2 = np.concatenate([rhs, [first.objective - PRIMARY_OBJECTIVE_SLACK]])
        c_secondary = np.zeros(nvar + 1)
        c_secondary[: nvar : size + 1] = 1.0  # diagonal entries of w
        second = solve_lp(c_secondary, rows2, rhs2)
        if second.status == "optimal":
            solution = second.x[:nvar]

    omega = WeightMatrix(n=n, omega=solution.reshape(size, size))
    p0_post = omega.omega @ p0
    post = OutcomeTable(n=n, p0=np.clip(p0_post, 0.0, 1.0))
    a_post = float(np.mean(outcome_to_winning(post)))
    residual = parity_residual(p0_post, n)
    if residual > PARITY_RESIDUAL_TOL:
        raise RuntimeError(f"parity residual {residual:.3e} exceeds {PARITY_RESIDUAL_TOL} on an optimal solve")
    return LPResult(
        status="optimal",
        a_pre=a_pre,
        a_post=a_post,
        omega=omega,
        closeness_raw=closeness(omega),
        closeness_normalized=normalized_closeness(omega),
        post_table=post,
        max_parity_residual=residual,
    )
