"""Sequential unsharp-measurement simulation: channels, marginals, witnesses.

A measurement of sharpness eta on setting y is the two-outcome instrument with
POVM elements (1 + (-1)^b eta G_y)/2 and Hermitian Kraus operators that
interpolate between the two projectors of G_y. Observers are independent, so
each one sees the uniform average of the previous observer's post-measurement
states; that average is what ``evolve_average`` computes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ensembles import all_bit_strings, build_preparation
from .operators import ObservableSet, build_observables, identity, is_density_matrix

PROVENANCES = ("simulated", "sampled", "recorded")


@dataclass(frozen=True)
class UnsharpSetting:
    """One measurement choice: setting y in 1..n, outcome bit b, sharpness eta."""

    n: int
    y: int
    b: int
    eta: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 1 <= self.y <= self.n:
            raise ValueError(f"setting index y must be in 1..{self.n}, got {self.y}")
        if self.b not in (0, 1):
            raise ValueError(f"outcome b must be 0 or 1, got {self.b}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"sharpness eta must lie in [0, 1], got {self.eta}")


def theta_to_eta(theta: float) -> float:
    """Convert an angle parameter to sharpness, eta = sin(theta)."""
    eta = math.sin(theta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"sin(theta) = {eta} falls outside [0, 1]")
    return eta


def _observables_for(setting_n: int, observables: ObservableSet | None) -> ObservableSet:
    if observables is None:
        return build_observables(setting_n)
    if observables.n != setting_n:
        raise ValueError(f"observable set is for n={observables.n}, setting has n={setting_n}")
    return observables


def projector(setting: UnsharpSetting, observables: ObservableSet | None = None) -> np.ndarray:
    """Sharp projector (1 + (-1)^b G_y) / 2 onto the outcome-b eigenspace."""
    obs = _observables_for(setting.n, observables)
    sign = -1.0 if setting.b else 1.0
    return (identity(obs.dim) + sign * obs.observable(setting.y)) / 2.0


def povm_element(setting: UnsharpSetting, observables: ObservableSet | None = None) -> np.ndarray:
    """Unsharp POVM element (1 + (-1)^b eta G_y) / 2."""
    obs = _observables_for(setting.n, observables)
    sign = -1.0 if setting.b else 1.0
    return (identity(obs.dim) + sign * setting.eta * obs.observable(setting.y)) / 2.0


def kraus_operator(setting: UnsharpSetting, observables: ObservableSet | None = None) -> np.ndarray:
    """Hermitian Kraus operator sqrt((1+eta)/2) P_b + sqrt((1-eta)/2) P_(1-b)."""
    obs = _observables_for(setting.n, observables)
    keep = projector(setting, obs)
    flip = identity(obs.dim) - keep
    return math.sqrt((1.0 + setting.eta) / 2.0) * keep + math.sqrt((1.0 - setting.eta) / 2.0) * flip


def evolve_average(state: np.ndarray, eta: float, n: int, observables: ObservableSet | None = None) -> np.ndarray:
    """Average post-measurement state over a uniform setting choice and both outcomes.

    Input must be a density matrix; the channel is trace preserving and unital.
    """
    obs = _observables_for(n, observables)
    if not is_density_matrix(state, tol=1e-8):
        raise ValueError("evolve_average requires a density matrix input")
    out = np.zeros_like(np.asarray(state, dtype=complex))
    for y in range(1, n + 1):
        for b in (0, 1):
            k = kraus_operator(UnsharpSetting(n=n, y=y, b=b, eta=eta), obs)
            out += k @ state @ k.conj().T
    return out / n


def marginal_probability(state: np.ndarray, setting: UnsharpSetting, observables: ObservableSet | None = None) -> float:
    """p(b | state, y) = Tr(state * E_y^b) for the unsharp POVM element."""
    obs = _observables_for(setting.n, observables)
    p = float(np.real(np.trace(np.asarray(state, dtype=complex) @ povm_element(setting, obs))))
    if p < -1e-10 or p > 1.0 + 1e-10:
        raise ValueError(f"marginal probability {p} outside [0, 1]; input is not a valid state")
    return min(max(p, 0.0), 1.0)


def quality_factor(n: int, eta: float) -> float:
    """Signal fraction surviving one averaged unsharp measurement.

    f = (1 + (n-1) sqrt(1 - eta^2)) / n, ranging from 1 (eta=0) to 1/n (eta=1).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"sharpness eta must lie in [0, 1], got {eta}")
    return (1.0 + (n - 1) * math.sqrt(1.0 - eta * eta)) / n


def closed_form_witness(n: int, visibility: float, eta: float) -> float:
    """Witness of an observer seeing visibility v and measuring at sharpness eta."""
    return 0.5 * (1.0 + visibility * eta / math.sqrt(n))


def noncontextual_bound(n: int) -> float:
    """Largest witness value any preparation-noncontextual model allows."""
    return (n + 1) / (2 * n)


@dataclass(frozen=True)
class SequencePlan:
    """Per-observer sharpness with derived quality factors, visibilities and witnesses."""

    n: int
    q: float
    etas: tuple[float, ...]
    quality_factors: tuple[float, ...]
    visibilities: tuple[float, ...]
    witnesses: tuple[float, ...]


def visibility_chain(n: int, q: float, etas) -> SequencePlan:
    """Propagate visibilities v_1 = q, v_{k+1} = v_k f_k through a sharpness list."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"visibility q must lie in [0, 1], got {q}")
    etas = tuple(float(e) for e in etas)
    factors, visibilities, predicted = [], [], []
    v = float(q)
    for eta in etas:
        f = quality_factor(n, eta)
        visibilities.append(v)
        factors.append(f)
        predicted.append(closed_form_witness(n, v, eta))
        v *= f
    return SequencePlan(
        n=n,
        q=float(q),
        etas=etas,
        quality_factors=tuple(factors),
        visibilities=tuple(visibilities),
        witnesses=tuple(predicted),
    )


@dataclass(frozen=True)
class MarginalTable:
    """Winning probabilities p(b = x_y | x, y), one row per x, one column per y."""

    n: int
    win: np.ndarray
    provenance: str = "simulated"
    sigma: np.ndarray | None = None

    def __post_init__(self):
        win = np.asarray(self.win, dtype=float)
        if win.shape != (2**self.n, self.n):
            raise ValueError(f"win must have shape ({2**self.n}, {self.n}), got {win.shape}")
        if not np.all(np.isfinite(win)):
            raise ValueError("win contains non-finite entries; the table is incomplete")
        if win.min() < -1e-12 or win.max() > 1.0 + 1e-12:
            raise ValueError("winning probabilities must lie in [0, 1]")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        object.__setattr__(self, "win", win)
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=float)
            if sigma.shape != win.shape:
                raise ValueError("sigma must match the shape of win")
            object.__setattr__(self, "sigma", sigma)


def witness(table: MarginalTable) -> float:
    """Average winning probability over all inputs and settings."""
    return float(np.mean(table.win))


def run_sequence(n: int, q: float, etas) -> list[MarginalTable]:
    """Simulate the full observer chain, one marginal table per observer.

    Observer k receives each preparation evolved through the k-1 preceding
    averaged channels, then measures at sharpness etas[k-1].
    """
    obs = build_observables(n)
    etas = tuple(float(e) for e in etas)
    strings = all_bit_strings(n)
    states = [build_preparation(n, x, q, obs).rho for x in strings]

    tables = []
    for k, eta in enumerate(etas):
        win = np.empty((2**n, n))
        for ix, x in enumerate(strings):
            for y in range(1, n + 1):
                setting = UnsharpSetting(n=n, y=y, b=int(x[y - 1]), eta=eta)
                win[ix, y - 1] = marginal_probability(states[ix], setting, obs)
        tables.append(MarginalTable(n=n, win=win, provenance="simulated"))
        if k + 1 < len(etas):
            states = [evolve_average(state, eta, n, obs) for state in states]
    return tables


def read_marginal_csv(path, provenance: str = "recorded") -> MarginalTable:
    """Load a table from CSV with header ``x,y,p_win[,sigma]``.

    Every (x, y) pair must appear exactly once; n is inferred from the bit
    strings.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if fields[:3] != ["x", "y", "p_win"]:
            raise ValueError(f"expected header x,y,p_win[,sigma] in {path}, got {fields}")
        has_sigma = "sigma" in fields
        rows = list(reader)
    if not rows:
        raise ValueError(f"no data rows in {path}")

    n = len(rows[0]["x"])
    win = np.full((2**n, n), np.nan)
    sigma = np.full((2**n, n), np.nan) if has_sigma else None
    for row in rows:
        x = row["x"]
        if len(x) != n or any(c not in "01" for c in x):
            raise ValueError(f"bad bit string {x!r} in {path}")
        y = int(row["y"])
        if not 1 <= y <= n:
            raise ValueError(f"setting index {y} out of range 1..{n} in {path}")
        ix = int(x, 2)
        if not np.isnan(win[ix, y - 1]):
            raise ValueError(f"duplicate entry for x={x}, y={y} in {path}")
        win[ix, y - 1] = float(row["p_win"])
        if has_sigma:
            sigma[ix, y - 1] = float(row["sigma"])
    if np.isnan(win).any():
        raise ValueError(f"table in {path} is incomplete")
    return MarginalTable(n=n, win=win, provenance=provenance, sigma=sigma)


def write_marginal_csv(table: MarginalTable, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fields = ["x", "y", "p_win"] + (["sigma"] if table.sigma is not None else [])
        writer = csv.writer(fh)
        writer.writerow(fields)
        for ix, x in enumerate(all_bit_strings(table.n)):
            for y in range(1, table.n + 1):
                row = [x, y, repr(float(table.win[ix, y - 1]))]
                if table.sigma is not None:
                    row.append(repr(float(table.sigma[ix, y - 1])))
                writer.writerow(row)
