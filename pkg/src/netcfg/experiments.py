"""Noisy-state visibility studies and the named quantum scenarios.

A scan evaluates, for each (theta, v) cell centre, the largest margin of
either the triangle-style inequality with all exponents 1/2 (``fin1``) or
the two-sided chain form with exponent pair ((m-1)/m, 1/m) (``fin3``).

Noise is applied per component, so the distribution is a polynomial in v:
P(v) = sum over subsets S of components of v^|S| (1-v)^(C-|S|) P_S, where
P_S keeps the components in S pure and replaces the rest by the maximally
mixed state.  The 2^C tables P_S are Born-rule distributions computed once
per theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any

import numpy as np

from . import _kernels
from .distribution import OutcomeDistribution
from .inequality import DEFAULT_TOL, chain_weight_pair
from .quantum import (
    NetworkQuantumState,
    QuantumComponent,
    add_noise,
    assemble,
    bell2,
    born_distribution,
    computational_bases,
    epr,
    gamma_basis,
    ghz,
    w3,
)

EXPERIMENTS = ("noisy_ghz", "noisy_w", "noisy_triangle", "noisy_star")
INEQUALITIES = ("fin1", "fin3")
MAX_GRID_POINTS = 10**6
BISECT_TOL = 1e-4


class ExperimentError(ValueError):
    """Unknown experiment or invalid scan parameters."""


def visibility_threshold_ghz(theta: float) -> float:
    """v* = (3 - sqrt(9 - 8c)) / (4c) with c = cos^2(2 theta).

    Evaluated as 2 / (3 + sqrt(9 - 8c)), the same value without the 0/0 at c = 0.
    """
    if not 0 < theta < math.pi / 2:
        raise ExperimentError(f"theta must lie in (0, pi/2), got {theta}")
    c = math.cos(2 * theta) ** 2
    return 2 / (3 + math.sqrt(9 - 8 * c))


# --- named scenarios ------------------------------------------------------


def swapping_chain(theta1: float, theta2: float) -> NetworkQuantumState:
    """Two EPR pairs in a line; the middle party holds one qubit of each."""
    return assemble([epr(theta1), epr(theta2)], [[0, 1], [1, 2]])


def epr_star(thetas) -> NetworkQuantumState:
    """One EPR pair per leaf; the hub is the last party."""
    hub = len(thetas)
    return assemble([epr(t) for t in thetas], [[j, hub] for j in range(len(thetas))])


def epr_triangle(t1: float, t2: float | None = None, t3: float | None = None) -> NetworkQuantumState:
    """EPR pairs on (A1,A2), (A2,A3), (A3,A1); A1 holds qubits 0 and 5."""
    t2 = t1 if t2 is None else t2
    t3 = t1 if t3 is None else t3
    return assemble([epr(t1), epr(t2), epr(t3)], [[0, 1], [1, 2], [2, 0]])


def two_ghz_network(theta1: float, theta2: float) -> NetworkQuantumState:
    """GHZ on (A1,A2,A3) and GHZ on (A2,A3,A4)."""
    return assemble([ghz(theta1, 3), ghz(theta2, 3)], [[0, 1, 2], [1, 2, 3]])


def swapping_distribution(theta1: float, theta2: float) -> OutcomeDistribution:
    s = swapping_chain(theta1, theta2)
    return born_distribution(s, computational_bases(s))


def bell_middle_distribution(theta1: float, theta2: float) -> OutcomeDistribution:
    s = swapping_chain(theta1, theta2)
    b = computational_bases(s)
    b[1] = bell2()
    return born_distribution(s, b)


def triangle_gamma_distribution(theta: float, gamma: float) -> OutcomeDistribution:
    s = epr_triangle(theta)
    return born_distribution(s, [gamma_basis(gamma)] * 3)


# --- noisy experiments ----------------------------------------------------


def _pure_network(experiment: str, theta: float, n: int | None, gamma: float | None):
    if experiment == "noisy_ghz":
        return [ghz(theta, 3)], [[0, 1, 2]]
    if experiment == "noisy_w":
        return [w3(theta, theta if gamma is None else gamma)], [[0, 1, 2]]
    if experiment == "noisy_triangle":
        return [epr(theta)] * 3, [[0, 1], [1, 2], [2, 0]]
    if experiment == "noisy_star":
        n = 3 if n is None else n
        if n < 3:
            raise ExperimentError(f"noisy_star needs n >= 3, got {n}")
        return [epr(theta)] * (n - 1), [[j, n - 1] for j in range(n - 1)]
    raise ExperimentError(f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")


def noisy_state(experiment: str, theta: float, v: float, n: int | None = None,
                gamma: float | None = None) -> NetworkQuantumState:
    comps, owners = _pure_network(experiment, theta, n, gamma)
    return assemble([add_noise(c, v) for c in comps], owners)


def noisy_distribution(experiment: str, theta: float, v: float, n: int | None = None,
                       gamma: float | None = None) -> OutcomeDistribution:
    """Direct route: add noise to every component, then apply the Born rule."""
    s = noisy_state(experiment, theta, v, n, gamma)
    return born_distribution(s, computational_bases(s))


def _mixed(c: QuantumComponent) -> QuantumComponent:
    return QuantumComponent(np.eye(c.dim) / c.dim, c.dims)


@dataclass
class _NoiseExpansion:
    """The 2^C subset tables P_S for one theta."""

    tables: np.ndarray  # (2^C, N)
    pure_counts: np.ndarray  # (2^C,)
    ncomp: int
    alphabets: tuple[int, ...]

    def joint(self, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.float64)[:, None]
        k = self.pure_counts[None, :]
        coeff = vs**k * (1 - vs) ** (self.ncomp - k)
        return coeff @ self.tables


def _expansion(experiment: str, theta: float, n: int | None, gamma: float | None) -> _NoiseExpansion:
    comps, owners = _pure_network(experiment, theta, n, gamma)
    tables, counts = [], []
    alphabets = None
    for mask in cartesian((True, False), repeat=len(comps)):
        chosen = [c if keep else _mixed(c) for c, keep in zip(comps, mask)]
        s = assemble(chosen, owners)
        d = born_distribution(s, computational_bases(s))
        alphabets = d.alphabets
        tables.append(d.table.ravel())
        counts.append(sum(mask))
    return _NoiseExpansion(np.array(tables), np.array(counts), len(comps), alphabets)


def _weights_for(inequality: str, n: int, m: int) -> np.ndarray:
    if inequality == "fin1":
        return np.full((1, n), 0.5)
    if inequality == "fin3":
        return chain_weight_pair(n, m, 1)
    raise ExperimentError(f"unknown inequality {inequality!r}; expected fin1 or fin3")


def _batch_marginals(joint: np.ndarray, alphabets: tuple[int, ...]) -> np.ndarray:
    B = joint.shape[0]
    full = joint.reshape((B,) + alphabets)
    amax = max(alphabets)
    out = np.zeros((B, len(alphabets), amax))
    for j, k in enumerate(alphabets):
        axes = tuple(i + 1 for i in range(len(alphabets)) if i != j)
        out[:, j, :k] = full.sum(axis=axes)
    return out


def _margins(exp: _NoiseExpansion, vs, weights) -> np.ndarray:
    joint = exp.joint(np.atleast_1d(vs))
    best, _ = _kernels.max_margin(joint, _batch_marginals(joint, exp.alphabets), exp.alphabets,
                                  weights, support_only=False)
    return best


def margin_at(experiment: str, theta: float, v: float, m: int = 1000, inequality: str = "fin3",
              n: int | None = None, gamma: float | None = None) -> float:
    exp = _expansion(experiment, theta, n, gamma)
    return float(_margins(exp, [v], _weights_for(inequality, len(exp.alphabets), m))[0])


def threshold(experiment: str, theta: float, m: int = 1000, inequality: str = "fin3",
              n: int | None = None, gamma: float | None = None, tolerance: float = DEFAULT_TOL,
              resolution: float = BISECT_TOL) -> float:
    """Smallest violating visibility by bisection (assumes the margin grows with v).

    Returns inf when even v = 1 does not violate.
    """
    exp = _expansion(experiment, theta, n, gamma)
    weights = _weights_for(inequality, len(exp.alphabets), m)

    def violated(v):
        return _margins(exp, [v], weights)[0] > tolerance

    if not violated(1.0):
        return math.inf
    if violated(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if violated(mid):
            hi = mid
        else:
            lo = mid
    return hi


def cell_centres(points: int, lo: float, hi: float) -> np.ndarray:
    return lo + (np.arange(points) + 0.5) * (hi - lo) / points


@dataclass
class RegionTable:
    thetas: np.ndarray
    vs: np.ndarray
    margins: np.ndarray  # (len(thetas), len(vs))
    tolerance: float
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def violated(self) -> np.ndarray:
        return self.margins > self.tolerance

    def rows(self):
        for i, t in enumerate(self.thetas):
            for j, v in enumerate(self.vs):
                yield float(t), float(v), float(self.margins[i, j]), bool(self.margins[i, j] > self.tolerance)


def region_scan(experiment: str, theta_points: int = 200, v_points: int = 200, m: int = 1000,
                inequality: str = "fin3", n: int | None = None, gamma: float | None = None,
                tolerance: float = DEFAULT_TOL, theta_range=(0.0, math.pi / 2),
                v_range=(0.0, 1.0)) -> RegionTable:
    if theta_points < 2 or v_points < 2:
        raise ExperimentError("grid resolutions must be >= 2")
    if theta_points * v_points > MAX_GRID_POINTS:
        raise ExperimentError(f"grid of {theta_points * v_points} points exceeds cap {MAX_GRID_POINTS}")
    if m < 2:
        raise ExperimentError(f"m must be >= 2, got {m}")
    if inequality not in INEQUALITIES:
        raise ExperimentError(f"unknown inequality {inequality!r}; expected fin1 or fin3")
    thetas = cell_centres(theta_points, *theta_range)
    vs = cell_centres(v_points, *v_range)
    margins = np.empty((theta_points, v_points))
    for i, t in enumerate(thetas):
        exp = _expansion(experiment, float(t), n, gamma)
        margins[i] = _margins(exp, vs, _weights_for(inequality, len(exp.alphabets), m))
    meta = {
        "experiment": experiment if experiment != "noisy_star" else f"noisy_star({3 if n is None else n})",
        "inequality": inequality,
        "m": m,
        "theta_points": theta_points,
        "v_points": v_points,
        "theta_range": f"{theta_range[0]:.9g}:{theta_range[1]:.9g}",
        "v_range": f"{v_range[0]:.9g}:{v_range[1]:.9g}",
        "gamma": "theta" if gamma is None else f"{gamma:.9g}",
        "tolerance": f"{tolerance:.3g}",
    }
    if experiment != "noisy_w":
        del meta["gamma"]
    return RegionTable(thetas, vs, margins, tolerance, meta)


def emit_csv(r: RegionTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(r))


def format_csv(r: RegionTable) -> str:
    lines = [f"# {k}={v}" for k, v in r.meta.items()]
    lines.append("theta,v,margin,violated")
    for t, v, margin, bad in r.rows():
        lines.append(f"{t:.9g},{v:.9g},{margin:.9g},{int(bad)}")
    return "\n".join(lines) + "\n"


def parse_csv(path) -> list[tuple[float, float, float, bool]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("theta"):
                continue
            t, v, margin, bad = line.strip().split(",")
            rows.append((float(t), float(v), float(margin), bad == "1"))
    return rows
