"""Configuration inequalities P(a) <= prod_j p_j(a_j)^{s_j} and their reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .distribution import OutcomeDistribution
from .fis import FractionalWeights

DEFAULT_TOL = 1e-9


class InequalityError(ValueError):
    """Arity mismatch or invalid inequality parameters."""


@dataclass(frozen=True)
class ViolationRow:
    outcome: tuple[int, ...]
    lhs: float
    rhs: float
    margin: float
    ratio: float


@dataclass(frozen=True)
class ViolationReport:
    rows: tuple[ViolationRow, ...]
    max_margin: float | None
    argmax: tuple[int, ...] | None
    violated: bool
    tolerance: float
    label: str = ""

    def row(self, outcome: Sequence[int]) -> ViolationRow | None:
        outcome = tuple(outcome)
        return next((r for r in self.rows if r.outcome == outcome), None)

    def summary(self) -> str:
        if self.violated:
            return f"VIOLATED margin={self.max_margin:.9g} at {_fmt_outcome(self.argmax)}"
        return "SATISFIED"

    def render(self) -> str:
        lines = [f"# weights: {self.label}"] if self.label else []
        lines.append(f"{'outcome':<16}{'lhs':>18}{'rhs':>18}{'margin':>18}")
        for r in self.rows:
            lines.append(f"{_fmt_outcome(r.outcome):<16}{r.lhs:>18.9g}{r.rhs:>18.9g}{r.margin:>18.9g}")
        lines.append(self.summary())
        return "\n".join(lines)


def _fmt_outcome(a) -> str:
    return "(" + ",".join(str(x) for x in a) + ")"


def weight_vector(w, n: int) -> np.ndarray:
    if isinstance(w, FractionalWeights):
        w = w.as_floats()
    arr = np.asarray([float(x) for x in w], dtype=np.float64)
    if arr.shape != (n,):
        raise InequalityError(f"weight vector has length {arr.size}, distribution has {n} parties")
    if np.any(arr < 0) or np.any(arr > 1):
        raise InequalityError("weights must lie in [0, 1]")
    return arr


def _label(w) -> str:
    if isinstance(w, FractionalWeights):
        return f"{w.provenance}: {w.render()}"
    return " ".join(str(x) for x in w)


def _evaluate(d: OutcomeDistribution, weights: np.ndarray, tolerance: float, label: str) -> ViolationReport:
    """Rows for every outcome with P(a) > 0; RHS is the minimum over the weight rows."""
    margs = _kernels.pad_marginals(d.party_marginals)
    rhs_all = _kernels.rhs_table(margs, d.alphabets, weights).min(axis=0)
    joint = d.table.ravel()
    support = np.flatnonzero(joint > 0)
    lhs = joint[support]
    rhs = rhs_all[support]
    margin = lhs - rhs
    with np.errstate(divide="ignore"):
        ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1), np.inf)
    outcomes = np.array(np.unravel_index(support, d.alphabets)).T
    rows = tuple(
        ViolationRow(tuple(int(x) for x in a), float(l), float(r), float(m), float(q))
        for a, l, r, m, q in zip(outcomes, lhs, rhs, margin, ratio)
    )
    if not rows:
        return ViolationReport((), None, None, False, tolerance, label)
    i = int(np.argmax(margin))
    best = float(margin[i])
    return ViolationReport(rows, best, rows[i].outcome, best > tolerance, tolerance, label)


def check_config(d: OutcomeDistribution, w, tolerance: float = DEFAULT_TOL) -> ViolationReport:
    """Evaluate P(a) <= prod p_j(a_j)^{s_j} on every outcome with P(a) > 0 (0^0 = 1)."""
    weights = weight_vector(w, d.n)
    return _evaluate(d, weights[None, :], tolerance, _label(w))


def chain_weight_pair(n: int, m: int, k: int) -> np.ndarray:
    """The two alternating exponent rows: odd parties (m-k)/m, even k/m, and swapped."""
    if m < 2 or not 1 <= k <= m - 1:
        raise InequalityError(f"need m >= 2 and 1 <= k <= m-1, got m={m}, k={k}")
    if n < 2:
        raise InequalityError("chain form needs at least 2 parties")
    big, small = (m - k) / m, k / m
    first = np.array([big if j % 2 == 0 else small for j in range(n)])
    second = np.array([small if j % 2 == 0 else big for j in range(n)])
    return np.vstack([first, second])


def chain_min_check(d: OutcomeDistribution, m: int, k: int = 1,
                    tolerance: float = DEFAULT_TOL) -> ViolationReport:
    """Two-sided chain form: RHS is the smaller of the two alternating products."""
    weights = chain_weight_pair(d.n, m, k)
    return _evaluate(d, weights, tolerance, f"chain-min(m={m},k={k})")


def max_violation(d: OutcomeDistribution, w) -> tuple[float, tuple[int, ...]]:
    """max over all outcomes of LHS - RHS; ties go to the lexicographically first outcome."""
    weights = weight_vector(w, d.n)
    best, arg = _kernels.max_margin(
        d.table.ravel(), _kernels.pad_marginals(d.party_marginals), d.alphabets,
        weights[None, :], support_only=False,
    )
    outcome = tuple(int(x) for x in np.unravel_index(int(arg[0]), d.alphabets))
    return float(best[0]), outcome


def expectation_finner(d: OutcomeDistribution, post_functions: Sequence[Sequence[float]], w,
                       tolerance: float = DEFAULT_TOL) -> tuple[float, float, bool]:
    """E[prod f_j] <= prod_j ||f_j||_{1/s_j}; a zero weight contributes sup f_j over the support."""
    weights = weight_vector(w, d.n)
    if len(post_functions) != d.n:
        raise InequalityError(f"{len(post_functions)} post-processing functions for {d.n} parties")
    fs = []
    for j, f in enumerate(post_functions):
        f = np.asarray(f, dtype=np.float64)
        if f.shape != (d.alphabets[j],):
            raise InequalityError(f"party {j + 1}: function defined on {f.size} symbols, alphabet has {d.alphabets[j]}")
        if np.any(f < 0):
            raise InequalityError(f"party {j + 1}: post-processing values must be non-negative")
        fs.append(f)
    operands = [d.table, list(range(d.n))]
    for j, f in enumerate(fs):
        operands += [f, [j]]
    lhs = float(np.einsum(*operands, []))
    rhs = 1.0
    for f, s, p in zip(fs, weights, d.party_marginals):
        if s == 0:
            rhs *= float(f[p > 0].max(initial=0.0))
        else:
            rhs *= float(np.dot(p, f ** (1 / s))) ** s
    return lhs, rhs, lhs <= rhs + tolerance


def check_config_exact(items: Mapping[tuple[int, ...], Fraction], alphabets: Sequence[int],
                       weights: Sequence[Fraction]) -> list[tuple[int, ...]]:
    """Outcomes violating the inequality, decided in exact rational arithmetic.

    Compares P(a)^D with prod p_j(a_j)^{s_j D}, D the common denominator of
    the weights, so no roots are taken.
    """
    weights = [Fraction(s) for s in weights]
    n = len(alphabets)
    if len(weights) != n:
        raise InequalityError(f"weight vector has length {len(weights)}, expected {n}")
    D = math.lcm(*(s.denominator for s in weights)) if weights else 1
    powers = [int(s * D) for s in weights]
    margs = [[Fraction(0)] * k for k in alphabets]
    for a, p in items.items():
        for j, x in enumerate(a):
            margs[j][x] += Fraction(p)
    bad = []
    for a, p in sorted(items.items()):
        if p <= 0:
            continue
        rhs = Fraction(1)
        for j, x in enumerate(a):
            if powers[j]:
                rhs *= margs[j][x] ** powers[j]
        if Fraction(p) ** D > rhs:
            bad.append(a)
    return bad
