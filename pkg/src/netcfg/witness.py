"""Entanglement witnessing by adjacent-pair dependence, k-separability, and topology refutation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fis
from .distribution import OutcomeDistribution
from .inequality import DEFAULT_TOL, ViolationReport, check_config
from .quantum import MeasurementBasis, NetworkQuantumState, born_distribution, computational_bases
from .topology import NetworkTopology, identify

PURITY_TOL = 1e-9


class WitnessError(ValueError):
    """Invalid witness or compatibility request."""


@dataclass(frozen=True)
class PairVerdict:
    pair: tuple[int, int]
    dependent: bool
    margin: float
    outcome: tuple[int, int]

    def render(self) -> str:
        i, j = (x + 1 for x in self.pair)
        a = f"({self.outcome[0]},{self.outcome[1]})"
        if self.dependent:
            return f"pair ({i},{j}): DEPENDENT margin={self.margin:.9g} at {a}"
        return f"pair ({i},{j}): INDEPENDENT max margin={self.margin:.9g}"


@dataclass(frozen=True)
class WitnessVerdict:
    pairs: tuple[PairVerdict, ...]
    tolerance: float
    overall: str = field(init=False)

    def __post_init__(self):
        entangled = bool(self.pairs) and all(p.dependent for p in self.pairs)
        object.__setattr__(self, "overall", "Entangled" if entangled else "Inconclusive")

    @property
    def entangled(self) -> bool:
        return self.overall == "Entangled"

    @property
    def pair_tests(self) -> int:
        return len(self.pairs)

    def render(self) -> str:
        lines = [p.render() for p in self.pairs]
        lines.append("ENTANGLED" if self.entangled else "INCONCLUSIVE")
        return "\n".join(lines)


def pair_independence(d2: OutcomeDistribution, tolerance: float = DEFAULT_TOL,
                      pair: tuple[int, int] = (0, 1)) -> PairVerdict:
    """Largest P(a, b) - p(a) p(b); deviations sum to zero, so any dependence shows up positive."""
    if d2.n != 2:
        raise WitnessError(f"pair test needs a 2-party distribution, got {d2.n} parties")
    pa, pb = d2.party_marginals
    dev = d2.table - np.outer(pa, pb)
    i = int(np.argmax(dev))
    a, b = np.unravel_index(i, dev.shape)
    margin = float(dev.flat[i])
    return PairVerdict(tuple(pair), margin > tolerance, margin, (int(a), int(b)))


def adjacent_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def witness_distribution(d: OutcomeDistribution, tolerance: float = DEFAULT_TOL,
                         pairs: Sequence[tuple[int, int]] | None = None) -> WitnessVerdict:
    pairs = adjacent_pairs(d.n) if pairs is None else [tuple(p) for p in pairs]
    verdicts = [pair_independence(d.marginal(p), tolerance, p) for p in pairs]
    return WitnessVerdict(tuple(verdicts), tolerance)


def witness_entanglement(s: NetworkQuantumState, bases: Sequence[MeasurementBasis] | None = None,
                         tolerance: float = DEFAULT_TOL,
                         pairs: Sequence[tuple[int, int]] | None = None) -> WitnessVerdict:
    """Pure-state witness: test the n-1 adjacent pairs (or the given pairs, e.g. a spanning tree).

    A pair found independent in one basis proves nothing about separability.
    """
    if s.n < 2:
        raise WitnessError("witnessing needs at least 2 parties")
    if not s.is_pure(PURITY_TOL):
        raise WitnessError("witnessing requires a pure state (purity below 1 - 1e-9)")
    bases = computational_bases(s) if bases is None else bases
    return witness_distribution(born_distribution(s, bases), tolerance, pairs)


def coarse_grain(d: OutcomeDistribution, blocks: Sequence[Sequence[int]]) -> OutcomeDistribution:
    return d.merge_parties(blocks)


def k_separability_test(d: OutcomeDistribution, m: int, tolerance: float = DEFAULT_TOL,
                        blocks: Sequence[Sequence[int]] | None = None) -> ViolationReport:
    """P(S_1..S_k) <= prod_i P(S_i)^{(m-1)/m}; a violation rules out separability across the blocks."""
    if m < 2:
        raise WitnessError(f"m must be >= 2, got {m}")
    if blocks is not None:
        d = coarse_grain(d, blocks)
    if d.n < 2:
        raise WitnessError("k-separability needs at least 2 blocks")
    return check_config(d, [(m - 1) / m] * d.n, tolerance)


@dataclass(frozen=True)
class CompatibilityVerdict:
    candidate: NetworkTopology
    weights: fis.FractionalWeights
    report: ViolationReport

    @property
    def incompatible(self) -> bool:
        return self.report.violated

    @property
    def conclusion(self) -> str:
        return "Incompatible" if self.incompatible else "NotRefuted"

    def render(self) -> str:
        lines = [f"weights ({self.weights.provenance}): {self.weights.render()}", self.report.summary()]
        if self.incompatible:
            lines.append(f"INCOMPATIBLE with {self.candidate.describe()}")
        else:
            lines.append("NOT REFUTED")
        return "\n".join(lines)


DEFAULT_FACET = {"chain": "odd_parties", "cycle": "even_parties", "star": "hub"}


def strategy_weights(candidate: NetworkTopology, strategy: str, m: int | None = None, k: int = 1,
                     variant: str = "a", facet: str | None = None,
                     assignment: Sequence[Sequence] | None = None) -> fis.FractionalWeights:
    if strategy == "greedy":
        return fis.fis_greedy(candidate)
    if strategy == "optimal":
        return fis.fis_optimal(candidate)
    if strategy in ("decompose", "decomposed"):
        if assignment is None:
            raise WitnessError("decomposed strategy needs per-source assignments")
        return fis.fis_decomposed(candidate, assignment)
    kind = identify(candidate)
    if strategy == "family":
        if m is None:
            raise WitnessError("family strategy needs m")
        if kind is None:
            raise WitnessError(f"family strategy needs a chain/star/cycle/complete candidate, got {candidate.describe()}")
        if kind == "complete":
            return fis.fis_family("complete", candidate.n, m, arity=len(candidate.sources[0]))
        return fis.fis_family(kind, candidate.n, m, k, variant)
    if strategy == "facet":
        if kind not in DEFAULT_FACET:
            raise WitnessError(f"facet strategy needs a chain/star/cycle candidate, got {candidate.describe()}")
        return fis.facet_weights(kind, candidate.n, facet or DEFAULT_FACET[kind])
    raise WitnessError(f"unknown strategy {strategy!r}")


def compatibility_check(d: OutcomeDistribution, candidate: NetworkTopology, strategy: str = "greedy",
                        tolerance: float = DEFAULT_TOL, **params) -> CompatibilityVerdict:
    """One-sided: Incompatible is a proof, NotRefuted is not a compatibility certificate."""
    if d.n != candidate.n:
        raise WitnessError(f"distribution has {d.n} parties, candidate network has {candidate.n}")
    w = strategy_weights(candidate, strategy, **params)
    return CompatibilityVerdict(candidate, w, check_config(d, w, tolerance))
