"""Joint outcome tables over finite per-party alphabets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator, Sequence

import numpy as np

from .topology import default_names

MAX_CELLS = 10**7
SUM_TOL = 1e-9


class DistributionError(ValueError):
    """Malformed outcome table or document."""


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Dense probability table; axis ``j`` is party ``j``'s outcome."""

    table: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        if table.ndim < 1:
            raise DistributionError("distribution needs at least one party")
        if table.size > MAX_CELLS:
            raise DistributionError(f"table has {table.size} cells, cap is {MAX_CELLS}")
        if len(self.names) != table.ndim:
            raise DistributionError(f"{len(self.names)} names for {table.ndim} parties")
        if np.any(table < 0) or np.any(table > 1 + SUM_TOL):
            raise DistributionError("probabilities must lie in [0, 1]")
        total = float(table.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, expected 1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "names", tuple(str(x) for x in self.names))

    @classmethod
    def from_array(cls, table, names: Sequence[str] | None = None) -> "OutcomeDistribution":
        table = np.asarray(table, dtype=np.float64)
        return cls(table, tuple(names) if names is not None else tuple(default_names(table.ndim)))

    @classmethod
    def from_items(cls, alphabets: Sequence[int], items, names=None) -> "OutcomeDistribution":
        table = np.zeros(tuple(alphabets))
        for outcome, p in (items.items() if isinstance(items, dict) else items):
            outcome = tuple(outcome)
            if len(outcome) != len(alphabets):
                raise DistributionError(f"outcome {outcome} has wrong arity")
            if any(not 0 <= a < k for a, k in zip(outcome, alphabets)):
                raise DistributionError(f"outcome {outcome} outside alphabets {tuple(alphabets)}")
            table[outcome] += p
        return cls.from_array(table, names)

    @property
    def n(self) -> int:
        return self.table.ndim

    @property
    def alphabets(self) -> tuple[int, ...]:
        return self.table.shape

    def __getitem__(self, outcome) -> float:
        return float(self.table[tuple(outcome)])

    def items(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Non-zero entries in lexicographic outcome order."""
        for idx in np.argwhere(self.table > 0):
            key = tuple(int(i) for i in idx)
            yield key, float(self.table[key])

    @cached_property
    def party_marginals(self) -> tuple[np.ndarray, ...]:
        out = []
        for j in range(self.n):
            axes = tuple(i for i in range(self.n) if i != j)
            m = self.table.sum(axis=axes) if axes else self.table.copy()
            m.setflags(write=False)
            out.append(m)
        return tuple(out)

    def marginal(self, subset: Sequence[int]) -> "OutcomeDistribution":
        """Marginal on ``subset`` (0-based, order kept)."""
        subset = [int(j) for j in subset]
        if not subset:
            raise DistributionError("marginal needs a non-empty subset")
        if any(not 0 <= j < self.n for j in subset) or len(set(subset)) != len(subset):
            raise DistributionError(f"invalid party subset {subset} for {self.n} parties")
        if len(subset) == 1:
            return OutcomeDistribution(self.party_marginals[subset[0]], (self.names[subset[0]],))
        rest = tuple(j for j in range(self.n) if j not in subset)
        reduced = self.table.sum(axis=rest) if rest else self.table
        # remaining axes are in ascending party order
        order = sorted(subset)
        reduced = np.transpose(reduced, [order.index(j) for j in subset])
        return OutcomeDistribution(np.ascontiguousarray(reduced), tuple(self.names[j] for j in subset))

    def merge_parties(self, blocks: Sequence[Sequence[int]], names=None) -> "OutcomeDistribution":
        """Coarse-grain to one party per block; block outcomes are row-major indices."""
        flat = [int(j) for b in blocks for j in b]
        if sorted(flat) != list(range(self.n)) or any(len(b) == 0 for b in blocks):
            raise DistributionError(f"blocks {list(map(list, blocks))} do not partition {self.n} parties")
        moved = np.transpose(self.table, flat)
        shape = [int(np.prod([self.alphabets[j] for j in b])) for b in blocks]
        if names is None:
            names = ["".join(self.names[j] for j in b) for b in blocks]
        return OutcomeDistribution(np.ascontiguousarray(moved).reshape(shape), tuple(names))

    def allclose(self, other: "OutcomeDistribution", atol: float = 1e-12) -> bool:
        return self.alphabets == other.alphabets and bool(np.allclose(self.table, other.table, atol=atol, rtol=0))


def point_mass(alphabets: Sequence[int], outcome: Sequence[int]) -> OutcomeDistribution:
    return OutcomeDistribution.from_items(alphabets, [(tuple(outcome), 1.0)])


def to_document(d: OutcomeDistribution) -> dict[str, Any]:
    return {
        "parties": [{"name": name, "alphabet": k} for name, k in zip(d.names, d.alphabets)],
        "probs": [{"outcome": list(a), "p": p} for a, p in d.items()],
    }


def serialize(d: OutcomeDistribution) -> str:
    return json.dumps(to_document(d), indent=2)


def parse_distribution(document: str | dict[str, Any]) -> OutcomeDistribution:
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DistributionError(f"distribution document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise DistributionError("distribution document must be an object")
    parties = document.get("parties")
    if not isinstance(parties, list) or not parties:
        raise DistributionError("'parties' must be a non-empty list")
    names, alphabets = [], []
    for j, party in enumerate(parties):
        if not isinstance(party, dict) or "alphabet" not in party:
            raise DistributionError(f"party {j + 1} needs 'name' and 'alphabet'")
        alpha = party["alphabet"]
        size = len(alpha) if isinstance(alpha, list) else alpha
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise DistributionError(f"party {j + 1} has invalid alphabet {alpha!r}")
        names.append(str(party.get("name", f"A{j + 1}")))
        alphabets.append(size)
    rows = document.get("probs", [])
    if not isinstance(rows, list):
        raise DistributionError("'probs' must be a list")
    items = []
    for row in rows:
        try:
            outcome, p = tuple(int(a) for a in row["outcome"]), float(row["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DistributionError(f"malformed probability row {row!r}") from exc
        items.append((outcome, p))
    return OutcomeDistribution.from_items(alphabets, items, names)


def load_distribution(path) -> OutcomeDistribution:
    with open(path, encoding="utf-8") as fh:
        return parse_distribution(fh.read())
