"""Networks of independent sources, modelled as hypergraphs.

Parties are the vertices and every independent source is a hyperedge over
the parties that receive a share of it.  Parties are numbered from 1 in
documents and reports; internally sources store 0-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Sequence


class TopologyError(ValueError):
    """Raised for malformed network documents or invalid topologies."""


@dataclass(frozen=True)
class NetworkTopology:
    """Parties plus a list of sources (hyperedges over 0-based party indices).

    Duplicate sources are allowed and kept distinct: two independent sources
    may connect the same set of parties.  Direct construction does not
    validate; use :func:`validate` or :meth:`check`, or build through
    :func:`parse_network` / :func:`builtin`, which always validate.
    """

    parties: tuple[str, ...]
    sources: tuple[tuple[int, ...], ...]
    dims: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(str(p) for p in self.parties))
        object.__setattr__(self, "sources", tuple(tuple(int(i) for i in s) for s in self.sources))
        if self.dims is not None:
            object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    def check(self) -> "NetworkTopology":
        findings = validate(self)
        if findings:
            raise TopologyError("; ".join(findings))
        return self

    @property
    def n(self) -> int:
        return len(self.parties)

    def incident(self, party: int) -> list[int]:
        """Indices of the sources seen by ``party`` (0-based)."""
        return [k for k, s in enumerate(self.sources) if party in s]

    def arity(self, source: int) -> int:
        return len(self.sources[source])

    def canonical(self) -> tuple[int, tuple[tuple[int, ...], ...]]:
        """Order-free key: party count plus the sorted multiset of sources."""
        return self.n, tuple(sorted(tuple(sorted(s)) for s in self.sources))

    def same_shape(self, other: "NetworkTopology") -> bool:
        return self.canonical() == other.canonical()

    def is_subnetwork_of(self, other: "NetworkTopology") -> bool:
        """True if every source here can be matched to a distinct source of ``other``."""
        if self.n != other.n:
            return False
        pool = [frozenset(s) for s in other.sources]
        for s in self.sources:
            key = frozenset(s)
            if key not in pool:
                return False
            pool.remove(key)
        return True

    def describe(self) -> str:
        edges = ",".join("{" + ",".join(str(i + 1) for i in s) + "}" for s in self.sources)
        return f"{self.n}-party network [{edges}]"


def validate(t: NetworkTopology) -> list[str]:
    """Structural findings; empty when the topology is well formed."""
    findings = []
    n = len(t.parties)
    if n < 1:
        findings.append("network needs at least one party")
    for k, src in enumerate(t.sources):
        if len(src) == 0:
            findings.append(f"empty source at index {k + 1}")
            continue
        for i in src:
            if not 0 <= i < n:
                findings.append(f"source {k + 1} references party {i + 1} out of range 1..{n}")
        if len(set(src)) != len(src):
            findings.append(f"source {k + 1} lists a party more than once")
    if t.dims is not None:
        if len(t.dims) != n:
            findings.append(f"dimension hints given for {len(t.dims)} parties, expected {n}")
        for j, d in enumerate(t.dims):
            if d < 1:
                findings.append(f"party {j + 1} has non-positive dimension hint {d}")
    return findings


def _checked(parties, sources, dims=None) -> NetworkTopology:
    return NetworkTopology(tuple(parties), tuple(tuple(s) for s in sources), dims).check()


def parse_network(document: str | dict[str, Any]) -> NetworkTopology:
    """Build a topology from a network document (JSON text or parsed dict).

    Source party indices in the document are 1-based.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"network document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise TopologyError("network document must be an object")
    parties = document.get("parties")
    if not isinstance(parties, list) or not all(isinstance(p, str) for p in parties):
        raise TopologyError("'parties' must be a list of names")
    raw_sources = document.get("sources", [])
    if not isinstance(raw_sources, list):
        raise TopologyError("'sources' must be a list")
    sources = []
    for k, src in enumerate(raw_sources):
        members = src.get("parties") if isinstance(src, dict) else src
        if not isinstance(members, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in members
        ):
            raise TopologyError(f"source {k + 1} must list integer party indices")
        for i in members:
            if not 1 <= i <= len(parties):
                raise TopologyError(
                    f"source {k + 1}: party index {i} out of range 1..{len(parties)}"
                )
        sources.append([i - 1 for i in members])
    dims = document.get("dims")
    return _checked(parties, sources, dims)


def to_document(t: NetworkTopology) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "parties": list(t.parties),
        "sources": [{"parties": [i + 1 for i in s]} for s in t.sources],
    }
    if t.dims is not None:
        doc["dims"] = list(t.dims)
    return doc


def serialize(t: NetworkTopology) -> str:
    return json.dumps(to_document(t), indent=2)


def load_network(path) -> NetworkTopology:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def default_names(n: int) -> list[str]:
    return [f"A{j}" for j in range(1, n + 1)]


def builtin(kind: str, n: int, arity: int = 2) -> NetworkTopology:
    """Named families: chain, star (hub is the last party), cycle, complete, single_source."""
    if kind == "single_source":
        if n < 1:
            raise TopologyError("single_source needs n >= 1")
        return _checked(default_names(n), [list(range(n))])
    if n < 2:
        raise TopologyError(f"{kind} network needs n >= 2, got {n}")
    if kind == "chain":
        sources = [[j, j + 1] for j in range(n - 1)]
    elif kind == "star":
        sources = [[j, n - 1] for j in range(n - 1)]
    elif kind == "cycle":
        sources = [[j, j + 1] for j in range(n - 1)]
        if n > 2:
            sources.append([0, n - 1])
    elif kind == "complete":
        if not 2 <= arity <= n:
            raise TopologyError(f"complete network needs 2 <= arity <= n, got arity={arity}, n={n}")
        sources = [list(c) for c in combinations(range(n), arity)]
    else:
        raise TopologyError(f"unknown network kind {kind!r}")
    return _checked(default_names(n), sources)


def from_sources(n: int, sources: Iterable[Sequence[int]], names: Sequence[str] | None = None) -> NetworkTopology:
    """Convenience constructor taking 0-based sources."""
    return _checked(names or default_names(n), [list(s) for s in sources])


def identify(t: NetworkTopology) -> str | None:
    """Name of the builtin family ``t`` matches, if any."""
    for kind in ("chain", "star", "cycle"):
        try:
            if t.same_shape(builtin(kind, t.n)):
                return kind
        except TopologyError:
            pass
    arities = {len(s) for s in t.sources}
    if len(arities) == 1:
        (a,) = arities
        try:
            if t.same_shape(builtin("complete", t.n, a)):
                return "complete"
        except TopologyError:
            pass
    return None
