"""Finite-alphabet locally causal networks, evaluated by exhaustive enumeration.

Every party answers deterministically from the values of its incident
sources.  A stochastic response is modelled by giving the party an extra
private source (an arity-1 hyperedge) and reading it in the response table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Any, Sequence

import numpy as np

from . import _kernels
from .distribution import OutcomeDistribution
from .topology import NetworkTopology, builtin, from_sources

MAX_TUPLES = 10**7
PROB_TOL = 1e-12


class ClassicalError(ValueError):
    """Invalid sources, responses, or enumeration too large."""


@dataclass(frozen=True, eq=False)
class ClassicalSource:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64).ravel()
        if p.size < 1 or np.any(p < 0) or abs(p.sum() - 1) > PROB_TOL:
            raise ClassicalError(f"source probabilities {p.tolist()} are not a distribution")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size


@dataclass(frozen=True, eq=False)
class ResponseTable:
    """``table[v_1, ..., v_r]`` is the outcome for incident-source values in ascending source order."""

    table: np.ndarray
    alphabet: int

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.size and (t.min() < 0 or t.max() >= self.alphabet):
            raise ClassicalError(f"response outcomes must lie in 0..{self.alphabet - 1}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)


def response(table, alphabet: int | None = None) -> ResponseTable:
    t = np.asarray(table, dtype=np.int64)
    return ResponseTable(t, int(t.max()) + 1 if alphabet is None else alphabet)


def _layout(t: NetworkTopology, sources: Sequence[ClassicalSource], responses: Sequence[ResponseTable]):
    if len(sources) != len(t.sources):
        raise ClassicalError(f"{len(sources)} source distributions for {len(t.sources)} sources")
    if len(responses) != t.n:
        raise ClassicalError(f"{len(responses)} response tables for {t.n} parties")
    sizes = np.array([s.size for s in sources], dtype=np.int64)
    total = math.prod(int(s) for s in sizes)
    if total > MAX_TUPLES:
        raise ClassicalError(f"enumeration of {total} source tuples exceeds cap {MAX_TUPLES}")
    amax = max([s.size for s in sources], default=1)
    probs = np.zeros((len(sources), amax))
    for k, s in enumerate(sources):
        probs[k, : s.size] = s.probs
    lstride = np.zeros((t.n, len(sources)), dtype=np.int64)
    offsets, chunks = [], []
    pos = 0
    for j, r in enumerate(responses):
        inc = t.incident(j)
        expected = tuple(int(sizes[k]) for k in inc)
        if r.table.shape != expected:
            raise ClassicalError(f"party {j + 1} response table has shape {r.table.shape}, expected {expected}")
        stride = 1
        for k in reversed(inc):
            lstride[j, k] = stride
            stride *= int(sizes[k])
        offsets.append(pos)
        chunks.append(r.table.ravel())
        pos += r.table.size
    alphabets = tuple(r.alphabet for r in responses)
    ostride = np.array([math.prod(alphabets[j + 1:]) for j in range(t.n)], dtype=np.int64)
    return sizes, probs, lstride, np.concatenate(chunks), np.array(offsets), ostride, alphabets


def classical_joint(t: NetworkTopology, sources: Sequence[ClassicalSource],
                    responses: Sequence[ResponseTable], use_numba: bool | None = None) -> OutcomeDistribution:
    """P(a) = sum over source tuples of prod_m mu_m(lambda_m) [every party answers a_j]."""
    sizes, probs, lstride, tables, offsets, ostride, alphabets = _layout(t, sources, responses)
    flat = _kernels.enumerate_joint(sizes, probs, lstride, tables, offsets, ostride,
                                    math.prod(alphabets), use_numba=use_numba)
    return OutcomeDistribution(flat.reshape(alphabets), t.parties)


def classical_joint_exact(t: NetworkTopology, sources: Sequence[Sequence[Fraction]],
                          responses: Sequence[ResponseTable]) -> dict[tuple[int, ...], Fraction]:
    """Pure-Python enumeration with rational source probabilities; non-zero entries only."""
    sources = [[Fraction(x) for x in s] for s in sources]
    incident = [t.incident(j) for j in range(t.n)]
    out: dict[tuple[int, ...], Fraction] = {}
    for lam in cartesian(*(range(len(s)) for s in sources)):
        w = Fraction(1)
        for k, v in enumerate(lam):
            w *= sources[k][v]
        if w == 0:
            continue
        a = tuple(int(r.table[tuple(lam[k] for k in inc)]) for r, inc in zip(responses, incident))
        out[a] = out.get(a, Fraction(0)) + w
    return dict(sorted(out.items()))


def triangle_topology() -> NetworkTopology:
    """Sources {1,2}, {2,3}, {1,3} carrying bits x1, x2, x3."""
    return builtin("cycle", 3)


def triangle_wiring(p1: float, p2: float, p3: float):
    for p in (p1, p2, p3):
        if not 0 <= p <= 1:
            raise ClassicalError(f"bit probabilities must lie in [0, 1], got {p}")
    sources = [ClassicalSource([p, 1 - p]) for p in (p1, p2, p3)]
    i, j = np.indices((2, 2))
    # a = x1 + 2 x3, b = 2 x1 + x2, c = 2 x2 + x3; table axes follow source order
    responses = [
        ResponseTable(i + 2 * j, 4),
        ResponseTable(2 * i + j, 4),
        ResponseTable(2 * i + j, 4),
    ]
    return triangle_topology(), sources, responses


def triangle_bits(p1: float, p2: float, p3: float) -> OutcomeDistribution:
    """Triangle of independent bits (P(x_i = 0) = p_i), each party outputs its pair of bits in {0..3}."""
    t, sources, responses = triangle_wiring(p1, p2, p3)
    return classical_joint(t, sources, responses)


def random_classical_network(seed: int, n: int, source_count: int, max_arity: int, max_alphabet: int):
    """Seeded random (topology, sources, responses); deterministic in all arguments."""
    if min(n, max_arity, max_alphabet) < 1 or source_count < 0:
        raise ClassicalError("bounds must be positive")
    if max_alphabet**source_count > MAX_TUPLES:
        raise ClassicalError(f"up to {max_alphabet}^{source_count} source tuples exceeds cap {MAX_TUPLES}")
    rng = np.random.default_rng(seed)
    edges = []
    for _ in range(source_count):
        arity = int(rng.integers(1, min(max_arity, n) + 1))
        edges.append(sorted(int(x) for x in rng.choice(n, size=arity, replace=False)))
    t = from_sources(n, edges)
    sources = []
    for _ in edges:
        size = int(rng.integers(1, max_alphabet + 1))
        sources.append(ClassicalSource(rng.dirichlet(np.ones(size))))
    responses = []
    for j in range(n):
        shape = tuple(sources[k].size for k in t.incident(j))
        alphabet = int(rng.integers(1, max_alphabet + 1))
        responses.append(ResponseTable(rng.integers(0, alphabet, size=shape), alphabet))
    return t, sources, responses


def lift_to_supernetwork(small: NetworkTopology, big: NetworkTopology, sources: Sequence[ClassicalSource],
                         responses: Sequence[ResponseTable]):
    """Re-express a model on ``small`` over ``big`` (which contains all of its sources).

    Extra sources of ``big`` become constant; responses ignore them.
    """
    if not small.is_subnetwork_of(big):
        raise ClassicalError("first network is not a sub-network of the second")
    pool = list(range(len(big.sources)))
    mapping = {}
    for k, src in enumerate(small.sources):
        match = next(b for b in pool if frozenset(big.sources[b]) == frozenset(src))
        pool.remove(match)
        mapping[match] = k
    new_sources = [sources[mapping[b]] if b in mapping else ClassicalSource([1.0])
                   for b in range(len(big.sources))]
    new_responses = []
    for j, r in enumerate(responses):
        inc_big = big.incident(j)
        inc_small = small.incident(j)
        # axes of the small table, expanded with singleton axes for constant sources
        order = [inc_small.index(mapping[b]) for b in inc_big if b in mapping]
        table = np.transpose(r.table, order) if order else r.table
        shape = [new_sources[b].size for b in inc_big]
        new_responses.append(ResponseTable(table.reshape(shape), r.alphabet))
    return new_sources, new_responses


# --- documents ------------------------------------------------------------


def sources_to_document(sources: Sequence[ClassicalSource]) -> dict[str, Any]:
    return {"sources": [s.probs.tolist() for s in sources]}


def parse_sources(document: str | dict | list) -> list[ClassicalSource]:
    if isinstance(document, str):
        document = json.loads(document)
    rows = document.get("sources") if isinstance(document, dict) else document
    if not isinstance(rows, list):
        raise ClassicalError("sources document needs a 'sources' list")
    return [ClassicalSource(r) for r in rows]


def responses_to_document(t: NetworkTopology, responses: Sequence[ResponseTable]) -> dict[str, Any]:
    parties = []
    for j, r in enumerate(responses):
        rows = [{"inputs": list(idx), "outcome": int(r.table[idx])} for idx in np.ndindex(r.table.shape)]
        parties.append({"party": j + 1, "alphabet": r.alphabet, "rows": rows})
    return {"responses": parties}


def parse_responses(document: str | dict, t: NetworkTopology, sources: Sequence[ClassicalSource]) -> list[ResponseTable]:
    """Rows map incident source values (ascending source order) to an outcome; tables must be total."""
    if isinstance(document, str):
        document = json.loads(document)
    entries = document.get("responses") if isinstance(document, dict) else None
    if not isinstance(entries, list) or len(entries) != t.n:
        raise ClassicalError(f"responses document needs one entry per party ({t.n})")
    out = []
    for j, entry in enumerate(entries):
        shape = tuple(sources[k].size for k in t.incident(j))
        table = np.full(shape, -1, dtype=np.int64)
        for row in entry.get("rows", []):
            idx = tuple(int(v) for v in row["inputs"])
            if len(idx) != len(shape) or any(not 0 <= v < s for v, s in zip(idx, shape)):
                raise ClassicalError(f"party {j + 1}: input tuple {idx} does not fit sources {shape}")
            table[idx] = int(row["outcome"])
        if np.any(table < 0):
            raise ClassicalError(f"party {j + 1}: response table is not total")
        alphabet = int(entry.get("alphabet", table.max() + 1))
        out.append(ResponseTable(table, alphabet))
    return out
