"""Fractional independent sets: exponent vectors for configuration inequalities.

A weight vector ``s`` is admissible for a topology when ``0 <= s_j <= 1`` and
the weights of the parties attached to each source sum to at most one.  All
arithmetic here is exact (``fractions.Fraction``); floats only appear once
weights are used as exponents in :mod:`netcfg.inequality`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .topology import NetworkTopology, TopologyError, builtin

MAX_LP_PARTIES = 12

ZERO = Fraction(0)
ONE = Fraction(1)


class FisError(ValueError):
    """Invalid parameters or weight assignments."""


@dataclass(frozen=True)
class FractionalWeights:
    weights: tuple[Fraction, ...]
    provenance: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weights)

    def render(self) -> str:
        return render_weights(self.weights)

    def total(self, objective: Sequence[Fraction] | None = None) -> Fraction:
        if objective is None:
            return sum(self.weights, ZERO)
        return sum((Fraction(c) * w for c, w in zip(objective, self.weights)), ZERO)


def render_weights(weights: Iterable) -> str:
    return " ".join(str(Fraction(w)) for w in weights)


def parse_rational(text: str, max_denominator: int = 10**6) -> Fraction:
    """Parse "p/q" exactly; decimals are rounded to a nearby rational."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    value = Fraction(text)
    if value.denominator > max_denominator:
        value = value.limit_denominator(max_denominator)
    return value


def is_valid_fis(t: NetworkTopology, w: FractionalWeights | Sequence) -> bool:
    """Exact check of the fractional-independent-set constraints on ``t``."""
    weights = tuple(Fraction(x) for x in w)
    if len(weights) != t.n:
        raise FisError(f"weight vector has length {len(weights)}, network has {t.n} parties")
    if any(x < 0 or x > 1 for x in weights):
        return False
    return all(sum((weights[j] for j in src), ZERO) <= 1 for src in t.sources)


def violated_sources(t: NetworkTopology, w: Sequence) -> list[int]:
    weights = [Fraction(x) for x in w]
    return [k for k, src in enumerate(t.sources) if sum((weights[j] for j in src), ZERO) > 1]


def _require_valid(t: NetworkTopology, weights, provenance: str) -> FractionalWeights:
    fw = FractionalWeights(tuple(weights), provenance)
    if not is_valid_fis(t, fw):
        bad = ", ".join(str(k + 1) for k in violated_sources(t, fw.weights)) or "bounds"
        raise FisError(f"{provenance} weights {fw.render()} violate source constraint(s) {bad}")
    return fw


def fis_greedy(t: NetworkTopology) -> FractionalWeights:
    """Each m-ary source offers 1/m; each party takes the smallest offer it sees.

    Parties without any source get weight 1.
    """
    offer = [Fraction(1, len(src)) for src in t.sources]
    weights = []
    for j in range(t.n):
        incident = [offer[k] for k in t.incident(j)]
        weights.append(min(incident) if incident else ONE)
    return _require_valid(t, weights, "greedy")


def fis_decomposed(t: NetworkTopology, per_source: Sequence[Sequence]) -> FractionalWeights:
    """Per-source assignments, combined by taking each party's minimum.

    ``per_source[k]`` lists one value per party of source ``k`` in the
    source's own party order; the values of a source must sum to at most 1.
    """
    if len(per_source) != len(t.sources):
        raise FisError(f"expected {len(t.sources)} per-source assignments, got {len(per_source)}")
    offers: list[list[Fraction]] = [[] for _ in range(t.n)]
    for k, (src, values) in enumerate(zip(t.sources, per_source)):
        values = [Fraction(v) for v in values]
        if len(values) != len(src):
            raise FisError(f"source {k + 1} has {len(src)} parties but {len(values)} values")
        if any(v < 0 for v in values):
            raise FisError(f"source {k + 1} assignment has a negative value")
        if sum(values, ZERO) > 1:
            raise FisError(f"source {k + 1} assignment sums to {sum(values, ZERO)} > 1")
        for j, v in zip(src, values):
            offers[j].append(v)
    weights = [min(o) if o else ONE for o in offers]
    return _require_valid(t, weights, "decomposed")


def uniform_assignment(t: NetworkTopology) -> list[list[Fraction]]:
    return [[Fraction(1, len(src))] * len(src) for src in t.sources]


def _check_mk(m: int, k: int) -> None:
    if m < 2:
        raise FisError(f"m must be >= 2, got {m}")
    if not 1 <= k <= m - 1:
        raise FisError(f"k must satisfy 1 <= k <= m-1, got k={k}, m={m}")


def _alternating(n: int, odd: Fraction, even: Fraction) -> list[Fraction]:
    # positions are 1-based: party 1 is odd
    return [odd if j % 2 == 0 else even for j in range(n)]


def fis_family(kind: str, n: int, m: int, k: int = 1, variant: str = "a",
               arity: int | None = None) -> FractionalWeights:
    """Parametric weights for the named families.

    chain/cycle, variant ``a``: (k, m-k, k, ...)/m for even n and
    (m-k, k, ..., m-k)/m for odd n.  Variant ``b``: (m-k, k, ..., k)/m for
    even n and (m-k, k, ..., m-k, k, k)/m for odd n, which needs 2k <= m.
    star: variant ``a`` gives leaves k/m and hub (m-k)/m, ``b`` swaps them.
    complete: every party gets 1/m (``k`` unused; source arity defaults to m).
    """
    if variant not in ("a", "b"):
        raise FisError(f"variant must be 'a' or 'b', got {variant!r}")
    if kind == "complete":
        if m < 2:
            raise FisError(f"m must be >= 2, got {m}")
        arity = m if arity is None else arity
        if arity > m:
            raise FisError(f"weights 1/{m} cannot cover sources of arity {arity}")
        weights = [Fraction(1, m)] * n
        tag = f"family(complete,m={m})"
        return _require_valid(_family_topology("complete", n, arity), weights, tag)
    _check_mk(m, k)
    big, small = Fraction(m - k, m), Fraction(k, m)
    if kind in ("chain", "cycle"):
        if variant == "a":
            weights = _alternating(n, small, big) if n % 2 == 0 else _alternating(n, big, small)
        else:
            if n % 2 == 0:
                weights = _alternating(n, big, small)
            else:
                if 2 * k > m:
                    raise FisError(f"odd-n {kind} variant b needs 2k <= m, got k={k}, m={m}")
                weights = _alternating(n, big, small)
                weights[-1] = small
    elif kind == "star":
        leaf, hub = (small, big) if variant == "a" else (big, small)
        weights = [leaf] * (n - 1) + [hub]
    else:
        raise FisError(f"unknown family {kind!r}")
    tag = f"family({kind},m={m},k={k},{variant})"
    return _require_valid(_family_topology(kind, n), weights, tag)


def _family_topology(kind: str, n: int, arity: int = 2) -> NetworkTopology:
    try:
        return builtin(kind, n, arity)
    except TopologyError as exc:
        raise FisError(str(exc)) from exc


FACET_VARIANTS = {
    "chain": ("even_parties", "odd_parties"),
    "cycle": ("even_parties", "odd_parties"),
    "star": ("hub", "leaves"),
}


def facet_weights(kind: str, n: int, variant: str) -> FractionalWeights:
    """0/1 weights: the large-m limit of :func:`fis_family` with k fixed."""
    if kind not in FACET_VARIANTS or variant not in FACET_VARIANTS[kind]:
        raise FisError(f"facet variant {variant!r} is not available for {kind!r}")
    if kind == "star":
        weights = [ZERO] * (n - 1) + [ONE] if variant == "hub" else [ONE] * (n - 1) + [ZERO]
    else:
        on_odd = variant == "odd_parties"
        weights = [ONE if (j % 2 == 0) == on_odd else ZERO for j in range(n)]
    return _require_valid(_family_topology(kind, n), weights, f"facet({kind},{variant})")


# --- exact LP -------------------------------------------------------------


class _Tableau:
    """Dense simplex tableau over Fractions for max c.x, Ax <= b, x >= 0, b >= 0."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction]):
        rows, cols = len(A), len(A[0]) if A else 0
        self.ncols = cols + rows
        self.T = [list(A[i]) + [ONE if r == i else ZERO for r in range(rows)] for i in range(rows)]
        self.rhs = list(b)
        self.basis = [cols + i for i in range(rows)]
        self.blocked: set[int] = set()

    def reduced_costs(self, c: list[Fraction]) -> list[Fraction]:
        full = list(c) + [ZERO] * (self.ncols - len(c))
        red = list(full)
        for i, bj in enumerate(self.basis):
            cb = full[bj]
            if cb:
                row = self.T[i]
                for j in range(self.ncols):
                    if row[j]:
                        red[j] -= cb * row[j]
        return red

    def pivot(self, r: int, col: int) -> None:
        piv = self.T[r][col]
        self.T[r] = [x / piv for x in self.T[r]]
        self.rhs[r] /= piv
        for i in range(len(self.T)):
            if i != r and self.T[i][col]:
                f = self.T[i][col]
                self.T[i] = [x - f * y for x, y in zip(self.T[i], self.T[r])]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def maximize(self, c: list[Fraction]) -> list[Fraction]:
        """Bland's rule; returns the final reduced costs."""
        while True:
            red = self.reduced_costs(c)
            entering = next(
                (j for j in range(self.ncols) if red[j] > 0 and j not in self.blocked), None
            )
            if entering is None:
                return red
            best = None
            for i, row in enumerate(self.T):
                if row[entering] > 0:
                    ratio = self.rhs[i] / row[entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise FisError("LP is unbounded")  # cannot happen with s <= 1
            self.pivot(best[1], entering)

    def solution(self, nvars: int) -> list[Fraction]:
        x = [ZERO] * nvars
        for i, bj in enumerate(self.basis):
            if bj < nvars:
                x[bj] = self.rhs[i]
        return x


def fis_optimal(t: NetworkTopology, objective: Sequence | None = None) -> FractionalWeights:
    """Maximise ``objective . s`` over admissible weights, exactly.

    Ties are broken lexicographically (larger s_1 first, then s_2, ...):
    after each stage, columns with non-zero reduced cost are frozen at zero,
    which keeps the search on the optimal face.
    """
    n = t.n
    if n > MAX_LP_PARTIES:
        raise FisError(f"exact LP is capped at {MAX_LP_PARTIES} parties, network has {n}")
    c = [ONE] * n if objective is None else [Fraction(x) for x in objective]
    if len(c) != n:
        raise FisError(f"objective has length {len(c)}, network has {n} parties")
    if any(x < 0 for x in c):
        raise FisError("objective entries must be non-negative")
    A, b = [], []
    for src in t.sources:
        A.append([ONE if j in src else ZERO for j in range(n)])
        b.append(ONE)
    for j in range(n):
        A.append([ONE if i == j else ZERO for i in range(n)])
        b.append(ONE)
    tab = _Tableau(A, b)
    stages = [c] + [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    for stage in stages:
        red = tab.maximize(stage)
        tab.blocked.update(j for j in range(tab.ncols) if red[j] != 0)
    weights = tab.solution(n)
    return _require_valid(t, weights, "optimal")
