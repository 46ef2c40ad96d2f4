"""Independent reference computations used to cross-check the package."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def _solve(rows, rhs):
    """Exact Gaussian elimination; None if singular."""
    n = len(rows)
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def fis_vertices(t):
    """All vertices of {0 <= s <= 1, sum over each source <= 1}."""
    n = t.n
    one, zero = Fraction(1), Fraction(0)
    cons = []
    for src in t.sources:
        cons.append(([one if j in src else zero for j in range(n)], one))
    for j in range(n):
        e = [one if i == j else zero for i in range(n)]
        cons.append((e, one))
        cons.append(([-x for x in e], zero))
    verts = set()
    for combo in itertools.combinations(cons, n):
        x = _solve([c[0] for c in combo], [c[1] for c in combo])
        if x is None:
            continue
        if all(sum(a * b for a, b in zip(row, x)) <= b for row, b in cons):
            verts.add(tuple(x))
    return sorted(verts)


def lp_oracle(t, objective=None):
    """Lexicographic maximiser of (objective . s, s_1, s_2, ...) by vertex enumeration."""
    c = [Fraction(1)] * t.n if objective is None else [Fraction(x) for x in objective]
    return max(fis_vertices(t), key=lambda v: (sum(a * b for a, b in zip(c, v)),) + v)


def naive_born(state, bases):
    """P(a) = <phi_a| rho |phi_a> with rho the full Kronecker product; loops over outcomes."""
    rho = np.ones((1, 1), dtype=complex)
    dims = []
    for c in state.components:
        rho = np.kron(rho, c.rho)
        dims.extend(c.dims)
    # global position of (component, subsystem)
    pos, k = {}, 0
    for ci, c in enumerate(state.components):
        for si in range(len(c.dims)):
            pos[ci, si] = k
            k += 1
    order = []
    for j in range(state.n):
        order.extend(pos[cs] for cs in state.party_subsystems(j))
    perm = np.argsort(order)
    shape_by_party = [dims[p] for p in order]
    sizes = [b.dim for b in bases]
    out = np.zeros(sizes)
    for a in itertools.product(*(range(s) for s in sizes)):
        phi = np.ones(1, dtype=complex)
        for j, x in enumerate(a):
            phi = np.kron(phi, bases[j].vectors[x])
        phi = phi.reshape(shape_by_party).transpose(perm).ravel()
        out[a] = np.real(phi.conj() @ rho @ phi)
    return out


def naive_classical(t, sources, responses):
    sizes = [s.size for s in sources]
    out = np.zeros(tuple(r.alphabet for r in responses))
    for lam in itertools.product(*(range(s) for s in sizes)):
        w = 1.0
        for k, v in enumerate(lam):
            w *= sources[k].probs[v]
        a = tuple(int(r.table[tuple(lam[k] for k in t.incident(j))]) for j, r in enumerate(responses))
        out[a] += w
    return out


def swapping_table(t1, t2):
    c1, s1, c2, s2 = math.cos(t1) ** 2, math.sin(t1) ** 2, math.cos(t2) ** 2, math.sin(t2) ** 2
    return {(0, 0, 0): c1 * c2, (0, 1, 1): c1 * s2, (1, 2, 0): s1 * c2, (1, 3, 1): s1 * s2}


def triangle_gamma_table(theta, gamma):
    """Joint-measurement triangle table; (2,0,2) sits with (1,1,0) and (0,2,1)."""
    c, s = math.cos(theta) ** 2, math.sin(theta) ** 2
    cg, sg = math.cos(gamma) ** 2, math.sin(gamma) ** 2
    groups = [
        (c**3, [(0, 0, 0)]),
        (sg**2 * c**2 * s, [(1, 1, 0), (0, 2, 1), (2, 0, 2)]),
        (sg * cg * c**2 * s, [(1, 2, 0), (2, 1, 0), (0, 2, 2), (2, 0, 1), (0, 1, 1), (1, 0, 2)]),
        (cg**2 * c**2 * s, [(2, 2, 0), (0, 1, 2), (1, 0, 1)]),
        (sg**2 * c * s**2, [(1, 3, 1), (3, 1, 2), (2, 2, 3)]),
        (sg * cg * c * s**2, [(2, 3, 1), (2, 1, 3), (3, 1, 1), (1, 3, 2), (3, 2, 2), (1, 2, 3)]),
        (cg**2 * c * s**2, [(3, 2, 1), (2, 3, 2), (1, 1, 3)]),
        (s**3, [(3, 3, 3)]),
    ]
    return {a: p for p, outs in groups for a in outs}
