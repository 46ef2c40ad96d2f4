"""Small quantum networks: components, assembly, projective bases, Born rule.

Qubit order inside a component is big-endian: in ``|abc>`` the first label
belongs to subsystem 0.  A party holding several subsystems measures their
product space, flattened in ascending (component, subsystem) order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .distribution import OutcomeDistribution
from .topology import NetworkTopology, default_names

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-9
GRAM_TOL = 1e-9
CLAMP_TOL = 1e-12
MAX_TOTAL_DIM = 2**14


class QuantumError(ValueError):
    """Invalid state, basis or assignment."""


@dataclass(frozen=True, eq=False)
class QuantumComponent:
    rho: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise QuantumError(f"invalid subsystem dims {dims}")
        rho = np.asarray(self.rho, dtype=np.complex128)
        D = math.prod(dims)
        if rho.shape != (D, D):
            raise QuantumError(f"density matrix shape {rho.shape} does not match dims {dims}")
        if np.max(np.abs(rho - rho.conj().T)) > HERM_TOL:
            raise QuantumError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > TRACE_TOL:
            raise QuantumError(f"density matrix has trace {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise QuantumError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


def _from_vector(vec, dims, check_norm: bool) -> QuantumComponent:
    vec = np.asarray(vec, dtype=np.complex128).ravel()
    norm = np.linalg.norm(vec)
    if check_norm and abs(norm - 1) > NORM_TOL:
        raise QuantumError(f"state vector has norm {norm!r}, expected 1")
    vec = vec / norm
    return QuantumComponent(np.outer(vec, vec.conj()), dims)


def _basis_state(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1
    return v


def ghz(theta: float, n: int = 3) -> QuantumComponent:
    if n < 2:
        raise QuantumError("ghz needs at least 2 qubits")
    v = math.cos(theta) * _basis_state("0" * n) + math.sin(theta) * _basis_state("1" * n)
    return _from_vector(v, (2,) * n, check_norm=False)


def epr(theta: float) -> QuantumComponent:
    return ghz(theta, 2)


def w3(theta: float, gamma: float) -> QuantumComponent:
    c, s = math.cos(gamma), math.sin(gamma)
    v = (math.cos(theta) * c * _basis_state("001") + math.sin(theta) * c * _basis_state("010")
         + s * _basis_state("100"))
    return _from_vector(v, (2, 2, 2), check_norm=False)


def w_state(alphas: Sequence[float]) -> QuantumComponent:
    """sum_i alpha_i |e_i>, where alpha_1 excites the last qubit."""
    n = len(alphas)
    if n < 2:
        raise QuantumError("wN needs at least 2 amplitudes")
    v = np.zeros(2**n, dtype=np.complex128)
    for i, a in enumerate(alphas):
        v[1 << i] = a
    return _from_vector(v, (2,) * n, check_norm=True)


def acin(alphas: Sequence[float], phi: float = 0.0) -> QuantumComponent:
    """a0|000> + a1 e^{i phi}|100> + a2|101> + a3|110> + a4|111>."""
    if len(alphas) != 5:
        raise QuantumError("acin needs five amplitudes")
    a0, a1, a2, a3, a4 = alphas
    v = (a0 * _basis_state("000") + a1 * np.exp(1j * phi) * _basis_state("100")
         + a2 * _basis_state("101") + a3 * _basis_state("110") + a4 * _basis_state("111"))
    return _from_vector(v, (2, 2, 2), check_norm=True)


def product(vectors: Sequence[Sequence[complex]]) -> QuantumComponent:
    v = np.ones(1, dtype=np.complex128)
    dims = []
    for x in vectors:
        x = np.asarray(x, dtype=np.complex128)
        if abs(np.linalg.norm(x) - 1) > NORM_TOL:
            raise QuantumError("product factors must be normalized")
        v = np.kron(v, x)
        dims.append(len(x))
    return _from_vector(v, tuple(dims), check_norm=False)


def custom(data, dims: Sequence[int] | None = None) -> QuantumComponent:
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim == 1:
        dims = tuple(dims) if dims else (arr.shape[0],)
        return _from_vector(arr, dims, check_norm=True)
    dims = tuple(dims) if dims else (arr.shape[0],)
    return QuantumComponent(arr, dims)


def make_state(family: str, params: dict[str, Any] | None = None) -> QuantumComponent:
    p = dict(params or {})
    try:
        if family == "ghz":
            return ghz(p["theta"], p.get("n", 3))
        if family == "epr":
            return epr(p["theta"])
        if family == "w3":
            return w3(p["theta"], p["gamma"])
        if family == "wN":
            return w_state(p["alphas"])
        if family == "acin":
            return acin(p["alphas"], p.get("phi", 0.0))
        if family == "product":
            return product(p["vectors"])
        if family == "custom":
            data = p["matrix"] if "matrix" in p else p["vector"]
            return custom(data, p.get("dims"))
    except KeyError as exc:
        raise QuantumError(f"state family {family!r} is missing parameter {exc}") from exc
    raise QuantumError(f"unknown state family {family!r}")


def add_noise(c: QuantumComponent, v: float) -> QuantumComponent:
    if not 0 <= v <= 1:
        raise QuantumError(f"visibility must lie in [0, 1], got {v}")
    if v == 1:
        return c
    mixed = np.eye(c.dim) / c.dim
    return QuantumComponent(v * c.rho + (1 - v) * mixed, c.dims)


@dataclass(frozen=True, eq=False)
class NetworkQuantumState:
    components: tuple[QuantumComponent, ...]
    assignment: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def total_dim(self) -> int:
        return math.prod(c.dim for c in self.components)

    def party_subsystems(self, party: int) -> list[tuple[int, int]]:
        return [(ci, si) for ci, owners in enumerate(self.assignment)
                for si, j in enumerate(owners) if j == party]

    @property
    def party_dims(self) -> tuple[int, ...]:
        return tuple(
            math.prod(self.components[ci].dims[si] for ci, si in self.party_subsystems(j))
            for j in range(self.n)
        )

    @property
    def topology(self) -> NetworkTopology:
        sources = [sorted(set(owners)) for owners in self.assignment]
        return NetworkTopology(self.names, tuple(tuple(s) for s in sources), self.party_dims).check()

    def is_pure(self, tol: float = 1e-9) -> bool:
        return all(c.purity() >= 1 - tol for c in self.components)


def assemble(components: Sequence[QuantumComponent], assignment: Sequence[Sequence[int]],
             names: Sequence[str] | None = None) -> NetworkQuantumState:
    """``assignment[c][s]`` is the 0-based party owning subsystem ``s`` of component ``c``."""
    components = tuple(components)
    if len(assignment) != len(components):
        raise QuantumError(f"{len(assignment)} assignments for {len(components)} components")
    owners = []
    for ci, (c, a) in enumerate(zip(components, assignment)):
        a = tuple(int(j) for j in a)
        if len(a) != len(c.dims):
            raise QuantumError(
                f"component {ci + 1} has {len(c.dims)} subsystems but {len(a)} are assigned"
            )
        if any(j < 0 for j in a):
            raise QuantumError(f"component {ci + 1} has a negative party index")
        owners.append(a)
    n = max((max(a) for a in owners if a), default=-1) + 1
    if names is not None:
        if len(names) < n:
            raise QuantumError(f"assignment references party {n} but only {len(names)} names given")
        n = len(names)
    names = tuple(names) if names is not None else tuple(default_names(n))
    if n == 0:
        raise QuantumError("network has no parties")
    total = math.prod(c.dim for c in components)
    if total > MAX_TOTAL_DIM:
        raise QuantumError(f"total dimension {total} exceeds cap {MAX_TOTAL_DIM}")
    return NetworkQuantumState(components, tuple(owners), names)


# --- measurement bases ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Rows are the basis vectors; outcome ``a`` is row ``a``."""

    vectors: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.complex128)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise QuantumError(f"basis must be a complete square set of vectors, got shape {vecs.shape}")
        gram = vecs.conj() @ vecs.T
        dev = np.max(np.abs(gram - np.eye(vecs.shape[0])))
        if dev > GRAM_TOL:
            raise QuantumError(f"basis is not orthonormal (Gram deviation {dev:.3g})")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


def computational(dim: int) -> MeasurementBasis:
    return MeasurementBasis(np.eye(dim), "computational")


def bell2() -> MeasurementBasis:
    r = 1 / math.sqrt(2)
    return MeasurementBasis(
        [[r, 0, 0, r], [0, r, r, 0], [0, r, -r, 0], [r, 0, 0, -r]], "bell2"
    )


def gamma_basis(gamma: float) -> MeasurementBasis:
    c, s = math.cos(gamma), math.sin(gamma)
    return MeasurementBasis([[1, 0, 0, 0], [0, c, s, 0], [0, s, -c, 0], [0, 0, 0, 1]], "gamma")


def star_ghz_basis(qubits: int) -> MeasurementBasis:
    """(|i> + |D-1-i>)/sqrt2 at index i and (|i> - |D-1-i>)/sqrt2 at D/2 + i."""
    if qubits < 1:
        raise QuantumError("star_ghz basis needs at least one qubit")
    D = 2**qubits
    half = D // 2
    r = 1 / math.sqrt(2)
    vecs = np.zeros((D, D))
    for i in range(half):
        vecs[i, i] = vecs[i, D - 1 - i] = r
        vecs[half + i, i] = r
        vecs[half + i, D - 1 - i] = -r
    return MeasurementBasis(vecs, "star_ghz")


def rotated(U) -> MeasurementBasis:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise QuantumError("rotation must be a square matrix")
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > GRAM_TOL:
        raise QuantumError(f"rotation is not unitary (deviation {dev:.3g})")
    # vector a is U|a>, the a-th column
    return MeasurementBasis(U.T, "rotated")


def make_basis(kind: str, dim: int, params: dict[str, Any] | None = None) -> MeasurementBasis:
    p = dict(params or {})
    if kind == "computational":
        basis = computational(dim)
    elif kind == "bell2":
        basis = bell2()
    elif kind == "gamma":
        basis = gamma_basis(p["gamma"])
    elif kind == "star_ghz":
        q = int(round(math.log2(dim))) if dim > 1 else 0
        basis = star_ghz_basis(q)
    elif kind == "rotated":
        basis = rotated(p["unitary"])
    elif kind == "custom":
        basis = MeasurementBasis(p["vectors"])
    else:
        raise QuantumError(f"unknown basis kind {kind!r}")
    if basis.dim != dim:
        raise QuantumError(f"{kind} basis has dimension {basis.dim}, party needs {dim}")
    return basis


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# --- Born rule ------------------------------------------------------------


def born_table(s: NetworkQuantumState, bases: Sequence[MeasurementBasis]) -> np.ndarray:
    """tr(M_a1 x ... x M_an rho) as a raw real array, before clamping."""
    if len(bases) != s.n:
        raise QuantumError(f"{len(bases)} bases for {s.n} parties")
    pdims = s.party_dims
    for j, (b, d) in enumerate(zip(bases, pdims)):
        if b.dim != d:
            raise QuantumError(f"party {j + 1} has local dimension {d}, basis has {b.dim}")
    label = iter(range(10**6))
    ket, bra = {}, {}
    operands: list[Any] = []
    for ci, c in enumerate(s.components):
        for si in range(len(c.dims)):
            ket[ci, si], bra[ci, si] = next(label), next(label)
        tensor = c.rho.reshape(c.dims + c.dims)
        operands += [tensor, [ket[ci, si] for si in range(len(c.dims))]
                     + [bra[ci, si] for si in range(len(c.dims))]]
    outs = []
    for j, b in enumerate(bases):
        subs = s.party_subsystems(j)
        out = next(label)
        outs.append(out)
        shape = (b.dim,) + tuple(s.components[ci].dims[si] for ci, si in subs)
        vec = b.vectors.reshape(shape)
        operands += [vec.conj(), [out] + [ket[k] for k in subs]]
        operands += [vec, [out] + [bra[k] for k in subs]]
    table = np.einsum(*operands, outs, optimize="greedy")
    return np.real(table)


def born_distribution(s: NetworkQuantumState, bases: Sequence[MeasurementBasis]) -> OutcomeDistribution:
    table = born_table(s, bases)
    low = table.min()
    if low < -CLAMP_TOL:
        raise QuantumError(f"Born probability {low!r} is negative beyond clamp tolerance")
    table = np.where(table < 0, 0.0, table)
    return OutcomeDistribution(table, s.names)


def computational_bases(s: NetworkQuantumState) -> list[MeasurementBasis]:
    return [computational(d) for d in s.party_dims]


# --- documents ------------------------------------------------------------


def _complex_array(data, ndim: int) -> np.ndarray:
    """Real arrays of rank ``ndim``, or rank ``ndim + 1`` with trailing [re, im] pairs."""
    try:
        arr = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise QuantumError(f"cannot read numeric array: {exc}") from exc
    if arr.ndim == ndim:
        return arr.astype(np.complex128)
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise QuantumError(f"expected a rank-{ndim} array (optionally of [re, im] pairs), got shape {arr.shape}")


def _encode_complex_array(arr: np.ndarray):
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [_encode_complex_array(row) for row in arr]


def parse_state(document: str | dict | list) -> NetworkQuantumState:
    """State document: {"parties": [...], "components": [{family, params, dims, assignment, visibility}]}.

    ``assignment`` lists 1-based party indices, one per subsystem.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise QuantumError(f"state document is not valid JSON: {exc}") from exc
    if isinstance(document, list):
        document = {"components": document}
    if not isinstance(document, dict) or not isinstance(document.get("components"), list):
        raise QuantumError("state document needs a 'components' list")
    comps, owners = [], []
    for k, entry in enumerate(document["components"]):
        if not isinstance(entry, dict) or "family" not in entry or "assignment" not in entry:
            raise QuantumError(f"component {k + 1} needs 'family' and 'assignment'")
        params = dict(entry.get("params", {}))
        family = entry["family"]
        if family == "custom":
            key = "matrix" if "matrix" in params else "vector"
            if key not in params:
                raise QuantumError(f"component {k + 1}: custom state needs 'vector' or 'matrix'")
            params[key] = _complex_array(params[key], 2 if key == "matrix" else 1)
            params.setdefault("dims", entry.get("dims"))
        elif family == "product":
            params["vectors"] = [_complex_array(v, 1) for v in params.get("vectors", [])]
        c = make_state(family, params)
        if "dims" in entry and entry["dims"] is not None and tuple(entry["dims"]) != c.dims:
            raise QuantumError(f"component {k + 1}: dims {entry['dims']} do not match state {list(c.dims)}")
        if "visibility" in entry:
            c = add_noise(c, float(entry["visibility"]))
        assignment = entry["assignment"]
        if not all(isinstance(j, int) and j >= 1 for j in assignment):
            raise QuantumError(f"component {k + 1}: assignment must list 1-based party indices")
        comps.append(c)
        owners.append([j - 1 for j in assignment])
    return assemble(comps, owners, document.get("parties"))


def load_state(path) -> NetworkQuantumState:
    with open(path, encoding="utf-8") as fh:
        return parse_state(fh.read())


def basis_to_document(b: MeasurementBasis) -> dict[str, Any]:
    return {"kind": "custom", "vectors": _encode_complex_array(b.vectors)}


def parse_bases(document: str | dict | list, party_dims: Sequence[int]) -> list[MeasurementBasis]:
    """Basis document: {"bases": [per party {"kind", "params"} or {"vectors"}]}."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise QuantumError(f"basis document is not valid JSON: {exc}") from exc
    entries = document.get("bases") if isinstance(document, dict) else document
    if not isinstance(entries, list):
        raise QuantumError("basis document needs a 'bases' list")
    if len(entries) != len(party_dims):
        raise QuantumError(f"{len(entries)} bases for {len(party_dims)} parties")
    out = []
    for j, (entry, d) in enumerate(zip(entries, party_dims)):
        if isinstance(entry, str):
            entry = {"kind": entry}
        if not isinstance(entry, dict):
            raise QuantumError(f"basis {j + 1} must be an object")
        params = dict(entry.get("params", {}))
        kind = entry.get("kind", "custom" if "vectors" in entry else "computational")
        if "vectors" in entry:
            params["vectors"] = _complex_array(entry["vectors"], 2)
        if "unitary" in params:
            params["unitary"] = _complex_array(params["unitary"], 2)
        try:
            out.append(make_basis(kind, d, params))
        except KeyError as exc:
            raise QuantumError(f"basis {j + 1} ({kind}) is missing parameter {exc}") from exc
    return out


def load_bases(path, party_dims: Sequence[int]) -> list[MeasurementBasis]:
    with open(path, encoding="utf-8") as fh:
        return parse_bases(fh.read(), party_dims)
