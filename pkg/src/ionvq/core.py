"""Mixed-radix registers, statevector kernels and native gates for ion chains
that encode several "virtual" qubits in the internal levels of each ion.

Conventions (fixed throughout the package):

* Levels inside an ion are indexed 0..d-1 in increasing energy, d = 2**n.
* The joint basis is mixed-radix little-endian: ion 0 is the fastest-varying
  digit, so a basis index decomposes as g = sum_i level_i * stride_i with
  stride_0 = 1 and stride_{i+1} = stride_i * d_i.
* An encoding map is a bijection from levels to n-bit labels.  In the default
  ``qubit_order="msb_first"`` virtual qubit 1 (index 0 here) is the most
  significant bit of the label; ``"lsb_first"`` reverses this.  Measurement
  strings concatenate the per-ion labels, ion 0 leftmost.
* The two-level rotation R_ab(theta, phi) acts as cos(theta) on the {a, b}
  subspace with off-diagonal elements -i e^{-i phi} sin(theta) (row a) and
  -i e^{+i phi} sin(theta) (row b), and as the identity elsewhere.
* MS_{ai bi}{aj bj}(J) = exp(-iJ (|ai aj><bi bj| + |ai bj><bi aj| + h.c.))
  on the coupled two-ion subspace and the identity on every component
  outside span{ai, bi} (x) span{aj, bj}.

All operations are pure given (inputs, seed); a statevector is mutated by a
single caller at a time.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

MSB_FIRST = "msb_first"
LSB_FIRST = "lsb_first"


# ---------------------------------------------------------------------------
# encoding maps


@dataclass(frozen=True)
class EncodingMap:
    """Bijection level -> n-bit label, stored as a permutation of 0..d-1."""

    perm: tuple[int, ...]

    def __post_init__(self):
        d = len(self.perm)
        if d < 2 or d & (d - 1):
            raise ValueError(f"encoding size {d} is not a power of two >= 2")
        if sorted(self.perm) != list(range(d)):
            raise ValueError("encoding map is not a bijection on 0..d-1")

    @property
    def d(self) -> int:
        return len(self.perm)

    @property
    def n(self) -> int:
        return self.d.bit_length() - 1

    def label(self, level: int) -> int:
        if not 0 <= level < self.d:
            raise ValueError(f"level {level} out of range for d={self.d}")
        return self.perm[level]

    def level(self, label: int) -> int:
        if not 0 <= label < self.d:
            raise ValueError(f"label {label} out of range for d={self.d}")
        return self.perm.index(label)

    def bits(self, level: int, qubit_order: str = MSB_FIRST) -> str:
        """Label of ``level`` as a bit string, virtual qubit 1 first."""
        s = format(self.label(level), f"0{self.n}b")
        return s if qubit_order == MSB_FIRST else s[::-1]

    def level_of_bits(self, bits: str, qubit_order: str = MSB_FIRST) -> int:
        s = bits if qubit_order == MSB_FIRST else bits[::-1]
        return self.level(int(s, 2))


def identity_map(n: int) -> EncodingMap:
    """Binary encoding: level alpha -> binary digits of alpha (map M1)."""
    return EncodingMap(tuple(range(2**n)))


def m1_map(n: int = 2) -> EncodingMap:
    return identity_map(n)


def m2_map() -> EncodingMap:
    """n=2 map with 0->00, 1->11, 2->01, 3->10."""
    return EncodingMap((0, 3, 1, 2))


# ---------------------------------------------------------------------------
# register


def _norm_pair(pair: Sequence[int]) -> tuple[int, int]:
    a, b = int(pair[0]), int(pair[1])
    if a == b:
        raise ValueError(f"level pair ({a},{b}) must couple distinct levels")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class IonSpec:
    """One ion: level count d (power of two), encoding map and, optionally,
    the set of experimentally allowed two-level couplings.

    ``allowed_r=None`` means every pair may be driven (all-to-all).
    """

    d: int
    encoding: EncodingMap | None = None
    allowed_r: frozenset[tuple[int, int]] | None = None

    def __post_init__(self):
        if self.d < 2 or self.d & (self.d - 1):
            raise ValueError(f"d={self.d} is not a power of two >= 2")
        enc = self.encoding if self.encoding is not None else identity_map(self.n)
        if enc.d != self.d:
            raise ValueError("encoding dimension does not match d")
        object.__setattr__(self, "encoding", enc)
        if self.allowed_r is not None:
            pairs = frozenset(_norm_pair(p) for p in self.allowed_r)
            for a, b in pairs:
                if not (0 <= a < b < self.d):
                    raise ValueError(f"pair ({a},{b}) out of range for d={self.d}")
            if len(pairs) != len(self.allowed_r):
                raise ValueError("duplicate level pairs in allowed_r")
            object.__setattr__(self, "allowed_r", pairs)

    @property
    def n(self) -> int:
        return self.d.bit_length() - 1

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Drivable pairs, sorted; all d(d-1)/2 of them when unrestricted."""
        if self.allowed_r is None:
            return tuple((a, b) for a in range(self.d) for b in range(a + 1, self.d))
        return tuple(sorted(self.allowed_r))

    def allows(self, a: int, b: int) -> bool:
        return self.allowed_r is None or _norm_pair((a, b)) in self.allowed_r

    def is_connected(self) -> bool:
        """True when the coupling graph connects all d levels."""
        adj = {k: set() for k in range(self.d)}
        for a, b in self.pairs():
            adj[a].add(b)
            adj[b].add(a)
        seen, stack = {0}, [0]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == self.d


@dataclass
class Register:
    """Ordered ion chain with mixed-radix indexing and qubit addressing."""

    ions: tuple[IonSpec, ...]
    qubit_order: str = MSB_FIRST

    def __post_init__(self):
        self.ions = tuple(self.ions)
        if not self.ions:
            raise ValueError("register needs at least one ion")
        if self.qubit_order not in (MSB_FIRST, LSB_FIRST):
            raise ValueError(f"unknown qubit_order {self.qubit_order!r}")
        strides = []
        s = 1
        for ion in self.ions:
            strides.append(s)
            s *= ion.d
        self.strides = tuple(strides)
        self.dim = s
        self.num_qubits = sum(ion.n for ion in self.ions)
        self.qubit_offsets = tuple(
            sum(ion.n for ion in self.ions[:i]) for i in range(len(self.ions))
        )
        assert self.dim == 2**self.num_qubits

    @property
    def num_ions(self) -> int:
        return len(self.ions)

    # -- index arithmetic ---------------------------------------------------

    def shape_view(self) -> tuple[int, ...]:
        """Shape for viewing a statevector as an ndarray (ion 0 = last axis)."""
        return tuple(ion.d for ion in reversed(self.ions))

    def axis(self, ion: int) -> int:
        return self.num_ions - 1 - ion

    def levels_of_index(self, g: int) -> tuple[int, ...]:
        return tuple((g // self.strides[i]) % ion.d for i, ion in enumerate(self.ions))

    def index_of_levels(self, levels: Sequence[int]) -> int:
        return sum(lv * st for lv, st in zip(levels, self.strides))

    def qubit_index(self, ion: int, q: int) -> int:
        """Global index of virtual qubit q (0-based) of ``ion``."""
        if not 0 <= q < self.ions[ion].n:
            raise ValueError(f"ion {ion} has no virtual qubit {q}")
        return self.qubit_offsets[ion] + q

    def bitstring(self, g: int) -> str:
        """Measurement label of basis state g: per-ion labels, ion 0 first."""
        return "".join(
            ion.encoding.bits(lv, self.qubit_order)
            for ion, lv in zip(self.ions, self.levels_of_index(g))
        )

    def index_of_bits(self, bits: str) -> int:
        if len(bits) != self.num_qubits:
            raise ValueError("bit string length does not match register")
        levels = []
        for ion, off in zip(self.ions, self.qubit_offsets):
            levels.append(ion.encoding.level_of_bits(bits[off : off + ion.n], self.qubit_order))
        return self.index_of_levels(levels)

    def bit_table(self) -> np.ndarray:
        """bit_table[g, Q] = value of global qubit Q in basis state g."""
        table = np.zeros((self.dim, self.num_qubits), dtype=np.uint8)
        for g in range(self.dim):
            table[g] = [int(c) for c in self.bitstring(g)]
        return table

    # -- (de)serialization ---------------------------------------------------

    def to_config(self) -> dict:
        return {
            "qubit_order": self.qubit_order,
            "ions": [
                {
                    "d": ion.d,
                    "map": list(ion.encoding.perm),
                    "allowed_r": None if ion.allowed_r is None else [list(p) for p in ion.pairs()],
                }
                for ion in self.ions
            ],
        }

    @staticmethod
    def from_config(cfg: dict) -> "Register":
        ions = []
        for ic in cfg["ions"]:
            enc = EncodingMap(tuple(ic["map"])) if ic.get("map") is not None else None
            allowed = ic.get("allowed_r")
            ions.append(
                IonSpec(
                    d=int(ic["d"]),
                    encoding=enc,
                    allowed_r=None if allowed is None else frozenset(map(tuple, allowed)),
                )
            )
        return Register(tuple(ions), cfg.get("qubit_order", MSB_FIRST))


def build_register(specs: Iterable[IonSpec], qubit_order: str = MSB_FIRST) -> Register:
    return Register(tuple(specs), qubit_order)


def load_register(path) -> Register:
    with open(path) as fh:
        return Register.from_config(json.load(fh))


# ---------------------------------------------------------------------------
# native gates


@dataclass(frozen=True)
class R:
    """Two-level rotation R_ab(theta, phi) on one ion; angles in radians."""

    ion: int
    a: int
    b: int
    theta: float
    phi: float = 0.0


@dataclass(frozen=True)
class MS:
    """Molmer-Sorensen coupling of pair_i in ion_i with pair_j in ion_j."""

    ion_i: int
    ion_j: int
    pair_i: tuple[int, int]
    pair_j: tuple[int, int]
    J: float


@dataclass(frozen=True)
class MultiPairMS:
    """MS drive exciting several disjoint pairs per ion simultaneously:
    exp(-iJ Xt_i Xt_j) with Xt = sum of the pair exchange operators."""

    ion_i: int
    ion_j: int
    pairs_i: tuple[tuple[int, int], ...]
    pairs_j: tuple[tuple[int, int], ...]
    J: float


@dataclass(frozen=True)
class GlobalMS:
    """Simultaneous multi-pair MS beatnote on every ion:
    exp(-iJ Xt_0 Xt_1 ... Xt_{L-1})."""

    J: float
    pairs: tuple[tuple[tuple[int, int], ...], ...]


NativeGate = R | MS | MultiPairMS | GlobalMS


def _check_disjoint(pairs: Sequence[tuple[int, int]], d: int, what: str):
    seen: set[int] = set()
    for p in pairs:
        a, b = _norm_pair(p)
        if b >= d:
            raise ValueError(f"{what}: pair ({a},{b}) out of range for d={d}")
        if a in seen or b in seen:
            raise ValueError(f"{what}: pairs must be disjoint within an ion")
        seen.update((a, b))


def validate_gate(gate: NativeGate, reg: Register):
    if isinstance(gate, R):
        ion = reg.ions[gate.ion]
        a, b = _norm_pair((gate.a, gate.b))
        if b >= ion.d:
            raise ValueError(f"R pair ({a},{b}) out of range for ion {gate.ion}")
    elif isinstance(gate, MS):
        if gate.ion_i == gate.ion_j:
            raise ValueError("MS needs two distinct ions")
        _check_disjoint([gate.pair_i], reg.ions[gate.ion_i].d, "MS")
        _check_disjoint([gate.pair_j], reg.ions[gate.ion_j].d, "MS")
    elif isinstance(gate, MultiPairMS):
        if gate.ion_i == gate.ion_j:
            raise ValueError("MultiPairMS needs two distinct ions")
        _check_disjoint(gate.pairs_i, reg.ions[gate.ion_i].d, "MultiPairMS")
        _check_disjoint(gate.pairs_j, reg.ions[gate.ion_j].d, "MultiPairMS")
    elif isinstance(gate, GlobalMS):
        if len(gate.pairs) != reg.num_ions:
            raise ValueError("GlobalMS needs one pair list per ion")
        for i, pl in enumerate(gate.pairs):
            _check_disjoint(pl, reg.ions[i].d, "GlobalMS")
    else:
        raise TypeError(f"unknown native gate {gate!r}")


# ---------------------------------------------------------------------------
# statevector


@dataclass
class StateVector:
    """Dense amplitudes over the register's mixed-radix basis."""

    register: Register
    amps: np.ndarray

    @staticmethod
    def zero(reg: Register) -> "StateVector":
        amps = np.zeros(reg.dim, dtype=np.complex128)
        amps[0] = 1.0
        return StateVector(reg, amps)

    @staticmethod
    def from_levels(reg: Register, levels: Sequence[int]) -> "StateVector":
        amps = np.zeros(reg.dim, dtype=np.complex128)
        amps[reg.index_of_levels(levels)] = 1.0
        return StateVector(reg, amps)

    @staticmethod
    def from_amplitudes(reg: Register, amps: np.ndarray) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(reg.dim)
        return StateVector(reg, amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def _axis_slices(nd: int, axis: int, idx: int):
    sl = [slice(None)] * nd
    sl[axis] = idx
    return tuple(sl)


def _apply_r_nd(view: np.ndarray, axis: int, a: int, b: int, theta: float, phi: float):
    c = math.cos(theta)
    s = math.sin(theta)
    off_ab = -1j * cmath.exp(-1j * phi) * s
    off_ba = -1j * cmath.exp(1j * phi) * s
    ia = _axis_slices(view.ndim, axis, a)
    ib = _axis_slices(view.ndim, axis, b)
    va = view[ia].copy()
    vb = view[ib]
    view[ia] = c * va + off_ab * vb
    view[ib] = off_ba * va + c * vb


def _apply_ms_nd(view, axis_i, axis_j, pair_i, pair_j, J):
    ai, bi = pair_i
    aj, bj = pair_j
    c = math.cos(J)
    s = -1j * math.sin(J)

    def sl(li, lj):
        out = [slice(None)] * view.ndim
        out[axis_i], out[axis_j] = li, lj
        return tuple(out)

    for (p, q) in (((ai, aj), (bi, bj)), ((ai, bj), (bi, aj))):
        vp = view[sl(*p)].copy()
        vq = view[sl(*q)]
        view[sl(*p)] = c * vp + s * vq
        view[sl(*q)] = s * vp + c * vq


def _partner_arrays(reg: Register, per_ion_pairs: dict[int, Sequence[tuple[int, int]]]):
    """Global partner index under the product of per-ion pair exchanges.

    Returns (support mask, partner index array) over the full basis.
    """
    dim = reg.dim
    idx = np.arange(dim)
    partner = np.zeros(dim, dtype=np.int64)
    support = np.ones(dim, dtype=bool)
    for ion, pairs in per_ion_pairs.items():
        d = reg.ions[ion].d
        pmap = np.full(d, -1, dtype=np.int64)
        for a, b in pairs:
            a, b = _norm_pair((a, b))
            pmap[a], pmap[b] = b, a
        lv = (idx // reg.strides[ion]) % d
        support &= pmap[lv] >= 0
        partner += np.where(pmap[lv] >= 0, (pmap[lv] - lv) * reg.strides[ion], 0)
    return support, idx + partner


def _apply_multipair(amps: np.ndarray, reg: Register, per_ion_pairs, J: float):
    support, partner = _partner_arrays(reg, per_ion_pairs)
    c = math.cos(J)
    s = -1j * math.sin(J)
    src = amps[support]
    swapped = amps[partner[support]]
    amps[support] = c * src + s * swapped


def apply_native(state: StateVector, gate: NativeGate) -> StateVector:
    """Apply one native gate in place; returns the state for chaining."""
    reg = state.register
    validate_gate(gate, reg)
    view = state.amps.reshape(reg.shape_view())
    if isinstance(gate, R):
        a, b = _norm_pair((gate.a, gate.b))
        # normalized pair keeps the Eq-pattern phases attached to a < b
        if (gate.a, gate.b) == (a, b):
            _apply_r_nd(view, reg.axis(gate.ion), a, b, gate.theta, gate.phi)
        else:
            _apply_r_nd(view, reg.axis(gate.ion), a, b, gate.theta, -gate.phi)
    elif isinstance(gate, MS):
        _apply_ms_nd(
            view,
            reg.axis(gate.ion_i),
            reg.axis(gate.ion_j),
            _norm_pair(gate.pair_i),
            _norm_pair(gate.pair_j),
            gate.J,
        )
    elif isinstance(gate, MultiPairMS):
        _apply_multipair(
            state.amps,
            reg,
            {gate.ion_i: gate.pairs_i, gate.ion_j: gate.pairs_j},
            gate.J,
        )
    elif isinstance(gate, GlobalMS):
        _apply_multipair(state.amps, reg, dict(enumerate(gate.pairs)), gate.J)
    return state


def apply_circuit(state: StateVector, gates: Iterable[NativeGate]) -> StateVector:
    for g in gates:
        apply_native(state, g)
    return state


def gate_matrix(gate: NativeGate, reg: Register) -> np.ndarray:
    """Dense matrix of a native gate; intended for dim <= a few thousand."""
    validate_gate(gate, reg)
    mat = np.eye(reg.dim, dtype=np.complex128)
    # rows decompose over the mixed-radix basis, columns broadcast
    view = mat.reshape(reg.shape_view() + (reg.dim,))
    if isinstance(gate, R):
        a, b = _norm_pair((gate.a, gate.b))
        phi = gate.phi if (gate.a, gate.b) == (a, b) else -gate.phi
        _apply_r_nd(view, reg.axis(gate.ion), a, b, gate.theta, phi)
    elif isinstance(gate, MS):
        _apply_ms_nd(
            view,
            reg.axis(gate.ion_i),
            reg.axis(gate.ion_j),
            _norm_pair(gate.pair_i),
            _norm_pair(gate.pair_j),
            gate.J,
        )
    else:
        for col in range(reg.dim):
            st = StateVector(reg, mat[:, col].copy())
            apply_native(st, gate)
            mat[:, col] = st.amps
    return mat


def sequence_matrix(
    gates: Sequence[NativeGate], reg: Register, leftmost_applied_first: bool = True
) -> np.ndarray:
    """Product of a gate list; the flag fixes which end acts on the state first."""
    out = np.eye(reg.dim, dtype=np.complex128)
    ordered = gates if leftmost_applied_first else tuple(reversed(gates))
    for g in ordered:
        out = gate_matrix(g, reg) @ out
    return out


# ---------------------------------------------------------------------------
# embedding standard (qubit-space) unitaries through the encoding maps


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=tol))


def embed_standard(U: np.ndarray, targets: Sequence[int], reg: Register) -> np.ndarray:
    """Lift a 2^k-dim unitary on the given global qubits to the level space.

    ``targets[0]`` is the most significant bit of U's index.  The result is
    the exact matrix of the standard gate in the register's level basis and
    serves as the compiler's ground truth.
    """
    U = np.asarray(U, dtype=np.complex128)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError("target qubits must be distinct")
    if U.shape != (2**k, 2**k):
        raise ValueError("unitary dimension does not match target count")
    if not is_unitary(U):
        raise ValueError("embed_standard requires a unitary input")
    bits = reg.bit_table()
    dim = reg.dim
    index_of = {}
    for g in range(dim):
        index_of[tuple(bits[g])] = g
    V = np.zeros((dim, dim), dtype=np.complex128)
    for g in range(dim):
        row = bits[g].copy()
        t_in = 0
        for q in targets:
            t_in = (t_in << 1) | int(row[q])
        for t_out in range(2**k):
            new = row.copy()
            for pos, q in enumerate(targets):
                new[q] = (t_out >> (k - 1 - pos)) & 1
            V[index_of[tuple(new)], g] += U[t_out, t_in]
    return V


# ---------------------------------------------------------------------------
# measurement sampling


def sample_measurement(
    state: StateVector, shots: int, seed: int, chunk_size: int = 65536
) -> dict[str, int]:
    """Sample Z-basis outcomes; counts keyed by encoded bit labels.

    Shots are drawn in fixed chunks with seeds spawned from ``seed`` so that
    serial and chunk-parallel execution aggregate to identical counts.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    norm = state.norm()
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state norm {norm} too far from 1")
    p = state.probabilities()
    p = p / p.sum()
    n_chunks = (shots + chunk_size - 1) // chunk_size
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    total = np.zeros(state.register.dim, dtype=np.int64)
    left = shots
    for child in children:
        m = min(chunk_size, left)
        left -= m
        rng = np.random.default_rng(child)
        total += rng.multinomial(m, p)
    reg = state.register
    return {reg.bitstring(g): int(c) for g, c in enumerate(total) if c}


# ---------------------------------------------------------------------------
# circuits and the one-gate-per-line text format


@dataclass
class Circuit:
    """Ordered native-gate list (applied first-to-last) plus provenance."""

    register: Register
    gates: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def append(self, gate: NativeGate):
        validate_gate(gate, self.register)
        self.gates.append(gate)

    def extend(self, gates: Iterable[NativeGate]):
        for g in gates:
            self.append(g)

    def counts(self) -> dict[str, int]:
        c = {"R": 0, "MS": 0, "MPMS": 0, "GMS": 0}
        for g in self.gates:
            if isinstance(g, R):
                c["R"] += 1
            elif isinstance(g, MS):
                c["MS"] += 1
            elif isinstance(g, MultiPairMS):
                c["MPMS"] += 1
            else:
                c["GMS"] += 1
        return c

    def run(self, state: StateVector | None = None) -> StateVector:
        if state is None:
            state = StateVector.zero(self.register)
        return apply_circuit(state, self.gates)


def format_gate(gate: NativeGate) -> str:
    if isinstance(gate, R):
        return f"R {gate.ion} {gate.a} {gate.b} {gate.theta:.17g} {gate.phi:.17g}"
    if isinstance(gate, MS):
        return (
            f"MS {gate.ion_i} {gate.ion_j} {gate.pair_i[0]} {gate.pair_i[1]} "
            f"{gate.pair_j[0]} {gate.pair_j[1]} {gate.J:.17g}"
        )
    if isinstance(gate, MultiPairMS):
        pi = " ".join(f"{a} {b}" for a, b in gate.pairs_i)
        pj = " ".join(f"{a} {b}" for a, b in gate.pairs_j)
        return (
            f"MPMS {gate.ion_i} {gate.ion_j} {len(gate.pairs_i)} {pi} "
            f"{len(gate.pairs_j)} {pj} {gate.J:.17g}"
        )
    if isinstance(gate, GlobalMS):
        parts = [f"GMS {gate.J:.17g}"]
        for pl in gate.pairs:
            parts.append(str(len(pl)))
            parts.extend(f"{a} {b}" for a, b in pl)
        return " ".join(parts)
    raise TypeError(f"unknown gate {gate!r}")


def format_circuit(circ: Circuit) -> str:
    lines = [f"# ionvq circuit, {len(circ.gates)} gates, angles in radians"]
    for key, val in sorted(circ.meta.items()):
        lines.append(f"# {key}: {val}")
    lines.extend(format_gate(g) for g in circ.gates)
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, reg: Register) -> Circuit:
    circ = Circuit(reg)
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            kind = tok[0].upper()
            if kind == "R":
                gate = R(int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4]), float(tok[5]))
            elif kind == "MS":
                gate = MS(
                    int(tok[1]),
                    int(tok[2]),
                    (int(tok[3]), int(tok[4])),
                    (int(tok[5]), int(tok[6])),
                    float(tok[7]),
                )
            elif kind == "MPMS":
                pos = 3
                ni = int(tok[pos]); pos += 1
                pairs_i = tuple((int(tok[pos + 2 * k]), int(tok[pos + 2 * k + 1])) for k in range(ni))
                pos += 2 * ni
                nj = int(tok[pos]); pos += 1
                pairs_j = tuple((int(tok[pos + 2 * k]), int(tok[pos + 2 * k + 1])) for k in range(nj))
                pos += 2 * nj
                gate = MultiPairMS(int(tok[1]), int(tok[2]), pairs_i, pairs_j, float(tok[pos]))
            elif kind == "GMS":
                J = float(tok[1])
                pos = 2
                pls = []
                for _ in range(reg.num_ions):
                    m = int(tok[pos]); pos += 1
                    pls.append(tuple((int(tok[pos + 2 * k]), int(tok[pos + 2 * k + 1])) for k in range(m)))
                    pos += 2 * m
                gate = GlobalMS(J, tuple(pls))
            else:
                raise ValueError(f"unknown gate kind {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {ln}: cannot parse {raw!r}: {exc}") from exc
        circ.append(gate)
    return circ
