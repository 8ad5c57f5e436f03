import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ionvq.core import (
    MS,
    EncodingMap,
    GlobalMS,
    IonSpec,
    MultiPairMS,
    R,
    StateVector,
    apply_native,
    build_register,
    embed_standard,
    format_circuit,
    gate_matrix,
    identity_map,
    m1_map,
    m2_map,
    parse_circuit,
    sample_measurement,
    sequence_matrix,
    Circuit,
)
from ionvq.standard import cnot_on, pauli_string


def test_register_dims():
    reg = build_register([IonSpec(4), IonSpec(2)])
    assert reg.dim == 8 and reg.num_qubits == 3
    assert build_register([IonSpec(2)]).num_qubits == 1
    reg16 = build_register([IonSpec(4) for _ in range(8)])
    assert reg16.dim == 65536 and reg16.num_qubits == 16


def test_register_rejects_bad_specs():
    with pytest.raises(ValueError):
        IonSpec(3)
    with pytest.raises(ValueError):
        IonSpec(4, allowed_r=frozenset({(0, 4)}))
    with pytest.raises(ValueError):
        IonSpec(4, allowed_r=frozenset({(2, 2)}))


def test_encoding_maps():
    m1 = m1_map()
    assert m1.bits(2) == "10"
    m2 = m2_map()
    assert m2.bits(1) == "11"
    assert m2.bits(2) == "01" and m2.bits(3) == "10"
    assert identity_map(1).bits(1) == "1"
    # lsb_first flips the read-out order of the same label
    assert m1.bits(2, "lsb_first") == "01"


@given(st.integers(1, 3), st.integers(0, 200))
def test_encoding_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    perm = tuple(int(v) for v in rng.permutation(2**n))
    enc = EncodingMap(perm)
    for level in range(2**n):
        for order in ("msb_first", "lsb_first"):
            assert enc.level_of_bits(enc.bits(level, order), order) == level


def test_r_gate_matches_gate_law(reg_n2):
    th, ph = 0.3, 0.7
    m = gate_matrix(R(0, 0, 1, th, ph), reg_n2)
    assert abs(m[0, 0] - math.cos(th)) < 1e-15
    assert abs(m[0, 1] - (-1j * np.exp(-1j * ph) * math.sin(th))) < 1e-15
    assert abs(m[1, 0] - (-1j * np.exp(1j * ph) * math.sin(th))) < 1e-15
    assert m[2, 2] == 1 and m[3, 3] == 1 and m[2, 3] == 0


def test_r_identity_at_zero_theta(reg_n2, rng):
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    st_ = StateVector.from_amplitudes(reg_n2, amps)
    apply_native(st_, R(0, 0, 1, 0.0, 1.234))
    assert np.allclose(st_.amps, amps)


def test_r_ghz_on_paired_encoding():
    # R01(pi/4, -pi/2) on |00> under the 0->00, 1->11 map entangles both qubits
    reg = build_register([IonSpec(4, m2_map())])
    st_ = StateVector.zero(reg)
    apply_native(st_, R(0, 0, 1, math.pi / 4, -math.pi / 2))
    expect = np.zeros(4, dtype=complex)
    expect[0] = 1 / math.sqrt(2)
    expect[1] = -1 / math.sqrt(2)  # level 1 carries label 11
    assert np.allclose(st_.amps, expect)
    assert {reg.bitstring(0), reg.bitstring(1)} == {"00", "11"}


def test_ms_identity_outside_coupled_span(reg_mixed, rng):
    st_ = StateVector.from_levels(reg_mixed, [2, 0])
    before = st_.amps.copy()
    apply_native(st_, MS(0, 1, (0, 1), (0, 1), 0.9))
    assert np.allclose(st_.amps, before)


def test_ms_explicit_form(reg_mixed):
    J = 0.9
    st_ = StateVector.from_levels(reg_mixed, [0, 0])
    apply_native(st_, MS(0, 1, (0, 1), (0, 1), J))
    assert abs(st_.amps[reg_mixed.index_of_levels([0, 0])] - math.cos(J)) < 1e-14
    assert abs(st_.amps[reg_mixed.index_of_levels([1, 1])] + 1j * math.sin(J)) < 1e-14


def test_ms_dense_agreement_small(rng):
    # strided kernel equals the explicit matrix exponential on dim <= 64
    from scipy.linalg import expm

    reg = build_register([IonSpec(4), IonSpec(4), IonSpec(2)])
    pair_i, pair_j, J = (1, 3), (0, 2), 0.77
    H = np.zeros((reg.dim, reg.dim))
    for g in range(reg.dim):
        lv = list(reg.levels_of_index(g))
        if lv[0] in pair_i and lv[1] in pair_j:
            lv2 = list(lv)
            lv2[0] = pair_i[0] if lv[0] == pair_i[1] else pair_i[1]
            lv2[1] = pair_j[0] if lv[1] == pair_j[1] else pair_j[1]
            H[reg.index_of_levels(lv2), g] = 1.0
    U = expm(-1j * J * H)
    assert np.max(np.abs(U - gate_matrix(MS(0, 1, pair_i, pair_j, J), reg))) < 1e-12


def test_multipair_ms_xx():
    # simultaneous (0,1)+(2,3) drives on both ions give XX between qubit 2's
    reg = build_register([IonSpec(4), IonSpec(4)])
    J = 0.41
    g = MultiPairMS(0, 1, ((0, 1), (2, 3)), ((0, 1), (2, 3)), J)
    target = embed_standard(
        math.cos(J) * np.eye(4) - 1j * math.sin(J) * pauli_string("XX"), [1, 3], reg
    )
    assert np.max(np.abs(gate_matrix(g, reg) - target)) < 1e-12


def test_global_ms_ghz():
    # one global drive on the paired map makes a 2L-qubit GHZ state
    L = 3
    reg = build_register([IonSpec(4, m2_map()) for _ in range(L)])
    g = GlobalMS(math.pi / 4, tuple((((0, 1), (2, 3)),) * L))
    g = GlobalMS(math.pi / 4, tuple(((0, 1), (2, 3)) for _ in range(L)))
    st_ = StateVector.zero(reg)
    apply_native(st_, g)
    probs = st_.probabilities()
    top = np.argsort(probs)[-2:]
    labels = {reg.bitstring(int(t)) for t in top}
    assert labels == {"0" * 2 * L, "1" * 2 * L}
    assert abs(probs[top].sum() - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_norm_preserved_random_gates(seed):
    rng = np.random.default_rng(seed)
    reg = build_register([IonSpec(4), IonSpec(2), IonSpec(4)])
    amps = rng.standard_normal(reg.dim) + 1j * rng.standard_normal(reg.dim)
    amps /= np.linalg.norm(amps)
    st_ = StateVector.from_amplitudes(reg, amps)
    for _ in range(6):
        if rng.random() < 0.5:
            ion = int(rng.integers(3))
            d = reg.ions[ion].d
            a, b = sorted(rng.choice(d, size=2, replace=False))
            apply_native(st_, R(ion, int(a), int(b), rng.uniform(0, 7), rng.uniform(0, 7)))
        else:
            i, j = sorted(rng.choice(3, size=2, replace=False))
            di, dj = reg.ions[i].d, reg.ions[j].d
            pi_ = tuple(sorted(rng.choice(di, size=2, replace=False)))
            pj_ = tuple(sorted(rng.choice(dj, size=2, replace=False)))
            apply_native(st_, MS(int(i), int(j), pi_, pj_, rng.uniform(0, 7)))
    assert abs(st_.norm() - 1) < 1e-12


def test_ms_generators_commute_for_disjoint_ion_pairs():
    reg = build_register([IonSpec(4) for _ in range(4)])
    Ha = np.eye(reg.dim) - gate_matrix(MS(0, 1, (0, 1), (2, 3), 1e-6), reg)
    Hb = np.eye(reg.dim) - gate_matrix(MS(2, 3, (1, 2), (0, 1), 1e-6), reg)
    comm = Ha @ Hb - Hb @ Ha
    assert np.max(np.abs(comm)) < 1e-12


def test_embed_standard_x_and_cnot(reg_n2):
    X = pauli_string("X")
    V = embed_standard(X, [0], reg_n2)
    P = np.zeros((4, 4))
    P[2, 0] = P[0, 2] = P[3, 1] = P[1, 3] = 1
    assert np.allclose(V, P)
    # CNOT on two one-qubit ions: the embedded matrix acts on the bit labels
    # exactly like the standard gate (the level basis keeps ion 0 fastest)
    reg2 = build_register([IonSpec(2), IonSpec(2)])
    V = embed_standard(cnot_on(2, 0, 1), [0, 1], reg2)
    for g in range(4):
        bits = reg2.bitstring(g)
        out = bits if bits[0] == "0" else bits[0] + str(1 - int(bits[1]))
        assert V[reg2.index_of_bits(out), g] == 1
    assert np.allclose(V @ V, np.eye(4))
    assert np.allclose(embed_standard(np.eye(4), [0, 1], reg_n2), np.eye(4))


def test_embed_rejects_nonunitary(reg_n2):
    with pytest.raises(ValueError):
        embed_standard(np.ones((2, 2)), [0], reg_n2)


def test_sampling_basis_state(reg_mixed):
    st_ = StateVector.zero(reg_mixed)
    counts = sample_measurement(st_, 500, seed=3)
    assert counts == {"000": 500}


def test_sampling_ghz_binomial():
    reg = build_register([IonSpec(4, m2_map())])
    st_ = StateVector.zero(reg)
    apply_native(st_, R(0, 0, 1, math.pi / 4, -math.pi / 2))
    shots = 10**4
    counts = sample_measurement(st_, shots, seed=11)
    assert set(counts) <= {"00", "11"}
    assert sum(counts.values()) == shots
    sigma = 0.5 * math.sqrt(shots)
    assert abs(counts.get("00", 0) - shots / 2) < 4 * sigma


def test_sampling_chunks_aggregate_identically():
    reg = build_register([IonSpec(4, m2_map())])
    st_ = StateVector.zero(reg)
    apply_native(st_, R(0, 0, 1, math.pi / 4, -math.pi / 2))
    a = sample_measurement(st_, 3000, seed=5, chunk_size=512)
    b = sample_measurement(st_, 3000, seed=5, chunk_size=512)
    assert a == b


def test_sampling_rejects_zero_shots(reg_n2):
    with pytest.raises(ValueError):
        sample_measurement(StateVector.zero(reg_n2), 0, seed=1)


def test_circuit_text_round_trip(reg_mixed):
    circ = Circuit(reg_mixed)
    circ.append(R(0, 0, 3, 0.25, -1.5))
    circ.append(MS(0, 1, (2, 3), (0, 1), -math.pi / 2))
    circ.append(MultiPairMS(0, 1, ((0, 1), (2, 3)), ((0, 1),), 0.7))
    text = format_circuit(circ)
    back = parse_circuit(text, reg_mixed)
    assert back.gates == circ.gates
    assert np.allclose(
        sequence_matrix(back.gates, reg_mixed), sequence_matrix(circ.gates, reg_mixed)
    )


def test_register_config_round_trip(reg_mixed):
    from ionvq.core import Register

    cfg = reg_mixed.to_config()
    back = Register.from_config(cfg)
    assert back.dim == reg_mixed.dim
    assert [ion.encoding.perm for ion in back.ions] == [
        ion.encoding.perm for ion in reg_mixed.ions
    ]
