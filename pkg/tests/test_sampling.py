import math

import numpy as np
import pytest

from ionvq.core import MS, R
from ionvq.sampling import (
    MINIMAL,
    MS_LIMITED,
    CircuitPolicy,
    build_bv,
    build_brickwork,
    build_longrange,
    estimate_second_moment,
    estimate_xeb,
    gates_to_threshold,
    run_bv,
    second_moment,
    xeb_exact,
)


def test_brickwork_counts_per_layer():
    for L, n in ((8, 1), (4, 2)):
        circ = build_brickwork(CircuitPolicy(n=n), L * n, 1, seed=5)
        c = circ.counts()
        assert c["MS"] == L and c["R"] == 2 * L


def test_brickwork_deterministic_per_seed():
    a = build_brickwork(CircuitPolicy(n=2), 8, 3, seed=9)
    b = build_brickwork(CircuitPolicy(n=2), 8, 3, seed=9)
    assert a.gates == b.gates
    c = build_brickwork(CircuitPolicy(n=2), 8, 3, seed=10)
    assert a.gates != c.gates


def test_minimal_policy_gate_set():
    circ = build_brickwork(CircuitPolicy(n=2, connectivity=MINIMAL), 8, 3, seed=2)
    for g in circ.gates:
        if isinstance(g, R):
            assert (g.a, g.b) in {(0, 1), (1, 2), (2, 3)}
        else:
            assert g.pair_i == (0, 1) and g.pair_j == (0, 1)


def test_ms_limited_policy():
    circ = build_brickwork(CircuitPolicy(n=2, connectivity=MS_LIMITED), 8, 2, seed=2)
    rs = {(g.a, g.b) for g in circ.gates if isinstance(g, R)}
    assert all(isinstance(g, R) or g.pair_i == (0, 1) for g in circ.gates)
    assert len(rs) > 3, "rotations range over all pairs"


def test_longrange_empty_and_pair_histogram():
    assert build_longrange(CircuitPolicy(n=1, architecture="longrange"), 4, 0, seed=1).gates == []
    pol = CircuitPolicy(n=1, architecture="longrange")
    circ = build_longrange(pol, 4, 10**4, seed=3)
    pairs = {}
    for g in circ.gates:
        if isinstance(g, MS):
            key = tuple(sorted((g.ion_i, g.ion_j)))
            pairs[key] = pairs.get(key, 0) + 1
    n_pairs = 6
    expect = 10**4 / n_pairs
    sigma = math.sqrt(10**4 * (1 / n_pairs) * (1 - 1 / n_pairs))
    assert len(pairs) == n_pairs
    for count in pairs.values():
        assert abs(count - expect) < 5 * sigma


def test_xeb_depth0_and_uniform():
    circ = build_brickwork(CircuitPolicy(n=1), 8, 0, seed=1)
    assert estimate_xeb(circ).value == 2**8 - 1
    assert second_moment(np.full(256, 1 / 256)) == pytest.approx(0.0, abs=1e-9)
    assert xeb_exact(np.full(256, 1 / 256)) == pytest.approx(0.0, abs=1e-12)


def test_xeb_porter_thomas_limit():
    circ = build_brickwork(CircuitPolicy(n=2), 8, 14, seed=21)
    val = estimate_xeb(circ).value
    assert 0.8 < val < 1.2


def test_second_moment_depth0_closed_form():
    for N in (4, 8):
        circ = build_brickwork(CircuitPolicy(n=1), N, 0, seed=1)
        assert estimate_second_moment(circ) == pytest.approx(2**N - 1, rel=1e-12)


def test_exact_vs_sampled_xeb():
    shots = 10**4
    diffs = []
    for seed in range(4):
        circ = build_brickwork(CircuitPolicy(n=1), 8, 6, seed=seed)
        exact = estimate_xeb(circ, "exact").value
        sampled = estimate_xeb(circ, "sampled", shots=shots, seed=seed + 50).value
        # stderr of the sampled estimator ~ 2^N std(p)/sqrt(shots)
        state = circ.run()
        p = state.probabilities()
        se = 256 * p.std() * math.sqrt(256 / shots)
        diffs.append(abs(exact - sampled) / max(se, 1e-9))
    assert max(diffs) < 5


def test_running_minimum_reaches_porter_thomas_in_nlogn_gates():
    for n, N in ((1, 8), (2, 8), (2, 12)):
        res = gates_to_threshold(CircuitPolicy(n=n), N, 1.1, circuits=3, seed=33)
        assert res.mean_gates <= 60 * N * math.log2(N)


def test_threshold_ordering_lower_bar_later():
    r2 = gates_to_threshold(CircuitPolicy(n=2), 8, 2.0, circuits=6, seed=4)
    r15 = gates_to_threshold(CircuitPolicy(n=2), 8, 1.5, circuits=6, seed=4)
    assert r15.mean_gates >= r2.mean_gates


def test_threshold_validates_asymptote():
    with pytest.raises(ValueError):
        gates_to_threshold(CircuitPolicy(n=1), 4, 0.9, circuits=1, seed=0)


# ---------------------------------------------------------------------------
# Bernstein-Vazirani


def test_bv_counts_match_formulas():
    for s in ("10", "1100", "1010", "111100", "11111111"):
        bv = build_bv(s, "n2")
        ones = s.count("1")
        L = len(s) // 2 + 1
        assert bv.intra_count == 4 * ones
        assert bv.ms_count <= min(ones, L)


def test_bv_merge_rule():
    assert build_bv("1100", "n2").ms_count == 1
    b = build_bv("1010", "n2")
    assert b.ms_count == 2 and b.intra_count == 8
    assert build_bv("0000", "n2").circuit.gates == []


def test_bv_recovers_every_string_up_to_8():
    import itertools

    for k in (2, 4, 6, 8):
        for bits in itertools.product("01", repeat=k):
            s = "".join(bits)
            bv = build_bv(s, "n2")
            state = bv.prep_state()
            from ionvq.core import apply_circuit

            apply_circuit(state, bv.circuit.gates)
            probs = state.probabilities()
            marg = {}
            for g in np.flatnonzero(probs > 1e-12):
                key = state.register.bitstring(int(g))[:k]
                marg[key] = marg.get(key, 0.0) + probs[g]
            assert marg.get(s, 0.0) > 1 - 1e-9, (s, marg)


def test_bv_n1_layout_recovery():
    for s in ("101", "0", "1", "110011"):
        _, recovered, _ = run_bv(s, "n1", shots=64, seed=6)
        assert recovered == s


def test_bv_layout_validation():
    with pytest.raises(ValueError):
        build_bv("101", "n2")
    with pytest.raises(ValueError):
        build_bv("", "n2")
    with pytest.raises(ValueError):
        build_bv("10", "n5")
