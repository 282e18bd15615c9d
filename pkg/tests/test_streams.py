"""Stream engine: clock amplitudes, unitarity, pairs, congruence."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shadowsim.circuit import parse_circuit
from shadowsim.corpus import random_circuit
from shadowsim.experiments import (
    bghz_allowed_pairs,
    bghz_pair,
    ifm_circuit,
    mach_zehnder_circuit,
)
from shadowsim.streams import (
    INV_SQRT2,
    PathClock,
    build_stream,
    build_stream_pair,
    congruence_check,
    joint_probabilities,
    joint_terminal_amplitudes,
    path_amplitude,
    stream_terminal_amplitudes,
    terminal_probabilities,
    unitarity_defect,
)

# Frozen from the closed forms (1/2)e^{i theta} i (e^{i alpha} + 1) and
# (1/2)e^{i theta}(e^{i alpha} - 1), evaluated independently of the engine.
MZ_AMP_ORACLE = [
    # (alpha, theta, amp_u, amp_d)
    (
        math.pi / 3,
        0.2,
        -0.573383275001593 + 0.6490235896702428j,
        -0.33104298817099886 + 0.3747139442065318j,
    ),
    (
        1.9,
        0.0,
        -0.47315004384370724 + 0.3383552165682483j,
        -0.6616447834317517 + 0.47315004384370724j,
    ),
]

# Frozen joint amplitudes of the pair bench at (alpha, beta) = (0.4, 1.5):
# (1/sqrt 2)(<x|a><y'|a'> + <x|b><y'|b'>) with the per-arm closed forms.
BGHZ_JOINT_ORACLE = {
    ("u", "u'"): -0.490347909896091 + 0.35065361486362745j,
    ("u", "d'"): -0.3006348598822344 + 0.21498755933122013j,
    ("d", "u'"): 0.3006348598822344 - 0.21498755933122013j,
    ("d", "d'"): -0.490347909896091 + 0.35065361486362745j,
}


def test_path_clock_stays_unit():
    clock = PathClock(0.3).advanced(5.0).advanced(-11.2).advanced(123.0)
    assert abs(abs(clock.amplitude()) - 1.0) == 0.0
    assert 0.0 <= clock.phase < 2 * math.pi


@pytest.mark.parametrize(("alpha", "theta", "amp_u", "amp_d"), MZ_AMP_ORACLE)
def test_mz_amplitudes_match_frozen_oracle(alpha, theta, amp_u, amp_d):
    circuit = mach_zehnder_circuit(alpha, theta)
    stream = build_stream(circuit, initial_clock=0.0)
    amps = stream_terminal_amplitudes(stream)
    assert amps["u"] == pytest.approx(amp_u, abs=1e-12)
    assert amps["d"] == pytest.approx(amp_d, abs=1e-12)


def test_mz_amplitudes_up_to_global_phase():
    """A nonzero clock multiplies every amplitude by the same unit phase."""
    circuit = mach_zehnder_circuit(0.9, 0.1)
    plain = stream_terminal_amplitudes(build_stream(circuit, initial_clock=0.0))
    for clock in (0.4, 2.2, 5.9):
        rotated = stream_terminal_amplitudes(build_stream(circuit, initial_clock=clock))
        factor = cmath.exp(1j * clock)
        for key in plain:
            assert rotated[key] == pytest.approx(plain[key] * factor, abs=1e-12)


def test_path_amplitude_magnitude_counts_crossings():
    circuit = mach_zehnder_circuit(1.1)
    stream = build_stream(circuit, seed=0)
    for path, amp in zip(stream.paths, stream.amplitudes):
        crossings = sum(1 for eid, _i, _o in path.steps if eid.startswith("bs"))
        assert abs(amp) == pytest.approx(INV_SQRT2**crossings, abs=1e-15)


def test_blocked_arm_splits_half_quarter_quarter():
    stream = build_stream(ifm_circuit("a"), seed=1)
    probs = terminal_probabilities(stream)
    assert probs["absorbed"] == pytest.approx(0.5, abs=1e-12)
    assert probs["u"] == pytest.approx(0.25, abs=1e-12)
    assert probs["d"] == pytest.approx(0.25, abs=1e-12)
    assert unitarity_defect(stream) < 1e-12


def test_probabilities_independent_of_clock():
    circuit = mach_zehnder_circuit(0.77, 0.3)
    reference = terminal_probabilities(build_stream(circuit, initial_clock=0.0))
    for clock in np.linspace(0.0, 2 * math.pi, 100, endpoint=False):
        probs = terminal_probabilities(build_stream(circuit, initial_clock=float(clock)))
        for key, value in reference.items():
            assert abs(probs[key] - value) < 1e-14


def test_tangible_index_has_no_statistical_effect():
    circuit = mach_zehnder_circuit(0.5)
    streams = [build_stream(circuit, seed=s, initial_clock=1.0) for s in range(20)]
    assert {s.tangible_index for s in streams} == set(range(4))
    base = terminal_probabilities(streams[0])
    for stream in streams[1:]:
        assert terminal_probabilities(stream) == base


def test_build_stream_reproducible_from_seed():
    circuit = mach_zehnder_circuit(2.0)
    one = build_stream(circuit, seed=99)
    two = build_stream(circuit, seed=99)
    assert one.initial_clock == two.initial_clock
    assert one.tangible_index == two.tangible_index
    assert one.amplitudes == two.amplitudes


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=5_000))
def test_unitarity_on_random_circuits(seed):
    stream = build_stream(random_circuit(seed), seed=seed)
    assert unitarity_defect(stream) < 1e-12


# -- stream pairs ---------------------------------------------------------------


def test_pair_daughters_share_one_clock():
    pair = bghz_pair(0.2, 1.0, seed=5)
    assert pair.left.initial_clock == pair.right.initial_clock
    ones = [p for p, s in pair.assignment.items() if s == 1]
    twos = [p for p, s in pair.assignment.items() if s == 2]
    # stream 1 holds left arm a with right arm b', stream 2 the others
    assert {(p.source, p.source_port) for p in ones} == {("srcL", 0), ("srcR", 1)}
    assert len(ones) + len(twos) == len(pair.left.paths) + len(pair.right.paths)


def test_joint_amplitudes_match_frozen_oracle():
    pair = bghz_pair(0.4, 1.5, seed=11)
    joint = joint_terminal_amplitudes(pair, bghz_allowed_pairs(pair))
    rotation = cmath.exp(2j * pair.left.initial_clock)
    for key, want in BGHZ_JOINT_ORACLE.items():
        assert joint[key] == pytest.approx(want * rotation, abs=1e-12)


def test_joint_probabilities_normalized_and_correct():
    for alpha, beta in [(0.0, 0.0), (0.4, 1.5), (3.0, 0.7)]:
        pair = bghz_pair(alpha, beta, seed=3)
        probs = joint_probabilities(pair, bghz_allowed_pairs(pair))
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
        half = 0.5 * (beta - alpha)
        assert probs[("u", "u'")] == pytest.approx(0.5 * math.cos(half) ** 2, abs=1e-12)
        assert probs[("u", "d'")] == pytest.approx(0.5 * math.sin(half) ** 2, abs=1e-12)


def test_perfect_correlation_at_equal_shifts():
    pair = bghz_pair(1.234, 1.234, seed=8)
    probs = joint_probabilities(pair, bghz_allowed_pairs(pair))
    assert probs[("u", "u'")] == pytest.approx(0.5, abs=1e-12)
    assert probs[("d", "d'")] == pytest.approx(0.5, abs=1e-12)
    assert probs[("u", "d'")] == pytest.approx(0.0, abs=1e-12)
    assert probs[("d", "u'")] == pytest.approx(0.0, abs=1e-12)


def test_joint_rejects_foreign_paths():
    pair = bghz_pair(0.1, 0.2, seed=0)
    foreign = build_stream(mach_zehnder_circuit(0.1), seed=0).paths[0]
    with pytest.raises(ValueError, match="left stream"):
        joint_terminal_amplitudes(pair, [(foreign, pair.right.paths[0])])


def test_pair_requires_shared_clock():
    left = build_stream(mach_zehnder_circuit(0.1), initial_clock=0.5)
    right = build_stream(ifm_circuit("a"), initial_clock=0.6)
    from shadowsim.streams import StreamPair

    with pytest.raises(ValueError, match="clock"):
        StreamPair(left=left, right=right)


# -- congruence ------------------------------------------------------------------


def test_congruence_holds_on_symmetric_bench():
    for alpha in np.linspace(0, 2 * math.pi, 8):
        for beta in np.linspace(0, 2 * math.pi, 8):
            report = congruence_check(bghz_pair(float(alpha), float(beta), seed=2))
            assert report.identity_deviation < 1e-12
            assert report.refactoring_deviation < 1e-12


def test_congruence_cross_term_value_at_zero_shifts():
    """At alpha = beta = 0 the u-u' sum of products is exactly i (before
    the pairing weight), up to the shared clock rotation."""
    pair = bghz_pair(0.0, 0.0, seed=4)
    report = congruence_check(pair)
    rotation = cmath.exp(2j * pair.left.initial_clock)
    assert report.cross_terms[("u", "u'")] / rotation == pytest.approx(1j, abs=1e-12)


def test_congruence_detects_desymmetrized_geometry():
    pair = bghz_pair(0.8, 2.1, seed=5, right_arm_phase=0.3)
    report = congruence_check(pair)
    # the plain arms now differ by e^{0.3i}, so |1 - e^{0.3i}|/sqrt(2)
    expected = abs(1 - cmath.exp(0.3j)) / math.sqrt(2)
    assert report.identity_deviation == pytest.approx(expected, rel=1e-9)
    assert report.refactoring_deviation > 0.01


def test_congruence_rejects_declared_asymmetric():
    pair = bghz_pair(0.0, 0.0, seed=0)
    with pytest.raises(ValueError, match="symmetric"):
        congruence_check(pair, symmetric=False)


def test_refactored_terms_use_single_side_products():
    """The rewritten form must equal the cross form term by term, which is
    the numerical content of the locality rearrangement."""
    pair = bghz_pair(1.1, 0.3, seed=9)
    report = congruence_check(pair)
    assert set(report.cross_terms) == set(report.refactored_terms)
    for key, value in report.cross_terms.items():
        assert report.refactored_terms[key] == pytest.approx(value, abs=1e-12)


def test_build_stream_pair_rejects_shared_path_objects():
    circuit = mach_zehnder_circuit(0.4)
    stream = build_stream(circuit, initial_clock=0.2)
    from shadowsim.streams import StreamPair

    with pytest.raises(ValueError, match="distinct"):
        StreamPair(left=stream, right=stream)


def test_stream1_arms_partition_controls_assignment():
    from shadowsim.experiments import bghz_left_circuit, bghz_right_circuit

    pair = build_stream_pair(
        bghz_left_circuit(0.0),
        bghz_right_circuit(0.0),
        stream1_arms=(1, 0),
        seed=6,
    )
    ones = {(p.source, p.source_port) for p, s in pair.assignment.items() if s == 1}
    assert ones == {("srcL", 1), ("srcR", 0)}
