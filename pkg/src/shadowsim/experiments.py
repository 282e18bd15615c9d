"""Canned interferometer experiments run on either engine.

Geometry conventions for the canonical benches:

* Mach-Zehnder: the arm transmitted at the first splitter is ``a`` and
  carries the shifter alpha; the reflected arm is ``b``.  Detector ``u``
  sits on the cross port for arm a, so P(u) = cos^2(alpha/2) at equal arm
  lengths.
* Bomb-test bench: the same interferometer tuned to alpha = 0 (every
  particle reaches u), with an optional blocker replacing one arm.
* Delayed-choice bench: the same interferometer; with ``peek`` the arm is
  read out right after the first splitter (projective which-path marking)
  and the interference pattern collapses to half-half.
* Pair bench: one two-arm emission per side; the left a-arm carries
  alpha and reflects toward u, the right b'-arm carries beta and reflects
  toward u'.  Joint outcomes are keyed (left label, right label).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hilbert
from .circuit import Circuit, Element, ElementType, Link, Path
from .outcomes import (
    ENGINE_CLOSED_FORM,
    ENGINE_HILBERT,
    ENGINE_STREAMS,
    Outcome,
    OutcomeDistribution,
)
from .rng import RNG_NAME, make_rng, substream
from .streams import (
    StreamPair,
    build_stream,
    build_stream_pair,
    joint_terminal_amplitudes,
    path_amplitude,
    stream_terminal_amplitudes,
)

ENGINES = (ENGINE_STREAMS, ENGINE_HILBERT)


def _require_engine(engine: str) -> None:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}, expected one of {ENGINES}")


# -- canonical circuits ------------------------------------------------------

def mach_zehnder_circuit(alpha: float, theta: float = 0.0) -> Circuit:
    elements = {
        "src": Element(ElementType.SOURCE),
        "bs1": Element(ElementType.BEAMSPLITTER),
        "m_a": Element(ElementType.MIRROR),
        "shift_a": Element(ElementType.PHASESHIFTER, shift=alpha),
        "m_b": Element(ElementType.MIRROR),
        "bs2": Element(ElementType.BEAMSPLITTER),
        "det_u": Element(ElementType.DETECTOR, label="u"),
        "det_d": Element(ElementType.DETECTOR, label="d"),
    }
    links = [
        Link("src", 0, "bs1", 0),
        Link("bs1", 0, "m_a", 0, theta),
        Link("m_a", 0, "shift_a", 0),
        Link("shift_a", 0, "bs2", 0),
        Link("bs1", 1, "m_b", 0, theta),
        Link("m_b", 0, "bs2", 1),
        Link("bs2", 1, "det_u", 0),
        Link("bs2", 0, "det_d", 0),
    ]
    return Circuit(elements, links)


def ifm_circuit(blocked_arm: str | None) -> Circuit:
    """Alpha = 0 bench, optionally with a blocker swallowing one arm."""
    if blocked_arm is None:
        return mach_zehnder_circuit(0.0)
    if blocked_arm not in ("a", "b"):
        raise ValueError("blocked_arm must be 'a', 'b', or None")
    elements = {
        "src": Element(ElementType.SOURCE),
        "bs1": Element(ElementType.BEAMSPLITTER),
        "absorbed": Element(ElementType.BLOCKER),
        "bs2": Element(ElementType.BEAMSPLITTER),
        "det_u": Element(ElementType.DETECTOR, label="u"),
        "det_d": Element(ElementType.DETECTOR, label="d"),
    }
    if blocked_arm == "a":
        elements["m_b"] = Element(ElementType.MIRROR)
        links = [
            Link("src", 0, "bs1", 0),
            Link("bs1", 0, "absorbed", 0),
            Link("bs1", 1, "m_b", 0),
            Link("m_b", 0, "bs2", 1),
        ]
    else:
        elements["m_a"] = Element(ElementType.MIRROR)
        links = [
            Link("src", 0, "bs1", 0),
            Link("bs1", 1, "absorbed", 0),
            Link("bs1", 0, "m_a", 0),
            Link("m_a", 0, "bs2", 0),
        ]
    links += [
        Link("bs2", 1, "det_u", 0),
        Link("bs2", 0, "det_d", 0),
    ]
    return Circuit(elements, links)


def bghz_left_circuit(alpha: float) -> Circuit:
    elements = {
        "srcL": Element(ElementType.SOURCE),
        "shift_a": Element(ElementType.PHASESHIFTER, shift=alpha),
        "bsL": Element(ElementType.BEAMSPLITTER),
        "det_u": Element(ElementType.DETECTOR, label="u"),
        "det_d": Element(ElementType.DETECTOR, label="d"),
    }
    links = [
        Link("srcL", 0, "shift_a", 0),
        Link("shift_a", 0, "bsL", 0),
        Link("srcL", 1, "bsL", 1),
        Link("bsL", 1, "det_u", 0),
        Link("bsL", 0, "det_d", 0),
    ]
    return Circuit(elements, links)


def bghz_right_circuit(beta: float, *, arm_phase: float = 0.0) -> Circuit:
    """Right half; ``arm_phase`` desymmetrizes the plain arm when nonzero."""
    elements = {
        "srcR": Element(ElementType.SOURCE),
        "shift_b": Element(ElementType.PHASESHIFTER, shift=beta),
        "bsR": Element(ElementType.BEAMSPLITTER),
        "det_up": Element(ElementType.DETECTOR, label="u'"),
        "det_dp": Element(ElementType.DETECTOR, label="d'"),
    }
    links = [
        Link("srcR", 0, "bsR", 0, arm_phase),
        Link("srcR", 1, "shift_b", 0),
        Link("shift_b", 0, "bsR", 1),
        Link("bsR", 0, "det_up", 0),
        Link("bsR", 1, "det_dp", 0),
    ]
    return Circuit(elements, links)


def bghz_pair(
    alpha: float,
    beta: float,
    *,
    seed: int | None = None,
    right_arm_phase: float = 0.0,
) -> StreamPair:
    """Both daughters under one clock; left a travels with right b'."""
    return build_stream_pair(
        bghz_left_circuit(alpha),
        bghz_right_circuit(beta, arm_phase=right_arm_phase),
        stream1_arms=(0, 1),
        seed=seed,
    )


def bghz_allowed_pairs(pair: StreamPair) -> list[tuple[Path, Path]]:
    """Source correlation: the pair leaves through matching arm indices."""
    return [
        (pl, pr)
        for pl in pair.left.paths
        for pr in pair.right.paths
        if pl.source_port == pr.source_port
    ]


# -- path narration ----------------------------------------------------------

_ARM_NAMES = {0: "a", 1: "b"}


def _mz_arm(path: Path) -> str:
    for eid, _in, out in path.steps:
        if eid == "bs1":
            assert out is not None
            return _ARM_NAMES[out]
    raise ValueError("path does not traverse the first splitter")


def _arm_weights(circuit: Circuit, paths, amplitudes, arm_of) -> dict[str, dict[str, float]]:
    """Conditional tangible-path weights per outcome, from |amplitude|^2."""
    weights: dict[str, dict[str, float]] = {}
    for path, amp in zip(paths, amplitudes):
        outcome = circuit.terminal_key(path.terminal)
        weights.setdefault(outcome, {})
        weights[outcome][arm_of(path)] = weights[outcome].get(arm_of(path), 0.0) + abs(amp) ** 2
    for outcome, table in weights.items():
        total = sum(table.values())
        if total > 0:
            weights[outcome] = {k: v / total for k, v in table.items()}
    return {k: v for k, v in weights.items() if sum(v.values()) > 0}


# -- experiment runners -------------------------------------------------------

def run_mach_zehnder(
    alpha: float,
    engine: str = ENGINE_STREAMS,
    *,
    theta: float = 0.0,
    seed: int | None = None,
) -> OutcomeDistribution:
    _require_engine(engine)
    params = {"experiment": "mz", "alpha": alpha, "theta": theta, "engine": engine,
              "seed": seed, "rng": RNG_NAME}
    if engine == ENGINE_HILBERT:
        dist = hilbert.evolve_mz(alpha, theta)
        return OutcomeDistribution(dist.outcomes, ENGINE_HILBERT, params)
    circuit = mach_zehnder_circuit(alpha, theta)
    stream = build_stream(circuit, seed=seed)
    probs = {k: abs(v) ** 2 for k, v in stream_terminal_amplitudes(stream).items()}
    weights = _arm_weights(circuit, stream.paths, stream.amplitudes, _mz_arm)
    return OutcomeDistribution(probs, ENGINE_STREAMS, params, path_weights=weights)


def run_wheeler(
    alpha: float,
    peek: bool,
    engine: str = ENGINE_STREAMS,
    *,
    seed: int | None = None,
) -> OutcomeDistribution:
    """Delayed-choice bench; ``peek`` inserts which-path marking after the
    first splitter, which kills the alpha dependence."""
    _require_engine(engine)
    if not peek:
        dist = run_mach_zehnder(alpha, engine, seed=seed)
        params = dict(dist.parameters)
        params.update({"experiment": "wheeler", "peek": False})
        return OutcomeDistribution(dist.outcomes, dist.engine, params,
                                   path_weights=dist.path_weights)
    params = {"experiment": "wheeler", "alpha": alpha, "peek": True,
              "engine": engine, "seed": seed, "rng": RNG_NAME}
    if engine == ENGINE_HILBERT:
        state = hilbert.basis_state("s")
        state = hilbert.apply_beamsplitter(state, ("s", "vac"), ("b", "a"))
        state = hilbert.apply_phase(state, "a", alpha)
        outcomes = {"u": 0.0, "d": 0.0}
        for arm in ("a", "b"):
            prob_arm, collapsed = hilbert.project_mode(state, arm)
            after = hilbert.apply_beamsplitter(collapsed, ("a", "b"), ("u", "d"))
            for out in outcomes:
                outcomes[out] += prob_arm * abs(after.coefficient(out)) ** 2
        return OutcomeDistribution(outcomes, ENGINE_HILBERT, params)
    circuit = mach_zehnder_circuit(alpha)
    stream = build_stream(circuit, seed=seed)
    # Which-path marking: amplitudes stay coherent within an arm but add
    # as probabilities across arms.
    by_arm_terminal: dict[tuple[str, str], complex] = {}
    for path, amp in zip(stream.paths, stream.amplitudes):
        key = (_mz_arm(path), circuit.terminal_key(path.terminal))
        by_arm_terminal[key] = by_arm_terminal.get(key, 0.0 + 0.0j) + amp
    outcomes = {k: 0.0 for k in circuit.terminal_keys()}
    for (_arm, terminal), amp in by_arm_terminal.items():
        outcomes[terminal] += abs(amp) ** 2
    weights = _arm_weights(circuit, stream.paths, stream.amplitudes, _mz_arm)
    return OutcomeDistribution(outcomes, ENGINE_STREAMS, params, path_weights=weights)


def run_ifm(
    blocked_arm: str | None = "a",
    engine: str = ENGINE_STREAMS,
    *,
    seed: int | None = None,
) -> OutcomeDistribution:
    """Blocked-arm bench.  Unblocked, every particle exits at u; blocked,
    the absorbed/u/d split is 1/2, 1/4, 1/4 whichever arm is blocked."""
    _require_engine(engine)
    circuit = ifm_circuit(blocked_arm)
    params = {"experiment": "ifm", "blocked_arm": blocked_arm, "engine": engine,
              "seed": seed, "rng": RNG_NAME}
    if engine == ENGINE_HILBERT:
        evolution = hilbert.evolve_circuit(circuit)
        return OutcomeDistribution(evolution.probabilities(), ENGINE_HILBERT, params)
    stream = build_stream(circuit, seed=seed)
    probs = {k: abs(v) ** 2 for k, v in stream_terminal_amplitudes(stream).items()}
    weights = _arm_weights(circuit, stream.paths, stream.amplitudes, _mz_arm)
    return OutcomeDistribution(probs, ENGINE_STREAMS, params, path_weights=weights)


def run_bghz(
    alpha: float,
    beta: float,
    engine: str = ENGINE_STREAMS,
    *,
    seed: int | None = None,
) -> OutcomeDistribution:
    _require_engine(engine)
    params = {"experiment": "bghz", "alpha": alpha, "beta": beta, "engine": engine,
              "seed": seed, "rng": RNG_NAME}
    if engine == ENGINE_HILBERT:
        dist = hilbert.evolve_bghz(alpha, beta)
        return OutcomeDistribution(dist.outcomes, ENGINE_HILBERT, params)
    pair = bghz_pair(alpha, beta, seed=seed)
    allowed = bghz_allowed_pairs(pair)
    joint = joint_terminal_amplitudes(pair, allowed)
    probs: dict[Outcome, float] = {key: abs(amp) ** 2 for key, amp in joint.items()}
    # Tangible-pair narration: weight each same-arm pair by its product
    # amplitude within the outcome.
    left_amp = dict(zip(pair.left.paths, pair.left.amplitudes))
    right_amp = dict(zip(pair.right.paths, pair.right.amplitudes))
    weights: dict[Outcome, dict[str, float]] = {}
    for pl, pr in allowed:
        key = (
            pair.left.circuit.terminal_key(pl.terminal),
            pair.right.circuit.terminal_key(pr.terminal),
        )
        label = f"{_ARM_NAMES[pl.source_port]}-{_ARM_NAMES[pr.source_port]}'"
        w = abs(left_amp[pl] * right_amp[pr]) ** 2
        weights.setdefault(key, {})
        weights[key][label] = weights[key].get(label, 0.0) + w
    for key, table in list(weights.items()):
        total = sum(table.values())
        if total <= 0:
            del weights[key]
            continue
        weights[key] = {k: v / total for k, v in table.items()}
    return OutcomeDistribution(probs, ENGINE_STREAMS, params, path_weights=weights)


def closed_form_mz(alpha: float) -> OutcomeDistribution:
    """Textbook law, kept as sampling fodder and an independent reference."""
    half = 0.5 * alpha
    return OutcomeDistribution(
        {"u": math.cos(half) ** 2, "d": math.sin(half) ** 2},
        ENGINE_CLOSED_FORM,
        {"experiment": "mz", "alpha": alpha},
    )


# -- sampling -----------------------------------------------------------------

RECORD_CAP = 200_000


@dataclass(frozen=True)
class SampleRecord:
    """One shot: its outcome plus the hidden tangible-path narration."""

    index: int
    outcome: Outcome
    tangible: str | None
    seed: int | None


@dataclass(frozen=True)
class SampleResult:
    counts: dict[Outcome, int]
    frequencies: dict[Outcome, float]
    shots: int
    seed: int | None
    rng: str = RNG_NAME
    records: list[SampleRecord] | None = None


def sample(
    dist: OutcomeDistribution,
    shots: int,
    seed: int | None = None,
    *,
    keep_records: bool | None = None,
) -> SampleResult:
    """Draw i.i.d. shots from a distribution, reproducibly.

    Hidden tangible labels are drawn from the outcome's contributing-path
    weights when the engine recorded them; they never influence the
    outcome statistics.  Records are materialized unless the shot count
    exceeds RECORD_CAP (override with ``keep_records``).
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if keep_records is None:
        keep_records = shots <= RECORD_CAP
    rng = make_rng(seed)
    labels = list(dist.outcomes)
    probs = np.array([dist.outcomes[k] for k in labels])
    probs = probs / probs.sum()
    drawn = rng.choice(len(labels), size=shots, p=probs)
    counts = np.bincount(drawn, minlength=len(labels))
    count_map = {label: int(c) for label, c in zip(labels, counts)}
    freq_map = {label: c / shots for label, c in count_map.items()}

    records = None
    if keep_records:
        tangible = np.empty(shots, dtype=object)
        if dist.path_weights:
            for i, label in enumerate(labels):
                mask = drawn == i
                n_here = int(mask.sum())
                if n_here == 0:
                    continue
                table = dist.path_weights.get(label)
                if not table:
                    continue
                arms = list(table)
                arm_p = np.array([table[a] for a in arms])
                tangible[mask] = rng.choice(arms, size=n_here, p=arm_p / arm_p.sum())
        records = [
            SampleRecord(
                i,
                labels[int(drawn[i])],
                None if tangible[i] is None else str(tangible[i]),
                seed,
            )
            for i in range(shots)
        ]
    return SampleResult(
        counts=count_map,
        frequencies=freq_map,
        shots=shots,
        seed=seed,
        records=records,
    )


# -- CHSH ---------------------------------------------------------------------

_S_BOUND = 2.0 * math.sqrt(2.0) + 1e-9


@dataclass(frozen=True)
class ChshReport:
    """Correlators and the CHSH combination for four angle settings.

    ``signs`` are applied to E(a,b), E(a,b'), E(a',b), E(a',b') in that
    order; the default is the usual one-minus layout.
    """

    angles: tuple[float, float, float, float]
    correlations: dict[tuple[float, float], float]
    s_value: float
    violation: bool
    engine: str
    signs: tuple[int, int, int, int]
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        slack = 0.0 if self.shots is None else 4.0 * 2.0 / math.sqrt(self.shots)
        for e in self.correlations.values():
            if abs(e) > 1.0 + 1e-9 + slack:
                raise ValueError(f"correlator {e!r} outside [-1, 1]")
        if abs(self.s_value) > _S_BOUND + slack:
            raise ValueError(f"S = {self.s_value!r} exceeds the quantum bound")


def _correlator(probs: dict[Outcome, float]) -> float:
    def p(key: Outcome) -> float:
        return probs.get(key, 0.0)

    same = p(("u", "u'")) + p(("d", "d'"))
    diff = p(("u", "d'")) + p(("d", "u'"))
    return same - diff


def chsh(
    a: float,
    a_prime: float,
    b: float,
    b_prime: float,
    engine: str = ENGINE_STREAMS,
    *,
    shots: int | None = None,
    seed: int | None = None,
    signs: tuple[int, int, int, int] = (1, -1, 1, 1),
) -> ChshReport:
    """CHSH combination over the four settings, exact or Monte Carlo.

    With ``shots`` each setting is sampled on its own RNG substream of
    ``seed`` and the correlators are empirical frequencies.
    """
    _require_engine(engine)
    if sorted(abs(s) for s in signs) != [1, 1, 1, 1]:
        raise ValueError("signs must be four values of +-1")
    settings = [(a, b), (a, b_prime), (a_prime, b), (a_prime, b_prime)]
    correlations: dict[tuple[float, float], float] = {}
    for i, (x, y) in enumerate(settings):
        dist = run_bghz(x, y, engine, seed=seed)
        if shots is None:
            correlations[(x, y)] = _correlator(dist.outcomes)
        else:
            shot_seed = int(substream(seed, i).integers(2**63))
            result = sample(dist, shots, shot_seed, keep_records=False)
            correlations[(x, y)] = _correlator(result.frequencies)
    s_value = sum(s * correlations[setting] for s, setting in zip(signs, settings))
    return ChshReport(
        angles=(a, a_prime, b, b_prime),
        correlations=correlations,
        s_value=s_value,
        violation=abs(s_value) > 2.0,
        engine=engine,
        signs=signs,
        shots=shots,
        seed=seed,
    )
