"""Circuit model: validation rules, text format, path enumeration."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shadowsim.angles import canonical_angle, parse_angle
from shadowsim.circuit import (
    Circuit,
    CircuitParseError,
    CircuitValidationError,
    Element,
    ElementType,
    Link,
    enumerate_paths,
    parse_circuit,
    render_circuit,
)
from shadowsim.corpus import random_circuit
from shadowsim.experiments import bghz_left_circuit, ifm_circuit, mach_zehnder_circuit

# -- angles -------------------------------------------------------------------


@pytest.mark.parametrize(
    ("text", "value"),
    [
        ("0", 0.0),
        ("1.25", 1.25),
        ("-2", -2.0),
        ("pi", math.pi),
        ("-pi", -math.pi),
        ("pi/2", math.pi / 2),
        ("3pi/4", 3 * math.pi / 4),
        ("0.5pi", 0.5 * math.pi),
        ("2pi/3", 2 * math.pi / 3),
        ("1e-3", 1e-3),
    ],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, abs=0.0)


@pytest.mark.parametrize("text", ["banana", "pi*2", "2*pi", "", "pi/0", "1/2"])
def test_parse_angle_rejects(text):
    with pytest.raises(ValueError, match="pi-expression|denominator"):
        parse_angle(text)


def test_canonical_angle_range():
    for value in (-7.0, -1e-9, 0.0, 2 * math.pi, 2 * math.pi - 1e-16, 123.456):
        reduced = canonical_angle(value)
        assert 0.0 <= reduced < 2 * math.pi


def test_canonical_angle_rejects_nonfinite():
    with pytest.raises(ValueError):
        canonical_angle(float("nan"))


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_canonical_angle_is_idempotent(value):
    reduced = canonical_angle(value)
    assert canonical_angle(reduced) == reduced


# -- element and link validation ------------------------------------------------


def test_detector_requires_label():
    with pytest.raises(CircuitValidationError):
        Element(ElementType.DETECTOR)


def test_only_shifters_take_shift():
    with pytest.raises(CircuitValidationError):
        Element(ElementType.MIRROR, shift=0.5)
    assert Element(ElementType.PHASESHIFTER, shift=2 * math.pi + 0.5).shift == pytest.approx(0.5)


def _two_detector_splitter() -> dict[str, Element]:
    return {
        "s": Element(ElementType.SOURCE),
        "b": Element(ElementType.BEAMSPLITTER),
        "x": Element(ElementType.DETECTOR, label="x"),
        "y": Element(ElementType.DETECTOR, label="y"),
    }


def test_valid_minimal_circuit():
    circuit = Circuit(
        _two_detector_splitter(),
        [Link("s", 0, "b", 0), Link("b", 0, "x", 0), Link("b", 1, "y", 0)],
    )
    assert circuit.terminal_keys() == ("x", "y")
    assert len(enumerate_paths(circuit)) == 2


@pytest.mark.parametrize(
    ("links", "message"),
    [
        ([Link("s", 0, "b", 0), Link("b", 0, "x", 0)], "output"),
        ([Link("s", 0, "b", 0), Link("b", 0, "x", 0), Link("b", 1, "x", 0)], "fed twice"),
        (
            [Link("s", 0, "b", 0), Link("s", 0, "b", 1), Link("b", 0, "x", 0), Link("b", 1, "y", 0)],
            "linked twice",
        ),
        (
            [Link("s", 0, "b", 5), Link("b", 0, "x", 0), Link("b", 1, "y", 0)],
            "port",
        ),
        (
            [Link("s", 0, "nope", 0), Link("b", 0, "x", 0), Link("b", 1, "y", 0)],
            "unknown element",
        ),
    ],
)
def test_bad_wiring_rejected(links, message):
    with pytest.raises(CircuitValidationError, match=message):
        Circuit(_two_detector_splitter(), links)


def test_duplicate_detector_labels_rejected():
    elements = _two_detector_splitter()
    elements["y"] = Element(ElementType.DETECTOR, label="x")
    with pytest.raises(CircuitValidationError, match="label"):
        Circuit(
            elements,
            [Link("s", 0, "b", 0), Link("b", 0, "x", 0), Link("b", 1, "y", 0)],
        )


def test_cycle_rejected():
    elements = {
        "s": Element(ElementType.SOURCE),
        "b": Element(ElementType.BEAMSPLITTER),
        "m": Element(ElementType.MIRROR),
        "x": Element(ElementType.DETECTOR, label="x"),
    }
    links = [
        Link("s", 0, "b", 0),
        Link("b", 0, "m", 0),
        Link("m", 0, "b", 1),
        Link("b", 1, "x", 0),
    ]
    with pytest.raises(CircuitValidationError, match="cycle"):
        Circuit(elements, links)


def test_source_required():
    with pytest.raises(CircuitValidationError, match="source"):
        Circuit({"x": Element(ElementType.DETECTOR, label="x")}, [])


# -- text format ----------------------------------------------------------------


MZ_TEXT = """
# two-splitter bench
element src source
element bs1 beamsplitter
element ps phaseshifter:pi/3
element bs2 beamsplitter
element u detector:u
element d detector:d
link src:0 bs1:0
link bs1:0 ps:0 phase=0.25
link ps:0 bs2:0
link bs1:1 bs2:1 phase=0.25
link bs2:1 u:0
link bs2:0 d:0
"""


def test_parse_circuit_text():
    circuit = parse_circuit(MZ_TEXT)
    assert circuit.elements["ps"].shift == pytest.approx(math.pi / 3)
    assert circuit.terminal_keys() == ("u", "d")
    assert len(enumerate_paths(circuit)) == 4


def test_render_parse_round_trip():
    circuit = parse_circuit(MZ_TEXT)
    assert parse_circuit(render_circuit(circuit)) == circuit


def test_render_round_trips_programmatic_circuits():
    for builder in (lambda: mach_zehnder_circuit(0.7, 0.3), lambda: ifm_circuit("b")):
        circuit = builder()
        assert parse_circuit(render_circuit(circuit)) == circuit


@pytest.mark.parametrize(
    ("text", "line", "fragment"),
    [
        ("element x widget", 1, "unknown element kind"),
        ("element src source\nlink src:0", 2, "link"),
        ("element src source\nlink src:zero d:0", 2, "port"),
        ("element src source\nelement src source", 2, "duplicate"),
        ("element d detector", 1, "label"),
        ("element ps phaseshifter:banana", 1, "pi-expression"),
        ("element src source\nelement d detector:d\nlink src:0 d:0 phase=oops", 3, "pi-expression"),
        ("wibble", 1, "unknown statement"),
    ],
)
def test_parse_errors_carry_position(text, line, fragment):
    with pytest.raises(CircuitParseError, match=fragment) as err:
        parse_circuit(text)
    assert err.value.line == line
    assert err.value.column >= 1


# -- path enumeration -------------------------------------------------------------


def _mirror_chain() -> Circuit:
    return parse_circuit(
        "element s source\nelement m1 mirror\nelement m2 mirror\n"
        "element t detector:t\nlink s:0 m1:0\nlink m1:0 m2:0\nlink m2:0 t:0"
    )


def _cascade() -> Circuit:
    text = ["element s source", "element b0 beamsplitter",
            "element ba beamsplitter", "element bb beamsplitter"]
    links = ["link s:0 b0:0", "link b0:0 ba:0", "link b0:1 bb:0"]
    for i, (bs, port) in enumerate([("ba", 0), ("ba", 1), ("bb", 0), ("bb", 1)]):
        text.append(f"element t{i} detector:t{i}")
        links.append(f"link {bs}:{port} t{i}:0")
    return parse_circuit("\n".join(text + links))


def _double_mz() -> Circuit:
    return parse_circuit(
        "\n".join(
            [
                "element s source",
                "element b1 beamsplitter",
                "element b2 beamsplitter",
                "element b3 beamsplitter",
                "element m mirror",
                "element u detector:u",
                "element d detector:d",
                "link s:0 b1:0",
                "link b1:0 b2:0",
                "link b1:1 b2:1",
                "link b2:1 b3:0",
                "link b2:0 m:0",
                "link m:0 b3:1",
                "link b3:0 u:0",
                "link b3:1 d:0",
            ]
        )
    )


def _partial_recombine() -> Circuit:
    return parse_circuit(
        "\n".join(
            [
                "element s source",
                "element b1 beamsplitter",
                "element b2 beamsplitter",
                "element early detector:early",
                "element u detector:u",
                "element d detector:d",
                "link s:0 b1:0",
                "link b1:0 b2:0",
                "link b1:1 early:0",
                "link b2:0 u:0",
                "link b2:1 d:0",
            ]
        )
    )


def _blocker_only() -> Circuit:
    return parse_circuit("element s source\nelement blk blocker\nlink s:0 blk:0")


@pytest.mark.parametrize(
    ("build", "count"),
    [
        (lambda: mach_zehnder_circuit(0.7), 4),
        (lambda: ifm_circuit("a"), 3),
        (lambda: ifm_circuit("b"), 3),
        (_mirror_chain, 1),
        (
            lambda: parse_circuit(
                "element s source\nelement b beamsplitter\nelement x detector:x\n"
                "element y detector:y\nlink s:0 b:0\nlink b:0 x:0\nlink b:1 y:0"
            ),
            2,
        ),
        (_cascade, 4),
        (lambda: bghz_left_circuit(0.3), 4),
        (_double_mz, 8),
        (_partial_recombine, 3),
        (_blocker_only, 1),
    ],
)
def test_path_counts(build, count):
    circuit = build()
    paths = enumerate_paths(circuit)
    assert len(paths) == count
    for path in paths:
        assert path.steps[0][0] in circuit.sources
        assert circuit.elements[path.terminal].kind.value in ("detector", "blocker")


def test_paths_collect_link_phase():
    circuit = parse_circuit(MZ_TEXT)
    for path in enumerate_paths(circuit):
        assert path.geometric_phase == pytest.approx(0.25)


def test_paths_are_deterministically_ordered():
    circuit = _double_mz()
    assert [p.element_ids for p in enumerate_paths(circuit)] == sorted(
        p.element_ids for p in enumerate_paths(circuit)
    )


# -- generated corpus properties ---------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_circuits_are_valid_dags(seed):
    circuit = random_circuit(seed)
    paths = enumerate_paths(circuit)
    assert paths, "every circuit must route the source somewhere"
    splitters = sum(
        1 for el in circuit.elements.values() if el.kind is ElementType.BEAMSPLITTER
    )
    assert len(paths) <= 2 ** max(splitters, 1)
    for path in paths:
        # a DAG route never revisits an element
        assert len(set(path.element_ids)) == len(path.element_ids)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_circuits_round_trip_through_text(seed):
    circuit = random_circuit(seed)
    assert parse_circuit(render_circuit(circuit)) == circuit
