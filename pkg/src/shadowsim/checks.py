"""Full invariant suite behind the CLI ``check`` subcommand.

Every check is deterministic given its seed and returns a pass/fail plus a
one-line detail (worst deviation, measured order, p-value).  The suite
mirrors the package's acceptance gates so a green ``check`` run on a user
machine means the install reproduces the reference numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import hilbert, pathintegral
from .circuit import ElementType
from .corpus import random_circuit
from .experiments import (
    bghz_allowed_pairs,
    bghz_pair,
    chsh,
    run_bghz,
    run_ifm,
    run_mach_zehnder,
    run_wheeler,
    sample,
)
from .streams import (
    build_stream,
    congruence_check,
    joint_probabilities,
    path_amplitude,
    stream_terminal_amplitudes,
    unitarity_defect,
)

_TOL = 1e-12
_S_TARGET = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def check_mz_law() -> CheckResult:
    """P(u)=cos^2(alpha/2), P(d)=sin^2(alpha/2), both engines, 64 points."""
    worst = 0.0
    for alpha in np.linspace(0.0, 2.0 * np.pi, 64):
        pu, pd = math.cos(alpha / 2) ** 2, math.sin(alpha / 2) ** 2
        for engine in ("streams", "hilbert"):
            dist = run_mach_zehnder(float(alpha), engine, seed=0)
            worst = max(
                worst,
                abs(dist.probability("u") - pu),
                abs(dist.probability("d") - pd),
            )
    return _result("mz-law", worst < _TOL, f"max |P - closed form| = {worst:.3e}")


def check_mz_stream_amplitudes() -> CheckResult:
    """Stream amplitudes match the two-arm closed forms up to the clock."""
    from .experiments import mach_zehnder_circuit

    worst = 0.0
    for alpha in np.linspace(0.0, 2.0 * np.pi, 9):
        for theta in (0.0, 0.7, 2.0):
            circuit = mach_zehnder_circuit(float(alpha), theta)
            stream = build_stream(circuit, initial_clock=0.0)
            amps = stream_terminal_amplitudes(stream)
            want_u = 0.5j * np.exp(1j * theta) * (np.exp(1j * alpha) + 1.0)
            want_d = 0.5 * np.exp(1j * theta) * (np.exp(1j * alpha) - 1.0)
            worst = max(worst, abs(amps["u"] - want_u), abs(amps["d"] - want_d))
    return _result("mz-amplitudes", worst < _TOL, f"max amplitude error = {worst:.3e}")


def check_bghz_law() -> CheckResult:
    """Joint law 1/2 cos^2, 1/2 sin^2 of beta-alpha on an 8x8 grid."""
    worst = 0.0
    grid = np.linspace(0.0, 2.0 * np.pi, 8)
    for alpha in grid:
        for beta in grid:
            half = 0.5 * (beta - alpha)
            want = {
                ("u", "u'"): 0.5 * math.cos(half) ** 2,
                ("u", "d'"): 0.5 * math.sin(half) ** 2,
                ("d", "u'"): 0.5 * math.sin(half) ** 2,
                ("d", "d'"): 0.5 * math.cos(half) ** 2,
            }
            for engine in ("streams", "hilbert"):
                dist = run_bghz(float(alpha), float(beta), engine, seed=0)
                for key, p in want.items():
                    worst = max(worst, abs(dist.probability(key) - p))
    return _result("bghz-law", worst < _TOL, f"max |P - closed form| = {worst:.3e}")


def check_congruence() -> CheckResult:
    """Plain-arm congruence and the locality refactoring on the same grid."""
    worst = 0.0
    grid = np.linspace(0.0, 2.0 * np.pi, 8)
    for alpha in grid:
        for beta in grid:
            pair = bghz_pair(float(alpha), float(beta), seed=7)
            report = congruence_check(pair)
            worst = max(worst, report.max_deviation)
    return _result("congruence", worst < _TOL, f"max deviation = {worst:.3e}")


def check_chsh_exact() -> CheckResult:
    report = chsh(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4, "streams")
    err = abs(report.s_value - _S_TARGET)
    return _result(
        "chsh-exact",
        err < 1e-9 and report.violation,
        f"S = {report.s_value:.9f}, |S - 2 sqrt 2| = {err:.3e}",
    )


def check_chsh_monte_carlo(shots: int = 1_000_000, seed: int = 20260814) -> CheckResult:
    report = chsh(
        0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4, "streams",
        shots=shots, seed=seed,
    )
    return _result(
        "chsh-monte-carlo",
        report.s_value >= 2.4,
        f"S = {report.s_value:.4f} from {shots} shots per setting",
    )


def check_ifm() -> CheckResult:
    worst = 0.0
    for engine in ("streams", "hilbert"):
        free = run_ifm(None, engine, seed=0)
        worst = max(worst, abs(free.probability("u") - 1.0), free.probability("d"))
        for arm in ("a", "b"):
            dist = run_ifm(arm, engine, seed=0)
            worst = max(
                worst,
                abs(dist.probability("absorbed") - 0.5),
                abs(dist.probability("u") - 0.25),
                abs(dist.probability("d") - 0.25),
            )
    return _result("ifm", worst < _TOL, f"max |P - target| = {worst:.3e}")


def check_wheeler() -> CheckResult:
    worst = 0.0
    for alpha in np.linspace(0.0, 2.0 * np.pi, 16):
        for engine in ("streams", "hilbert"):
            peeked = run_wheeler(float(alpha), True, engine, seed=0)
            worst = max(
                worst,
                abs(peeked.probability("u") - 0.5),
                abs(peeked.probability("d") - 0.5),
            )
            plain = run_wheeler(float(alpha), False, engine, seed=0)
            worst = max(worst, abs(plain.probability("u") - math.cos(alpha / 2) ** 2))
    return _result("wheeler", worst < _TOL, f"max deviation = {worst:.3e}")


def check_cross_engine(cases: int = 500) -> CheckResult:
    """Streams vs hilbert on randomized circuits, pointwise < 1e-12."""
    worst = 0.0
    for i in range(cases):
        circuit = random_circuit(i)
        stream = build_stream(circuit, seed=i)
        probs_s = {k: abs(v) ** 2 for k, v in stream_terminal_amplitudes(stream).items()}
        probs_h = hilbert.evolve_circuit(circuit).probabilities()
        for key in probs_h:
            worst = max(worst, abs(probs_s[key] - probs_h[key]))
    return _result(
        "cross-engine", worst < _TOL, f"{cases} circuits, max |dP| = {worst:.3e}"
    )


def check_unitarity(cases: int = 200) -> CheckResult:
    worst = 0.0
    for i in range(cases):
        stream = build_stream(random_circuit(i), seed=i)
        worst = max(worst, unitarity_defect(stream))
    return _result(
        "unitarity", worst < _TOL, f"{cases} circuits, max defect = {worst:.3e}"
    )


def check_clock_invariance() -> CheckResult:
    """Outcome probabilities identical for 100 different clock values."""
    from .experiments import mach_zehnder_circuit

    circuit = mach_zehnder_circuit(0.9, 0.4)
    base = None
    worst = 0.0
    for clock in np.linspace(0.0, 2.0 * np.pi, 100, endpoint=False):
        stream = build_stream(circuit, initial_clock=float(clock))
        probs = {k: abs(v) ** 2 for k, v in stream_terminal_amplitudes(stream).items()}
        if base is None:
            base = probs
        else:
            worst = max(worst, max(abs(probs[k] - base[k]) for k in base))
    return _result("clock-invariance", worst < 1e-14, f"max spread = {worst:.3e}")


def check_correlator_translation() -> CheckResult:
    """E(alpha, beta) depends only on beta - alpha."""

    def correlator(alpha: float, beta: float) -> float:
        dist = run_bghz(alpha, beta, "hilbert")
        return (
            dist.probability(("u", "u'"))
            + dist.probability(("d", "d'"))
            - dist.probability(("u", "d'"))
            - dist.probability(("d", "u'"))
        )

    worst = 0.0
    for alpha in np.linspace(0.0, 2.0 * np.pi, 6):
        for beta in np.linspace(0.0, 2.0 * np.pi, 6):
            worst = max(
                worst,
                abs(correlator(float(alpha), float(beta)) - correlator(0.0, float(beta - alpha))),
            )
    return _result("correlator-translation", worst < _TOL, f"max |dE| = {worst:.3e}")


def check_sampling(shots: int = 1_000_000, seed: int = 4242) -> CheckResult:
    """Chi-square goodness of fit, p > 1e-4, for the canned distributions."""
    dists = [
        run_mach_zehnder(2 * math.pi / 3, "streams"),
        run_wheeler(0.8, True, "streams"),
        run_ifm("a", "streams"),
        run_bghz(0.3, 1.1, "streams"),
    ]
    worst_p = 1.0
    for k, dist in enumerate(dists):
        result = sample(dist, shots, seed + k, keep_records=False)
        support = [key for key, p in dist.outcomes.items() if p > 0.0]
        stray = sum(result.counts[key] for key in dist.outcomes if key not in support)
        if stray:
            return _result("sampling-chi2", False, "samples outside the support")
        observed = np.array([result.counts[key] for key in support], dtype=float)
        expected = np.array([dist.outcomes[key] * shots for key in support])
        expected *= observed.sum() / expected.sum()
        _, p_value = stats.chisquare(observed, expected)
        worst_p = min(worst_p, float(p_value))
    return _result("sampling-chi2", worst_p > 1e-4, f"min p-value = {worst_p:.4g}")


def check_width_law() -> CheckResult:
    """Free-packet spreading sigma(t) on the lattice vs the closed form."""
    x = pathintegral.uniform_grid(1024, -30.0, 30.0)
    wf = pathintegral.gaussian_packet(x, 0.0, 1.5)
    run = pathintegral.propagate(wf, 0.5, 10)
    density = run.wavefunction.probability_density()
    dx = run.wavefunction.dx
    mean = float(np.sum(x * density) * dx)
    var = float(np.sum((x - mean) ** 2 * density) * dx)
    t = run.wavefunction.t
    want = 1.5**2 * (1.0 + (t / (2 * 1.5**2)) ** 2)
    rel = abs(var - want) / want
    return _result("width-law", rel < 1e-3, f"relative error = {rel:.3e} at t = {t}")


def check_cn_agreement() -> CheckResult:
    """Lattice propagator vs the Crank-Nicolson oracle, free packet."""
    x = pathintegral.uniform_grid(1024, -30.0, 30.0)
    wf = pathintegral.gaussian_packet(x, 0.0, 1.5)
    lattice = pathintegral.propagate(wf, 0.5, 10).wavefunction
    oracle = pathintegral.crank_nicolson_propagate(wf, 0.005, 1000)
    overlap = np.sum(np.conj(oracle.values) * lattice.values) * lattice.dx
    aligned = lattice.values * np.exp(-1j * np.angle(overlap))
    err = float(
        np.sqrt(np.sum(np.abs(aligned - oracle.values) ** 2) * lattice.dx)
    )
    return _result("crank-nicolson", err < 1e-3, f"L2 deviation = {err:.3e}")


def _coherent_state(x: np.ndarray, omega: float, x0: float, t: float) -> np.ndarray:
    """Closed-form coherent state of the harmonic well, unit mass and hbar."""
    width = math.sqrt(1.0 / (2.0 * omega))
    xc = x0 * math.cos(omega * t)
    pc = -x0 * omega * math.sin(omega * t)
    values = np.exp(-((x - xc) ** 2) / (4 * width**2) + 1j * pc * x)
    return values / np.sqrt(np.sum(np.abs(values) ** 2) * (x[1] - x[0]))


def check_convergence_order() -> CheckResult:
    """Measured order of the step error in eps for a harmonic oscillation."""
    omega, x0, t_final = 0.15, 2.0, 8.0
    x = pathintegral.uniform_grid(1024, -16.0, 16.0)
    wf = pathintegral.gaussian_packet(x, x0, math.sqrt(1.0 / (2.0 * omega)))
    target = _coherent_state(x, omega, x0, t_final)
    errors = []
    eps_values = [0.5, 1.0 / 3.0, 0.25]
    for eps in eps_values:
        run = pathintegral.propagate(
            wf, eps, round(t_final / eps), pathintegral.HarmonicPotential(omega)
        )
        got = run.wavefunction.values
        overlap = np.sum(np.conj(target) * got) * run.wavefunction.dx
        aligned = got * np.exp(-1j * np.angle(overlap))
        errors.append(
            float(np.sqrt(np.sum(np.abs(aligned - target) ** 2) * run.wavefunction.dx))
        )
    slope = np.polyfit(np.log(eps_values), np.log(errors), 1)[0]
    return _result(
        "convergence-order", slope >= 1.8, f"measured order = {slope:.2f}"
    )


def check_velocity_identity() -> CheckResult:
    """mean_velocity vs central-difference d<x>/dt, free and harmonic."""
    worst = 0.0
    # k0 stays modest: the spatial central difference in mean_velocity
    # biases v by about k0^3 dx^2 / 6, which must sit well under 1e-4.
    cases = [
        (pathintegral.FREE, 0.4),
        (pathintegral.HarmonicPotential(0.15), 0.0),
    ]
    for potential, k0 in cases:
        x = pathintegral.uniform_grid(1024, -16.0, 16.0)
        wf = pathintegral.gaussian_packet(x, 2.0, 1.3, k0)
        eps = 0.25
        snaps, _ = pathintegral.propagate_snapshots(
            wf, eps, [3 * eps, 4 * eps, 5 * eps], potential
        )
        (_, before), (_, middle), (_, after) = snaps
        rate = (pathintegral.expectation_x(after) - pathintegral.expectation_x(before)) / (
            2 * eps
        )
        v = pathintegral.mean_velocity(middle)
        worst = max(worst, abs(v - rate))
    return _result("velocity-identity", worst < 1e-4, f"max |v - dx/dt| = {worst:.3e}")


def run_all(
    *, corpus_cases: int = 500, shots: int = 1_000_000, seed: int = 20260814
) -> list[CheckResult]:
    """Run every invariant check; heavyweight counts are adjustable."""
    return [
        check_mz_law(),
        check_mz_stream_amplitudes(),
        check_bghz_law(),
        check_congruence(),
        check_chsh_exact(),
        check_chsh_monte_carlo(shots=shots, seed=seed),
        check_ifm(),
        check_wheeler(),
        check_cross_engine(cases=corpus_cases),
        check_unitarity(cases=min(200, corpus_cases)),
        check_clock_invariance(),
        check_correlator_translation(),
        check_sampling(shots=shots, seed=seed),
        check_width_law(),
        check_cn_agreement(),
        check_convergence_order(),
        check_velocity_identity(),
    ]
