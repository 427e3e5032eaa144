"""Numerical identity suite tying the weak-value, Bohm and Moyal routes together.

Each identity is reduced to one maximum absolute deviation and compared with
its tolerance (times ``tolerance_scale``).  Ratio quantities are compared only
where rho exceeds ``WELL_CONDITIONED`` times its peak, since ratios of tail
values are limited by roundoff rather than by the method.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import clifford
from .grid import GridField, derivative_values, phase_gradient, polar_decompose, to_momentum
from .moyal import (
    baker_bracket,
    bohm_momentum_moyal,
    cross_wigner,
    kinetic_baker,
    kinetic_moyal,
    marginal_p,
    marginal_x,
    moment_point_split,
    moyal_bracket,
    osmotic_moyal,
    wigner,
    wigner_momentum_route,
)
from .pauli import (
    SpinorField,
    bohm_momentum_pauli,
    bst_momentum,
    cayley_klein_decompose,
    pauli_kinetic,
    pauli_quantum_potential,
    pauli_wigner,
    pauli_wigner_trace,
)
from .scenarios import Scenario, default_scenarios
from .states import gaussian, plane_wave
from .weak import (
    bohm_record,
    momentum,
    polar_momenta,
    position,
    weak_expectation_identity,
    weak_value,
    weak_value_field,
    wiseman_velocity,
)

WELL_CONDITIONED = 1e-6

TOLERANCES = {
    "weak_split": 1e-8,
    "weak_split_fd": 1e-8,
    "eigenvalue": 1e-10,
    "completeness": 1e-8,
    "wiseman": 1e-6,
    "marginal": 1e-8,
    "total": 1e-8,
    "wigner_routes": 1e-8,
    "cross_wigner": 1e-10,
    "bracket": 1e-10,
    "bohm_moyal": 1e-6,
    "osmotic_moyal": 1e-6,
    "kinetic_baker": 1e-5,
    "kinetic_moyal": 1e-5,
    "point_split": 1e-8,
    "pauli_trace": 1e-8,
    "pauli_momentum": 1e-6,
    "pauli_energy": 1e-5,
    "reduction": 1e-10,
    "clifford": 1e-12,
    "round_trip": 1e-15,
}


@dataclass(frozen=True)
class IdentityResult:
    identity: str
    scenario: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


@dataclass
class VerificationReport:
    results: list[IdentityResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def failures(self) -> list[IdentityResult]:
        return [r for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        out = [f"{'PASS' if r.passed else 'FAIL'}  {r.scenario:<18} {r.identity:<28} "
               f"dev={r.deviation:.3e}  tol={r.tolerance:.1e}" for r in self.results]
        out += [f"NOTE  {n}" for n in self.notes]
        failed = len(self.failures())
        out.append(f"{len(self.results) - failed}/{len(self.results)} identities within tolerance")
        return out


def max_dev(a, b, mask=None) -> float:
    d = np.abs(np.asarray(a) - np.asarray(b))
    if mask is not None:
        d = d[mask]
    if d.size == 0:
        return 0.0
    # a NaN on a compared point is a failure, not something to skip
    return float("inf") if np.isnan(d).any() else float(d.max())


class _Recorder:
    def __init__(self, report: VerificationReport, scenario: str, scale: float):
        self.report, self.scenario, self.scale = report, scenario, scale

    def __call__(self, identity: str, kind: str, compute: Callable[[], float]) -> None:
        try:
            dev = float(compute())
        except Exception as exc:  # a crashing identity is a failing identity
            self.report.notes.append(f"{self.scenario}/{identity}: {type(exc).__name__}: {exc}")
            dev = float("inf")
        self.report.results.append(
            IdentityResult(identity, self.scenario, dev, TOLERANCES[kind] * self.scale))


def _well_conditioned(rho: np.ndarray) -> np.ndarray:
    return rho > WELL_CONDITIONED * rho.max()


def _top_modes(psi: GridField, count: int = 5) -> list[int]:
    weights = np.abs(to_momentum(psi).values)
    order = np.argsort(-weights, kind="stable")[:count]
    order = order[weights[order] > 1e-6 * weights.max()]
    return [int(j) - psi.grid.n // 2 for j in order]


def _bracket_checks(rec: _Recorder, table, kw) -> None:
    g = table.grid
    w = table.values
    p = g.p[None, :]
    # closed forms, built without the star-product coefficient tables
    dw = derivative_values(w.T, g, 1).T
    d2w = derivative_values(w.T, g, 2).T
    rec("baker_p = p f", "bracket", lambda: max_dev(baker_bracket("p", table).values, p * w))
    rec("moyal_p = df/dx", "bracket", lambda: max_dev(moyal_bracket("p", table).values, dw))
    rec("baker_p2 = p^2 f - f''/4", "bracket",
        lambda: max_dev(baker_bracket("p2", table).values, p ** 2 * w - 0.25 * d2w))
    rec("moyal_p2 = 2 p df/dx", "bracket",
        lambda: max_dev(moyal_bracket("p2", table).values, 2 * p * dw))


def check_scalar(sc: Scenario, report: VerificationReport, scale: float) -> None:
    rec = _Recorder(report, sc.name, scale)
    kw = sc.derivative_kw()
    psi = sc.state()
    g = psi.grid
    rho = np.abs(psi.values) ** 2
    good = _well_conditioned(rho)
    nt = sc.node_threshold

    wv = weak_value_field(momentum(), psi, node_threshold=nt, **kw)
    grad_s, osm = polar_momenta(psi, nt, **kw)
    rec("weak split (polar)", "weak_split", lambda: max_dev(wv, grad_s - 1j * osm, good))
    if sc.kind in ("gaussian", "plane_wave"):
        # linear phase: run-wise finite differences of the unwrapped phase are exact
        fd_grad = phase_gradient(polar_decompose(psi, nt), g)
        rec("weak split (phase fd)", "weak_split_fd", lambda: max_dev(wv.real, fd_grad, good))

    def eigen():
        devs = []
        for j in _top_modes(psi):
            post = plane_wave(g, j)
            devs.append(abs(weak_value(momentum(), post, psi, **kw) - g.p[g.mode_index(j)]))
        return max(devs)
    rec("momentum eigenvalue", "eigenvalue", eigen)

    for label, op in (("P", momentum(1)), ("P^2", momentum(2)), ("X", position(1))):
        rec(f"completeness <{label}>", "completeness",
            lambda op=op: abs(np.subtract(*weak_expectation_identity(op, psi, nt, **kw))))

    pb = wv.real
    # X psi must itself be periodic and smooth, so extended states are skipped
    wiseman_cases = () if sc.kind == "plane_wave" else (("V=0", 0.0), ("V=x^2/2", 0.5 * g.x ** 2))
    for vlabel, v in wiseman_cases:
        rec(f"wiseman {vlabel}", "wiseman",
            lambda v=v: max_dev(wiseman_velocity(psi, sc.mass, v, node_threshold=nt, **kw),
                                pb / sc.mass, good))

    table = wigner(psi)
    rec("marginal p -> |psi|^2", "marginal", lambda: max_dev(marginal_p(table), rho))
    phi = to_momentum(psi)
    rec("marginal x -> |phi|^2", "marginal",
        lambda: max_dev(marginal_x(table), np.abs(phi.values) ** 2))
    rec("total = 1", "total", lambda: abs(table.total() - 1.0))
    if sc.kind != "plane_wave":
        rec("position/momentum routes", "wigner_routes",
            lambda: max_dev(table.values, wigner_momentum_route(phi).values))

    other = gaussian(g, g.center - 1.0, 0.5, 1.3)
    rec("cross_wigner diagonal", "cross_wigner",
        lambda: max_dev(cross_wigner(psi, psi).values, table.values))
    rec("cross_wigner hermitian", "cross_wigner",
        lambda: max_dev(cross_wigner(psi, other).values,
                        np.conj(cross_wigner(other, psi).values)))

    _bracket_checks(rec, table, kw)

    record = bohm_record(psi, nt, **kw)
    rec("bohm momentum moyal = weak", "bohm_moyal",
        lambda: max_dev(bohm_momentum_moyal(table, nt), pb, good))
    rec("osmotic moyal = weak", "osmotic_moyal",
        lambda: max_dev(osmotic_moyal(table, nt), record.osmotic_momentum, good))
    rec("kinetic baker = P_B^2 + Q", "kinetic_baker",
        lambda: max_dev(kinetic_baker(table, nt),
                        record.bohm_kinetic + record.quantum_potential, good))

    def kin_moyal_target():
        current = moment_point_split(psi, 1, **kw)
        return derivative_values(current, g, 1, **kw) / np.where(good, rho, 1.0)
    rec("kinetic moyal = div(rho grad S)/rho", "kinetic_moyal",
        lambda: max_dev(kinetic_moyal(table, nt), kin_moyal_target(), good))
    for n in (1, 2):
        rec(f"point-split moment n={n}", "point_split",
            lambda n=n: max_dev(moment_point_split(psi, n, **kw),
                                g.dp * (g.p[None, :] ** n * table.values).sum(axis=1)))


def check_spinor(sc: Scenario, report: VerificationReport, scale: float) -> None:
    rec = _Recorder(report, sc.name, scale)
    kw = sc.derivative_kw()
    s: SpinorField = sc.state()
    rho = s.density()
    ck = cayley_klein_decompose(s, sc.node_threshold)
    good = _well_conditioned(rho) & ck.phi_valid

    f_table = pauli_wigner(s)
    rec("F trace route", "pauli_trace",
        lambda: max_dev(f_table.values, pauli_wigner_trace(s).values))
    rec("F marginal p -> rho", "marginal", lambda: max_dev(marginal_p(f_table), rho))
    rec("F total = 1", "total", lambda: abs(f_table.total() - 1.0))
    _bracket_checks(rec, f_table, kw)

    components = bohm_momentum_pauli(s, sc.node_threshold, check=False, **kw)
    moment = bohm_momentum_moyal(f_table, sc.node_threshold)
    bst = bst_momentum(ck)
    rec("momentum moment = components", "pauli_momentum", lambda: max_dev(moment, components, good))
    rec("momentum BST = components", "pauli_momentum", lambda: max_dev(bst, components, good))
    p = sc.params
    if p["theta_slope"] == 0:
        closed = p["p0"] + 0.5 * np.cos(p["theta0"]) * p["phi_slope"]
        rec("momentum BST closed form", "pauli_momentum", lambda: max_dev(bst, closed, good))

    def energy():
        kin = pauli_kinetic(s, check=False, **kw)
        q = pauli_quantum_potential(ck, **kw)
        return max_dev(kin / np.where(good, rho, 1.0), bst ** 2 + q, good)
    rec("energy KE/rho = P_B^2 + Q", "pauli_energy", energy)

    def kinetic_routes():
        bb = f_table.grid.dp * baker_bracket("p2", f_table).values.sum(axis=1).real
        return max_dev(pauli_kinetic(s, check=False, **kw), bb)
    rec("kinetic density = baker p^2", "pauli_energy", kinetic_routes)


def check_reduction(sc: Scenario, report: VerificationReport, scale: float) -> None:
    """A one-component spinor must reproduce the scalar quantities."""
    rec = _Recorder(report, sc.name, scale)
    kw = sc.derivative_kw()
    psi = sc.state()
    s = SpinorField(psi, psi * 0.0)
    rho = np.abs(psi.values) ** 2
    good = _well_conditioned(rho)
    record = bohm_record(psi, sc.node_threshold, **kw)
    table = wigner(psi)
    rec("reduction F", "reduction", lambda: max_dev(pauli_wigner(s).values, table.values))
    rec("reduction F trace", "reduction", lambda: max_dev(pauli_wigner_trace(s).values, table.values))
    rec("reduction momentum", "reduction",
        lambda: max_dev(bohm_momentum_pauli(s, check=False, **kw), record.bohm_momentum, good))
    ck = cayley_klein_decompose(s, sc.node_threshold)
    rec("reduction Q", "reduction",
        lambda: max_dev(pauli_quantum_potential(ck, **kw), record.quantum_potential, good))
    rec("reduction kinetic density", "reduction",
        lambda: max_dev(pauli_kinetic(s, check=False, **kw),
                        rho * (record.bohm_kinetic + record.quantum_potential), good))


def check_clifford(report: VerificationReport, scale: float, samples: int = 1000) -> None:
    rec = _Recorder(report, "clifford", scale)
    mv = clifford.Multivector
    e = [mv.blade(n) for n in ("e1", "e2", "e3")]

    def generators():
        dev = 0.0
        for i in range(3):
            for j in range(3):
                anti = (e[i] * e[j] + e[j] * e[i]).coeffs
                dev = max(dev, max_dev(anti, mv.scalar(2.0 if i == j else 0.0).coeffs))
        return dev
    rec("generator relations", "clifford", generators)
    eps = clifford.epsilon()
    rec("epsilon idempotent", "clifford", lambda: max_dev((eps * eps).coeffs, eps.coeffs))

    rng = np.random.default_rng(20240101)
    a, b, c = (mv(rng.normal(size=(samples, 8))) for _ in range(3))
    rec("associativity", "clifford", lambda: max_dev(((a * b) * c).coeffs, (a * (b * c)).coeffs))
    rec("reversion anti-automorphism", "clifford",
        lambda: max_dev(clifford.reverse(a * b).coeffs,
                        (clifford.reverse(b) * clifford.reverse(a)).coeffs))
    rec("matrix representation", "clifford",
        lambda: max_dev(clifford.matrix_representation(a * b),
                        clifford.matrix_representation(a) @ clifford.matrix_representation(b)))

    def round_trip():
        psi1 = rng.normal(size=samples) + 1j * rng.normal(size=samples)
        psi2 = rng.normal(size=samples) + 1j * rng.normal(size=samples)
        back1, back2 = clifford.ideal_to_spinor(clifford.spinor_to_ideal(psi1, psi2))
        return max(max_dev(back1, psi1), max_dev(back2, psi2))
    rec("spinor/ideal round trip", "round_trip", round_trip)


def run_verify(scenarios: Iterable[Scenario] | None = None,
               tolerance_scale: float = 1.0) -> VerificationReport:
    """Run every identity over ``scenarios`` (the default set if None)."""
    if not tolerance_scale > 0:
        raise ValueError("tolerance_scale must be positive")
    scenarios = default_scenarios() if scenarios is None else list(scenarios)
    report = VerificationReport()
    if not scenarios:
        msg = "empty scenario set: nothing to verify"
        warnings.warn(msg, UserWarning, stacklevel=2)
        report.notes.append(msg)
        return report
    check_clifford(report, tolerance_scale)
    reduced = False
    for sc in scenarios:
        if sc.is_spinor:
            check_spinor(sc, report, tolerance_scale)
        else:
            check_scalar(sc, report, tolerance_scale)
            if not reduced and sc.kind != "plane_wave":
                check_reduction(sc, report, tolerance_scale)
                reduced = True
    return report
