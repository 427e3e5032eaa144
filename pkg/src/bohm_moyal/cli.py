"""Command-line runner: build a scenario state, run an analysis, emit CSV or JSON.

Exit status: 0 pass, 1 identity failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from typing import Any, Sequence

import numpy as np

from .exceptions import GridError, OperatorError, OrthogonalPostSelectionError
from .grid import derivative_values, interpolate, polar_decompose, to_momentum
from .moyal import (
    bohm_momentum_moyal,
    kinetic_baker,
    marginal_p,
    marginal_x,
    osmotic_moyal,
    wigner,
)
from .pauli import (
    SpinorField,
    bohm_momentum_pauli,
    bst_momentum,
    cayley_klein_decompose,
    pauli_kinetic,
    pauli_quantum_potential,
    pauli_wigner,
    wiseman_velocity_pauli,
)
from .scenarios import Scenario, ScenarioError, default_scenarios, from_mapping, load
from .states import gaussian, plane_wave
from .verify import TOLERANCES, WELL_CONDITIONED, run_verify
from .weak import (
    OperatorDescriptor,
    apply_operator,
    bohm_record,
    hamiltonian,
    momentum,
    position,
    weak_value,
    wiseman_velocity,
)

BOHM_COLUMNS = ("x", "rho", "S", "P_B_weak", "P_B_moyal", "osmotic", "Q", "kinetic", "wiseman_v",
                "dev_P_B", "dev_osmotic", "dev_kinetic", "dev_wiseman")
PAULI_COLUMNS = ("x", "rho", "R", "S", "theta", "phi", "P_B_components", "P_B_moyal", "P_B_bst",
                 "Q", "kinetic", "dev_moyal", "dev_bst", "dev_energy")
WIGNER_COLUMNS = ("x", "p", "value")
VERIFY_COLUMNS = ("scenario", "identity", "deviation", "tolerance", "passed")
WEAK_COLUMNS = ("operator", "post", "real", "imag")

CONVENTIONS = {
    "fourier": "phi(p) = dx / sqrt(2 pi) * sum_k psi(x_k) exp(-i p x_k)",
    "wigner": "f(x,p) = (1/2pi) int psi*(x - y/2) psi(x + y/2) exp(-i p y) dy",
    "momentum": "P_B, osmotic and weak values are mass-free (hbar = 1)",
    "energy": "Q = -grad^2 R / R and kinetic = P_B^2 + Q use the mass-1/2 convention",
    "velocity": "wiseman_v = Re <x|i[H,X]|psi> / <x|psi>, with H = P^2/2m + V",
    "deviation": "absolute difference between routes, reported unclipped",
    "rows": f"valid points with rho > {WELL_CONDITIONED:g} * max(rho)",
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- serialization

def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _json(obj: Any) -> str:
    """JSON with floats at 17 significant digits; non-finite floats become null."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return "%.17g" % obj if math.isfinite(obj) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def to_csv(columns: Sequence[str], rows: list[dict], footer: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(row[c]) for c in columns) + "\n")
    for key, value in (footer or {}).items():
        buf.write(f"# {key}={fmt(value)}\n")
    return buf.getvalue()


def to_json(meta: dict, rows: list[dict]) -> str:
    lines = ["{", f'"meta": {_json(meta)},', '"rows": [']
    lines.append(",\n".join(_json(r) for r in rows))
    lines.append("]}")
    return "\n".join(lines) + "\n"


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str) -> tuple[list[str], list[dict], dict]:
    """Inverse of :func:`to_csv`: ``(columns, rows, footer)``."""
    lines = text.splitlines()
    columns = lines[0].split(",")
    rows, footer = [], {}
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            footer[key] = _parse_cell(value)
        elif line:
            rows.append(dict(zip(columns, map(_parse_cell, line.split(",")))))
    return columns, rows, footer


def parse_json(text: str) -> tuple[dict, list[dict]]:
    data = json.loads(text)
    return data["meta"], data["rows"]


# ---------------------------------------------------------------- runners

def _meta(sc: Scenario, **extra) -> dict:
    g = sc.grid()
    return {"scenario": sc.describe(),
            "grid": {"n": g.n, "length": g.length, "center": g.center, "dx": g.dx, "dp": g.dp},
            "conventions": CONVENTIONS, **extra}


def _rows(columns: Sequence[str], mask: np.ndarray, **data) -> list[dict]:
    # ratio columns are roundoff-limited in the far tails; report well-conditioned points only
    rho = data["rho"]
    idx = np.flatnonzero(mask & (rho > WELL_CONDITIONED * rho.max()))
    return [{c: float(data[c][k]) for c in columns} for k in idx]


def _scalar_bohm(sc: Scenario) -> tuple[list[dict], dict]:
    kw = sc.derivative_kw()
    psi = sc.state()
    g = psi.grid
    nt = sc.node_threshold
    record = bohm_record(psi, nt, **kw)
    polar = polar_decompose(psi, nt)
    table = wigner(psi)
    pb = record.bohm_momentum
    pb_m = bohm_momentum_moyal(table, nt)
    osm_m = osmotic_moyal(table, nt)
    kin = kinetic_baker(table, nt)
    notes = {}
    if sc.kind == "plane_wave":
        # X psi is not periodic for an extended state, so the commutator is not representable
        wise = np.full(g.n, np.nan)
        notes["wiseman_v"] = "undefined for extended (non-decaying) states"
    else:
        wise = wiseman_velocity(psi, sc.mass, 0.0, node_threshold=nt, **kw)
    data = dict(x=g.x, rho=polar.density, S=polar.phase, P_B_weak=pb, P_B_moyal=pb_m,
                osmotic=record.osmotic_momentum, Q=record.quantum_potential, kinetic=kin,
                wiseman_v=wise, dev_P_B=np.abs(pb - pb_m),
                dev_osmotic=np.abs(record.osmotic_momentum - osm_m),
                dev_kinetic=np.abs(kin - record.bohm_kinetic - record.quantum_potential),
                dev_wiseman=np.abs(wise - pb / sc.mass))
    return _rows(BOHM_COLUMNS, polar.valid, **data), notes


def _spinor_bohm(sc: Scenario) -> tuple[list[dict], dict]:
    kw = sc.derivative_kw()
    s: SpinorField = sc.state()
    g = s.grid
    nt = sc.node_threshold
    ck = cayley_klein_decompose(s, nt)
    rho = s.density()
    table = pauli_wigner(s)
    pb = bohm_momentum_pauli(s, nt, check=False, **kw)
    pb_m = bohm_momentum_moyal(table, nt)
    osm = np.full(g.n, np.nan)
    osm[ck.valid] = derivative_values(rho, g, 1, **kw)[ck.valid] / (2 * rho[ck.valid])
    osm_m = osmotic_moyal(table, nt)
    q = pauli_quantum_potential(ck, **kw)
    kin = kinetic_baker(table, nt)
    bst = bst_momentum(ck)
    wise = wiseman_velocity_pauli(s, sc.mass, 0.0, nt, **kw)
    data = dict(x=g.x, rho=rho, S=ck.big_s, P_B_weak=pb, P_B_moyal=pb_m, osmotic=osm, Q=q,
                kinetic=kin, wiseman_v=wise, dev_P_B=np.abs(pb - pb_m),
                dev_osmotic=np.abs(osm - osm_m), dev_kinetic=np.abs(kin - bst ** 2 - q),
                dev_wiseman=np.abs(wise - pb / sc.mass))
    return _rows(BOHM_COLUMNS, ck.valid, **data), {}


def run_bohm(sc: Scenario) -> tuple[dict, list[dict]]:
    rows, notes = (_spinor_bohm if sc.is_spinor else _scalar_bohm)(sc)
    return _meta(sc, notes=notes), rows


def run_pauli(sc: Scenario) -> tuple[dict, list[dict]]:
    if not sc.is_spinor:
        raise ConfigError("the pauli command needs a pauli_ck scenario")
    kw = sc.derivative_kw()
    s: SpinorField = sc.state()
    nt = sc.node_threshold
    ck = cayley_klein_decompose(s, nt)
    rho = s.density()
    pb = bohm_momentum_pauli(s, nt, check=False, **kw)
    pb_m = bohm_momentum_moyal(pauli_wigner(s), nt)
    bst = bst_momentum(ck)
    q = pauli_quantum_potential(ck, **kw)
    kin = np.where(ck.valid, pauli_kinetic(s, check=False, **kw) / np.where(ck.valid, rho, 1), np.nan)
    data = dict(x=s.grid.x, rho=rho, R=ck.big_r, S=np.where(ck.phi_valid, ck.big_s, np.nan),
                theta=ck.theta, phi=np.where(ck.phi_valid, ck.phi_angle, np.nan),
                P_B_components=pb, P_B_moyal=pb_m, P_B_bst=bst, Q=q, kinetic=kin,
                dev_moyal=np.abs(pb_m - pb), dev_bst=np.abs(bst - pb),
                dev_energy=np.abs(kin - bst ** 2 - q))
    return _meta(sc), _rows(PAULI_COLUMNS, ck.valid, **data)


def run_wigner(sc: Scenario) -> tuple[dict, list[dict], dict]:
    state = sc.state()
    if sc.is_spinor:
        table = pauli_wigner(state)
        rho = state.density()
        mom = (np.abs(to_momentum(state.c1).values) ** 2
               + np.abs(to_momentum(state.c2).values) ** 2)
    else:
        table = wigner(state)
        rho = np.abs(state.values) ** 2
        mom = np.abs(to_momentum(state).values) ** 2
    g = table.grid
    mp, mx = marginal_p(table), marginal_x(table)
    checks = {
        "marginal_x_sum": float(g.dx * mp.sum()),
        "marginal_p_sum": float(g.dp * mx.sum()),
        "marginal_position_max_dev": float(np.abs(mp - rho).max()),
        "marginal_momentum_max_dev": float(np.abs(mx - mom).max()),
        "total": float(table.total()),
    }
    xs, ps = np.meshgrid(g.x, g.p, indexing="ij")
    rows = [{"x": float(a), "p": float(b), "value": float(v)}
            for a, b, v in zip(xs.ravel(), ps.ravel(), table.values.ravel())]
    return _meta(sc, checks=checks), rows, checks


_OPERATORS = {"p": lambda sc: momentum(1), "p2": lambda sc: momentum(2),
              "x": lambda sc: position(1), "x2": lambda sc: position(2)}


def _operator(sc: Scenario) -> OperatorDescriptor:
    name = sc.query.get("operator", "p")
    g = sc.grid()
    pot = sc.query.get("potential", "zero")
    if pot not in ("zero", "harmonic"):
        raise ConfigError("potential must be 'zero' or 'harmonic'")
    if name == "h":
        return hamiltonian(sc.mass, 0.5 * g.x ** 2 if pot == "harmonic" else 0.0)
    if name not in _OPERATORS:
        raise ConfigError(f"operator must be one of p, p2, x, x2, h; got {name!r}")
    return _OPERATORS[name](sc)


def _query_float(sc: Scenario, key: str, default: float) -> float:
    text = sc.query.get(key)
    if text is None:
        return default
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key} = {text!r} is not a number") from None


def run_weak(sc: Scenario) -> tuple[dict, list[dict]]:
    """Single weak value ``<post|A|psi> / <post|psi>``.

    ``post = position`` evaluates at ``post_x`` through the band-limited
    interpolant, so off-grid points are exact for resolved states.
    """
    if sc.is_spinor:
        raise ConfigError("the weak command takes a scalar scenario")
    kw = sc.derivative_kw()
    psi = sc.state()
    g = psi.grid
    op = _operator(sc)
    post = sc.query.get("post", "position")
    if post == "position":
        x = _query_float(sc, "post_x", g.center)
        denom = complex(interpolate(psi.values, g, x))
        if abs(denom) <= sc.node_threshold * np.abs(psi.values).max():
            raise ConfigError(f"x = {x} is a node of the state")
        value = complex(interpolate(apply_operator(op, psi, **kw).values, g, x)) / denom
        label = f"position x={fmt(x)}"
    elif post == "momentum":
        mode = _query_float(sc, "post_mode", 0)
        if mode != int(mode):
            raise ConfigError("post_mode must be an integer")
        value = weak_value(op, plane_wave(g, int(mode)), psi, **kw)
        label = f"momentum mode={int(mode)}"
    elif post == "gaussian":
        chi = gaussian(g, _query_float(sc, "post_x0", 0.0), _query_float(sc, "post_p0", 0.0),
                       _query_float(sc, "post_sigma", 1.0))
        value = weak_value(op, chi, psi, **kw)
        label = "gaussian"
    else:
        raise ConfigError("post must be position, momentum or gaussian")
    row = {"operator": sc.query.get("operator", "p"), "post": label,
           "real": float(value.real), "imag": float(value.imag)}
    return _meta(sc), [row]


def _bohm_failures(rows: list[dict], scale: float) -> list[str]:
    if not rows:
        return []
    rho = np.array([r["rho"] for r in rows])
    good = rho > WELL_CONDITIONED * rho.max()
    limits = {"dev_P_B": TOLERANCES["bohm_moyal"], "dev_osmotic": TOLERANCES["osmotic_moyal"],
              "dev_kinetic": TOLERANCES["kinetic_baker"], "dev_wiseman": TOLERANCES["wiseman"]}
    failed = []
    for col, tol in limits.items():
        dev = np.array([r[col] for r in rows])[good]
        dev = dev[np.isfinite(dev)]
        if dev.size and dev.max() > tol * scale:
            failed.append(f"{col}: {dev.max():.3e} > {tol * scale:.1e}")
    return failed


# ---------------------------------------------------------------- argument handling

def _overrides(args) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    for flag, key in (("grid_n", "grid_n"), ("grid_length", "grid_length"), ("mass", "mass"),
                      ("derivative", "derivative")):
        value = getattr(args, flag)
        if value is not None:
            out[key] = str(value)
    return out


def _scenario(args, path: str | None) -> Scenario:
    base = load(path) if path else {}
    return from_mapping({**base, **_overrides(args)})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", action="append", metavar="FILE",
                        help="flat key = value scenario file (verify accepts several)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key")
    common.add_argument("--grid-n", type=int)
    common.add_argument("--grid-length", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--derivative", choices=("spectral", "fd"))
    common.add_argument("--output", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tolerance-scale", type=float, default=1.0)

    parser = argparse.ArgumentParser(prog="bohm-moyal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bohm", parents=[common], help="Bohm variables by weak-value and Moyal routes")
    sub.add_parser("wigner", parents=[common], help="phase-space table as (x, p, value)")
    sub.add_parser("pauli", parents=[common], help="spin-half Bohm variables")
    sub.add_parser("weak", parents=[common], help="one weak value (operator, post, state)")
    v = sub.add_parser("verify", parents=[common], help="run the identity suite")
    v.add_argument("--empty", action="store_true", help="verify an empty scenario set")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(fmt_name: str, columns, meta, rows, footer=None) -> str:
    if fmt_name == "json":
        return to_json(meta, rows)
    return to_csv(columns, rows, footer)


def _single(args) -> Scenario:
    if args.scenario and len(args.scenario) > 1:
        raise ConfigError(f"{args.command} takes one --scenario")
    return _scenario(args, args.scenario[0] if args.scenario else None)


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not args.tolerance_scale > 0:
            raise ConfigError("--tolerance-scale must be positive")
        if args.command == "verify":
            return _run_verify(args)
        sc = _single(args)
        if args.command == "bohm":
            meta, rows = run_bohm(sc)
            _emit(_render(args.format, BOHM_COLUMNS, meta, rows), args.output)
            failed = _bohm_failures(rows, args.tolerance_scale)
            for line in failed:
                print(f"identity failure: {line}", file=sys.stderr)
            return 1 if failed else 0
        if args.command == "pauli":
            meta, rows = run_pauli(sc)
            _emit(_render(args.format, PAULI_COLUMNS, meta, rows), args.output)
            return 0
        if args.command == "wigner":
            meta, rows, checks = run_wigner(sc)
            _emit(_render(args.format, WIGNER_COLUMNS, meta, rows, checks), args.output)
            ok = (checks["marginal_position_max_dev"] <= TOLERANCES["marginal"] * args.tolerance_scale
                  and checks["marginal_momentum_max_dev"] <= TOLERANCES["marginal"] * args.tolerance_scale)
            return 0 if ok else 1
        meta, rows = run_weak(sc)
        _emit(_render(args.format, WEAK_COLUMNS, meta, rows), args.output)
        return 0
    except (ConfigError, ScenarioError, GridError, OperatorError,
            OrthogonalPostSelectionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def _run_verify(args) -> int:
    if args.empty:
        scenarios: list[Scenario] = []
    elif args.scenario:
        scenarios = [_scenario(args, path) for path in args.scenario]
    else:
        overrides = _overrides(args)
        scenarios = [sc.with_overrides(overrides) if overrides else sc
                     for sc in default_scenarios()]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        report = run_verify(scenarios, args.tolerance_scale)
    rows = [{"scenario": r.scenario, "identity": r.identity, "deviation": r.deviation,
             "tolerance": r.tolerance, "passed": r.passed} for r in report.results]
    meta = {"passed": report.passed, "notes": report.notes, "conventions": CONVENTIONS}
    _emit(_render(args.format, VERIFY_COLUMNS, meta, rows), args.output)
    print(report.lines()[-1], file=sys.stderr)
    for n in report.notes:
        print(f"note: {n}", file=sys.stderr)
    for r in report.failures():
        print(f"FAILED {r.scenario}/{r.identity}: {r.deviation:.3e} > {r.tolerance:.1e}",
              file=sys.stderr)
    return report.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
