"""Weak values (transition probability amplitudes) and the Bohm quantities they carry.

With post-selection on position, the momentum weak value splits as

    <x|P|psi> / <x|psi> = grad S - i grad(rho) / (2 rho),

so its real part is the Bohm momentum and minus its imaginary part is the
osmotic momentum.  Momentum-form outputs are mass-free; velocities divide by m.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .exceptions import NodeError, NormalizationWarning, OperatorError, OrthogonalPostSelectionError
from .grid import (
    DEFAULT_NODE_THRESHOLD,
    GridField,
    derivative_values,
    node_mask,
    polar_decompose,
    require_position,
)

OperatorKind = Literal["momentum", "position", "potential", "hamiltonian"]

NORM_TOLERANCE = 1e-8
DEFAULT_OVERLAP_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorDescriptor:
    kind: OperatorKind
    power: int = 1
    potential: np.ndarray | None = None
    mass: float = 1.0

    def __post_init__(self):
        if self.kind in ("momentum", "position"):
            if self.power not in (1, 2):
                raise OperatorError(f"{self.kind} power must be 1 or 2, got {self.power}")
        elif self.kind in ("potential", "hamiltonian"):
            v = np.asarray(self.potential if self.potential is not None else 0.0, dtype=float)
            if not np.all(np.isfinite(v)):
                raise OperatorError("potential samples must be finite reals")
            object.__setattr__(self, "potential", v)
            if self.kind == "hamiltonian" and not self.mass > 0:
                raise OperatorError(f"mass must be positive, got {self.mass}")
        else:
            raise OperatorError(f"unsupported operator kind {self.kind!r}")


def momentum(power: int = 1) -> OperatorDescriptor:
    return OperatorDescriptor("momentum", power)


def position(power: int = 1) -> OperatorDescriptor:
    return OperatorDescriptor("position", power)


def potential(v) -> OperatorDescriptor:
    return OperatorDescriptor("potential", potential=v)


def hamiltonian(mass: float = 1.0, v=0.0) -> OperatorDescriptor:
    return OperatorDescriptor("hamiltonian", potential=v, mass=mass)


def apply_operator(op: OperatorDescriptor, psi: GridField, method: str = "spectral",
                   fd_order: int = 4) -> GridField:
    require_position(psi)
    g = psi.grid
    if op.kind == "momentum":
        d = derivative_values(psi.values, g, op.power, method, fd_order)
        return psi.with_values((-1j) ** op.power * d)
    if op.kind == "position":
        return psi.with_values(g.x ** op.power * psi.values)
    if op.kind == "potential":
        return psi.with_values(op.potential * psi.values)
    if op.kind == "hamiltonian":
        d2 = derivative_values(psi.values, g, 2, method, fd_order)
        return psi.with_values(-d2 / (2.0 * op.mass) + op.potential * psi.values)
    raise OperatorError(f"unsupported operator kind {op.kind!r}")


def _warn_if_unnormalized(psi: GridField) -> None:
    norm = psi.norm2()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        warnings.warn(f"state norm is {norm:.12g}, expected 1", NormalizationWarning, stacklevel=3)


def expectation(op: OperatorDescriptor, psi: GridField, **kw) -> complex:
    _warn_if_unnormalized(psi)
    return psi.inner(apply_operator(op, psi, **kw))


def weak_value(op: OperatorDescriptor, post: GridField, psi: GridField,
               overlap_floor: float = DEFAULT_OVERLAP_FLOOR, **kw) -> complex:
    """``<post|op|psi> / <post|psi>``; raises if the overlap is below the floor."""
    overlap = post.inner(psi)
    scale = np.sqrt(post.norm2() * psi.norm2())
    if abs(overlap) <= overlap_floor * scale:
        raise OrthogonalPostSelectionError(
            f"|<post|psi>| = {abs(overlap):.3e} is below the floor {overlap_floor * scale:.3e}")
    return post.inner(apply_operator(op, psi, **kw)) / overlap


def weak_value_field(op: OperatorDescriptor, psi: GridField,
                     node_threshold: float = DEFAULT_NODE_THRESHOLD, **kw) -> np.ndarray:
    """Position-post-selected weak value at every grid point; NaN at nodes."""
    valid = node_mask(psi.values, node_threshold)
    out = np.full(psi.grid.n, np.nan + 0j)
    applied = apply_operator(op, psi, **kw).values
    out[valid] = applied[valid] / psi.values[valid]
    return out


def weak_value_position(op: OperatorDescriptor, k: int, psi: GridField,
                        node_threshold: float = DEFAULT_NODE_THRESHOLD, **kw) -> complex:
    valid = node_mask(psi.values, node_threshold)
    if not valid[k]:
        raise NodeError(f"x[{k}] = {psi.grid.x[k]:.6g} is a node of the state")
    return complex(apply_operator(op, psi, **kw).values[k] / psi.values[k])


def bohm_momentum(psi: GridField, **kw) -> np.ndarray:
    return weak_value_field(momentum(), psi, **kw).real


def osmotic_momentum(psi: GridField, **kw) -> np.ndarray:
    """``grad(rho) / (2 rho)``, read off the weak value's imaginary part."""
    return -weak_value_field(momentum(), psi, **kw).imag


def osmotic_velocity(psi: GridField, mass: float, **kw) -> np.ndarray:
    """``D grad(rho) / rho`` with ``D = 1/2m``."""
    _check_mass(mass)
    return osmotic_momentum(psi, **kw) / mass


def forward_backward_velocities(psi: GridField, mass: float, **kw) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(b, b_star)``: the left-acting and right-acting momentum weak values over m.

    ``(b + b_star)/2`` is the Bohm velocity and ``(b - b_star)/2`` equals
    ``i * osmotic_velocity``.
    """
    _check_mass(mass)
    right = weak_value_field(momentum(), psi, **kw)
    return np.conj(right) / mass, right / mass


def wiseman_velocity(psi: GridField, mass: float, v=0.0, **kw) -> np.ndarray:
    """``Re <x| i[H, X] |psi> / <x|psi>`` by explicit commutator composition."""
    _check_mass(mass)
    h = hamiltonian(mass, v)
    x = position()
    node_threshold = kw.pop("node_threshold", DEFAULT_NODE_THRESHOLD)
    hx = apply_operator(h, apply_operator(x, psi, **kw), **kw).values
    xh = apply_operator(x, apply_operator(h, psi, **kw), **kw).values
    commutator = 1j * (hx - xh)
    valid = node_mask(psi.values, node_threshold)
    out = np.full(psi.grid.n, np.nan)
    out[valid] = (commutator[valid] / psi.values[valid]).real
    return out


def polar_momenta(psi: GridField, node_threshold: float = DEFAULT_NODE_THRESHOLD,
                  **kw) -> tuple[np.ndarray, np.ndarray]:
    """``(grad S, grad(rho) / (2 rho))`` without forming ``grad psi / psi``.

    With ``psi = a + i b``, ``grad S = (a grad b - b grad a) / rho``; the second
    entry differentiates ``rho`` itself.  NaN at nodes.
    """
    require_position(psi)
    g = psi.grid
    a, b = psi.values.real, psi.values.imag
    rho = a ** 2 + b ** 2
    valid = node_mask(psi.values, node_threshold)
    grad_s = np.full(g.n, np.nan)
    osm = np.full(g.n, np.nan)
    num = a * derivative_values(b, g, 1, **kw) - b * derivative_values(a, g, 1, **kw)
    grad_s[valid] = num[valid] / rho[valid]
    osm[valid] = derivative_values(rho, g, 1, **kw)[valid] / (2 * rho[valid])
    return grad_s, osm


def quantum_potential(psi: GridField, node_threshold: float = DEFAULT_NODE_THRESHOLD,
                      route: Literal["density", "amplitude"] = "density", **kw) -> np.ndarray:
    """``Q = -grad^2 R / R`` (mass-1/2 convention) at valid points.

    ``route="density"`` evaluates the identity
    ``grad^2 R / R = grad^2 rho / (2 rho) - (grad rho / (2 rho))^2``, which stays
    spectrally accurate when R has a kink at a node.  ``route="amplitude"``
    differentiates R itself and is only accurate for node-free states.
    """
    require_position(psi)
    polar = polar_decompose(psi, node_threshold)
    g = psi.grid
    out = np.full(g.n, np.nan)
    v = polar.valid
    if route == "density":
        rho = polar.density
        d1 = derivative_values(rho, g, 1, **kw)
        d2 = derivative_values(rho, g, 2, **kw)
        out[v] = -(d2[v] / (2 * rho[v]) - (d1[v] / (2 * rho[v])) ** 2)
    elif route == "amplitude":
        d2 = derivative_values(polar.r_amp, g, 2, **kw)
        out[v] = -d2[v] / polar.r_amp[v]
    else:
        raise ValueError(f"unknown route {route!r}")
    return out


@dataclass(frozen=True)
class BohmRecord:
    bohm_momentum: np.ndarray
    osmotic_momentum: np.ndarray
    quantum_potential: np.ndarray
    bohm_kinetic: np.ndarray
    valid: np.ndarray


def bohm_record(psi: GridField, node_threshold: float = DEFAULT_NODE_THRESHOLD, **kw) -> BohmRecord:
    wv = weak_value_field(momentum(), psi, node_threshold=node_threshold, **kw)
    return BohmRecord(
        bohm_momentum=wv.real,
        osmotic_momentum=-wv.imag,
        quantum_potential=quantum_potential(psi, node_threshold, **kw),
        bohm_kinetic=wv.real ** 2,
        valid=node_mask(psi.values, node_threshold),
    )


def weak_expectation_identity(op: OperatorDescriptor, psi: GridField,
                              node_threshold: float = DEFAULT_NODE_THRESHOLD,
                              **kw) -> tuple[complex, complex]:
    """Position-basis weak decomposition of ``<op>`` next to the direct expectation.

    Returns ``(dx * sum_k rho(x_k) A_w(x_k), <psi|op|psi>)``; nodes carry no weight.
    """
    wv = weak_value_field(op, psi, node_threshold=node_threshold, **kw)
    valid = ~np.isnan(wv)
    rho = np.abs(psi.values) ** 2
    weak_sum = complex(psi.grid.dx * np.sum(rho[valid] * wv[valid]))
    return weak_sum, expectation(op, psi, **kw)


def _check_mass(mass: float) -> None:
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
