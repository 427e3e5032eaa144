"""Spin-half layer: two-component spinors, their phase-space density F(x, p), and Bohm variables.

All formulas act on a 1-D spatial slice and use the mass-1/2 convention of
the Moyal kinetic-energy marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import clifford
from .exceptions import GridError, NodeError, RepresentationError
from .grid import (
    DEFAULT_NODE_THRESHOLD,
    Grid,
    GridField,
    derivative_values,
    run_gradient,
    valid_runs,
)
from .moyal import (
    WignerTable,
    baker_bracket,
    bohm_momentum_moyal,
    midpoint_transform,
    refined_momentum,
    wigner,
)
from .weak import apply_operator, hamiltonian, position

DEGENERACY_TOLERANCE = 1e-8
# ratio comparisons are made where rho exceeds this fraction of its peak
WELL_CONDITIONED = 1e-6


@dataclass(frozen=True)
class SpinorField:
    c1: GridField
    c2: GridField

    def __post_init__(self):
        if self.c1.grid != self.c2.grid:
            raise GridError("spinor components live on different grids")
        if self.c1.representation != self.c2.representation:
            raise RepresentationError("spinor components are in different representations")

    @classmethod
    def from_arrays(cls, grid: Grid, psi1, psi2) -> "SpinorField":
        return cls(GridField(grid, psi1), GridField(grid, psi2))

    @property
    def grid(self) -> Grid:
        return self.c1.grid

    def density(self) -> np.ndarray:
        return np.abs(self.c1.values) ** 2 + np.abs(self.c2.values) ** 2

    def norm2(self) -> float:
        return self.c1.norm2() + self.c2.norm2()

    def normalized(self) -> "SpinorField":
        s = 1.0 / np.sqrt(self.norm2())
        return SpinorField(self.c1 * s, self.c2 * s)


@dataclass(frozen=True)
class CayleyKleinFields:
    """``Psi = R exp(iS/2) (cos(theta/2) exp(i phi/2), i sin(theta/2) exp(-i phi/2))``."""

    grid: Grid
    big_r: np.ndarray
    big_s: np.ndarray
    theta: np.ndarray
    phi_angle: np.ndarray
    valid: np.ndarray
    phi_valid: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("big_r", "big_s", "theta", "phi_angle"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape == ():
                arr = np.full(self.grid.n, float(arr))
            if arr.shape != (self.grid.n,):
                raise GridError(f"{name} must have {self.grid.n} samples")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        valid = np.broadcast_to(np.asarray(self.valid, bool), (self.grid.n,)).copy()
        phi_valid = valid.copy() if self.phi_valid is None else np.asarray(self.phi_valid, bool) & valid
        object.__setattr__(self, "valid", valid)
        object.__setattr__(self, "phi_valid", phi_valid)


def cayley_klein_state(grid: Grid, envelope_sigma: float = 1.0, p0: float = 0.0,
                       theta0: float = np.pi / 2, theta_slope: float = 0.0,
                       phi0: float = 0.0, phi_slope: float = 0.0) -> CayleyKleinFields:
    """Normalized Gaussian envelope with linear S = 2 p0 x, theta and phi profiles.

    ``S = 2 p0 x`` makes the Bohm momentum equal ``p0`` at a pole (theta = 0).
    """
    if envelope_sigma <= 0:
        raise ValueError("envelope_sigma must be positive")
    x = grid.x
    r = (2 * np.pi * envelope_sigma ** 2) ** -0.25 * np.exp(-x ** 2 / (4 * envelope_sigma ** 2))
    return CayleyKleinFields(grid, r, 2 * p0 * x, theta0 + theta_slope * x,
                             phi0 + phi_slope * x, np.ones(grid.n, bool))


def cayley_klein_compose(ck: CayleyKleinFields, grid: Grid | None = None) -> SpinorField:
    grid = grid or ck.grid
    if grid != ck.grid:
        raise GridError("Cayley-Klein fields were built on a different grid")
    r, s, th, ph = ck.big_r, ck.big_s, ck.theta, ck.phi_angle
    psi1 = r * np.cos(th / 2) * np.exp(0.5j * (s + ph))
    psi2 = 1j * r * np.sin(th / 2) * np.exp(0.5j * (s - ph))
    mask = ck.valid
    return SpinorField.from_arrays(grid, np.where(mask, psi1, 0), np.where(mask, psi2, 0))


def _unwrap_on(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full(values.shape, np.nan)
    angles = np.angle(values)
    for start, stop in valid_runs(mask):
        out[start:stop] = np.unwrap(angles[start:stop])
    return out


def cayley_klein_decompose(s: SpinorField,
                           node_threshold: float = DEFAULT_NODE_THRESHOLD) -> CayleyKleinFields:
    """Invert the Cayley-Klein form at valid points.

    ``S = S1 + S2 - pi/2`` and ``phi = S1 - S2 + pi/2`` from the unwrapped
    component phases; S and phi are zeroed (and ``phi_valid`` False) where
    ``sin(theta)`` falls below :data:`DEGENERACY_TOLERANCE`.
    """
    rho = s.density()
    peak = rho.max()
    if not peak > 0:
        raise NodeError("spinor vanishes everywhere")
    valid = rho > node_threshold ** 2 * peak
    a1, a2 = np.abs(s.c1.values), np.abs(s.c2.values)
    theta = 2.0 * np.arctan2(a2, a1)
    phi_valid = valid & (np.sin(theta) > DEGENERACY_TOLERANCE)
    s1 = _unwrap_on(s.c1.values, phi_valid)
    s2 = _unwrap_on(s.c2.values, phi_valid)
    big_s = s1 + s2 - np.pi / 2
    phi = s1 - s2 + np.pi / 2
    return CayleyKleinFields(s.grid, np.sqrt(rho), np.where(phi_valid, big_s, 0.0),
                             np.where(valid, theta, 0.0), np.where(phi_valid, phi, 0.0),
                             valid, phi_valid)


def pauli_wigner(s: SpinorField) -> WignerTable:
    """``F(x, p)``: the M-kernel separates, so F is the sum of component Wigner tables."""
    return wigner(s.c1, check_norm=False) + wigner(s.c2, check_norm=False)


def pauli_wigner_trace(s: SpinorField) -> WignerTable:
    """``F(x, p)`` from traces of Clifford density kernels of momentum-space ideal elements.

    Each momentum sample ``(phi1, phi2)(q)`` is encoded as ``[phi1 + phi2 e1] eps``;
    ``Tr[Xi(q2) reverse(Xi(q1))]`` (complex trace, e123 -> i) is the pair kernel
    fed to the midpoint sum.
    """
    fine1 = refined_momentum(s.c1)
    fine2 = refined_momentum(s.c2)
    xi = clifford.spinor_to_ideal(fine1, fine2).mv
    kernel_mv = clifford.product(xi[:, None], clifford.reverse(xi)[None, :])
    kernel = clifford.complex_trace(kernel_mv)
    vals = midpoint_transform(kernel, s.grid)
    return WignerTable(s.grid, vals.real, "real")


def _well_conditioned(rho: np.ndarray) -> np.ndarray:
    return rho > WELL_CONDITIONED * rho.max()


def component_currents(s: SpinorField, **kw) -> np.ndarray:
    """``rho1 grad S1 + rho2 grad S2``, each term written as ``Im(psi_i* grad psi_i)``."""
    total = np.zeros(s.grid.n)
    for c in (s.c1, s.c2):
        d = derivative_values(c.values, s.grid, 1, **kw)
        total += (np.conj(c.values) * d).imag
    return total


def bohm_momentum_pauli(s: SpinorField, node_threshold: float = DEFAULT_NODE_THRESHOLD,
                        check: bool = True, tolerance: float = 1e-6, **kw) -> np.ndarray:
    """Component-sum Bohm momentum ``(rho1 grad S1 + rho2 grad S2) / rho``.

    With ``check=True`` the first p-moment of :func:`pauli_wigner` is computed
    too and an ``ArithmeticError`` is raised if the two disagree by more than
    ``tolerance`` where rho is well conditioned.
    """
    rho = s.density()
    valid = rho > node_threshold ** 2 * rho.max()
    out = np.full(s.grid.n, np.nan)
    out[valid] = component_currents(s, **kw)[valid] / rho[valid]
    if check:
        moment = bohm_momentum_moyal(pauli_wigner(s), node_threshold)
        good = _well_conditioned(rho)
        dev = np.max(np.abs(moment[good] - out[good]))
        if dev > tolerance:
            raise ArithmeticError(f"Bohm momentum routes disagree by {dev:.3e}")
    return out


def _phase_gradients(ck: CayleyKleinFields) -> tuple[np.ndarray, np.ndarray]:
    dx = ck.grid.dx
    return run_gradient(ck.big_s, ck.phi_valid, dx), run_gradient(ck.phi_angle, ck.phi_valid, dx)


def bst_momentum(ck: CayleyKleinFields) -> np.ndarray:
    """``grad S / 2 + cos(theta) grad phi / 2``; NaN at phi-indeterminate points."""
    grad_s, grad_phi = _phase_gradients(ck)
    return 0.5 * grad_s + 0.5 * np.cos(ck.theta) * grad_phi


def pauli_kinetic(s: SpinorField, check: bool = True, tolerance: float = 1e-5, **kw) -> np.ndarray:
    """Density-form Bohm kinetic energy plus quantum potential, summed over components.

    ``rho_i (grad S_i)^2 - R_i grad^2 R_i`` is evaluated per component in the
    division-free form ``|grad psi_i|^2 - grad^2(rho_i) / 2``, which holds
    through component nodes.  ``check=True`` compares with the p-integral of
    the p^2 Baker bracket of :func:`pauli_wigner`.
    """
    g = s.grid
    total = np.zeros(g.n)
    for c in (s.c1, s.c2):
        d1 = derivative_values(c.values, g, 1, **kw)
        rho_i = np.abs(c.values) ** 2
        total += np.abs(d1) ** 2 - 0.5 * derivative_values(rho_i, g, 2, **kw)
    if check:
        bb = g.dp * baker_bracket("p2", pauli_wigner(s)).values.sum(axis=1).real
        dev = np.max(np.abs(bb - total))
        if dev > tolerance:
            raise ArithmeticError(f"kinetic-energy routes disagree by {dev:.3e}")
    return total


def pauli_quantum_potential(ck: CayleyKleinFields, **kw) -> np.ndarray:
    """``-grad^2 R / R + (grad theta / 2)^2 + sin^2(theta) (grad phi / 2)^2``.

    The amplitude term uses ``rho = R^2`` (spectral); the angle gradients use
    run-wise finite differences.  The phi term is zero where sin(theta)
    vanishes, so phi-indeterminate points contribute nothing to it.
    """
    g = ck.grid
    rho = ck.big_r ** 2
    out = np.full(g.n, np.nan)
    v = ck.valid & (rho > 0)
    d1 = derivative_values(rho, g, 1, **kw)
    d2 = derivative_values(rho, g, 2, **kw)
    amp = -(d2[v] / (2 * rho[v]) - (d1[v] / (2 * rho[v])) ** 2)
    grad_theta = run_gradient(ck.theta, ck.valid, g.dx)
    _, grad_phi = _phase_gradients(ck)
    spin = np.where(ck.phi_valid, np.sin(ck.theta) ** 2 * (0.5 * np.nan_to_num(grad_phi)) ** 2, 0.0)
    out[v] = amp + (0.5 * grad_theta[v]) ** 2 + spin[v]
    return out


def wiseman_velocity_pauli(s: SpinorField, mass: float, v=0.0,
                           node_threshold: float = DEFAULT_NODE_THRESHOLD, **kw) -> np.ndarray:
    """``sum_i Re(psi_i* i[H, X] psi_i) / rho``, composed per component."""
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    h, x = hamiltonian(mass, v), position()
    num = np.zeros(s.grid.n)
    for c in (s.c1, s.c2):
        comm = 1j * (apply_operator(h, apply_operator(x, c, **kw), **kw).values
                     - apply_operator(x, apply_operator(h, c, **kw), **kw).values)
        num += (np.conj(c.values) * comm).real
    rho = s.density()
    valid = rho > node_threshold ** 2 * rho.max()
    out = np.full(s.grid.n, np.nan)
    out[valid] = num[valid] / rho[valid]
    return out
