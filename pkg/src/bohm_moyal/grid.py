"""Uniform periodic 1-D grids, complex fields on them, and spectral calculus.

Units have hbar = 1.  The Fourier pair used throughout is the symmetric one,

    phi(p_j) = dx / sqrt(2 pi) * sum_k psi(x_k) exp(-i p_j x_k),
    psi(x_k) = dp / sqrt(2 pi) * sum_j phi(p_j) exp(+i p_j x_k),

which is unitary on the lattice: dp * sum |phi|^2 == dx * sum |psi|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .exceptions import GridError, NodeError, RepresentationError

Representation = Literal["position", "momentum"]

SQRT_2PI = np.sqrt(2.0 * np.pi)
DEFAULT_NODE_THRESHOLD = 1e-12


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """Periodic grid of ``n`` points covering ``[center - length/2, center + length/2)``."""

    n: int
    length: float
    center: float = 0.0

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise GridError(f"grid size must be an integer, got {n!r}")
        if n < 8 or n & (n - 1):
            raise GridError(f"grid size must be a power of two >= 8, got {n}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise GridError(f"grid length must be positive, got {self.length}")
        if not np.isfinite(self.center):
            raise GridError(f"grid center must be finite, got {self.center}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "center", float(self.center))

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dp(self) -> float:
        return 2.0 * np.pi / self.length

    @cached_property
    def x(self) -> np.ndarray:
        return _frozen(self.center - 0.5 * self.length + self.dx * np.arange(self.n), float)

    @cached_property
    def p(self) -> np.ndarray:
        """Momentum lattice ``p_j = 2 pi j / L`` for ``j = -n/2 .. n/2 - 1``."""
        return _frozen(self.dp * np.arange(-self.n // 2, self.n // 2), float)

    def mode_index(self, j: int) -> int:
        """Array index of lattice momentum ``p_j`` in :attr:`p`."""
        if not -self.n // 2 <= j < self.n // 2:
            raise GridError(f"mode {j} outside lattice range [{-self.n // 2}, {self.n // 2})")
        return j + self.n // 2

    def spacing(self, representation: Representation) -> float:
        return self.dx if representation == "position" else self.dp


def build_grid(n: int, length: float, center: float = 0.0) -> Grid:
    return Grid(n, length, center)


@dataclass(frozen=True)
class GridField:
    """Complex samples of a wavefunction in the position or momentum representation."""

    grid: Grid
    values: np.ndarray
    representation: Representation = "position"

    def __post_init__(self):
        if self.representation not in ("position", "momentum"):
            raise RepresentationError(f"unknown representation {self.representation!r}")
        values = np.asarray(self.values)
        if values.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} samples, got shape {values.shape}")
        object.__setattr__(self, "values", _frozen(values, complex))

    @property
    def spacing(self) -> float:
        return self.grid.spacing(self.representation)

    def norm2(self) -> float:
        return float(self.spacing * np.sum(np.abs(self.values) ** 2))

    def inner(self, other: "GridField") -> complex:
        """Quadrature inner product ``<self|other>``."""
        _check_compatible(self, other)
        return complex(self.spacing * np.vdot(self.values, other.values))

    def normalized(self) -> "GridField":
        return self.with_values(self.values / np.sqrt(self.norm2()))

    def with_values(self, values) -> "GridField":
        return GridField(self.grid, values, self.representation)

    def __add__(self, other: "GridField") -> "GridField":
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __mul__(self, scalar) -> "GridField":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


def _check_compatible(a: GridField, b: GridField) -> None:
    if a.grid != b.grid:
        raise GridError("fields live on different grids")
    if a.representation != b.representation:
        raise RepresentationError("fields are in different representations")


def require_position(f: GridField) -> None:
    if f.representation != "position":
        raise RepresentationError("expected a position-representation field")


def to_momentum(f: GridField) -> GridField:
    require_position(f)
    g = f.grid
    phase = np.exp(-1j * g.p * g.x[0])
    values = g.dx / SQRT_2PI * phase * np.fft.fftshift(np.fft.fft(f.values))
    return GridField(g, values, "momentum")


def to_position(f: GridField) -> GridField:
    if f.representation != "momentum":
        raise RepresentationError("expected a momentum-representation field")
    g = f.grid
    phase = np.exp(1j * g.p * g.x[0])
    values = g.dp / SQRT_2PI * g.n * np.fft.ifft(np.fft.ifftshift(phase * f.values))
    return GridField(g, values, "position")


# periodic central-difference stencils, keyed by (derivative order, accuracy order)
_FD_STENCILS = {
    (1, 2): {-1: -0.5, 1: 0.5},
    (1, 4): {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12},
    (2, 2): {-1: 1.0, 0: -2.0, 1: 1.0},
    (2, 4): {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
}


def derivative_values(values: np.ndarray, grid: Grid, order: int = 1,
                      method: str = "spectral", fd_order: int = 4) -> np.ndarray:
    """Periodic derivative of raw samples (real or complex) along the last axis.

    ``method="spectral"`` applies the Fourier multiplier ``(i p)**order``;
    ``method="fd"`` uses central differences of accuracy ``fd_order`` (2 or 4).
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    values = np.asarray(values)
    if method == "spectral":
        k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
        mult = (1j * k) ** order
        if order % 2:
            # odd derivatives of the unpaired Nyquist mode are not representable
            mult[grid.n // 2] = 0.0
        out = np.fft.ifft(mult * np.fft.fft(values, axis=-1), axis=-1)
        return out.real if np.isrealobj(values) else out
    if method == "fd":
        try:
            stencil = _FD_STENCILS[(order, fd_order)]
        except KeyError:
            raise ValueError(f"finite-difference accuracy must be 2 or 4, got {fd_order}") from None
        out = sum(w * np.roll(values, -s, axis=-1) for s, w in stencil.items())
        return out / grid.dx ** order
    raise ValueError(f"unknown derivative method {method!r}")


def spectral_derivative(f: GridField, order: int = 1, method: str = "spectral",
                        fd_order: int = 4) -> GridField:
    require_position(f)
    return f.with_values(derivative_values(f.values, f.grid, order, method, fd_order))


@dataclass(frozen=True)
class PolarField:
    """``psi = R exp(iS)`` sampled on a grid; ``phase`` is NaN where ``valid`` is False."""

    r_amp: np.ndarray
    phase: np.ndarray
    density: np.ndarray
    valid: np.ndarray = field(repr=False)

    def recompose(self) -> np.ndarray:
        out = np.zeros(self.r_amp.shape, complex)
        v = self.valid
        out[v] = self.r_amp[v] * np.exp(1j * self.phase[v])
        return out


def valid_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs ``[start, stop)`` of True entries (no periodic wrap)."""
    mask = np.asarray(mask, bool)
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def node_mask(values: np.ndarray, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> np.ndarray:
    if not 0.0 < node_threshold < 1.0:
        raise ValueError(f"node_threshold must lie in (0, 1), got {node_threshold}")
    amp = np.abs(values)
    peak = amp.max()
    if peak == 0.0:
        raise NodeError("field is identically zero; no valid points")
    return amp > node_threshold * peak


def polar_decompose(f: GridField, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> PolarField:
    require_position(f)
    valid = node_mask(f.values, node_threshold)
    r_amp = np.abs(f.values)
    phase = np.full(f.grid.n, np.nan)
    wrapped = np.angle(f.values)
    for start, stop in valid_runs(valid):
        phase[start:stop] = np.unwrap(wrapped[start:stop])
    return PolarField(_frozen(r_amp, float), _frozen(phase, float),
                      _frozen(r_amp ** 2, float), _frozen(valid, bool))


def run_gradient(values: np.ndarray, valid: np.ndarray, dx: float) -> np.ndarray:
    """First derivative of a field known only on ``valid`` runs (non-periodic).

    Fourth-order central differences in the run interior, second-order
    one-sided at run ends; NaN elsewhere and on runs shorter than three points.
    """
    out = np.full(values.shape, np.nan)
    for start, stop in valid_runs(valid):
        seg = values[start:stop]
        m = seg.size
        if m < 3:
            continue
        d = np.gradient(seg, dx, edge_order=2)
        if m >= 5:
            d[2:-2] = (-seg[4:] + 8 * seg[3:-1] - 8 * seg[1:-3] + seg[:-4]) / (12 * dx)
        out[start:stop] = d
    return out


def phase_gradient(polar: PolarField, grid: Grid) -> np.ndarray:
    """Gradient of the unwrapped phase S by finite differences along valid runs.

    This route never touches the complex field, so it is independent of the
    spectral weak-value route.
    """
    return run_gradient(polar.phase, polar.valid, grid.dx)


def interpolate(values: np.ndarray, grid: Grid, x, order: int = 0) -> np.ndarray:
    """Band-limited (trigonometric) interpolant of periodic samples, or its derivative.

    Exact for fields whose spectrum fits on the lattice with a vanishing
    Nyquist coefficient.
    """
    shape = np.shape(x)
    x = np.atleast_1d(np.asarray(x, float)).ravel()
    coeffs = np.fft.fftshift(np.fft.fft(np.asarray(values))) / grid.n
    coeffs[0] = 0.0  # unpaired Nyquist term
    p = grid.p
    basis = np.exp(1j * np.outer(x - grid.x[0], p)) * (1j * p) ** order
    out = (basis @ coeffs).reshape(shape)
    return out.real if np.isrealobj(values) else out
