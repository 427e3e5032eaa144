"""Wigner-Moyal phase space: distributions, star products with p and p^2, brackets, moments.

Tables are indexed ``values[k, j]`` for position ``x_k`` and momentum ``p_j``
of the underlying :class:`~bohm_moyal.grid.Grid`.  The distribution is

    f(x, p) = (1 / 2 pi) * integral psi*(x - y/2) psi(x + y/2) exp(-i p y) dy,

normalized so that its p-marginal is ``|psi(x)|^2`` and its x-marginal is
``|phi(p)|^2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .exceptions import GridError, NodeError, NormalizationWarning, OperatorError, RepresentationError
from .grid import (
    DEFAULT_NODE_THRESHOLD,
    Grid,
    GridField,
    derivative_values,
    interpolate,
    require_position,
    to_momentum,
    to_position,
)

REALITY_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-8

# Coefficients of the truncated Groenewold expansions.
#   s * W = s W + c1 * (d/dx) W                      for s = p
#   s * W = s W + c1 * p (d/dx) W + c2 (d/dx)^2 W    for s = p^2
# "left" is s*W, "right" is W*s.
STAR_P = {"left": -0.5j, "right": 0.5j}
STAR_P2 = {"left": (-1j, -0.25), "right": (1j, -0.25)}


@dataclass(frozen=True)
class WignerTable:
    grid: Grid
    values: np.ndarray
    scalar_kind: Literal["real", "complex"] = "real"

    def __post_init__(self):
        vals = np.array(self.values, copy=True)
        if vals.shape != (self.grid.n, self.grid.n):
            raise GridError(f"expected a {self.grid.n}x{self.grid.n} table, got {vals.shape}")
        vals = vals.astype(float if self.scalar_kind == "real" else complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def total(self) -> complex | float:
        s = self.grid.dx * self.grid.dp * self.values.sum()
        return float(s) if self.scalar_kind == "real" else complex(s)

    def __add__(self, other: "WignerTable") -> "WignerTable":
        if other.grid != self.grid:
            raise GridError("tables live on different grids")
        kind = "real" if self.scalar_kind == other.scalar_kind == "real" else "complex"
        return WignerTable(self.grid, self.values + other.values, kind)


def _check_normalized(*fields: GridField) -> None:
    for f in fields:
        norm = f.norm2()
        if abs(norm - 1.0) > NORM_TOLERANCE:
            warnings.warn(f"state norm is {norm:.12g}, expected 1", NormalizationWarning,
                          stacklevel=3)


def upsample2(values: np.ndarray) -> np.ndarray:
    """Band-limited 2x refinement by zero padding the spectrum.

    Even output indices reproduce the input; odd indices are the half-step
    values of the trigonometric interpolant.
    """
    n = values.shape[-1]
    spectrum = np.fft.fft(values)
    padded = np.zeros(2 * n, complex)
    padded[: n // 2] = spectrum[: n // 2]
    padded[-n // 2 + 1:] = spectrum[n // 2 + 1:]
    # split the unpaired Nyquist coefficient symmetrically
    padded[n // 2] = 0.5 * spectrum[n // 2]
    padded[-n // 2] = 0.5 * spectrum[n // 2]
    return 2.0 * np.fft.ifft(padded)


def _correlation(psi: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """``C[k, m] = conj(psi(x_k - m dx/2)) chi(x_k + m dx/2)`` for ``m`` in [-n/2, n/2).

    The lag window is the periodic one, |y| <= L/2, with the two end lags
    averaged (trapezoid) so that Hermitian lag symmetry is exact.
    """
    n = psi.size
    up_psi = upsample2(psi)
    up_chi = upsample2(chi)
    k = np.arange(n)[:, None]
    m = np.arange(-n // 2, n // 2 + 1)[None, :]
    c = np.conj(up_psi[(2 * k - m) % (2 * n)]) * up_chi[(2 * k + m) % (2 * n)]
    c[:, 0] *= 0.5
    c[:, -1] *= 0.5
    folded = c[:, :-1].copy()
    folded[:, 0] += c[:, -1]  # lag +n/2 aliases onto -n/2 under exp(-i p_j m dx)
    return folded


def _lag_transform(corr: np.ndarray, grid: Grid) -> np.ndarray:
    """``(dx / 2 pi) sum_m C[k, m] exp(-i p_j m dx)`` for all (k, j)."""
    # column i of corr holds lag m = i - n/2; reorder to m mod n for the FFT
    spectrum = np.fft.fft(np.fft.ifftshift(corr, axes=1), axis=1)
    return grid.dx / (2.0 * np.pi) * np.fft.fftshift(spectrum, axes=1)


def cross_wigner(psi: GridField, chi: GridField) -> WignerTable:
    """Sesquilinear cross-Wigner function, conjugate-linear in ``psi``."""
    require_position(psi)
    require_position(chi)
    if psi.grid != chi.grid:
        raise GridError("cross_wigner needs both states on the same grid")
    _check_normalized(psi, chi)
    vals = _lag_transform(_correlation(psi.values, chi.values), psi.grid)
    return WignerTable(psi.grid, vals, "complex")


def wigner_complex(psi: GridField) -> np.ndarray:
    """Wigner values before the imaginary round-off residue is dropped."""
    require_position(psi)
    return _lag_transform(_correlation(psi.values, psi.values), psi.grid)


def wigner(psi: GridField, check_norm: bool = True) -> WignerTable:
    if check_norm:
        _check_normalized(psi)
    vals = wigner_complex(psi)
    residue = np.abs(vals.imag).max()
    if residue > REALITY_TOLERANCE * max(1.0, np.abs(vals.real).max()):
        raise ArithmeticError(f"Wigner table has imaginary residue {residue:.3e}")
    return WignerTable(psi.grid, vals.real, "real")


def wigner_point(psi: GridField, x: float, p) -> np.ndarray:
    """Wigner function at an arbitrary point, off-lattice in x and p.

    Uses the same lag window as :func:`wigner` with the band-limited
    interpolant supplying ``psi(x -+ y/2)``.
    """
    require_position(psi)
    g = psi.grid
    p = np.atleast_1d(np.asarray(p, float))
    m = np.arange(-g.n // 2, g.n // 2 + 1)
    weights = np.ones(m.size)
    weights[[0, -1]] = 0.5
    half = 0.5 * m * g.dx
    left = interpolate(psi.values, g, x - half)
    right = interpolate(psi.values, g, x + half)
    corr = weights * np.conj(left) * right
    vals = g.dx / (2.0 * np.pi) * np.exp(-1j * np.outer(p, m * g.dx)) @ corr
    return vals.real


def padded_grid(grid: Grid) -> Grid:
    """Grid of twice the length and point count, sharing the spacing and center."""
    return Grid(2 * grid.n, 2.0 * grid.length, grid.center)


def refined_momentum(phi: GridField) -> np.ndarray:
    """Momentum amplitudes on the half-spacing lattice ``q_r = pi r / L``, r in [-n, n).

    Obtained by zero-extending the position state to twice the domain; even
    entries reproduce ``phi`` itself.
    """
    if phi.representation != "momentum":
        phi = to_momentum(phi)
    g = phi.grid
    psi = to_position(phi).values
    big = padded_grid(g)
    extended = np.zeros(big.n, complex)
    extended[g.n // 2: g.n // 2 + g.n] = psi
    return to_momentum(GridField(big, extended)).values


def midpoint_transform(kernel: np.ndarray, grid: Grid) -> np.ndarray:
    """Phase-space table from a momentum kernel ``K[r2, r1]`` on the refined lattice.

    Evaluates ``f(x, p_j) = (1/L) sum_{r1 + r2 = 4j} K[r2, r1] exp(i x (q_r2 - q_r1))``,
    the lattice form of the double integral with kernel delta(p - (p1 + p2)/2).
    """
    n = grid.n
    r = np.arange(-n, n)
    q = np.pi * r / grid.length
    j = np.arange(-n // 2, n // 2)
    r2 = 4 * j[:, None] - r[None, :]  # partner index for each (j, r1)
    inside = (r2 >= -n) & (r2 < n)
    pairs = np.zeros((n, 2 * n), complex)
    jj, ii = np.nonzero(inside)
    pairs[jj, ii] = kernel[r2[jj, ii] + n, ii]
    x = grid.x
    basis = np.exp(-2j * np.outer(x, q))  # exp(-2 i x q_r1)
    lead = np.exp(2j * np.outer(x, 2.0 * np.pi * j / grid.length))  # exp(i x q_4j)
    return lead * (basis @ pairs.T) / grid.length


def wigner_momentum_route(phi: GridField, check_norm: bool = True) -> WignerTable:
    """Wigner table from momentum amplitudes via the midpoint double sum."""
    if phi.representation != "momentum":
        raise RepresentationError("wigner_momentum_route expects a momentum-representation field")
    if check_norm:
        _check_normalized(phi)
    fine = refined_momentum(phi)
    vals = midpoint_transform(np.outer(fine, np.conj(fine)), phi.grid)
    return WignerTable(phi.grid, vals.real, "real")


def marginal_p(table: WignerTable) -> np.ndarray:
    """Integral over p: the position density."""
    return (table.grid.dp * table.values.sum(axis=1)).real


def marginal_x(table: WignerTable) -> np.ndarray:
    """Integral over x: the momentum density."""
    return (table.grid.dx * table.values.sum(axis=0)).real


def _dx(values: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    return derivative_values(values.T, grid, order).T


def _p_column(grid: Grid) -> np.ndarray:
    return grid.p[None, :]


def _star_p(table: WignerTable, side: str) -> WignerTable:
    w = table.values
    vals = _p_column(table.grid) * w + STAR_P[side] * _dx(w, table.grid)
    return WignerTable(table.grid, vals, "complex")


def _star_p2(table: WignerTable, side: str) -> WignerTable:
    w = table.values
    g = table.grid
    p = _p_column(g)
    c1, c2 = STAR_P2[side]
    vals = p ** 2 * w + c1 * p * _dx(w, g) + c2 * _dx(w, g, 2)
    return WignerTable(g, vals, "complex")


def star_left_p(table: WignerTable) -> WignerTable:
    """``p * W``."""
    return _star_p(table, "left")


def star_right_p(table: WignerTable) -> WignerTable:
    """``W * p``."""
    return _star_p(table, "right")


def star_left_p2(table: WignerTable) -> WignerTable:
    return _star_p2(table, "left")


def star_right_p2(table: WignerTable) -> WignerTable:
    return _star_p2(table, "right")


_STAR_OPS: dict[str, tuple[Callable, Callable]] = {
    "p": (star_left_p, star_right_p),
    "p2": (star_left_p2, star_right_p2),
}


def _star_pair(symbol: str, table: WignerTable) -> tuple[np.ndarray, np.ndarray]:
    try:
        left, right = _STAR_OPS[symbol]
    except KeyError:
        raise OperatorError(f"star products are implemented for 'p' and 'p2', not {symbol!r}") from None
    return left(table).values, right(table).values


def baker_bracket(symbol: str, table: WignerTable) -> WignerTable:
    """``(W * s + s * W) / 2``."""
    left, right = _star_pair(symbol, table)
    return WignerTable(table.grid, (right + left) / 2, "complex")


def moyal_bracket(symbol: str, table: WignerTable) -> WignerTable:
    """``(W * s - s * W) / i``."""
    left, right = _star_pair(symbol, table)
    return WignerTable(table.grid, (right - left) / 1j, "complex")


def _p_integral(values: np.ndarray, grid: Grid) -> np.ndarray:
    return grid.dp * values.sum(axis=1)


def _valid_density(rho: np.ndarray, node_threshold: float) -> np.ndarray:
    peak = rho.max()
    if not peak > 0:
        raise NodeError("density vanishes everywhere")
    return rho > node_threshold ** 2 * peak


def _ratio(num: np.ndarray, rho: np.ndarray, node_threshold: float) -> np.ndarray:
    valid = _valid_density(rho, node_threshold)
    out = np.full(rho.shape, np.nan)
    out[valid] = num[valid] / rho[valid]
    return out


def moment_point_split(psi: GridField, n: int, ratio: bool = False,
                       node_threshold: float = DEFAULT_NODE_THRESHOLD, **kw) -> np.ndarray:
    """``(1/2i)^n [(d/dx1 - d/dx2)^n psi(x1) psi*(x2)]`` on the diagonal ``x1 = x2 = x``.

    This is ``rho(x) <<p^n>>(x)``; with ``ratio=True`` it is divided by rho at
    valid points.
    """
    require_position(psi)
    v = psi.values
    d1 = derivative_values(v, psi.grid, 1, **kw)
    if n == 1:
        out = (np.conj(v) * d1).imag
    elif n == 2:
        d2 = derivative_values(v, psi.grid, 2, **kw)
        out = 0.5 * np.abs(d1) ** 2 - 0.5 * (np.conj(v) * d2).real
    else:
        raise ValueError(f"moment order must be 1 or 2, got {n}")
    if not ratio:
        return out
    return _ratio(out, np.abs(v) ** 2, node_threshold)


def bohm_momentum_moyal(table: WignerTable, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> np.ndarray:
    """Conditional mean momentum ``int p f dp / rho``."""
    g = table.grid
    first = _p_integral(_p_column(g) * table.values, g).real
    return _ratio(first, marginal_p(table), node_threshold)


def osmotic_moyal(table: WignerTable, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> np.ndarray:
    """``int [p, f]_MB dp / 2 rho``, the osmotic momentum."""
    mb = _p_integral(moyal_bracket("p", table).values, table.grid).real
    return _ratio(mb, 2.0 * marginal_p(table), node_threshold)


def kinetic_baker(table: WignerTable, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> np.ndarray:
    """``int [p^2, f]_BB dp / rho`` = Bohm kinetic energy + quantum potential (mass 1/2)."""
    bb = _p_integral(baker_bracket("p2", table).values, table.grid).real
    return _ratio(bb, marginal_p(table), node_threshold)


def kinetic_moyal(table: WignerTable, node_threshold: float = DEFAULT_NODE_THRESHOLD) -> np.ndarray:
    """``int [p^2, f]_MB dp / 2 rho`` = ``grad^2 S + (grad rho / rho) grad S``.

    The p^2 Moyal bracket is ``2 p d/dx f``, so its p-integral is
    ``2 d/dx (rho grad S)``; the factor 2 is divided out as for the osmotic term.
    """
    mb = _p_integral(moyal_bracket("p2", table).values, table.grid).real
    return _ratio(mb, 2.0 * marginal_p(table), node_threshold)
