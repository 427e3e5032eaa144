"""Test-state constructors: Gaussian packets, superpositions, lattice plane waves."""

from __future__ import annotations

import numpy as np

from .grid import Grid, GridField


def gaussian(grid: Grid, x0: float = 0.0, p0: float = 0.0, sigma: float = 1.0) -> GridField:
    """Normalized packet with density ``exp(-(x-x0)^2 / 2 sigma^2)`` and phase ``p0 x``.

    The Wigner function is ``exp(-(x-x0)^2/2s^2) exp(-2 s^2 (p-p0)^2) / pi``.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = grid.x
    amp = (2.0 * np.pi * sigma ** 2) ** -0.25
    values = amp * np.exp(-((x - x0) ** 2) / (4.0 * sigma ** 2) + 1j * p0 * x)
    return GridField(grid, values)


def two_gaussian(grid: Grid, x0a: float, x0b: float, p0a: float = 0.0, p0b: float = 0.0,
                 sigma: float = 1.0, rel_phase: float = 0.0) -> GridField:
    """Normalized superposition ``G_a + exp(i rel_phase) G_b``."""
    a = gaussian(grid, x0a, p0a, sigma).values
    b = gaussian(grid, x0b, p0b, sigma).values
    return GridField(grid, a + np.exp(1j * rel_phase) * b).normalized()


def plane_wave(grid: Grid, mode_index: int) -> GridField:
    """Lattice mode ``exp(i p_j x) / sqrt(L)``, normalized on the grid."""
    k = grid.p[grid.mode_index(mode_index)]
    return GridField(grid, np.exp(1j * k * grid.x) / np.sqrt(grid.length))


def random_smooth_state(grid: Grid, rng: np.random.Generator, n_packets: int = 3,
                        spread: float = 3.0, sigma_range=(0.8, 1.5),
                        p_range=(-2.0, 2.0)) -> GridField:
    """Normalized random sum of Gaussian packets, localized near the grid center."""
    values = np.zeros(grid.n, complex)
    for _ in range(n_packets):
        x0 = grid.center + rng.uniform(-spread, spread)
        p0 = rng.uniform(*p_range)
        sigma = rng.uniform(*sigma_range)
        coef = rng.normal() + 1j * rng.normal()
        values += coef * gaussian(grid, x0, p0, sigma).values
    return GridField(grid, values).normalized()
