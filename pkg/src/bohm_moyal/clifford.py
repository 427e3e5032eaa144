"""The real Pauli algebra C(3,0): exact products, reversion, the ideal C(3,0) eps.

Coefficients are stored over the blade basis

    [1, e1, e2, e3, e23, e13, e12, e123]

and may carry leading batch axes, so one :class:`Multivector` can hold a whole
field of algebra elements.  The pseudoscalar e123 is central and squares to
-1; on the left ideal it plays the role of the complex unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

BLADE_NAMES = ("1", "e1", "e2", "e3", "e23", "e13", "e12", "e123")
# generator bitmask of each stored blade (e1 -> 1, e2 -> 2, e3 -> 4)
BLADE_BITS = (0b000, 0b001, 0b010, 0b100, 0b110, 0b101, 0b011, 0b111)
GRADES = np.array([bin(b).count("1") for b in BLADE_BITS])
REVERSE_SIGNS = np.array([(-1) ** (g * (g - 1) // 2) for g in GRADES])
IDEAL_TOLERANCE = 1e-12


def _reorder_sign(a: int, b: int) -> int:
    """Sign from sorting the generator word ``a b`` into ascending order."""
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def _cayley_table() -> np.ndarray:
    """Integer structure constants ``T[i, j, k]`` with ``e_i e_j = sum_k T[i, j, k] e_k``."""
    index = {bits: i for i, bits in enumerate(BLADE_BITS)}
    table = np.zeros((8, 8, 8), dtype=np.int64)
    for i, a in enumerate(BLADE_BITS):
        for j, b in enumerate(BLADE_BITS):
            # Euclidean signature: repeated generators square to +1
            table[i, j, index[a ^ b]] = _reorder_sign(a, b)
    table.setflags(write=False)
    return table


CAYLEY = _cayley_table()


@dataclass(frozen=True, eq=False)
class Multivector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True)
        if c.shape[-1:] != (8,):
            raise ValueError(f"multivector coefficients need a trailing axis of 8, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("multivector coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def blade(cls, name: str, scale: float = 1.0) -> "Multivector":
        c = np.zeros(8)
        c[BLADE_NAMES.index(name)] = scale
        return cls(c)

    @classmethod
    def scalar(cls, value: float) -> "Multivector":
        return cls.blade("1", value)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def __getitem__(self, idx) -> "Multivector":
        return Multivector(self.coeffs[idx])

    def __add__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs + _as_mv(other).coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return Multivector(self.coeffs - _as_mv(other).coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return product(self, other)
        return Multivector(self.coeffs * np.asarray(other)[..., None])

    def __rmul__(self, other):
        return Multivector(self.coeffs * np.asarray(other)[..., None])

    def allclose(self, other: "Multivector", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, _as_mv(other).coeffs, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        if self.coeffs.ndim > 1:
            return f"Multivector(shape={self.shape})"
        terms = [f"{c:+.6g}*{n}" for c, n in zip(self.coeffs, BLADE_NAMES) if c != 0]
        return "Multivector(" + (" ".join(terms) or "0") + ")"


def _as_mv(a) -> Multivector:
    return a if isinstance(a, Multivector) else Multivector.scalar(float(a))


def product(a: Multivector, b: Multivector) -> Multivector:
    """Clifford product, broadcasting over leading axes."""
    return Multivector(np.einsum("...i,...j,ijk->...k", a.coeffs, b.coeffs, CAYLEY, optimize=True))


def reverse(a: Multivector) -> Multivector:
    return Multivector(a.coeffs * REVERSE_SIGNS)


def grade(a: Multivector, k: int) -> Multivector:
    if k not in (0, 1, 2, 3):
        raise ValueError(f"grade must be 0..3, got {k}")
    return Multivector(a.coeffs * (GRADES == k))


def trace(a: Multivector):
    """Twice the scalar part: the real trace of the 2x2 Pauli-matrix image."""
    return 2.0 * a.coeffs[..., 0]


def complex_trace(a: Multivector):
    """Full matrix trace, with the e123 coefficient read as the imaginary unit."""
    return 2.0 * (a.coeffs[..., 0] + 1j * a.coeffs[..., 7])


def epsilon() -> Multivector:
    """The primitive idempotent (1 + e3) / 2."""
    return Multivector([0.5, 0, 0, 0.5, 0, 0, 0, 0])


@dataclass(frozen=True, eq=False)
class IdealElement:
    """An element of the minimal left ideal C(3,0) eps (right-invariant under eps)."""

    mv: Multivector

    def __post_init__(self):
        residual = product(self.mv, epsilon()).coeffs - self.mv.coeffs
        scale = max(1.0, float(np.abs(self.mv.coeffs).max(initial=0.0)))
        if np.abs(residual).max(initial=0.0) > IDEAL_TOLERANCE * scale:
            raise ValueError("multivector is not in the left ideal generated by eps")


def spinor_to_ideal(psi1, psi2) -> IdealElement:
    """Encode ``(psi1, psi2)`` as ``[(g0 - g3 e123) + (g2 - g1 e123) e1] eps``.

    ``g0 = Re psi1, g3 = -Im psi1, g2 = Re psi2, g1 = -Im psi2``; array inputs
    give a batched element.
    """
    psi1 = np.asarray(psi1, complex)
    psi2 = np.asarray(psi2, complex)
    g0, g3 = psi1.real, -psi1.imag
    g2, g1 = psi2.real, -psi2.imag
    e123 = Multivector.blade("e123")
    e1 = Multivector.blade("e1")
    first = Multivector.scalar(1.0) * g0 - e123 * g3
    second = product(Multivector.scalar(1.0) * g2 - e123 * g1, e1)
    return IdealElement(product(first + second, epsilon()))


# ideal coordinates: coefficient index and factor recovering (g0, g1, g2, g3)
_IDEAL_READOUT = ((0, 2.0), (4, -2.0), (1, 2.0), (7, -2.0))


def ideal_to_spinor(m: IdealElement | Multivector):
    if isinstance(m, Multivector):
        m = IdealElement(m)
    c = m.mv.coeffs
    g0, g1, g2, g3 = (factor * c[..., i] for i, factor in _IDEAL_READOUT)
    return g0 - 1j * g3, g2 - 1j * g1


def clifford_density(phi: IdealElement) -> Multivector:
    """``rho_c = Phi reverse(Phi)``; its trace is ``|psi1|^2 + |psi2|^2``."""
    return product(phi.mv, reverse(phi.mv))


def density_kernel(phi1: IdealElement, phi2: IdealElement) -> Multivector:
    """Point-split density ``Phi_1 reverse(Phi_2)``."""
    return product(phi1.mv, reverse(phi2.mv))


_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _blade_matrices() -> np.ndarray:
    mats = []
    for bits in BLADE_BITS:
        m = _PAULI[0]
        for gen in range(3):
            if bits >> gen & 1:
                m = m @ _PAULI[gen + 1]
        mats.append(m)
    return np.array(mats)


BLADE_MATRICES = _blade_matrices()


def matrix_representation(a: Multivector) -> np.ndarray:
    """Image under e_k -> sigma_k, built from Pauli-matrix products (independent of CAYLEY)."""
    return np.einsum("...i,ijk->...jk", a.coeffs, BLADE_MATRICES)


def all_blades() -> list[Multivector]:
    return [Multivector.blade(name) for name in BLADE_NAMES]


def generator_anticommutators() -> np.ndarray:
    """Integer table ``e_i e_j + e_j e_i`` over the three generators, as coefficient vectors."""
    gens = (1, 2, 3)
    out = np.zeros((3, 3, 8), dtype=np.int64)
    for a, b in combinations(range(3), 2):
        out[a, b] = out[b, a] = CAYLEY[gens[a], gens[b]] + CAYLEY[gens[b], gens[a]]
    for a in range(3):
        out[a, a] = 2 * CAYLEY[gens[a], gens[a]]
    return out
