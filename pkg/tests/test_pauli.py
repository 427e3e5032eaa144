import numpy as np
import pytest

from bohm_moyal import GridError, build_grid, gaussian
from bohm_moyal.moyal import bohm_momentum_moyal, wigner
from bohm_moyal.pauli import (
    CayleyKleinFields,
    SpinorField,
    bohm_momentum_pauli,
    bst_momentum,
    cayley_klein_compose,
    cayley_klein_decompose,
    cayley_klein_state,
    component_currents,
    pauli_kinetic,
    pauli_quantum_potential,
    pauli_wigner,
    pauli_wigner_trace,
    wiseman_velocity_pauli,
)
from bohm_moyal.weak import bohm_record

from conftest import well_conditioned


def _flat(grid, theta, phi):
    r = np.full(grid.n, grid.length ** -0.5)
    return CayleyKleinFields(grid, r, 0.0, theta, phi, True)


@pytest.fixture(scope="module")
def ck_state(grid):
    return cayley_klein_state(grid, theta0=np.pi / 3, phi_slope=0.8)


@pytest.fixture(scope="module")
def tilted(grid):
    ck = cayley_klein_state(grid, 1.0, 0.5, 1.0, 0.1, 0.3, 0.6)
    return ck, cayley_klein_compose(ck)


def test_compose_single_point():
    g = build_grid(8, 8.0)
    ck = CayleyKleinFields(g, 1.0, 0.0, 0.4, 0.6, True)
    s = cayley_klein_compose(ck)
    assert np.allclose(s.c1.values, np.cos(0.2) * np.exp(0.3j), atol=1e-15)
    assert np.allclose(s.c2.values, 1j * np.sin(0.2) * np.exp(-0.3j), atol=1e-15)


def test_compose_rejects_other_grid(grid, ck_state):
    with pytest.raises(GridError):
        cayley_klein_compose(ck_state, build_grid(128, 40.0))


def test_spinor_validation(grid):
    with pytest.raises(GridError):
        SpinorField(gaussian(grid), gaussian(build_grid(128, 40.0)))


def test_decompose_round_trip(grid, tilted):
    ck, s = tilted
    back = cayley_klein_decompose(s)
    m = back.valid & well_conditioned(s.density())
    assert np.abs(back.big_r[m] - ck.big_r[m]).max() < 1e-12
    assert np.abs(back.theta[m] - ck.theta[m]).max() < 1e-8
    # phases agree up to a constant multiple of 2 pi per run
    for name in ("big_s", "phi_angle"):
        d = (getattr(back, name) - getattr(ck, name))[m]
        assert np.ptp(d) < 1e-8
        assert abs(np.angle(np.exp(1j * d[0]))) < 1e-8
    recomposed = cayley_klein_compose(back)
    assert np.abs(recomposed.c1.values - s.c1.values)[m].max() < 1e-10
    assert np.abs(recomposed.c2.values - s.c2.values)[m].max() < 1e-10


def test_pole_flags_phi(grid):
    s = cayley_klein_compose(cayley_klein_state(grid, theta0=0.0, p0=1.0))
    back = cayley_klein_decompose(s)
    assert back.valid.any()
    assert not back.phi_valid.any()
    assert not back.big_s[~back.phi_valid].any()
    assert np.all(np.isnan(bst_momentum(back)))


@pytest.mark.parametrize("kw, expected", [
    ({"theta0": np.pi / 2, "phi_slope": 0.7}, 0.0),
    ({"theta0": np.pi / 3, "phi_slope": 0.8}, 0.2),
    ({"theta0": 0.5, "p0": 0.5}, 0.5),
])
def test_bst_examples(grid, kw, expected):
    ck = cayley_klein_state(grid, **kw)
    m = well_conditioned(ck.big_r ** 2)
    assert np.abs(bst_momentum(ck)[m] - expected).max() < 1e-10


def test_bst_pole_uses_s(grid):
    # at theta = 0 psi = (R e^{i p0 x}, 0): the Bohm momentum is p0
    s = cayley_klein_compose(cayley_klein_state(grid, p0=0.7, theta0=0.0))
    m = well_conditioned(s.density())
    assert np.abs(bohm_momentum_pauli(s)[m] - 0.7).max() < 1e-8


def test_two_component_average(grid):
    a = gaussian(grid, -1.0, 1.0, 1.0) * np.sqrt(0.5)
    b = gaussian(grid, -1.0, 3.0, 1.0) * np.sqrt(0.5)
    s = SpinorField(a, b)
    m = well_conditioned(s.density())
    assert np.abs(bohm_momentum_pauli(s)[m] - 2.0).max() < 1e-8


def test_routes_agree(grid, tilted):
    ck, s = tilted
    m = well_conditioned(s.density())
    comp = bohm_momentum_pauli(s)
    moment = bohm_momentum_moyal(pauli_wigner(s))
    assert np.abs(comp[m] - moment[m]).max() < 1e-8
    assert np.abs(comp[m] - bst_momentum(ck)[m]).max() < 1e-6
    assert np.abs(component_currents(s)[m] / s.density()[m] - comp[m]).max() < 1e-12


def test_trace_route(grid, ck_state):
    s = cayley_klein_compose(ck_state)
    f = pauli_wigner(s)
    assert np.abs(pauli_wigner_trace(s).values - f.values).max() < 1e-12
    assert np.abs(grid.dp * f.values.sum(axis=1) - s.density()).max() < 1e-8
    assert f.total() == pytest.approx(1.0, abs=1e-8)


def test_energy_identity(grid, tilted):
    # sum_i |grad psi_i|^2 - grad^2 rho / 2 = rho (P_B^2 + Q) with Q carrying the spin terms
    ck, s = tilted
    rho = s.density()
    m = well_conditioned(rho)
    target = bst_momentum(ck) ** 2 + pauli_quantum_potential(ck)
    assert np.abs(pauli_kinetic(s)[m] / rho[m] - target[m]).max() < 1e-5


def test_reduction_to_scalar(grid, g021):
    s = SpinorField(g021, g021 * 0.0)
    rec = bohm_record(g021)
    m = well_conditioned(s.density())
    assert np.abs(bohm_momentum_pauli(s)[m] - rec.bohm_momentum[m]).max() < 1e-12
    assert np.abs(pauli_wigner(s).values - wigner(g021).values).max() < 1e-15
    dens = s.density()
    assert np.abs(pauli_kinetic(s)[m] - (dens * (rec.bohm_kinetic + rec.quantum_potential))[m]).max() < 1e-9


@pytest.mark.parametrize("alpha", [0.05, 0.2])
def test_quantum_potential_theta_gradient(grid, alpha):
    q = pauli_quantum_potential(_flat(grid, alpha * grid.x, 0.0))
    assert np.abs(q - (alpha / 2) ** 2).max() < 1e-12


@pytest.mark.parametrize("beta", [0.3, 1.1])
def test_quantum_potential_phi_gradient(grid, beta):
    q = pauli_quantum_potential(_flat(grid, np.pi / 2, beta * grid.x))
    assert np.abs(q - (beta / 2) ** 2).max() < 1e-12


def test_quantum_potential_gaussian_envelope(grid):
    ck = cayley_klein_state(grid, theta0=0.9)
    m = well_conditioned(ck.big_r ** 2)
    assert np.abs(pauli_quantum_potential(ck)[m] - (0.5 - grid.x ** 2 / 4)[m]).max() < 1e-8


def test_pauli_wiseman(grid, tilted):
    ck, s = tilted
    m = well_conditioned(s.density())
    v = wiseman_velocity_pauli(s, 2.0)
    assert np.abs(v[m] - bohm_momentum_pauli(s)[m] / 2.0).max() < 1e-6
    with pytest.raises(ValueError):
        wiseman_velocity_pauli(s, 0.0)


def test_route_disagreement_raises(grid, tilted):
    _, s = tilted
    with pytest.raises(ArithmeticError):
        bohm_momentum_pauli(s, tolerance=-1.0)
    with pytest.raises(ArithmeticError):
        pauli_kinetic(s, tolerance=-1.0)
