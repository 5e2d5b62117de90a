import numpy as np
import pytest

from gpchain import latticedyn, models
from gpchain.latticedyn import (
    IntegratorConfig,
    LatticeState,
    Trajectory,
    hubbard_observables,
    hubbard_rhs,
    integrate,
    rhs_from_polys,
    xxz_observables,
    xxz_rhs,
)
from gpchain.models import (
    CouplingMode,
    HubbardParams,
    XXZParams,
    build_hubbard,
    build_xxz_bosonized,
    derive_eom,
    hubbard_bindings,
    xxz_bindings,
)
from gpchain.symbolmap import naive_symbol, wick_symbol


def _random_state(rng, nflavors, nsites):
    re = rng.standard_normal((nflavors, nsites))
    im = rng.standard_normal((nflavors, nsites))
    return 0.3 * (re + 1j * im)


def test_lattice_state_validation():
    s = LatticeState(np.zeros(4, dtype=complex))
    assert s.phi.shape == (1, 4)
    assert s.nsites == 4 and s.nflavors == 1
    with pytest.raises(ValueError):
        LatticeState(np.array([[np.inf + 0j, 0, 0]]))


def test_xxz_rhs_matches_symbolic_eom():
    """The vectorized right-hand side is the symbolic commutator, evaluated."""
    p = XXZParams(N=5, J0=0.8, J1=0.1, R0=0.6, R1=0.07, s=1.2, x_xi=0.3,
                  h=(0.1, -0.2, 0.0, 0.3, 0.05), hbar=1.4)
    H = build_xxz_bosonized(p, CouplingMode.EXPANDED)
    polys = {j: naive_symbol(derive_eom(H, j)) for j in range(p.N)}
    slow = rhs_from_polys(polys, xxz_bindings(p), hbar=p.hbar)
    fast = xxz_rhs(p)
    rng = np.random.default_rng(0)
    for _ in range(4):
        phi = _random_state(rng, 1, p.N)
        assert np.abs(fast(0.0, phi) - slow(0.0, phi)).max() < 1e-12


def test_xxz_rhs_wick_mode_adds_correction():
    # wick mode follows the Wick symbol of the annihilator-first commutator
    # writing, which exceeds the naive reading by (1/2)(R_b + R_{b-1}) phi_i
    p = XXZParams(N=5, J0=0.8, R0=0.6, s=1.2)
    polys = {
        j: wick_symbol(
            models.xxz_commutator_reference(
                p, j, CouplingMode.EXPANDED, reversed_pairs=True
            )
        )
        for j in range(p.N)
    }
    slow = rhs_from_polys(polys, xxz_bindings(p), hbar=p.hbar)
    fast = xxz_rhs(p, symbol_mode="wick")
    rng = np.random.default_rng(1)
    phi = _random_state(rng, 1, p.N)
    assert np.abs(fast(0.0, phi) - slow(0.0, phi)).max() < 1e-12
    naive = xxz_rhs(p)
    assert np.abs(fast(0.0, phi) - naive(0.0, phi)).max() > 1e-6


def test_hubbard_rhs_matches_symbolic_eom():
    p = HubbardParams(N=4, t=0.9, U=(0.5, 1.5, -0.2, 0.8), hbar=0.7)
    H = build_hubbard(p, statistics=models.Statistics.BOSE)
    polys = {
        (j, f): naive_symbol(derive_eom(H, j, flavor=f))
        for j in range(p.N)
        for f in (0, 1)
    }
    slow = rhs_from_polys(polys, hubbard_bindings(p), hbar=p.hbar, nflavors=2)
    fast = hubbard_rhs(p)
    rng = np.random.default_rng(2)
    phi = _random_state(rng, 2, p.N)
    assert np.abs(fast(0.0, phi) - slow(0.0, phi)).max() < 1e-12


def test_norm_and_energy_conserved():
    p = XXZParams(N=32, J0=1.0, R0=0.5, s=1.0)
    rng = np.random.default_rng(3)
    phi0 = _random_state(rng, 1, p.N)
    state = LatticeState(phi0)
    cfg = IntegratorConfig(dt=1e-3, t_end=2.0)
    traj = integrate(state, xxz_rhs(p), cfg)
    o0 = xxz_observables(phi0, p)
    o1 = xxz_observables(traj.final, p)
    assert abs(o1["norm"] - o0["norm"]) < 1e-10
    assert abs(o1["energy"] - o0["energy"]) < 1e-8


def test_wick_flow_still_conserves_norm():
    # the correction is a site-dependent linear phase; norm survives
    p = XXZParams(N=16, J0=1.0, R0=0.7, s=1.0)
    rng = np.random.default_rng(4)
    phi0 = _random_state(rng, 1, p.N)
    traj = integrate(LatticeState(phi0), xxz_rhs(p, symbol_mode="wick"),
                     IntegratorConfig(dt=1e-3, t_end=1.0))
    assert abs(xxz_observables(traj.final, p)["norm"]
               - xxz_observables(phi0, p)["norm"]) < 1e-10


def test_hubbard_conservation_and_swap_symmetry():
    p = HubbardParams(N=16, t=1.0, U=0.8)
    rng = np.random.default_rng(5)
    phi0 = _random_state(rng, 2, p.N)
    cfg = IntegratorConfig(dt=1e-3, t_end=1.0)
    traj = integrate(LatticeState(phi0), hubbard_rhs(p), cfg)
    o0 = hubbard_observables(phi0, p)
    o1 = hubbard_observables(traj.final, p)
    assert abs(o1["norm_flavor0"] - o0["norm_flavor0"]) < 1e-10
    assert abs(o1["norm_flavor1"] - o0["norm_flavor1"]) < 1e-10
    assert abs(o1["energy"] - o0["energy"]) < 1e-8
    # swapping the flavors commutes with the flow
    swapped = integrate(LatticeState(phi0[::-1]), hubbard_rhs(p), cfg)
    assert np.abs(swapped.final.phi - traj.final.phi[::-1]).max() < 1e-12


def test_integrate_adaptive_scheme_close_to_fixed():
    p = XXZParams(N=8, J0=1.0, R0=0.4)
    rng = np.random.default_rng(6)
    phi0 = _random_state(rng, 1, p.N)
    fixed = integrate(LatticeState(phi0), xxz_rhs(p),
                      IntegratorConfig(dt=5e-4, t_end=1.0))
    adap = integrate(LatticeState(phi0), xxz_rhs(p),
                     IntegratorConfig(scheme="rk45", tolerance=1e-10, t_end=1.0))
    assert np.abs(fixed.final.phi - adap.final.phi).max() < 1e-7


def test_trajectory_snapshots():
    p = XXZParams(N=6)
    rng = np.random.default_rng(7)
    phi0 = _random_state(rng, 1, p.N)
    traj = integrate(LatticeState(phi0), xxz_rhs(p),
                     IntegratorConfig(dt=0.01, t_end=1.0, snapshot_every=20))
    assert isinstance(traj, Trajectory)
    assert len(traj) >= 5
    assert traj.fields.shape[1:] == (1, p.N)
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(1.0)


def test_bond_override_matches_uniform_default():
    p = XXZParams(N=8, J0=1.2, J1=0.3, R0=0.9, R1=0.1, x_xi=0.25)
    rng = np.random.default_rng(8)
    phi = _random_state(rng, 1, p.N)
    Jb = np.full(p.N, p.J0 - p.J1 * p.x_xi)
    Rb = np.full(p.N, p.R0 - p.R1 * p.x_xi)
    default = xxz_rhs(p)
    explicit = xxz_rhs(p, J_bond=Jb, R_bond=Rb)
    assert np.abs(default(0.0, phi) - explicit(0.0, phi)).max() == 0.0


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(symbol_mode="other")
