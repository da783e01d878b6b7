import numpy as np
import pytest

from nlsquench.core import Coupling, NlsQuenchError, Schwartz, make_kgrid, make_profile
from nlsquench.oracle import (
    BlowUp,
    StepperConfig,
    boundary_energy,
    evolve,
    fft_upsample,
    hamiltonian,
    isospectral_check,
    mass,
    step,
)
from nlsquench.zsdirect import IntegratorConfig
from conftest import grid


@pytest.fixture(scope="module")
def cfg_fast():
    return StepperConfig(dt=1e-3, n_modes=1024)


def test_stepper_config_validation():
    with pytest.raises(NlsQuenchError):
        StepperConfig(dt=-1.0)
    with pytest.raises(NlsQuenchError):
        StepperConfig(n_modes=1000)  # not a power of two
    with pytest.raises(NlsQuenchError):
        StepperConfig(n_modes=128)


def test_zero_field_stays_zero(cfg_fast):
    p = make_profile(np.zeros(64, complex), 10.0, Schwartz())
    out = evolve(p, Coupling(1j), 0.5, cfg_fast)
    assert np.max(np.abs(out.values)) == 0.0


def test_free_gaussian_matches_exact(cfg_fast):
    # c = 0: i q_t + q_xx = 0 has the closed Gaussian solution
    x = grid(30.0, 0.02)
    p = make_profile(np.exp(-x ** 2), 30.0, Schwartz(), boundary_tol=1e-7)
    t = 0.4
    out = evolve(p, Coupling(0.0), t, cfg_fast)
    s = 1 + 4j * t
    exact = np.exp(-out.x ** 2 / s) / np.sqrt(s)
    # the spectral propagator is exact at c = 0; the residual is the cubic
    # resampling of the initial data onto the stepper grid
    assert np.max(np.abs(out.values - exact)) < 1e-7


def test_soliton_modulus_static(sech40, focusing):
    cfg = StepperConfig(dt=1e-3, n_modes=2048)
    out = evolve(sech40, focusing, 1.0, cfg)
    assert np.max(np.abs(np.abs(out.values) - 1 / np.cosh(out.x))) < 1e-6


def test_soliton_phase_rotation(sech40, focusing):
    # the unit soliton rotates as e^{i A^2 t}; measure at the crest
    cfg = StepperConfig(dt=1e-4, n_modes=2048)
    t = 0.3
    out = evolve(sech40, focusing, t, cfg)
    i0 = int(np.argmin(np.abs(out.x)))
    assert abs(out.values[i0] - np.exp(1j * t)) < 1e-5


def test_conservation_laws(sech40, focusing):
    cfg = StepperConfig(dt=1e-3, n_modes=2048)
    p0 = evolve(sech40, focusing, 0.0, cfg)
    p1 = evolve(sech40, focusing, 1.0, cfg)
    assert abs(mass(p1) - mass(p0)) < 1e-8
    assert abs(hamiltonian(p1, focusing) - hamiltonian(p0, focusing)) < 1e-6


def test_second_order_time_convergence(sech40):
    # a genuine quench so the field actually moves; halving dt should cut
    # the error about fourfold
    c = Coupling(1.4j)
    t = 0.1
    ref = evolve(sech40, c, t, StepperConfig(dt=2.5e-5, n_modes=1024))
    errs = []
    for dt in (4e-4, 2e-4):
        out = evolve(sech40, c, t, StepperConfig(dt=dt, n_modes=1024))
        errs.append(np.max(np.abs(out.values - ref.values)))
    assert 3.0 < errs[0] / errs[1] < 5.5


def test_fractional_final_step(sech40, focusing, cfg_fast):
    # t is not a multiple of dt; the remainder step must land exactly
    out1 = evolve(sech40, focusing, 0.0015, StepperConfig(dt=1e-3, n_modes=1024))
    out2 = evolve(sech40, focusing, 0.0015, StepperConfig(dt=5e-4, n_modes=1024))
    assert np.max(np.abs(out1.values - out2.values)) < 1e-8


def test_single_step_matches_evolve(sech40, focusing, cfg_fast):
    s1 = step(sech40, focusing, cfg_fast)
    s2 = evolve(sech40, focusing, cfg_fast.dt, cfg_fast)
    assert np.max(np.abs(s1.values - s2.values)) < 1e-14


def test_blow_up_guard(sech40, focusing):
    cfg = StepperConfig(dt=1e-3, n_modes=1024, max_amp=0.5)
    with pytest.raises(BlowUp):
        evolve(sech40, focusing, 0.1, cfg)


def test_boundary_monitor(sech40):
    assert boundary_energy(sech40) < 1e-10


def test_fft_upsample_exact_for_smooth_fields():
    n = 512
    L = 20.0
    x = -L + (2 * L / n) * np.arange(n)
    p = make_profile(np.zeros(3, complex), 1.0, Schwartz()) if False else None
    from nlsquench.core import FieldProfile

    prof = FieldProfile(L=L, h=2 * L / n, values=(1 / np.cosh(x)).astype(complex),
                        asymptotics=Schwartz(), boundary_tol=1e-6)
    up = fft_upsample(prof, 4)
    # exact up to the periodisation kink of the tails (~|q(L)|)
    assert np.max(np.abs(up.values - 1 / np.cosh(up.x))) < 1e-9
    assert len(up.values) == 4 * n


def test_isospectral_zero_time(sech40, focusing):
    kg = make_kgrid(focusing, Schwartz(), 3.0, 31)
    rep = isospectral_check(sech40, focusing, 0.0, kg,
                            StepperConfig(dt=1e-3, n_modes=1024))
    assert rep.amp_drift == 0.0
    assert rep.phase_drift == 0.0


def test_isospectral_pure_soliton(sech40, focusing):
    # reflectionless data: only the |a| drift is informative, no b samples
    # clear the floor
    kg = make_kgrid(focusing, Schwartz(), 3.0, 31)
    rep = isospectral_check(sech40, focusing, 0.2, kg,
                            StepperConfig(dt=1e-3, n_modes=2048))
    assert rep.amp_drift < 1e-5
    assert rep.n_phase_points == 0


def test_isospectral_quench_drift(sech40):
    # short version of the full drift check at a quenched coupling
    c = Coupling(1.5j)
    kg = make_kgrid(c, Schwartz(), 4.0, 41)
    rep = isospectral_check(sech40, c, 0.1, kg,
                            StepperConfig(dt=1e-3, n_modes=2048))
    assert rep.amp_drift < 1e-4
    assert rep.n_phase_points > 0
    assert rep.phase_drift < 1e-3
