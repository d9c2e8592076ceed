import math

import numpy as np
import pytest

from epslab import reference as ref
from epslab.elements import CartesianState, classical_to_cartesian


def _potential(pos, model):
    r = np.linalg.norm(pos)
    slat = pos[2] / r
    p2 = 0.5 * (3.0 * slat ** 2 - 1.0)
    return -model.mu / r + model.j2 * (model.mu / r) * (model.re / r) ** 2 * p2


def test_accel_kepler_limit(kepler_model):
    pos = np.array([5000.0, -3000.0, 2500.0])
    a = ref.accel_main_problem(pos, kepler_model)
    r = np.linalg.norm(pos)
    assert a == pytest.approx(-kepler_model.mu * pos / r ** 3, rel=1e-15)


def test_accel_equatorial_is_radial(model):
    pos = np.array([7000.0, -2000.0, 0.0])
    a = ref.accel_main_problem(pos, model)
    assert float(np.linalg.norm(np.cross(a, pos))) < 1e-12 * float(np.linalg.norm(a)) \
        * float(np.linalg.norm(pos))
    assert a[2] == 0.0


def test_accel_vs_potential_gradient(rng, model):
    for _ in range(10):
        pos = rng.uniform(-9000, 9000, size=3)
        if np.linalg.norm(pos) < 6600:
            continue
        a = ref.accel_main_problem(pos, model)
        h = 0.02  # noise-optimal step for the five-point stencil
        for i in range(3):
            def at(step):
                d = pos.copy()
                d[i] += step
                return _potential(d, model)
            # five-point stencil kills the h^2 truncation of the plain form
            fd = -(8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h)
            assert a[i] == pytest.approx(fd, rel=1e-9, abs=1e-12)


def test_kepler_closure(kepler_model, prisma_coe):
    x0 = classical_to_cartesian(prisma_coe, kepler_model)
    period = 2 * math.pi * math.sqrt(prisma_coe.a ** 3 / kepler_model.mu)
    traj = ref.integrate(x0, period, model=kepler_model)
    err = np.linalg.norm(traj.states[-1][:3] - x0.position)
    assert err < 1e-10


def test_tau_linear_for_circular_kepler(kepler_model):
    import dataclasses
    from epslab.elements import ClassicalElements
    coe = ClassicalElements(7000.0, 0.0, 1.2, 0.3, 0.0, 0.0)
    x0 = classical_to_cartesian(coe, kepler_model)
    traj = ref.integrate(x0, 20000.0, model=kepler_model, grid_step=100.0)
    taus = traj.tau
    ts = traj.times
    rate = taus[-1] / ts[-1]
    assert np.max(np.abs(taus - rate * ts)) < 1e-12 * abs(taus[-1])


def test_drift_diagnostics(prisma_x0, model):
    traj = ref.integrate(prisma_x0, 86400.0, model=model, grid_step=60.0)
    assert traj.energy_drift < 1e-12
    assert traj.n_drift < 1e-12


def test_convergence_order(kepler_model, prisma_coe, prisma_x0, model):
    """Halving the step drops the error by ~2^12 (order-12 scheme)."""
    x0 = classical_to_cartesian(prisma_coe, kepler_model)
    period = 2 * math.pi * math.sqrt(prisma_coe.a ** 3 / kepler_model.mu)
    errs = []
    for h in (800.0, 400.0):
        traj = ref.integrate(x0, period, model=kepler_model, h_override=h,
                             precision="double-double")
        pos = traj.states[-1][:3] + traj.states_lo[-1][:3]
        errs.append(np.linalg.norm(pos - x0.position))
    ratio = errs[0] / errs[1]
    assert 2 ** 9 < ratio < 2 ** 15


def test_tolerance_controls_step(prisma_x0, model):
    loose = ref.integrate(prisma_x0, 3600.0, tol=1e-9, model=model, grid_step=60.0)
    tight = ref.integrate(prisma_x0, 3600.0, tol=1e-13, model=model, grid_step=60.0)
    assert tight.h <= loose.h


def test_dd_agrees_with_double(prisma_x0, model):
    td = ref.integrate(prisma_x0, 86400.0, model=model, grid_step=60.0)
    tdd = ref.integrate(prisma_x0, 86400.0, model=model, grid_step=60.0,
                        precision="double-double")
    diff = np.linalg.norm(td.states[-1][:3]
                          - (tdd.states[-1][:3] + tdd.states_lo[-1][:3]))
    # double mode accumulates ~sqrt(N) ulps; a day stays well under a mm
    assert diff < 1e-7


def test_dense_output_endpoints_and_roundtrip(prisma_x0, model):
    traj = ref.integrate(prisma_x0, 7200.0, model=model, grid_step=60.0)
    st, tau = ref.state_at_time(traj, 0.0)
    assert np.array_equal(st.position, traj.states[0][:3])
    st_end, _ = ref.state_at_time(traj, 7200.0)
    assert np.array_equal(st_end.position, traj.states[-1][:3])
    # t -> tau -> t round trip below 1e-12 s
    for t in (1234.567, 3600.0, 7000.123456):
        _, tau = ref.state_at_time(traj, t)
        _, t_back = ref.state_at_tau(traj, tau)
        assert abs(t_back - t) < 1e-12
    with pytest.raises(ValueError):
        ref.state_at_time(traj, 7201.0)


def test_dense_output_vs_reintegration(prisma_x0, model):
    traj = ref.integrate(prisma_x0, 7200.0, model=model, grid_step=60.0)
    t_q = 3937.25
    st, _ = ref.state_at_time(traj, t_q)
    direct = ref.integrate(prisma_x0, t_q, model=model, grid_step=60.0)
    # both below the integration tolerance: 1e-13 relative of ~7e3 km
    assert np.linalg.norm(st.position - direct.states[-1][:3]) < 1e-13 * 7000.0


def test_csv_export(tmp_path, prisma_x0, model):
    traj = ref.integrate(prisma_x0, 600.0, model=model, grid_step=60.0)
    path = tmp_path / "ref.csv"
    ref.to_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,tau,x,y,z,vx,vy,vz"
    assert len(lines) == len(traj.times) + 1
    row = [float(v) for v in lines[1].split(",")]
    assert row[0] == traj.times[0]
    assert row[2] == traj.states[0][0]


def test_unbound_rejected(model):
    x = CartesianState([8000.0, 0, 0], [0, 12.0, 0])
    with pytest.raises(ValueError):
        ref.integrate(x, 1000.0, model=model)
