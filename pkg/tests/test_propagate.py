"""Propagator: step policies, exactness on constant segments, convergence
order, unitarity, determinism."""
import numpy as np
import pytest

from tqdecho.fields import LoopParams
from tqdecho.propagate import (
    StepPolicy,
    convergence_report,
    propagate_schedule,
    trajectory_to_csv,
)
from tqdecho.qcore import SIGMA_Y, expm_hermitian, is_unitary
from tqdecho.schedule import (
    SegmentSchedule,
    build_echo_sequence,
    idle_segment,
    pi_pulse_segment,
    single_loop_schedule,
)

P = LoopParams(theta=np.pi / 3, omega=1.0, omega0=1.0)
LOOP = single_loop_schedule(P)


def test_step_policy_validation():
    with pytest.raises(ValueError):
        StepPolicy()
    with pytest.raises(ValueError):
        StepPolicy(substeps=128, target_error=1e-8)
    with pytest.raises(ValueError):
        StepPolicy(substeps=0)
    with pytest.raises(ValueError):
        StepPolicy(target_error=0.0)
    with pytest.raises(ValueError):
        StepPolicy(target_error=1e-2)  # above the allowed ceiling


def test_idle_is_identity():
    s = SegmentSchedule((idle_segment(2.5),))
    traj = propagate_schedule(s, policy=StepPolicy(substeps=8), samples=4)
    assert np.allclose(traj.final_propagator, np.eye(2))
    assert traj.step_errors == (0.0,)


def test_pulse_is_exact():
    """Constant segments use the closed-form exponential, not substeps."""
    omega_pi = 40.0
    s = SegmentSchedule((pi_pulse_segment(omega_pi),))
    traj = propagate_schedule(s, policy=StepPolicy(substeps=4096), samples=4)
    h = 0.5 * omega_pi * SIGMA_Y
    exact = expm_hermitian(h, np.pi / omega_pi)
    assert np.allclose(traj.final_propagator, exact, atol=1e-14)
    # a half turn about y maps |0> to |1> up to phase
    col = np.abs(traj.final_propagator[:, 0])
    assert np.allclose(col, [0.0, 1.0], atol=1e-14)


def test_substeps_mode_reports_nan_error():
    traj = propagate_schedule(LOOP, policy=StepPolicy(substeps=100), samples=4)
    assert traj.substeps_used == (100,)
    assert np.isnan(traj.step_errors[0])


def test_substeps_round_up_to_checkpoint_multiple():
    traj = propagate_schedule(LOOP, policy=StepPolicy(substeps=65), samples=4)
    n = traj.substeps_used[0]
    assert n >= 65 and n % 4 == 0


def test_adaptive_ladder_meets_target():
    tol = 1e-6
    traj = propagate_schedule(LOOP, policy=StepPolicy(target_error=tol), samples=2)
    assert traj.step_errors[0] <= tol
    n = traj.substeps_used[0]
    assert n & (n - 1) == 0  # doubling ladder lands on a power of two


def test_unitarity_along_trajectory():
    traj = propagate_schedule(
        build_echo_sequence(P), policy=StepPolicy(substeps=512), samples=32
    )
    for u in traj.propagators[:: len(traj.propagators) // 16]:
        assert is_unitary(u)


def test_times_and_segment_index_align():
    traj = propagate_schedule(
        build_echo_sequence(P), policy=StepPolicy(substeps=64), samples=8
    )
    assert traj.times[0] == 0.0
    assert np.isclose(traj.times[-1], traj.schedule.total_duration)
    assert np.all(np.diff(traj.times) >= 0)
    assert len(traj.times) == len(traj.propagators) == len(traj.segment_index)
    # local times stay within each segment
    local = traj.local_times()
    durations = np.array([s.duration for s in traj.schedule.segments])
    assert np.all(local >= -1e-12)
    assert np.all(local <= durations[traj.segment_index] + 1e-12)


def test_with_initial_state():
    traj = propagate_schedule(LOOP, policy=StepPolicy(substeps=256), samples=8)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    t2 = traj.with_initial_state(psi0)
    assert np.allclose(t2.states[0], psi0)
    norms = np.linalg.norm(t2.states, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        traj.with_initial_state(np.array([1.0, 1.0], dtype=complex))


def test_convergence_order_is_two():
    rep = convergence_report(LOOP, base_substeps=32)
    assert 1.7 <= rep.order <= 2.3
    assert rep.diff_base_double > rep.diff_double_quad > 0.0
    assert not rep.exact


def test_convergence_exact_for_constant_schedule():
    s = SegmentSchedule((idle_segment(1.0), pi_pulse_segment(40.0)))
    rep = convergence_report(s, base_substeps=32)
    assert rep.exact
    assert rep.diff_double_quad < 1e-14


def test_rerun_is_bit_identical():
    pol = StepPolicy(substeps=512)
    a = propagate_schedule(build_echo_sequence(P), policy=pol, samples=16)
    b = propagate_schedule(build_echo_sequence(P), policy=pol, samples=16)
    assert a.propagators.tobytes() == b.propagators.tobytes()


def test_trajectory_csv(tmp_path):
    traj = propagate_schedule(LOOP, policy=StepPolicy(substeps=64), samples=4)
    traj = traj.with_initial_state(np.array([1.0, 0.0], dtype=complex))
    extra = np.arange(len(traj.times), dtype=float)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, path, {"marker": extra})
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    assert header[:3] == ["t", "segment", "label"]
    assert "marker" in header
    assert any(col.startswith("re_psi") for col in header)
    assert len(lines) == len(traj.times) + 1
    # full precision survives the round trip
    t1 = float(lines[1].split(",")[0])
    assert t1 == traj.times[0]
