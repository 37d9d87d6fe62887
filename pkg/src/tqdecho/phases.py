"""Eigenstate tracking and phase decomposition.

The central objects are comoving reference vectors: the instantaneous
eigenstates of the uncorrected drive, continued smoothly through a
schedule. During loop segments the reference follows the analytic
eigenvector gauge; through pulses it is transported by the exact pulse
propagator, so the overlap phase between reference and simulated state
changes only while a loop is running.

Total phase is the unwrapped overlap phase arg<ref(t)|psi(t)> accumulated
over the schedule. The dynamical part is minus the time integral of the
uncorrected-generator expectation; the geometric part is their difference.
For the drives used here the dynamical integrand is constant on every
segment (the loop integrand is the tracked eigenenergy, and a constant
pulse conserves its own expectation), so the trapezoid rule integrates it
essentially exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import LoopParams, TwoQubitParams, theta_tilde, tqd_correction
from .propagate import Trajectory, propagate_schedule, StepPolicy, DEFAULT_POLICY
from .qcore import expm_hermitian, pauli_dot, wrap_angle
from .schedule import SegmentSchedule

__all__ = [
    "LABELS4",
    "PhaseDecomposition",
    "instantaneous_eigenvectors",
    "loop_eigenvector",
    "two_qubit_eigenvector",
    "two_qubit_eigenvectors",
    "eigenbasis_matrix",
    "evolve_eigenstate",
    "tracking_fidelity",
    "dynamical_phase",
    "total_phase",
    "loop_phase_decomposition",
    "echo_phase_decomposition",
    "solid_angle",
    "conditional_solid_angles",
    "delta_omega",
    "correction_energy_check",
]

# label order for the two-qubit eigenbasis: (energy label p, control q)
LABELS4 = ((0, 0), (1, 0), (0, 1), (1, 1))

_LOOP_KINDS_2 = ("tqd-loop", "root-loop")
_LOOP_KINDS_4 = ("two-qubit-loop", "exp-loop")
_PULSE_KINDS = ("pi-pulse", "control-flip")


# ---------------------------------------------------------------------------
# eigenvectors
# ---------------------------------------------------------------------------

def _spin_rotation_y(angle: float) -> np.ndarray:
    c, s = np.cos(0.5 * angle), np.sin(0.5 * angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _loop_eigvec_batch(
    theta: float, omega: float, label: int, ts: np.ndarray, rotation: float = 0.0
) -> np.ndarray:
    """Smooth-gauge eigenvectors of the cone drive, rows (len(ts), 2).

    label 0 follows the field direction (energy +omega0/2), label 1 is
    antiparallel. The gauge puts the winding phase exp(i*omega*t) on the
    second component, which is periodic over a full loop.
    """
    half = 0.5 * theta
    phase = np.exp(1j * omega * ts)
    out = np.empty((ts.size, 2), dtype=complex)
    if label == 0:
        out[:, 0] = np.cos(half)
        out[:, 1] = phase * np.sin(half)
    elif label == 1:
        out[:, 0] = -np.sin(half)
        out[:, 1] = phase * np.cos(half)
    else:
        raise ValueError("single-qubit label must be 0 or 1")
    if rotation != 0.0:
        out = out @ _spin_rotation_y(rotation).T
    return out


def loop_eigenvector(
    p: LoopParams, label: int, t: float, rotation: float = 0.0
) -> np.ndarray:
    return _loop_eigvec_batch(p.theta, p.omega, label, np.array([float(t)]), rotation)[0]


def instantaneous_eigenvectors(p: LoopParams, t: float) -> tuple:
    """Both eigenvectors of the uncorrected drive at time t, in the smooth
    gauge used throughout the package."""
    return loop_eigenvector(p, 0, t), loop_eigenvector(p, 1, t)


def _cond_eigvec_batch(
    p: TwoQubitParams, label: tuple, ts: np.ndarray
) -> np.ndarray:
    pp, q = label
    if pp not in (0, 1) or q not in (0, 1):
        raise ValueError("two-qubit label must be a pair from {0,1} x {0,1}")
    tt = theta_tilde(p)
    theta_q = tt if q == 0 else np.pi - tt
    single = _loop_eigvec_batch(theta_q, p.omega, pp, ts)
    out = np.zeros((ts.size, 4), dtype=complex)
    out[:, 0 + q] = single[:, 0]
    out[:, 2 + q] = single[:, 1]
    return out


def two_qubit_eigenvector(p: TwoQubitParams, label: tuple, t: float) -> np.ndarray:
    """phi_{p,q}(t): the driven qubit's eigenvector for the cone selected
    by control state q, tensored with |q>."""
    return _cond_eigvec_batch(p, label, np.array([float(t)]))[0]


def two_qubit_eigenvectors(p: TwoQubitParams, t: float) -> dict:
    return {label: two_qubit_eigenvector(p, label, t) for label in LABELS4}


def eigenbasis_matrix(p: TwoQubitParams, t: float = 0.0) -> np.ndarray:
    """Columns are the conditional eigenvectors in LABELS4 order."""
    return np.column_stack([two_qubit_eigenvector(p, lab, t) for lab in LABELS4])


# ---------------------------------------------------------------------------
# comoving reference series
# ---------------------------------------------------------------------------

def _segment_eigvec_batch(seg, label, ts: np.ndarray) -> np.ndarray:
    if seg.kind in _LOOP_KINDS_2:
        return _loop_eigvec_batch(
            seg.params["theta"], seg.params["omega"], label, ts,
            seg.params.get("rotation", 0.0),
        )
    p = TwoQubitParams(seg.params["omega_i"], seg.params["coupling"], seg.params["omega"])
    return _cond_eigvec_batch(p, label, ts)


def _candidate_labels(dim: int) -> tuple:
    return (0, 1) if dim == 2 else LABELS4


def _reference_series(traj: Trajectory, label, strict: bool) -> tuple:
    """Comoving reference vectors at every trajectory sample.

    Returns (refs, per_segment_labels). In strict mode, a reference that
    fails to line up with one eigenvector at a loop-segment start (overlap
    magnitude below 1 - 1e-6) raises, since phases against a drifting
    reference are not meaningful.
    """
    sched = traj.schedule
    dim = sched.dim
    first = sched.segments[0]
    loop_kinds = _LOOP_KINDS_2 + _LOOP_KINDS_4
    if first.kind not in loop_kinds:
        raise ValueError("phase analysis needs a schedule that starts with a loop")
    if dim == 2 and not isinstance(label, (int, np.integer)):
        raise ValueError("single-qubit label must be an int")
    if dim == 4:
        label = tuple(label)

    refs = np.empty((len(traj.times), dim), dtype=complex)
    seg_labels = []
    ref_in = None
    local = traj.local_times()
    for i, seg in enumerate(sched.segments):
        rows = traj.segment_rows(i)
        ts = local[rows]
        if seg.kind in loop_kinds:
            if ref_in is None:
                detected = label
                eta = 0.0
            else:
                overlaps = {
                    cand: complex(
                        np.vdot(_segment_eigvec_batch(seg, cand, ts[:1])[0], ref_in)
                    )
                    for cand in _candidate_labels(dim)
                }
                detected = max(overlaps, key=lambda c: abs(overlaps[c]))
                mag = abs(overlaps[detected])
                if strict and mag < 1.0 - 1e-6:
                    raise ValueError(
                        "reference lost eigenstate alignment entering segment "
                        f"{i} ({seg.label}): best overlap {mag:.6f}; the pulse "
                        "between loops does not map eigenstates to eigenstates"
                    )
                eta = float(np.angle(overlaps[detected]))
            block = _segment_eigvec_batch(seg, detected, ts) * np.exp(1j * eta)
            seg_labels.append(detected)
        elif seg.kind in _PULSE_KINDS:
            if ref_in is None:
                raise ValueError("phase analysis needs a schedule that starts with a loop")
            h = seg.generator(0.0)
            block = np.stack([expm_hermitian(h, tau) @ ref_in for tau in ts])
            seg_labels.append(None)
        else:  # idle
            if ref_in is None:
                raise ValueError("phase analysis needs a schedule that starts with a loop")
            block = np.broadcast_to(ref_in, (ts.size, dim)).copy()
            seg_labels.append(None)
        refs[rows] = block
        ref_in = block[-1]
    return refs, seg_labels


def evolve_eigenstate(
    s: SegmentSchedule,
    label,
    policy: StepPolicy = DEFAULT_POLICY,
    samples: int = 256,
) -> Trajectory:
    """Propagate the schedule starting from the labelled eigenstate of the
    first loop segment at t=0."""
    first = s.segments[0]
    if first.kind not in _LOOP_KINDS_2 + _LOOP_KINDS_4:
        raise ValueError("schedule must start with a loop segment")
    if s.dim == 4:
        label = tuple(label)
    psi0 = _segment_eigvec_batch(first, label, np.array([0.0]))[0]
    return propagate_schedule(s, initial_state=psi0, policy=policy, samples=samples)


def tracking_fidelity(traj: Trajectory, label) -> np.ndarray:
    """|<ref(t)|psi(t)>|^2 against the comoving reference for `label`.

    Works for drives that fail to track (the whole point of the
    diagnostic), so no alignment strictness is enforced.
    """
    if traj.states is None:
        raise ValueError("attach an initial state before computing fidelities")
    refs, _ = _reference_series(traj, label, strict=False)
    ov = np.einsum("ni,ni->n", refs.conj(), traj.states)
    return np.abs(ov) ** 2


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------

def dynamical_phase(traj: Trajectory, root="root") -> float:
    """Minus the integrated expectation of the reference generator.

    root selects what is integrated: "root" (default) uses each segment's
    uncorrected generator, "full" uses the complete generator including
    corrections, or pass a callable t -> Hamiltonian on absolute time.
    """
    if traj.states is None:
        raise ValueError("attach an initial state before computing phases")
    local = traj.local_times()
    total = 0.0
    for i, seg in enumerate(traj.schedule.segments):
        rows = traj.segment_rows(i)
        ts = local[rows]
        if ts.size < 2:
            continue
        if callable(root):
            hs = np.stack([root(t) for t in traj.times[rows]])
        elif root == "root":
            hs = seg.root_generator_batch(ts)
        elif root == "full":
            hs = seg.generator_batch(ts)
        else:
            raise ValueError('root must be "root", "full" or a callable')
        psi = traj.states[rows]
        expect = np.einsum("ni,nij,nj->n", psi.conj(), hs, psi).real
        total += np.sum(0.5 * (expect[1:] + expect[:-1]) * np.diff(ts))
    return float(-total)


def _unwrapped_overlap_phase(traj: Trajectory, label) -> np.ndarray:
    refs, _ = _reference_series(traj, label, strict=True)
    ov = np.einsum("ni,ni->n", refs.conj(), traj.states)
    mag = np.abs(ov)
    if mag.min() < 0.99:
        raise ValueError(
            f"state does not track the labelled eigenstate (min overlap "
            f"{mag.min():.4f}); total phase against it is not defined"
        )
    raw = np.angle(ov)
    steps = np.diff(raw)
    wrapped = np.pi - np.mod(np.pi - steps, 2.0 * np.pi)
    if wrapped.size and np.max(np.abs(wrapped)) > 0.25 * np.pi:
        raise ValueError(
            "phase steps between samples exceed pi/4; raise `samples` to "
            "unwrap the overlap phase reliably"
        )
    out = np.empty_like(raw)
    out[0] = raw[0]
    out[1:] = raw[0] + np.cumsum(wrapped)
    return out


def total_phase(traj: Trajectory, label) -> float:
    """Unwrapped overlap phase accumulated against the comoving reference."""
    if traj.states is None:
        raise ValueError("attach an initial state before computing phases")
    f = _unwrapped_overlap_phase(traj, label)
    return float(f[-1] - f[0])


@dataclass(frozen=True)
class PhaseDecomposition:
    """total = dynamical + geometric, with closed-form targets.

    Geometric parts are angles and are compared modulo 2*pi; dynamical
    parts are genuine integrals and are compared as-is.
    """

    label: object
    total: float
    dynamical: float
    geometric: float
    expected_geometric: float
    expected_dynamical: float

    @property
    def geometric_deviation(self) -> float:
        return abs(wrap_angle(self.geometric - self.expected_geometric))

    @property
    def dynamical_deviation(self) -> float:
        return abs(self.dynamical - self.expected_dynamical)

    def to_dict(self) -> dict:
        return {
            "label": list(self.label) if isinstance(self.label, tuple) else self.label,
            "total": self.total,
            "dynamical": self.dynamical,
            "geometric": self.geometric,
            "expected_geometric": self.expected_geometric,
            "expected_dynamical": self.expected_dynamical,
            "geometric_deviation": self.geometric_deviation,
            "dynamical_deviation": self.dynamical_deviation,
        }


def solid_angle(theta: float) -> float:
    """Solid angle enclosed by the cone of opening angle theta."""
    return float(2.0 * np.pi * (1.0 - np.cos(theta)))


def conditional_solid_angles(p: TwoQubitParams) -> tuple:
    """Solid angles of the two control-conditioned cones."""
    tt = theta_tilde(p)
    return solid_angle(tt), solid_angle(np.pi - tt)


def delta_omega(p: TwoQubitParams) -> float:
    """Half the difference of the conditional solid angles,
    2*pi*J/sqrt(omega_i^2+J^2). Sets the conditional phase of the echo."""
    return float(2.0 * np.pi * p.coupling / p.rabi)


def loop_phase_decomposition(traj: Trajectory, label: int) -> PhaseDecomposition:
    """Phase decomposition for a single corrected loop.

    Closed forms: dynamical -(1-2p)*omega0*T/2 independent of orientation,
    geometric sign(omega)*(2p-1)*pi*(1-cos theta) modulo 2*pi.
    """
    s = traj.schedule
    if len(s.segments) != 1 or s.segments[0].kind != "tqd-loop":
        raise ValueError("expects a schedule with exactly one corrected loop")
    seg = s.segments[0]
    theta, omega, omega0 = seg.params["theta"], seg.params["omega"], seg.params["omega0"]
    total = total_phase(traj, label)
    dyn = dynamical_phase(traj)
    sgn = 1.0 if omega > 0 else -1.0
    expected_dyn = -(1 - 2 * label) * omega0 * seg.duration / 2.0
    expected_geo = sgn * (2 * label - 1) * np.pi * (1.0 - np.cos(theta))
    return PhaseDecomposition(
        label=label,
        total=total,
        dynamical=dyn,
        geometric=total - dyn,
        expected_geometric=float(expected_geo),
        expected_dynamical=float(expected_dyn),
    )


def echo_phase_decomposition(traj: Trajectory, label) -> PhaseDecomposition:
    """Phase decomposition over a full echo sequence.

    Dynamical phases refocus to zero. The surviving geometric phase is
    sign(omega_first)*(1-2p)*2*pi*cos(theta) for the single-qubit echo and
    (-1)^(p+q)*2*delta_omega for the two-qubit echo, both modulo 2*pi.
    """
    s = traj.schedule
    loops = [seg for seg in s.segments if seg.kind in _LOOP_KINDS_2 + _LOOP_KINDS_4]
    if not loops:
        raise ValueError("schedule contains no loop segments")
    first = loops[0]
    total = total_phase(traj, label)
    dyn = dynamical_phase(traj)
    sgn = 1.0 if first.params["omega"] > 0 else -1.0
    if s.dim == 2:
        theta = first.params["theta"]
        expected_geo = sgn * (1 - 2 * label) * 2.0 * np.pi * np.cos(theta)
    else:
        pp, q = tuple(label)
        p2 = TwoQubitParams(
            first.params["omega_i"], first.params["coupling"], first.params["omega"]
        )
        expected_geo = sgn * ((-1) ** (pp + q)) * 2.0 * delta_omega(p2)
    return PhaseDecomposition(
        label=tuple(label) if s.dim == 4 else label,
        total=total,
        dynamical=dyn,
        geometric=total - dyn,
        expected_geometric=float(expected_geo),
        expected_dynamical=0.0,
    )


def correction_energy_check(p: LoopParams, n_samples: int = 64) -> float:
    """Largest |<phi_p|H_correction|phi_p>| over one loop period and both
    labels. The correction never shifts the tracked level's energy, so
    this should vanish to rounding."""
    ts = np.linspace(0.0, p.period, n_samples)
    worst = 0.0
    for t in ts:
        hc = 0.5 * pauli_dot(tqd_correction(p, t))
        for label in (0, 1):
            v = loop_eigenvector(p, label, t)
            worst = max(worst, abs(np.vdot(v, hc @ v).real))
    return float(worst)
