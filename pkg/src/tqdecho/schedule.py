"""Piecewise drive schedules.

A schedule is an ordered list of segments. Each segment is defined by a
`kind` plus a small JSON-serializable parameter dict, from which its
generator (the Hamiltonian, in angular-frequency units) is reconstructed
deterministically. Keeping segments parametric rather than storing bare
callables makes schedules serializable and makes geometric operations
(axis rotation, orientation reversal) exact parameter updates.

Segment kinds:

* ``tqd-loop`` / ``root-loop``: one full conical precession period of the
  corrected / uncorrected single-qubit drive.
* ``pi-pulse``: constant half-turn pulse about y, on a single qubit or on
  one qubit of a pair.
* ``control-flip``: simultaneous half turn, x on the driven qubit and y on
  the control. This is the refocusing pulse of the two-qubit echo.
* ``idle``: zero generator.
* ``two-qubit-loop``: control-conditioned corrected loop on the driven
  qubit (block-diagonal in the control basis).
* ``exp-loop``: the same conditional loop expressed through static
  couplings plus a rotating transverse drive, including the
  control-frame term omega * (1 x Sz) while the drive is on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fields import LoopParams, TwoQubitParams, experimental_params
from .qcore import ID2, SIGMA_X, SIGMA_Y

__all__ = [
    "Segment",
    "SegmentSchedule",
    "loop_segment",
    "pi_pulse_segment",
    "control_flip_segment",
    "idle_segment",
    "two_qubit_loop_segment",
    "exp_loop_segment",
    "single_loop_schedule",
    "build_echo_sequence",
    "build_two_qubit_sequence",
    "build_exp_two_qubit_sequence",
    "rotate_schedule",
    "schedule_to_json",
    "schedule_from_json",
    "field_timeline",
    "write_field_timeline_csv",
]

_LOOP_KINDS = ("tqd-loop", "root-loop")
_PULSE_KINDS = ("pi-pulse", "control-flip")
_PARAM_KEYS = {
    "tqd-loop": {"theta", "omega", "omega0", "rotation"},
    "root-loop": {"theta", "omega", "omega0", "rotation"},
    "pi-pulse": {"omega_pi", "target"},
    "control-flip": {"omega_pi"},
    "idle": {"dim"},
    "two-qubit-loop": {"omega_i", "coupling", "omega"},
    "exp-loop": {"omega_i", "coupling", "omega", "frame_term"},
}


# ---------------------------------------------------------------------------
# batch field / generator assembly
# ---------------------------------------------------------------------------

def _rotation_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _pack_su2(fields: np.ndarray) -> np.ndarray:
    """(n, 3) real field rows -> (n, 2, 2) Hamiltonians 0.5 * field . sigma."""
    n = fields.shape[0]
    h = np.empty((n, 2, 2), dtype=complex)
    bx, by, bz = fields[:, 0], fields[:, 1], fields[:, 2]
    h[:, 0, 0] = 0.5 * bz
    h[:, 1, 1] = -0.5 * bz
    h[:, 0, 1] = 0.5 * (bx - 1j * by)
    h[:, 1, 0] = 0.5 * (bx + 1j * by)
    return h


def _pack_conditional(h0: np.ndarray, h1: np.ndarray) -> np.ndarray:
    """Assemble control-conditioned blocks into (n, 4, 4).

    Basis order |ab> = 2a + b with the driven qubit first, so the control
    sectors q=0 / q=1 occupy the even / odd index pairs.
    """
    n = h0.shape[0]
    h = np.zeros((n, 4, 4), dtype=complex)
    h[:, ::2, ::2] = h0
    h[:, 1::2, 1::2] = h1
    return h


def _loop_field_batch(params: dict, ts: np.ndarray, corrected: bool) -> np.ndarray:
    theta, omega, omega0 = params["theta"], params["omega"], params["omega0"]
    s, c = np.sin(theta), np.cos(theta)
    wt = omega * ts
    if corrected:
        transverse = (omega0 - omega * c) * s
        bz = omega0 * c + omega * s * s
    else:
        transverse = omega0 * s
        bz = omega0 * c
    out = np.empty((ts.size, 3))
    out[:, 0] = transverse * np.cos(wt)
    out[:, 1] = transverse * np.sin(wt)
    out[:, 2] = bz
    rot = params.get("rotation", 0.0)
    if rot != 0.0:
        out = out @ _rotation_y(rot).T
    return out


def _conditional_field_batch(
    params: dict, ts: np.ndarray, q: int, corrected: bool
) -> np.ndarray:
    omega_i, coupling, omega = params["omega_i"], params["coupling"], params["omega"]
    sign = 1 - 2 * q
    rabi = np.hypot(omega_i, coupling)
    s, c = omega_i / rabi, coupling / rabi
    wt = omega * ts
    if corrected:
        transverse = omega_i - sign * omega * s * c
        bz = sign * coupling + omega * s * s
    else:
        transverse = omega_i
        bz = sign * coupling
    out = np.empty((ts.size, 3))
    out[:, 0] = transverse * np.cos(wt)
    out[:, 1] = transverse * np.sin(wt)
    out[:, 2] = bz
    return out


def _exp_field_batch(params: dict, ts: np.ndarray, q: int) -> np.ndarray:
    p = TwoQubitParams(params["omega_i"], params["coupling"], params["omega"])
    e = experimental_params(p)
    sign = 1 - 2 * q
    transverse = e.omega_i_prime * np.sin(e.theta_prime) + sign * e.j_xz
    bz = e.omega_i_prime * np.cos(e.theta_prime) + p.omega + sign * e.j_zz
    wt = p.omega * ts
    out = np.empty((ts.size, 3))
    out[:, 0] = transverse * np.cos(wt)
    out[:, 1] = transverse * np.sin(wt)
    out[:, 2] = bz
    return out


def _constant_pulse(params: dict, kind: str) -> np.ndarray:
    omega_pi = params["omega_pi"]
    if kind == "control-flip":
        return 0.5 * omega_pi * (np.kron(SIGMA_X, ID2) + np.kron(ID2, SIGMA_Y))
    target = params["target"]
    if target == "single":
        return 0.5 * omega_pi * SIGMA_Y
    if target == "I":
        return 0.5 * omega_pi * np.kron(SIGMA_Y, ID2)
    if target == "II":
        return 0.5 * omega_pi * np.kron(ID2, SIGMA_Y)
    raise ValueError(f"unknown pulse target {target!r}")


def _frame_term_diag(omega: float) -> np.ndarray:
    # omega * (1 x Sz) in the |ab> ordering: diag(+, -, +, -) * omega/2
    return 0.5 * omega * np.array([1.0, -1.0, 1.0, -1.0])


# ---------------------------------------------------------------------------
# segments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """One schedule segment: a kind, its parameters, and a duration.

    The generator is reconstructed from (kind, params) on demand;
    segments with equal fields produce bit-identical generators.
    """

    kind: str
    duration: float
    dim: int
    label: str
    params: dict

    def __post_init__(self):
        if self.kind not in _PARAM_KEYS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if set(self.params) != _PARAM_KEYS[self.kind]:
            raise ValueError(
                f"segment kind {self.kind!r} expects parameters "
                f"{sorted(_PARAM_KEYS[self.kind])}, got {sorted(self.params)}"
            )
        if self.duration < 0.0 or not np.isfinite(self.duration):
            raise ValueError("segment duration must be finite and >= 0")
        if self.dim not in (2, 4):
            raise ValueError("segment dimension must be 2 or 4")

    # -- generators ---------------------------------------------------------

    def generator_batch(self, ts: np.ndarray) -> np.ndarray:
        """Hamiltonians at the given local times, shape (len(ts), dim, dim)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        k = self.kind
        if k in _LOOP_KINDS:
            return _pack_su2(_loop_field_batch(self.params, ts, k == "tqd-loop"))
        if k == "two-qubit-loop":
            return _pack_conditional(
                _pack_su2(_conditional_field_batch(self.params, ts, 0, True)),
                _pack_su2(_conditional_field_batch(self.params, ts, 1, True)),
            )
        if k == "exp-loop":
            h = _pack_conditional(
                _pack_su2(_exp_field_batch(self.params, ts, 0)),
                _pack_su2(_exp_field_batch(self.params, ts, 1)),
            )
            if self.params["frame_term"]:
                idx = np.arange(4)
                h[:, idx, idx] += _frame_term_diag(self.params["omega"])
            return h
        if k in _PULSE_KINDS:
            return np.broadcast_to(
                _constant_pulse(self.params, k), (ts.size, self.dim, self.dim)
            ).copy()
        # idle
        return np.zeros((ts.size, self.dim, self.dim), dtype=complex)

    def root_generator_batch(self, ts: np.ndarray) -> np.ndarray:
        """Uncorrected Hamiltonians: loops drop their transitionless
        correction; pulses and idles are their own root."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        k = self.kind
        if k in _LOOP_KINDS:
            return _pack_su2(_loop_field_batch(self.params, ts, False))
        if k == "two-qubit-loop":
            return _pack_conditional(
                _pack_su2(_conditional_field_batch(self.params, ts, 0, False)),
                _pack_su2(_conditional_field_batch(self.params, ts, 1, False)),
            )
        if k == "exp-loop":
            h = _pack_conditional(
                _pack_su2(_conditional_field_batch(self.params, ts, 0, False)),
                _pack_su2(_conditional_field_batch(self.params, ts, 1, False)),
            )
            if self.params["frame_term"]:
                idx = np.arange(4)
                h[:, idx, idx] += _frame_term_diag(self.params["omega"])
            return h
        return self.generator_batch(ts)

    def generator(self, t: float) -> np.ndarray:
        return self.generator_batch(np.array([t]))[0]

    def root_generator(self, t: float) -> np.ndarray:
        return self.root_generator_batch(np.array([t]))[0]

    def field_batch(self, ts: np.ndarray) -> np.ndarray:
        """Drive field rows (Bx, By, Bz) for dim-2 segments."""
        if self.dim != 2:
            raise ValueError("field form exists only for dim-2 segments")
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        k = self.kind
        if k in _LOOP_KINDS:
            return _loop_field_batch(self.params, ts, k == "tqd-loop")
        if k == "pi-pulse":
            out = np.zeros((ts.size, 3))
            out[:, 1] = self.params["omega_pi"]
            return out
        return np.zeros((ts.size, 3))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "duration": self.duration,
            "dim": self.dim,
            "label": self.label,
            "params": dict(self.params),
        }


# ---------------------------------------------------------------------------
# segment constructors
# ---------------------------------------------------------------------------

def loop_segment(
    p: LoopParams, corrected: bool = True, rotation: float = 0.0
) -> Segment:
    """One full loop period of the (un)corrected single-qubit drive.

    The label records the traversal orientation: loop-C for omega > 0,
    loop-Cbar for omega < 0.
    """
    kind = "tqd-loop" if corrected else "root-loop"
    label = "loop-C" if p.omega > 0 else "loop-Cbar"
    params = {
        "theta": float(p.theta),
        "omega": float(p.omega),
        "omega0": float(p.omega0),
        "rotation": float(rotation),
    }
    return Segment(kind, p.period, 2, label, params)


def pi_pulse_segment(omega_pi: float, target: str = "single") -> Segment:
    """Half-turn pulse about y with generator 0.5*omega_pi*sigma_y and
    duration pi/omega_pi. target selects the qubit: "single" for a lone
    qubit, "I" or "II" for one qubit of a pair."""
    if omega_pi <= 0 or not np.isfinite(omega_pi):
        raise ValueError("omega_pi must be positive and finite")
    if target not in ("single", "I", "II"):
        raise ValueError('pulse target must be "single", "I" or "II"')
    dim = 2 if target == "single" else 4
    label = "pi" if target == "single" else f"pi-{target}"
    return Segment(
        "pi-pulse",
        np.pi / omega_pi,
        dim,
        label,
        {"omega_pi": float(omega_pi), "target": target},
    )


def control_flip_segment(omega_pi: float) -> Segment:
    """Simultaneous half turn: x on the driven qubit, y on the control.

    One constant segment with generator 0.5*omega_pi*(sx x 1 + 1 x sy).
    In the conditional eigenbasis this swaps the control sectors while
    preserving the energy label of the driven qubit, which is what lets
    the second half of the two-qubit echo undo the sector-dependent
    dynamical phases. A y half turn on the control alone does not do
    this; it scrambles sectors when the drive and coupling are comparable.
    """
    if omega_pi <= 0 or not np.isfinite(omega_pi):
        raise ValueError("omega_pi must be positive and finite")
    return Segment(
        "control-flip",
        np.pi / omega_pi,
        4,
        "pi-II",
        {"omega_pi": float(omega_pi)},
    )


def idle_segment(duration: float, dim: int = 2) -> Segment:
    return Segment("idle", float(duration), dim, "idle", {"dim": int(dim)})


def two_qubit_loop_segment(p: TwoQubitParams, reverse: bool = False) -> Segment:
    q = p.reversed() if reverse else p
    label = "loop-C" if q.omega > 0 else "loop-Cbar"
    params = {
        "omega_i": float(q.omega_i),
        "coupling": float(q.coupling),
        "omega": float(q.omega),
    }
    return Segment("two-qubit-loop", q.period, 4, label, params)


def exp_loop_segment(
    p: TwoQubitParams, reverse: bool = False, frame_term: bool = True
) -> Segment:
    """Conditional loop realized via the static-coupling parameters.

    The reversed segment is built from the reversed loop parameters, so
    its cross coupling and static tilt come from the parameter map
    evaluated at -omega.
    """
    q = p.reversed() if reverse else p
    label = "loop-C" if q.omega > 0 else "loop-Cbar"
    params = {
        "omega_i": float(q.omega_i),
        "coupling": float(q.coupling),
        "omega": float(q.omega),
        "frame_term": bool(frame_term),
    }
    return Segment("exp-loop", q.period, 4, label, params)


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentSchedule:
    """Ordered segments of equal dimension."""

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        dims = {s.dim for s in segs}
        if len(dims) != 1:
            raise ValueError(f"mixed segment dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Start times of each segment plus the final end time."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def labels(self) -> list:
        return [s.label for s in self.segments]


def single_loop_schedule(p: LoopParams, corrected: bool = True) -> SegmentSchedule:
    return SegmentSchedule((loop_segment(p, corrected=corrected),))


def build_echo_sequence(
    p: LoopParams,
    omega_pi: float | None = None,
    gaps: Sequence[float] = (0.0, 0.0, 0.0),
) -> SegmentSchedule:
    """Single-qubit echo: loop-C, idle, pi, idle, loop-Cbar, idle, pi.

    The pulse rate defaults to 50*|omega|. Idle gaps default to zero but
    stay in the schedule so timing offsets can be dialed in.
    """
    if omega_pi is None:
        omega_pi = 50.0 * abs(p.omega)
    if len(gaps) != 3:
        raise ValueError("echo sequence takes exactly 3 idle gaps")
    fwd = p if p.omega > 0 else p.reversed()
    pulse = pi_pulse_segment(omega_pi, target="single")
    return SegmentSchedule((
        loop_segment(fwd),
        idle_segment(gaps[0], 2),
        pulse,
        idle_segment(gaps[1], 2),
        loop_segment(fwd.reversed()),
        idle_segment(gaps[2], 2),
        pulse,
    ))


def _interleave_idles(core: list, gaps: Sequence[float] | None, dim: int) -> tuple:
    if gaps is None:
        gaps = (0.0,) * (len(core) - 1)
    if len(gaps) != len(core) - 1:
        raise ValueError(f"expected {len(core) - 1} idle gaps, got {len(gaps)}")
    out = [core[0]]
    for seg, g in zip(core[1:], gaps):
        out.append(idle_segment(g, dim))
        out.append(seg)
    return tuple(out)


def build_two_qubit_sequence(
    p: TwoQubitParams, gaps: Sequence[float] | None = None
) -> SegmentSchedule:
    """Two-qubit echo, eight driven segments with idles interleaved:

        C, pi-I, Cbar, pi-II, C, pi-I, Cbar, pi-II

    pi-I is a y half turn on the driven qubit; pi-II is the combined
    control flip (see control_flip_segment). Fifteen segments total with
    the default zero-duration idles.
    """
    fwd = p if p.omega > 0 else p.reversed()
    pulse_i = pi_pulse_segment(fwd.omega_pi, target="I")
    flip = control_flip_segment(fwd.omega_pi)
    half = [
        two_qubit_loop_segment(fwd),
        pulse_i,
        two_qubit_loop_segment(fwd, reverse=True),
        flip,
    ]
    return SegmentSchedule(_interleave_idles(half + half, gaps, 4))


def build_exp_two_qubit_sequence(
    p: TwoQubitParams,
    frame_term: bool = True,
    gaps: Sequence[float] | None = None,
) -> SegmentSchedule:
    """Two-qubit echo with the loops in the static-coupling realization."""
    fwd = p if p.omega > 0 else p.reversed()
    pulse_i = pi_pulse_segment(fwd.omega_pi, target="I")
    flip = control_flip_segment(fwd.omega_pi)
    half = [
        exp_loop_segment(fwd, frame_term=frame_term),
        pulse_i,
        exp_loop_segment(fwd, reverse=True, frame_term=frame_term),
        flip,
    ]
    return SegmentSchedule(_interleave_idles(half + half, gaps, 4))


def rotate_schedule(s: SegmentSchedule, angle: float) -> SegmentSchedule:
    """Rotate every dim-2 loop field by `angle` about the y axis.

    Pulses about y and idles are invariant under this rotation, so the
    whole propagator transforms by exact conjugation with the spin-space
    half-angle rotation. Only defined for single-qubit schedules.
    """
    if s.dim != 2:
        raise ValueError("rotate_schedule is defined for single-qubit schedules")
    rotated = []
    for seg in s.segments:
        if seg.kind in _LOOP_KINDS:
            params = dict(seg.params)
            params["rotation"] = float(params.get("rotation", 0.0) + angle)
            rotated.append(Segment(seg.kind, seg.duration, 2, seg.label, params))
        else:
            rotated.append(seg)
    return SegmentSchedule(tuple(rotated))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def schedule_to_json(s: SegmentSchedule, indent: int = 2) -> str:
    doc = {"dim": s.dim, "segments": [seg.to_dict() for seg in s.segments]}
    return json.dumps(doc, indent=indent, sort_keys=True)


def _expected_duration(kind: str, params: dict, stated: float) -> float:
    if kind in _LOOP_KINDS or kind in ("two-qubit-loop", "exp-loop"):
        return 2.0 * np.pi / abs(params["omega"])
    if kind in _PULSE_KINDS:
        return np.pi / params["omega_pi"]
    return stated  # idle carries its own duration


def schedule_from_json(text: str) -> SegmentSchedule:
    """Inverse of schedule_to_json, with strict validation.

    Unknown kinds or parameter keys are rejected, and stated durations
    must match the durations implied by the parameters.
    """
    doc = json.loads(text)
    if set(doc) != {"dim", "segments"}:
        raise ValueError("schedule document must have exactly 'dim' and 'segments'")
    segs = []
    for entry in doc["segments"]:
        if set(entry) != {"kind", "duration", "dim", "label", "params"}:
            raise ValueError(f"malformed segment entry: {sorted(entry)}")
        seg = Segment(
            entry["kind"], entry["duration"], entry["dim"], entry["label"],
            dict(entry["params"]),
        )
        expect = _expected_duration(seg.kind, seg.params, seg.duration)
        if abs(seg.duration - expect) > 1e-9 * max(1.0, expect):
            raise ValueError(
                f"segment duration {seg.duration} inconsistent with parameters "
                f"(expected {expect})"
            )
        segs.append(seg)
    s = SegmentSchedule(tuple(segs))
    if s.dim != doc["dim"]:
        raise ValueError("schedule dim does not match segment dims")
    return s


# ---------------------------------------------------------------------------
# field timeline export
# ---------------------------------------------------------------------------

def field_timeline(s: SegmentSchedule, samples_per_segment: int = 256) -> np.ndarray:
    """Sample the drive field over the schedule. Rows (t, Bx, By, Bz).

    Zero-duration segments contribute a single row; boundaries are
    duplicated (end of one segment, start of the next) so segmentwise
    consumers see closed intervals. Single-qubit schedules only.
    """
    if s.dim != 2:
        raise ValueError("field timeline is defined for single-qubit schedules")
    if samples_per_segment < 2:
        raise ValueError("need at least 2 samples per segment")
    rows = []
    t0 = 0.0
    for seg in s.segments:
        if seg.duration == 0.0:
            local = np.array([0.0])
        else:
            local = np.linspace(0.0, seg.duration, samples_per_segment)
        fields = seg.field_batch(local)
        block = np.empty((local.size, 4))
        block[:, 0] = t0 + local
        block[:, 1:] = fields
        rows.append(block)
        t0 += seg.duration
    return np.vstack(rows)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_field_timeline_csv(
    path, s: SegmentSchedule, samples_per_segment: int = 256
) -> None:
    """CSV with header t,Bx,By,Bz; floats at full precision for
    reproducible diffs."""
    data = field_timeline(s, samples_per_segment)
    with open(path, "w", newline="") as fh:
        fh.write("t,Bx,By,Bz\n")
        for row in data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
