"""Flow of the meromorphic local model p(y) = y_2 ... y_k / y_1 on C^{n+1}.

The model carries the torus action rotating y_1, ..., y_k.  The function
H = -|p|^2 / 2 only depends on the moduli |y_j|, so its Hamiltonian flow is a
torus rotation.  We integrate the normalised field

    X'(y) = -i c(y) (-y_1/|y_1|^2, y_2/|y_2|^2, ..., y_k/|y_k|^2, 0, ..., 0),
    c(y) = (1/|y_1|^2 + ... + 1/|y_k|^2)^{-1},

which rotates p at unit speed (Dp(X') = -i p), carry tangent frames along by
the linearised flow and follow the phase of the frames against the volume form

    eta = dy_1 ^ dy_2/y_2 ^ ... ^ dy_k/y_k ^ dy_{k+1} ^ ... ^ dy_{n+1}.

Complex vectors stand for real vectors of R^{2n+2}; the symplectic pairing is
omega(u, v) = Im <u, v> = sum (u_x v_y - u_y v_x).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LocalModel",
    "FlowState",
    "PhaseSample",
    "Trajectory",
    "SingularityError",
    "PhaseLiftError",
    "StepBudgetError",
    "DegenerateFrameError",
    "hamiltonian_field",
    "energy_gradient_field",
    "field_jacobian_apply",
    "symplectic_products",
    "torus_adapted_frame",
    "phase_of_frame",
    "integrate_flow",
    "PhaseTermReport",
    "verify_phase_term",
    "phase_term_sweep",
    "fiber_point",
    "fiber_frame",
    "fiber_phase",
    "MonodromyProbe",
    "monodromy_phase_probe",
    "write_trajectory_csv",
]

SINGULAR_MODULUS = 1e-8
DIFF_STEP = 1e-6
MAX_STEPS = 10_000_000
MAX_DT = 1e-3
PROBE_EPSILON = 0.5


class SingularityError(ValueError):
    """A rotated coordinate came too close to zero."""


class PhaseLiftError(RuntimeError):
    """The phase jumped by a quarter turn or more between two samples."""


class StepBudgetError(RuntimeError):
    """The requested integration needs too many steps."""


class DegenerateFrameError(ValueError):
    """The volume form vanishes on the frame."""


@dataclass(frozen=True)
class LocalModel:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 2 <= self.k <= self.n + 1:
            raise ValueError(f"k must satisfy 2 <= k <= n+1, got k={self.k}, n={self.n}")

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def signs(self) -> np.ndarray:
        """Torus weights of p: -1 on y_1, +1 on y_2..y_k, 0 elsewhere."""
        s = np.zeros(self.dim)
        s[0] = -1.0
        s[1 : self.k] = 1.0
        return s

    def p(self, y) -> complex:
        y = np.asarray(y, dtype=complex)
        return complex(np.prod(y[1 : self.k]) / y[0])

    def energy(self, y) -> float:
        return -0.5 * abs(self.p(y)) ** 2

    def rotate(self, y, s) -> np.ndarray:
        """The torus action: multiply y_j by exp(i s_j) for j <= k."""
        y = np.array(y, dtype=complex)
        y[: self.k] *= np.exp(1j * np.asarray(s, dtype=float))
        return y

    def equivariance_defect(self, y, s) -> float:
        """|p(rho_s y) - exp(i <weights, s>) p(y)|."""
        s = np.asarray(s, dtype=float)
        phase = np.exp(1j * float(np.dot(self.signs[: self.k], s)))
        return abs(self.p(self.rotate(y, s)) - phase * self.p(y))

    def guard(self, y) -> None:
        y = np.asarray(y)
        mods = np.abs(y[..., : self.k])
        if np.any(mods < SINGULAR_MODULUS):
            raise SingularityError(
                f"coordinate modulus {float(mods.min()):.3g} below {SINGULAR_MODULUS}"
            )


def _field(model: LocalModel, ys: np.ndarray) -> np.ndarray:
    """X' on a batch of points, shape (..., n+1)."""
    head = ys[..., : model.k]
    inv = 1.0 / (head.real**2 + head.imag**2)
    c = 1.0 / inv.sum(axis=-1, keepdims=True)
    out = np.zeros_like(ys)
    out[..., : model.k] = -1j * c * model.signs[: model.k] * head * inv
    return out


def hamiltonian_field(model: LocalModel, y) -> np.ndarray:
    """The normalised rotation field X' at y."""
    y = np.asarray(y, dtype=complex)
    model.guard(y)
    return _field(model, y)


def energy_gradient_field(model: LocalModel, y, h: float = DIFF_STEP) -> np.ndarray:
    """Hamiltonian field of H by central differences, with i_X omega = -dH.

    Equals |p|^2 (1/|y_1|^2 + ... + 1/|y_k|^2) X', a positive multiple that is
    constant along the flow, so both fields trace the same orbits.
    """
    y = np.asarray(y, dtype=complex)
    model.guard(y)
    out = np.zeros(model.dim, dtype=complex)
    for j in range(model.dim):
        e = np.zeros(model.dim, dtype=complex)
        e[j] = h
        hx = (model.energy(y + e) - model.energy(y - e)) / (2 * h)
        hy = (model.energy(y + 1j * e) - model.energy(y - 1j * e)) / (2 * h)
        out[j] = -hy + 1j * hx
    return out


def field_jacobian_apply(model: LocalModel, y: np.ndarray, frame: np.ndarray, h: float = DIFF_STEP) -> np.ndarray:
    """DX'(y) applied to each row of ``frame`` by central differences."""
    pts = np.concatenate([y + h * frame, y - h * frame])
    vals = _field(model, pts)
    m = len(frame)
    return (vals[:m] - vals[m:]) / (2 * h)


def symplectic_products(frame) -> np.ndarray:
    """Matrix of omega(v_a, v_b) over the rows of ``frame``."""
    frame = np.asarray(frame, dtype=complex)
    return (frame.conj() @ frame.T).imag


def torus_adapted_frame(model: LocalModel, y) -> np.ndarray:
    """Rows i y_j e_j (j <= k) followed by the real unit vectors e_j (j > k)."""
    y = np.asarray(y, dtype=complex)
    frame = np.zeros((model.dim, model.dim), dtype=complex)
    for j in range(model.dim):
        frame[j, j] = 1j * y[j] if j < model.k else 1.0
    return frame


def _volume(model: LocalModel, frame: np.ndarray, y: np.ndarray) -> complex:
    mat = np.array(frame, dtype=complex).T.copy()  # column a is frame vector a
    mat[1 : model.k, :] /= y[1 : model.k, None]
    return complex(np.linalg.det(mat))


def phase_of_frame(model: LocalModel, frame, y) -> complex:
    """eta(v_1, ..., v_{n+1})^2 normalised to modulus one."""
    y = np.asarray(y, dtype=complex)
    frame = np.asarray(frame, dtype=complex)
    if frame.shape != (model.dim, model.dim):
        raise ValueError(f"frame must hold {model.dim} vectors of length {model.dim}")
    vol = _volume(model, frame, y)
    scale = float(np.prod(np.linalg.norm(frame, axis=1))) or 1.0
    if abs(vol) < 1e-12 * scale:
        raise DegenerateFrameError("volume form vanishes on the frame")
    sq = vol * vol
    return sq / abs(sq)


@dataclass
class FlowState:
    y: np.ndarray
    frame: np.ndarray
    time: float = 0.0


@dataclass
class PhaseSample:
    """Continuous lift of a phase, in turns, starting from 0."""

    times: list = field(default_factory=list)
    values: list = field(default_factory=list)
    _last: complex | None = None

    def push(self, t: float, phase: complex) -> None:
        if self._last is None:
            value = 0.0
        else:
            step = float(np.angle(phase / self._last)) / (2 * math.pi)
            if abs(step) >= 0.25:
                raise PhaseLiftError(f"phase jumped by {step:.3f} turns at t={t:.6g}")
            value = self.values[-1] + step
        self._last = phase
        self.times.append(t)
        self.values.append(value)

    @property
    def final(self) -> float:
        return self.values[-1] if self.values else 0.0


@dataclass
class Trajectory:
    times: np.ndarray
    ys: np.ndarray
    final: FlowState
    phase: PhaseSample | None
    max_symplectic: float
    richardson_error: float | None = None
    extrapolated_phase: float | None = None


def _rk4(model: LocalModel, y: np.ndarray, frame: np.ndarray, dt: float):
    def rhs(yy, ff):
        model.guard(yy)
        return _field(model, yy), field_jacobian_apply(model, yy, ff)

    k1y, k1f = rhs(y, frame)
    k2y, k2f = rhs(y + 0.5 * dt * k1y, frame + 0.5 * dt * k1f)
    k3y, k3f = rhs(y + 0.5 * dt * k2y, frame + 0.5 * dt * k2f)
    k4y, k4f = rhs(y + dt * k3y, frame + dt * k3f)
    return (
        y + dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y),
        frame + dt / 6 * (k1f + 2 * k2f + 2 * k3f + k4f),
    )


def _run(model, state, T, dt, phase_fn):
    steps = int(round(T / dt)) if T > 0 else 0
    if steps > MAX_STEPS:
        raise StepBudgetError(f"{steps} steps exceed the budget of {MAX_STEPS}")
    h = T / steps if steps else 0.0
    y = np.array(state.y, dtype=complex)
    frame = np.array(state.frame, dtype=complex)
    model.guard(y)
    times = np.empty(steps + 1)
    ys = np.empty((steps + 1, model.dim), dtype=complex)
    times[0], ys[0] = state.time, y
    sample = PhaseSample() if phase_fn is not None else None
    if sample is not None:
        sample.push(state.time, phase_fn(frame, y, state.time))
    worst = float(np.abs(symplectic_products(frame)).max())
    for i in range(1, steps + 1):
        y, frame = _rk4(model, y, frame, h)
        t = state.time + i * h
        times[i], ys[i] = t, y
        if sample is not None:
            sample.push(t, phase_fn(frame, y, t))
        worst = max(worst, float(np.abs(symplectic_products(frame)).max()))
    return Trajectory(times, ys, FlowState(y, frame, state.time + T), sample, worst)


def integrate_flow(
    model: LocalModel,
    state: FlowState,
    T: float,
    dt: float = MAX_DT,
    phase_fn=None,
    richardson: bool = False,
) -> Trajectory:
    """RK4 on the point and on its frame (linearised flow of X').

    ``phase_fn(frame, y, t)`` returns a unit complex number that is lifted
    continuously along the run.  With ``richardson`` the run is repeated at
    half the step and the step-halving error of the final point (and of the
    final lifted phase) is recorded.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, {MAX_DT}]")
    coarse = _run(model, state, T, dt, phase_fn)
    if not richardson or T == 0:
        return coarse
    fine = _run(model, state, T, dt / 2, phase_fn)
    fine.richardson_error = float(np.abs(fine.final.y - coarse.final.y).max()) / 15
    if phase_fn is not None:
        a, b = coarse.phase.final, fine.phase.final
        fine.extrapolated_phase = (16 * b - a) / 15
        fine.richardson_error = max(fine.richardson_error, abs(b - a) / 15)
    return fine


@dataclass
class PhaseTermReport:
    k: int
    n: int
    y0: tuple
    T: float
    measured: float
    predicted: float
    deviation: float
    richardson_error: float | None
    max_symplectic: float
    modulus_drift: float
    energy_drift: float
    tolerance: float = 1e-4

    @property
    def ok(self) -> bool:
        return self.deviation < self.tolerance

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "y0": [[z.real, z.imag] for z in self.y0],
            "T": self.T,
            "measured": self.measured,
            "predicted": self.predicted,
            "deviation": self.deviation,
            "richardson_error": self.richardson_error,
            "max_symplectic": self.max_symplectic,
            "modulus_drift": self.modulus_drift,
            "energy_drift": self.energy_drift,
            "ok": self.ok,
        }


def predicted_phase_term(model: LocalModel, y, T: float) -> float:
    """(2T / 2 pi) (1 + |y_1|^2/|y_2|^2 + ... + |y_1|^2/|y_k|^2)^{-1}."""
    mods = np.abs(np.asarray(y, dtype=complex)[: model.k]) ** 2
    return 2 * T / (2 * math.pi) / float(np.sum(mods[0] / mods))


def verify_phase_term(model: LocalModel, y0, T: float = 1.0, dt: float = MAX_DT, tolerance: float = 1e-4) -> PhaseTermReport:
    """Lifted phase of the torus adapted frame after time T against the closed form."""
    y0 = np.asarray(y0, dtype=complex)
    state = FlowState(y0, torus_adapted_frame(model, y0))
    traj = integrate_flow(
        model, state, T, dt, phase_fn=lambda fr, y, t: phase_of_frame(model, fr, y), richardson=T > 0
    )
    measured = traj.extrapolated_phase if traj.extrapolated_phase is not None else traj.phase.final
    predicted = predicted_phase_term(model, y0, T)
    mods0 = np.abs(y0[: model.k])
    drift = float(np.abs(np.abs(traj.ys[:, : model.k]) - mods0).max())
    e0 = model.energy(y0)
    edrift = max(abs(model.energy(y) - e0) for y in traj.ys[:: max(1, len(traj.ys) // 200)])
    edrift = max(edrift, abs(model.energy(traj.final.y) - e0))
    return PhaseTermReport(
        model.k, model.n, tuple(complex(z) for z in y0), T, measured, predicted,
        abs(measured - predicted), traj.richardson_error, traj.max_symplectic, drift, edrift, tolerance,
    )


def _sweep_points() -> list:
    """Ten (n, k, y0) cases with varied modulus ratios."""
    cases = []
    for n, k, mods in [
        (2, 2, (1.0, 1.0)),
        (2, 2, (1.0, 2.0)),
        (2, 2, (0.5, 1.5)),
        (2, 3, (1.0, 2.0, 2.0)),
        (2, 3, (0.8, 0.6, 1.1)),
        (3, 2, (1.0, 0.7)),
        (3, 2, (2.0, 1.0)),
        (3, 3, (1.0, 2.0, 2.0)),
        (3, 3, (1.2, 0.9, 0.5)),
        (3, 4, (1.0, 1.5, 0.8, 1.3)),
    ]:
        args = [0.3 + 0.7 * j for j in range(k)]
        head = [r * complex(math.cos(a), math.sin(a)) for r, a in zip(mods, args)]
        tail = [0.7 + 0.1j * j for j in range(n + 1 - k)]
        cases.append((n, k, head + tail))
    return cases


def phase_term_sweep(T: float = 1.0, dt: float = MAX_DT) -> list:
    return [verify_phase_term(LocalModel(n, k), y0, T, dt) for n, k, y0 in _sweep_points()]


def fiber_point(model: LocalModel, zeta: complex, moduli=None) -> np.ndarray:
    """A point of p^{-1}(zeta) with |y_2| <= ... <= |y_k|, solved for y_1."""
    if zeta == 0:
        raise ValueError("zeta must be nonzero")
    if moduli is None:
        moduli = [0.5 + 0.1 * j for j in range(model.k - 1)]
    if len(moduli) != model.k - 1:
        raise ValueError(f"need {model.k - 1} moduli for y_2..y_k")
    head = [r * complex(math.cos(0.4 * (j + 1)), math.sin(0.4 * (j + 1))) for j, r in enumerate(moduli)]
    tail = [0.3 + 0.05j * j for j in range(model.n + 1 - model.k)]
    y1 = complex(np.prod(head)) / zeta
    y = np.array([y1] + head + tail, dtype=complex)
    model.guard(y)
    return y


def fiber_frame(model: LocalModel, y) -> np.ndarray:
    """Rows i y_1 e_1 + i y_j e_j (2 <= j <= k) and e_j (j > k).

    They span the torus adapted Lagrangian intersected with ker Dp.
    """
    y = np.asarray(y, dtype=complex)
    rows = []
    for j in range(1, model.k):
        v = np.zeros(model.dim, dtype=complex)
        v[0], v[j] = 1j * y[0], 1j * y[j]
        rows.append(v)
    for j in range(model.k, model.dim):
        v = np.zeros(model.dim, dtype=complex)
        v[j] = 1.0
        rows.append(v)
    return np.array(rows)


def fiber_phase(model: LocalModel, frame, y) -> complex:
    """Phase of fiber vectors against eta / (dp / p^2).

    The fiber form is evaluated as eta(w, v_1, ..., v_n) p^2 / Dp(w) with the
    transverse vector w = X'(y), for which Dp(w) = -i p.
    """
    y = np.asarray(y, dtype=complex)
    w = _field(model, y)
    full = np.vstack([w[None, :], np.asarray(frame, dtype=complex)])
    p = model.p(y)
    dp_w = -1j * p
    vol = _volume(model, full, y) * p * p / dp_w
    if abs(vol) < 1e-14:
        raise DegenerateFrameError("fiber volume form vanishes on the frame")
    sq = vol * vol
    return sq / abs(sq)


@dataclass
class MonodromyProbe:
    k: int
    n: int
    zeta: complex
    d: int
    measured: float
    closed_form: float
    bound: float
    epsilon: float
    max_symplectic: float
    fiber_drift: float

    @property
    def margin(self) -> float:
        return self.bound - self.measured

    @property
    def below_bound(self) -> bool:
        return self.margin > 0

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "zeta": [self.zeta.real, self.zeta.imag],
            "d": self.d,
            "measured": self.measured,
            "closed_form": self.closed_form,
            "bound": self.bound,
            "margin": self.margin,
            "status": "probe",
        }


def monodromy_bound(model: LocalModel, y, zeta: complex, d: int, epsilon: float = PROBE_EPSILON) -> float:
    """Upper bound for the lifted phase of the d-fold monodromy at y.

    For k >= 3 it uses |y_3|; for k = 2 there is no y_3 and the bound falls
    back on the rotation term 2d((1 + sum |y_1|^2/|y_j|^2)^{-1} - 1).
    """
    y = np.asarray(y, dtype=complex)
    if model.k >= 3:
        lead = -2 * d / (1 + abs(zeta) ** 2 / abs(y[2]) ** (2 * (model.k - 1)))
    else:
        lead = 2 * d * (predicted_phase_term(model, y, math.pi) - 1)
    return lead + model.n + 1 + epsilon


def monodromy_phase_probe(
    model: LocalModel,
    zeta: complex,
    d: int,
    moduli=None,
    dt: float = MAX_DT,
    epsilon: float = PROBE_EPSILON,
) -> MonodromyProbe:
    """Carry a fiber frame d times around |p| = |zeta| and lift its phase.

    The transport field X' is the horizontal lift of -i zeta d/dzeta, so time
    2 pi d brings every point back to the fiber over zeta.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    zeta = complex(zeta)
    y0 = fiber_point(model, zeta, moduli)
    frame0 = fiber_frame(model, y0)
    traj = integrate_flow(
        model, FlowState(y0, frame0), 2 * math.pi * d, dt,
        phase_fn=lambda fr, y, t: fiber_phase(model, fr, y),
    )
    measured = traj.phase.final
    closed = 2 * d * (predicted_phase_term(model, y0, math.pi) - 1)
    drift = abs(model.p(traj.final.y) - zeta)
    return MonodromyProbe(
        model.k, model.n, zeta, d, measured, closed,
        monodromy_bound(model, y0, zeta, d, epsilon), epsilon, traj.max_symplectic, drift,
    )


def write_trajectory_csv(traj: Trajectory, path: str) -> str:
    """Columns t, Re y_j, Im y_j, lifted phase (blank when not tracked)."""
    dim = traj.ys.shape[1]
    header = ["t"] + [f"{part}_y{j + 1}" for j in range(dim) for part in ("re", "im")] + ["phase"]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i, t in enumerate(traj.times):
                row = [f"{t:.9g}"]
                for z in traj.ys[i]:
                    row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
                row.append(f"{traj.phase.values[i]:.12g}" if traj.phase is not None else "")
                writer.writerow(row)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path
