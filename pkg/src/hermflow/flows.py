"""The reduced (alpha, beta) system of the Hermitian curvature flows on the
Hopf metric family, its stability scalars, and the preservation predicate.

A flow in the family is selected by four real coefficients (a, b, c, d)
weighting the torsion quadratics.  On the two-parameter metric family the
flow closes into an ODE system whose right-hand sides depend only on the
ratio ``gamma = beta / alpha``:

    alpha' = gamma + 1 - n + (gamma + 1) (a + 2b + (n-1) d)
    beta'  = gamma (1 - 2n - gamma (n-1))
             + (gamma + 1)^2 (n-1) (a + (n-1) c)
             - (gamma + 1) (a + 2b + (n-1) d)

and the ratio evolves as ``gamma' = (gamma + 1) [(F - n) gamma + F] / alpha``
with ``F = (n-2) a - 2 b + (n-1)^2 c - (n-1) d``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

CONVERGENCE_TOL = 1e-6
CONVERGENCE_STEPS = 100
MIN_DT = 1e-12
#: alpha shrinking below this fraction of its start value counts as reaching
#: the cone boundary (the scalar system is singular there)
ALPHA_EXIT_FRACTION = 1e-8


@dataclass(frozen=True)
class FlowCoefficients:
    a: float
    b: float
    c: float
    d: float
    name: str | None = None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


NAMED_FLOWS = {
    "gradient": FlowCoefficients(0.5, -0.25, -0.5, 1.0, name="gradient"),
    "pluriclosed": FlowCoefficients(1.0, 0.0, 0.0, 0.0, name="pluriclosed"),
    # the unique coefficient tuple whose F scalar is 1 in every dimension
    "ustinovskiy": FlowCoefficients(0.0, -0.5, 0.0, 0.0, name="ustinovskiy"),
}


def named_flow(name: str) -> FlowCoefficients:
    try:
        return NAMED_FLOWS[name]
    except KeyError:
        raise ValueError(f"unknown flow {name!r}; known: {sorted(NAMED_FLOWS)}") from None


@dataclass(frozen=True)
class FlowScalars:
    F: float
    L: float
    static_ratio: float | None


def scalars(fc: FlowCoefficients, n: int) -> FlowScalars:
    """The two combinations governing the ratio dynamics, plus the static
    ratio ``F / (n - F)`` whenever ``F < n``."""
    if n < 2:
        raise ValueError(f"complex dimension must be >= 2, got {n}")
    F = (n - 2) * fc.a - 2 * fc.b + (n - 1) ** 2 * fc.c - (n - 1) * fc.d
    L = 1 + fc.a + 2 * fc.b + (n - 1) * fc.d
    ratio = F / (n - F) if F < n else None
    if ratio is not None and not ratio > -1:
        raise AssertionError("static ratio left the admissible range")
    return FlowScalars(F=F, L=L, static_ratio=ratio)


def _check_state(alpha: float, beta: float) -> None:
    if not alpha > 0:
        raise ValueError(f"alpha > 0 fails: alpha={alpha!r}")
    if not beta > -alpha:
        raise ValueError(f"beta > -alpha fails: beta={beta!r}, alpha={alpha!r}")


def ode_rhs(state: tuple[float, float], fc: FlowCoefficients, n: int
            ) -> tuple[float, float]:
    """Right-hand sides (alpha', beta') at an admissible state."""
    alpha, beta = state
    _check_state(alpha, beta)
    g = beta / alpha
    p = fc.a + 2 * fc.b + (n - 1) * fc.d
    alpha_dot = g + 1 - n + (g + 1) * p
    beta_dot = (g * (1 - 2 * n - g * (n - 1))
                + (g + 1) ** 2 * (n - 1) * (fc.a + (n - 1) * fc.c)
                - (g + 1) * p)
    return alpha_dot, beta_dot


def gamma_rate(alpha: float, gamma: float, fc: FlowCoefficients, n: int) -> float:
    """Closed-form ratio velocity ``(gamma + 1) [(F - n) gamma + F] / alpha``."""
    sc = scalars(fc, n)
    return (gamma + 1.0) * ((sc.F - n) * gamma + sc.F) / alpha


class Termination(enum.Enum):
    REACHED_T_END = "reached_t_end"
    LEFT_ADMISSIBLE_CONE = "left_admissible_cone"
    CONVERGED = "converged"


@dataclass(frozen=True)
class FlowTrajectory:
    n: int
    coefficients: FlowCoefficients
    times: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    gammas: np.ndarray
    termination: Termination
    exit_time: float | None

    def summary(self) -> dict:
        sc = scalars(self.coefficients, self.n)
        return {
            "F": sc.F,
            "L": sc.L,
            "static_ratio": sc.static_ratio,
            "termination": self.termination.value,
            "exit_time": self.exit_time,
            "final_gamma": float(self.gammas[-1]),
            "final_alpha": float(self.alphas[-1]),
        }


def _rk4_step(state: np.ndarray, fc: FlowCoefficients, n: int, dt: float
              ) -> np.ndarray:
    def rhs(y: np.ndarray) -> np.ndarray:
        ad, bd = ode_rhs((y[0], y[1]), fc, n)
        return np.array([ad, bd])

    k1 = rhs(state)
    k2 = rhs(state + 0.5 * dt * k1)
    k3 = rhs(state + 0.5 * dt * k2)
    k4 = rhs(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_fixed_step(alpha0: float, beta0: float, fc: FlowCoefficients,
                         n: int, t_end: float, dt: float) -> tuple[float, float]:
    """Plain fixed-step Runge-Kutta endpoint, exposed for order checks."""
    _check_state(alpha0, beta0)
    steps = int(round(t_end / dt))
    if abs(steps * dt - t_end) > 1e-12 * t_end:
        raise ValueError("t_end must be an integer multiple of dt")
    state = np.array([float(alpha0), float(beta0)])
    for _ in range(steps):
        state = _rk4_step(state, fc, n, dt)
        _check_state(state[0], state[1])
    return float(state[0]), float(state[1])


#: per-step relative tolerance of the ratio, for the step-doubling control
STEP_GAMMA_TOL = 1e-10


def integrate(alpha0: float, beta0: float, fc: FlowCoefficients, n: int,
              t_end: float, dt: float = 1e-3) -> FlowTrajectory:
    """Integrate the (alpha, beta) system with classical Runge-Kutta.

    Steps use a doubling error estimate on the ratio (full step against two
    half steps) and are halved down to ``MIN_DT`` when inaccurate or when
    they would leave the admissible cone; the ratio grows singular where
    alpha reaches zero in finite time, so alpha dropping below
    ``ALPHA_EXIT_FRACTION`` of its start value terminates the trajectory
    with the cone exit recorded (a diagnostic, not an error).  Convergence
    of the ratio to the static value is declared after it stays within
    ``CONVERGENCE_TOL`` for ``CONVERGENCE_STEPS`` consecutive steps.
    """
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    _check_state(alpha0, beta0)
    sc = scalars(fc, n)
    state = np.array([float(alpha0), float(beta0)])
    t = 0.0
    times = [0.0]
    alphas = [state[0]]
    betas = [state[1]]
    near_static = 0
    termination = Termination.REACHED_T_END
    exit_time: float | None = None

    def attempt(y: np.ndarray, h: float) -> np.ndarray | None:
        """Two half steps with an accuracy check against one full step."""
        try:
            full = _rk4_step(y, fc, n, h)
            _check_state(full[0], full[1])
            half = _rk4_step(y, fc, n, 0.5 * h)
            _check_state(half[0], half[1])
            fine = _rk4_step(half, fc, n, 0.5 * h)
            _check_state(fine[0], fine[1])
        except ValueError:
            return None
        gamma_err = abs(full[1] / full[0] - fine[1] / fine[0])
        if gamma_err > STEP_GAMMA_TOL * (1.0 + abs(fine[1] / fine[0])):
            return None
        return fine

    while t < t_end - 1e-12:
        h = min(dt, t_end - t)
        candidate = None
        while h >= MIN_DT:
            candidate = attempt(state, h)
            if candidate is not None:
                break
            h *= 0.5
        if candidate is None:
            termination = Termination.LEFT_ADMISSIBLE_CONE
            exit_time = t
            break
        state = candidate
        t += h
        times.append(t)
        alphas.append(state[0])
        betas.append(state[1])
        if state[0] < ALPHA_EXIT_FRACTION * alpha0:
            termination = Termination.LEFT_ADMISSIBLE_CONE
            exit_time = t
            break
        if sc.static_ratio is not None:
            if abs(state[1] / state[0] - sc.static_ratio) < CONVERGENCE_TOL:
                near_static += 1
                if near_static >= CONVERGENCE_STEPS:
                    termination = Termination.CONVERGED
                    break
            else:
                near_static = 0

    alphas = np.array(alphas)
    betas = np.array(betas)
    return FlowTrajectory(n=n, coefficients=fc, times=np.array(times),
                          alphas=alphas, betas=betas, gammas=betas / alphas,
                          termination=termination, exit_time=exit_time)


@dataclass(frozen=True)
class PreservationReport:
    preserved: bool
    F: float
    bound: float
    margin: float


def preserves_nonnegativity(fc: FlowCoefficients, n: int) -> PreservationReport:
    """Whether the flow keeps the non-negative part of the Hopf family.

    The sharp criterion is ``F <= n * g_n / (g_n + 1)`` with the threshold
    ratio ``g_n`` (0 for n=2, -1/2 beyond), i.e. bound 0 in dimension two and
    ``-n`` from dimension three on.
    """
    from .positivity import gamma_threshold

    if n < 2:
        raise ValueError(f"complex dimension must be >= 2, got {n}")
    gn = gamma_threshold(n)
    bound = n * gn / (gn + 1.0)
    F = scalars(fc, n).F
    return PreservationReport(preserved=F <= bound, F=F, bound=bound,
                              margin=bound - F)


# ---------------------------------------------------------------------------
# trajectory export
# ---------------------------------------------------------------------------

def trajectory_csv(traj: FlowTrajectory) -> str:
    lines = ["t,alpha,beta,gamma"]
    for t, a, b, g in zip(traj.times, traj.alphas, traj.betas, traj.gammas):
        lines.append(f"{t:.12g},{a:.12g},{b:.12g},{g:.12g}")
    return "\n".join(lines) + "\n"


def trajectory_json(traj: FlowTrajectory) -> str:
    doc = {
        "n": traj.n,
        "coefficients": {"a": traj.coefficients.a, "b": traj.coefficients.b,
                         "c": traj.coefficients.c, "d": traj.coefficients.d,
                         "name": traj.coefficients.name},
        "summary": traj.summary(),
        "t": [float(x) for x in traj.times],
        "alpha": [float(x) for x in traj.alphas],
        "beta": [float(x) for x in traj.betas],
        "gamma": [float(x) for x in traj.gammas],
    }
    return json.dumps(doc, sort_keys=True)
