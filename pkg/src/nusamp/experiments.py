"""Operational demonstrations on sampled systems.

Simulation under impulse and zero-order-hold inputs, deadbeat input design,
initial-state reconstruction from outputs, and the three-instant taxonomy of
second-order oscillatory schedules.

Impulse semantics: an input of weight u at instant t adds ``b * u`` to the
state instantaneously; the recorded state at each instant is the one the
input acts on (pre-jump), so the recursion is

    x(t[i+1]) = exp(A (t[i+1] - t[i])) (x(t[i]) + b * u[i]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .criterion import SamplingSchedule, joint_verdict, shifted_intervals
from .errors import (
    DimensionError,
    InsufficientScheduleError,
    SingularScheduleError,
    UnsupportedOrderError,
)
from .system_model import Realization, modal_decompose, require_minimal


@dataclass(frozen=True)
class Trajectory:
    """States and outputs recorded at the sampling instants."""

    instants: tuple
    states: np.ndarray
    outputs: np.ndarray


@dataclass(frozen=True)
class CaseLabel:
    """Three-instant taxonomy of a second-order oscillatory schedule.

    * ``a``: the first two mode-space vectors are independent, so the strong
      and the weak property pair both hold;
    * ``b``: they are dependent but the third vector stays in their span, so
      only the weaker controllability / constructibility pair survives;
    * ``c``: dependent and the third vector leaves the span; nothing
      survives.  Uniform schedules never produce this case.
    """

    label: str
    Y0: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    pair_sigma_ratio: float
    membership_residual: float


def _input_vector(inputs, schedule: SamplingSchedule) -> np.ndarray:
    u = np.asarray(inputs, dtype=float).reshape(-1)
    expected = len(schedule) - 1
    if u.shape[0] != expected:
        raise DimensionError(
            f"expected {expected} inputs for {len(schedule)} instants, got {u.shape[0]}"
        )
    if not np.all(np.isfinite(u)):
        raise DimensionError("inputs must be finite")
    return u


def _state_vector(values, n: int, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise DimensionError(f"{name} has {v.shape[0]} entries, expected {n}")
    return v


def simulate_impulse(
    realization: Realization,
    schedule: SamplingSchedule,
    inputs,
    x0=None,
) -> Trajectory:
    """Propagate impulse inputs: one weight per instant except the last."""
    u = _input_vector(inputs, schedule)
    t = schedule.instants
    x = (
        np.zeros(realization.n)
        if x0 is None
        else _state_vector(x0, realization.n, "x0")
    )
    states = [x]
    for i in range(len(u)):
        step = numerics.expm(realization.A, t[i + 1] - t[i])
        x = step @ (x + realization.b * u[i])
        states.append(x)
    states = np.array(states)
    return Trajectory(t, states, states @ realization.c)


def _zoh_step(realization: Realization, dt: float):
    """ZOH transition pair (exp(A dt), integral of exp(A s) ds times b).

    Both come out of one exponential of the (n+1)-square block matrix
    [[A, b], [0, 0]] scaled by dt.
    """
    n = realization.n
    augmented = np.zeros((n + 1, n + 1))
    augmented[:n, :n] = realization.A
    augmented[:n, n] = realization.b
    transition = numerics.expm(augmented, dt)
    return transition[:n, :n], transition[:n, n]


def simulate_zoh(
    realization: Realization,
    schedule: SamplingSchedule,
    inputs,
    x0=None,
) -> Trajectory:
    """Propagate with the input held constant over each interval."""
    u = _input_vector(inputs, schedule)
    t = schedule.instants
    x = (
        np.zeros(realization.n)
        if x0 is None
        else _state_vector(x0, realization.n, "x0")
    )
    states = [x]
    for i in range(len(u)):
        step, forced = _zoh_step(realization, t[i + 1] - t[i])
        x = step @ x + forced * u[i]
        states.append(x)
    states = np.array(states)
    return Trajectory(t, states, states @ realization.c)


def zoh_input_matrix(
    realization: Realization, schedule: SamplingSchedule
) -> np.ndarray:
    """Hold-input analogue of the sampled reachability matrix.

    Column i maps the held input over ``[t[i], t[i+1])`` to its contribution
    at the final instant.  Needs n+1 instants for n inputs; its rank equals
    the impulse-input matrix rank, which is the operational content of the
    statement that a data hold does not change the characteristic modes.
    """
    n = realization.n
    t = schedule.instants
    if len(t) < n + 1:
        raise InsufficientScheduleError(
            f"hold-input matrix needs {n + 1} instants, got {len(t)}"
        )
    columns = []
    for i in range(n):
        _, forced = _zoh_step(realization, t[i + 1] - t[i])
        columns.append(numerics.expm(realization.A, t[n] - t[i + 1]) @ forced)
    return np.column_stack(columns)


def deadbeat_inputs(
    realization: Realization,
    schedule: SamplingSchedule,
    x0,
    x_target,
    t_final: float | None = None,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Impulse weights u_0..u_{n-1} driving x0 at t_0 to x_target at t_final.

    The schedule carries the n input instants; ``t_final`` is the evaluation
    instant after them (default: last instant plus the mean spacing, or plus
    one second for first-order systems).  A schedule failing the joint
    criterion raises SingularScheduleError with the report attached.
    """
    n = realization.n
    t = schedule.instants
    if len(t) != n:
        raise InsufficientScheduleError(
            f"deadbeat design needs exactly {n} input instants, got {len(t)}"
        )
    report = joint_verdict(
        realization, schedule, tol, cluster_tol=cluster_tol, rank_tol=rank_tol
    )
    if not report.reachable:
        raise SingularScheduleError(
            f"schedule is singular (sigma ratio {report.sigma_ratio:.3e}); "
            "deadbeat inputs do not exist",
            report=report,
        )
    if t_final is None:
        spacing = (t[-1] - t[0]) / (n - 1) if n > 1 else 1.0
        t_final = t[-1] + spacing
    if t_final <= t[-1]:
        raise ValueError("t_final must lie beyond the last input instant")

    x0 = _state_vector(x0, n, "x0")
    x_target = _state_vector(x_target, n, "x_target")
    columns = [numerics.expm(realization.A, t_final - ti) @ realization.b for ti in t]
    rhs = x_target - numerics.expm(realization.A, t_final - t[0]) @ x0
    return np.linalg.solve(np.column_stack(columns), rhs)


def reconstruct_state(
    realization: Realization,
    schedule: SamplingSchedule,
    outputs,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Recover x(0) from n free-response outputs y(t_i) = c exp(A t_i) x(0)."""
    n = realization.n
    t = schedule.instants
    if len(t) != n:
        raise InsufficientScheduleError(
            f"state reconstruction needs exactly {n} output instants, got {len(t)}"
        )
    y = np.asarray(outputs, dtype=float).reshape(-1)
    if y.shape[0] != n:
        raise DimensionError(f"expected {n} outputs, got {y.shape[0]}")
    report = joint_verdict(
        realization, schedule, tol, cluster_tol=cluster_tol, rank_tol=rank_tol
    )
    if not report.observable:
        raise SingularScheduleError(
            f"schedule is singular (sigma ratio {report.sigma_ratio:.3e}); "
            "outputs do not determine the state",
            report=report,
        )
    rows = np.vstack([realization.c @ numerics.expm(realization.A, ti) for ti in t])
    return np.linalg.solve(rows, y)


def classify_case(
    realization: Realization,
    schedule: SamplingSchedule,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> CaseLabel:
    """Label a three-instant schedule of an order-2 system as case a, b or c.

    Works with the mode-space vectors Y_m = exp(J alpha_m) y0; the change of
    basis is invertible, so the dependency structure matches the state-space
    input vectors.
    """
    if realization.n != 2:
        raise UnsupportedOrderError(
            f"case classification is defined for order 2, got {realization.n}"
        )
    if len(schedule) < 3:
        raise InsufficientScheduleError(
            f"case classification needs 3 instants, got {len(schedule)}"
        )
    require_minimal(realization, rank_tol)
    decomposition = modal_decompose(
        realization, cluster_tol, rank_tol, require_minimality=False
    )
    alphas = shifted_intervals(schedule, 2)
    y_vectors = [
        numerics.expm(decomposition.J, a) @ decomposition.y0
        for a in (*alphas.alpha, alphas.alpha_n)
    ]
    pair = np.column_stack(y_vectors[:2])
    pair_sigma_ratio = numerics.column_normalized_sigma_ratio(pair)

    membership = numerics.in_range(y_vectors[0][:, None], y_vectors[2], tol)
    if pair_sigma_ratio > tol:
        label = "a"
    elif membership.contained:
        label = "b"
    else:
        label = "c"
    return CaseLabel(
        label,
        y_vectors[0],
        y_vectors[1],
        y_vectors[2],
        pair_sigma_ratio,
        membership.residual,
    )
