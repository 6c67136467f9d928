"""Sampling-schedule analysis and selection.

For second-order oscillatory systems the singular separations are isolated
points (integer multiples of pi over the eigenfrequency), so schedules can
be chosen almost freely; this module enumerates those points, specializes
the criterion to uniform sampling, and searches windows for schedules with
the best-conditioned mode matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .criterion import (
    CriterionReport,
    SamplingSchedule,
    joint_verdict,
    schedule_conditioning,
)
from .errors import InfeasibleError, NotApplicableError, UnsupportedOrderError
from .system_model import ModeSet, Realization, mode_set, require_minimal

# Guard so a careless search spec cannot ask for an astronomically large grid.
MAX_GRID_CANDIDATES = 2_000_000


@dataclass(frozen=True)
class ForbiddenSet:
    """Singular sampling instants t0 + k*pi/b of an oscillatory order-2 system.

    ``forbidden`` lists the members inside the queried window (including the
    degenerate k = 0 point t0 itself when covered).  ``guard_band`` is the
    empirically bisected half-width around a forbidden instant within which
    the joint verdict still fails at the given tolerance.
    """

    base_instant: float
    period: float
    forbidden: tuple
    guard_band: float


@dataclass(frozen=True)
class ScheduleSearchSpec:
    """Constraints for the schedule search.

    The objective is fixed: the sigma ratio of the column-normalized mode
    matrix, i.e. robust nonsingularity rather than bare nonsingularity.
    """

    window: tuple
    count: int
    min_spacing: float

    def __post_init__(self):
        lo, hi = (float(self.window[0]), float(self.window[1]))
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
            raise InfeasibleError(f"window {self.window!r} is not a proper interval")
        if self.count < 1:
            raise InfeasibleError("count must be at least 1")
        if self.min_spacing <= 0.0:
            raise InfeasibleError("min_spacing must be positive")
        if hi - lo < (self.count - 1) * self.min_spacing:
            raise InfeasibleError(
                f"window of length {hi - lo:g} cannot hold {self.count} instants "
                f"spaced at least {self.min_spacing:g}"
            )
        object.__setattr__(self, "window", (lo, hi))


@dataclass(frozen=True)
class UniformValidation:
    """Joint verdict of the n-instant uniform schedule at one interval.

    ``first_failing_multiple`` scans subsampled intervals j*T for
    j = 1..horizon and records the first j whose uniform schedule fails
    (None when all pass).
    """

    interval: float
    report: CriterionReport
    passes: bool
    first_failing_multiple: int | None
    first_failing_interval: float | None


def _oscillatory_frequency(modes: ModeSet) -> float:
    """Positive imaginary part b of the conjugate pair a +- jb, or raise."""
    if modes.r != 2 or modes.roots[0][1] != 1:
        raise NotApplicableError(
            "no forbidden instants: the eigenvalues are not a complex conjugate pair"
        )
    lam = modes.roots[1][0]
    if lam.imag <= numerics.DEFAULT_RANK_TOL * max(1.0, abs(lam)):
        raise NotApplicableError(
            "no forbidden instants: real distinct eigenvalues"
        )
    return float(lam.imag)


def forbidden_instants_order2(
    realization: Realization,
    t0: float,
    window,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
) -> ForbiddenSet:
    """Enumerate the singular second instants for an order-2 oscillatory system.

    Given a first instant t0, the pair (t0, t1) fails the joint criterion
    exactly when ``b * (t1 - t0)`` is an integer multiple of pi, b being the
    imaginary part of the eigenvalue pair.  Damping (the real part) only
    stretches the mode-space vectors and never changes this set.
    """
    if realization.n != 2:
        raise UnsupportedOrderError(
            f"forbidden-instant analysis is defined for order 2, got {realization.n}"
        )
    modes = mode_set(realization, cluster_tol)
    frequency = _oscillatory_frequency(modes)
    period = math.pi / frequency

    lo, hi = (float(window[0]), float(window[1]))
    if hi < lo:
        lo, hi = hi, lo
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    k_first = max(0, math.ceil((lo - t0 - slack) / period))
    points = []
    k = k_first
    while True:
        t = t0 + k * period
        if t > hi + slack:
            break
        if t >= lo - slack:
            points.append(t)
        k += 1

    guard = _bisect_guard_band(modes, t0, t0 + period, tol)
    return ForbiddenSet(float(t0), period, tuple(points), guard)


def _bisect_guard_band(
    modes: ModeSet, t0: float, t_star: float, tol: float, iterations: int = 60
) -> float:
    """Half-width around a forbidden instant within which the verdict fails."""
    span = (t_star - t0) / 4.0

    def fails(offset: float) -> bool:
        schedule = SamplingSchedule((t0, t_star + offset))
        return schedule_conditioning(modes, schedule) <= tol

    low, high = 0.0, span
    if fails(high):
        return span
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        if mid <= low or mid >= high:
            break
        if fails(mid):
            low = mid
        else:
            high = mid
    return high


def validate_uniform(
    realization: Realization,
    interval: float,
    horizon: int = 10,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> UniformValidation:
    """Joint verdict of the uniform schedule {0, T, ..., (n-1) T}.

    Also scans the subsampled intervals j*T for j up to ``horizon`` and
    reports the first failing one, which for an oscillatory order-2 system
    flags the smallest multiple of T hitting a forbidden separation.
    """
    if interval <= 0.0 or not np.isfinite(interval):
        raise InfeasibleError(f"sampling interval must be positive, got {interval!r}")
    if horizon < 1:
        raise InfeasibleError("horizon must be at least 1")
    n = realization.n
    report = joint_verdict(
        realization,
        _uniform_schedule(interval, n),
        tol,
        cluster_tol=cluster_tol,
        rank_tol=rank_tol,
    )
    modes = mode_set(realization, cluster_tol)
    first_failing = None
    for j in range(1, horizon + 1):
        ratio = schedule_conditioning(modes, _uniform_schedule(j * interval, n))
        if ratio <= tol:
            first_failing = j
            break
    return UniformValidation(
        interval=float(interval),
        report=report,
        passes=report.reachable,
        first_failing_multiple=first_failing,
        first_failing_interval=None if first_failing is None else first_failing * interval,
    )


def _uniform_schedule(interval: float, n: int) -> SamplingSchedule:
    return SamplingSchedule(tuple(i * interval for i in range(n)))


def suggest_schedule(
    realization: Realization,
    spec: ScheduleSearchSpec,
    seed: int = 0,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
):
    """Search the window for the best-conditioned feasible schedule.

    Deterministic grid search (step = min_spacing / 4) followed by three
    coordinate-refinement passes with shrinking step; ties keep the
    lexicographically lowest schedule.  The search is fully deterministic,
    so the seed never influences the result; the parameter stays for
    interface stability.  Returns (schedule, achieved sigma ratio).

    The objective depends only on instant differences, so the first instant
    is pinned to the window start without loss of generality.
    """
    del seed
    require_minimal(realization, rank_tol)
    modes = mode_set(realization, cluster_tol)
    n = realization.n
    if spec.count < n:
        raise InfeasibleError(
            f"count {spec.count} is below the system order {n}; "
            "the mode matrix needs n instants"
        )

    lo, hi = spec.window
    spacing = spec.min_spacing
    head = min(n, spec.count)
    tail = spec.count - head
    # Instants beyond the first n never move the objective; they are packed
    # at minimal spacing, so the head must leave room for them.
    head_limit = hi - tail * spacing

    def objective(instants) -> float:
        return schedule_conditioning(modes, SamplingSchedule(instants))

    step = spacing / 4.0
    grid_len = int(math.floor((head_limit - lo) / step)) + 1
    if head > 1 and grid_len ** (head - 1) > MAX_GRID_CANDIDATES:
        raise InfeasibleError(
            "search grid too large; increase min_spacing or shrink the window"
        )

    best_obj = -1.0
    best: tuple | None = None

    def explore(prefix: list, depth: int):
        nonlocal best_obj, best
        if depth == head:
            value = objective(tuple(prefix))
            if value > best_obj:
                best_obj = value
                best = tuple(prefix)
            return
        remaining = head - depth - 1 + tail
        start = prefix[-1] + spacing
        position = lo + math.ceil((start - lo) / step - 1e-12) * step
        while position <= hi - remaining * spacing + 1e-12:
            prefix.append(position)
            explore(prefix, depth + 1)
            prefix.pop()
            position += step

    explore([lo], 1)
    if best is None:  # pragma: no cover - ScheduleSearchSpec validation prevents this
        raise InfeasibleError("no feasible schedule in the window")

    refined = list(best)
    refine_step = step
    for _ in range(3):
        refine_step /= 4.0
        for i in range(1, head):
            lower = refined[i - 1] + spacing
            upper = hi - (head - 1 - i + tail) * spacing
            if i + 1 < head:
                upper = min(upper, refined[i + 1] - spacing)
            for _ in range(8):
                winner = None
                for candidate in (refined[i] - refine_step, refined[i] + refine_step):
                    if lower <= candidate <= upper:
                        trial = refined.copy()
                        trial[i] = candidate
                        value = objective(tuple(trial))
                        if value > best_obj:
                            best_obj = value
                            winner = candidate
                if winner is None:
                    break
                refined[i] = winner

    instants = list(refined)
    for _ in range(tail):
        instants.append(instants[-1] + spacing)
    schedule = SamplingSchedule(tuple(instants))
    if best_obj <= tol:
        raise InfeasibleError(
            f"no schedule in the window clears the singularity tolerance "
            f"(best sigma ratio {best_obj:.3e})"
        )
    return schedule, best_obj
