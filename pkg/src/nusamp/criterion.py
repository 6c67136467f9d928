"""Joint n-reachability / n-observability test for nonuniform sampling.

The decision statistic is the n-by-n mode matrix: characteristic modes
evaluated at the shifted intervals of the schedule.  Its nonsingularity is
equivalent to full rank of the sampled input matrix, and the two properties
hold or fail together, which is why a single verdict covers both.

Conventions, fixed here and relied on by every caller:

* a schedule is a strictly increasing list of absolute instants;
* shifted intervals are taken against the last of the first n instants:
  ``alpha_m = t[n-1] - t[n-1-m]``, so ``alpha_0 = 0`` and the alphas
  increase.  With an (n+1)-th instant present, ``alpha_n = t[n] - t[0]``;
* the mode matrix entry (m, i) is mode i evaluated at ``alpha_m``;
* singularity is judged on the sigma ratio of the column-normalized mode
  matrix rather than the raw determinant, whose scale swings wildly with
  ``exp(lam * alpha)``.  The determinant is still reported.

The determinant of the matrix whose columns are ``exp(J alpha_m) y0``
factors as ``N1 * N2 * det(mode matrix)`` with N1 a positive factorial
product over multiplicities and N2 a product of per-block anti-triangular
determinants in the y0 components; the identity is recomputed on every
verdict and its residual attached to the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import NamedTuple

import numpy as np

from . import numerics
from .errors import DimensionError, InsufficientScheduleError, NumericRangeError
from .system_model import (
    ModalDecomposition,
    ModeSet,
    Realization,
    modal_decompose,
    require_minimal,
)


@dataclass(frozen=True)
class SamplingSchedule:
    """Strictly increasing sampling instants, in seconds."""

    instants: tuple

    def __post_init__(self):
        try:
            instants = tuple(float(t) for t in self.instants)
        except (TypeError, ValueError) as exc:
            raise DimensionError(f"schedule instants must be real numbers: {exc}") from exc
        if len(instants) < 1:
            raise DimensionError("a schedule needs at least one instant")
        if not all(np.isfinite(instants)):
            raise DimensionError("schedule instants must be finite")
        if any(b <= a for a, b in zip(instants, instants[1:])):
            raise DimensionError("schedule instants must be strictly increasing")
        object.__setattr__(self, "instants", instants)

    def __len__(self) -> int:
        return len(self.instants)

    def shifted(self, delta: float) -> "SamplingSchedule":
        """The same schedule translated by delta."""
        return SamplingSchedule(tuple(t + delta for t in self.instants))


@dataclass(frozen=True)
class ShiftedIntervals:
    """Intervals alpha_0 = 0 < alpha_1 < ... relative to the reference instant."""

    alpha: tuple
    alpha_n: float | None = None


class ControllabilityVerdict(NamedTuple):
    """Outcome of the weaker (n+1)-instant range-membership test."""

    controllable: bool
    constructible: bool
    residual: float


@dataclass(frozen=True)
class CriterionReport:
    """Everything the joint test computed for one (system, schedule) pair.

    ``reachable`` and ``observable`` always agree; they are separate fields
    because callers ask the two questions separately.  ``controllable`` /
    ``constructible`` stay None unless the schedule offered an extra instant.
    """

    mode_det: complex
    sigma_ratio: float
    n1: float
    n2: complex
    full_det: complex
    reachable: bool
    observable: bool
    controllable: bool | None
    constructible: bool | None
    membership_residual: float | None
    factorization_residual: float
    alphas: ShiftedIntervals
    singularity_tol: float
    cluster_tol: float
    rank_tol: float


def shifted_intervals(schedule: SamplingSchedule, n: int) -> ShiftedIntervals:
    """Shifted intervals of the first n instants; alpha_n when one more exists."""
    t = schedule.instants
    if len(t) < n:
        raise InsufficientScheduleError(
            f"schedule has {len(t)} instants but the order-{n} test needs at least {n}"
        )
    reference = t[n - 1]
    alpha = tuple(reference - t[n - 1 - m] for m in range(n))
    alpha_n = (t[n] - t[0]) if len(t) > n else None
    return ShiftedIntervals(alpha, alpha_n)


def mode_matrix(modes: ModeSet, alphas: ShiftedIntervals) -> np.ndarray:
    """Matrix with entry (m, i) = mode_i(alpha_m)."""
    params = modes.mode_params()
    n = len(params)
    if len(alphas.alpha) != n:
        raise DimensionError(
            f"mode matrix needs {n} intervals for {n} modes, got {len(alphas.alpha)}"
        )
    a = np.asarray(alphas.alpha, dtype=float)[:, None]
    lams = np.array([lam for lam, _ in params], dtype=complex)[None, :]
    powers = np.array([p for _, p in params], dtype=float)[None, :]
    matrix = (a**powers) * np.exp(lams * a)
    if not np.all(np.isfinite(matrix)):
        raise NumericRangeError("mode matrix overflowed; shrink the schedule window")
    return matrix


def factor_n1(modes: ModeSet) -> float:
    """Product over blocks of 1/0! ... 1/(m-1)!; always positive."""
    value = 1.0
    for _, m in modes.roots:
        for k in range(m):
            value /= factorial(k)
    return value


def factor_n2(decomposition: ModalDecomposition, modes: ModeSet | None = None) -> complex:
    """Product of the per-block anti-triangular determinants in y0.

    The block for a multiplicity-m eigenvalue has entry (p, q) equal to the
    (p+q)-th y0 component of the block when p + q < m and zero otherwise, so
    its determinant is ``(-1)**(m*(m-1)/2) * y_last**m``.  Nonzero exactly
    when the last y0 component of every block is nonzero.
    """
    modes = modes if modes is not None else decomposition.modes
    y0 = decomposition.y0
    value = complex(1.0)
    offset = 0
    for _, m in modes.roots:
        block = y0[offset : offset + m]
        anti = np.zeros((m, m), dtype=complex)
        for p in range(m):
            for q in range(m - p):
                anti[p, q] = block[p + q]
        value *= complex(np.linalg.det(anti)) if m > 1 else complex(block[0])
        offset += m
    return value


def full_determinant(decomposition: ModalDecomposition, alphas: ShiftedIntervals) -> complex:
    """det of the matrix whose m-th column is exp(J alpha_m) y0."""
    n = decomposition.J.shape[0]
    if len(alphas.alpha) != n:
        raise DimensionError(
            f"full determinant needs {n} intervals, got {len(alphas.alpha)}"
        )
    columns = [
        numerics.expm(decomposition.J, a) @ decomposition.y0 for a in alphas.alpha
    ]
    return complex(np.linalg.det(np.column_stack(columns)))


def schedule_conditioning(modes: ModeSet, schedule: SamplingSchedule) -> float:
    """Sigma ratio of the column-normalized mode matrix for this schedule.

    This is the verdict statistic of the joint test; it needs only the mode
    set, so schedule search and guard-band probing can call it cheaply.
    """
    alphas = shifted_intervals(schedule, modes.n)
    return numerics.column_normalized_sigma_ratio(mode_matrix(modes, alphas))


def _mode_space_membership(
    decomposition: ModalDecomposition, alphas: ShiftedIntervals, residual_tol: float
) -> numerics.RangeCheck:
    span = np.column_stack(
        [numerics.expm(decomposition.J, a) @ decomposition.y0 for a in alphas.alpha]
    )
    target = numerics.expm(decomposition.J, alphas.alpha_n) @ decomposition.y0
    return numerics.in_range(span, target, residual_tol)


def joint_verdict(
    realization: Realization,
    schedule: SamplingSchedule,
    tol: float = numerics.DEFAULT_RANK_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> CriterionReport:
    """Run the joint n-reachability / n-observability test on a schedule.

    The realization must be minimal (MinimalityError otherwise, naming the
    failing rank test) and the schedule must supply at least n instants; the
    first n decide the verdict.  With n+1 or more instants the weaker
    controllability / constructibility pair is also reported, via the
    range-membership test at ``alpha_n = t[n] - t[0]``.
    """
    require_minimal(realization, rank_tol)
    decomposition = modal_decompose(
        realization, cluster_tol, rank_tol, require_minimality=False
    )
    modes = decomposition.modes
    n = realization.n
    alphas = shifted_intervals(schedule, n)

    phi = mode_matrix(modes, alphas)
    sigma_ratio = numerics.column_normalized_sigma_ratio(phi)
    verdict = sigma_ratio > tol

    mode_det = complex(np.linalg.det(phi))
    n1 = factor_n1(modes)
    n2 = factor_n2(decomposition)
    full_det = full_determinant(decomposition, alphas)
    factorization_residual = abs(full_det - n1 * n2 * mode_det)

    controllable = constructible = None
    membership_residual = None
    if alphas.alpha_n is not None:
        membership = _mode_space_membership(decomposition, alphas, tol)
        controllable = constructible = membership.contained
        membership_residual = membership.residual

    return CriterionReport(
        mode_det=mode_det,
        sigma_ratio=sigma_ratio,
        n1=n1,
        n2=n2,
        full_det=full_det,
        reachable=verdict,
        observable=verdict,
        controllable=controllable,
        constructible=constructible,
        membership_residual=membership_residual,
        factorization_residual=factorization_residual,
        alphas=alphas,
        singularity_tol=tol,
        cluster_tol=cluster_tol,
        rank_tol=rank_tol,
    )


def controllability_verdict(
    realization: Realization,
    schedule: SamplingSchedule,
    tol: float = numerics.DEFAULT_RESIDUAL_TOL,
    *,
    cluster_tol: float = numerics.DEFAULT_CLUSTER_TOL,
    rank_tol: float = numerics.DEFAULT_RANK_TOL,
) -> ControllabilityVerdict:
    """The weaker joint pair on n+1 instants, as a range-membership test.

    The mode-space vector at ``alpha_n`` must lie in the span of the vectors
    at ``alpha_0 .. alpha_{n-1}``.  Full joint reachability implies this; a
    schedule can pass here while failing the full test.
    """
    n = realization.n
    if len(schedule) < n + 1:
        raise InsufficientScheduleError(
            f"controllability test needs {n + 1} instants, got {len(schedule)}"
        )
    require_minimal(realization, rank_tol)
    decomposition = modal_decompose(
        realization, cluster_tol, rank_tol, require_minimality=False
    )
    alphas = shifted_intervals(schedule, n)
    membership = _mode_space_membership(decomposition, alphas, tol)
    return ControllabilityVerdict(membership.contained, membership.contained, membership.residual)
