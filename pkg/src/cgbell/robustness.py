"""White-noise resistance and symmetric detection-efficiency thresholds.

The visibility threshold for mixing a state with white noise is exact once
the quantum value is known: the functional is linear in the density matrix
and the white-noise value N is measurement independent, so the violation
dies at lambda = (L - N)/(Q - N).

Detection analysis assumes the maximally entangled state, whose marginals
are 1/2 for every projective measurement.  The one-detector and
zero-detector contributions are then exact rationals independent of the
measurement choice, and the efficiency threshold decouples into a quadratic

    (Q - M + X) eta^2 + (M - 2X) eta + (X - L) = 0,   M = M_A + M_B

solved per no-click assignment: on non-detection each party substitutes a
fixed output, chosen per setting.  Restricting the substituted outputs to
be constant per party (four strategies in total) is available as an option
but is strictly weaker: on several four-setting facets the per-setting
choice closes the loophole at a visibly lower efficiency.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .localpoly import local_bound, white_noise_value
from .model import CgTable

_VIOLATION_TOL = 1e-9


class InconsistencyError(ValueError):
    """A quantum value below the white-noise value; not producible by a valid run."""


@dataclass(frozen=True, order=True)
class NoClickStrategy:
    """Party-constant substituted outputs (a_hat for Alice, b_hat for Bob)."""

    a_hat: int
    b_hat: int

    def __post_init__(self):
        if self.a_hat not in (0, 1) or self.b_hat not in (0, 1):
            raise ValueError("no-click outputs must be bits")


NOCLICK_STRATEGIES = tuple(
    NoClickStrategy(a, b) for a, b in itertools.product((0, 1), repeat=2)
)


@dataclass(frozen=True, order=True)
class NoClickAssignment:
    """Substituted output per setting: a_outputs[x] on Alice's x, b_outputs[y] on Bob's y."""

    a_outputs: tuple[int, ...]
    b_outputs: tuple[int, ...]

    def __post_init__(self):
        if not all(v in (0, 1) for v in self.a_outputs + self.b_outputs):
            raise ValueError("no-click outputs must be bits")

    @staticmethod
    def constant(table: CgTable, nc: NoClickStrategy) -> "NoClickAssignment":
        return NoClickAssignment(
            (nc.a_hat,) * table.scenario.na, (nc.b_hat,) * table.scenario.nb
        )

    def party_constants(self) -> Optional[NoClickStrategy]:
        """The equivalent four-way strategy, when the outputs are party-constant."""
        if len(set(self.a_outputs)) == 1 and len(set(self.b_outputs)) == 1:
            return NoClickStrategy(self.a_outputs[0], self.b_outputs[0])
        return None


def noise_resistance(table: CgTable, q: float) -> float:
    """Visibility threshold lambda below which white-noise mixing kills the violation.

    ``q`` should come from quantum_bound: free theta for the optimal-state
    threshold, theta = pi/4 for the maximally entangled one.  Returns 1.0
    when there is no violation.
    """
    bound = local_bound(table)
    noise = white_noise_value(table)
    if q < float(noise) - _VIOLATION_TOL:
        raise InconsistencyError(
            f"quantum value {q} below white-noise value {float(noise)}"
        )
    if q <= bound + _VIOLATION_TOL:
        return 1.0
    return float(bound - noise) / (q - float(noise))


def assignment_values(
    table: CgTable, nc: NoClickAssignment
) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (M_A, M_B, X) for a per-setting assignment, maximally entangled state.

    M_A is the functional value when only Alice's detector fires (her
    marginals are 1/2, Bob outputs b_outputs[y] deterministically), M_B the
    reverse, X the value when neither fires.
    """
    if len(nc.a_outputs) != table.scenario.na or len(nc.b_outputs) != table.scenario.nb:
        raise ValueError("assignment does not match the table's scenario")
    a0 = [1 - v for v in nc.a_outputs]
    b0 = [1 - v for v in nc.b_outputs]
    col = table.d.sum(axis=0).tolist()
    row = table.d.sum(axis=1).tolist()
    m_a = Fraction(int(table.c.sum()), 2) + sum(
        (Fraction(col[y], 2) + int(table.e[y])) * b0[y] for y in range(len(b0))
    )
    m_b = Fraction(int(table.e.sum()), 2) + sum(
        (Fraction(row[x], 2) + int(table.c[x])) * a0[x] for x in range(len(a0))
    )
    x_val = Fraction(
        int(np.asarray(a0) @ table.d @ np.asarray(b0))
        + int(table.c @ np.asarray(a0))
        + int(table.e @ np.asarray(b0))
    )
    return m_a, m_b, x_val


def noclick_values(table: CgTable, nc: NoClickStrategy) -> tuple[Fraction, Fraction, Fraction]:
    """(M_A, M_B, X) for one of the four party-constant strategies."""
    return assignment_values(table, NoClickAssignment.constant(table, nc))


@dataclass(frozen=True)
class DetectionAnalysis:
    """Threshold bundle: both-fire value q, one-detector values m_a/m_b,
    no-detector value x, the optimal no-click assignment and its eta."""

    q: float
    m_a: Fraction
    m_b: Fraction
    x: Fraction
    strategy: NoClickAssignment
    eta: float


def _threshold_root(a: float, b: float, c: float) -> Optional[float]:
    """Largest root of a*eta^2 + b*eta + c in [0, 1) with the polynomial
    positive just above it; None when no such crossing exists."""
    roots = [r.real for r in np.roots([a, b, c]) if abs(r.imag) < 1e-9]
    for r in sorted(roots, reverse=True):
        probe = min(1.0, r + 1e-7)
        if 0.0 <= r < 1.0 and a * probe * probe + b * probe + c > 0.0:
            return r
    return None


def detection_threshold(
    table: CgTable, q_me: float, per_setting: bool = True
) -> DetectionAnalysis:
    """Minimal symmetric detector efficiency preserving a violation.

    ``q_me`` must be the quantum value for the maximally entangled state
    (quantum_bound with fix_theta = pi/4); only then are M_A, M_B, X
    measurement independent and the decoupled quadratic exact.  All
    2^(na+nb) per-setting no-click assignments are solved and the smallest
    threshold returned (``per_setting=False`` restricts the scan to the four
    party-constant strategies).  Ties go to the lexicographically smallest
    assignment.  Returns eta = 1 when the state does not violate at full
    efficiency.
    """
    bound = local_bound(table)
    na, nb = table.scenario.na, table.scenario.nb
    if per_setting:
        assignments = [
            NoClickAssignment(a, b)
            for a in itertools.product((0, 1), repeat=na)
            for b in itertools.product((0, 1), repeat=nb)
        ]
    else:
        assignments = [NoClickAssignment.constant(table, nc) for nc in NOCLICK_STRATEGIES]

    if q_me <= bound + _VIOLATION_TOL:
        m_a, m_b, x_val = assignment_values(table, assignments[0])
        return DetectionAnalysis(q_me, m_a, m_b, x_val, assignments[0], 1.0)

    best: Optional[DetectionAnalysis] = None
    for nc in assignments:
        m_a, m_b, x_val = assignment_values(table, nc)
        m = m_a + m_b
        eta = _threshold_root(
            q_me - float(m) + float(x_val), float(m - 2 * x_val), float(x_val) - bound
        )
        if eta is None:
            eta = 1.0
        if best is None or eta < best.eta:
            best = DetectionAnalysis(q_me, m_a, m_b, x_val, nc, eta)
    assert best is not None
    return best
