"""Local polytope computations: vertex enumeration, bounds, facet tests, liftings.

A linear functional over the local set attains its maximum at a deterministic
vertex, so the local bound is an exact integer maximum over the
2^(na+nb) deterministic strategies.  Facet verification needs the affine
dimension of the saturating vertex set, which is computed by exact rational
row reduction, never floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .model import Behavior, CgTable, Scenario


@dataclass(frozen=True)
class DeterministicStrategy:
    """One local deterministic assignment: output 0 on setting x iff alpha[x]=1."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        if not all(v in (0, 1) for v in self.alpha + self.beta):
            raise ValueError("strategy entries must be bits")

    def behavior(self, scenario: Scenario) -> Behavior:
        if (scenario.na, scenario.nb) != (len(self.alpha), len(self.beta)):
            raise ValueError("strategy does not match scenario")
        return Behavior.deterministic(scenario, self.alpha, self.beta)

    def cg_coordinates(self) -> tuple[int, ...]:
        """Vertex coordinates (joint row-major, then alpha, then beta)."""
        joint = tuple(a * b for a in self.alpha for b in self.beta)
        return joint + self.alpha + self.beta


@dataclass(frozen=True)
class FacetReport:
    is_valid: bool
    saturating_count: int
    affine_dimension: int
    is_facet: bool


@dataclass(frozen=True)
class Lifting:
    """A table reduced by removing settings that carry no coefficients."""

    reduced: CgTable
    dropped_a: tuple[int, ...]
    dropped_b: tuple[int, ...]


def enumerate_strategies(scenario: Scenario) -> list[DeterministicStrategy]:
    """All 2^(na+nb) deterministic strategies in lexicographic (alpha, beta) order."""
    return [
        DeterministicStrategy(alpha, beta)
        for alpha in itertools.product((0, 1), repeat=scenario.na)
        for beta in itertools.product((0, 1), repeat=scenario.nb)
    ]


def _bit_rows(n: int) -> np.ndarray:
    # row i is the n-bit big-endian expansion of i, so rows come out in
    # lexicographic order
    return (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1


def _vertex_values(table: CgTable) -> np.ndarray:
    """Functional value at every vertex, shape (2^na, 2^nb), exact int64."""
    a_bits = _bit_rows(table.scenario.na)
    b_bits = _bit_rows(table.scenario.nb)
    return (
        a_bits @ table.d @ b_bits.T
        + (a_bits @ table.c)[:, None]
        + (b_bits @ table.e)[None, :]
    )


def local_bound(table: CgTable) -> int:
    """Exact maximum of the functional over local (shared-randomness) models."""
    return int(_vertex_values(table).max())


def white_noise_value(table: CgTable) -> Fraction:
    """Exact value on the white-noise behavior (joint 1/4, marginals 1/2)."""
    return (
        Fraction(int(table.d.sum()), 4)
        + Fraction(int(table.c.sum()), 2)
        + Fraction(int(table.e.sum()), 2)
    )


def exact_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals by Gaussian elimination on Fractions."""
    m = [[Fraction(v) for v in row] for row in rows if any(row)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for i in range(rank + 1, len(m)):
            f = m[i][col] / pv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def facet_check(table: CgTable) -> FacetReport:
    """Verify validity and facet-ness of a table against its own bound.

    A table is valid iff its bound equals the local bound, and a facet iff the
    vertices saturating the bound span an affine set of dimension
    cg_dimension - 1.
    """
    values = _vertex_values(table)
    is_valid = int(values.max()) == table.bound

    strategies = enumerate_strategies(table.scenario)
    flat = values.ravel()  # same lexicographic order as enumerate_strategies
    saturating = [s for s, v in zip(strategies, flat) if int(v) == table.bound]

    if len(saturating) <= 1:
        dim = 0
    else:
        base = saturating[0].cg_coordinates()
        diffs = [
            [a - b for a, b in zip(s.cg_coordinates(), base)] for s in saturating[1:]
        ]
        dim = exact_rank(diffs)
    is_facet = is_valid and dim == table.scenario.cg_dimension() - 1
    return FacetReport(is_valid, len(saturating), dim, is_facet)


def detect_lifting(table: CgTable) -> Optional[Lifting]:
    """Strip settings with all-zero coefficients; None when every setting is used.

    A setting x of Alice is unused when c[x] = 0 and the whole d row x
    vanishes (symmetrically for Bob).  When a party's settings are all
    unused the first one is retained so the reduced scenario stays valid.
    """
    na, nb = table.scenario.na, table.scenario.nb
    drop_a = [x for x in range(na) if table.c[x] == 0 and not table.d[x, :].any()]
    drop_b = [y for y in range(nb) if table.e[y] == 0 and not table.d[:, y].any()]
    if len(drop_a) == na:
        drop_a = drop_a[1:]
    if len(drop_b) == nb:
        drop_b = drop_b[1:]
    if not drop_a and not drop_b:
        return None
    keep_a = [x for x in range(na) if x not in drop_a]
    keep_b = [y for y in range(nb) if y not in drop_b]
    reduced = CgTable(
        Scenario(len(keep_a), len(keep_b)),
        table.d[np.ix_(keep_a, keep_b)],
        table.c[keep_a],
        table.e[keep_b],
        table.bound,
        table.name,
    )
    return Lifting(reduced, tuple(drop_a), tuple(drop_b))
