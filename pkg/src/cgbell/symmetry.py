"""Relabeling group on CG tables: input permutations, outcome flips, party swap.

A relabeling is applied to a table as flips first, then input permutations,
then the optional party swap.  Every group element has exactly one such
normal form, so enumerating (flips x permutations x swap) walks the whole
orbit of a table once.

Flipping Alice's outcome at setting x rewrites the functional through
p(00|xy) -> pB(0|y) - p(00|xy) and pA(0|x) -> 1 - pA(0|x), giving the
coefficient rules d[x][:] -> -d[x][:], e += old d[x][:], c[x] -> -c[x],
bound -> bound - old c[x] (and symmetrically for Bob).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .model import CgTable, Scenario, ScenarioMismatchError


def _check_perm(perm: Sequence[int], what: str) -> tuple[int, ...]:
    p = tuple(int(v) for v in perm)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"{what} is not a permutation of 0..{len(p) - 1}: {p}")
    return p


def _check_bits(bits: Sequence[int], what: str) -> tuple[int, ...]:
    b = tuple(int(v) for v in bits)
    if not all(v in (0, 1) for v in b):
        raise ValueError(f"{what} must be a bit vector, got {b}")
    return b


def _inverse_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for slot, src in enumerate(perm):
        inv[src] = slot
    return tuple(inv)


@dataclass(frozen=True)
class Relabeling:
    """One element of the local relabeling group.

    ``perm_a[x]`` is the original Alice setting placed at slot x (same for
    Bob); ``flip_a[x] = 1`` flips Alice's outcome at original setting x;
    ``swap_parties`` exchanges the parties and is only compatible with
    square scenarios.
    """

    perm_a: tuple[int, ...]
    perm_b: tuple[int, ...]
    flip_a: tuple[int, ...]
    flip_b: tuple[int, ...]
    swap_parties: bool = False

    def __post_init__(self):
        object.__setattr__(self, "perm_a", _check_perm(self.perm_a, "perm_a"))
        object.__setattr__(self, "perm_b", _check_perm(self.perm_b, "perm_b"))
        object.__setattr__(self, "flip_a", _check_bits(self.flip_a, "flip_a"))
        object.__setattr__(self, "flip_b", _check_bits(self.flip_b, "flip_b"))
        if len(self.flip_a) != len(self.perm_a) or len(self.flip_b) != len(self.perm_b):
            raise ValueError("flip vectors must match permutation lengths")
        if self.swap_parties and len(self.perm_a) != len(self.perm_b):
            raise ScenarioMismatchError("party swap requires equal setting counts")

    @staticmethod
    def identity(scenario: Scenario) -> "Relabeling":
        return Relabeling(
            tuple(range(scenario.na)),
            tuple(range(scenario.nb)),
            (0,) * scenario.na,
            (0,) * scenario.nb,
            False,
        )

    def compose(self, first: "Relabeling") -> "Relabeling":
        """Relabeling equivalent to applying ``first`` and then ``self``."""
        pa2, pb2 = self.perm_a, self.perm_b
        fa2, fb2 = self.flip_a, self.flip_b
        if first.swap_parties:
            pa2, pb2 = pb2, pa2
            fa2, fb2 = fb2, fa2
        inv_a, inv_b = _inverse_perm(first.perm_a), _inverse_perm(first.perm_b)
        # push self's flips through first's permutation onto original labels
        ha = tuple(fa2[inv_a[j]] for j in range(len(inv_a)))
        hb = tuple(fb2[inv_b[j]] for j in range(len(inv_b)))
        return Relabeling(
            tuple(first.perm_a[pa2[x]] for x in range(len(pa2))),
            tuple(first.perm_b[pb2[y]] for y in range(len(pb2))),
            tuple(h ^ f for h, f in zip(ha, first.flip_a)),
            tuple(h ^ f for h, f in zip(hb, first.flip_b)),
            self.swap_parties ^ first.swap_parties,
        )

    def inverse(self) -> "Relabeling":
        ga = tuple(self.flip_a[self.perm_a[j]] for j in range(len(self.perm_a)))
        gb = tuple(self.flip_b[self.perm_b[j]] for j in range(len(self.perm_b)))
        pa, pb = _inverse_perm(self.perm_a), _inverse_perm(self.perm_b)
        if self.swap_parties:
            pa, pb = pb, pa
            ga, gb = gb, ga
        return Relabeling(pa, pb, ga, gb, self.swap_parties)


def apply_relabeling(table: CgTable, r: Relabeling) -> CgTable:
    """The table representing the same functional after relabeling."""
    na, nb = table.scenario.na, table.scenario.nb
    if len(r.perm_a) != na or len(r.perm_b) != nb:
        raise ScenarioMismatchError(
            f"relabeling is for {len(r.perm_a)}x{len(r.perm_b)}, table is {table.scenario}"
        )
    if r.swap_parties and na != nb:
        raise ScenarioMismatchError("party swap requires a square scenario")

    d = table.d.copy()
    c = table.c.copy()
    e = table.e.copy()
    bound = table.bound
    for x in range(na):
        if r.flip_a[x]:
            e = e + d[x, :]
            d[x, :] = -d[x, :]
            bound -= int(c[x])
            c[x] = -c[x]
    for y in range(nb):
        if r.flip_b[y]:
            c = c + d[:, y]
            d[:, y] = -d[:, y]
            bound -= int(e[y])
            e[y] = -e[y]

    d = d[np.ix_(r.perm_a, r.perm_b)]
    c = c[list(r.perm_a)]
    e = e[list(r.perm_b)]
    scenario = table.scenario
    if r.swap_parties:
        d = d.T
        c, e = e, c
        scenario = Scenario(table.scenario.nb, table.scenario.na)
    return CgTable(scenario, d, c, e, bound, table.name)


def relabelings(scenario: Scenario, include_swap: bool = True) -> Iterator[Relabeling]:
    """All group elements for a scenario (swap only when square)."""
    na, nb = scenario.na, scenario.nb
    swaps = (False, True) if include_swap and na == nb else (False,)
    for swap in swaps:
        for perm_a in itertools.permutations(range(na)):
            for perm_b in itertools.permutations(range(nb)):
                for flip_a in itertools.product((0, 1), repeat=na):
                    for flip_b in itertools.product((0, 1), repeat=nb):
                        yield Relabeling(perm_a, perm_b, flip_a, flip_b, swap)


def random_relabeling(
    scenario: Scenario, rng: np.random.Generator, allow_swap: bool = True
) -> Relabeling:
    na, nb = scenario.na, scenario.nb
    swap = bool(allow_swap and na == nb and rng.integers(2))
    return Relabeling(
        tuple(int(v) for v in rng.permutation(na)),
        tuple(int(v) for v in rng.permutation(nb)),
        tuple(int(v) for v in rng.integers(0, 2, size=na)),
        tuple(int(v) for v in rng.integers(0, 2, size=nb)),
        swap,
    )


def _divide_by_content(table: CgTable) -> CgTable:
    g = 0
    for v in (*table.d.ravel().tolist(), *table.c.tolist(), *table.e.tolist(), table.bound):
        g = math.gcd(g, abs(int(v)))
    if g <= 1:
        return table
    return CgTable(
        table.scenario, table.d // g, table.c // g, table.e // g, table.bound // g, table.name
    )


def canonical_form(table: CgTable) -> CgTable:
    """Lexicographically minimal table over the full relabeling orbit.

    The overall positive scale is normalised away first by dividing out the
    gcd of all coefficients and the bound.  Two tables are equivalent iff
    their canonical forms are identical.  Minimisation is a plain scan of
    the orbit (at most 294,912 transforms for a 4x4 table).
    """
    t = _divide_by_content(table)
    na, nb = t.scenario.na, t.scenario.nb
    swaps = (False, True) if na == nb else (False,)
    best: Optional[tuple] = None

    for flip_a in itertools.product((0, 1), repeat=na):
        for flip_b in itertools.product((0, 1), repeat=nb):
            d = t.d.copy()
            c = t.c.copy()
            e = t.e.copy()
            bound = t.bound
            for x in range(na):
                if flip_a[x]:
                    e = e + d[x, :]
                    d[x, :] = -d[x, :]
                    bound -= int(c[x])
                    c[x] = -c[x]
            for y in range(nb):
                if flip_b[y]:
                    c = c + d[:, y]
                    d[:, y] = -d[:, y]
                    bound -= int(e[y])
                    e[y] = -e[y]
            if best is not None and bound > best[0]:
                continue
            for swap in swaps:
                if swap:
                    dl, cl, el = d.T.tolist(), e.tolist(), c.tolist()
                else:
                    dl, cl, el = d.tolist(), c.tolist(), e.tolist()
                for perm_a in itertools.permutations(range(len(cl))):
                    cp = tuple(cl[p] for p in perm_a)
                    if best is not None and (bound, cp) > best[:2]:
                        continue
                    rows = [dl[p] for p in perm_a]
                    for perm_b in itertools.permutations(range(len(el))):
                        ep = tuple(el[q] for q in perm_b)
                        dp = tuple(tuple(row[q] for q in perm_b) for row in rows)
                        key = (bound, cp, ep, dp)
                        if best is None or key < best:
                            best = key
    assert best is not None
    bound, cp, ep, dp = best
    return CgTable(t.scenario, [list(row) for row in dp], list(cp), list(ep), bound, None)


@dataclass(frozen=True)
class CorrelatorForm:
    """Full-correlation presentation: sum_xy g[x][y] E(x,y) - constant.

    ``E(x,y) = p(a=b|xy) - p(a!=b|xy) = 4 p(00|xy) - 2 pA(0|x) - 2 pB(0|y) + 1``
    and the equality with the CG functional holds after applying
    ``relabeling_used`` to the original table.
    """

    g: tuple[tuple[Fraction, ...], ...]
    constant: Fraction
    relabeling_used: Relabeling


def correlation_form(table: CgTable) -> Optional[CorrelatorForm]:
    """Search outcome flips (and party swap) for a correlator-only presentation.

    A relabeled table is expressible purely in correlators iff
    2 c[x] = -sum_y d[x][y] for every x and 2 e[y] = -sum_x d[x][y] for
    every y; input permutations cannot change that, so they are not searched.
    """
    na, nb = table.scenario.na, table.scenario.nb
    swaps = (False, True) if na == nb else (False,)
    for swap in swaps:
        for flip_a in itertools.product((0, 1), repeat=na):
            for flip_b in itertools.product((0, 1), repeat=nb):
                r = Relabeling(
                    tuple(range(na)), tuple(range(nb)), flip_a, flip_b, swap
                )
                cand = apply_relabeling(table, r)
                row_ok = all(
                    2 * int(cand.c[x]) == -int(cand.d[x, :].sum())
                    for x in range(cand.scenario.na)
                )
                if not row_ok:
                    continue
                col_ok = all(
                    2 * int(cand.e[y]) == -int(cand.d[:, y].sum())
                    for y in range(cand.scenario.nb)
                )
                if not col_ok:
                    continue
                g = tuple(
                    tuple(Fraction(int(v), 4) for v in row) for row in cand.d.tolist()
                )
                return CorrelatorForm(g, Fraction(int(cand.d.sum()), 4), r)
    return None
