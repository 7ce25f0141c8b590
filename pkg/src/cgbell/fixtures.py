"""The five classic inequalities bundled with the package.

These are stored in their standard printed normalisation (CHSH with bound 0,
etc.), not in the shifted normalisation some reference tables use; the
normalisation-invariant quantities (theta, lambda, eta) are what should be
compared across sources.
"""

from __future__ import annotations

from .model import CgTable, Scenario


def chsh() -> CgTable:
    return CgTable(
        Scenario(2, 2),
        d=[[1, 1], [1, -1]],
        c=[-1, 0],
        e=[-1, 0],
        bound=0,
        name="CHSH",
    )


def i3322() -> CgTable:
    return CgTable(
        Scenario(3, 3),
        d=[[1, 1, 1], [1, 1, -1], [1, -1, 0]],
        c=[-2, -1, 0],
        e=[-1, 0, 0],
        bound=0,
        name="I3322",
    )


def i3422_1() -> CgTable:
    return CgTable(
        Scenario(3, 4),
        d=[[-1, -1, 1, -1], [-1, 1, -1, -1], [1, 1, 1, -1]],
        c=[1, 1, -2],
        e=[1, 0, 0, 1],
        bound=2,
        name="I3422_1",
    )


def i3422_2() -> CgTable:
    return CgTable(
        Scenario(3, 4),
        d=[[-1, 0, 1, -1], [1, -1, 0, -1], [1, 1, 1, 0]],
        c=[0, 1, -1],
        e=[-1, 0, -1, 1],
        bound=1,
        name="I3422_2",
    )


def i3422_3() -> CgTable:
    return CgTable(
        Scenario(3, 4),
        d=[[-2, 0, 1, -1], [1, -1, 1, -1], [1, 1, 1, -1]],
        c=[1, 0, -1],
        e=[0, 0, -1, 2],
        bound=2,
        name="I3422_3",
    )


def all_fixtures() -> list[CgTable]:
    """The bundled inequalities, in reference-table order."""
    return [chsh(), i3322(), i3422_1(), i3422_2(), i3422_3()]
