"""Tropical Kapranov maps and membership in tropical psi-hypersurfaces.

A hypersurface datum fixes S subset of [n], distinct i, j in S, a level q and
a base B.  Leg ell in S \\ {i, j} carries the valuation a_ell = ell * B^(n-3-q);
a metric tree lies on the hypersurface when min_ell(d_ell + a_ell) is achieved
at least twice, where d_ell are the Kapranov coordinates: positions of the
legs' nearest points along the i -> j geodesic of the S-hull, with the base
of leg i at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .trees import MetricTree, TreeError, forgetful_metric, hull_distance


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class PsiSpec:
    """One pulled-back psi-class datum (S, i, j) at level q with base B."""

    S: frozenset[int]
    i: int
    j: int
    q: int
    n: int
    B: int
    valuations: Mapping[int, int] | None = field(default=None, compare=False)

    @staticmethod
    def build(
        S,
        i: int,
        j: int,
        q: int,
        n: int,
        B: int,
        valuations: Mapping[int, int] | None = None,
    ) -> "PsiSpec":
        S = frozenset(S)
        if not S <= frozenset(range(1, n + 1)):
            raise SpecError("S must be a subset of [n]")
        if len(S) < 3:
            raise SpecError("|S| must be at least 3")
        if i == j or i not in S or j not in S:
            raise SpecError("i, j must be distinct elements of S")
        if not 1 <= q <= n - 3:
            raise SpecError(f"level q={q} out of range 1..{n - 3}")
        if B < 1:
            raise SpecError("base B must be positive")
        if valuations is not None:
            valuations = {int(k): int(v) for k, v in valuations.items()}
            if set(valuations) != set(S - {i, j}):
                raise SpecError("custom valuations must cover exactly S \\ {i, j}")
            if len(set(valuations.values())) != len(valuations):
                raise SpecError("custom valuations must be pairwise distinct")
        return PsiSpec(S, i, j, q, n, B, valuations)

    @property
    def others(self) -> tuple[int, ...]:
        return tuple(sorted(self.S - {self.i, self.j}))

    def valuation(self, ell: int) -> int:
        if self.valuations is not None:
            return self.valuations[ell]
        return ell * self.B ** (self.n - 3 - self.q)


@dataclass(frozen=True)
class MinProfile:
    """Values d_ell + a_ell with the sorted set of minimizing legs."""

    values: tuple[tuple[int, int], ...]  # (ell, value), sorted by ell
    argmins: tuple[int, ...]

    def value_vector(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.values)

    def minimum(self) -> int:
        return min(v for _, v in self.values)


def kapranov_image(mt: MetricTree, spec: PsiSpec) -> dict[int, int]:
    """Coordinates d_ell on the i -> j geodesic of the S-hull, base of i at 0."""
    if spec.n != mt.tree.n or frozenset(mt.tree.legs) != frozenset(range(1, spec.n + 1)):
        raise SpecError("spec n does not match the tree's legs")
    hull = forgetful_metric(mt, spec.S) if spec.S != mt.tree.leg_set else mt
    return {ell: hull_distance(hull, spec.i, spec.j, ell) for ell in spec.others}


def min_profile(mt: MetricTree, spec: PsiSpec) -> MinProfile:
    image = kapranov_image(mt, spec)
    values = tuple((ell, image[ell] + spec.valuation(ell)) for ell in spec.others)
    lowest = min(v for _, v in values)
    argmins = tuple(ell for ell, v in values if v == lowest)
    return MinProfile(values, argmins)


def in_hypersurface(mt: MetricTree, spec: PsiSpec) -> bool:
    """Tropical psi-hypersurface membership: the minimum is achieved twice."""
    return len(min_profile(mt, spec).argmins) >= 2


def achieved_exactly_twice(mt: MetricTree, spec: PsiSpec) -> bool:
    return len(min_profile(mt, spec).argmins) == 2


def default_base(n: int) -> int:
    """Smallest base the separation estimates are proved for."""
    return 2 * n + 1


def specs_from_classes(
    n: int,
    classes: list[Mapping],
    B: int | None = None,
) -> tuple[list[PsiSpec], int]:
    """Build level-q specs from [{S, i, j}, ...] dicts; returns (specs, B)."""
    if B is None:
        B = default_base(n)
    if len(classes) > max(n - 3, 0):
        raise SpecError(f"at most n-3={n - 3} classes are allowed for n={n}")
    specs = [
        PsiSpec.build(c["S"], c["i"], c["j"], q, n, B)
        for q, c in enumerate(classes, start=1)
    ]
    return specs, B
