"""Stratified period sets, coordinate-class partitions, and the diagonal
equal-block families.

A period set is stratified when every period touches at most two coordinates
and no two periods interleave (no i<j<k<l with one period supported on {i,k}
and another on {j,l}).  Stratified sets induce a partition of the coordinate
indices whose blocks confine a basis of the orthogonal complement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from . import qlinalg
from .vecset import LinearSet, QVec, Vec0, dimension


class NotStratified(ValueError):
    """Operation requires a stratified period set."""


class BlockFormViolation(RuntimeError):
    """Perp-space basis could not be recombined into single-class blocks."""


@dataclass(frozen=True)
class StratCheck:
    """Outcome of the stratification test, with a violation certificate."""

    ok: bool
    bad_period: Vec0 | None = None
    crossing: tuple[Vec0, Vec0] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _support(p: Vec0) -> tuple[int, ...]:
    return tuple(i + 1 for i, x in enumerate(p.entries) if x != 0)


def is_stratified_period_set(periods: Sequence[Vec0]) -> StratCheck:
    """Check the two stratification conditions on an explicit period list."""
    pairs = []
    for p in periods:
        sup = _support(p)
        if len(sup) > 2:
            return StratCheck(False, bad_period=p)
        if len(sup) == 2:
            pairs.append((sup, p))
    for (s1, p1), (s2, p2) in itertools.permutations(pairs, 2):
        # interleaving i<j<k<l with supports {i,k} and {j,l}
        if s1[0] < s2[0] < s1[1] < s2[1]:
            return StratCheck(False, crossing=(p1, p2))
    return StratCheck(True)


@dataclass(frozen=True)
class PeriodClassPartition:
    """Partition of {1..r} generated by the two-coordinate periods."""

    r: int
    classes: tuple[tuple[int, ...], ...]

    def class_of(self, i: int) -> tuple[int, ...]:
        for cls in self.classes:
            if i in cls:
                return cls
        raise ValueError(f"index {i} out of range 1..{self.r}")

    def same_class(self, m: int, n: int) -> bool:
        return self.class_of(m) is self.class_of(n)


def partition_PiL(lin: LinearSet) -> PeriodClassPartition:
    """Union-find closure of the relation "some period touches both m and n"."""
    check = is_stratified_period_set(lin.periods)
    if not check:
        raise NotStratified(f"period set is not stratified: {check}")
    r = lin.dim
    parent = list(range(r + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in lin.periods:
        sup = _support(p)
        if len(sup) == 2:
            a, b = find(sup[0]), find(sup[1])
            if a != b:
                parent[b] = a
    groups: dict[int, list[int]] = {}
    for i in range(1, r + 1):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(g)) for g in
                    sorted(groups.values(), key=lambda g: g[0]))
    return PeriodClassPartition(r, classes)


def check_no_crossing(part: PeriodClassPartition,
                      quad: tuple[int, int, int, int]) -> bool:
    """For m1<n1<m2<n2 with m1,n1 and m2,n2 in distinct classes, the pairs
    (m1,m2) and (n1,n2) cannot both be equivalent.  Returns False only on a
    counterexample, which would indicate a broken partition.
    """
    m1, n1, m2, n2 = quad
    if not m1 < n1 < m2 < n2:
        raise ValueError(f"need m1<n1<m2<n2, got {quad}")
    if part.same_class(m1, n1):
        raise ValueError(f"precondition m1~n1 must fail for {quad}")
    if part.same_class(m2, n2):
        raise ValueError(f"precondition m2~n2 must fail for {quad}")
    return not (part.same_class(m1, m2) and part.same_class(n1, n2))


def perp_block_basis(lin: LinearSet) -> tuple[QVec, ...]:
    """Basis of span(periods)^perp with every vector inside one class.

    Projections of perp vectors onto a class stay in the perp space because
    every period's support lies inside a single class; Gaussian elimination
    per class then yields r - dim(lin) independent block vectors.
    """
    if not lin.constant.is_zero():
        raise ValueError("constant vector must be zero")
    part = partition_PiL(lin)
    r = lin.dim
    if lin.periods:
        null = qlinalg.nullspace([p.entries for p in lin.periods], r)
    else:
        null = tuple(qlinalg.identity(r))
    blocks: list[tuple] = []
    for cls in part.classes:
        idx = set(c - 1 for c in cls)
        projected = []
        for vec in null:
            proj = tuple(x if i in idx else qlinalg.fr(0)
                         for i, x in enumerate(vec))
            if any(x != 0 for x in proj):
                projected.append(proj)
        blocks.extend(qlinalg.row_basis(projected))
    expected = r - dimension(lin)
    if len(blocks) != expected:
        raise BlockFormViolation(
            f"got {len(blocks)} block vectors, expected {expected}")
    for vec in blocks:
        for p in lin.periods:
            if qlinalg.dot(vec, p.entries) != 0:
                raise BlockFormViolation("block vector not orthogonal")
    canon = sorted(qlinalg.primitive_integer(vec) for vec in blocks)
    return tuple(QVec(vec) for vec in canon)


@dataclass(frozen=True)
class SkFamilySpec:
    """Parameters of the equal-block diagonal family: block width n, k blocks."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")

    @property
    def dim(self) -> int:
        return 2 * self.n * self.k


@dataclass(frozen=True)
class SnkFamily:
    """Diagonal set in N0^(2nk): halves agree and entries repeat n-fold.

    Presentation and defining-equality predicate are both carried; they agree
    pointwise.
    """

    spec: SkFamilySpec
    presentation: LinearSet

    def contains(self, v) -> bool:
        entries = v.entries if isinstance(v, Vec0) else tuple(v)
        n, k = self.spec.n, self.spec.k
        if len(entries) != 2 * n * k:
            return False
        nk = n * k
        for i in range(1, nk + 1):
            if entries[i - 1] != entries[i + nk - 1]:
                return False
        for j in range(k):
            first = entries[n * j]
            for l in range(2, n + 1):
                if entries[n * j + l - 1] != first:
                    return False
        return True


def build_Snk(spec: SkFamilySpec) -> SnkFamily:
    """Zero-constant presentation with one period per block index."""
    n, k = spec.n, spec.k
    r = spec.dim
    periods = []
    for j in range(k):
        entries = [0] * r
        for l in range(1, n + 1):
            entries[n * j + l - 1] = 1
            entries[n * (k + j) + l - 1] = 1
        periods.append(Vec0(entries))
    return SnkFamily(spec, LinearSet(Vec0.zero(r), periods))


def build_Sk_cover(k: int) -> list[LinearSet]:
    """k stratified zero-constant linear sets whose intersection is the
    n=1 diagonal family: the i-th set ties coordinates i and k+i and leaves
    every other coordinate free.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    r = 2 * k
    cover = []
    for i in range(1, k + 1):
        periods = [Vec0.unit(r, i) + Vec0.unit(r, k + i)]
        periods.extend(Vec0.unit(r, j) for j in range(1, r + 1)
                       if j not in (i, k + i))
        cover.append(LinearSet(Vec0.zero(r), periods))
    return cover


def membership_Lnk(word: Sequence[int], spec: SkFamilySpec) -> bool:
    """Word over symbol indices 1..2nk in sorted-block form, exponent tuple
    in the diagonal set.  Out-of-order words are non-members by definition.
    """
    r = spec.dim
    counts = [0] * r
    prev = 0
    for sym in word:
        if not 1 <= sym <= r:
            return False
        if sym < prev:
            return False
        counts[sym - 1] += 1
        prev = sym
    return build_Snk(spec).contains(counts)


@dataclass(frozen=True)
class StratifiedSearchResult:
    """Outcome of the bounded search for a stratified re-presentation."""

    status: str  # "found" | "unknown"
    periods: tuple[Vec0, ...] | None = None


def search_stratified_presentation(lin: LinearSet, max_period_norm: int
                                   ) -> StratifiedSearchResult:
    """Bounded search for a stratified period set presenting the same set.

    Deciding whether some stratified presentation exists is open; this search
    only reports "found" with a verified witness, and "unknown" otherwise.
    Candidates are the members of the zero-shadow with at most two nonzero
    coordinates and coordinate sum at most max_period_norm.
    """
    from .vecset import member_linear, zero_shadow

    shadow = zero_shadow(lin)
    r = lin.dim
    candidates: list[Vec0] = []
    for sup in itertools.chain(
            itertools.combinations(range(r), 1),
            itertools.combinations(range(r), 2)):
        if len(sup) == 1:
            for a in range(1, max_period_norm + 1):
                vec = [0] * r
                vec[sup[0]] = a
                v = Vec0(vec)
                if member_linear(v, shadow) is not None:
                    candidates.append(v)
        else:
            for a in range(1, max_period_norm):
                for b in range(1, max_period_norm - a + 1):
                    vec = [0] * r
                    vec[sup[0]], vec[sup[1]] = a, b
                    v = Vec0(vec)
                    if member_linear(v, shadow) is not None:
                        candidates.append(v)
    minimal = [v for v in candidates
               if not any(w != v and v.dominates(w) for w in candidates)]

    def generates(period_set: Sequence[Vec0]) -> bool:
        trial = LinearSet(lin.constant, period_set)
        return all(member_linear(lin.constant + p, trial) is not None
                   for p in lin.periods)

    if is_stratified_period_set(minimal) and generates(minimal):
        return StratifiedSearchResult("found", tuple(minimal))
    if len(minimal) <= 12:
        for size in range(len(minimal), 0, -1):
            for subset in itertools.combinations(minimal, size):
                if is_stratified_period_set(subset) and generates(subset):
                    return StratifiedSearchResult("found", subset)
    return StratifiedSearchResult("unknown")
