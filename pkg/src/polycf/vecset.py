"""Exact vectors over N0 and Q, linear and semilinear sets, basic set algebra.

A linear set L(c; p_1, ..., p_n) is {c + sum a_i p_i : a_i in N0}; a semilinear
set is a finite union of linear sets.  Membership is decided exactly by a
bounded coefficient search, and every positive answer carries a reproducible
coefficient certificate.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import qlinalg


class DimensionMismatch(ValueError):
    """Operands live in ambient spaces of different dimension."""


class ParseError(ValueError):
    """Malformed text in the line-based set format."""


@dataclass(frozen=True)
class Vec0:
    """Vector in N0^r with arbitrary-precision nonnegative integer entries."""

    entries: tuple[int, ...]

    def __init__(self, entries: Iterable[int]):
        entries = tuple(int(x) for x in entries)
        if len(entries) < 1:
            raise ValueError("vectors must have dimension >= 1")
        if any(x < 0 for x in entries):
            raise ValueError(f"negative entry in {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, r: int) -> "Vec0":
        return cls((0,) * r)

    @classmethod
    def unit(cls, r: int, i: int) -> "Vec0":
        """e_i in N0^r, 1-indexed."""
        if not 1 <= i <= r:
            raise ValueError(f"unit index {i} out of range 1..{r}")
        return cls(tuple(1 if j == i - 1 else 0 for j in range(r)))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def sigma(self) -> int:
        """Sum of all entries."""
        return sum(self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def __add__(self, other: "Vec0") -> "Vec0":
        self._check_dim(other)
        return Vec0(tuple(x + y for x, y in zip(self.entries, other.entries)))

    def scale(self, k: int) -> "Vec0":
        if k < 0:
            raise ValueError("nonnegative scalar required")
        return Vec0(tuple(k * x for x in self.entries))

    def dominates(self, other: "Vec0") -> bool:
        """Componentwise >=."""
        self._check_dim(other)
        return all(x >= y for x, y in zip(self.entries, other.entries))

    def concat(self, other: "Vec0") -> "Vec0":
        """The vector (self; other) in N0^(r+s)."""
        return Vec0(self.entries + other.entries)

    def split(self, r: int) -> tuple["Vec0", "Vec0"]:
        """Inverse of concat: first r coordinates, then the rest."""
        if not 1 <= r < self.dim:
            raise ValueError("split point out of range")
        return Vec0(self.entries[:r]), Vec0(self.entries[r:])

    def _check_dim(self, other: "Vec0") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.entries)


@dataclass(frozen=True)
class QVec:
    """Vector in Q^r; exact rational arithmetic only."""

    entries: tuple[Fraction, ...]

    def __init__(self, entries: Iterable):
        entries = tuple(qlinalg.fr(x) for x in entries)
        if len(entries) < 1:
            raise ValueError("vectors must have dimension >= 1")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def dot(self, other) -> Fraction:
        vec = other.entries if hasattr(other, "entries") else other
        return qlinalg.dot(self.entries, vec)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.entries)


@dataclass(frozen=True)
class Permutation:
    """Bijection tau of {1, ..., r}; images[i-1] = tau(i).

    Acting on vectors, tau(v)(i) = v(tau(i)).
    """

    images: tuple[int, ...]

    def __init__(self, images: Iterable[int]):
        images = tuple(int(x) for x in images)
        r = len(images)
        if sorted(images) != list(range(1, r + 1)):
            raise ValueError(f"not a bijection on 1..{r}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, r: int) -> "Permutation":
        return cls(range(1, r + 1))

    @classmethod
    def transposition(cls, r: int, i: int, j: int) -> "Permutation":
        images = list(range(1, r + 1))
        images[i - 1], images[j - 1] = images[j - 1], images[i - 1]
        return cls(images)

    @property
    def dim(self) -> int:
        return len(self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.dim
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Permutation(inv)

    def apply(self, v):
        """Permute coordinates of a Vec0, QVec, or plain tuple."""
        if isinstance(v, Vec0):
            return Vec0(tuple(v.entries[img - 1] for img in self.images))
        if isinstance(v, QVec):
            return QVec(tuple(v.entries[img - 1] for img in self.images))
        return tuple(v[img - 1] for img in self.images)


@dataclass(frozen=True)
class LinearSet:
    """L(c; P): constant vector plus the N0-span of finitely many periods.

    Duplicate periods are removed at construction; order is preserved.
    """

    constant: Vec0
    periods: tuple[Vec0, ...]

    def __init__(self, constant: Vec0, periods: Iterable[Vec0] = ()):
        if not isinstance(constant, Vec0):
            constant = Vec0(constant)
        cleaned = []
        seen = set()
        for p in periods:
            if not isinstance(p, Vec0):
                p = Vec0(p)
            if p.dim != constant.dim:
                raise DimensionMismatch(
                    f"period dim {p.dim} vs constant dim {constant.dim}")
            if p.entries not in seen:
                seen.add(p.entries)
                cleaned.append(p)
        object.__setattr__(self, "constant", constant)
        object.__setattr__(self, "periods", tuple(cleaned))

    @property
    def dim(self) -> int:
        return self.constant.dim

    def __str__(self) -> str:
        return format_linear(self)


@dataclass(frozen=True)
class SemilinearSet:
    """Finite union of linear sets of a common dimension; empty list = empty set."""

    dim: int
    components: tuple[LinearSet, ...]

    def __init__(self, dim: int, components: Iterable[LinearSet] = ()):
        components = tuple(components)
        for comp in components:
            if comp.dim != dim:
                raise DimensionMismatch(f"component dim {comp.dim} vs {dim}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "components", components)

    @classmethod
    def of(cls, *components: LinearSet) -> "SemilinearSet":
        if not components:
            raise ValueError("use SemilinearSet(dim, ()) for the empty set")
        return cls(components[0].dim, components)

    def is_empty_presentation(self) -> bool:
        return not self.components

    def __str__(self) -> str:
        return format_semilinear(self)


@dataclass(frozen=True)
class MemberCertificate:
    """Reproducible witness: v = constant + sum alphas[i] * periods[i]."""

    component: int
    alphas: tuple[int, ...]


def _coeff_bound(residual: tuple[int, ...], period: Vec0) -> int:
    bound = None
    for res, p in zip(residual, period.entries):
        if p > 0:
            b = res // p
            bound = b if bound is None else min(bound, b)
    return 0 if bound is None else bound


def member_linear(v: Vec0, lin: LinearSet) -> tuple[int, ...] | None:
    """Coefficient vector expressing v in lin, or None.

    Exhaustive search over bounded coefficients with memoization on residuals;
    zero periods are ignored (their coefficient is reported as 0).
    """
    if v.dim != lin.dim:
        raise DimensionMismatch(f"dim {v.dim} vs {lin.dim}")
    residual = tuple(x - c for x, c in zip(v.entries, lin.constant.entries))
    if any(x < 0 for x in residual):
        return None
    nonzero = [(i, p) for i, p in enumerate(lin.periods) if not p.is_zero()]
    failed: set[tuple[int, tuple[int, ...]]] = set()
    alphas = [0] * len(lin.periods)

    def search(idx: int, res: tuple[int, ...]) -> bool:
        if all(x == 0 for x in res):
            for _, (j, _) in enumerate(nonzero[idx:], start=idx):
                alphas[j] = 0
            return True
        if idx == len(nonzero):
            return False
        key = (idx, res)
        if key in failed:
            return False
        j, period = nonzero[idx]
        for a in range(_coeff_bound(res, period), -1, -1):
            nxt = tuple(x - a * p for x, p in zip(res, period.entries))
            if any(x < 0 for x in nxt):
                continue
            if search(idx + 1, nxt):
                alphas[j] = a
                return True
        failed.add(key)
        return False

    if search(0, residual):
        return tuple(alphas)
    return None


def member_certificate(v: Vec0, s: SemilinearSet) -> MemberCertificate | None:
    """Membership certificate in the first matching component, else None."""
    if v.dim != s.dim:
        raise DimensionMismatch(f"dim {v.dim} vs {s.dim}")
    for i, comp in enumerate(s.components):
        alphas = member_linear(v, comp)
        if alphas is not None:
            return MemberCertificate(i, alphas)
    return None


def member(v: Vec0, s: SemilinearSet) -> bool:
    return member_certificate(v, s) is not None


def verify_certificate(v: Vec0, s: SemilinearSet, cert: MemberCertificate) -> bool:
    comp = s.components[cert.component]
    total = comp.constant
    for alpha, period in zip(cert.alphas, comp.periods):
        total = total + period.scale(alpha)
    return total == v


def dimension(lin: LinearSet) -> int:
    """Rank over Q of the period list (dimension of the rational hull)."""
    if not lin.periods:
        return 0
    return qlinalg.rank([p.entries for p in lin.periods])


def rational_hull(lin: LinearSet) -> tuple[Vec0, tuple[QVec, ...]]:
    """Affine hull over Q: the constant plus a Q-basis of span(periods)."""
    if not lin.periods:
        return lin.constant, ()
    basis = qlinalg.row_basis([p.entries for p in lin.periods])
    return lin.constant, tuple(QVec(row) for row in basis)


def zero_shadow(lin: LinearSet) -> LinearSet:
    """Same periods, constant vector zero."""
    return LinearSet(Vec0.zero(lin.dim), lin.periods)


def apply_permutation(tau: Permutation, s: SemilinearSet) -> SemilinearSet:
    """Permute coordinates of every constant and period.

    Membership commutes: v in s  iff  tau(v) in tau(s).
    """
    if tau.dim != s.dim:
        raise DimensionMismatch(f"permutation on {tau.dim} vs set dim {s.dim}")
    comps = tuple(
        LinearSet(tau.apply(c.constant), tuple(tau.apply(p) for p in c.periods))
        for c in s.components
    )
    return SemilinearSet(s.dim, comps)


def union(s1: SemilinearSet, s2: SemilinearSet) -> SemilinearSet:
    """Concatenated component lists, deduplicated."""
    if s1.dim != s2.dim:
        raise DimensionMismatch(f"dim {s1.dim} vs {s2.dim}")
    seen = set()
    comps = []
    for comp in s1.components + s2.components:
        key = (comp.constant.entries, frozenset(p.entries for p in comp.periods))
        if key not in seen:
            seen.add(key)
            comps.append(comp)
    return SemilinearSet(s1.dim, comps)


def linear_box_members(lin: LinearSet, bound: int) -> set[tuple[int, ...]]:
    """All members of lin inside [0, bound]^r, by closure from the constant.

    Adding periods is componentwise monotone, so a breadth-first closure that
    never leaves the box is exhaustive.
    """
    start = lin.constant.entries
    if any(x > bound for x in start):
        return set()
    periods = [p.entries for p in lin.periods if not p.is_zero()]
    found = {start}
    queue = deque([start])
    while queue:
        point = queue.popleft()
        for per in periods:
            nxt = tuple(x + p for x, p in zip(point, per))
            if any(x > bound for x in nxt):
                continue
            if nxt not in found:
                found.add(nxt)
                queue.append(nxt)
    return found


def semilinear_box_members(s: SemilinearSet, bound: int) -> set[tuple[int, ...]]:
    points: set[tuple[int, ...]] = set()
    for comp in s.components:
        points |= linear_box_members(comp, bound)
    return points


def naive_linear_members(lin: LinearSet, coeff_bound: int) -> set[tuple[int, ...]]:
    """Direct expansion {c + sum a_i p_i : a_i <= coeff_bound}; test oracle."""
    points = set()
    ranges = [range(coeff_bound + 1)] * len(lin.periods)
    for alphas in itertools.product(*ranges):
        total = lin.constant
        for a, p in zip(alphas, lin.periods):
            total = total + p.scale(a)
        points.add(total.entries)
    return points


# Text format.  One object per line group:
#   vector:     v: 2 3 2 3
#   linear:     lin c= 0 0 0 0 | p= 1 0 1 0 ; p= 0 1 0 1
#   semilinear: slset dim=4 / lin-lines / end

def format_vector(v: Vec0) -> str:
    return f"v: {v}"


def parse_vector(line: str) -> Vec0:
    line = line.strip()
    if not line.startswith("v:"):
        raise ParseError(f"expected 'v:' line, got {line!r}")
    try:
        return Vec0(int(tok) for tok in line[2:].split())
    except ValueError as exc:
        raise ParseError(f"bad vector line {line!r}: {exc}") from exc


def format_linear(lin: LinearSet) -> str:
    head = f"lin c= {lin.constant}"
    if not lin.periods:
        return head
    return head + " | " + " ; ".join(f"p= {p}" for p in lin.periods)


def parse_linear(line: str) -> LinearSet:
    line = line.strip()
    if not line.startswith("lin"):
        raise ParseError(f"expected 'lin' line, got {line!r}")
    body = line[3:].strip()
    parts = body.split("|", 1)
    const_part = parts[0].strip()
    if not const_part.startswith("c="):
        raise ParseError(f"missing 'c=' in {line!r}")
    try:
        constant = Vec0(int(tok) for tok in const_part[2:].split())
        periods = []
        if len(parts) == 2:
            for chunk in parts[1].split(";"):
                chunk = chunk.strip()
                if not chunk:
                    continue
                if not chunk.startswith("p="):
                    raise ParseError(f"missing 'p=' in {line!r}")
                periods.append(Vec0(int(tok) for tok in chunk[2:].split()))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"bad linear line {line!r}: {exc}") from exc
    return LinearSet(constant, periods)


def format_semilinear(s: SemilinearSet) -> str:
    lines = [f"slset dim={s.dim}"]
    lines.extend(format_linear(c) for c in s.components)
    lines.append("end")
    return "\n".join(lines)


def parse_semilinear(text: str) -> SemilinearSet:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("slset"):
        raise ParseError("expected 'slset' header")
    header = lines[0]
    dim = None
    for tok in header.split()[1:]:
        if tok.startswith("dim="):
            dim = int(tok[4:])
    if lines[-1] != "end":
        raise ParseError("missing 'end' terminator")
    comps = [parse_linear(ln) for ln in lines[1:-1]]
    if dim is None:
        if not comps:
            raise ParseError("empty slset requires dim= in header")
        dim = comps[0].dim
    return SemilinearSet(dim, comps)
