"""Hilbert bases and minimal N0-solutions of linear Diophantine systems.

These power the exact intersection of linear sets: the periods of an
intersection come from the Hilbert basis of the homogeneous system equating
all period expansions, and the constants from the minimal solutions of the
corresponding inhomogeneous system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .vecset import DimensionMismatch, LinearSet, SemilinearSet, Vec0, member_linear
from . import qlinalg

DEFAULT_NODE_BUDGET = 10_000


class FrontierLimitError(RuntimeError):
    """The completion search exceeded its configured node budget."""


@dataclass(frozen=True)
class HomSystem:
    """Integer matrix A; solutions are x in N0^cols with A x = 0 (or = rhs)."""

    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, matrix: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "matrix", rows)

    @property
    def n_rows(self) -> int:
        return len(self.matrix)

    @property
    def n_cols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0


@dataclass(frozen=True)
class HilbertBasis:
    """All componentwise-minimal nonzero solutions of A x = 0 over N0."""

    generators: tuple[Vec0, ...]


def _minimal_nonzero_solutions(matrix, n_cols, node_budget, col_caps=None):
    """Completion search for the <=-minimal nonzero solutions of A x = 0 in N0.

    Breadth-first by coordinate sum: partial vectors grow by unit steps, a
    step e_j is taken only while it moves the residual A x toward zero
    (negative scalar product), and any vector dominating a known solution is
    pruned.  Level-synchronous processing makes every emitted solution
    minimal; a final filter keeps that property independent of search order.

    Two further sound prunes: optional per-column caps (a path to a capped
    minimal solution never exceeds the cap), and an exact rational check
    that -residual still lies in the cone of the usable columns.
    """
    if n_cols == 0:
        return []
    col_images = [tuple(row[j] for row in matrix) for j in range(n_cols)]
    feasibility: dict[tuple, bool] = {}

    def completable(res, vec) -> bool:
        if col_caps is None:
            usable = None
        else:
            usable = tuple(j for j in range(n_cols)
                           if col_caps[j] is None or vec[j] < col_caps[j])
        key = (res, usable)
        cached = feasibility.get(key)
        if cached is None:
            cols = col_images if usable is None \
                else [col_images[j] for j in usable]
            cached = qlinalg.cone_feasible(cols, tuple(-r for r in res))
            feasibility[key] = cached
        return cached

    def capped(vec, j) -> bool:
        return col_caps is not None and col_caps[j] is not None \
            and vec[j] >= col_caps[j]

    solutions: list[tuple[int, ...]] = []
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for j in range(n_cols):
        vec = tuple(1 if i == j else 0 for i in range(n_cols))
        if not capped((0,) * n_cols, j) and completable(col_images[j], vec):
            frontier[vec] = col_images[j]
    nodes = 0
    while frontier:
        nodes += len(frontier)
        if nodes > node_budget:
            raise FrontierLimitError(
                f"frontier search exceeded {node_budget} nodes; "
                "raise node_budget for larger instances")
        next_frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
        new_solutions = []
        for vec, res in frontier.items():
            if all(v == 0 for v in res):
                new_solutions.append(vec)
                continue
            for j, col in enumerate(col_images):
                if capped(vec, j):
                    continue
                if sum(r * c for r, c in zip(res, col)) >= 0:
                    continue
                child = list(vec)
                child[j] += 1
                child_t = tuple(child)
                if child_t in next_frontier:
                    continue
                if any(all(c >= s for c, s in zip(child_t, sol))
                       for sol in solutions):
                    continue
                child_res = tuple(r + c for r, c in zip(res, col))
                if not completable(child_res, child_t):
                    continue
                next_frontier[child_t] = child_res
        solutions.extend(new_solutions)
        if new_solutions:
            next_frontier = {
                v: r for v, r in next_frontier.items()
                if not any(all(c >= s for c, s in zip(v, sol))
                           for sol in new_solutions)
            }
        frontier = next_frontier
    minimal = [
        s for s in solutions
        if not any(o != s and all(a >= b for a, b in zip(s, o))
                   for o in solutions)
    ]
    return sorted(minimal)


def hilbert_basis(sys: HomSystem,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> HilbertBasis:
    """Complete set of <=-minimal nonzero N0-solutions of A x = 0."""
    sols = _minimal_nonzero_solutions(sys.matrix, sys.n_cols, node_budget)
    return HilbertBasis(tuple(Vec0(s) for s in sols))


def _staircase_cells(generators, n_cols, cell_budget):
    """Cap vectors covering {x : no generator is dominated by x}.

    For each generator pick one coordinate forced strictly below it; caps
    are componentwise minima of those choices.  Dominated and duplicate cap
    vectors are dropped.
    """
    cells: set[tuple] = set()
    seen: set[tuple[int, tuple]] = set()

    def descend(idx: int, caps: tuple) -> None:
        if len(seen) > cell_budget:
            raise FrontierLimitError(
                f"staircase cell search exceeded {cell_budget} nodes")
        key = (idx, caps)
        if key in seen:
            return
        seen.add(key)
        if idx == len(generators):
            cells.add(caps)
            return
        gen = generators[idx].entries
        if any(caps[j] is not None and caps[j] < gen[j]
               for j in range(n_cols)):
            descend(idx + 1, caps)
            return
        for j in range(n_cols):
            if gen[j] > 0:
                new = list(caps)
                limit = gen[j] - 1
                new[j] = limit if new[j] is None else min(new[j], limit)
                descend(idx + 1, tuple(new))

    descend(0, (None,) * n_cols)
    # keep only maximal cells (cap <= cap' pointwise means cell inside cell')
    def covered(c, d):
        return all(dj is None or (cj is not None and cj <= dj)
                   for cj, dj in zip(c, d))

    out = []
    for c in cells:
        if not any(c != d and covered(c, d) for d in cells):
            out.append(c)
    return out


def _cell_points(x0, kernel, caps):
    """Integer points of {x0 + N z : x >= 0, x <= caps}, via recursive
    exact-LP coordinate ranges in z-space.  The cell polytope is bounded
    because every rational recession direction would scale to a nonzero
    homogeneous solution dominating some generator, which the caps forbid.
    """
    n = len(x0)
    d = len(kernel)
    if d == 0:
        x = tuple(x0)
        ok = all(v >= 0 for v in x) and all(
            caps[j] is None or x[j] <= caps[j] for j in range(n))
        return [x] if ok else []
    rows = []
    rhs = []
    for i in range(n):
        rows.append([-kernel[k][i] for k in range(d)])
        rhs.append(x0[i])
        if caps[i] is not None:
            rows.append([kernel[k][i] for k in range(d)])
            rhs.append(caps[i] - x0[i])
    points = []

    def sweep(prefix):
        j = len(prefix)
        shifted = [rhs[i] - sum(rows[i][t] * prefix[t] for t in range(j))
                   for i in range(len(rows))]
        if j == d:
            if all(v >= 0 for v in shifted):
                points.append(tuple(prefix))
            return
        rest = [row[j:] for row in rows]
        if d - j == 1:
            lo, hi = None, None
            feasible = True
            for row, e in zip(rest, shifted):
                c = row[0]
                if c == 0:
                    if e < 0:
                        feasible = False
                        break
                elif c > 0:
                    bound = _floor_div_frac(e, c)
                    hi = bound if hi is None else min(hi, bound)
                else:
                    bound = _ceil_div_frac(e, c)
                    lo = bound if lo is None else max(lo, bound)
            if not feasible or lo is None or hi is None:
                if feasible and (lo is None or hi is None):
                    raise AssertionError("unbounded cell polytope")
                return
            for v in range(lo, hi + 1):
                sweep(prefix + [v])
            return
        objective = [1] + [0] * (d - j - 1)
        status_lo, lo = qlinalg.lp_extremum(rest, shifted, objective, False)
        if status_lo == "infeasible":
            return
        status_hi, hi = qlinalg.lp_extremum(rest, shifted, objective, True)
        if "unbounded" in (status_lo, status_hi):
            raise AssertionError("unbounded cell polytope")
        for v in range(math.ceil(lo), math.floor(hi) + 1):
            sweep(prefix + [v])

    sweep([])
    out = []
    for z in points:
        x = tuple(x0[i] + sum(kernel[k][i] * z[k] for k in range(d))
                  for i in range(n))
        out.append(x)
    return out


def _floor_div_frac(e, c):
    return math.floor(Fraction(e) / c)


def _ceil_div_frac(e, c):
    return math.ceil(Fraction(e) / c)


def minimal_inhom_solutions(sys: HomSystem, rhs: Sequence[int],
                            node_budget: int = DEFAULT_NODE_BUDGET,
                            hilbert: HilbertBasis | None = None
                            ) -> tuple[Vec0, ...]:
    """All <=-minimal N0-solutions of A x = rhs; empty tuple if infeasible.

    A solution is minimal exactly when it dominates no generator of the
    homogeneous solution monoid, so the minimal solutions are the integer
    points of the lattice-parameterized solution set inside the staircase
    region below the Hilbert generators, a finite union of bounded cells.
    """
    rhs = tuple(int(v) for v in rhs)
    if len(rhs) != sys.n_rows:
        raise DimensionMismatch(f"rhs length {len(rhs)} vs {sys.n_rows} rows")
    if all(v == 0 for v in rhs):
        return (Vec0((0,) * sys.n_cols),) if sys.n_cols else ()
    if sys.n_cols == 0:
        return ()
    param = qlinalg.integer_affine_solutions(sys.matrix, rhs)
    if param is None:
        return ()
    x0, kernel = param
    if hilbert is None:
        hilbert = hilbert_basis(sys, node_budget)
    gens = hilbert.generators
    solutions: set[tuple[int, ...]] = set()
    for caps in _staircase_cells(gens, sys.n_cols, node_budget):
        solutions.update(_cell_points(x0, kernel, caps))
    minimal = [
        s for s in solutions
        if not any(o != s and all(a >= b for a, b in zip(s, o))
                   for o in solutions)
    ]
    return tuple(Vec0(s) for s in sorted(minimal))


def _block_system(sets: Sequence[LinearSet]):
    """Equations P_1 a_1 = P_i a_i + (c_i - c_1) over the stacked alpha blocks."""
    r = sets[0].dim
    counts = [len(l.periods) for l in sets]
    n_cols = sum(counts)
    offsets = []
    acc = 0
    for c in counts:
        offsets.append(acc)
        acc += c
    rows = []
    rhs = []
    for i in range(1, len(sets)):
        for coord in range(r):
            row = [0] * n_cols
            for j, p in enumerate(sets[0].periods):
                row[offsets[0] + j] = p.entries[coord]
            for j, p in enumerate(sets[i].periods):
                row[offsets[i] + j] = -p.entries[coord]
            rows.append(tuple(row))
            rhs.append(sets[i].constant.entries[coord]
                       - sets[0].constant.entries[coord])
    return HomSystem(rows), tuple(rhs), offsets, counts


def _expand_block(lin: LinearSet, coeffs: Sequence[int]) -> Vec0:
    total = Vec0.zero(lin.dim)
    for a, p in zip(coeffs, lin.periods):
        total = total + p.scale(a)
    return total


def intersect_linear(sets: Sequence[LinearSet],
                     node_budget: int = DEFAULT_NODE_BUDGET) -> SemilinearSet:
    """Exact presentation of the intersection of finitely many linear sets.

    Unknowns are the coefficient blocks of all sets; the homogeneous Hilbert
    basis supplies the periods (mapped back through the first set), the
    minimal inhomogeneous solutions supply the constants.  An infeasible
    system yields the empty semilinear set; all-zero constants yield a single
    zero-constant linear component.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one linear set")
    r = sets[0].dim
    for lin in sets:
        if lin.dim != r:
            raise DimensionMismatch(f"dim {lin.dim} vs {r}")
    if len(sets) == 1:
        return SemilinearSet(r, (sets[0],))
    sys, rhs, offsets, counts = _block_system(sets)
    constants_raw = minimal_inhom_solutions(sys, rhs, node_budget)
    if not constants_raw:
        return SemilinearSet(r, ())
    basis = hilbert_basis(sys, node_budget)
    period_vecs = set()
    for gen in basis.generators:
        block = gen.entries[offsets[0]:offsets[0] + counts[0]]
        vec = _expand_block(sets[0], block)
        if not vec.is_zero():
            period_vecs.add(vec.entries)
    periods = [Vec0(p) for p in sorted(period_vecs)]
    constant_vecs = set()
    for sol in constants_raw:
        block = sol.entries[offsets[0]:offsets[0] + counts[0]]
        constant_vecs.add((sets[0].constant + _expand_block(sets[0], block)).entries)
    comps = [LinearSet(Vec0(c), periods) for c in sorted(constant_vecs)]
    return SemilinearSet(r, comps)


def _monoid_equal(periods_a: Sequence[Vec0], periods_b: Sequence[Vec0],
                  dim: int) -> bool:
    """Equality of N0-spans, via mutual membership of the generators."""
    la = LinearSet(Vec0.zero(dim), periods_a)
    lb = LinearSet(Vec0.zero(dim), periods_b)
    return (all(member_linear(p, lb) is not None for p in la.periods)
            and all(member_linear(p, la) is not None for p in lb.periods))


def rational_intersection_dim(sets: Sequence[LinearSet]) -> int:
    """Dimension over Q of the intersection of the period spans."""
    dim = sets[0].dim
    bases = [[p.entries for p in lin.periods] for lin in sets]
    return len(qlinalg.subspace_intersection(bases, dim))


def find_removable_period(sets: Sequence[LinearSet],
                          node_budget: int = DEFAULT_NODE_BUDGET
                          ) -> tuple[int, int] | None:
    """A period whose removal leaves the intersection unchanged, if any.

    Input sets must all have constant zero.  Returns 1-indexed (set, period)
    or None.  Whenever dim(intersection) < dim(rational intersection) a
    removable period exists; equal dimensions may still admit one (redundant
    generators), so the search is unconditional.
    """
    sets = list(sets)
    dim = sets[0].dim
    for lin in sets:
        if not lin.constant.is_zero():
            raise ValueError("all constants must be zero")
    base = intersect_linear(sets, node_budget)
    if len(base.components) != 1:
        raise RuntimeError("zero-constant intersection must be linear")
    base_periods = base.components[0].periods
    for i, lin in enumerate(sets):
        for j in range(len(lin.periods)):
            reduced_periods = lin.periods[:j] + lin.periods[j + 1:]
            trial_sets = list(sets)
            trial_sets[i] = LinearSet(lin.constant, reduced_periods)
            trial = intersect_linear(trial_sets, node_budget)
            if len(trial.components) != 1:
                continue
            if _monoid_equal(base_periods, trial.components[0].periods, dim):
                return (i + 1, j + 1)
    return None


def format_system(sys: HomSystem) -> str:
    lines = [f"sys rows={sys.n_rows} cols={sys.n_cols}"]
    lines.extend(" ".join(str(x) for x in row) for row in sys.matrix)
    return "\n".join(lines)


def parse_system(text: str) -> HomSystem:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("sys"):
        raise ValueError("expected 'sys' header")
    rows = [tuple(int(tok) for tok in ln.split()) for ln in lines[1:]]
    return HomSystem(rows)
