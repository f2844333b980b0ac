"""Exact rational linear algebra on tuple-based vectors and matrices.

Everything here works over `fractions.Fraction`; no floating point anywhere.
Matrices are tuples of row tuples.  All functions are pure.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Row = tuple[Fraction, ...]
Matrix = tuple[Row, ...]


def fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def make_matrix(rows) -> Matrix:
    return tuple(tuple(fr(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def mat_vec(a: Matrix, v) -> Row:
    return tuple(sum((x * fr(y) for x, y in zip(row, v)), Fraction(0)) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt)
        for row in a
    )


def mat_pow(a: Matrix, k: int) -> Matrix:
    """a**k for k >= 0 by repeated squaring."""
    if k < 0:
        raise ValueError("negative power; invert first")
    n = len(a)
    result = identity(n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def mat_inv(a: Matrix) -> Matrix:
    """Inverse via Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    aug = [list(row) + list(ident_row) for row, ident_row in zip(a, identity(n))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = Fraction(1) / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def rref(rows) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form; returns (rref matrix, pivot column indices)."""
    m = [list(map(fr, row)) for row in rows]
    if not m:
        return (), ()
    n_cols = len(m[0])
    pivots = []
    rank_so_far = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank_so_far, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank_so_far], m[pivot] = m[pivot], m[rank_so_far]
        inv_p = Fraction(1) / m[rank_so_far][col]
        m[rank_so_far] = [x * inv_p for x in m[rank_so_far]]
        for r in range(len(m)):
            if r != rank_so_far and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank_so_far])]
        pivots.append(col)
        rank_so_far += 1
        if rank_so_far == len(m):
            break
    reduced = tuple(tuple(row) for row in m[:rank_so_far])
    return reduced, tuple(pivots)


def rank(rows) -> int:
    return len(rref(rows)[0])


def row_basis(rows) -> tuple[Row, ...]:
    """Canonical basis (nonzero rref rows) of the row span."""
    return rref(rows)[0]


def nullspace(rows, n_cols: int | None = None) -> tuple[Row, ...]:
    """Basis of {x : A x = 0}, one vector per free column of A."""
    rows = [tuple(map(fr, row)) for row in rows]
    if n_cols is None:
        if not rows:
            raise ValueError("n_cols required for an empty matrix")
        n_cols = len(rows[0])
    reduced, pivots = rref(rows)
    pivot_set = set(pivots)
    free_cols = [c for c in range(n_cols) if c not in pivot_set]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * n_cols
        vec[free] = Fraction(1)
        for r, pcol in enumerate(pivots):
            vec[pcol] = -reduced[r][free]
        basis.append(tuple(vec))
    return tuple(basis)


def solve(rows, rhs) -> Row | None:
    """One particular solution of A x = b over Q, or None if inconsistent."""
    rows = [tuple(map(fr, row)) for row in rows]
    rhs = [fr(x) for x in rhs]
    if not rows:
        return ()
    n_cols = len(rows[0])
    aug = [row + (b,) for row, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    for row in reduced:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    x = [Fraction(0)] * n_cols
    for r, pcol in enumerate(pivots):
        if pcol == n_cols:
            return None
        x[pcol] = reduced[r][-1]
    return tuple(x)


def dot(u, v) -> Fraction:
    return sum((fr(x) * fr(y) for x, y in zip(u, v)), Fraction(0))


def subspace_intersection(bases, dim: int) -> tuple[Row, ...]:
    """Basis of the intersection of the spans of the given bases in Q^dim.

    Pairwise fold: span(U) & span(V) is recovered from the nullspace of the
    system sum a_i u_i - sum b_j v_j = 0.
    """
    spaces = [row_basis(b) if b else () for b in bases]
    if not spaces:
        return tuple(identity(dim))
    current = spaces[0]
    for other in spaces[1:]:
        if not current or not other:
            current = ()
            break
        cols = len(current) + len(other)
        system = []
        for coord in range(dim):
            system.append(
                tuple(u[coord] for u in current)
                + tuple(-v[coord] for v in other)
            )
        combos = nullspace(system, cols)
        vectors = []
        for combo in combos:
            vec = tuple(
                sum((combo[i] * current[i][coord] for i in range(len(current))),
                    Fraction(0))
                for coord in range(dim)
            )
            vectors.append(vec)
        current = row_basis(vectors)
    return current


def _pivot_loop(tab, basis, obj, n_enterable, improving):
    """Bland-rule pivoting on tableau rows with one objective row.

    Entering column: smallest nonbasic j < n_enterable with improving
    obj[j]; leaving row: lexicographic ratio test.  Returns "optimal" or
    "unbounded".  All rows (including obj) end with the rhs entry.
    """
    m = len(tab)
    while True:
        enter = None
        for j in range(n_enterable):
            if j not in basis and improving(obj[j]):
                enter = j
                break
        if enter is None:
            return "optimal"
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or \
                        (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _, prow = best
        pivot = tab[prow][enter]
        tab[prow] = [x / pivot for x in tab[prow]]
        for i in range(m):
            if i != prow and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[prow])]
        if obj[enter] != 0:
            f = obj[enter]
            obj[:] = [x - f * y for x, y in zip(obj, tab[prow])]
        basis[prow] = enter


def _simplex_min(rows, rhs, cost):
    """Minimize cost . x over {x >= 0 : rows x = rhs}, everything exact.

    Returns (status, value) with status in {"ok", "infeasible", "unbounded"}.
    """
    m = len(rows)
    n = len(cost)
    tab = []
    for row, b in zip(rows, rhs):
        line = [fr(x) for x in row] + [fr(b)]
        if line[-1] < 0:
            line = [-x for x in line]
        tab.append(line)
    # append artificial columns
    for i in range(m):
        for r in range(m):
            tab[r].insert(n + i, Fraction(1 if r == i else 0))
    width = n + m
    basis = [n + i for i in range(m)]
    # phase 1: w = sum of artificials, expressed over nonbasic columns
    wrow = [sum(tab[i][j] for i in range(m)) for j in range(width + 1)]
    for i in range(m):
        wrow[n + i] = Fraction(0)
    _pivot_loop(tab, basis, wrow, n, lambda v: v > 0)
    if wrow[-1] != 0:
        return ("infeasible", None)
    # pivot lingering artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            enter = next((j for j in range(n) if tab[i][j] != 0), None)
            if enter is None:
                continue  # redundant constraint row
            pivot = tab[i][enter]
            tab[i] = [x / pivot for x in tab[i]]
            for r in range(m):
                if r != i and tab[r][enter] != 0:
                    f = tab[r][enter]
                    tab[r] = [x - f * y for x, y in zip(tab[r], tab[i])]
            basis[i] = enter
    # phase 2 reduced costs, priced against the current basis
    crow = [fr(c) for c in cost] + [Fraction(0)] * m + [Fraction(0)]
    for i in range(m):
        if basis[i] < n and crow[basis[i]] != 0:
            f = crow[basis[i]]
            crow = [x - f * y for x, y in zip(crow, tab[i])]
    status = _pivot_loop(tab, basis, crow, n, lambda v: v < 0)
    if status == "unbounded":
        return ("unbounded", None)
    return ("ok", -crow[-1])


def cone_feasible(columns, target) -> bool:
    """Exact test for target in cone(columns): any y >= 0 with sum y_j c_j
    equal to the target vector."""
    if not columns:
        return all(fr(t) == 0 for t in target)
    m = len(target)
    rows = [[fr(col[i]) for col in columns] for i in range(m)]
    status, _ = _simplex_min(rows, list(target), [Fraction(0)] * len(columns))
    return status == "ok"


def lp_extremum(constraints, bounds_rhs, objective, maximize: bool):
    """Exact min/max of objective . z over {z : C z <= e} with z free-signed.

    Returns ("ok", value), ("infeasible", None), or ("unbounded", None).
    Free variables are split z = u - v with u, v >= 0; slacks close the
    inequalities.
    """
    d = len(objective)
    m = len(constraints)
    rows = []
    for i in range(m):
        row = [fr(x) for x in constraints[i]]
        rows.append(row + [-x for x in row]
                    + [Fraction(1 if j == i else 0) for j in range(m)])
    cost = [fr(x) for x in objective]
    if maximize:
        cost = [-x for x in cost]
    cost_full = cost + [-x for x in cost] + [Fraction(0)] * m
    status, value = _simplex_min(rows, list(bounds_rhs), cost_full)
    if status != "ok":
        return (status, None)
    return ("ok", -value if maximize else value)


def integer_affine_solutions(matrix, rhs):
    """Integer solution set of A x = b as (particular x0, kernel columns).

    Processes one equation at a time: substitute the running
    parameterization x = x0 + N z, solve the induced single equation
    c . z = t by extended-gcd column reduction, and refine (x0, N).
    Returns None when no integer solution exists.
    """
    n = len(matrix[0]) if matrix else 0
    x0 = [0] * n
    kernel = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    for row, target in zip(matrix, rhs):
        coeffs = [sum(row[i] * col[i] for i in range(n)) for col in kernel]
        t = int(target) - sum(row[i] * x0[i] for i in range(n))
        if not kernel or all(c == 0 for c in coeffs):
            if t != 0:
                return None
            continue
        # column-reduce coeffs to (g, 0, ..., 0) tracking the moves
        cols = [list(col) for col in kernel]
        c = list(coeffs)
        while True:
            nz = [j for j in range(len(c)) if c[j] != 0]
            if len(nz) == 1:
                break
            j, k = nz[0], nz[1]
            a, b = c[j], c[k]
            g, x, y = _xgcd(a, b)
            bq, aq = b // g, a // g
            c[j], c[k] = a * x + b * y, 0
            for i in range(n):
                cj, ck = cols[j][i], cols[k][i]
                cols[j][i] = x * cj + y * ck
                cols[k][i] = -bq * cj + aq * ck
        j = next(j for j in range(len(c)) if c[j] != 0)
        g = c[j]
        if t % g != 0:
            return None
        q = t // g
        for i in range(n):
            x0[i] += q * cols[j][i]
        kernel = [tuple(cols[k]) for k in range(len(cols)) if k != j]
    return tuple(x0), tuple(kernel)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def primitive_integer(vec) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with positive leading entry."""
    vec = [fr(x) for x in vec]
    denom = 1
    for x in vec:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)
