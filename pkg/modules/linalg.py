"""
Exact linear algebra over Q, F_p and Z/p^k.

Matrices are lists of rows. Elimination is plain Gaussian elimination over
Python integers and Fractions; pivots are chosen deterministically.
"""
from fractions import Fraction
from typing import List, Optional, Sequence

from modules.errors import SingularSystem


def solve_rational(A: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    """Unique solution of a square system over Q"""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"rational system of size {n} is singular at column {col}")
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def inverse_rational(A: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"matrix of size {n} is not invertible")
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[col])]
    return [row[n:] for row in M]


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    M = [[v % p for v in row] for row in rows if any(v % p for v in row)]
    if not M:
        return 0
    width = len(M[0])
    rank = 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = pow(M[rank][col], -1, p)
        M[rank] = [(v * inv) % p for v in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                factor = M[r][col]
                M[r] = [(a - factor * c) % p for a, c in zip(M[r], M[rank])]
        rank += 1
        if rank == len(M):
            break
    return rank


def _vp(value: int, p: int, cap: int) -> int:
    if value == 0:
        return cap
    v = 0
    while value % p == 0 and v < cap:
        value //= p
        v += 1
    return v


def solve_mod_prime_power(
    A: Sequence[Sequence[int]],
    b: Sequence[int],
    p: int,
    k: int,
    column_order: Optional[Sequence[int]] = None,
) -> Optional[List[int]]:
    """One solution of A x = b over Z/p^k, or None when the system is inconsistent.

    Pivots take the entry of least p-adic valuation in the remaining block; ties
    follow column_order, then row index. Free variables are set to zero.
    """
    modulus = p ** k
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[v % modulus for v in row] + [b[i] % modulus] for i, row in enumerate(A)]
    rank_of = {c: i for i, c in enumerate(column_order if column_order is not None else range(cols))}
    free_cols = set(range(cols))
    pivots = []
    r = 0
    while r < rows and free_cols:
        best = None
        for c in free_cols:
            for i in range(r, rows):
                if M[i][c]:
                    cand = (_vp(M[i][c], p, k), rank_of[c], i, c)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        v, _, i, c = best
        M[r], M[i] = M[i], M[r]
        unit = (M[r][c] // p ** v) % modulus
        unit_inv = pow(unit, -1, modulus)
        for j in range(r + 1, rows):
            if M[j][c]:
                factor = (M[j][c] // p ** v) * unit_inv % modulus
                M[j] = [(a - factor * s) % modulus for a, s in zip(M[j], M[r])]
        pivots.append((r, c, v, unit_inv))
        free_cols.discard(c)
        r += 1
    for j in range(r, rows):
        if M[j][cols] % modulus:
            return None
    x = [0] * cols
    for row, c, v, unit_inv in reversed(pivots):
        rest = M[row][cols] - sum(M[row][j] * x[j] for j in range(cols) if j != c)
        rest %= modulus
        if rest % p ** v:
            return None
        x[c] = (rest // p ** v) * unit_inv % p ** (k - v)
    return x


def solve_mod_p(A: Sequence[Sequence[int]], b: Sequence[int], p: int) -> List[int]:
    """Unique solution of a square system over F_p"""
    x = solve_mod_prime_power(A, b, p, 1)
    n = len(A)
    if x is None or rank_mod_p(A, p) != n:
        raise SingularSystem(f"system of size {n} is singular mod {p}")
    return x


def solve_rational_consistent(A: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    """Unique solution of an overdetermined but consistent system over Q"""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    pivot_row = 0
    for col in range(cols):
        pivot = next((r for r in range(pivot_row, rows) if M[r][col] != 0), None)
        if pivot is None:
            raise SingularSystem(f"column {col} is not determined by the system")
        M[pivot_row], M[pivot] = M[pivot], M[pivot_row]
        inv = 1 / M[pivot_row][col]
        M[pivot_row] = [v * inv for v in M[pivot_row]]
        for r in range(rows):
            if r != pivot_row and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[pivot_row])]
        pivot_row += 1
    for r in range(pivot_row, rows):
        if M[r][cols] != 0:
            raise SingularSystem("inconsistent rational system")
    return [M[i][cols] for i in range(cols)]


def solve_rational_any(A: Sequence[Sequence], b: Sequence) -> List[Fraction]:
    """Some solution of a consistent system over Q, free unknowns set to zero"""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    pivots = []
    pivot_row = 0
    for col in range(cols):
        pivot = next((r for r in range(pivot_row, rows) if M[r][col] != 0), None)
        if pivot is None:
            continue
        M[pivot_row], M[pivot] = M[pivot], M[pivot_row]
        inv = 1 / M[pivot_row][col]
        M[pivot_row] = [v * inv for v in M[pivot_row]]
        for r in range(rows):
            if r != pivot_row and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * c for a, c in zip(M[r], M[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    for r in range(pivot_row, rows):
        if M[r][cols] != 0:
            raise SingularSystem("inconsistent rational system")
    solution = [Fraction(0)] * cols
    for r, col in enumerate(pivots):
        solution[col] = M[r][cols]
    return solution
