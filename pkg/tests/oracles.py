"""Reference computations that share no code with the package.

Unitriangular matrices are the model for U_n: E_pq has level q - p and
[E_pq, E_qr] = E_pr. An element with second-kind coordinates t is the
ordered product of (I + t_k E_k) over the basis.
"""

from fractions import Fraction
from itertools import product as cartesian
from math import comb


# -- dense exact matrices -------------------------------------------------


def eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m)), Fraction(0)) for j in range(k)] for i in range(n)]


def matadd(A, B, c=1):
    return [[a + c * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matinv_unipotent(M):
    # (I + N)^-1 = I - N + N^2 - ...
    n = len(M)
    N = matadd(M, eye(n), -1)
    out, power, sign = eye(n), eye(n), 1
    for _ in range(n):
        power = matmul(power, N)
        sign = -sign
        out = matadd(out, power, sign)
    return out


def matlog_unipotent(M):
    n = len(M)
    N = matadd(M, eye(n), -1)
    out = [[Fraction(0)] * n for _ in range(n)]
    power = eye(n)
    for k in range(1, n):
        power = matmul(power, N)
        out = matadd(out, power, Fraction((-1) ** (k + 1), k))
    return out


def matexp_nilpotent(X):
    n = len(X)
    out, power = eye(n), eye(n)
    fact = 1
    for k in range(1, n):
        power = matmul(power, X)
        fact *= k
        out = matadd(out, power, Fraction(1, fact))
    return out


def unitriangular_positions(n):
    """Basis entries (p, q), 0-based, sorted by level q - p then row."""
    return [(p, p + lvl) for lvl in range(1, n) for p in range(n - lvl)]


def coords_to_matrix(n, coords):
    M = eye(n)
    for (p, q), t in zip(unitriangular_positions(n), coords):
        step = eye(n)
        step[p][q] = Fraction(t)
        M = matmul(M, step)
    return M


def matrix_to_coords(n, M):
    """Peel (I + t E_pq) off the left in basis order."""
    M = [row[:] for row in M]
    out = []
    for p, q in unitriangular_positions(n):
        t = M[p][q]
        out.append(t)
        if t:
            step = eye(n)
            step[p][q] = -t
            M = matmul(step, M)
    return out


# -- Heisenberg in closed form -----------------------------------------------


def heisenberg_mul(s, t):
    return (s[0] + t[0], s[1] + t[1], s[2] + t[2] - s[1] * t[0])


# -- counting ---------------------------------------------------------------


def mobius(n):
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def witt(n, k):
    return sum(mobius(d) * n ** (k // d) for d in range(1, k + 1) if k % d == 0) // k


def weighted_count(weights, d):
    """Coefficients of prod 1/(1 - t^w), summed up to t^d."""
    series = [1] + [0] * d
    for w in weights:
        for k in range(w, d + 1):
            series[k] += series[k - w]
    return sum(series)


def betti_abelian(k):
    return [comb(k, n) for n in range(k + 1)]


def words(letters, length):
    return list(cartesian(letters, repeat=length))
