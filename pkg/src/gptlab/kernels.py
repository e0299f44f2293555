"""Hot numeric loops.

Each kernel has a loop form compiled with numba and a vectorised numpy
form.  ``gptlab._accel.USE_NUMBA`` picks which one the public names bind
to; both are importable under their ``_nb`` / ``_np`` suffixes so the
benchmark and the tests can compare them directly.
"""

from itertools import combinations

import numpy as np

from ._accel import USE_NUMBA, njit

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


# --------------------------------------------------------------------------
# Gaussian elimination with partial pivoting


def _gauss_solve_loop(A, b, tol):
    n = A.shape[0]
    M = A.copy()
    x = b.copy()
    scale = 0.0
    for i in range(n):
        for j in range(n):
            v = abs(M[i, j])
            if v > scale:
                scale = v
    if scale == 0.0:
        return False, x
    for k in range(n):
        p = k
        best = abs(M[k, k])
        for i in range(k + 1, n):
            v = abs(M[i, k])
            if v > best:
                best = v
                p = i
        if best <= tol * scale:
            return False, x
        if p != k:
            for j in range(n):
                t = M[k, j]
                M[k, j] = M[p, j]
                M[p, j] = t
            t = x[k]
            x[k] = x[p]
            x[p] = t
        for i in range(k + 1, n):
            f = M[i, k] / M[k, k]
            if f != 0.0:
                for j in range(k, n):
                    M[i, j] -= f * M[k, j]
                x[i] -= f * x[k]
    for k in range(n - 1, -1, -1):
        s = x[k]
        for j in range(k + 1, n):
            s -= M[k, j] * x[j]
        x[k] = s / M[k, k]
    return True, x


gauss_solve_nb = njit(_gauss_solve_loop)


def gauss_solve_np(A, b, tol):
    M = np.array(A, dtype=float)
    x = np.array(b, dtype=float)
    n = M.shape[0]
    scale = np.abs(M).max() if M.size else 0.0
    if scale == 0.0:
        return False, x
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) <= tol * scale:
            return False, x
        if p != k:
            M[[k, p]] = M[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = M[k + 1:, k] / M[k, k]
        M[k + 1:, k:] -= np.outer(f, M[k, k:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - M[k, k + 1:] @ x[k + 1:]) / M[k, k]
    return True, x


# --------------------------------------------------------------------------
# Simplex tableau iterations
#
# Tableau layout: rows 0..m-1 are constraints, row m holds reduced costs of a
# minimisation; the last column is the right-hand side.  ``n_enter`` limits
# the columns allowed to enter the basis.


def _simplex_loop(T, basis, n_enter, tol, max_iter, bland_after):
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    stall = 0
    for _ in range(max_iter):
        use_bland = stall >= bland_after
        col = -1
        best = -tol
        for j in range(n_enter):
            rc = T[m, j]
            if rc < best:
                col = j
                if use_bland:
                    break
                best = rc
        if col < 0:
            return OPTIMAL
        row = -1
        ratio = 0.0
        for i in range(m):
            a = T[i, col]
            if a > tol:
                r = T[i, rhs] / a
                if row < 0 or r < ratio - 1e-12 or (r <= ratio + 1e-12 and basis[i] < basis[row]):
                    row = i
                    ratio = r
        if row < 0:
            return UNBOUNDED
        if ratio <= 1e-12:
            stall += 1
        else:
            stall = 0
        piv = T[row, col]
        for j in range(T.shape[1]):
            T[row, j] /= piv
        for i in range(m + 1):
            if i != row:
                f = T[i, col]
                if f != 0.0:
                    for j in range(T.shape[1]):
                        T[i, j] -= f * T[row, j]
        basis[row] = col
    return ITERATION_LIMIT


simplex_loop_nb = njit(_simplex_loop)


def simplex_loop_np(T, basis, n_enter, tol, max_iter, bland_after):
    m = T.shape[0] - 1
    stall = 0
    for _ in range(max_iter):
        costs = T[m, :n_enter]
        neg = np.flatnonzero(costs < -tol)
        if neg.size == 0:
            return OPTIMAL
        col = int(neg[0]) if stall >= bland_after else int(np.argmin(costs))
        column = T[:m, col]
        ok = np.flatnonzero(column > tol)
        if ok.size == 0:
            return UNBOUNDED
        ratios = T[ok, -1] / column[ok]
        rmin = ratios.min()
        ties = ok[ratios <= rmin + 1e-12]
        row = int(ties[np.argmin(basis[ties])])
        stall = stall + 1 if rmin <= 1e-12 else 0
        T[row] /= T[row, col]
        f = T[:, col].copy()
        f[row] = 0.0
        T -= np.outer(f, T[row])
        basis[row] = col
    return ITERATION_LIMIT


# --------------------------------------------------------------------------
# Vertex enumeration of {x : E x = f, G x <= h}
#
# Every choice of (d - len(E)) rows of G is made active; nonsingular systems
# whose solution satisfies all inequalities are returned (duplicates kept).


def _enumerate_vertices_loop(G, h, E, f, tol):
    n, d = G.shape
    me = E.shape[0]
    k = d - me
    out = np.empty((0, d))
    if k < 0 or k > n:
        return out
    found = []
    idx = np.arange(k)
    A = np.empty((d, d))
    b = np.empty(d)
    for r in range(me):
        for j in range(d):
            A[k + r, j] = E[r, j]
        b[k + r] = f[r]
    while True:
        for r in range(k):
            for j in range(d):
                A[r, j] = G[idx[r], j]
            b[r] = h[idx[r]]
        ok, x = gauss_solve_nb(A, b, 1e-10)
        if ok:
            good = True
            for i in range(n):
                s = 0.0
                for j in range(d):
                    s += G[i, j] * x[j]
                if s > h[i] + tol:
                    good = False
                    break
            if good:
                found.append(x)
        # next combination in lexicographic order
        pos = k - 1
        while pos >= 0 and idx[pos] == n - k + pos:
            pos -= 1
        if pos < 0:
            break
        idx[pos] += 1
        for r in range(pos + 1, k):
            idx[r] = idx[r - 1] + 1
    out = np.empty((len(found), d))
    for i in range(len(found)):
        out[i] = found[i]
    return out


enumerate_vertices_nb = njit(_enumerate_vertices_loop)


def enumerate_vertices_np(G, h, E, f, tol, chunk=4096):
    n, d = G.shape
    me = E.shape[0]
    k = d - me
    if k < 0 or k > n:
        return np.empty((0, d))
    found = []
    combos = combinations(range(n), k)
    while k > 0 or not found:
        block = np.array([c for _, c in zip(range(chunk), combos)], dtype=np.intp).reshape(-1, k)
        if block.shape[0] == 0:
            break
        if k == 0:
            found.append(np.empty((0, d)))
        A = np.empty((block.shape[0], d, d))
        A[:, :k, :] = G[block]
        A[:, k:, :] = E
        b = np.empty((block.shape[0], d))
        b[:, :k] = h[block]
        b[:, k:] = f
        # singular systems are screened by the reciprocal condition number
        sv = np.linalg.svd(A, compute_uv=False)
        good = sv[:, -1] > 1e-10 * sv[:, 0]
        if not good.any():
            continue
        x = np.linalg.solve(A[good], b[good][..., None])[..., 0]
        feas = (x @ G.T <= h + tol).all(axis=1)
        found.append(x[feas])
    if not found:
        return np.empty((0, d))
    return np.vstack(found)


if USE_NUMBA:
    gauss_solve = gauss_solve_nb
    simplex_loop = simplex_loop_nb
    enumerate_vertices = enumerate_vertices_nb
else:
    gauss_solve = gauss_solve_np
    simplex_loop = simplex_loop_np
    enumerate_vertices = enumerate_vertices_np
