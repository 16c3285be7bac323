"""Hot loops, each in a numba and a vectorized-numpy flavour.

Every kernel consumes uniforms that the caller has already drawn, so both
flavours see identical inputs and are written to perform the same floating
point operations in the same order. Their outputs are bit-identical; the
test suite checks this. The unsuffixed names dispatch on
``crpstick._accel.USE_NUMBA``.
"""

import numpy as np

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# canonical restricted-growth strings for batches of labelings


@njit
def rgs_rows_numba(z):
    R, n = z.shape
    out = np.zeros((R, n), dtype=np.int64)
    for r in range(R):
        nb = 1
        for i in range(1, n):
            found = -1
            for j in range(i):
                if z[r, j] == z[r, i]:
                    found = j
                    break
            if found >= 0:
                out[r, i] = out[r, found]
            else:
                out[r, i] = nb
                nb += 1
    return out


def rgs_rows_numpy(z):
    z = np.asarray(z)
    R, n = z.shape
    out = np.zeros((R, n), dtype=np.int64)
    nb = np.ones(R, dtype=np.int64)
    rows = np.arange(R)
    for i in range(1, n):
        eq = z[:, :i] == z[:, i : i + 1]
        has = eq.any(axis=1)
        first = eq.argmax(axis=1)
        out[:, i] = np.where(has, out[rows, first], nb)
        nb += ~has
    return out


# ---------------------------------------------------------------------------
# Chinese restaurant process


@njit
def crp_tables_numba(u, alpha):
    R, m = u.shape
    n = m + 1
    out = np.zeros((R, n), dtype=np.int64)
    for r in range(R):
        ntab = 1
        for i in range(1, n):
            x = u[r, i - 1] * (i + alpha)
            if x >= i:
                out[r, i] = ntab
                ntab += 1
            else:
                # uniform earlier customer => table chosen proportional to size
                out[r, i] = out[r, int(x)]
    return out


def crp_tables_numpy(u, alpha):
    u = np.asarray(u, dtype=np.float64)
    R, m = u.shape
    n = m + 1
    out = np.zeros((R, n), dtype=np.int64)
    ntab = np.ones(R, dtype=np.int64)
    rows = np.arange(R)
    for i in range(1, n):
        x = u[:, i - 1] * (i + alpha)
        new = x >= i
        prev = np.minimum(x.astype(np.int64), i - 1)
        out[:, i] = np.where(new, ntab, out[rows, prev])
        ntab += new
    return out


# ---------------------------------------------------------------------------
# two-colour Polya urn (membership of table 1)


@njit
def polya_paths_numba(u, alpha):
    R, m = u.shape
    n = m + 1
    out = np.zeros((R, n), dtype=np.uint8)
    for r in range(R):
        out[r, 0] = 1
        s = 1
        for i in range(1, n):
            if u[r, i - 1] * (alpha + i) < s:
                out[r, i] = 1
                s += 1
    return out


def polya_paths_numpy(u, alpha):
    u = np.asarray(u, dtype=np.float64)
    R, m = u.shape
    n = m + 1
    out = np.zeros((R, n), dtype=np.uint8)
    out[:, 0] = 1
    s = np.ones(R, dtype=np.int64)
    for i in range(1, n):
        y = u[:, i - 1] * (alpha + i) < s
        out[:, i] = y
        s += y
    return out


@njit
def polya_successes_numba(u, alpha):
    R, m = u.shape
    out = np.ones(R, dtype=np.int64)
    for r in range(R):
        s = 1
        for i in range(1, m + 1):
            if u[r, i - 1] * (alpha + i) < s:
                s += 1
        out[r] = s
    return out


def polya_successes_numpy(u, alpha):
    u = np.asarray(u, dtype=np.float64)
    R, m = u.shape
    s = np.ones(R, dtype=np.int64)
    for i in range(1, m + 1):
        s += u[:, i - 1] * (alpha + i) < s
    return s


# ---------------------------------------------------------------------------
# size-biased permutations (draws without replacement, weight = size)


@njit
def size_biased_perms_numba(u, sizes):
    R, m = u.shape
    t = sizes.shape[0]
    out = np.zeros((R, t), dtype=np.int64)
    rem = np.empty(t, dtype=np.int64)
    for r in range(R):
        total = 0
        for k in range(t):
            rem[k] = sizes[k]
            total += sizes[k]
        for j in range(t - 1):
            x = u[r, j] * total
            acc = 0
            pick = t - 1
            for k in range(t):
                acc += rem[k]
                if x < acc:
                    pick = k
                    break
            out[r, j] = pick
            total -= rem[pick]
            rem[pick] = 0
        for k in range(t):
            if rem[k] > 0:
                out[r, t - 1] = k
    return out


def size_biased_perms_numpy(u, sizes):
    u = np.asarray(u, dtype=np.float64)
    sizes = np.asarray(sizes, dtype=np.int64)
    R, m = u.shape
    t = sizes.shape[0]
    out = np.zeros((R, t), dtype=np.int64)
    rem = np.tile(sizes, (R, 1))
    rows = np.arange(R)
    for j in range(t - 1):
        cum = np.cumsum(rem, axis=1)
        x = u[:, j] * cum[:, -1]
        pick = (cum <= x[:, None]).sum(axis=1)
        out[:, j] = pick
        rem[rows, pick] = 0
    if t > 0:
        out[:, t - 1] = (rem > 0).argmax(axis=1)
    return out


# ---------------------------------------------------------------------------
# lazy stick-breaking labels over a finite pool of pre-drawn sticks


@njit
def stick_labels_numba(w, v):
    """Label k (1-based) is the smallest k with residual_k < w.

    ``w`` lies in (0, 1]; 0 in the output means the draw fell beyond the
    pool of ``v.shape[1]`` sticks and must be resolved by the caller.
    """
    R, n = w.shape
    L = v.shape[1]
    out = np.zeros((R, n), dtype=np.int64)
    res = np.empty(L, dtype=np.float64)
    for r in range(R):
        acc = 1.0
        for k in range(L):
            acc = acc * (1.0 - v[r, k])
            res[k] = acc
        for i in range(n):
            for k in range(L):
                if res[k] < w[r, i]:
                    out[r, i] = k + 1
                    break
    return out


def stick_labels_numpy(w, v):
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    L = v.shape[1]
    res = np.cumprod(1.0 - v, axis=1)
    cnt = (res[:, None, :] >= w[:, :, None]).sum(axis=2)
    return np.where(cnt < L, cnt + 1, 0).astype(np.int64)


# ---------------------------------------------------------------------------
# exhaustive sums over labelings z in {1..K}^n


def _power_table(n, K, alpha):
    """``tab[g, d] = (alpha / (g + alpha)) ** d`` for g <= n, d <= K."""
    ratio = alpha / (np.arange(n + 1) + alpha)
    return ratio[:, None] ** np.arange(K + 1)[None, :]


@njit
def _labeling_table_numba(n, K, codes, tab):
    P = codes.shape[0]
    T = np.zeros((P, K), dtype=np.float64)
    z = np.ones(n, dtype=np.int64)
    srt = np.empty(n, dtype=np.int64)
    rgs = np.empty(n, dtype=np.int64)
    while True:
        nb = 1
        rgs[0] = 0
        code = 0
        for i in range(n):
            if i > 0:
                found = -1
                for j in range(i):
                    if z[j] == z[i]:
                        found = j
                        break
                if found >= 0:
                    rgs[i] = rgs[found]
                else:
                    rgs[i] = nb
                    nb += 1
            code = code * n + rgs[i]
        p = np.searchsorted(codes, code)
        # insertion sort; n is tiny
        for i in range(n):
            v = z[i]
            j = i - 1
            while j >= 0 and srt[j] > v:
                srt[j + 1] = srt[j]
                j -= 1
            srt[j + 1] = v
        # g_k is constant between consecutive order statistics
        prod = 1.0
        prev = 0
        for j in range(n):
            gap = srt[j] - prev
            if gap > 0:
                prod *= tab[n - j, gap]
            prev = srt[j]
        T[p, srt[n - 1] - 1] += prod
        i = n - 1
        while i >= 0 and z[i] == K:
            z[i] = 1
            i -= 1
        if i < 0:
            break
        z[i] += 1
    return T


def labeling_table_numba(n, K, alpha, codes):
    """``T[p, m-1]`` = sum over z in [K]^n with C_z = partition p and max(z) = m
    of prod_{k<=m} alpha / (g_k(z) + alpha)."""
    return _labeling_table_numba(n, K, codes, _power_table(n, K, alpha))


def _labeling_chunk(n, K, codes, tab, lead):
    grids = np.indices((K,) * (n - len(lead)), dtype=np.int64).reshape(n - len(lead), -1).T + 1
    z = np.empty((grids.shape[0], n), dtype=np.int64)
    z[:, : len(lead)] = lead
    z[:, len(lead) :] = grids
    rgs = rgs_rows_numpy(z)
    code = np.zeros(z.shape[0], dtype=np.int64)
    for i in range(n):
        code = code * n + rgs[:, i]
    p = np.searchsorted(codes, code)
    srt = np.sort(z, axis=1)
    gaps = np.diff(srt, axis=1, prepend=0)
    prod = np.ones(z.shape[0])
    for j in range(n):
        prod = np.where(gaps[:, j] > 0, prod * tab[n - j, gaps[:, j]], prod)
    return p, srt[:, -1], prod


def labeling_table_numpy(n, K, alpha, codes):
    P = codes.shape[0]
    tab = _power_table(n, K, alpha)
    T = np.zeros((P, K), dtype=np.float64)
    # fix leading coordinates so each chunk holds at most ~2**20 rows
    free = 1
    while free < n and K ** (free + 1) <= 1 << 20:
        free += 1
    for lead in np.ndindex(*((K,) * (n - free))):
        p, m, prod = _labeling_chunk(n, K, codes, tab, np.array(lead, dtype=np.int64) + 1)
        T += np.bincount(p * K + (m - 1), weights=prod, minlength=P * K).reshape(P, K)
    return T


# ---------------------------------------------------------------------------
# dispatch


def _pick(name):
    def call(*args):
        impl = globals()[name + ("_numba" if _accel.USE_NUMBA else "_numpy")]
        return impl(*args)

    call.__name__ = name
    return call


rgs_rows = _pick("rgs_rows")
crp_tables = _pick("crp_tables")
polya_paths = _pick("polya_paths")
polya_successes = _pick("polya_successes")
size_biased_perms = _pick("size_biased_perms")
stick_labels = _pick("stick_labels")
labeling_table = _pick("labeling_table")

KERNELS = (
    "rgs_rows",
    "crp_tables",
    "polya_paths",
    "polya_successes",
    "size_biased_perms",
    "stick_labels",
    "labeling_table",
)
