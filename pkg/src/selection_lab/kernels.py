"""Monte Carlo kernels for the regression ``y_i = beta * x_i + eps_i``.

Every replicate owns an independent counter-based stream: replicate ``r``
of seed ``s`` hashes ``(s, r)`` into a SplitMix64 key and draws its
uniforms as ``mix64(key + (j + 1) * GOLDEN)``.  A replicate's value is
therefore a pure function of ``(seed, r)``, so results do not depend on
chunking or on the number of worker threads.

Two implementations of the hot loop exist: a numba kernel (``nogil`` so
threads run in parallel) and a vectorised numpy fallback.  They draw the
same uniforms; the Gaussian transform and the summation order may differ
in the last ulp between them.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._accel import BACKEND, HAVE_NUMBA, njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_PI = 2.0 * np.pi
INV_2_53 = 1.0 / 9007199254740992.0

# numpy fallback keeps chunk matrices below this many elements
_NUMPY_CHUNK_ELEMS = 1 << 20


def _mix64_int(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def seed_key(seed):
    """Hash an integer seed into the 64-bit base key of its stream family."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    return _mix64_int(int(seed) ^ 0x5DEECE66D)


# ----------------------------------------------------------------------------
# numpy implementation


def _mix64_np(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def _replicate_keys_np(key, r0, r1):
    r = np.arange(r0, r1, dtype=np.uint64)
    return _mix64_np(np.uint64(key) + (r + np.uint64(1)) * np.uint64(GOLDEN))


def uniforms_numpy(key, r0, r1, count):
    """Uniforms in (0, 1], shape ``(r1 - r0, count)``."""
    keys = _replicate_keys_np(key, r0, r1)
    j = np.arange(1, count + 1, dtype=np.uint64)
    bits = _mix64_np(keys[:, None] + j[None, :] * np.uint64(GOLDEN))
    return ((bits >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * INV_2_53


def normals_numpy(key, r0, r1, n):
    npairs = (n + 1) // 2
    u = uniforms_numpy(key, r0, r1, 2 * npairs)
    rad = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    ang = TWO_PI * u[:, 1::2]
    z = np.empty((r1 - r0, 2 * npairs))
    z[:, 0::2] = rad * np.cos(ang)
    z[:, 1::2] = rad * np.sin(ang)
    return z[:, :n]


def sum_xy_numpy(xs, beta, key, r0, r1, out):
    n = xs.shape[0]
    step = max(1, _NUMPY_CHUNK_ELEMS // max(n, 1))
    for a in range(r0, r1, step):
        b = min(r1, a + step)
        terms = xs * (beta * xs + normals_numpy(key, a, b, n))
        # column-by-column accumulation: same order as the numba loop and
        # independent of how many rows share the chunk
        acc = np.zeros(b - a)
        for i in range(n):
            acc += terms[:, i]
        out[a - r0:b - r0] = acc


# ----------------------------------------------------------------------------
# numba implementation


@njit(cache=True, nogil=True)
def _mix64_nb(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def _uniform_nb(rkey, j):
    bits = _mix64_nb(rkey + (np.uint64(j) + np.uint64(1)) * np.uint64(GOLDEN))
    return np.float64((bits >> np.uint64(11)) + np.uint64(1)) * INV_2_53


@njit(cache=True, nogil=True)
def sum_xy_numba(xs, beta, key, r0, r1, out):
    n = xs.shape[0]
    ukey = np.uint64(key)
    for r in range(r0, r1):
        rkey = _mix64_nb(ukey + (np.uint64(r) + np.uint64(1)) * np.uint64(GOLDEN))
        acc = 0.0
        k = 0
        for i in range(0, n, 2):
            u1 = _uniform_nb(rkey, k)
            u2 = _uniform_nb(rkey, k + 1)
            k += 2
            rad = np.sqrt(-2.0 * np.log(u1))
            ang = TWO_PI * u2
            acc += xs[i] * (beta * xs[i] + rad * np.cos(ang))
            if i + 1 < n:
                acc += xs[i + 1] * (beta * xs[i + 1] + rad * np.sin(ang))
        out[r - r0] = acc


if not HAVE_NUMBA:
    sum_xy_numba = None  # noqa: F811


def _kernel(backend):
    backend = backend or BACKEND
    if backend == "numba":
        if sum_xy_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return sum_xy_numba
    if backend == "numpy":
        return sum_xy_numpy
    raise ValueError(f"unknown backend {backend!r}")


def simulate_sum_xy(xs, beta, replicates, seed, workers=1, backend=None):
    """Draw ``sum_i x_i y_i`` for ``replicates`` independent samples.

    Parameters
    ----------
    xs : array_like
        Design vector of length n.
    beta : float
        True slope used to generate ``y``.
    replicates : int
        Number of independent data sets.
    seed : int
        Stream seed; replicate ``r`` always receives the same noise.
    workers : int
        Threads sharing the replicate range.  The output does not depend on it.
    backend : {"numba", "numpy", None}
        Kernel choice; ``None`` picks the active default.

    Returns
    -------
    ndarray of shape (replicates,)
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a non-empty 1-d array")
    replicates = int(replicates)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    workers = max(1, int(workers))
    kern = _kernel(backend)
    key = np.uint64(seed_key(seed))
    out = np.empty(replicates)
    beta = float(beta)

    if workers == 1:
        kern(xs, beta, key, 0, replicates, out)
        return out

    bounds = np.linspace(0, replicates, workers + 1).astype(np.int64)

    def run(w):
        a, b = int(bounds[w]), int(bounds[w + 1])
        if b > a:
            kern(xs, beta, key, a, b, out[a:b])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(workers)))
    return out
