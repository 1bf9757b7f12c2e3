"""Dense complex tensor-algebra primitives.

Every operator in the package is a plain square ``numpy.ndarray`` of dtype
``complex128``. Tensor products follow the usual Kronecker ordering: the
basis vector ``|i> (x) |j>`` of ``C^d (x) C^d`` (1-based labels) sits at
row/column ``d*(i-1) + j``, so 9x9 matrices printed here line up with the
explicit displays of the R-matrix entry for entry.
"""

from __future__ import annotations

import functools

import numpy as np

from .exceptions import DimensionError

__all__ = [
    "as_matrix",
    "kron",
    "partial_transpose",
    "permutation_operator",
    "swap_21",
    "elementary",
    "embed_pair",
    "embed_factors",
    "trace_over_aux",
    "is_scalar_multiple",
    "commutator_norm",
    "relative_residual",
    "matrix_to_json",
    "matrix_from_json",
]


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite square complex matrix, raising on anything else."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("matrix has non-finite entries")
    return a


def kron(*factors) -> np.ndarray:
    """Kronecker product of any number of square matrices, left to right."""
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def _factor_dim(m: np.ndarray, d: int) -> int:
    if m.shape[0] != d * d:
        raise DimensionError(f"matrix of dim {m.shape[0]} is not on C^{d} (x) C^{d}")
    return d


def partial_transpose(m, space: int, d: int = 3) -> np.ndarray:
    """Transpose on tensor factor ``space`` (1 or 2) of ``C^d (x) C^d``.

    ``(M^{t1})_{(i,j),(k,l)} = M_{(k,j),(i,l)}`` and analogously for ``t2``.
    """
    m = as_matrix(m)
    _factor_dim(m, d)
    t = m.reshape(d, d, d, d)
    if space == 1:
        t = t.transpose(2, 1, 0, 3)
    elif space == 2:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise DimensionError(f"space must be 1 or 2, got {space}")
    return t.reshape(d * d, d * d).copy()


@functools.lru_cache(maxsize=None)
def _permutation(d: int) -> np.ndarray:
    p = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            p[j * d + i, i * d + j] = 1.0
    p.flags.writeable = False
    return p


def permutation_operator(d: int = 3) -> np.ndarray:
    """The swap ``P(v (x) w) = w (x) v`` on ``C^d (x) C^d``."""
    if d < 1:
        raise DimensionError("d must be positive")
    return _permutation(d).copy()


def swap_21(m, d: int = 3) -> np.ndarray:
    """Return ``M_21 = P M_12 P``."""
    m = as_matrix(m)
    _factor_dim(m, d)
    p = _permutation(d)
    return p @ m @ p


def elementary(i: int, j: int, d: int = 3) -> np.ndarray:
    """Matrix unit ``E^i_j`` with 1-based row ``i`` and column ``j``."""
    e = np.zeros((d, d), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return e


def embed_pair(m, site: int, n: int, d: int = 3) -> np.ndarray:
    """Place a two-site operator on sites ``site, site+1`` of an ``n``-site chain.

    Sites are 1-based; the result is ``I^{(site-1)} (x) M (x) I^{(n-site-1)}``.
    """
    m = as_matrix(m)
    _factor_dim(m, d)
    if not 1 <= site <= n - 1:
        raise DimensionError(f"site {site} out of range for a chain of {n} sites")
    eye = np.eye(d)
    return kron(*([eye] * (site - 1)), m, *([eye] * (n - site - 1)))


def embed_factors(m, factors, n: int, d: int = 3) -> np.ndarray:
    """Let ``m`` act on the given tensor factors (0-based, in order) of ``(C^d)^n``.

    ``m`` is interpreted on ``C^d (x) ... (x) C^d`` with ``len(factors)`` copies;
    the factors may be non-adjacent and in any order, e.g. ``(2, 0)`` realises
    ``M_{31}`` on three spaces.
    """
    m = as_matrix(m)
    factors = tuple(factors)
    k = len(factors)
    if m.shape[0] != d**k:
        raise DimensionError(f"operator of dim {m.shape[0]} does not act on {k} factors of dim {d}")
    if len(set(factors)) != k or not all(0 <= f < n for f in factors):
        raise DimensionError(f"bad factor list {factors} for {n} spaces")
    rest = [f for f in range(n) if f not in factors]
    full = np.kron(m, np.eye(d ** len(rest))).reshape((d,) * (2 * n))
    # axis q of `full` currently holds factor order[q]; move it to position order[q]
    order = list(factors) + rest
    inv = np.argsort(order)
    axes = list(inv) + [n + q for q in inv]
    return full.transpose(axes).reshape(d**n, d**n)


def trace_over_aux(m, d: int = 3) -> np.ndarray:
    """Partial trace over the first (auxiliary) tensor factor of dimension ``d``."""
    m = as_matrix(m)
    if m.shape[0] % d:
        raise DimensionError(f"dim {m.shape[0]} is not a multiple of the auxiliary dim {d}")
    w = m.shape[0] // d
    return np.einsum("ajak->jk", m.reshape(d, w, d, w))


def is_scalar_multiple(m, tol: float = 1e-10):
    """Test whether ``m`` is proportional to the identity.

    Returns ``(flag, scalar)``; ``scalar`` is the mean of the diagonal when the
    flag is set and ``None`` otherwise. The test is relative:
    ``||M - M_11 I||_F <= tol * max(1, ||M||_F)``.
    """
    m = as_matrix(m)
    eye = np.eye(m.shape[0])
    dev = np.linalg.norm(m - m[0, 0] * eye)
    if dev <= tol * max(1.0, np.linalg.norm(m)):
        return True, complex(np.mean(np.diag(m)))
    return False, None


def commutator_norm(a, b) -> float:
    """Frobenius norm of ``AB - BA``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a @ b - b @ a))


def relative_residual(lhs, rhs) -> float:
    """``||L - R||_F / max(1, ||L||_F, ||R||_F)``; plain norm for O(1) operands."""
    scale = max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return float(np.linalg.norm(lhs - rhs)) / scale


def matrix_to_json(m) -> dict:
    """Encode as ``{"dim": n, "entries": [[re, im], ...]}`` in row-major order."""
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(v.real), float(v.imag)] for v in m.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        flat = np.array([complex(re, im) for re, im in obj["entries"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix JSON: {exc}") from None
    if n < 1 or flat.size != n * n:
        raise DimensionError(f"expected {n * n} entries, got {flat.size}")
    return as_matrix(flat.reshape(n, n))
