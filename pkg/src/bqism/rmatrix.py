"""The spectral-parameter dependent R-matrix with D(D3) symmetry.

``R(z)`` is a 9x9 matrix on ``C^3 (x) C^3`` whose non-trivial entries are the
three rational functions

    a(z) = z(z-1)/(z^2-z+1),  b(z) = z/(z^2-z+1),  c(z) = (1-z)/(z^2-z+1),

with ``a + b + c = 1``. It is regular (``R(1) = P``), satisfies the Yang-Baxter
equation and unitarity ``R_12(z) R_21(1/z) = f(z) I`` (numerically ``f = 1``),
but not crossing unitarity. The dual matrix ``curly_r`` stands in for the
crossed R-matrix in the ``K+`` reflection equation.
"""

from __future__ import annotations

import numpy as np

from .exceptions import PoleError, SingularMatrixError
from .tensor import (
    as_matrix,
    embed_factors,
    is_scalar_multiple,
    kron,
    partial_transpose,
    permutation_operator,
    swap_21,
)

__all__ = [
    "EPS_POLE",
    "R_POLES",
    "CURLY_R_POLES",
    "check_spectral",
    "r_matrix",
    "r_matrix_deriv",
    "curly_r",
    "r_check",
    "unitarity_scalar",
    "ybe_residual",
    "crossing_unitarity_residual",
    "crossing_candidates",
    "crossing_search",
    "sample_spectral",
    "admissible",
]

EPS_POLE = 1e-6

_W = np.exp(2j * np.pi / 3)
# zeros of z^2 - z + 1
R_POLES = (np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3))
# zeros of (z - 1)(z^3 - 1)
CURLY_R_POLES = (1.0 + 0j, _W, _W**2)

# (row, col) -> entry function, 0-based, read off the 9x9 display
_A, _B, _C = 0, 1, 2
_PATTERN = {
    (1, 2): _A, (1, 3): _B, (1, 7): _C,
    (2, 1): _A, (2, 5): _C, (2, 6): _B,
    (3, 1): _B, (3, 5): _A, (3, 6): _C,
    (5, 2): _C, (5, 3): _A, (5, 7): _B,
    (6, 2): _B, (6, 3): _C, (6, 7): _A,
    (7, 1): _C, (7, 5): _B, (7, 6): _A,
}  # fmt: skip
_DIAG = (0, 4, 8)

# curly R closed form: (row, col) -> (coefficient of 1, of z, of z^2)
_CURLY_PATTERN = {
    (0, 0): (1, 0, 1), (0, 4): (0, 1, 0), (0, 8): (0, 1, 0),
    (1, 2): (1, 0, 0), (1, 3): (0, -1, 0), (1, 7): (0, 0, 1),
    (2, 1): (1, 0, 0), (2, 5): (0, 0, 1), (2, 6): (0, -1, 0),
    (3, 1): (0, -1, 0), (3, 5): (1, 0, 0), (3, 6): (0, 0, 1),
    (4, 0): (0, 1, 0), (4, 4): (1, 0, 1), (4, 8): (0, 1, 0),
    (5, 2): (0, 0, 1), (5, 3): (1, 0, 0), (5, 7): (0, -1, 0),
    (6, 2): (0, -1, 0), (6, 3): (0, 0, 1), (6, 7): (1, 0, 0),
    (7, 1): (0, 0, 1), (7, 5): (0, -1, 0), (7, 6): (1, 0, 0),
    (8, 0): (0, 1, 0), (8, 4): (0, 1, 0), (8, 8): (1, 0, 1),
}  # fmt: skip


def check_spectral(z, curly: bool = False, eps: float = EPS_POLE) -> complex:
    """Validate a spectral parameter and return it as a Python complex.

    For ``R`` the guard is ``|z^2 - z + 1| > eps``; for the dual matrix also
    ``|z - 1| > eps`` and ``|z^3 - 1| > eps``.
    """
    z = complex(z)
    if not np.isfinite(z):
        raise PoleError(f"spectral parameter {z} is not finite")
    if abs(z * z - z + 1) <= eps:
        raise PoleError(f"z = {z} is within {eps:g} of a pole of R(z)")
    if curly and (abs(z - 1) <= eps or abs(z**3 - 1) <= eps):
        raise PoleError(f"z = {z} is within {eps:g} of a pole of the dual R-matrix")
    return z


def _fill(funcs) -> np.ndarray:
    m = np.zeros((9, 9), dtype=complex)
    for (r, c), k in _PATTERN.items():
        m[r, c] = funcs[k]
    return m


def r_matrix(z, eps: float = EPS_POLE) -> np.ndarray:
    z = check_spectral(z, eps=eps)
    den = z * z - z + 1
    m = _fill((z * (z - 1) / den, z / den, (1 - z) / den))
    m[_DIAG, _DIAG] = 1.0
    return m


def r_matrix_deriv(z, eps: float = EPS_POLE) -> np.ndarray:
    """Entrywise derivative ``dR/dz``.

    a' = (2z-1)/D^2, b' = (1-z^2)/D^2, c' = z(z-2)/D^2 with D = z^2-z+1.
    """
    z = check_spectral(z, eps=eps)
    d2 = (z * z - z + 1) ** 2
    return _fill(((2 * z - 1) / d2, (1 - z * z) / d2, z * (z - 2) / d2))


def r_check(z, eps: float = EPS_POLE) -> np.ndarray:
    """``Ř(z) = P R(z)``."""
    return permutation_operator(3) @ r_matrix(z, eps)


def curly_r(z, mode: str = "closed_form", eps: float = EPS_POLE) -> np.ndarray:
    """Dual R-matrix ``[(R_21^{t1}(z))^{-1}]^{t1}``.

    ``mode="closed_form"`` evaluates the explicit rational matrix with prefactor
    ``(z^2-z+1)/((z-1)(z^3-1))``; ``mode="from_definition"`` inverts the
    partial transpose numerically and is kept as the cross-check.
    """
    z = check_spectral(z, curly=True, eps=eps)
    if mode == "closed_form":
        pre = (z * z - z + 1) / ((z - 1) * (z**3 - 1))
        m = np.zeros((9, 9), dtype=complex)
        for (r, c), (c0, c1, c2) in _CURLY_PATTERN.items():
            m[r, c] = c0 + c1 * z + c2 * z * z
        return pre * m
    if mode == "from_definition":
        rt = partial_transpose(swap_21(r_matrix(z, eps)), 1)
        if np.linalg.cond(rt) > 1e12:
            raise SingularMatrixError(f"R_21^t1({z}) is numerically singular")
        return partial_transpose(np.linalg.inv(rt), 1)
    raise ValueError(f"unknown mode {mode!r}")


def unitarity_scalar(z, tol: float = 1e-10) -> complex:
    """Return ``f(z)`` with ``R_12(z) R_21(1/z) = f(z) I``."""
    z = check_spectral(z)
    prod = r_matrix(z) @ swap_21(r_matrix(check_spectral(1 / z)))
    flag, f = is_scalar_multiple(prod, tol)
    if not flag:
        raise ArithmeticError(f"R(z)R_21(1/z) is not scalar at z = {z}")
    return f


def _r_on(z, i, j, n=3) -> np.ndarray:
    """R_{ij}(z) on n copies of C^3 (factors 1-based)."""
    return embed_factors(r_matrix(z), (i - 1, j - 1), n)


def ybe_residual(x, y) -> float:
    """Residual of ``R12(x/y) R13(x) R23(y) = R23(y) R13(x) R12(x/y)``."""
    x, y = check_spectral(x), check_spectral(y)
    r12, r13, r23 = _r_on(x / y, 1, 2), _r_on(x, 1, 3), _r_on(y, 2, 3)
    return float(np.linalg.norm(r12 @ r13 @ r23 - r23 @ r13 @ r12))


def crossing_unitarity_residual(m, lam, z) -> float:
    """Relative distance of ``R_12^{t1}(lam z) M_1 R_21^{t1}(1/z) M_1^{-1}`` from ``C * I``.

    The scalar is the least-squares fit ``tr(Q)/9``; the deviation is divided by
    ``||Q||_F``. Zero would mean crossing unitarity holds at this ``z``.
    """
    m = as_matrix(m)
    if m.shape != (3, 3):
        raise ValueError("M must be 3x3")
    if abs(np.linalg.det(m)) < 1e-12 * max(1.0, np.linalg.norm(m)) ** 3:
        raise SingularMatrixError("M is singular")
    lz = check_spectral(complex(lam) * complex(z))
    zi = check_spectral(1 / check_spectral(z))
    eye3 = np.eye(3)
    q = (
        partial_transpose(r_matrix(lz), 1)
        @ kron(m, eye3)
        @ partial_transpose(swap_21(r_matrix(zi)), 1)
        @ kron(np.linalg.inv(m), eye3)
    )
    s = np.trace(q) / 9
    return float(np.linalg.norm(q - s * np.eye(9)) / np.linalg.norm(q))


def crossing_candidates(rng: np.random.Generator, n_diag: int = 50, n_dense: int = 20, n_phase: int = 12):
    """The default (M, lambda) search grid.

    ``n_diag`` diagonal matrices ``diag(1, mu, nu)`` (mu on a real line offset
    into the complex plane, nu on a circle), ``n_dense`` random dense matrices
    and ``lambda`` on ``n_phase`` points of each of the circles ``|lambda| = 1, 2``.
    """
    mus = np.linspace(-2.0, 2.0, 5) + 0.1j
    nus = 1.5 * np.exp(2j * np.pi * np.arange(max(1, n_diag // 5)) / max(1, n_diag // 5))
    ms = [np.diag([1.0, mu, nu]) for mu in mus for nu in nus][:n_diag]
    ms += [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(n_dense)]
    lams = [r * np.exp(2j * np.pi * k / n_phase) for r in (1.0, 2.0) for k in range(n_phase)]
    return ms, lams


CROSSING_Z = (2.0, 0.5 + 0.7j, -1.3 + 0.4j)


def crossing_search(seed: int = 0, zs=CROSSING_Z, **grid):
    """Scan the candidate grid; return ``(min_residual, n_candidates, argmin)``.

    A candidate is scored by its worst residual over ``zs`` since crossing
    unitarity has to hold for every ``z``. Points where ``lambda * z`` hits a
    pole of ``R`` are skipped for that ``z``. This samples; it proves nothing.
    """
    rng = np.random.default_rng(seed)
    ms, lams = crossing_candidates(rng, **grid)
    best, arg, count = np.inf, None, 0
    for i, m in enumerate(ms):
        for lam in lams:
            vals = []
            for z in zs:
                if abs((lam * z) ** 2 - lam * z + 1) < 1e-3:
                    continue
                vals.append(crossing_unitarity_residual(m, lam, z))
            if not vals:
                continue
            count += 1
            score = max(vals)
            if score < best:
                best, arg = score, (i, complex(lam))
    return float(best), count, arg


_AVOID = (1.0, np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3), _W, _W**2)


def admissible(z, margin: float = 0.05) -> bool:
    """True if ``z`` is at least ``margin`` away from every pole of R and the dual R."""
    return all(abs(complex(z) - p) >= margin for p in _AVOID)


def sample_spectral(rng: np.random.Generator, rmin: float = 0.2, rmax: float = 5.0, margin: float = 0.05) -> complex:
    """Draw one spectral parameter: log-uniform modulus, uniform phase, rejection near poles."""
    while True:
        z = np.exp(rng.uniform(np.log(rmin), np.log(rmax)) + 1j * rng.uniform(0, 2 * np.pi))
        if admissible(z, margin):
            return complex(z)
