"""Reflection matrices K-(z), K+(z) and the reflection-equation checkers.

Two solution families are implemented, each dressed by cube roots of unity:

* ``k_minus``: unit diagonal, off-diagonal entries ``(1 - z^2)/(w^2 - a z - z^2)``
  times the dressing ``[[0, α, α²], [α²w², 0, αw], [αw², α²w, 0]]``.
  ``K-(1) = I``.
* ``k_plus``: diagonal ``1 + b z - w^j z^2``, off-diagonal ``1 - w^{2j} z^2``
  times ``[[0, β, β²], [w^{2j}β², 0, w^jβ], [w^{2j}β, w^jβ², 0]]``.

The sign of the coupling ``a`` in the K- denominator is fixed so that the
left boundary field is ``A = i/(1 - w^2 + a)`` times the dressing; every value
of ``a`` gives a solution, so this is only a choice of parameterisation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .exceptions import SpecError
from .rmatrix import check_spectral, curly_r, r_check, r_matrix
from .tensor import as_matrix, kron, relative_residual, swap_21

__all__ = [
    "W",
    "cube_root",
    "is_cube_root",
    "Identity",
    "KMinusParams",
    "KPlusParams",
    "BoundaryChoice",
    "minus_dressing",
    "plus_dressing",
    "k_minus_entries",
    "k_minus",
    "k_minus_deriv",
    "k_minus_limit",
    "k_plus",
    "k_plus_deriv",
    "boundary_matrix",
    "re_minus_residual",
    "re_plus_residual",
    "special_re_difference",
    "special_re_residual",
    "index_law_differences",
    "special_re_from_index_law",
    "KClass",
    "classify_k_at_z0",
    "three_diagonal_form",
    "one_diagonal_form",
    "parse_boundary",
    "boundary_to_json",
]

W = complex(np.exp(2j * np.pi / 3))
_EYE3 = np.eye(3)


def cube_root(power: int) -> complex:
    """``W**power`` with ``W = e^{2 pi i/3}``; exact 1 for power 0 mod 3."""
    return (1 + 0j, W, W.conjugate())[power % 3]


def is_cube_root(x, tol: float = 1e-12) -> bool:
    return abs(complex(x) ** 3 - 1) <= tol


def _check_primitive(w) -> complex:
    w = complex(w)
    if not is_cube_root(w) or abs(w - 1) < 1e-6:
        raise SpecError(f"w = {w} is not a primitive cube root of unity")
    return w


def _check_root(name: str, x) -> complex:
    x = complex(x)
    if not is_cube_root(x):
        raise SpecError(f"{name} = {x} is not a cube root of unity")
    return x


@dataclass(frozen=True)
class Identity:
    """Boundary without interaction: ``K(z) = I`` for all ``z``."""


@dataclass(frozen=True)
class KMinusParams:
    a: complex = 0j
    alpha: complex = 1 + 0j
    w: complex = W

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "alpha", _check_root("alpha", self.alpha))
        object.__setattr__(self, "w", _check_primitive(self.w))


@dataclass(frozen=True)
class KPlusParams:
    b: complex = 0j
    beta: complex = 1 + 0j
    j: int = 1
    w: complex = W

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "beta", _check_root("beta", self.beta))
        object.__setattr__(self, "w", _check_primitive(self.w))
        if self.j not in (1, 2):
            raise SpecError(f"j must be 1 or 2, got {self.j}")
        if abs(self.b - (self.w**self.j - 1)) < 1e-12:
            raise SpecError("trace of K+(1) vanishes: b = w^j - 1 is excluded")


BoundaryChoice = Union[Identity, KMinusParams, KPlusParams]
KFunc = Callable[[complex], np.ndarray]


def minus_dressing(alpha, w) -> np.ndarray:
    a, w = complex(alpha), complex(w)
    return np.array(
        [[0, a, a * a], [a * a * w * w, 0, a * w], [a * w * w, a * a * w, 0]],
        dtype=complex,
    )


def plus_dressing(beta, j, w) -> np.ndarray:
    b, wj, w2j = complex(beta), complex(w) ** j, complex(w) ** (2 * j)
    return np.array(
        [[0, b, b * b], [w2j * b * b, 0, wj * b], [w2j * b, wj * b * b, 0]],
        dtype=complex,
    )


def k_minus_entries(z, a, alpha, w) -> np.ndarray:
    """Unvalidated K- formula; accepts any ``w`` (used for the ``w = 1`` probe)."""
    z = complex(z)
    den = w * w - a * z - z * z
    if abs(den) < 1e-12:
        raise SpecError(f"K-(z) has a pole at z = {z}")
    return _EYE3 + (1 - z * z) / den * minus_dressing(alpha, w)


def k_minus(z, p: KMinusParams) -> np.ndarray:
    if complex(z) == 1:
        return _EYE3.astype(complex)
    return k_minus_entries(z, p.a, p.alpha, p.w)


def k_minus_deriv(z, p: KMinusParams) -> np.ndarray:
    """Closed-form ``dK-/dz``."""
    z = complex(z)
    w2 = p.w * p.w
    den = w2 - p.a * z - z * z
    if abs(den) < 1e-12:
        raise SpecError(f"K-(z) has a pole at z = {z}")
    # d/dz (1-z^2)/den = (-2z den - (1-z^2)(-a-2z)) / den^2
    num = -2 * z * den + (1 - z * z) * (p.a + 2 * z)
    return num / den**2 * minus_dressing(p.alpha, p.w)


def k_minus_limit(p: KMinusParams) -> np.ndarray:
    """``lim_{z->inf} K-(z)``: the off-diagonal factor tends to 1."""
    return _EYE3 + minus_dressing(p.alpha, p.w)


def k_plus(z, p: KPlusParams) -> np.ndarray:
    z = complex(z)
    diag = 1 + p.b * z - p.w**p.j * z * z
    off = 1 - p.w ** (2 * p.j) * z * z
    return diag * _EYE3 + off * plus_dressing(p.beta, p.j, p.w)


def k_plus_deriv(z, p: KPlusParams) -> np.ndarray:
    z = complex(z)
    return (p.b - 2 * p.w**p.j * z) * _EYE3 - 2 * p.w ** (2 * p.j) * z * plus_dressing(p.beta, p.j, p.w)


def boundary_matrix(choice: BoundaryChoice, z) -> np.ndarray:
    if isinstance(choice, Identity):
        return _EYE3.astype(complex)
    if isinstance(choice, KMinusParams):
        return k_minus(z, choice)
    if isinstance(choice, KPlusParams):
        return k_plus(z, choice)
    raise SpecError(f"unknown boundary choice {choice!r}")


def _kfunc(k) -> KFunc:
    if callable(k):
        return lambda z: as_matrix(k(z))
    if isinstance(k, (Identity, KMinusParams, KPlusParams)):
        return lambda z: boundary_matrix(k, z)
    m = as_matrix(k)
    return lambda z: m


def re_minus_residual(k, x, y) -> float:
    """Residual of ``R12(x/y) K1(x) R21(xy) K2(y) = K2(y) R12(xy) K1(x) R21(x/y)``.

    ``k`` is a :class:`KMinusParams`, any boundary choice, a callable ``z -> 3x3``
    or a constant 3x3 matrix. The norm is relative with a unit floor.
    """
    kf = _kfunc(k)
    x, y = check_spectral(x), check_spectral(y)
    r_ratio, r_prod = r_matrix(x / y), r_matrix(x * y)
    k1, k2 = kron(kf(x), _EYE3), kron(_EYE3, kf(y))
    lhs = r_ratio @ k1 @ swap_21(r_prod) @ k2
    rhs = k2 @ r_prod @ k1 @ swap_21(r_ratio)
    return relative_residual(lhs, rhs)


def re_plus_residual(k, x, y) -> float:
    """Residual of ``R12(y/x) K1(x) curlyR21(xy) K2(y) = K2(y) curlyR12(xy) K1(x) R21(y/x)``."""
    kf = _kfunc(k)
    x, y = check_spectral(x), check_spectral(y)
    r_ratio, c_prod = r_matrix(y / x), curly_r(x * y)
    k1, k2 = kron(kf(x), _EYE3), kron(_EYE3, kf(y))
    lhs = r_ratio @ k1 @ swap_21(c_prod) @ k2
    rhs = k2 @ c_prod @ k1 @ swap_21(r_ratio)
    return relative_residual(lhs, rhs)


def special_re_difference(k_y, k_z0) -> np.ndarray:
    """LHS - RHS of ``K2(y) Ř(0) K2(z0) Ř(0) = Ř(0) K2(z0) Ř(0) K2(y)``."""
    rc = r_check(0.0)
    ky, kz = kron(_EYE3, as_matrix(k_y)), kron(_EYE3, as_matrix(k_z0))
    q = rc @ kz @ rc
    return ky @ q - q @ ky


def special_re_residual(k_y, k_z0) -> float:
    return float(np.linalg.norm(special_re_difference(k_y, k_z0)))


def index_law_differences(k_y, k_z0) -> np.ndarray:
    """All ``h_ij(z0) h_kl(y) - h_{i,j+k+2l}(z0) h_{2i+2k,2i+2l}(y)``, indices mod 3.

    Returned as an array ``D[i, j, k, l]`` (0-based labels, which is harmless
    because every index expression has coefficients summing to 1 mod 3).
    """
    hy, hz = as_matrix(k_y), as_matrix(k_z0)
    r = np.arange(3)
    i, j, k, l = np.meshgrid(r, r, r, r, indexing="ij")
    return hz[i, j] * hy[k, l] - hz[i, (j + k + 2 * l) % 3] * hy[(2 * i + 2 * k) % 3, (2 * i + 2 * l) % 3]


def special_re_from_index_law(k_y, k_z0) -> np.ndarray:
    """Rebuild :func:`special_re_difference` entry by entry from the index law.

    Row ``(i, j)``, column ``(k, l)`` of the matrix equation is the index-law
    difference at ``(i, 2k+2l, j, 2i+2l)``; this map is a bijection of Z_3^4.
    """
    d = index_law_differences(k_y, k_z0)
    out = np.empty((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    out[3 * i + j, 3 * k + l] = d[i, (2 * k + 2 * l) % 3, j, (2 * i + 2 * l) % 3]
    return out


class KClass(enum.Enum):
    SCALAR_IDENTITY = "ScalarIdentity"
    DIAGONAL = "Diagonal"
    THREE_DIAGONAL_NONZERO = "ThreeDiagonalNonzero"
    ONE_DIAGONAL_NONZERO = "OneDiagonalNonzero"
    INCONSISTENT = "Inconsistent"


def _close(x, y, tol) -> bool:
    return abs(x - y) <= tol


def classify_k_at_z0(k0, tol: float = 1e-8, form_tol: float = 1e-5) -> KClass:
    """Classify ``K(z0)`` by the structure a solution of the special equation must have.

    The matrix is rescaled to max modulus 1. Diagonal entries with modulus
    ``> tol`` count as non-zero. ``form_tol`` bounds the deviation from the
    canonical three- or one-diagonal forms; it is looser than ``tol`` so that
    large-``|z|`` proxies for ``z0 = inf`` still classify.
    """
    k0 = as_matrix(k0)
    scale = np.abs(k0).max()
    if scale == 0:
        raise SpecError("K(z0) is the zero matrix")
    k = k0 / scale
    diag = np.diag(k)
    nz = [a for a in range(3) if abs(diag[a]) > tol]
    off = k - np.diag(diag)
    if len(nz) == 3:
        if not (_close(diag[0], diag[1], form_tol) and _close(diag[0], diag[2], form_tol)):
            return KClass.DIAGONAL if np.abs(off).max() <= tol else KClass.INCONSISTENT
        if np.abs(off).max() <= tol:
            return KClass.SCALAR_IDENTITY
        h = k / diag[0]
        alpha, beta, gamma = h[0, 1], h[1, 2], h[2, 0]
        ok = (
            all(abs(r**3 - 1) <= form_tol for r in (alpha, beta, gamma))
            and _close(h[0, 2], alpha**2, form_tol)
            and _close(h[1, 0], beta**2, form_tol)
            and _close(h[2, 1], gamma**2, form_tol)
            and _close(alpha * beta * gamma, 1, form_tol)
        )
        return KClass.THREE_DIAGONAL_NONZERO if ok else KClass.INCONSISTENT
    if len(nz) == 1:
        a = nz[0]
        others = [r for r in range(3) if r != a]
        if np.abs(k[others, :]).max() > tol:
            return KClass.INCONSISTENT
        h = k[a] / k[a, a]
        alpha = h[(a + 1) % 3]
        ok = abs(alpha**3 - 1) <= form_tol and _close(h[(a + 2) % 3], alpha**2, form_tol)
        return KClass.ONE_DIAGONAL_NONZERO if ok else KClass.INCONSISTENT
    # zero or two non-zero diagonal entries never occur for a solution
    return KClass.INCONSISTENT


def three_diagonal_form(a, b, alpha, beta, gamma) -> np.ndarray:
    """``[[A, αB, α²B], [β²B, A, βB], [γB, γ²B, A]]`` with ``α³=β³=γ³=αβγ=1`` enforced."""
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        _check_root(name, v)
    if abs(alpha * beta * gamma - 1) > 1e-12:
        raise SpecError("alpha * beta * gamma must equal 1")
    return np.array(
        [[a, alpha * b, alpha**2 * b], [beta**2 * b, a, beta * b], [gamma * b, gamma**2 * b, a]],
        dtype=complex,
    )


def one_diagonal_form(a, b, c, d, e, alpha) -> np.ndarray:
    """``[[A, αB, α²B], [αD, C, E], [D, αE, C]]``."""
    _check_root("alpha", alpha)
    return np.array(
        [[a, alpha * b, alpha**2 * b], [alpha * d, c, e], [d, alpha * e, c]],
        dtype=complex,
    )


def _parse_complex(v, name: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    try:
        re, im = v
        return complex(float(re), float(im))
    except (TypeError, ValueError):
        raise SpecError(f"{name} must be [re, im], got {v!r}") from None


def _parse_w(v) -> complex:
    if v in (None, "primary"):
        return W
    if v == "conjugate":
        return W.conjugate()
    raise SpecError(f"w must be 'primary' or 'conjugate', got {v!r}")


def _parse_power(v, name: str) -> complex:
    if v not in (0, 1, 2):
        raise SpecError(f"{name} must be 0, 1 or 2 (power of w), got {v!r}")
    return cube_root(v)


def parse_boundary(obj: dict) -> BoundaryChoice:
    """Build a boundary choice from its JSON form.

    ``{"kind": "minus", "a": [re, im], "alpha": 0|1|2, "w": "primary"|"conjugate"}``,
    ``{"kind": "plus", "b": [re, im], "beta": 0|1|2, "j": 1|2, "w": ...}`` or
    ``{"kind": "identity"}``. ``alpha``/``beta`` are powers of ``e^{2 pi i/3}``.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecError(f"boundary must be an object with a 'kind', got {obj!r}")
    kind = obj["kind"]
    if kind == "identity":
        return Identity()
    if kind == "minus":
        return KMinusParams(
            a=_parse_complex(obj.get("a", 0), "a"),
            alpha=_parse_power(obj.get("alpha", 0), "alpha"),
            w=_parse_w(obj.get("w")),
        )
    if kind == "plus":
        return KPlusParams(
            b=_parse_complex(obj.get("b", 0), "b"),
            beta=_parse_power(obj.get("beta", 0), "beta"),
            j=obj.get("j", 1),
            w=_parse_w(obj.get("w")),
        )
    raise SpecError(f"unknown boundary kind {kind!r}")


def _power_of(x: complex) -> int:
    return int(np.argmin([abs(x - cube_root(p)) for p in range(3)]))


def boundary_to_json(choice: BoundaryChoice) -> dict:
    if isinstance(choice, Identity):
        return {"kind": "identity"}
    w = "primary" if abs(choice.w - W) < 1e-9 else "conjugate"
    if isinstance(choice, KMinusParams):
        return {"kind": "minus", "a": [choice.a.real, choice.a.imag], "alpha": _power_of(choice.alpha), "w": w}
    return {
        "kind": "plus",
        "b": [choice.b.real, choice.b.imag],
        "beta": _power_of(choice.beta),
        "j": choice.j,
        "w": w,
    }
