"""Open-chain construction: double monodromy, transfer matrix and Hamiltonian.

Tensor ordering is auxiliary space first, then sites ``1..N``. With ``L = R``
the double monodromy matrix is

    T(z) = R_aN(z) ... R_a1(z) K-_a(z) R_a1(1/z)^{-1} ... R_aN(1/z)^{-1}

and ``t(z) = tr_a[K+_a(z) T(z)]``. The production Hamiltonian is the explicit
sum of local terms and boundary fields; :func:`hamiltonian_from_transfer`
rebuilds it from a numerical derivative of ``t(z)`` at ``z = 1``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .exceptions import SpecError
from .reflection import (
    W,
    BoundaryChoice,
    Identity,
    KMinusParams,
    KPlusParams,
    boundary_matrix,
    boundary_to_json,
    k_minus,
    k_minus_deriv,
    k_plus,
    k_plus_deriv,
    minus_dressing,
    parse_boundary,
)
from .rmatrix import check_spectral, r_matrix, r_matrix_deriv
from .tensor import (
    elementary,
    embed_factors,
    embed_pair,
    kron,
    permutation_operator,
    trace_over_aux,
)

__all__ = [
    "N_MAX_DEFAULT",
    "n_max",
    "ChainSpec",
    "SpectrumResult",
    "double_monodromy",
    "transfer_matrix",
    "local_hamiltonian",
    "hermitian_a",
    "hermitian_b",
    "hermitian_params",
    "left_amplitude",
    "right_amplitude",
    "right_field_dressing",
    "boundary_left_term",
    "boundary_right_term",
    "global_hamiltonian",
    "hamiltonian_from_transfer",
    "hamiltonian_transfer_commutation_residual",
    "transfer_commutation_residual",
    "exchange_relation_residual",
    "spectrum",
]

N_MAX_DEFAULT = 8
_EYE3 = np.eye(3)


def n_max() -> int:
    """Dimension cap on the number of sites; ``BQISM_NMAX`` overrides the default 8."""
    raw = os.environ.get("BQISM_NMAX")
    if raw is None:
        return N_MAX_DEFAULT
    try:
        return int(raw)
    except ValueError:
        raise SpecError(f"BQISM_NMAX must be an integer, got {raw!r}") from None


def hermitian_a(x: float, w: complex = W) -> complex:
    """``a = i w / X + 1/w - 1``; gives the left amplitude ``A = X / w``."""
    if x == 0:
        raise SpecError("zero coupling: X must be non-zero")
    w = complex(w)
    return 1j * w / x + 1 / w - 1


def hermitian_b(y: float, j: int = 1, w: complex = W) -> complex:
    """``b = w^j - 1 - i w^{-j} / Y``; gives the right amplitude ``B = w^j Y``."""
    if y == 0:
        raise SpecError("zero coupling: Y must be non-zero")
    w = complex(w)
    return w**j - 1 - 1j * w ** (-j) / y


def hermitian_params(x: float, y: float, j: int = 1, w: complex = W):
    """Return ``(a, b)`` for real couplings ``X, Y`` (the unnamed ``omega`` is read as ``w``)."""
    return hermitian_a(x, w), hermitian_b(y, j, w)


@dataclass(frozen=True)
class ChainSpec:
    """An open chain of ``N`` sites.

    ``left`` is the K- boundary (site 1), ``right`` the K+ boundary (site N).
    If ``X`` (``Y``) is given, the left (right) coupling is replaced by
    :func:`hermitian_a` (:func:`hermitian_b`), keeping the other parameters.
    """

    N: int
    left: BoundaryChoice = field(default_factory=Identity)
    right: BoundaryChoice = field(default_factory=Identity)
    c: complex = 1j
    X: Optional[float] = None
    Y: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise SpecError(f"N must be a positive integer, got {self.N!r}")
        cap = n_max()
        if self.N > cap:
            raise SpecError(f"N = {self.N} exceeds the dimension cap N_max = {cap}")
        if not isinstance(self.left, (Identity, KMinusParams)):
            raise SpecError("left boundary must be identity or a K- family")
        if not isinstance(self.right, (Identity, KPlusParams)):
            raise SpecError("right boundary must be identity or a K+ family")
        object.__setattr__(self, "c", complex(self.c))
        if self.X is not None:
            if not isinstance(self.left, KMinusParams):
                raise SpecError("X needs a K- left boundary")
            object.__setattr__(self, "left", replace(self.left, a=hermitian_a(self.X, self.left.w)))
        if self.Y is not None:
            if not isinstance(self.right, KPlusParams):
                raise SpecError("Y needs a K+ right boundary")
            r = self.right
            object.__setattr__(self, "right", replace(r, b=hermitian_b(self.Y, r.j, r.w)))

    @classmethod
    def from_json(cls, obj: dict) -> "ChainSpec":
        if not isinstance(obj, dict) or "N" not in obj:
            raise SpecError("chain spec must be an object with at least 'N'")
        c = obj.get("c", [0.0, 1.0])
        try:
            c = complex(*c) if isinstance(c, (list, tuple)) else complex(c)
        except (TypeError, ValueError):
            raise SpecError(f"c must be [re, im], got {c!r}") from None
        return cls(
            N=obj["N"],
            left=parse_boundary(obj.get("left", {"kind": "identity"})),
            right=parse_boundary(obj.get("right", {"kind": "identity"})),
            c=c,
            X=obj.get("X"),
            Y=obj.get("Y"),
        )

    def to_json(self) -> dict:
        out = {
            "N": int(self.N),
            "left": boundary_to_json(self.left),
            "right": boundary_to_json(self.right),
            "c": [self.c.real, self.c.imag],
        }
        if self.X is not None:
            out["X"] = self.X
        if self.Y is not None:
            out["Y"] = self.Y
        return out


def _r_aux(m: np.ndarray, site: int, n: int) -> np.ndarray:
    return embed_factors(m, (0, site), n + 1)


def double_monodromy(z, spec: ChainSpec) -> np.ndarray:
    z = check_spectral(z)
    zi = check_spectral(1 / z)
    n = spec.N
    r, r_inv = r_matrix(z), np.linalg.inv(r_matrix(zi))
    t = kron(boundary_matrix(spec.left, z), np.eye(3**n))
    for site in range(1, n + 1):
        t = _r_aux(r, site, n) @ t @ _r_aux(r_inv, site, n)
    return t


def transfer_matrix(z, spec: ChainSpec) -> np.ndarray:
    kp = boundary_matrix(spec.right, z)
    return trace_over_aux(kron(kp, np.eye(3**spec.N)) @ double_monodromy(z, spec))


def transfer_commutation_residual(spec: ChainSpec, x, y) -> float:
    """``||[t(x), t(y)]||_F / (||t(x)||_F ||t(y)||_F)``."""
    tx, ty = transfer_matrix(x, spec), transfer_matrix(y, spec)
    return float(np.linalg.norm(tx @ ty - ty @ tx) / (np.linalg.norm(tx) * np.linalg.norm(ty)))


def exchange_relation_residual(spec: ChainSpec, x, y) -> float:
    """Residual of ``R12(x/y) T13(x) R21(xy) T23(y) = T23(y) R12(xy) T13(x) R21(x/y)``.

    Spaces 1, 2 are two auxiliary copies; 3 is the whole chain.
    """
    x, y = check_spectral(x), check_spectral(y)
    n = spec.N
    dim_w = 3**n
    eye_w = np.eye(dim_w)
    tx, ty = double_monodromy(x, spec), double_monodromy(y, spec)
    t13 = embed_factors(tx, (0,) + tuple(range(2, n + 2)), n + 2)
    t23 = kron(_EYE3, ty)
    p = permutation_operator(3)
    r12 = lambda z: kron(r_matrix(z), eye_w)  # noqa: E731
    r21 = lambda z: kron(p @ r_matrix(z) @ p, eye_w)  # noqa: E731
    lhs = r12(x / y) @ t13 @ r21(x * y) @ t23
    rhs = t23 @ r12(x * y) @ t13 @ r21(x / y)
    scale = max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
    return float(np.linalg.norm(lhs - rhs) / scale)


def local_hamiltonian(mode: str = "explicit_s3", c: complex = 1j) -> np.ndarray:
    """Two-site Hamiltonian ``c P dR/dz|_{z=1}``.

    ``mode="derivative"`` evaluates this literally. ``mode="explicit_s3"`` uses
    the permutation sum ``sum_g (E^{g1}_{g2} (x) E^{g2}_{g3} - E^{g2}_{g3} (x) E^{g1}_{g2})``
    over all six permutations ``g`` of ``{1, 2, 3}``, times ``c``.
    """
    if mode == "derivative":
        return complex(c) * permutation_operator(3) @ r_matrix_deriv(1.0)
    if mode == "explicit_s3":
        h = np.zeros((9, 9), dtype=complex)
        for g in itertools.permutations((1, 2, 3)):
            e1, e2 = elementary(g[0], g[1]), elementary(g[1], g[2])
            h += np.kron(e1, e2) - np.kron(e2, e1)
        return complex(c) * h
    raise ValueError(f"unknown mode {mode!r}")


def left_amplitude(p: KMinusParams) -> complex:
    """``A = i / (1 - w^2 + a)``."""
    den = 1 - p.w**2 + p.a
    if abs(den) < 1e-12:
        raise SpecError("left boundary field is singular: 1 - w^2 + a = 0")
    return 1j / den


def right_amplitude(p: KPlusParams) -> complex:
    """``B = -i / (1 - w^j + b)``."""
    return -1j / (1 - p.w**p.j + p.b)


def right_field_dressing(beta, j, w) -> np.ndarray:
    """``[[0, β̄, β̄²], [β̄² w^j, 0, β̄ w^{2j}], [β̄ w^j, β̄² w^{2j}, 0]]``, β̄ = 1/β.

    This is the complex conjugate of the K+ off-diagonal dressing.
    """
    b = 1 / complex(beta)
    wj, w2j = complex(w) ** j, complex(w) ** (2 * j)
    return np.array([[0, b, b * b], [b * b * wj, 0, b * w2j], [b * wj, b * b * w2j, 0]], dtype=complex)


def boundary_left_term(p: BoundaryChoice, c: complex = 1j, route: str = "closed_form") -> np.ndarray:
    """Left boundary field ``(c/2) dK-/dz|_{z=1}``.

    Routes: ``closed_form`` (``(c/i) A`` times the K- dressing), ``derivative``
    (closed-form derivative of ``k_minus``) and ``finite_difference`` (central
    difference at ``h = 1e-5`` with one Richardson step).
    """
    if isinstance(p, Identity):
        return np.zeros((3, 3), dtype=complex)
    c = complex(c)
    if route == "closed_form":
        return (c / 1j) * left_amplitude(p) * minus_dressing(p.alpha, p.w)
    if route == "derivative":
        return c / 2 * k_minus_deriv(1.0, p)
    if route == "finite_difference":
        def central(h):
            return (k_minus(1 + h, p) - k_minus(1 - h, p)) / (2 * h)

        # Richardson step removes the O(h^2) term
        return c / 2 * (4 * central(5e-6) - central(1e-5)) / 3
    raise ValueError(f"unknown route {route!r}")


def boundary_right_term(p: BoundaryChoice, c: complex = 1j, route: str = "trace") -> np.ndarray:
    """Right boundary field ``tr_a(c K+_a(1) P_Na dR_Na/dz|_1) / tr K+(1)``.

    ``c`` enters once: the local operator inside the trace is ``P R'(1)``.
    ``route="closed_form"`` returns ``(c/i) B`` times :func:`right_field_dressing`.
    """
    c = complex(c)
    if route == "trace":
        kp = boundary_matrix(p, 1.0)
        tr = np.trace(kp)
        if abs(tr) < 1e-12:
            raise SpecError("trace of K+(1) vanishes")
        h_na = permutation_operator(3) @ r_matrix_deriv(1.0)
        prod = (kron(_EYE3, kp) @ h_na).reshape(3, 3, 3, 3)
        return c * np.einsum("iaja->ij", prod) / tr
    if route == "closed_form":
        if isinstance(p, Identity):
            return np.zeros((3, 3), dtype=complex)
        return (c / 1j) * right_amplitude(p) * right_field_dressing(p.beta, p.j, p.w)
    raise ValueError(f"unknown route {route!r}")


def global_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Bulk sum plus the left field on site 1 and the right field on site N."""
    n = spec.N
    dim = 3**n
    h = np.zeros((dim, dim), dtype=complex)
    hloc = local_hamiltonian("explicit_s3", spec.c)
    for i in range(1, n):
        h += embed_pair(hloc, i, n)
    h += kron(boundary_left_term(spec.left, spec.c), np.eye(3 ** (n - 1)))
    # evaluated even for the identity K+, where it vanishes identically
    h += kron(np.eye(3 ** (n - 1)), boundary_right_term(spec.right, spec.c))
    return h


def hamiltonian_from_transfer(spec: ChainSpec, h: float = 1e-5) -> np.ndarray:
    """``c / (2 tr K+(1)) [t'(1) - tr(K+'(1)) I]`` with Richardson-extrapolated central differences."""

    def central(step):
        return (transfer_matrix(1 + step, spec) - transfer_matrix(1 - step, spec)) / (2 * step)

    dt = (4 * central(h / 2) - central(h)) / 3
    kp1 = boundary_matrix(spec.right, 1.0)
    if isinstance(spec.right, KPlusParams):
        dtr = np.trace(k_plus_deriv(1.0, spec.right))
    else:
        dtr = 0.0
    return spec.c / (2 * np.trace(kp1)) * (dt - dtr * np.eye(3**spec.N))


def hamiltonian_transfer_commutation_residual(spec: ChainSpec, z, transfer_spec: Optional[ChainSpec] = None) -> float:
    """``||[H, t(z)]||_F / (||H||_F ||t(z)||_F)``; ``transfer_spec`` allows mismatched controls."""
    hm = global_hamiltonian(spec)
    t = transfer_matrix(z, transfer_spec or spec)
    if not np.linalg.norm(hm) or not np.linalg.norm(t):
        return 0.0
    return float(np.linalg.norm(hm @ t - t @ hm) / (np.linalg.norm(hm) * np.linalg.norm(t)))


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    hermiticity_defect: float
    commutation_defect: dict = field(default_factory=dict)
    spec: Optional[ChainSpec] = None

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json() if self.spec is not None else None,
            "eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
            "hermiticity_defect": self.hermiticity_defect,
            "commutation_defect": [
                {"z": [complex(z).real, complex(z).imag], "residual": r} for z, r in self.commutation_defect.items()
            ],
        }


def _sort_eigs(ev) -> np.ndarray:
    ev = np.asarray(ev, dtype=complex)
    return ev[np.lexsort((ev.imag, ev.real))]


def spectrum(spec: ChainSpec, tol: float = 1e-10, check_z=None) -> SpectrumResult:
    """Full spectrum, ascending by real part then imaginary part.

    A symmetric eigensolver is used when ``||H - H^dagger||_F < tol``.
    ``[H, t(z)]`` is checked at ``check_z`` (default ``z = 2`` for ``N <= 4``).
    """
    if spec.N > n_max():
        raise SpecError(f"N = {spec.N} exceeds the dimension cap N_max = {n_max()}")
    hm = global_hamiltonian(spec)
    defect = float(np.linalg.norm(hm - hm.conj().T))
    if defect < tol:
        ev = np.linalg.eigvalsh((hm + hm.conj().T) / 2).astype(complex)
    else:
        ev = np.linalg.eigvals(hm)
    if check_z is None:
        check_z = (2.0,) if spec.N <= 4 else ()
    comm = {complex(z): hamiltonian_transfer_commutation_residual(spec, z) for z in check_z}
    return SpectrumResult(_sort_eigs(ev), defect, comm, spec)
