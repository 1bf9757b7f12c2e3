"""Seeded verification suites producing :class:`ResidualReport` objects.

Each suite draws its inputs from ``numpy.random.default_rng(seed)`` (PCG64),
evaluates one identity per sample and records the residual. Reports are
assembled in sample order, so the same seed gives the same report.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chain import (
    ChainSpec,
    hamiltonian_transfer_commutation_residual,
    transfer_commutation_residual,
)
from .exceptions import SpecError
from .reflection import (
    W,
    KMinusParams,
    KPlusParams,
    cube_root,
    k_minus,
    k_minus_limit,
    k_plus,
    parse_boundary,
    re_minus_residual,
    re_plus_residual,
    special_re_difference,
    special_re_from_index_law,
    special_re_residual,
)
from .rmatrix import (
    admissible,
    crossing_search,
    curly_r,
    r_matrix,
    sample_spectral,
    ybe_residual,
)
from .tensor import partial_transpose, swap_21

__all__ = ["ResidualReport", "TARGETS", "DEFAULT_TOL", "run", "random_minus", "random_plus"]

GENERATOR = "numpy.random.PCG64"

DEFAULT_TOL = {
    "ybe": 1e-10,
    "unitarity": 1e-10,
    "dual": 1e-9,
    "crossing": 1e-2,
    "re-minus": 1e-10,
    "re-plus": 1e-10,
    "special": 1e-12,
    "transfer-commute": 1e-9,
    "ham-commute": 1e-8,
}
TARGETS = tuple(DEFAULT_TOL)


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class ResidualReport:
    identity_name: str
    tolerance: float
    seed: int
    samples: list = field(default_factory=list)
    wall_time: float = 0.0
    generator: str = GENERATOR
    report_only: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((s["residual"] for s in self.samples), default=0.0)

    @property
    def passed(self) -> Optional[bool]:
        if self.report_only:
            return None
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "identity_name": self.identity_name,
            "generator": self.generator,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "max_residual": self.max_residual,
            "n_samples": len(self.samples),
            "notes": self.notes,
            "samples": self.samples,
            "wall_time": self.wall_time,
        }


def _pair(rng):
    """(x, y) with x, y, x/y, xy all away from the pole set."""
    while True:
        x, y = sample_spectral(rng), sample_spectral(rng)
        if admissible(x / y) and admissible(y / x) and admissible(x * y):
            return x, y


def random_minus(rng, x=None, y=None) -> KMinusParams:
    """Random K- family member; a ~ complex normal, rejecting near-poles at x, y and z = 1."""
    w = W if rng.integers(2) == 0 else W.conjugate()
    alpha = cube_root(int(rng.integers(3)))
    while True:
        a = complex(rng.normal(), rng.normal())
        dens = [w * w - a * z - z * z for z in (x, y) if z is not None]
        if all(abs(d) > 1e-2 for d in dens) and abs(1 - w * w + a) > 1e-2:
            return KMinusParams(a=a, alpha=alpha, w=w)


def random_plus(rng) -> KPlusParams:
    w = W if rng.integers(2) == 0 else W.conjugate()
    beta = cube_root(int(rng.integers(3)))
    j = int(rng.integers(1, 3))
    while True:
        b = complex(rng.normal(), rng.normal())
        if abs(1 - w**j + b) > 1e-2:
            return KPlusParams(b=b, beta=beta, j=j, w=w)


def _params_json(p) -> dict:
    if isinstance(p, KMinusParams):
        return {"a": _c(p.a), "alpha": _c(p.alpha), "w": _c(p.w)}
    if isinstance(p, KPlusParams):
        return {"b": _c(p.b), "beta": _c(p.beta), "j": p.j, "w": _c(p.w)}
    return {}


def _suite_ybe(rng, n, params):
    for _ in range(n):
        x, y = _pair(rng)
        yield {"x": _c(x), "y": _c(y)}, ybe_residual(x, y)


def _suite_unitarity(rng, n, params):
    for _ in range(n):
        z = sample_spectral(rng)
        prods = [r_matrix(u) @ swap_21(r_matrix(1 / u)) for u in (z, 1 / z)]
        devs, fs = [], []
        for m in prods:
            f = m[0, 0]
            devs.append(float(np.linalg.norm(m - f * np.eye(9)) / max(1.0, np.linalg.norm(m))))
            fs.append(complex(np.mean(np.diag(m))))
        yield {"z": _c(z), "f": _c(fs[0])}, max(max(devs), abs(fs[0] - fs[1]))


def _suite_dual(rng, n, params):
    eye = np.eye(9)
    for _ in range(n):
        z = sample_spectral(rng)
        cf = curly_r(z, "closed_form")
        r = r_matrix(z)
        res = max(
            float(np.linalg.norm(cf - curly_r(z, "from_definition"))),
            float(np.linalg.norm(partial_transpose(cf, 1) @ partial_transpose(swap_21(r), 1) - eye)),
            float(np.linalg.norm(partial_transpose(swap_21(cf), 2) @ partial_transpose(r, 2) - eye)),
        )
        yield {"z": _c(z)}, res


def _control_k(params):
    kind = params.get("kind")
    if kind == "diagonal-control":
        return np.diag([1.0, 2.0, 3.0]).astype(complex)
    if kind == "scalar-control":
        return 2 * np.eye(3, dtype=complex)
    return parse_boundary(params)


def _suite_re_minus(rng, n, params):
    fixed = _control_k(params) if params else None
    for _ in range(n):
        x, y = _pair(rng)
        k = fixed if fixed is not None else random_minus(rng, x, y)
        yield {"x": _c(x), "y": _c(y), **_params_json(k)}, re_minus_residual(k, x, y)


def _suite_re_plus(rng, n, params):
    fixed = _control_k(params) if params else None
    for _ in range(n):
        x, y = _pair(rng)
        k = fixed if fixed is not None else random_plus(rng)
        yield {"x": _c(x), "y": _c(y), **_params_json(k)}, re_plus_residual(k, x, y)


def _suite_special(rng, n, params):
    """Index-law equivalence on random pairs, then the two family specialisations."""
    for _ in range(n):
        ky = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        k0 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        res = float(np.abs(special_re_difference(ky, k0) - special_re_from_index_law(ky, k0)).max())
        yield {"check": "index-law"}, res
    for _ in range(n):
        y = sample_spectral(rng)
        p = random_minus(rng, y)
        ky = k_minus(y, p)
        yield {"check": "k-minus z0=inf", "y": _c(y), **_params_json(p)}, special_re_residual(
            ky, k_minus_limit(p)
        ) / max(1.0, float(np.linalg.norm(ky)))
        q = random_plus(rng)
        ky = k_plus(y, q)
        yield {"check": "k-plus z0=0", "y": _c(y), **_params_json(q)}, special_re_residual(
            ky, k_plus(0.0, q)
        ) / max(1.0, float(np.linalg.norm(ky)))


def _chain_spec(rng, params, default_n):
    if params and "left" in params:
        return ChainSpec.from_json(params)
    n = int(params.get("N", default_n)) if params else default_n
    return ChainSpec(n, random_minus(rng), random_plus(rng))


def _suite_transfer(rng, n, params):
    spec = _chain_spec(rng, params, 2)
    for _ in range(n):
        x, y = _pair(rng)
        yield {"N": spec.N, "x": _c(x), "y": _c(y)}, transfer_commutation_residual(spec, x, y)


def _suite_ham(rng, n, params):
    spec = _chain_spec(rng, params, 3)
    for _ in range(n):
        z = sample_spectral(rng)
        yield {"N": spec.N, "z": _c(z)}, hamiltonian_transfer_commutation_residual(spec, z)


_SUITES = {
    "ybe": _suite_ybe,
    "unitarity": _suite_unitarity,
    "dual": _suite_dual,
    "re-minus": _suite_re_minus,
    "re-plus": _suite_re_plus,
    "special": _suite_special,
    "transfer-commute": _suite_transfer,
    "ham-commute": _suite_ham,
}


def _crossing(seed, tol):
    best, count, arg = crossing_search(seed)
    rep = ResidualReport("crossing", tol, seed, report_only=True)
    rep.samples = [{"inputs": {"candidate": arg[0], "lambda": _c(arg[1])}, "residual": best}]
    rep.notes = {
        "candidates": count,
        "min_residual": best,
        "no_candidate_within_tolerance": best > tol,
        "statement": "sampled search only; not a proof of non-existence",
    }
    return rep


def run(target: str, samples: int = 20, seed: int = 0, tol: Optional[float] = None, params=None) -> ResidualReport:
    """Run one verification suite."""
    if target not in DEFAULT_TOL:
        raise SpecError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    if samples < 1:
        raise SpecError("samples must be positive")
    tol = DEFAULT_TOL[target] if tol is None else float(tol)
    start = time.perf_counter()
    if target == "crossing":
        rep = _crossing(seed, tol)
    else:
        rng = np.random.default_rng(seed)
        rep = ResidualReport(target, tol, seed)
        for inputs, res in _SUITES[target](rng, samples, params or {}):
            rep.samples.append({"inputs": inputs, "residual": float(res)})
        if params:
            rep.notes["params"] = params
    rep.wall_time = time.perf_counter() - start
    return rep
