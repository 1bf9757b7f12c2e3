import itertools
import json
from importlib import resources

import numpy as np
import pytest

from bqism.chain import (
    ChainSpec,
    boundary_left_term,
    boundary_right_term,
    double_monodromy,
    exchange_relation_residual,
    global_hamiltonian,
    hamiltonian_from_transfer,
    hamiltonian_transfer_commutation_residual,
    hermitian_a,
    hermitian_b,
    hermitian_params,
    left_amplitude,
    local_hamiltonian,
    n_max,
    right_amplitude,
    spectrum,
    transfer_commutation_residual,
    transfer_matrix,
)
from bqism.exceptions import SpecError
from bqism.reflection import W, Identity, KMinusParams, KPlusParams, cube_root
from bqism.verify import _pair, random_minus, random_plus

from oracles import identity_chain_hamiltonian, s3_local_hamiltonian

WC = W.conjugate()
GOLDEN = json.loads(resources.files("bqism").joinpath("data/golden.json").read_text())


def hermitian_spec(n, x=1.0, y=1.0, alpha=1, beta=1, j=1, w=W):
    return ChainSpec(n, KMinusParams(0, alpha, w), KPlusParams(0, beta, j, w), X=x, Y=y)


class TestMonodromyAndTransfer:
    def test_trivial_monodromy_n1(self):
        assert np.allclose(double_monodromy(1.0, ChainSpec(1)), np.eye(9), atol=1e-14)

    def test_trivial_monodromy_n2(self):
        assert np.allclose(double_monodromy(1.0, ChainSpec(2)), np.eye(27), atol=1e-14)

    def test_transfer_golden_n1(self):
        assert np.allclose(transfer_matrix(1.0, ChainSpec(1)), 3 * np.eye(3), atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2])
    def test_exchange_relation(self, n):
        rng = np.random.default_rng(30 + n)
        spec = ChainSpec(n, random_minus(rng), random_plus(rng))
        for _ in range(5):
            assert exchange_relation_residual(spec, *_pair(rng)) < 1e-9

    def test_transfer_commutes_n2(self):
        rng = np.random.default_rng(33)
        spec = ChainSpec(2, random_minus(rng), random_plus(rng))
        for _ in range(20):
            assert transfer_commutation_residual(spec, *_pair(rng)) < 1e-9

    def test_mismatched_boundaries_break_commutation(self):
        rng = np.random.default_rng(34)
        spec = ChainSpec(2, random_minus(rng), random_plus(rng))
        other = ChainSpec(2, random_minus(rng), random_plus(rng))
        x, y = _pair(rng)
        tx, ty = transfer_matrix(x, spec), transfer_matrix(y, other)
        assert np.linalg.norm(tx @ ty - ty @ tx) / (np.linalg.norm(tx) * np.linalg.norm(ty)) > 1e-3


class TestLocalHamiltonian:
    def test_routes_agree(self):
        assert np.abs(local_hamiltonian("derivative") - local_hamiltonian("explicit_s3")).max() < 1e-12

    def test_matches_oracle(self):
        assert np.array_equal(local_hamiltonian("explicit_s3"), s3_local_hamiltonian())

    def test_hermitian(self):
        h = local_hamiltonian()
        assert np.array_equal(h, h.conj().T)

    @pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
    def test_permutation_invariance(self, perm):
        s = np.eye(3)[list(perm)]
        ss = np.kron(s, s)
        h = local_hamiltonian()
        assert np.abs(ss @ h @ ss.T - h).max() < 1e-14

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            local_hamiltonian("guess")


class TestHermitianParams:
    def test_a_formula(self):
        assert hermitian_a(1.0, W) == pytest.approx(1j * W + 1 / W - 1)

    def test_b_formula(self):
        assert hermitian_b(1.0, 1, W) == pytest.approx(W - 1 - 1j / W)

    @pytest.mark.parametrize("w", [W, WC])
    def test_amplitudes(self, w):
        for x in (2.0, -0.5):
            assert left_amplitude(KMinusParams(hermitian_a(x, w), 1, w)) == pytest.approx(x / w)
        for j, y in itertools.product((1, 2), (1.0, -2.0)):
            assert right_amplitude(KPlusParams(hermitian_b(y, j, w), 1, j, w)) == pytest.approx(w**j * y)

    @pytest.mark.parametrize("x, y", [(0.0, 1.0), (1.0, 0.0)])
    def test_zero_coupling(self, x, y):
        with pytest.raises(SpecError, match="zero coupling"):
            hermitian_params(x, y)


class TestBoundaryTerms:
    def test_left_routes(self):
        rng = np.random.default_rng(40)
        for _ in range(10):
            p = random_minus(rng)
            closed = boundary_left_term(p)
            assert np.abs(np.diag(closed)).max() == 0
            assert closed[0, 1] == pytest.approx(left_amplitude(p) * p.alpha)
            for route in ("derivative", "finite_difference"):
                assert np.abs(boundary_left_term(p, route=route) - closed).max() < 1e-9

    def test_right_routes(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            q = random_plus(rng)
            closed = boundary_right_term(q, route="closed_form")
            assert np.abs(np.diag(closed)).max() == 0
            assert np.abs(boundary_right_term(q, route="trace") - closed).max() < 1e-9

    @pytest.mark.parametrize("j", [1, 2])
    def test_right_entry_with_unit_beta(self, j):
        q = KPlusParams(0.3 - 0.2j, 1, j, W)
        term = boundary_right_term(q)
        assert term[1, 0] == pytest.approx(right_amplitude(q) * W**j)

    def test_right_entry_general_beta_is_conjugated(self):
        beta = W
        q = KPlusParams(0.3 - 0.2j, beta, 1, W)
        term = boundary_right_term(q)
        bbar = beta.conjugate()
        assert term[1, 0] == pytest.approx(right_amplitude(q) * bbar**2 * W)
        assert term[0, 1] == pytest.approx(right_amplitude(q) * bbar)

    def test_identity_right_field_vanishes(self):
        assert np.abs(boundary_right_term(Identity())).max() < 1e-12

    def test_singular_left(self):
        with pytest.raises(SpecError):
            left_amplitude(KMinusParams(W**2 - 1, 1, W))


class TestGlobalHamiltonian:
    def test_identity_matches_oracle(self):
        h = global_hamiltonian(ChainSpec(2))
        assert np.abs(h - identity_chain_hamiltonian(2)).max() < 1e-8

    def test_identity_golden_spectrum(self):
        g = GOLDEN["spectrum_identity_N2"]
        res = spectrum(ChainSpec.from_json(g["spec"]))
        expected = np.array([complex(*v) for v in g["eigenvalues"]])
        assert np.abs(res.eigenvalues - expected).max() < g["tolerance"]

    def test_route_equivalence_n2(self):
        rng = np.random.default_rng(42)
        spec = ChainSpec(2, random_minus(rng), random_plus(rng))
        h1, h2 = hamiltonian_from_transfer(spec), global_hamiltonian(spec)
        assert np.linalg.norm(h1 - h2) < 1e-7

    def test_generic_couplings_not_hermitian(self):
        spec = ChainSpec(2, KMinusParams(0.7 + 0.4j, W, W), KPlusParams(-0.3 + 1.1j, 1, 1, W))
        h = global_hamiltonian(spec)
        assert np.linalg.norm(h - h.conj().T) > 1e-3

    def test_hermitian_n3(self):
        h = global_hamiltonian(hermitian_spec(3))
        assert np.linalg.norm(h - h.conj().T) < 1e-10

    def test_hermitian_grid(self):
        vals = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
        worst = 0.0
        for x, y, alpha, beta, j, w in itertools.product(vals, vals, range(3), range(3), (1, 2), (W, WC)):
            h = global_hamiltonian(hermitian_spec(2, x, y, cube_root(alpha), cube_root(beta), j, w))
            worst = max(worst, np.linalg.norm(h - h.conj().T))
        assert worst < 1e-10

    def test_commutes_with_transfer(self):
        assert hamiltonian_transfer_commutation_residual(ChainSpec(2), 2.0) < 1e-9
        rng = np.random.default_rng(43)
        spec = ChainSpec(3, random_minus(rng), random_plus(rng))
        assert hamiltonian_transfer_commutation_residual(spec, 1.3 + 0.6j) < 1e-8

    def test_mismatched_spec_does_not_commute(self):
        rng = np.random.default_rng(44)
        spec = ChainSpec(2, random_minus(rng), random_plus(rng))
        other = ChainSpec(2, random_minus(rng), random_plus(rng))
        assert hamiltonian_transfer_commutation_residual(spec, 1.3 + 0.6j, other) > 1e-3


class TestSpectrum:
    def test_single_site(self):
        res = spectrum(hermitian_spec(1, 2.0, -1.0))
        assert len(res.eigenvalues) == 3
        assert np.abs(res.eigenvalues.imag).max() < 1e-9

    def test_hermitian_real_and_sorted(self):
        res = spectrum(hermitian_spec(3))
        assert len(res.eigenvalues) == 27
        assert np.abs(res.eigenvalues.imag).max() < 1e-9
        assert np.all(np.diff(res.eigenvalues.real) >= 0)
        assert all(v < 1e-8 for v in res.commutation_defect.values())

    def test_identity_degeneracies(self):
        ev = spectrum(ChainSpec(2)).eigenvalues.real
        _, counts = np.unique(np.round(ev, 9), return_counts=True)
        assert sorted(counts) == [2, 2, 5]

    def test_json(self):
        obj = spectrum(hermitian_spec(2)).to_json()
        assert obj["spec"]["X"] == 1.0
        assert len(obj["eigenvalues"]) == 9 and all(len(v) == 2 for v in obj["eigenvalues"])


class TestChainSpec:
    def test_cap(self, monkeypatch):
        assert n_max() == 8
        with pytest.raises(SpecError, match="exceeds"):
            ChainSpec(9)
        monkeypatch.setenv("BQISM_NMAX", "2")
        with pytest.raises(SpecError):
            ChainSpec(3)

    def test_bad_sides(self):
        with pytest.raises(SpecError):
            ChainSpec(2, left=KPlusParams())
        with pytest.raises(SpecError):
            ChainSpec(2, right=KMinusParams())
        with pytest.raises(SpecError):
            ChainSpec(0)

    def test_json_round_trip(self):
        spec = hermitian_spec(3, 2.0, -1.0, W, WC, 2, WC)
        again = ChainSpec.from_json(json.loads(json.dumps(spec.to_json())))
        assert again == spec
