import dataclasses

import numpy as np
import pytest

from enaqt import fock, model
from enaqt.model import ChainSpec, LONG_RANGE


def make_spec(**kw):
    return dataclasses.replace(ChainSpec(), **kw)


def brute_hamiltonian(spec, xi, basis):
    """Independent loop-based assembly, used as an oracle for small systems."""
    eps = spec.eps0 + np.asarray(xi, dtype=float)
    if spec.barrier is not None:
        eps[spec.barrier[0] - 1] += spec.barrier[1]

    def hop(i, j):  # 0-based, i < j
        if spec.hopping == LONG_RANGE:
            return spec.t / (j - i)
        return spec.t if j == i + 1 else 0.0

    d = basis.dim
    H = np.zeros((d, d))
    for a, sa in enumerate(basis.states):
        H[a, a] = sum(eps[i] for i, n in enumerate(sa) if n)
        H[a, a] += spec.U * sum(
            1 for i in range(spec.L - 1) if sa[i] and sa[i + 1]
        )
        for b, sb in enumerate(basis.states):
            moved = [i for i in range(spec.L) if sa[i] != sb[i]]
            if len(moved) == 2 and sum(sa) == sum(sb):
                H[a, b] = -hop(moved[0], moved[1])
    return H


class TestChainSpec:
    def test_defaults_are_reference_chain(self):
        spec = ChainSpec()
        assert (spec.L, spec.eps0, spec.t) == (7, 43000.0, 145.0)
        assert (spec.gamma_inj, spec.gamma_ext) == (17.0, 17.0)
        assert (spec.i_inj, spec.i_ext, spec.n_max) == (1, 6, 1)

    @pytest.mark.parametrize("kw", [
        {"L": 0},
        {"n_max": 3},
        {"hopping": "hyperbolic"},
        {"W": -1.0},
        {"gamma_deph": -0.5},
        {"i_ext": 8},
        {"i_inj": 0},
        {"barrier": (9, 100.0)},
    ])
    def test_invalid_specs_rejected(self, kw):
        with pytest.raises(ValueError):
            make_spec(**kw)

    def test_eta(self):
        assert make_spec(gamma_inj=0.17).eta == pytest.approx(0.01)


class TestDisorder:
    def test_zero_strength_gives_zeros(self):
        spec = make_spec(W=0.0)
        real = model.sample_disorder(spec, 123, 5)
        assert np.all(real.xi == 0.0)

    def test_support_bounds(self):
        spec = make_spec(W=290.0)
        for r in range(200):
            xi = model.sample_disorder(spec, 7, r).xi
            assert xi.min() >= -145.0 and xi.max() <= 145.0

    def test_reproducible_and_order_independent(self):
        spec = make_spec(W=100.0)
        a = model.sample_disorder(spec, 42, 17).xi
        # draw other realizations in between; the keyed draw must not care
        model.sample_disorder(spec, 42, 3)
        model.sample_disorder(spec, 1, 17)
        b = model.sample_disorder(spec, 42, 17).xi
        assert np.array_equal(a, b)
        assert not np.array_equal(a, model.sample_disorder(spec, 42, 18).xi)
        assert not np.array_equal(a, model.sample_disorder(spec, 43, 17).xi)

    def test_seed_derivation_distinct(self):
        seeds = {model.realization_seed(9, r) for r in range(10_000)}
        assert len(seeds) == 10_000

    def test_sample_mean_matches_uniform_moments(self):
        # mean of n*L uniform draws on [-W/2, W/2]: sd = W/sqrt(12*n*L)
        spec = make_spec(W=145.0)
        n = 100_000
        total = 0.0
        for r in range(n):
            total += model.sample_disorder(spec, 2024, r).xi.sum()
        mean = total / (n * spec.L)
        bound = 3.0 * spec.W / np.sqrt(12.0 * n * spec.L)
        assert abs(mean) < bound


class TestHamiltonian:
    def test_reference_single_exciton_block(self):
        spec = ChainSpec()
        basis = spec.basis()
        H = model.build_hamiltonian(spec, model.zero_disorder(spec), basis)
        block = H[1:8, 1:8]
        assert np.all(np.diag(block) == 43000.0)
        assert np.all(np.diag(block, 1) == -145.0)
        assert np.all(np.diag(block, -1) == -145.0)
        assert np.all(block - np.diag(np.diag(block))
                      - np.diag(np.diag(block, 1), 1)
                      - np.diag(np.diag(block, -1), -1) == 0.0)
        # vacuum row/column carry no couplings and zero energy
        assert np.all(H[0, :] == 0.0) and np.all(H[:, 0] == 0.0)

    def test_long_range_coupling_is_t_over_distance(self):
        spec = make_spec(hopping=LONG_RANGE)
        basis = spec.basis()
        H = model.build_hamiltonian(spec, model.zero_disorder(spec), basis)
        s1, s3 = basis.index_of[(1, 0, 0, 0, 0, 0, 0)], basis.index_of[(0, 0, 1, 0, 0, 0, 0)]
        assert H[s1, s3] == -spec.t / 2

    def test_interaction_hits_adjacent_pairs_only(self):
        spec = make_spec(L=4, i_ext=3, n_max=2, U=30 * 145.0, W=50.0)
        basis = spec.basis()
        real = model.sample_disorder(spec, 11, 0)
        H = model.build_hamiltonian(spec, real, basis)
        adjacent = basis.index_of[(0, 1, 1, 0)]   # sites 2,3
        separated = basis.index_of[(0, 1, 0, 1)]  # sites 2,4
        xi = real.xi
        assert H[adjacent, adjacent] == pytest.approx(
            2 * spec.eps0 + xi[1] + xi[2] + spec.U, rel=1e-14)
        assert H[separated, separated] == pytest.approx(
            2 * spec.eps0 + xi[1] + xi[3], rel=1e-14)

    def test_hamiltonian_is_symmetric(self):
        spec = make_spec(n_max=2, W=300.0, U=100.0, hopping=LONG_RANGE)
        H = model.build_hamiltonian(spec, model.sample_disorder(spec, 3, 1), spec.basis())
        assert np.array_equal(H, H.T)

    def test_single_exciton_block_equals_single_particle_matrix(self):
        spec = make_spec(W=500.0, barrier=(4, 290.0))
        real = model.sample_disorder(spec, 8, 2)
        H = model.build_hamiltonian(spec, real, spec.basis())
        assert np.array_equal(H[1:8, 1:8], model.single_particle_hamiltonian(spec, real))

    @pytest.mark.parametrize("n_max", [1, 2])
    @pytest.mark.parametrize("hopping", ["nearest_neighbor", LONG_RANGE])
    @pytest.mark.parametrize("U", [0.0, 4350.0])
    def test_against_brute_force_oracle(self, n_max, hopping, U):
        for L in (2, 3, 4):
            spec = make_spec(L=L, n_max=n_max, hopping=hopping, U=U, W=250.0,
                             i_inj=1, i_ext=L)
            basis = spec.basis()
            real = model.sample_disorder(spec, 55, L)
            built = model.build_hamiltonian(spec, real, basis)
            assert np.allclose(built, brute_hamiltonian(spec, real.xi, basis),
                               rtol=0, atol=1e-12)

    def test_barrier_offsets_one_site(self):
        spec = make_spec(barrier=(4, 7200.0))
        H = model.build_hamiltonian(spec, model.zero_disorder(spec), spec.basis())
        diag = np.diag(H)[1:8]
        assert diag[3] == 43000.0 + 7200.0
        assert np.all(np.delete(diag, 3) == 43000.0)

    def test_basis_mismatch_rejected(self):
        spec = ChainSpec()
        with pytest.raises(ValueError):
            model.build_hamiltonian(spec, model.zero_disorder(spec),
                                    fock.enumerate_basis(6, 1))


class TestEigenStructure:
    def test_ordered_chain_closed_form(self):
        # open-chain eigenvalues eps0 - 2 t cos(n pi / (L+1))
        spec = ChainSpec()
        eig = model.eigen_decompose(spec, model.zero_disorder(spec))
        expected = np.sort(43000.0 - 2 * 145.0 * np.cos(np.arange(1, 8) * np.pi / 8))
        assert np.allclose(eig.values, expected, rtol=0, atol=1e-9)

    def test_orthonormality_and_residual(self):
        spec = make_spec(W=1000.0)
        real = model.sample_disorder(spec, 21, 4)
        eig = model.eigen_decompose(spec, real)
        gram = eig.vectors.T @ eig.vectors
        assert np.max(np.abs(gram - np.eye(7))) < 1e-10
        h = model.single_particle_hamiltonian(spec, real)
        resid = h @ eig.vectors - eig.vectors * eig.values
        assert np.max(np.abs(resid)) < 1e-8 * np.max(np.abs(h))

    def test_nodes_of_ordered_chain(self):
        eig = model.eigen_decompose(ChainSpec(), model.zero_disorder(ChainSpec()))
        # sine eigenvectors: site 6 hosts a node of mode 4, site 4 of modes 2, 4, 6
        assert abs(eig.vectors[5, 3]) < 1e-10
        for n in (1, 3, 5):
            assert abs(eig.vectors[3, n]) < 1e-10

    def test_long_range_has_no_node_at_drain(self):
        spec = make_spec(hopping=LONG_RANGE)
        eig = model.eigen_decompose(spec, model.zero_disorder(spec))
        assert np.min(np.abs(eig.vectors[5, :])) > 0.01


class TestIpr:
    def test_fully_localized_limit(self):
        spec = make_spec(t=0.0, W=145.0)
        eig = model.eigen_decompose(spec, model.sample_disorder(spec, 0, 0))
        assert model.ipr(eig) == 1.0 / 7.0

    def test_ordered_chain_matches_sine_oracle(self):
        # psi_n(i) = sqrt(2/(L+1)) sin(n pi i / (L+1)) for the open chain
        L = 7
        n = np.arange(1, L + 1)[None, :]
        i = np.arange(1, L + 1)[:, None]
        psi = np.sqrt(2.0 / (L + 1)) * np.sin(n * np.pi * i / (L + 1))
        expected = 1.0 / np.sum(psi**4)
        eig = model.eigen_decompose(ChainSpec(), model.zero_disorder(ChainSpec()))
        assert model.ipr(eig) == pytest.approx(expected, rel=1e-12)
