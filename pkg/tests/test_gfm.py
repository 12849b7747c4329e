import numpy as np
import pytest

from gfmarkov import (
    NotAperiodicError,
    NotIrreducibleError,
    ReferenceDegenerateError,
    SeriesDivergentError,
    fundamental_matrix,
    potentials,
    potentials_classic,
    potentials_reference_level,
    reference_vector,
    renormalize_potentials,
    series_fundamental,
    spectral_radius_estimate,
    stationary,
    uniform_reference,
    validate_stochastic,
    verify_spectral_shift,
)
from gfmarkov._linalg import small_matrix_eigenvalues
from gfmarkov.errors import ReferenceNotDistributionLikeError

from conftest import (
    oracle_potentials,
    oracle_stationary,
    random_chain,
    random_periodic_chain,
    random_reference,
    spectra_gap,
)

SYM = validate_stochastic([[0.5, 0.5], [0.5, 0.5]])
LOPSIDED = validate_stochastic([[0.9, 0.1], [0.2, 0.8]])
E1 = reference_vector([1.0, 0.0])
HALF = reference_vector([0.5, 0.5])


class TestFundamentalMatrix:
    def test_hand_inverted_2x2(self):
        # (I - P + e r) = [[1.5, -0.5], [0.5, 0.5]], det 1
        fm = fundamental_matrix(SYM, E1)
        assert np.abs(fm.Z - [[0.5, 0.5], [-0.5, 1.5]]).max() < 1e-14

    def test_identity_when_shift_cancels(self):
        fm = fundamental_matrix(SYM, HALF)
        assert np.abs(fm.Z - np.eye(2)).max() < 1e-14

    def test_one_state(self):
        fm = fundamental_matrix(validate_stochastic([[1.0]]),
                                reference_vector([1.0]))
        assert fm.Z[0, 0] == pytest.approx(1.0)

    def test_matches_generic_inverse(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            r = random_reference(rng, n)
            fm = fundamental_matrix(P, reference_vector(r))
            M = np.eye(n) - P.matrix + np.outer(np.ones(n), r)
            assert np.abs(fm.Z - np.linalg.inv(M)).max() < 1e-10

    def test_inverse_identity_residual(self):
        rng = np.random.default_rng(29)
        for n in range(2, 17):
            P = random_chain(rng, n)
            r = reference_vector(random_reference(rng, n))
            fm = fundamental_matrix(P, r)
            M = np.eye(n) - P.matrix + np.outer(np.ones(n), r.values)
            assert np.abs(M @ fm.Z - np.eye(n)).max() <= 1e-10 * n

    def test_z_times_ones(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            r = reference_vector(random_reference(rng, n))
            Z = fundamental_matrix(P, r).Z
            resid = np.abs(Z @ np.ones(n) - 1.0 / r.dot_with_ones).max()
            assert resid < 1e-10 * n

    def test_rejects_reducible(self):
        P = validate_stochastic([[1, 0], [0.5, 0.5]])
        with pytest.raises(NotIrreducibleError):
            fundamental_matrix(P, E1)

    def test_allow_unchecked_skips_structure(self):
        P = validate_stochastic([[1, 0], [0.5, 0.5]])
        fm = fundamental_matrix(P, E1, allow_unchecked=True)
        assert np.isfinite(fm.Z).all()


class TestStationary:
    def test_hand_value_sym(self):
        assert np.abs(stationary(SYM, E1).pi - [0.5, 0.5]).max() < 1e-14

    def test_against_oracle(self):
        expect = oracle_stationary(np.asarray(LOPSIDED.matrix))
        assert np.abs(expect - [2 / 3, 1 / 3]).max() < 1e-12
        for r in (E1, HALF, reference_vector([0.2, 1.1])):
            assert np.abs(stationary(LOPSIDED, r).pi - expect).max() < 1e-10

    def test_one_state_any_reference(self):
        pi = stationary(validate_stochastic([[1.0]]), reference_vector([5.0]))
        assert pi.pi[0] == pytest.approx(1.0)

    def test_r_invariance_and_identities(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            r1 = reference_vector(random_reference(rng, n))
            r2 = reference_vector(random_reference(rng, n))
            pi1 = stationary(P, r1).pi
            pi2 = stationary(P, r2).pi
            assert np.abs(pi1 - pi2).max() < 1e-8
            assert np.abs(pi1 @ P.matrix - pi1).max() <= 1e-8
            assert abs(pi1.sum() - 1.0) <= 1e-8
            assert pi1.min() >= 0.0

    def test_periodic_chain_still_solvable(self):
        # direct solves only need irreducibility
        P = random_periodic_chain(4)
        pi = stationary(P, uniform_reference(4)).pi
        assert np.abs(pi - 0.25).max() < 1e-10


class TestPotentials:
    def test_hand_values(self):
        sol = potentials(SYM, [1.0, 0.0], E1)
        assert np.abs(sol.g - [0.5, -0.5]).max() < 1e-14
        assert sol.eta == pytest.approx(0.5)

    def test_shift_cancellation_gives_f(self):
        sol = potentials(SYM, [1.0, 0.0], HALF)
        assert np.abs(sol.g - [1.0, 0.0]).max() < 1e-14
        assert sol.eta == pytest.approx(0.5)

    def test_one_state(self):
        for c in (-2.5, 0.0, 3.0):
            sol = potentials(validate_stochastic([[1.0]]), [c],
                             reference_vector([1.0]))
            assert sol.g[0] == pytest.approx(c)
            assert sol.eta == pytest.approx(c)

    def test_against_poisson_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            f = rng.uniform(-1, 1, size=n)
            r = random_reference(rng, n)
            g_exp, eta_exp = oracle_potentials(np.asarray(P.matrix), f, r)
            sol = potentials(P, f, reference_vector(r))
            assert abs(sol.eta - eta_exp) < 1e-9
            assert np.abs(sol.g - g_exp).max() < 1e-8

    def test_poisson_residual_and_normalization(self):
        rng = np.random.default_rng(43)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            f = rng.uniform(-1, 1, size=n)
            r = reference_vector(random_reference(rng, n))
            sol = potentials(P, f, r)
            resid = sol.g - f + sol.eta - P.matrix @ sol.g
            assert np.abs(resid).max() <= 1e-8
            assert abs(r.values @ sol.g - sol.eta) <= 1e-10 * n

    def test_constant_offset_family(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            f = rng.uniform(-1, 1, size=n)
            s1 = potentials(P, f, reference_vector(random_reference(rng, n)))
            s2 = potentials(P, f, reference_vector(random_reference(rng, n)))
            diff = s1.g - s2.g
            assert diff.max() - diff.min() <= 1e-8
            assert abs(s1.eta - s2.eta) <= 1e-8

    def test_eta_equals_stationary_reward(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            f = rng.uniform(-1, 1, size=n)
            r = reference_vector(random_reference(rng, n))
            sol = potentials(P, f, r)
            pi = stationary(P, r).pi
            assert abs(sol.eta - pi @ f) <= 1e-8


class TestPotentialsClassic:
    def test_sym_chain(self):
        # pi = (0.5, 0.5); solving with r = pi gives g = (1, 0), pi.g = eta
        sol = potentials_classic(SYM, [1.0, 0.0])
        assert np.abs(sol.g - [1.0, 0.0]).max() < 1e-12
        assert sol.eta == pytest.approx(0.5)
        assert sol.reference.values @ sol.g == pytest.approx(sol.eta)

    def test_one_state(self):
        sol = potentials_classic(validate_stochastic([[1.0]]), [3.0])
        assert sol.g[0] == pytest.approx(3.0)
        assert sol.eta == pytest.approx(3.0)

    def test_lopsided_eta_and_residual(self):
        sol = potentials_classic(LOPSIDED, [1.0, 0.0])
        assert sol.eta == pytest.approx(2 / 3, abs=1e-12)
        resid = sol.g - [1.0, 0.0] + sol.eta - LOPSIDED.matrix @ sol.g
        assert np.abs(resid).max() < 1e-12

    def test_equals_renormalized_generic_solution(self):
        rng = np.random.default_rng(59)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            f = rng.uniform(-1, 1, size=n)
            r = reference_vector(random_reference(rng, n))
            classic = potentials_classic(P, f)
            pi = stationary(P, r).pi
            shifted = renormalize_potentials(potentials(P, f, r), pi)
            assert np.abs(classic.g - shifted.g).max() <= 1e-8


class TestRenormalize:
    def test_hand_shift(self):
        sol = potentials(SYM, [1.0, 0.0], HALF)  # g = (1, 0), eta = 0.5
        out = renormalize_potentials(sol, E1)
        assert np.abs(out.g - [0.5, -0.5]).max() < 1e-14
        assert out.eta == sol.eta

    def test_already_normalized_is_identity(self):
        sol = potentials(SYM, [1.0, 0.0], E1)
        out = renormalize_potentials(sol, E1)
        assert np.array_equal(out.g, sol.g)

    def test_degenerate_target_rejected(self):
        sol = potentials(SYM, [1.0, 0.0], E1)
        with pytest.raises(ReferenceDegenerateError):
            renormalize_potentials(sol, [0.5, -0.5])


class TestSeriesFundamental:
    def test_zero_matrix_terms_zero(self):
        fm = series_fundamental(SYM, HALF, 0)
        assert np.array_equal(fm.Z, np.eye(2))
        assert fm.tail_norm == 0.0

    def test_converges_to_direct_solve(self):
        exact = fundamental_matrix(SYM, E1).Z
        fm = series_fundamental(SYM, E1, 50)
        assert np.abs(fm.Z - exact).max() < 1e-10

    def test_divergent_outside_interval(self):
        for re_target in (-0.5, 2.0, 2.5):
            r = reference_vector(np.array([0.6, 0.4]) * re_target)
            with pytest.raises(SeriesDivergentError):
                series_fundamental(LOPSIDED, r, 10)

    def test_inside_interval_accepted(self):
        for re_target in (0.5, 1.0, 1.5):
            r = reference_vector(np.array([0.6, 0.4]) * re_target)
            fm = series_fundamental(LOPSIDED, r, 200)
            exact = fundamental_matrix(LOPSIDED, r).Z
            assert np.abs(fm.Z - exact).max() < 1e-8

    def test_periodic_chain_refused(self):
        P = random_periodic_chain(3)
        with pytest.raises(NotAperiodicError):
            series_fundamental(P, uniform_reference(3), 10)

    def test_tail_bound_controls_error(self):
        rng = np.random.default_rng(61)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            P = random_chain(rng, n)
            r = reference_vector(random_reference(rng, n, 0.3, 1.7))
            exact = fundamental_matrix(P, r).Z
            for terms in (8, 32, 128):
                fm = series_fundamental(P, r, terms)
                if fm.tail_norm < 1e-8:
                    assert np.abs(fm.Z - exact).max() < 1e-8


class TestReferenceLevel:
    def test_fast_mixing_chain(self):
        # exact potentials normalized to r.g = 0 are (0, -1) here
        sol = potentials_reference_level(SYM, [1.0, 0.0], E1, 30)
        assert np.abs(sol.g - [0.0, -1.0]).max() < 1e-9
        assert sol.eta == pytest.approx(0.5)
        assert float(np.array([1.0, 0.0]) @ sol.g) == pytest.approx(0.0, abs=1e-12)

    def test_constant_reward_gives_zero(self):
        for c in (0.7, -2.0):
            sol = potentials_reference_level(SYM, [c, c], E1, 5)
            assert np.abs(sol.g).max() < 1e-12

    def test_error_decreases_with_horizon(self):
        f = np.array([1.0, 0.0])
        exact = potentials(LOPSIDED, f, E1)
        target = exact.g - float(np.array([1.0, 0.0]) @ exact.g)
        errs = []
        for T in (1, 30):
            sol = potentials_reference_level(LOPSIDED, f, E1, T)
            errs.append(np.abs(sol.g - target).max())
        assert errs[1] < errs[0]

    def test_matches_exact_once_mixed(self):
        rng = np.random.default_rng(67)
        checked = 0
        for _ in range(10):
            n = int(rng.integers(2, 6))
            P = random_chain(rng, n, floor=0.1)
            f = rng.uniform(-1, 1, size=n)
            r_raw = rng.dirichlet(np.ones(n))
            r = reference_vector(r_raw)
            pi = stationary(P, r).pi
            T = 40
            mixing = np.abs(np.linalg.matrix_power(P.matrix, T)
                            - np.outer(np.ones(n), pi)).max()
            if mixing > 1e-9:
                continue
            sol = potentials_reference_level(P, f, r, T)
            exact = potentials(P, f, r)
            target = exact.g - float(r.values @ exact.g) / r.dot_with_ones
            assert np.abs(sol.g - target).max() <= 1e-8
            checked += 1
        assert checked >= 5

    def test_requires_unit_mass_reference(self):
        with pytest.raises(ReferenceNotDistributionLikeError):
            potentials_reference_level(SYM, [1.0, 0.0],
                                       reference_vector([1.0, 0.5]), 10)


class TestSpectralRadius:
    def test_zero_matrix(self):
        assert spectral_radius_estimate(np.zeros((3, 3))).value == 0.0

    def test_nilpotent_two_state(self):
        M = SYM.matrix - np.outer(np.ones(2), [1.0, 0.0])
        assert np.abs(M @ M).max() == 0.0
        assert spectral_radius_estimate(M, 100, 0).value == 0.0

    def test_known_two_state_value(self):
        # eigenvalues of P - e r are {1 - r.e, 0.7} = {-0.5, 0.7}
        r = np.array([0.75, 0.75])
        M = LOPSIDED.matrix - np.outer(np.ones(2), r)
        est = spectral_radius_estimate(M, 300, 0)
        assert est.value == pytest.approx(0.7, abs=1e-9)
        assert float(est) < 1.0

    def test_divergence_boundary(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            P = random_chain(rng, n)
            for re_target in (-1e-12, 1e-12, 2.0 + 1e-6):
                r = random_reference(rng, n, 0.5, 1.5)
                r = r * (re_target / r.sum())
                M = P.matrix - np.outer(np.ones(n), r)
                est = spectral_radius_estimate(M, 600, 1)
                assert est.value >= 1.0 - 1e-6


class TestVerifySpectralShift:
    def test_sym_chain_double_unit_eigenvalue(self):
        rep = verify_spectral_shift(SYM, E1)
        assert rep.passed
        spectrum = small_matrix_eigenvalues(
            np.eye(2) - SYM.matrix + np.outer(np.ones(2), E1.values))
        assert sorted(x.real for x in spectrum) == pytest.approx([1.0, 1.0])

    def test_lopsided_expected_spectrum(self):
        rep = verify_spectral_shift(LOPSIDED, HALF)
        assert rep.passed
        spectrum = small_matrix_eigenvalues(
            np.eye(2) - LOPSIDED.matrix + np.outer(np.ones(2), HALF.values))
        assert sorted(x.real for x in spectrum) == pytest.approx([0.3, 1.0])

    def test_ones_identity_any_size(self):
        rng = np.random.default_rng(73)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = random_chain(rng, n)
            r = reference_vector(random_reference(rng, n))
            rep = verify_spectral_shift(P, r)
            assert rep.checks[0].name == "ones_column_eigenvector"
            assert rep.checks[0].passed

    def test_small_sizes_against_numpy_eigensolver(self):
        rng = np.random.default_rng(79)
        for n in (2, 3):
            for _ in range(20):
                P = random_chain(rng, n)
                r = random_reference(rng, n)
                rep = verify_spectral_shift(P, reference_vector(r))
                assert rep.passed, [c for c in rep.checks if not c.passed]
                M = np.eye(n) - P.matrix + np.outer(np.ones(n), r)
                ours = small_matrix_eigenvalues(M)
                theirs = np.linalg.eigvals(M)
                assert spectra_gap(ours, theirs) < 1e-8


class TestClosedFormRoots:
    def test_constructed_polynomials(self):
        rng = np.random.default_rng(83)
        for _ in range(50):
            roots = rng.uniform(-2, 2, size=3)
            M = np.diag(roots) + np.triu(rng.normal(size=(3, 3)), 1)
            ours = small_matrix_eigenvalues(M)
            assert spectra_gap(ours, roots.astype(complex)) < 1e-9

    def test_complex_pair(self):
        M = np.array([[0.0, -1.0], [1.0, 0.0]])  # eigenvalues +-i
        ours = small_matrix_eigenvalues(M)
        assert spectra_gap(ours, np.array([1j, -1j])) < 1e-12

    def test_rotation_3x3(self):
        c, s = np.cos(0.7), np.sin(0.7)
        M = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
        assert spectra_gap(small_matrix_eigenvalues(M),
                           np.linalg.eigvals(M)) < 1e-10
