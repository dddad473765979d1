from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import kron_lyapunov, random_stable

from celsteer.dynamics import (build_diffusion, build_drift, char_poly, effective_linewidths,
                               eigen_stability, hurwitz_determinants, is_marginal, is_psd,
                               lyapunov_residual, solve_lyapunov, stability_report)
from celsteer.errors import NotPositiveSemidefinite, UnstableError
from celsteer.exact import char_poly_exact, hurwitz_determinants_exact, hurwitz_matrix
from celsteer.gain import compute_xi
from celsteer.params import GainMediumParams, reference_defaults


def _params(x=6.0, g=(0.25, 0.25), n=(15.0, 5.0)):
    return reference_defaults(omega_over_gamma=x, g_over_wm=g, n_th=n)


def test_drift_sparsity_and_entries():
    p = _params()
    xi = compute_xi(p.gain)
    k = build_drift(p, xi)
    assert np.count_nonzero(k) == 20
    g1 = 0.25 * p.mirror_1.omega_m
    g2 = 0.25 * p.mirror_2.omega_m
    # 1-based (row, col) -> value
    expect = {(1, 6): -g1, (2, 5): g1, (3, 8): -g2, (4, 7): g2, (5, 2): -g1, (6, 1): g1,
              (7, 4): -g2, (8, 3): g2, (5, 7): xi.xi12, (6, 8): -xi.xi12,
              (7, 5): -xi.xi21, (8, 6): xi.xi21}
    for (i, j), v in expect.items():
        assert k[i - 1, j - 1] == v
    kb1, kb2 = effective_linewidths(p, xi)
    assert kb1 == p.cavity_1.kappa - xi.xi11
    assert kb2 == p.cavity_2.kappa + xi.xi22
    gm = p.mirror_1.gamma_m
    assert np.array_equal(np.diag(k), [-gm, -gm, -gm, -gm, -kb1, -kb1, -kb2, -kb2])


def test_drift_decoupled_is_diagonal():
    p = _params(x=0.0, g=(0.0, 0.0))
    k = build_drift(p)
    assert np.count_nonzero(k - np.diag(np.diag(k))) == 0


def test_diffusion_structure():
    p = _params()
    xi = compute_xi(p.gain)
    r = build_diffusion(p, xi)
    assert np.array_equal(r, r.T)
    assert r[0, 0] == pytest.approx(31 * p.mirror_1.gamma_m)
    assert r[2, 2] == pytest.approx(11 * p.mirror_2.gamma_m)
    half = 0.5 * (xi.xi12 + xi.xi21)
    assert r[4, 6] == -half and r[5, 7] == half
    assert r[4, 4] == p.cavity_1.kappa + xi.xi11
    assert np.all(r[:4, 4:] == 0)


def test_diffusion_vacuum_baths():
    p = _params(x=0.0, n=(0.0, 0.0))
    p = replace(p, gain=GainMediumParams(0.0, 1.7e6, 0.0))
    r = build_diffusion(p)
    gm, kap = p.mirror_1.gamma_m, p.cavity_1.kappa
    assert np.array_equal(r, np.diag([gm, gm, gm, gm, kap, kap, kap, kap]))


@given(x=st.floats(0.0, 200.0), log_kappa=st.floats(-3.0, 8.0))
def test_diffusion_psd_over_drive_range(x, log_kappa):
    p = _params(x=x)
    p = replace(p, cavity_1=replace(p.cavity_1, kappa=10**log_kappa),
                cavity_2=replace(p.cavity_2, kappa=10**log_kappa))
    assert is_psd(build_diffusion(p, strict=True))


def test_is_psd_flags_indefinite():
    r = np.diag([1.0, 1.0, -1e-3])
    assert not is_psd(r)
    assert is_psd(np.diag([1.0, 0.0, -1e-14]))


def test_lyapunov_scalar_drift():
    rng = np.random.default_rng(3)
    b = rng.normal(size=(8, 8))
    r = b @ b.T
    v = solve_lyapunov(-2.5 * np.eye(8), r)
    assert np.allclose(v, r / 5.0, rtol=1e-13, atol=0)


def test_lyapunov_two_by_two_reference():
    # exact solution worked out by hand from the four scalar equations
    k = np.array([[-1.0, 0.5], [0.0, -2.0]])
    v = solve_lyapunov(k, np.eye(2))
    assert np.allclose(v, [[25 / 48, 1 / 24], [1 / 24, 1 / 4]], rtol=1e-12, atol=1e-15)
    assert np.allclose(kron_lyapunov(k, np.eye(2)), v, rtol=1e-12, atol=1e-15)


def test_lyapunov_matches_kronecker_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        k, r = random_stable(rng)
        v = solve_lyapunov(k, r)
        ref = kron_lyapunov(k, r)
        assert np.linalg.norm(v - ref) / np.linalg.norm(ref) < 1e-10
        assert lyapunov_residual(k, v, r) < 1e-10
        assert np.array_equal(v, v.T)


def test_lyapunov_rejects_unstable():
    with pytest.raises(UnstableError) as err:
        solve_lyapunov(np.diag([-1.0, 0.5]), np.eye(2))
    assert err.value.max_real_eig == pytest.approx(0.5)


def test_decoupled_mirrors_are_thermal():
    p = _params(x=0.0, g=(0.0, 0.0))
    k, r = build_drift(p), build_diffusion(p)
    v = solve_lyapunov(k, r)
    assert np.allclose(v[:2, :2], 15.5 * np.eye(2), atol=1e-10)
    assert np.allclose(v[2:4, 2:4], 5.5 * np.eye(2), atol=1e-10)


def test_eigen_stability_examples():
    assert eigen_stability(np.diag(-np.arange(1.0, 9.0))) == (-1.0, True)
    p = _params(x=6.0, g=(0.0, 0.0))
    xi = compute_xi(p.gain)
    assert xi.xi11 > p.cavity_1.kappa
    assert not eigen_stability(build_drift(p, xi))[1]


def test_char_poly_small():
    assert np.allclose(char_poly(np.diag([-1.0, -2.0])), [1, 3, 2])
    assert np.allclose(char_poly(np.diag([-1.0, -2.0]), exact=False), [1, 3, 2])


def test_char_poly_trace_identity():
    p = _params()
    k = build_drift(p)
    a = char_poly(k)
    assert a[1] == pytest.approx(-np.trace(k), rel=1e-14)


def test_char_poly_roots_match_eigenvalues():
    rng = np.random.default_rng(5)
    for _ in range(20):
        k, _ = random_stable(rng)
        roots = np.sort_complex(np.roots(char_poly(k)))
        eig = np.sort_complex(np.linalg.eigvals(k))
        assert np.allclose(roots, eig, rtol=1e-8, atol=1e-8 * np.abs(eig).max())


def test_exact_char_poly_is_exact():
    k = np.array([[0.5, 0.25], [-0.125, 3.0]])
    a = char_poly_exact(k)
    assert a == [1, Fraction(-7, 2), Fraction(3, 2) + Fraction(1, 32)]


def test_hurwitz_examples():
    assert np.allclose(hurwitz_determinants([1.0, 3.0, 2.0]), [3.0, 6.0])
    h = hurwitz_determinants([1.0, 0.0, 1.0])
    assert h[0] == 0.0
    assert hurwitz_matrix([1, 3, 2]) == [[3, 0], [1, 2]]


def test_hurwitz_float_kernel_agrees_on_easy_polynomial():
    a = np.poly(-np.arange(1.0, 9.0))
    assert np.allclose(hurwitz_determinants(a, exact=False), hurwitz_determinants(a), rtol=1e-9)


@given(st.lists(st.floats(-3.0, -0.05), min_size=2, max_size=8))
def test_hurwitz_positive_for_stable_real_roots(roots):
    a = [Fraction(1)]
    for root in roots:
        # multiply by (x - root) exactly
        a = [x - Fraction(root) * y for x, y in zip(a + [0], [0] + a)]
    assert all(m > 0 for m in hurwitz_determinants_exact(a))


@given(st.integers(0, 10_000))
def test_rh_agrees_with_eigen_on_random_matrices(seed):
    rng = np.random.default_rng(seed)
    k = rng.normal(size=(8, 8)) - rng.uniform(-0.5, 3.0) * np.eye(8)
    rep = stability_report(k)
    assert rep.agree or rep.in_boundary_band()


def test_stability_report_reference_point():
    p = _params(x=0.0)
    rep = stability_report(build_drift(p))
    assert rep.stable_by_eig and rep.stable_by_rh and rep.agree
    assert rep.char_coeffs[0] == 1.0
    assert len(rep.hurwitz) == 8
    unstable = stability_report(build_drift(_params(x=6.0)))
    assert not unstable.stable_by_eig and not unstable.stable_by_rh


def test_marginal_band():
    assert is_marginal(-1e-4, 1e6)
    assert not is_marginal(-1.0, 1e6)
    assert not is_marginal(0.0, 1e6)
