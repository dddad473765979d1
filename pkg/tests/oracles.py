"""Independent reference implementations used only by the tests."""
import numpy as np
import scipy.linalg


def kron_lyapunov(k, r):
    """Brute-force solve of K V + V K^T = -R through the n^2 x n^2 Kronecker system."""
    n = k.shape[0]
    eye = np.eye(n)
    big = np.kron(eye, k) + np.kron(k, eye)
    vec = np.linalg.solve(big, -r.reshape(-1, order="F"))
    return vec.reshape((n, n), order="F")


def symplectic_form(n_modes):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def random_symplectic(rng, n_modes, scale=0.6):
    """exp(J H) with H symmetric is symplectic."""
    h = rng.normal(scale=scale, size=(2 * n_modes, 2 * n_modes))
    h = 0.5 * (h + h.T)
    return scipy.linalg.expm(symplectic_form(n_modes) @ h)


def random_physical_cov(rng, n_modes=2, scale=0.6):
    """Covariance with vacuum I/2: S diag(nu) S^T / 2 with every nu >= 1."""
    s = random_symplectic(rng, n_modes, scale)
    nu = 1.0 + rng.exponential(1.0, size=n_modes)
    d = np.repeat(nu, 2)
    return 0.5 * (s * d) @ s.T


def random_stable(rng, n=8):
    """Random Hurwitz matrix and PSD right-hand side."""
    a = rng.normal(size=(n, n))
    shift = np.max(np.linalg.eigvals(a).real) + rng.uniform(0.1, 2.0)
    k = a - shift * np.eye(n)
    b = rng.normal(size=(n, n))
    return k, b @ b.T


def tmsv(r):
    """Two-mode squeezed vacuum, vacuum = I/2."""
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    v = np.zeros((4, 4))
    v[:2, :2] = v[2:, 2:] = c * np.eye(2)
    v[:2, 2:] = v[2:, :2] = s * np.diag([1.0, -1.0])
    return v
