"""Diagonal semigroup realizations, fractional powers, and growth certificates.

A diagonal generator A acts mode-wise by real eigenvalues mu_n, so T(t) is
exact per-mode exponential scaling and the scale of fractional spaces
X_beta carries the weight (omega - mu_n)^beta.  The extrapolation space
X_{-1} is the beta = -1 member.  A small dense-matrix generator (bounded
operator, uniformly continuous semigroup) is provided for the finite ODE
mode of the solver; it shares the (M, lambda) growth-certificate interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

__all__ = [
    "DiagonalSemigroup",
    "DenseGenerator",
    "heat_dirichlet_semigroup",
]


def phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z with the z -> 0 limit, computed stably via expm1."""
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0.0
    out = np.where(nz, np.expm1(np.where(nz, z, 1.0)) / np.where(nz, z, 1.0), 1.0)
    return out


def phi2(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z^2 with the z -> 0 limit 1/2.

    For |z| below the cancellation threshold the quadratic Taylor term is
    used; relative error then stays below 1e-9.
    """
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-5
    zs = np.where(small, 1.0, z)
    main = (np.expm1(zs) - zs) / zs ** 2
    taylor = 0.5 + z / 6.0 + z ** 2 / 24.0
    return np.where(small, taylor, main)


@dataclass(frozen=True, eq=False)
class DiagonalSemigroup:
    """C0-semigroup generated by a diagonal operator with eigenvalues mu_n.

    M and lam certify |T(t)| <= M e^{lam t}; for a diagonal realization
    M = 1 and lam = max(0, max mu_n) is exact.  omega must exceed the
    growth bound omega0 = max mu_n so that omega*I - A is positive and
    the fractional powers (omega*I - A)^alpha are defined.  analytic marks
    generators with mu_n -> -inf fast enough that the smoothing norms
    t^alpha |(omega*I - A)^alpha T(t)| stay bounded; the diagonal heat
    family is the canonical instance.
    """

    mu: np.ndarray
    omega: float
    M: float = 1.0
    lam: Optional[float] = None
    analytic: bool = False

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).copy()
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        if mu.ndim != 1 or mu.shape[0] == 0:
            raise ValueError("eigenvalue list must be a nonempty vector")
        if not np.all(np.isfinite(mu)):
            raise ValueError("non-finite eigenvalues")
        if self.lam is None:
            object.__setattr__(self, "lam", float(max(0.0, np.max(mu))))
        if self.M < 1.0:
            raise ValueError("growth constant M must be >= 1")
        if self.omega <= np.max(mu):
            raise ValueError(
                f"omega={self.omega} must exceed the growth bound {np.max(mu)}"
            )
        # smoothing constants are re-requested per bisection candidate
        object.__setattr__(self, "_sc_cache", {})

    @property
    def n_modes(self) -> int:
        return self.mu.shape[0]

    @property
    def omega0(self) -> float:
        """Growth bound of the truncated generator."""
        return float(np.max(self.mu))

    def apply_T(self, t: float, coeffs: np.ndarray) -> np.ndarray:
        """T(t) x, exact per mode."""
        if t < 0:
            raise ValueError("semigroup time must be nonnegative")
        return np.exp(self.mu * t) * np.asarray(coeffs, float)

    def frac_weights(self, alpha: float) -> np.ndarray:
        """Mode weights (omega - mu_n)^alpha for alpha in [-1, 1]."""
        if not -1.0 <= alpha <= 1.0:
            raise ValueError("fractional order limited to [-1, 1]")
        base = self.omega - self.mu
        if np.any(base <= 0.0):
            raise ValueError("omega below the growth bound of some mode")
        return base ** alpha

    def apply_fractional(self, alpha: float, coeffs: np.ndarray) -> np.ndarray:
        """(omega*I - A)^alpha x.  alpha = -1 maps X onto X_{-1} coordinates."""
        return self.frac_weights(alpha) * np.asarray(coeffs, float)

    def norm_beta(self, coeffs: np.ndarray, beta: float = 0.0) -> float:
        """Norm of the X_beta member of the fractional scale, beta in [-1, 1]."""
        if beta == 0.0:
            return float(np.linalg.norm(coeffs))
        return float(np.linalg.norm(self.apply_fractional(beta, coeffs)))

    def frac_T_norm(self, alpha: float, t: float) -> float:
        """Operator norm |(omega*I - A)^alpha T(t)| = max_n (omega-mu_n)^alpha e^{mu_n t}.

        Requires an analytic realization for alpha > 0 and errors at t = 0
        where the unbounded fractional power alone has no finite norm.
        """
        if not 0.0 <= alpha < 1.0:
            raise ValueError("smoothing norm defined for alpha in [0, 1)")
        if alpha > 0.0 and not self.analytic:
            raise ValueError("fractional smoothing norms need an analytic semigroup")
        if t < 0.0:
            raise ValueError("negative time")
        if t == 0.0:
            if alpha > 0.0:
                raise ValueError("unbounded at t = 0 for alpha > 0")
            return float(np.max(np.exp(self.mu * 0.0)))
        return float(np.max(self.frac_weights(alpha) * np.exp(self.mu * t)))

    def smoothing_constant(self, beta: float, kappa: Optional[float] = None,
                           t_max: float = 1.0) -> float:
        """Empirical constant C with |(omega*I-A)^beta T(t)| <= C t^-beta e^{kappa t}.

        Reported as the sup of t^beta * frac_T_norm(beta, t) * e^{-kappa t}
        over an octave-subdivided dyadic grid in (0, t_max]; kappa defaults
        to omega0 + 1.
        """
        if kappa is None:
            kappa = self.omega0 + 1.0
        if beta == 0.0:
            return self.M
        key = (beta, kappa, t_max)
        cached = self._sc_cache.get(key)
        if cached is not None:
            return cached
        worst = 0.0
        for j in range(0, 48):
            base = t_max * 2.0 ** (-j)
            for frac in np.linspace(1.0, 1.9375, 16):
                t = base * frac
                if t > t_max * (1 + 1e-12):
                    continue
                v = t ** beta * self.frac_T_norm(beta, t) * np.exp(-kappa * t)
                worst = max(worst, v)
        self._sc_cache[key] = worst
        return worst

    def sg_distance(self, t: float, coeffs: np.ndarray, alpha: float = 0.0) -> float:
        """|(T(t) - I) x| in the X_alpha norm; the strong-continuity modulus."""
        w = 1.0 if alpha == 0.0 else self.frac_weights(alpha)
        return float(np.linalg.norm(w * (np.exp(self.mu * t) - 1.0) * np.asarray(coeffs, float)))


@dataclass(frozen=True, eq=False)
class DenseGenerator:
    """Bounded generator given by a small dense matrix A.

    Generates the uniformly continuous semigroup e^{At}; the growth
    certificate uses the 2-logarithmic norm: |e^{At}| <= e^{mu2(A) t}
    with mu2 = lambda_max((A + A^T)/2), so M = 1 and lam = max(0, mu2).
    Every operator into this finite state space is bounded, so X_{-1} = X.
    """

    A: np.ndarray
    M: float = 1.0
    lam: Optional[float] = None
    analytic: bool = False

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).copy()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("generator matrix must be square")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        if self.lam is None:
            mu2 = float(np.max(np.linalg.eigvalsh(0.5 * (A + A.T))))
            object.__setattr__(self, "lam", max(0.0, mu2))

    @property
    def n_modes(self) -> int:
        return self.A.shape[0]

    @property
    def omega0(self) -> float:
        return float(np.max(np.linalg.eigvals(self.A).real))

    def apply_T(self, t: float, coeffs: np.ndarray) -> np.ndarray:
        if t < 0:
            raise ValueError("semigroup time must be nonnegative")
        return scipy.linalg.expm(self.A * t) @ np.asarray(coeffs, float)

    def propagators(self, h: float):
        """(E, P1, P2) with E = e^{Ah}, P1 = int_0^h e^{A(h-s)} ds and
        P2 = int_0^h e^{A(h-s)} (s/h) ds, via one augmented expm (Van Loan).
        """
        n = self.n_modes
        G = np.zeros((3 * n, 3 * n))
        G[:n, :n] = self.A
        G[:n, n : 2 * n] = np.eye(n)
        G[n : 2 * n, 2 * n :] = np.eye(n)
        F = scipy.linalg.expm(G * h)
        E = F[:n, :n]
        P1 = F[:n, n : 2 * n]
        # the (1,3) block is int e^{A(h-s)} s ds
        P2 = F[:n, 2 * n :] / h if h > 0 else np.zeros((n, n))
        return E, P1, P2

    def sg_distance(self, t: float, coeffs: np.ndarray, alpha: float = 0.0) -> float:
        if alpha != 0.0:
            raise ValueError("fractional scale not defined for the dense ODE mode")
        x = np.asarray(coeffs, float)
        return float(np.linalg.norm(self.apply_T(t, x) - x))


def heat_dirichlet_semigroup(n_modes: int, omega: float = 1.0) -> DiagonalSemigroup:
    """Dirichlet Laplacian on (0, pi) in the sine eigenbasis: mu_n = -n^2.

    The default omega = 1 gives the fractional weights (1 + n^2)^alpha.
    """
    n = np.arange(1, n_modes + 1, dtype=float)
    return DiagonalSemigroup(mu=-(n ** 2), omega=omega, M=1.0, lam=0.0, analytic=True)


SEMIGROUP_FAMILIES = {
    "dirichlet_laplacian_0_pi": heat_dirichlet_semigroup,
}
