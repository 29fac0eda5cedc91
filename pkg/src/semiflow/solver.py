"""Mild-solution engine: contraction-certified Picard windows chained by the
cocycle property.

On each window [0, t1] the fixed-point map

    Phi_u(x)(tau) = T(tau) x0 + int_0^tau T_{-1}(tau - s) B u(s) ds
                  + int_0^tau T_{-1}(tau - s) B2 f(x(s), u(s)) ds

is iterated from the free evolution T(tau) x0.  The window length is chosen
so that the zero-class admissibility constant of the B2 channel times the
local Lipschitz constant stays below the contraction target, and so that
the invariance ball around the window's start state is certified.  The
linear terms are integrated exactly per mode; the nonlinear term uses
piecewise-linear-in-time reconstruction of the f samples with exact
per-mode exponential integration, so the only discretization error is the
O(h^2) reconstruction error.

In analytic mode the iteration runs on y = (omega*I - A)^alpha x with the
singular-kernel window certificate; a bounded-generator dense-matrix mode
covers finite ODE systems with the same code path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.special

from .core import InputSignal, Nonlinearity, SpectralState
from .semigroup import DiagonalSemigroup, DenseGenerator, phi1, phi2
from .admissibility import (
    Bounded,
    InputOperator,
    QAdmissible,
    SmoothClass,
    c_constant,
    convolve,
    ladder_divergence_ratio,
    upper_bound_h,
    _upper_bound_truncation,
)

__all__ = [
    "EvolutionSystem",
    "SolverConfig",
    "PolySignal",
    "Status",
    "WindowDiagnostics",
    "Trajectory",
    "StepSelectionError",
    "select_step",
    "picard_window",
    "solve",
    "solve_analytic",
    "global_bound",
    "trajectory_to_csv",
    "trajectory_diagnostics_json",
]


class StepSelectionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PolySignal:
    """Smooth input u(t) = sum_k p_k t^k with vector coefficients p_k.

    The polynomial representation keeps the input convolution exact (the
    kernel integrals have closed forms), which the boundary-system
    representation cross-check depends on.  Degree is capped at 4.
    """

    coeffs: np.ndarray  # (deg+1, m)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.shape[0] > 5:
            raise ValueError("polynomial inputs capped at degree 4")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def m(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def horizon(self) -> float:
        return math.inf

    def value(self, t: float) -> np.ndarray:
        out = np.zeros(self.m)
        for k in range(self.coeffs.shape[0] - 1, -1, -1):
            out = out * t + self.coeffs[k]
        return out

    def value_left(self, t: float) -> np.ndarray:
        return self.value(t)

    def derivative(self) -> "PolySignal":
        if self.degree == 0:
            return PolySignal(np.zeros((1, self.m)))
        k = np.arange(1, self.coeffs.shape[0])[:, None]
        return PolySignal(self.coeffs[1:] * k)

    def sup_norm(self, t0: float = 0.0, t1: float = 1.0) -> float:
        """Certified bound sum_k |p_k| max(|t0|,|t1|)^k >= sup over [t0, t1]."""
        tm = max(abs(t0), abs(t1))
        return float(sum(np.linalg.norm(self.coeffs[k]) * tm ** k
                         for k in range(self.coeffs.shape[0])))

    def shift(self, tau: float) -> "PolySignal":
        """Exact re-expansion of t -> u(t + tau)."""
        deg = self.degree
        out = np.zeros(self.coeffs.shape)
        for k in range(deg + 1):
            for j in range(k + 1):
                out[j] += math.comb(k, j) * tau ** (k - j) * self.coeffs[k]
        return PolySignal(out)


def poly_exp_integral(mu: np.ndarray, t: float, k: int) -> np.ndarray:
    """int_0^t e^{mu (t-s)} s^k ds per mode, exact.

    Series k! t^{k+1} sum_j (mu t)^j / (j+k+1)! in the cancellation-prone
    small |mu t| regime, stable recurrence otherwise.
    """
    mu = np.asarray(mu, float)
    z = mu * t
    small = np.abs(z) <= 0.5

    term = np.full(mu.shape, t ** (k + 1) / (k + 1))
    acc = term.copy()
    zs = np.where(small, z, 0.0)
    for j in range(1, 30):
        term = term * zs / (k + 1 + j)
        acc += term

    mu_safe = np.where(small, 1.0, mu)
    rec = t * phi1(np.where(small, 0.0, z))  # I_0
    for i in range(1, k + 1):
        rec = (i * rec - t ** i) / mu_safe
    return np.where(small, acc, rec)


def convolve_poly(sg: DiagonalSemigroup, B: InputOperator, p: PolySignal,
                  t: float) -> np.ndarray:
    """int_0^t T_{-1}(t-s) B p(s) ds for a polynomial input, exact per mode."""
    out = np.zeros(sg.n_modes)
    for k in range(p.coeffs.shape[0]):
        out += B.apply(p.coeffs[k]) * poly_exp_integral(sg.mu, t, k)
    return out


DrivingSignal = Union[InputSignal, PolySignal]


@dataclass(frozen=True, eq=False)
class EvolutionSystem:
    """Semilinear system dx/dt = A x + B2 f(x, u) + B u on a spectral truncation.

    B2 = None means the identity embedding X -> X_{-1}.  analytic_alpha
    selects the fractional-space solver: the Picard iteration then runs on
    y = (omega*I - A)^alpha x, requires an analytic diagonal semigroup and
    the identity B2, and reports both X and X_alpha norms.  When the
    declared smoothness of B does not reach analytic_alpha the truncation
    is still well-defined but the window certificates are truncation-level
    only; the deficit is recorded in input_regularity_deficit rather than
    refused, since the canonical boundary-driven example lives there.
    """

    semigroup: Union[DiagonalSemigroup, DenseGenerator]
    f: Nonlinearity
    B: Optional[InputOperator] = None
    B2: Optional[InputOperator] = None
    analytic_alpha: Optional[float] = None

    def __post_init__(self):
        sg = self.semigroup
        for op, name in ((self.B, "B"), (self.B2, "B2")):
            if op is not None and op.n_modes != sg.n_modes:
                raise ValueError(f"{name} mode count does not match the semigroup")
        if isinstance(sg, DenseGenerator):
            if self.analytic_alpha not in (None, 0.0):
                raise ValueError("analytic mode needs a diagonal analytic semigroup")
            for op, name in ((self.B, "B"), (self.B2, "B2")):
                if op is not None and not isinstance(op.declared_class, Bounded):
                    raise ValueError(
                        f"{name}: only bounded operators enter the dense ODE mode"
                    )
        if self.analytic_alpha is not None:
            a = self.analytic_alpha
            if not 0.0 <= a < 1.0:
                raise ValueError("analytic order must lie in [0, 1)")
            if a > 0.0:
                if not (isinstance(sg, DiagonalSemigroup) and sg.analytic):
                    raise ValueError("analytic mode needs an analytic semigroup")
                if self.B2 is not None:
                    raise ValueError("analytic mode fixes B2 to the identity")
                if self.B is not None and isinstance(self.B.declared_class, QAdmissible):
                    raise ValueError(
                        "analytic mode needs a bounded or smooth_class input operator"
                    )

    @property
    def n_modes(self) -> int:
        return self.semigroup.n_modes

    @property
    def input_regularity_deficit(self) -> bool:
        """True when B's declared smoothness falls short of analytic_alpha."""
        if self.analytic_alpha in (None, 0.0) or self.B is None:
            return False
        cls = self.B.declared_class
        return isinstance(cls, SmoothClass) and cls.alpha <= self.analytic_alpha

    @property
    def input_channels(self) -> int:
        return self.B.m if self.B is not None else 1

    def b2_apply(self, g: np.ndarray) -> np.ndarray:
        if self.B2 is None:
            return g
        return g @ self.B2.coeffs.T if g.ndim == 2 else self.B2.apply(g)

    def b2_norm(self) -> float:
        return 1.0 if self.B2 is None else self.B2.norm()


@dataclass(frozen=True)
class SolverConfig:
    substeps_per_window: int = 64
    picard_tol: float = 1e-10
    max_picard_iters: int = 60
    blowup_threshold: float = 1e6
    contraction_target: float = 0.5
    max_window_bisections: int = 40
    min_window: float = 1e-9
    window_cap: float = 1.0

    def __post_init__(self):
        if self.substeps_per_window < 8:
            raise ValueError("substeps_per_window must be >= 8")
        if not 0.0 < self.contraction_target < 1.0:
            raise ValueError("contraction target must lie in (0, 1)")
        if self.picard_tol <= 0 or self.blowup_threshold <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Status:
    kind: str  # completed | blowup | failed
    t_blowup: Optional[float] = None
    reason: Optional[str] = None

    @staticmethod
    def completed() -> "Status":
        return Status("completed")

    @staticmethod
    def blowup(t_m: float) -> "Status":
        return Status("blowup", t_blowup=t_m)

    @staticmethod
    def failed(reason: str) -> "Status":
        return Status("failed", reason=reason)


@dataclass
class WindowDiagnostics:
    t_start: float
    t1: float
    K: float
    delta: float
    lipschitz: float
    c_t: float
    picard_iters: int
    contraction_observed: float
    bisections: int


@dataclass(eq=False)
class Trajectory:
    """Solution samples on the concatenated window sub-grids.

    window_boundaries holds the indices into times where windows begin;
    in analytic mode alpha_norms carries the X_alpha norm alongside the
    X norm of each sample.
    """

    times: np.ndarray
    coeffs: np.ndarray
    status: Status
    window_boundaries: np.ndarray
    diagnostics: List[WindowDiagnostics]
    alpha: Optional[float] = None
    alpha_norms: Optional[np.ndarray] = None

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.coeffs, axis=1)

    def sup_norm(self) -> float:
        return float(np.max(self.norms()))

    def final_state(self) -> SpectralState:
        if self.status.kind == "blowup":
            return SpectralState(self.coeffs[-1], blown_up=True)
        return SpectralState(self.coeffs[-1])

    def state_at(self, t: float, tol: float = 1e-9) -> SpectralState:
        """Sample lookup; exact grid hit preferred, linear interpolation else."""
        i = int(np.searchsorted(self.times, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < self.n_samples and abs(self.times[j] - t) <= tol:
                return SpectralState(self.coeffs[j])
        if t < self.times[0] or t > self.times[-1]:
            raise ValueError(f"time {t} outside trajectory range")
        i = max(1, min(i, self.n_samples - 1))
        t0, t1 = self.times[i - 1], self.times[i]
        w = (t - t0) / (t1 - t0)
        return SpectralState((1 - w) * self.coeffs[i - 1] + w * self.coeffs[i])


# ---------------------------------------------------------------------------
# certified constants entering the window selection


def _input_constant(sg, B: Optional[InputOperator], t: float) -> float:
    """Certified upper bound on h_t for the B channel (X-norm target)."""
    if B is None or t == 0.0:
        return 0.0
    cls = B.declared_class
    if isinstance(cls, Bounded) or isinstance(sg, DenseGenerator):
        return B.norm() * sg.M * t * float(phi1(sg.lam * t))
    if isinstance(cls, SmoothClass) and sg.analytic:
        try:
            return min(upper_bound_h(sg, B, 0.0, t),
                       _upper_bound_truncation(sg, B, t, np.inf))
        except ValueError:
            pass
    return _upper_bound_truncation(sg, B, t, np.inf)


def _analytic_gain(sg: DiagonalSemigroup, alpha: float, t: float) -> float:
    """C_alpha e^{kappa_+ t} t^{1-alpha}/(1-alpha): the singular-kernel
    analogue of the zero-class constant for the nonlinear channel."""
    kappa = sg.omega0 + 1.0
    C = sg.smoothing_constant(alpha, kappa=kappa)
    return C * math.exp(max(kappa, 0.0) * t) * t ** (1.0 - alpha) / (1.0 - alpha)


def _analytic_input_constant(sg: DiagonalSemigroup, B: Optional[InputOperator],
                             alpha: float, t: float) -> float:
    """Bound on int_0^t |(omega*I-A)^alpha T_{-1}(t-s) B u(s)| ds, unit sup."""
    if B is None or t == 0.0:
        return 0.0
    cls = B.declared_class
    if isinstance(cls, Bounded):
        return B.norm() * _analytic_gain(sg, alpha, t)
    if isinstance(cls, SmoothClass) and cls.alpha > alpha:
        return upper_bound_h(sg, B, alpha, t)
    # truncation-level fallback: (omega*I - A)^alpha B is bounded on N modes
    return B.weighted_norm(sg, alpha) * sg.M * t * float(phi1(sg.lam * t))


def _ball_sg_distance(sg, t: float, K: float, alpha: float,
                      start: Optional[np.ndarray]) -> float:
    """|(T(t)-I) w| in the working norm: exact for a given start state, the
    K-ball bound otherwise (per-start windows are the operative mode for
    merely strongly continuous semigroups)."""
    if start is not None:
        return sg.sg_distance(t, start, alpha)
    if isinstance(sg, DiagonalSemigroup):
        return K * float(np.max(np.abs(np.exp(sg.mu * t) - 1.0)))
    E = scipy.linalg.expm(sg.A * t)
    return K * float(np.linalg.norm(E - np.eye(sg.n_modes), 2))


def select_step(sys: EvolutionSystem, K: float, u_sup: float,
                cfg: Optional[SolverConfig] = None,
                start_state: Optional[np.ndarray] = None,
                cap: Optional[float] = None) -> float:
    """Largest dyadic-bisected window length t1 <= cap (cap <= 1) with

    (a) c_{t1} * L(K') <= contraction target, and
    (b) the invariance inequality of the ball of radius delta around the
        window's start state,

    where delta = max(1, K) and K' = K + delta bounds every norm seen in
    the window.  Certificates are evaluated in the X_alpha norm in
    analytic mode.  start_state (raw X coefficients) sharpens the
    strong-continuity term when provided.
    """
    cfg = cfg or SolverConfig()
    sg = sys.semigroup
    alpha = sys.analytic_alpha or 0.0
    theta = cfg.contraction_target
    delta = max(1.0, K)
    K_prime = K + delta
    L = sys.f.lipschitz(max(K_prime, u_sup))
    sigma_u = sys.f.growth_sigma(u_sup)
    c_off = sys.f.growth_c
    cap = min(cfg.window_cap, cap if cap is not None else cfg.window_cap)

    t = cap
    for _ in range(cfg.max_window_bisections + 1):
        if alpha > 0.0:
            gain = _analytic_gain(sg, alpha, t)
            h_t = _analytic_input_constant(sg, sys.B, alpha, t)
        else:
            gain = c_constant(sg, sys.B2, t)
            h_t = _input_constant(sg, sys.B, t)
        contraction_ok = gain * L <= theta
        sg_dist = _ball_sg_distance(sg, t, K, alpha, start_state)
        invariance_ok = (
            sg_dist + h_t * u_sup + gain * (L * K_prime + sigma_u + c_off) <= delta
        )
        if contraction_ok and invariance_ok:
            return t
        t *= 0.5
    raise StepSelectionError(
        f"no certified window above {t:.3g} (K={K:.3g}, u_sup={u_sup:.3g})"
    )


# ---------------------------------------------------------------------------
# Picard iteration on one window


def _dense_convolve(gen: DenseGenerator, B: InputOperator, u, t: float) -> np.ndarray:
    """Exact input convolution for the dense mode, cell by cell."""
    out = np.zeros(gen.n_modes)
    if t <= 0.0:
        return out
    if isinstance(u, PolySignal):
        raise ValueError("polynomial inputs are not wired to the dense mode")
    for i in range(u.values.shape[0]):
        a = float(u.grid[i])
        b = float(min(u.grid[i + 1], t))
        if a >= t:
            break
        _, P1, _ = gen.propagators(b - a)
        out += scipy.linalg.expm(gen.A * (t - b)) @ (P1 @ B.apply(u.values[i]))
    return out


def _input_convolution(sg, B: Optional[InputOperator], u, t: float) -> np.ndarray:
    if B is None:
        return np.zeros(sg.n_modes)
    if isinstance(sg, DenseGenerator):
        return _dense_convolve(sg, B, u, t)
    if isinstance(u, PolySignal):
        return convolve_poly(sg, B, u, t)
    return convolve(sg, B, u, t)


class _WindowFailure(Exception):
    pass


def _picard_window_raw(sys: EvolutionSystem, x0: np.ndarray, u, t1: float,
                       cfg: SolverConfig, weights: Optional[np.ndarray]):
    """Iterate the window fixed-point map on the sub-grid.

    Returns (tau, Y, iters, contraction) with Y in working coordinates
    (weighted by (omega - mu)^alpha in analytic mode) at each sub-grid
    point.  Raises _WindowFailure on divergence or iteration exhaustion.
    """
    sg = sys.semigroup
    S = cfg.substeps_per_window
    tau = np.linspace(0.0, t1, S + 1)
    h = t1 / S
    dense = isinstance(sg, DenseGenerator)

    if dense:
        E, P1, P2 = sg.propagators(h)
        A1 = P1 - P2
        A2 = P2
        free = np.empty((S + 1, sg.n_modes))
        free[0] = x0
        acc = np.array(x0, float)
        for j in range(S):
            acc = E @ acc
            free[j + 1] = acc
    else:
        z = sg.mu * h
        E = np.exp(z)
        A1 = h * (phi1(z) - phi2(z))
        A2 = h * phi2(z)
        free = np.exp(np.outer(tau, sg.mu)) * x0[None, :]

    lin = free.copy()
    if sys.B is not None:
        for j in range(1, S + 1):
            lin[j] += _input_convolution(sg, sys.B, u, float(tau[j]))

    if weights is not None:
        lin_w = lin * weights[None, :]
        y = free * weights[None, :]
    else:
        lin_w = lin
        y = free.copy()

    u0 = u.value(0.0)
    u_vals = np.empty((S + 1, u0.shape[0]))
    u_vals[0] = u0
    for j in range(1, S):
        u_vals[j] = u.value(float(tau[j]))
    u_vals[S] = u.value_left(t1)

    scale = max(1.0, float(np.max(np.linalg.norm(lin_w, axis=1))))
    ratio_floor = max(10.0 * cfg.picard_tol, 1e-13 * scale)
    contraction = 0.0
    prev_delta = None
    for k in range(cfg.max_picard_iters):
        x_nat = y / weights[None, :] if weights is not None else y
        g = sys.f.batch(x_nat, u_vals)
        g = sys.b2_apply(g)
        if weights is not None:
            g = g * weights[None, :]
        conv = np.zeros_like(y)
        if dense:
            for j in range(S):
                conv[j + 1] = E @ conv[j] + A1 @ g[j] + A2 @ g[j + 1]
        else:
            for j in range(S):
                conv[j + 1] = E * conv[j] + A1 * g[j] + A2 * g[j + 1]
        y_new = lin_w + conv
        delta = float(np.max(np.linalg.norm(y_new - y, axis=1)))
        y = y_new
        if not np.isfinite(delta) or delta > 1e15 * scale:
            raise _WindowFailure("Picard iteration diverged")
        if prev_delta is not None and prev_delta > ratio_floor:
            contraction = max(contraction, delta / prev_delta)
        if delta <= cfg.picard_tol:
            return tau, y, k + 1, contraction
        prev_delta = delta
    raise _WindowFailure(f"no convergence in {cfg.max_picard_iters} Picard iterations")


def picard_window(sys: EvolutionSystem, x0: SpectralState,
                  u: Optional[DrivingSignal], t1: float,
                  cfg: Optional[SolverConfig] = None):
    """Solve one window [0, t1]; returns (times, states, WindowDiagnostics).

    States come back in X coordinates regardless of mode; the observed
    Picard contraction factor is part of the diagnostics and stays below
    the contraction target plus a 0.1 margin on certified windows.
    """
    cfg = cfg or SolverConfig()
    if t1 <= 0:
        raise ValueError("window length must be positive")
    if u is None:
        u = InputSignal.zero(sys.input_channels, t1)
    alpha = sys.analytic_alpha or 0.0
    weights = sys.semigroup.frac_weights(alpha) if alpha > 0.0 else None
    try:
        tau, y, iters, contraction = _picard_window_raw(sys, x0.coeffs, u, t1, cfg, weights)
    except _WindowFailure as e:
        raise RuntimeError(str(e)) from e
    coeffs = y / weights[None, :] if weights is not None else y
    K = float(np.linalg.norm(y[0]))
    gain = (_analytic_gain(sys.semigroup, alpha, t1) if alpha > 0.0
            else c_constant(sys.semigroup, sys.B2, t1))
    diag = WindowDiagnostics(
        t_start=0.0, t1=t1, K=K, delta=max(1.0, K),
        lipschitz=sys.f.lipschitz(K + max(1.0, K)), c_t=gain,
        picard_iters=iters, contraction_observed=contraction, bisections=0,
    )
    return tau, [SpectralState(c) for c in coeffs], diag


# ---------------------------------------------------------------------------
# the window-chaining driver


def _solve_loop(sys: EvolutionSystem, x0: SpectralState,
                u: Optional[DrivingSignal], t_end: float, cfg: SolverConfig,
                checkpoint_times: Optional[Sequence[float]] = None) -> Trajectory:
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if u is None:
        u = InputSignal.zero(sys.input_channels, t_end)
    if u.horizon < t_end - 1e-12:
        raise ValueError(f"input defined to {u.horizon}, solve needs {t_end}")
    alpha = sys.analytic_alpha or 0.0
    sg = sys.semigroup
    weights = sg.frac_weights(alpha) if alpha > 0.0 else None
    if weights is not None:
        wx = weights * x0.coeffs
        if float(np.linalg.norm(wx)) > 1e-8 and \
                ladder_divergence_ratio(sg, wx, 0.0) > 0.5:
            raise ValueError(
                "initial state not in X_alpha: weighted mass keeps growing "
                "along the truncation ladder"
            )

    # windows land exactly on input breakpoints and checkpoints, so u is
    # constant inside every window (clean O(h^2) reconstruction) and
    # comparisons across runs share grid points
    marks = {float(t_end)}
    if isinstance(u, InputSignal):
        marks.update(float(g) for g in u.grid if 0.0 < g < t_end - 1e-13)
    if checkpoint_times is not None:
        marks.update(float(c) for c in checkpoint_times if 0.0 < c < t_end - 1e-13)
    marks = sorted(marks)

    def working_norm(c: np.ndarray) -> float:
        if weights is not None:
            return float(np.linalg.norm(weights * c))
        return float(np.linalg.norm(c))

    t = 0.0
    x = np.array(x0.coeffs, float)
    all_times: List[np.ndarray] = [np.array([0.0])]
    all_coeffs: List[np.ndarray] = [x[None, :]]
    boundaries = [0]
    diags: List[WindowDiagnostics] = []
    status = Status.completed()
    n_samples = 1

    if working_norm(x) >= cfg.blowup_threshold:
        status = Status.blowup(0.0)

    while status.kind == "completed" and t < t_end - 1e-13:
        K = working_norm(x)
        next_mark = next(m for m in marks if m > t + 1e-13)
        cap = min(cfg.window_cap, next_mark - t)
        u_loc = u.shift(t) if t > 0 else u
        u_sup = u_loc.sup_norm(0.0, cap)
        try:
            t1 = select_step(sys, K, u_sup, cfg, start_state=x, cap=cap)
        except StepSelectionError as e:
            status = Status.failed(str(e))
            break
        bis = max(0, int(round(math.log2(max(cap / t1, 1.0)))))

        result = None
        while result is None:
            try:
                result = _picard_window_raw(sys, x, u_loc, t1, cfg, weights)
            except _WindowFailure as e:
                t1 *= 0.5
                bis += 1
                if t1 < cfg.min_window:
                    status = Status.failed(
                        f"window collapsed below {cfg.min_window}: {e}"
                    )
                    break
        if result is None:
            break
        tau, y, iters, contraction = result

        gain = (_analytic_gain(sg, alpha, t1) if alpha > 0.0
                else c_constant(sg, sys.B2, t1))
        diags.append(WindowDiagnostics(
            t_start=t, t1=t1, K=K, delta=max(1.0, K),
            lipschitz=sys.f.lipschitz(max(K + max(1.0, K), u_sup)),
            c_t=gain, picard_iters=iters, contraction_observed=contraction,
            bisections=bis,
        ))

        coeffs = y / weights[None, :] if weights is not None else y
        norms_w = np.linalg.norm(y, axis=1)
        crossing = np.nonzero(norms_w >= cfg.blowup_threshold)[0]
        end_j = coeffs.shape[0] - 1
        if crossing.size > 0:
            end_j = max(int(crossing[0]), 1)
            status = Status.blowup(float(t + tau[end_j]))

        all_times.append(t + tau[1 : end_j + 1])
        all_coeffs.append(coeffs[1 : end_j + 1])
        n_samples += end_j
        boundaries.append(n_samples - 1)

        if status.kind != "completed":
            break
        x = coeffs[-1]
        t_next = t + t1
        if abs(t_next - next_mark) < 1e-12:
            t_next = next_mark
        t = t_next

    times = np.concatenate(all_times)
    coeffs = np.concatenate(all_coeffs, axis=0)
    alpha_norms = None
    if weights is not None:
        alpha_norms = np.linalg.norm(coeffs * weights[None, :], axis=1)
    return Trajectory(
        times=times, coeffs=coeffs, status=status,
        window_boundaries=np.array(boundaries[:-1], dtype=int),
        diagnostics=diags,
        alpha=alpha if alpha > 0.0 else None,
        alpha_norms=alpha_norms,
    )


def solve(sys: EvolutionSystem, x0: SpectralState, u: Optional[DrivingSignal],
          t_end: float, cfg: Optional[SolverConfig] = None,
          checkpoint_times: Optional[Sequence[float]] = None) -> Trajectory:
    """March the mild solution to t_end (or to blow-up / failure)."""
    return _solve_loop(sys, x0, u, t_end, cfg or SolverConfig(), checkpoint_times)


def solve_analytic(sys: EvolutionSystem, x0: SpectralState,
                   u: Optional[DrivingSignal], t_end: float,
                   cfg: Optional[SolverConfig] = None,
                   checkpoint_times: Optional[Sequence[float]] = None) -> Trajectory:
    """Fractional-space solve; with order 0 or none this is exactly solve()."""
    return _solve_loop(sys, x0, u, t_end, cfg or SolverConfig(), checkpoint_times)


# ---------------------------------------------------------------------------
# a-priori trajectory bounds


def _mittag_leffler(beta: float, z: float, max_terms: int = 600) -> float:
    """E_beta(z) = sum_k z^k / Gamma(1 + beta k) for z >= 0."""
    if z <= 0.0:
        return 1.0
    acc = 0.0
    logz = math.log(z)
    for k in range(max_terms):
        term = math.exp(k * logz - scipy.special.gammaln(1.0 + beta * k))
        acc += term
        if k > 4 and term < 1e-16 * max(acc, 1.0):
            break
    return acc


def global_bound(sys: EvolutionSystem, x0_norm: float, u_norm: float,
                 t: float, cfg: Optional[SolverConfig] = None) -> float:
    """Certified bound on sup over [0, t] of the trajectory norm.

    General mode iterates the reachability window estimate

        b <- 2 (M e^{lam t1} b + h_{t1} |u| + c_{t1} (sigma(|u|) + c))

    over ceil(t/t1) windows with c_{t1} L <= 1/2; it needs a uniform
    Lipschitz certificate.  Analytic mode combines the linear-growth
    certificate with a singular-kernel comparison (Mittag-Leffler)
    envelope for the X_alpha norm.
    """
    cfg = cfg or SolverConfig()
    sg = sys.semigroup
    alpha = sys.analytic_alpha or 0.0
    L = sys.f.uniform_lipschitz
    if L is None:
        raise ValueError("global bound needs a uniform Lipschitz certificate")
    sigma_u = sys.f.growth_sigma(u_norm) + sys.f.growth_c

    if alpha == 0.0:
        t1 = min(cfg.window_cap, t)
        for _ in range(cfg.max_window_bisections + 1):
            if c_constant(sg, sys.B2, t1) * L <= 0.5:
                break
            t1 *= 0.5
        else:
            raise StepSelectionError("no window with c_t * L <= 1/2")
        n_windows = max(1, math.ceil(t / t1 - 1e-12))
        growth = sg.M * math.exp(sg.lam * t1)
        h_t1 = _input_constant(sg, sys.B, t1)
        c_t1 = c_constant(sg, sys.B2, t1)
        b = x0_norm
        for _ in range(n_windows):
            b = 2.0 * (growth * b + h_t1 * u_norm + c_t1 * sigma_u)
        return b

    kappa = sg.omega0 + 1.0
    C = sg.smoothing_constant(alpha, kappa=kappa)
    kp = max(kappa, 0.0)
    a_const = (
        sg.M * math.exp(max(sg.lam, 0.0) * t) * x0_norm
        + _analytic_input_constant(sg, sys.B, alpha, t) * u_norm
        + C * math.exp(kp * t) * t ** (1.0 - alpha) / (1.0 - alpha) * sigma_u
    )
    b_kernel = L * C * math.exp(kp * t)
    z = b_kernel * scipy.special.gamma(1.0 - alpha) * t ** (1.0 - alpha)
    return a_const * _mittag_leffler(1.0 - alpha, z)


# ---------------------------------------------------------------------------
# export


def trajectory_to_csv(traj: Trajectory, path: str) -> None:
    """CSV columns t, norm_X [, norm_Xalpha], coeff_1..coeff_N.

    Floats are written in shortest round-trip form, so reruns of a
    deterministic scenario are byte-identical.
    """
    n = traj.coeffs.shape[1]
    cols = ["t", "norm_X"]
    if traj.alpha_norms is not None:
        cols.append("norm_Xalpha")
    cols += [f"coeff_{i}" for i in range(1, n + 1)]
    norms = traj.norms()
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(traj.n_samples):
            row = [repr(float(traj.times[i])), repr(float(norms[i]))]
            if traj.alpha_norms is not None:
                row.append(repr(float(traj.alpha_norms[i])))
            row += [repr(float(c)) for c in traj.coeffs[i]]
            fh.write(",".join(row) + "\n")


def trajectory_diagnostics_json(traj: Trajectory, path: str) -> None:
    payload = {
        "status": asdict(traj.status),
        "n_samples": int(traj.n_samples),
        "t_final": float(traj.times[-1]),
        "alpha": traj.alpha,
        "windows": [asdict(d) for d in traj.diagnostics],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
