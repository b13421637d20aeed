"""Tube axis geometry: Frenet frames, cross-section transformations, metric.

Natural units throughout: hbar = m = 1 and the cross-section scale a0 = 1.
All coordinates here are the raw (unrescaled) transverse coordinates; the
small-parameter rescaling used by the effective Hamiltonians lives in
:mod:`twistube.effective`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator


class GeometryError(Exception):
    """Base class for geometry failures."""


class FrameUndefinedError(GeometryError):
    """Raised when the Frenet frame does not exist (vanishing curvature)."""


class CoordinateBreakdownError(GeometryError):
    """Raised when a transverse point lies beyond the curvature radius."""


class SingularTransformError(GeometryError):
    """Raised when the cross-section transformation matrix is singular."""


@dataclass(frozen=True)
class Frame:
    """Orthonormal right-handed triad (tangent, normal, binormal)."""

    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """Rows are (t, n, b)."""
        return np.vstack([self.t, self.n, self.b])


def _frenet_rhs(kappa: float, tau: float, frame: np.ndarray) -> np.ndarray:
    m = np.array([[0.0, kappa, 0.0], [-kappa, 0.0, tau], [0.0, -tau, 0.0]])
    return m @ frame


def _orthonormalize(frame: np.ndarray) -> np.ndarray:
    t = frame[0] / np.linalg.norm(frame[0])
    n = frame[1] - np.dot(frame[1], t) * t
    n /= np.linalg.norm(n)
    b = np.cross(t, n)
    return np.vstack([t, n, b])


class HelixCurve:
    """Circular helix with analytic frame.

    ``radius`` is the helix radius and ``pitch`` the rise parameter b
    (one full turn advances the axis by 2*pi*b).  Curvature and torsion
    are the constants radius/(radius^2 + b^2) and b/(radius^2 + b^2).
    """

    def __init__(self, radius: float, pitch: float = 0.0, length: float = 50.0):
        if radius <= 0:
            raise ValueError("helix radius must be positive")
        self.radius = float(radius)
        self.pitch = float(pitch)
        self.length = float(length)
        self._c = np.hypot(self.radius, self.pitch)

    def kappa(self, s: float) -> float:
        return self.radius / self._c**2

    def tau(self, s: float) -> float:
        return self.pitch / self._c**2

    def point(self, s: float) -> np.ndarray:
        u = s / self._c
        return np.array(
            [self.radius * np.cos(u), self.radius * np.sin(u), self.pitch * u]
        )

    def frame(self, s: float) -> Frame:
        u = s / self._c
        t = np.array(
            [-self.radius * np.sin(u), self.radius * np.cos(u), self.pitch]
        ) / self._c
        n = np.array([-np.cos(u), -np.sin(u), 0.0])
        return Frame(t=t, n=n, b=np.cross(t, n))


class TabulatedCurve:
    """Curve given by sampled curvature and torsion.

    kappa and tau are interpolated with a monotone cubic; the frame is
    obtained by integrating the Frenet-Serret system with classical
    fourth-order steps from s = 0, re-orthonormalizing every step.
    """

    def __init__(
        self,
        s: Sequence[float],
        kappa: Sequence[float],
        tau: Sequence[float],
        step: float = 0.01,
        initial_frame: np.ndarray | None = None,
        initial_point: np.ndarray | None = None,
    ):
        s = np.asarray(s, dtype=float)
        kappa = np.asarray(kappa, dtype=float)
        tau = np.asarray(tau, dtype=float)
        if s.ndim != 1 or len(s) < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(s) <= 0):
            raise ValueError("s samples must be strictly increasing")
        if not (np.all(np.isfinite(kappa)) and np.all(np.isfinite(tau))):
            raise ValueError("kappa and tau must be finite at every sample")
        if np.any(kappa < 0):
            raise ValueError("kappa must be nonnegative (Frenet frame)")
        self.length = float(s[-1] - s[0])
        self._s0 = float(s[0])
        self._kappa = PchipInterpolator(s, kappa)
        self._tau = PchipInterpolator(s, tau)
        self._step = float(step)
        f0 = np.eye(3) if initial_frame is None else np.asarray(initial_frame, float)
        p0 = np.zeros(3) if initial_point is None else np.asarray(initial_point, float)
        self._integrate(f0, p0)

    def _integrate(self, frame0: np.ndarray, point0: np.ndarray) -> None:
        n_steps = max(1, int(np.ceil(self.length / self._step)))
        h = self.length / n_steps
        self._h = h
        frames = np.empty((n_steps + 1, 3, 3))
        points = np.empty((n_steps + 1, 3))
        frames[0] = _orthonormalize(frame0)
        points[0] = point0
        for i in range(n_steps):
            s = self._s0 + i * h
            frames[i + 1], points[i + 1] = self._rk4(s, frames[i], points[i], h)
            frames[i + 1] = _orthonormalize(frames[i + 1])
        self._frames = frames
        self._points = points

    def _rk4(self, s, frame, point, h):
        def rhs(si, f):
            return _frenet_rhs(float(self._kappa(si)), float(self._tau(si)), f)

        k1 = rhs(s, frame)
        k2 = rhs(s + h / 2, frame + h / 2 * k1)
        k3 = rhs(s + h / 2, frame + h / 2 * k2)
        k4 = rhs(s + h, frame + h * k3)
        new_frame = frame + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        # tangent integrates the position; use the same RK4 weights
        p1 = frame[0]
        p2 = (frame + h / 2 * k1)[0]
        p3 = (frame + h / 2 * k2)[0]
        p4 = (frame + h * k3)[0]
        new_point = point + h / 6 * (p1 + 2 * p2 + 2 * p3 + p4)
        return new_frame, new_point

    def kappa(self, s: float) -> float:
        return float(self._kappa(s))

    def tau(self, s: float) -> float:
        return float(self._tau(s))

    def _locate(self, s: float):
        x = (s - self._s0) / self._h
        i = int(np.clip(np.floor(x), 0, len(self._frames) - 1))
        rem = s - (self._s0 + i * self._h)
        return i, rem

    def frame(self, s: float) -> Frame:
        i, rem = self._locate(s)
        f, _ = self._partial(i, rem)
        return Frame(t=f[0], n=f[1], b=f[2])

    def point(self, s: float) -> np.ndarray:
        i, rem = self._locate(s)
        _, p = self._partial(i, rem)
        return p

    def _partial(self, i, rem):
        f, p = self._frames[i], self._points[i]
        if abs(rem) > 1e-14:
            f, p = self._rk4(self._s0 + i * self._h, f, p, rem)
            f = _orthonormalize(f)
        return f, p


def frenet_frame(curve, s: float) -> Frame:
    """Frenet frame of ``curve`` at arclength ``s``; requires kappa(s) > 0."""
    if curve.kappa(s) <= 0:
        raise FrameUndefinedError(f"curvature vanishes at s={s}; frame undefined")
    return curve.frame(s)


def _as_fn(value) -> Callable[[float], float]:
    if callable(value):
        return value
    v = float(value)
    return lambda s: v


@dataclass(frozen=True)
class TransformProfile:
    """Slowly varying cross-section transformation R_theta (1 + delta W).

    Component functions map arclength to a rotation angle theta and the
    four entries of the dimensionless matrix W.  Optional *_dot entries
    supply analytic s-derivatives; when absent a central difference with
    step ``fd_step`` is used.
    """

    theta: Callable[[float], float]
    w11: Callable[[float], float]
    w12: Callable[[float], float]
    w21: Callable[[float], float]
    w22: Callable[[float], float]
    delta: float
    kind: str = "general"
    theta_dot: Callable[[float], float] | None = None
    w11_dot: Callable[[float], float] | None = None
    w12_dot: Callable[[float], float] | None = None
    w21_dot: Callable[[float], float] | None = None
    w22_dot: Callable[[float], float] | None = None
    fd_step: float = 1e-6

    @staticmethod
    def rotation(theta, theta_dot=None, delta: float = 0.0) -> "TransformProfile":
        zero = lambda s: 0.0
        return TransformProfile(
            theta=_as_fn(theta), w11=zero, w12=zero, w21=zero, w22=zero,
            delta=delta, kind="rotation", theta_dot=theta_dot,
        )

    @staticmethod
    def scaling(f1, f2, delta: float, f1_dot=None, f2_dot=None) -> "TransformProfile":
        zero = lambda s: 0.0
        return TransformProfile(
            theta=zero, w11=_as_fn(f1), w12=zero, w21=zero, w22=_as_fn(f2),
            delta=delta, kind="scaling",
            w11_dot=f1_dot, w22_dot=f2_dot, theta_dot=zero,
        )

    @staticmethod
    def shearing(f, delta: float, f_dot=None) -> "TransformProfile":
        zero = lambda s: 0.0
        return TransformProfile(
            theta=zero, w11=zero, w12=_as_fn(f), w21=zero, w22=zero,
            delta=delta, kind="shearing", w12_dot=f_dot, theta_dot=zero,
        )

    @staticmethod
    def combined(theta, f, delta: float, theta_dot=None, f_dot=None) -> "TransformProfile":
        """Rotation combined with an area-preserving squeeze W = diag(f, -f)."""
        ffn = _as_fn(f)
        zero = lambda s: 0.0
        neg = (lambda s: -ffn(s))
        neg_dot = None if f_dot is None else (lambda s: -f_dot(s))
        return TransformProfile(
            theta=_as_fn(theta), w11=ffn, w12=zero, w21=zero, w22=neg,
            delta=delta, kind="combined", theta_dot=theta_dot,
            w11_dot=f_dot, w22_dot=neg_dot,
        )

    def matrix(self, s: float) -> np.ndarray:
        th = self.theta(s)
        c, sn = np.cos(th), np.sin(th)
        rot = np.array([[c, -sn], [sn, c]])
        w = np.array([[self.w11(s), self.w12(s)], [self.w21(s), self.w22(s)]])
        return rot @ (np.eye(2) + self.delta * w)

    def omega(self, s: float) -> float:
        """Rotation rate d theta / ds."""
        if self.theta_dot is not None:
            return self.theta_dot(s)
        h = self.fd_step
        return (self.theta(s + h) - self.theta(s - h)) / (2 * h)

    def matrix_derivative(self, s: float) -> np.ndarray:
        dots = (self.theta_dot, self.w11_dot, self.w12_dot, self.w21_dot, self.w22_dot)
        if all(d is not None for d in dots):
            th = self.theta(s)
            c, sn = np.cos(th), np.sin(th)
            rot = np.array([[c, -sn], [sn, c]])
            drot = self.theta_dot(s) * np.array([[-sn, -c], [c, -sn]])
            w = np.array([[self.w11(s), self.w12(s)], [self.w21(s), self.w22(s)]])
            dw = np.array(
                [[self.w11_dot(s), self.w12_dot(s)], [self.w21_dot(s), self.w22_dot(s)]]
            )
            return drot @ (np.eye(2) + self.delta * w) + rot @ (self.delta * dw)
        h = self.fd_step
        return (self.matrix(s + h) - self.matrix(s - h)) / (2 * h)

    def is_pure_rotation(self, s_samples=None) -> bool:
        if self.kind == "rotation":
            return True
        if self.delta == 0.0:
            return True
        if s_samples is None:
            return False
        w = [
            abs(f(s))
            for s in s_samples
            for f in (self.w11, self.w12, self.w21, self.w22)
        ]
        return max(w) == 0.0

    def slow_variation_ratio(self, s_samples, q_max: float) -> float:
        """max |dT_ab/ds| * delta * q_max; the slight-variation gate."""
        r = max(np.max(np.abs(self.matrix_derivative(s))) for s in s_samples)
        ratio = r * self.delta * q_max
        if ratio > 0.1:
            warnings.warn(
                f"transformation varies too fast: slow-variation ratio {ratio:.3g} > 0.1",
                stacklevel=2,
            )
        return ratio


@dataclass(frozen=True)
class MetricEvaluation:
    """Closed-form metric data at one (s, q') sample, index order (q1', q2', s)."""

    G: np.ndarray
    det_closed: float
    Ginv: np.ndarray
    gauge: np.ndarray  # (A^1, A^2)
    gamma: float
    det_transform: float


def embed_point(curve, profile: TransformProfile, q_perp, s: float) -> np.ndarray:
    """Position of the transverse point q' on the cross section at arclength s."""
    q_perp = np.asarray(q_perp, dtype=float)
    v = profile.matrix(s) @ q_perp
    gamma = 1.0 - curve.kappa(s) * v[0]
    if gamma <= 0:
        raise CoordinateBreakdownError(
            f"point beyond curvature radius at s={s} (gamma={gamma:.3g})"
        )
    fr = frenet_frame(curve, s)
    return curve.point(s) + v[0] * fr.n + v[1] * fr.b


def metric_tensor(curve, profile: TransformProfile, s: float, q_perp) -> MetricEvaluation:
    """Full 3x3 metric, closed-form determinant, inverse, and gauge vector."""
    q_perp = np.asarray(q_perp, dtype=float)
    t_mat = profile.matrix(s)
    det_t = float(np.linalg.det(t_mat))
    if det_t == 0.0:
        raise SingularTransformError(f"singular transformation matrix at s={s}")
    td_mat = profile.matrix_derivative(s)
    kappa, tau = curve.kappa(s), curve.tau(s)

    v = t_mat @ q_perp
    vdot = td_mat @ q_perp
    gamma = 1.0 - kappa * v[0]
    if gamma <= 0:
        raise CoordinateBreakdownError(
            f"point beyond curvature radius at s={s} (gamma={gamma:.3g})"
        )
    zeta = vdot[0] - tau * v[1]
    eta = vdot[1] + tau * v[0]

    t1 = t_mat[:, 0]  # column vectors of the transformation
    t2 = t_mat[:, 1]
    xi = np.array([zeta, eta])
    g = np.empty((3, 3))
    g[0, 0] = t1 @ t1
    g[0, 1] = g[1, 0] = t1 @ t2
    g[1, 1] = t2 @ t2
    g[0, 2] = g[2, 0] = xi @ t1
    g[1, 2] = g[2, 1] = xi @ t2
    g[2, 2] = gamma**2 + zeta**2 + eta**2

    det_closed = gamma**2 * det_t**2

    xi_bar = np.array([eta, -zeta])  # i * sigma_y applied to (zeta, eta)
    a1 = t2 @ xi_bar
    a2 = -(t1 @ xi_bar)
    gauge = np.array([a1, a2])

    g_ss = 1.0 / gamma**2
    g_s = gauge / (gamma**2 * det_t)  # (G^{s1}, G^{s2})
    eps_t = np.column_stack([t2, -t1])  # eps^{ac} t_c for a = 1, 2
    ginv = np.empty((3, 3))
    for a in range(2):
        for b in range(2):
            ginv[a, b] = gamma**2 * g_s[a] * g_s[b] + (
                eps_t[:, a] @ eps_t[:, b]
            ) / det_t**2
    ginv[0, 2] = ginv[2, 0] = g_s[0]
    ginv[1, 2] = ginv[2, 1] = g_s[1]
    ginv[2, 2] = g_ss

    return MetricEvaluation(
        G=g, det_closed=det_closed, Ginv=ginv, gauge=gauge,
        gamma=gamma, det_transform=det_t,
    )


def metric_tensor_fd(curve, profile: TransformProfile, s: float, q_perp,
                     step: float = 1e-5) -> np.ndarray:
    """Finite-difference metric from embeddings: the independent oracle.

    Central differences of :func:`embed_point` in (q1', q2', s).
    """
    q_perp = np.asarray(q_perp, dtype=float)

    def partial(i):
        if i < 2:
            dq = np.zeros(2)
            dq[i] = step
            return (
                embed_point(curve, profile, q_perp + dq, s)
                - embed_point(curve, profile, q_perp - dq, s)
            ) / (2 * step)
        return (
            embed_point(curve, profile, q_perp, s + step)
            - embed_point(curve, profile, q_perp, s - step)
        ) / (2 * step)

    d = [partial(i) for i in range(3)]
    g = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            g[i, j] = d[i] @ d[j]
    return g


def gauge_divergence(curve, profile: TransformProfile, s: float, q_perp,
                     step: float = 1e-6) -> float:
    """Transverse divergence of the gauge vector by central differences."""
    q_perp = np.asarray(q_perp, dtype=float)

    def gauge_at(q):
        return metric_tensor(curve, profile, s, q).gauge

    div = 0.0
    for a in range(2):
        dq = np.zeros(2)
        dq[a] = step
        div += (gauge_at(q_perp + dq)[a] - gauge_at(q_perp - dq)[a]) / (2 * step)
    return div
