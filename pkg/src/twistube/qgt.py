"""Quantum geometric tensor over the (rotation-rate, squeeze) parameter
plane: the analytic metric and Berry curvature of the two-level system,
a finite-difference eigenvector oracle, and curvature loop integrals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .transverse import angular_expectation, box_energy


class QGTError(Exception):
    pass


class DegeneracyError(QGTError):
    """Parameter point too close to the spectral degeneracy."""


def mixing_angle(f: float, alpha_p: float, delta_e: float):
    """Mixing angle phi and local gap Lambda of the two-level system.

    cos(phi) = 2 f dE / sqrt(2 L (L - ap)),
    sin(phi) = (L - ap) / sqrt(2 L (L - ap)),
    L = sqrt((2 f dE)^2 + ap^2); the two satisfy cos^2 + sin^2 = 1
    identically.
    """
    x = 2.0 * f * delta_e
    lam = np.hypot(x, alpha_p)
    lam_minus = x**2 / (lam + alpha_p) if alpha_p > 0 else lam - alpha_p
    if lam < 1e-12 or lam * lam_minus < 1e-10 * max(lam**2, 1e-30):
        raise DegeneracyError(
            f"mixing angle undefined near degeneracy (f={f}, alpha_p={alpha_p})"
        )
    denom = np.sqrt(2.0 * lam * lam_minus)
    phi = float(np.arctan2(lam_minus / denom, x / denom))
    return phi, float(lam)


@dataclass(frozen=True)
class QGTPoint:
    omega: float
    f: float
    p: float
    phi: float
    phi_dot: float
    lam: float
    g: np.ndarray  # 2x2 symmetric Riemannian metric on (omega, f)
    F: np.ndarray  # 2x2 antisymmetric Berry curvature
    B: float


def qgt_analytic(omega: float, f: float, p: float, phi_dot: float,
                 n1: int, n2: int, d: float, tau: float = 0.0) -> QGTPoint:
    """Closed-form metric and curvature at one parameter point.

    The gauge coupling is (omega + tau) <L>; the squeeze energy scale is
    the transverse level difference for the (n1, n2) pair.
    """
    l_exp = angular_expectation(n1, n2)
    delta_e = box_energy(d, n2) - box_energy(d, n1)
    b = 0.5 * l_exp
    alpha = (omega + tau) * l_exp
    phi, lam = mixing_angle(f, alpha * p, delta_e)
    s2, c2 = np.sin(2 * phi), np.cos(2 * phi)
    s4 = np.sin(4 * phi)
    g = np.empty((2, 2))
    g[0, 0] = b**2 * (p**2 * s2**2 + phi_dot**2 * c2**2) / lam**2
    g[0, 1] = g[1, 0] = -0.5 * b * p * delta_e * s4 / lam**2
    g[1, 1] = delta_e**2 * c2**2 / lam**2
    f12 = -2.0 * delta_e * b * phi_dot * c2**2 / lam**2
    curv = np.array([[0.0, f12], [-f12, 0.0]])
    if not np.all(np.isfinite(g)):
        raise DegeneracyError("metric diverges at this parameter point")
    return QGTPoint(omega=omega, f=f, p=p, phi=phi, phi_dot=phi_dot,
                    lam=lam, g=g, F=curv, B=b)


def _two_level_state(omega: float, f: float, p: float, delta_e: float,
                     l_exp: float, tau: float, band: int) -> np.ndarray:
    """Eigenvector of the pointwise classical matrix ap sigma_z + x sigma_x
    with a deterministic sign gauge."""
    a = (omega + tau) * l_exp * p
    x = 2.0 * f * delta_e
    m = np.array([[a, x], [x, -a]])
    w, v = np.linalg.eigh(m)
    idx = 1 if band == +1 else 0
    u = v[:, idx]
    # fix the sign so the larger component is positive
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0:
        u = -u
    return u


def qgt_fd_oracle(omega: float, f: float, p: float, n1: int, n2: int, d: float,
                  h: float = 1e-5, tau: float = 0.0, band: int = +1) -> np.ndarray:
    """Pure-state metric from eigenvector derivatives, by central
    differences: g_{mu nu} = Re <d_mu u| (1 - |u><u|) |d_nu u>.

    Independent of the closed form; valid where the parameter point is
    away from the degeneracy.
    """
    l_exp = angular_expectation(n1, n2)
    delta_e = box_energy(d, n2) - box_energy(d, n1)

    def state(om, ff):
        return _two_level_state(om, ff, p, delta_e, l_exp, tau, band)

    u0 = state(omega, f)
    h_om = h * max(abs(omega), 1e-2)
    h_f = h * max(abs(f), 1e-2)
    du = [
        (state(omega + h_om, f) - state(omega - h_om, f)) / (2 * h_om),
        (state(omega, f + h_f) - state(omega, f - h_f)) / (2 * h_f),
    ]
    proj = np.eye(2) - np.outer(u0, u0)
    g = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            g[i, j] = float(du[i] @ proj @ du[j])
    return g


def _gauss_segments(a: float, b: float, order: int = 48):
    x, w = leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def _triangle_quad(f, v0, v1, v2, order: int = 12):
    """Gauss product rule on a triangle via the Duffy map from the square."""
    x, w = leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    total = 0.0
    area2 = abs(
        (v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1])
    )
    for xi, wi in zip(x, w):
        for yj, wj in zip(x, w):
            # Duffy: (xi, yj) -> barycentric (1-xi, xi*(1-yj), xi*yj)
            lam1 = xi * (1.0 - yj)
            lam2 = xi * yj
            pt = v0 + lam1 * (v1 - v0) + lam2 * (v2 - v0)
            total += wi * wj * xi * f(pt[0], pt[1])
    return total * area2


def berry_loop(loop, p: float, phi_dot_field, n1: int, n2: int, d: float,
               resolution: int = 2, tau: float = 0.0):
    """Curvature flux through a closed polyline in the (omega, f) plane.

    Returns (area_integral, line_integral): the flux by triangle
    quadrature over the fan triangulation of the (convex) loop, and an
    independent line-integral estimate using the gauge with vanishing
    omega-component, whose f-component is the running omega-integral of
    the curvature.
    """
    loop = np.asarray(loop, float)
    if loop.shape[0] < 3:
        raise ValueError("loop needs at least three vertices")
    if np.allclose(loop[0], loop[-1]):
        loop = loop[:-1]

    def f12(om, ff):
        pt = qgt_analytic(om, ff, p, phi_dot_field(om, ff), n1, n2, d, tau=tau)
        return pt.F[0, 1]

    # area integral over the fan triangulation, refined uniformly
    area = 0.0
    for i in range(1, len(loop) - 1):
        tris = [(loop[0], loop[i], loop[i + 1])]
        for _ in range(resolution):
            new = []
            for (a, b, c) in tris:
                ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
                new += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
            tris = new
        for (a, b, c) in tris:
            area += _triangle_quad(f12, np.asarray(a), np.asarray(b), np.asarray(c))
    # the fan orientation: signed area of the polygon fixes the sign
    signed = 0.0
    for i in range(len(loop)):
        x0, y0 = loop[i]
        x1, y1 = loop[(i + 1) % len(loop)]
        signed += x0 * y1 - x1 * y0
    if signed < 0:
        area = -area

    om_ref = float(np.min(loop[:, 0])) - 1e-3

    def a_f(om, ff):
        xs, ws = _gauss_segments(om_ref, om)
        return float(sum(w * f12(x, ff) for x, w in zip(xs, ws)))

    line = 0.0
    for i in range(len(loop)):
        a = loop[i]
        b = loop[(i + 1) % len(loop)]
        df = b[1] - a[1]
        if df == 0.0:
            continue
        ts, ws = _gauss_segments(0.0, 1.0, order=24)
        for t, w in zip(ts, ws):
            om = a[0] + t * (b[0] - a[0])
            ff = a[1] + t * df
            line += w * a_f(om, ff) * df
    return area, line
