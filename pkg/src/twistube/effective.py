"""Effective tangential Hamiltonians for the six transformation cases.

Every case is reduced to the same operator data: a gauge coupling
``alpha(s)`` multiplying sigma_z (a plain scalar for one-dimensional
circular subspaces), a Hermitian deformation potential ``vmat(s)``, and
the curvature potential ``vg(s) = -kappa^2 / 8``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import TransformProfile, metric_tensor
from .transverse import (
    TransverseMode,
    angular_expectation,
    box_energy,
    square_mode,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
IDENTITY_2 = np.eye(2)


def _as_fn(value) -> Callable[[float], float]:
    if callable(value):
        return value
    v = float(value)
    return lambda s: v


def geometric_potential(kappa: float) -> float:
    """Curvature-induced attractive potential -kappa^2 / 8 (natural units)."""
    if kappa < 0:
        raise ValueError("curvature must be nonnegative")
    return -(kappa**2) / 8.0


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Two-level (or scalar) tangential operator description.

    The operator is -1/2 (d/ds - i alpha(s) sigma_z)^2 + vmat(s) + vg(s),
    with sigma_z read as 1 when dim == 1.
    """

    dim: int
    alpha: Callable[[float], float]
    vg: Callable[[float], float]
    vmat: Callable[[float], np.ndarray]
    meta: dict = field(default_factory=dict)

    def vmat_at(self, s: float) -> np.ndarray:
        m = np.atleast_2d(np.asarray(self.vmat(s), dtype=complex))
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"vmat must be {self.dim}x{self.dim}")
        return m


def _vg_fn(kappa) -> Callable[[float], float]:
    kfn = _as_fn(kappa if kappa is not None else 0.0)
    return lambda s: geometric_potential(kfn(s))


def assemble_rotation_circular(omega, tau, l: int, kappa=None) -> EffectiveHamiltonian:
    """Rotating circular cross section: gauge coupling (omega + tau) l."""
    om, tf = _as_fn(omega), _as_fn(tau)
    return EffectiveHamiltonian(
        dim=1,
        alpha=lambda s: (om(s) + tf(s)) * l,
        vg=_vg_fn(kappa),
        vmat=lambda s: np.zeros((1, 1)),
        meta={"case": "rotation-circular", "l": l},
    )


def assemble_rotation_square(omega, tau, n1: int, n2: int, kappa=None) -> EffectiveHamiltonian:
    """Rotating square cross section on the degenerate pair (n1, n2)."""
    if n1 == n2:
        raise ValueError("n1 == n2 spans a one-dimensional subspace; no pair basis")
    om, tf = _as_fn(omega), _as_fn(tau)
    l_exp = angular_expectation(n1, n2)
    return EffectiveHamiltonian(
        dim=2,
        alpha=lambda s: (om(s) + tf(s)) * l_exp,
        vg=_vg_fn(kappa),
        vmat=lambda s: np.zeros((2, 2)),
        meta={"case": "rotation-square", "n1": n1, "n2": n2, "l_exp": l_exp},
    )


def assemble_scaling_circular(f1, f2, delta: float, mode: TransverseMode,
                              tau, kappa=None) -> EffectiveHamiltonian:
    """Scaled circular cross section: a scalar energy shift, no splitting."""
    if mode.kind != "circular":
        raise ValueError("expected a circular transverse mode")
    f1f, f2f, tf = _as_fn(f1), _as_fn(f2), _as_fn(tau)
    e = mode.energy
    l = mode.l_exp
    return EffectiveHamiltonian(
        dim=1,
        alpha=lambda s: tf(s) * l,
        vg=_vg_fn(kappa),
        vmat=lambda s: np.array([[delta * (f1f(s) + f2f(s)) * e]]),
        meta={"case": "scaling-circular", "mode": mode, "delta": delta},
    )


def assemble_scaling_square(f1, f2, delta: float, n1: int, n2: int, d: float,
                            tau, kappa=None) -> EffectiveHamiltonian:
    """Scaled square cross section: trace shift plus a sigma_x splitting."""
    if n1 == n2:
        raise ValueError("n1 == n2 spans a one-dimensional subspace; no pair basis")
    f1f, f2f, tf = _as_fn(f1), _as_fn(f2), _as_fn(tau)
    e1, e2 = box_energy(d, n1), box_energy(d, n2)
    l_exp = angular_expectation(n1, n2)

    def vmat(s):
        trace = delta * (f1f(s) + f2f(s)) * (e1 + e2)
        split = delta * (f1f(s) - f2f(s)) * (e2 - e1)
        return trace * IDENTITY_2 + split * SIGMA_X

    return EffectiveHamiltonian(
        dim=2,
        alpha=lambda s: tf(s) * l_exp,
        vg=_vg_fn(kappa),
        vmat=vmat,
        meta={"case": "scaling-square", "n1": n1, "n2": n2, "d": d,
              "delta": delta, "l_exp": l_exp},
    )


def shear_splitting_coefficient(n1: int, n2: int, d: float, f: float = 1.0) -> float:
    """sigma_x coefficient of the shear potential projected on the pair."""
    e1, e2 = box_energy(d, n1), box_energy(d, n2)
    return (
        -32.0 * f / np.pi**2
        * n1**2 * n2**2 * (e1 + e2)
        / ((n1**2 - n2**2) ** 2 * (n1**2 + n2**2))
    )


def assemble_shearing(f, cross_kind: str, mode: TransverseMode, tau,
                      d: float | None = None, kappa=None) -> EffectiveHamiltonian:
    """Sheared cross section: circular stays degenerate, square splits."""
    ffn, tf = _as_fn(f), _as_fn(tau)
    if cross_kind == "circular":
        l = mode.l_exp
        return EffectiveHamiltonian(
            dim=1,
            alpha=lambda s: tf(s) * l,
            vg=_vg_fn(kappa),
            vmat=lambda s: np.zeros((1, 1)),
            meta={"case": "shearing-circular", "mode": mode},
        )
    if cross_kind != "square":
        raise ValueError("cross_kind must be 'square' or 'circular'")
    n1, n2 = mode.quantum_numbers
    if n1 == n2:
        raise ValueError("n1 == n2 spans a one-dimensional subspace; no pair basis")
    if d is None:
        raise ValueError("square case needs the side length d")
    l_exp = angular_expectation(n1, n2)
    return EffectiveHamiltonian(
        dim=2,
        alpha=lambda s: tf(s) * l_exp,
        vg=_vg_fn(kappa),
        vmat=lambda s: shear_splitting_coefficient(n1, n2, d, ffn(s)) * SIGMA_X,
        meta={"case": "shearing-square", "n1": n1, "n2": n2, "d": d, "l_exp": l_exp},
    )


def assemble_combined(omega, tau, f, delta: float, n1: int, n2: int, d: float,
                      kappa=None, include_delta: bool = True) -> EffectiveHamiltonian:
    """Rotation plus squeezing on a square pair: the full two-level system.

    ``include_delta`` keeps the small-parameter factor in the off-diagonal
    squeeze potential (consistent with the scaling case); disabling it
    reproduces the alternative convention without that factor.
    """
    if n1 == n2:
        raise ValueError("n1 == n2 spans a one-dimensional subspace; no pair basis")
    om, tf, ffn = _as_fn(omega), _as_fn(tau), _as_fn(f)
    e1, e2 = box_energy(d, n1), box_energy(d, n2)
    delta_e = e2 - e1
    l_exp = angular_expectation(n1, n2)
    scale = delta if include_delta else 1.0

    return EffectiveHamiltonian(
        dim=2,
        alpha=lambda s: (om(s) + tf(s)) * l_exp,
        vg=_vg_fn(kappa),
        vmat=lambda s: 2.0 * scale * ffn(s) * delta_e * SIGMA_X,
        meta={"case": "combined", "n1": n1, "n2": n2, "d": d, "delta": delta,
              "delta_e": delta_e, "l_exp": l_exp, "include_delta": include_delta},
    )


# ---------------------------------------------------------------------------
# Quadrature cross-checks of the projected deformation potentials.

def _pair_basis(n1, n2, d, grid):
    q = np.linspace(-d / 2.0, d / 2.0, grid + 1)
    from .transverse import _mode_fn, _mode_fn_prime

    norm = 2.0 / d
    q1 = q[:, None]
    q2 = q[None, :]

    def st(n, m):
        return norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)

    plus = (st(n1, n2) + 1j * st(n2, n1)) / np.sqrt(2.0)
    minus = (st(n1, n2) - 1j * st(n2, n1)) / np.sqrt(2.0)
    return q, plus, minus


def _second_partials(n, m, d, grid, which):
    from .transverse import _mode_fn, _mode_fn_prime

    q = np.linspace(-d / 2.0, d / 2.0, grid + 1)
    norm = 2.0 / d
    q1 = q[:, None]
    q2 = q[None, :]
    k1 = n * np.pi / d
    k2 = m * np.pi / d
    if which == "11":
        return -(k1**2) * norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)
    if which == "22":
        return -(k2**2) * norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)
    if which == "12":
        return norm * _mode_fn_prime(n, d, q1) * _mode_fn_prime(m, d, q2)
    raise ValueError(which)


def _apply_pair(op, n1, n2, d, grid):
    """2x2 matrix of a differential operator between |+> and |-> states."""
    from scipy.integrate import simpson

    q, plus, minus = _pair_basis(n1, n2, d, grid)
    h = q[1] - q[0]

    def op_on(nm):
        n, m = nm
        return op(n, m)

    op_plus = (op_on((n1, n2)) + 1j * op_on((n2, n1))) / np.sqrt(2.0)
    op_minus = (op_on((n1, n2)) - 1j * op_on((n2, n1))) / np.sqrt(2.0)

    def inner(bra, ket):
        return complex(simpson(simpson(np.conj(bra) * ket, dx=h, axis=1), dx=h))

    return np.array(
        [[inner(plus, op_plus), inner(plus, op_minus)],
         [inner(minus, op_plus), inner(minus, op_minus)]]
    )


def scaling_vmat_quadrature(f1: float, f2: float, delta: float, n1: int, n2: int,
                            d: float, grid: int = 256) -> np.ndarray:
    """Projected scaling potential by direct 2-D quadrature.

    Applies -delta/2 [2 f1 d2^2 + 2 f2 d1^2] to the pair basis and
    integrates; the independent check of the closed-form projection.
    """
    def op(n, m):
        d11 = _second_partials(n, m, d, grid, "11")
        d22 = _second_partials(n, m, d, grid, "22")
        return -0.5 * delta * (2.0 * f1 * d22 + 2.0 * f2 * d11)

    return _apply_pair(op, n1, n2, d, grid)


def shear_vmat_quadrature(f: float, n1: int, n2: int, d: float,
                          grid: int = 256) -> np.ndarray:
    """Projected shear potential f d1 d2 by direct 2-D quadrature.

    Projected on the real product basis (psi_{n1 n2}, psi_{n2 n1}), where
    the coupling is the off-diagonal sigma_x form; in the chiral pair
    basis the same operator differs only by a constant phase of the
    second basis state.
    """
    from scipy.integrate import simpson

    from .transverse import _mode_fn

    q, _, _ = _pair_basis(n1, n2, d, grid)
    h = q[1] - q[0]
    norm = 2.0 / d
    q1 = q[:, None]
    q2 = q[None, :]

    def st(n, m):
        return norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)

    def op(n, m):
        return f * _second_partials(n, m, d, grid, "12")

    basis = [(n1, n2), (n2, n1)]
    mat = np.empty((2, 2))
    for i, bra in enumerate(basis):
        for j, ket in enumerate(basis):
            mat[i, j] = float(simpson(
                simpson(st(*bra) * op(*ket), dx=h, axis=1), dx=h))
    return mat


@dataclass(frozen=True)
class ExpansionReport:
    """Numeric size of the dropped expansion terms."""

    delta_used: float
    vt_estimate: float
    slow_var_ratio: float


def vt_diagnostic(curve, profile: TransformProfile, q_max: float,
                  grid: int = 6) -> ExpansionReport:
    """Numerically bound the dropped axial-coupling potential.

    Samples the dropped term over an (s, q') lattice inside the tube and
    reports its maximum magnitude. Pure rotations give exactly zero.
    """
    s_samples = np.linspace(0.05 * curve.length, 0.95 * curve.length, grid)
    ratio = profile.slow_variation_ratio(s_samples, q_max)
    if profile.is_pure_rotation(s_samples):
        return ExpansionReport(profile.delta, 0.0, ratio)

    q_lin = np.linspace(-0.4 * q_max, 0.4 * q_max, grid)
    hq = 1e-4 * max(q_max, 1.0)
    hs = 1e-4 * max(curve.length, 1.0)

    def div_a(s, q):
        out = 0.0
        for a in range(2):
            dq = np.zeros(2)
            dq[a] = hq
            out += (
                metric_tensor(curve, profile, s, q + dq).gauge[a]
                - metric_tensor(curve, profile, s, q - dq).gauge[a]
            ) / (2 * hq)
        return out

    def vt_at(s, q):
        ev = metric_tensor(curve, profile, s, q)
        gamma, det_t = ev.gamma, ev.det_transform
        gauge = ev.gauge
        div = div_a(s, q)

        term2 = div**2 / (4.0 * gamma**2 * det_t**2)

        grad = np.zeros(2)
        for a in range(2):
            dq = np.zeros(2)
            dq[a] = hq
            up = metric_tensor(curve, profile, s, q + dq)
            dn = metric_tensor(curve, profile, s, q - dq)
            grad[a] = (
                div_a(s, q + dq) / up.gamma - div_a(s, q - dq) / dn.gamma
            ) / (2 * hq)
        term1 = (gauge @ grad) / (2.0 * gamma * det_t**2)

        up = metric_tensor(curve, profile, s + hs, q)
        dn = metric_tensor(curve, profile, s - hs, q)
        dsa = (
            up.det_transform / up.gamma * div_a(s + hs, q)
            - dn.det_transform / dn.gamma * div_a(s - hs, q)
        ) / (2 * hs)
        term3 = dsa / (2.0 * gamma * det_t**2)
        # the rewritten Laplacian carries -V_T; in energy units that is +V_T/2
        return 0.5 * (term1 + term2 + term3)

    worst = 0.0
    for s in s_samples:
        for qa in q_lin:
            for qb in q_lin:
                worst = max(worst, abs(vt_at(s, np.array([qa, qb]))))
    return ExpansionReport(profile.delta, worst, ratio)
