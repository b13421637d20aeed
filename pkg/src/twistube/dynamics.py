"""Tangential solvers: finite-difference eigenproblem, direct ODE
propagation at fixed energy, the semiclassical branch construction, and
cross-section field reconstruction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .effective import EffectiveHamiltonian
from .transverse import _mode_fn


class DynamicsError(Exception):
    pass


class ResolutionError(DynamicsError):
    """Grid too coarse for the requested operator."""


class TurningPointError(DynamicsError):
    """Classically forbidden region reached; not traversed."""


class DegeneratePointError(DynamicsError):
    """Semiclassical spinor undefined (vanishing local gap)."""


@dataclass(frozen=True)
class Grid1D:
    length: float
    n: int
    bc: str = "periodic"  # "periodic" or "dirichlet"

    def __post_init__(self):
        if self.n < 64:
            raise ValueError("need at least 64 grid points")
        if self.bc not in ("periodic", "dirichlet"):
            raise ValueError("bc must be 'periodic' or 'dirichlet'")

    @property
    def h(self) -> float:
        return self.length / self.n if self.bc == "periodic" else self.length / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        if self.bc == "periodic":
            return np.arange(self.n) * self.h
        return (np.arange(self.n) + 1) * self.h


def _fd_matrices(grid: Grid1D):
    n, h = grid.n, grid.h
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    d2 = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    d1 = sp.diags([-off, off], [-1, 1], format="lil")
    if grid.bc == "periodic":
        d2[0, n - 1] = d2[n - 1, 0] = 1.0
        d1[0, n - 1] = -1.0
        d1[n - 1, 0] = 1.0
    return (d2.tocsr() / h**2), (d1.tocsr() / (2 * h))


def discretize(ham: EffectiveHamiltonian, grid: Grid1D, sparse: bool = False):
    """Hermitian matrix form of the tangential operator on the grid.

    Second-order central differences; the gauge term uses the symmetrized
    product (alpha D + D alpha)/2 so the matrix is Hermitian by
    construction.
    """
    s = grid.points
    alpha = np.array([ham.alpha(x) for x in s])
    if np.max(np.abs(alpha)) * grid.h > 0.5:
        raise ResolutionError(
            "grid too coarse for the gauge coupling (|alpha| h > 0.5)"
        )
    vg = np.array([ham.vg(x) for x in s])
    vmats = np.array([ham.vmat_at(x) for x in s])  # (n, dim, dim)
    if np.max(np.abs(vmats - np.conj(np.swapaxes(vmats, 1, 2)))) > 1e-12:
        raise ValueError("vmat is not Hermitian")

    d2, d1 = _fd_matrices(grid)
    a_diag = sp.diags(alpha)

    def block(sign):
        gauge = 0.5j * sign * (a_diag @ d1 + d1 @ a_diag)
        return (-0.5 * d2 + gauge + sp.diags(0.5 * alpha**2 + vg)).tocsr()

    if ham.dim == 1:
        mat = (block(+1) + sp.diags(vmats[:, 0, 0])).tocsr()
    else:
        upper = block(+1) + sp.diags(vmats[:, 0, 0])
        lower = block(-1) + sp.diags(vmats[:, 1, 1])
        coupling = sp.diags(vmats[:, 0, 1])
        mat = sp.bmat(
            [[upper, coupling], [coupling.conj().T, lower]], format="csr"
        )
    if sparse:
        return mat
    dense = mat.toarray()
    assert np.max(np.abs(dense - dense.conj().T)) < 1e-10
    return dense


def eigensolve(matrix, k: int):
    """Lowest k eigenpairs of a Hermitian matrix, eigenvalues ascending."""
    m = np.asarray(matrix)
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(m)
    return w[:k], v[:, :k]


def eigensolve_near(matrix, sigma: float, k: int):
    """k eigenpairs nearest ``sigma`` via sparse shift-invert."""
    m = sp.csc_matrix(matrix)
    w, v = spla.eigsh(m, k=k, sigma=sigma, which="LM")
    order = np.argsort(w)
    return w[order], v[:, order]


@dataclass(frozen=True)
class TwoLevelField:
    """Solution samples phi(s) of the tangential equation at fixed energy."""

    s: np.ndarray
    values: np.ndarray       # (n_samples, dim) complex
    derivatives: np.ndarray  # (n_samples, dim) complex
    energy: float


def propagate(ham: EffectiveHamiltonian, energy: float, phi0, dphi0,
              s_span: tuple[float, float], n_samples: int = 200,
              rtol: float = 1e-10, atol: float = 1e-12) -> TwoLevelField:
    """Integrate the fixed-energy second-order system along s.

    phi'' = 2 i alpha S phi' + i alpha' S phi + alpha^2 phi
            + 2 (vmat + vg - E) phi,   S = sigma_z (or 1 when dim == 1).
    """
    dim = ham.dim
    sz = np.array([1.0, -1.0])[:dim] if dim == 2 else np.array([1.0])
    h = 1e-6

    def alpha_prime(s):
        return (ham.alpha(s + h) - ham.alpha(s - h)) / (2 * h)

    def rhs(s, y):
        phi = y[:dim]
        dphi = y[dim:]
        a = ham.alpha(s)
        v = ham.vmat_at(s) + ham.vg(s) * np.eye(dim)
        ddphi = (
            2j * a * sz * dphi
            + 1j * alpha_prime(s) * sz * phi
            + a**2 * phi
            + 2.0 * (v @ phi - energy * phi)
        )
        return np.concatenate([dphi, ddphi])

    y0 = np.concatenate(
        [np.asarray(phi0, complex).ravel(), np.asarray(dphi0, complex).ravel()]
    )
    t_eval = np.linspace(s_span[0], s_span[1], n_samples)
    sol = solve_ivp(rhs, s_span, y0, method="RK45", rtol=rtol, atol=atol,
                    t_eval=t_eval)
    if not sol.success:
        raise DynamicsError(f"integration failed: {sol.message}")
    y = sol.y.T
    return TwoLevelField(
        s=sol.t, values=y[:, :dim], derivatives=y[:, dim:], energy=energy
    )


def flux_invariant(field: TwoLevelField, ham: EffectiveHamiltonian) -> np.ndarray:
    """Conserved current Im phi^dag (phi' - i alpha sigma_z phi) along s."""
    dim = ham.dim
    sz = np.array([1.0, -1.0])[:dim] if dim == 2 else np.array([1.0])
    alpha = np.array([ham.alpha(x) for x in field.s])
    covariant = field.derivatives - 1j * alpha[:, None] * sz * field.values
    return np.imag(np.sum(np.conj(field.values) * covariant, axis=1))


def wkb_momenta(energy: float, alpha: float, f_delta_e: float,
                direction: int = +1, warn: bool = True):
    """Branch momenta p+- at fixed energy (the printed closed form).

    p+- = +-alpha + direction * sqrt(2 (E -+ 2 f dE) - alpha^2).
    ``direction`` selects the co- or counter-propagating root of each
    branch.
    """
    x = 2.0 * f_delta_e
    if warn:
        if energy < 10.0 * abs(x):
            warnings.warn("energy not well above the squeeze coupling; "
                          "semiclassical validity marginal", stacklevel=2)
        if energy < 10.0 * alpha**2 / 2.0:
            warnings.warn("energy not well above the gauge energy scale; "
                          "semiclassical validity marginal", stacklevel=2)
    args = (2.0 * (energy - x) - alpha**2, 2.0 * (energy + x) - alpha**2)
    if args[0] <= 0 or args[1] <= 0:
        raise TurningPointError(
            f"classically forbidden at E={energy} (radicand <= 0)"
        )
    p_plus = alpha + direction * np.sqrt(args[0])
    p_minus = -alpha - direction * np.sqrt(args[1])
    return p_plus, p_minus


def branch_momentum(energy: float, alpha: float, f_delta_e: float,
                    band: int, direction: int = +1, tol: float = 1e-13) -> float:
    """Momentum on one adiabatic branch, solving the exact local dispersion
    (p^2 + alpha^2)/2 + band * sqrt((alpha p)^2 + (2 f dE)^2) = E
    by Newton iteration seeded with the closed-form approximation.
    """
    x = 2.0 * f_delta_e
    p = direction * np.sqrt(max(2.0 * energy, 1e-30))
    for _ in range(100):
        lam = np.hypot(alpha * p, x)
        val = 0.5 * (p**2 + alpha**2) + band * lam - energy
        dlam = alpha**2 * p / lam if lam > 0 else 0.0
        dval = p + band * dlam
        step = val / dval
        p -= step
        if abs(step) < tol * max(1.0, abs(p)):
            break
    lam = np.hypot(alpha * p, x)
    if 0.5 * (p**2 + alpha**2) + band * lam - energy > 1e-8:
        raise TurningPointError("no classical momentum on this branch")
    return p


@dataclass(frozen=True)
class WKBSample:
    """One branch sample: momentum, local gap, spinor, amplitude factor."""

    sign: int
    p: float
    lam: float
    u: np.ndarray
    amplitude: float


def wkb_spinors(s: float, branch: int, ham: EffectiveHamiltonian,
                energy: float, direction: int = +1,
                warn: bool = False) -> WKBSample:
    """Slowly varying spinor of one semiclassical branch at arclength s."""
    if ham.dim != 2:
        raise ValueError("spinor construction needs a two-level system")
    alpha = ham.alpha(s)
    x = float(np.real(ham.vmat_at(s)[0, 1]))  # off-diagonal 2 f dE
    p_plus, p_minus = wkb_momenta(energy, alpha, x / 2.0, direction=direction,
                                  warn=warn)
    if branch == +1:
        p = p_plus
        a = alpha * p
        lam = np.hypot(x, a)
        if lam < 1e-14:
            raise DegeneratePointError(f"vanishing local gap at s={s}")
        # lam - a computed stably when a > 0
        lam_minus_a = x**2 / (lam + a) if a > 0 else lam - a
        denom = 2.0 * lam * lam_minus_a
        if denom <= 0:
            raise DegeneratePointError(f"degenerate spinor point at s={s}")
        u = np.array([x, lam_minus_a]) / np.sqrt(denom)
        amplitude = 1.0 / np.sqrt(abs(p - alpha))
    elif branch == -1:
        p = p_minus
        a = alpha * p
        lam = np.hypot(x, a)
        if lam < 1e-14:
            raise DegeneratePointError(f"vanishing local gap at s={s}")
        lam_plus_a = x**2 / (lam - a) if a < 0 else lam + a
        denom = 2.0 * lam * lam_plus_a
        if denom <= 0:
            raise DegeneratePointError(f"degenerate spinor point at s={s}")
        u = np.array([-lam_plus_a, x]) / np.sqrt(denom)
        amplitude = 1.0 / np.sqrt(abs(p + alpha))
    else:
        raise ValueError("branch must be +1 or -1")
    return WKBSample(sign=branch, p=p, lam=lam, u=u, amplitude=amplitude)


@dataclass(frozen=True)
class CrossSectionField:
    """Amplitude and wrapped phase of the reconstructed state on the
    cross-section grid."""

    q1: np.ndarray
    q2: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    s: float


def pair_states(n1: int, n2: int, d: float, grid2d: int):
    """Degenerate pair basis |+>, |-> sampled on the square grid."""
    q = np.linspace(-d / 2.0, d / 2.0, grid2d)
    norm = 2.0 / d
    q1 = q[:, None]
    q2 = q[None, :]

    def st(n, m):
        return norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)

    plus = (st(n1, n2) + 1j * st(n2, n1)) / np.sqrt(2.0)
    minus = (st(n1, n2) - 1j * st(n2, n1)) / np.sqrt(2.0)
    return q, plus, minus


def reconstruct_field(u, n1: int, n2: int, d: float, grid2d: int = 64,
                      s: float = 0.0) -> CrossSectionField:
    """Superpose the pair basis with spinor weights and return amplitude
    and wrapped phase arrays."""
    if n1 == n2:
        raise ValueError("pair basis needs n1 != n2")
    u = np.asarray(u, complex)
    q, plus, minus = pair_states(n1, n2, d, grid2d)
    psi = u[0] * plus + u[1] * minus
    return CrossSectionField(
        q1=q, q2=q, amplitude=np.abs(psi), phase=np.angle(psi), s=s
    )


def _wrap(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class FieldScan:
    s_samples: np.ndarray
    fields: list
    phase_jumps: np.ndarray  # median |wrapped phase step| per consecutive pair
    spinors: list


def phase_evolution_scan(ham: EffectiveHamiltonian, energy: float, branch: int,
                         s_samples: Sequence[float], grid2d: int = 64,
                         direction: int | None = None) -> FieldScan:
    """Sample the branch spinor along the tube and reconstruct fields.

    Phase jumps between consecutive snapshots are scored by the median
    wrapped phase difference over well-lit pixels (amplitude above a
    tenth of the maximum in both snapshots), which is robust to the
    gauge ambiguity at amplitude zeros.
    """
    meta = ham.meta
    n1, n2, d = meta["n1"], meta["n2"], meta["d"]
    if direction is None:
        # follow the mover whose gauge energy is positive; this is the
        # branch whose zero-squeeze limit is the bare |+> state
        a_ref = ham.alpha(s_samples[0])
        direction = +1 if a_ref >= 0 else -1
    spinors = []
    fields = []
    for s in s_samples:
        sample = wkb_spinors(s, branch, ham, energy, direction=direction)
        spinors.append(sample)
        fields.append(reconstruct_field(sample.u, n1, n2, d, grid2d, s=s))
    jumps = np.zeros(max(len(fields) - 1, 0))
    for i in range(len(fields) - 1):
        a, b = fields[i], fields[i + 1]
        mask = (a.amplitude > 0.1 * a.amplitude.max()) & (
            b.amplitude > 0.1 * b.amplitude.max()
        )
        dphi = _wrap(b.phase[mask] - a.phase[mask])
        jumps[i] = np.median(np.abs(dphi))
    return FieldScan(
        s_samples=np.asarray(s_samples, float),
        fields=fields,
        phase_jumps=jumps,
        spinors=spinors,
    )
