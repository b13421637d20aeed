"""Transverse eigenmodes of square and circular cross sections.

Square modes use the centered-box convention sin(n pi q / d - n pi / 2)
on q in [-d/2, d/2]; circular modes only need their eigenenergies, which
come from Bessel-function zeros computed from scratch.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TransverseMode:
    """One confined cross-section eigenstate."""

    kind: str                      # "square" or "circular"
    energies: tuple[float, ...]    # (E_n1, E_n2) for square, (E_nl,) circular
    l_exp: float                   # angular-momentum expectation / hbar
    quantum_numbers: tuple[int, ...]

    @property
    def energy(self) -> float:
        return float(sum(self.energies))


def box_energy(d: float, n: int) -> float:
    """Hard-wall 1D level (n pi / d)^2 / 2 in natural units."""
    return (n * np.pi / d) ** 2 / 2.0


def angular_expectation(n1: int, n2: int) -> float:
    """Closed-form angular-momentum expectation in the degenerate pair basis.

    Zero when n1 + n2 is even; antisymmetric under swapping n1 and n2.
    For n1 == n2 the subspace is one-dimensional and the value is 0 by
    convention.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("quantum numbers must be positive")
    if n1 == n2:
        return 0.0
    bracket = (-1.0 + (-1.0) ** (n1 + n2)) ** 2
    return 16.0 * n1**2 * n2**2 * bracket / ((n1**2 - n2**2) ** 3 * np.pi**2)


def _mode_fn(n: int, d: float, q: np.ndarray) -> np.ndarray:
    return np.sin(n * np.pi * q / d - n * np.pi / 2.0)


def _mode_fn_prime(n: int, d: float, q: np.ndarray) -> np.ndarray:
    return (n * np.pi / d) * np.cos(n * np.pi * q / d - n * np.pi / 2.0)


def _simpson_2d(values: np.ndarray, h: float) -> float:
    from scipy.integrate import simpson

    return simpson(simpson(values, dx=h, axis=1), dx=h)


def angular_expectation_quadrature(n1: int, n2: int, grid: int = 256,
                                   d: float = 1.0) -> float:
    """Quadrature oracle for :func:`angular_expectation`.

    Evaluates <+| L |+> / hbar with L = i hbar (q2 d/dq1 - q1 d/dq2) over
    the square, using analytic derivatives of the sine eigenfunctions and
    composite quadrature on a (grid+1)^2 point lattice.
    """
    if n1 == n2:
        raise ValueError("degenerate pair requires n1 != n2")
    if grid < 64:
        raise ValueError("grid must be at least 64")
    q = np.linspace(-d / 2.0, d / 2.0, grid + 1)
    h = q[1] - q[0]
    q1 = q[:, None]
    q2 = q[None, :]
    norm = 2.0 / d

    def st(n, m):
        return norm * _mode_fn(n, d, q1) * _mode_fn(m, d, q2)

    def d1(n, m):
        return norm * _mode_fn_prime(n, d, q1) * _mode_fn(m, d, q2)

    def d2(n, m):
        return norm * _mode_fn(n, d, q1) * _mode_fn_prime(m, d, q2)

    plus = (st(n1, n2) + 1j * st(n2, n1)) / np.sqrt(2.0)
    dplus_1 = (d1(n1, n2) + 1j * d1(n2, n1)) / np.sqrt(2.0)
    dplus_2 = (d2(n1, n2) + 1j * d2(n2, n1)) / np.sqrt(2.0)
    integrand = 1j * np.conj(plus) * (q2 * dplus_1 - q1 * dplus_2)
    return float(np.real(_simpson_2d(integrand, h)))


def square_mode(d: float, n1: int, n2: int) -> TransverseMode:
    """Square-box transverse mode with energies and <L> expectation."""
    if d <= 0:
        raise ValueError("side length must be positive")
    if n1 < 1 or n2 < 1:
        raise ValueError("quantum numbers must be positive")
    return TransverseMode(
        kind="square",
        energies=(box_energy(d, n1), box_energy(d, n2)),
        l_exp=angular_expectation(n1, n2),
        quantum_numbers=(n1, n2),
    )


def bessel_j(order: int, x: float, n_nodes: int | None = None) -> float:
    """Integer-order Bessel function via the trapezoid rule on its
    integral representation J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt.

    The integrand is smooth and the rule converges geometrically in the
    node count, so a modest fixed budget reaches machine accuracy.
    """
    order = abs(int(order))
    if n_nodes is None:
        n_nodes = 64 + 4 * int(abs(x)) + 8 * order
    t = np.linspace(0.0, np.pi, n_nodes + 1)
    y = np.cos(order * t - x * np.sin(t))
    return float(np.trapezoid(y, t) / np.pi)


_zero_cache: dict[tuple[int, int], float] = {}
_zero_lock = threading.Lock()


def bessel_zero(l: int, n: int) -> float:
    """n-th positive zero of J_|l|, by sign scanning plus bisection.

    Results are memoized; the cache is guarded by a lock so concurrent
    readers are safe.
    """
    if n < 1:
        raise ValueError("zero index must be positive")
    l = abs(int(l))
    key = (l, n)
    with _zero_lock:
        if key in _zero_cache:
            return _zero_cache[key]
    found = 0
    step = 0.1
    x_prev = max(l * 0.5, step)  # J_l > 0 on (0, j_{l,1}); start inside
    f_prev = bessel_j(l, x_prev)
    x = x_prev
    root = None
    while found < n:
        x += step
        f = bessel_j(l, x)
        if f_prev == 0.0:
            found += 1
            root = x_prev
        elif f_prev * f < 0.0:
            found += 1
            lo, hi = x_prev, x
            flo = f_prev
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = bessel_j(l, mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            root = 0.5 * (lo + hi)
        x_prev, f_prev = x, f
    with _zero_lock:
        _zero_cache[key] = root
    return root


def circular_mode(r_c: float, n: int, l: int) -> TransverseMode:
    """Hard-wall disc mode: energy from the Bessel zero, <L> = l."""
    if r_c <= 0:
        raise ValueError("radius must be positive")
    if n < 1:
        raise ValueError("radial quantum number must be positive")
    j = bessel_zero(l, n)
    return TransverseMode(
        kind="circular",
        energies=(j**2 / (2.0 * r_c**2),),
        l_exp=float(l),
        quantum_numbers=(n, l),
    )
