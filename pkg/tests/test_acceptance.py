"""End-to-end acceptance checks.

Each test prints a single pass/fail line summarising one headline
guarantee of the package, then asserts it.  Run with ``pytest -v -s``
to see the lines for passing checks as well.
"""

import time

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from twistube import (
    Grid1D,
    HelixCurve,
    TransformProfile,
    angular_expectation,
    angular_expectation_quadrature,
    assemble_combined,
    assemble_rotation_circular,
    assemble_rotation_square,
    assemble_scaling_circular,
    assemble_scaling_square,
    berry_loop,
    circular_mode,
    discretize,
    eigensolve_near,
    metric_tensor,
    metric_tensor_fd,
    mixing_angle,
    phase_evolution_scan,
    qgt_analytic,
    qgt_fd_oracle,
    shear_splitting_coefficient,
)
from twistube.effective import scaling_vmat_quadrature, shear_vmat_quadrature

DELTA_E = 3.0 * np.pi**2 / 2.0


def _report(name, ok, detail):
    print(f"\n[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_metric_closed_form_matches_finite_differences():
    t0 = time.time()
    curve = HelixCurve(radius=7.0, pitch=1.0, length=50.0)
    profile = TransformProfile.combined(
        theta=lambda s: 0.02 * s,
        f=lambda s: np.sin(2.0 * np.pi * s / 50.0),
        delta=0.02,
    )
    rng = np.random.default_rng(7)
    worst_g = worst_det = worst_inv = 0.0
    for _ in range(200):
        s = float(rng.uniform(0.5, 49.5))
        q = rng.uniform(-0.4, 0.4, size=2)
        ev = metric_tensor(curve, profile, s, q)
        g_fd = metric_tensor_fd(curve, profile, s, q)
        worst_g = max(worst_g, np.max(np.abs(ev.G - g_fd)) / np.max(np.abs(ev.G)))
        worst_det = max(worst_det, abs(ev.det_closed - np.linalg.det(ev.G)))
        worst_inv = max(worst_inv, np.max(np.abs(ev.G @ ev.Ginv - np.eye(3))))
    dt = time.time() - t0
    ok = worst_g < 1e-6 and worst_det < 1e-10 and worst_inv < 1e-8 and dt < 5.0
    _report(
        "metric-closed-form",
        ok,
        f"rel dG {worst_g:.2e} <1e-6, ddet {worst_det:.2e} <1e-10, "
        f"G*Ginv-I {worst_inv:.2e} <1e-8, {dt:.2f}s <5s",
    )


def test_angular_matrix_elements_match_quadrature():
    t0 = time.time()
    worst_odd = worst_even = 0.0
    for n1 in range(1, 5):
        for n2 in range(n1 + 1, 6):
            quad = angular_expectation_quadrature(n1, n2, grid=256)
            if (n1 + n2) % 2 == 1:
                worst_odd = max(worst_odd, abs(angular_expectation(n1, n2) - quad))
            else:
                worst_even = max(worst_even, abs(quad))
    ref = abs(angular_expectation(1, 2) - 256.0 / (-27.0 * np.pi**2))
    dt = time.time() - t0
    ok = worst_odd < 1e-6 and worst_even < 1e-10 and ref < 1e-14 and dt < 10.0
    _report(
        "angular-matrix-elements",
        ok,
        f"odd pairs {worst_odd:.2e} <1e-6, even pairs {worst_even:.2e} <1e-10, "
        f"<L>_12 dev {ref:.1e}, {dt:.2f}s <10s",
    )


def test_degeneracy_splitting_invariants():
    samples = np.linspace(0.0, 10.0, 7)

    def vmax(ham):
        return max(np.max(np.abs(ham.vmat_at(s))) for s in samples)

    rot_c = vmax(assemble_rotation_circular(0.02, 0.02, l=1))
    rot_s = vmax(assemble_rotation_square(0.02, 0.02, 1, 2))
    squeeze_c = vmax(
        assemble_scaling_circular(0.7, -0.7, 0.02, circular_mode(1.0, 1, 1), 0.02)
    )

    delta, f = 0.02, 0.7
    ham = assemble_scaling_square(f, -f, delta, 1, 2, 1.0, 0.02)
    coeff = float(np.real(ham.vmat_at(0.0)[0, 1]))
    closed = 2.0 * delta * f * DELTA_E
    quad = scaling_vmat_quadrature(f, -f, delta, 1, 2, 1.0)[0, 1]
    squeeze_dev = max(abs(coeff - closed), abs(coeff - quad))

    shear = shear_splitting_coefficient(1, 2, 1.0, f=1.0)
    shear_quad = shear_vmat_quadrature(1.0, 1, 2, 1.0)[0, 1]
    shear_dev = max(abs(shear - (-64.0 / 9.0)), abs(shear - shear_quad))

    ok = (
        rot_c == 0.0
        and rot_s == 0.0
        and squeeze_c == 0.0
        and squeeze_dev < 1e-6
        and shear_dev < 1e-6
    )
    _report(
        "degeneracy-invariants",
        ok,
        f"rotation/circular-squeeze couplings {max(rot_c, rot_s, squeeze_c):.1e}, "
        f"squeeze coeff dev {squeeze_dev:.2e} <1e-6, "
        f"shear coeff dev {shear_dev:.2e} <1e-6",
    )


def test_semiclassical_splitting_matches_eigensolver():
    t0 = time.time()
    s0 = 25.0
    ham = assemble_combined(
        0.02, 0.02, lambda s: np.sin(2.0 * np.pi * s / s0), 0.02, 1, 2, 1.0
    )
    a = float(ham.alpha(0.0))
    sg = np.linspace(0.0, s0, 2001)
    xs = np.array([float(np.real(ham.vmat_at(s)[0, 1])) for s in sg])

    def action(energy):
        return simpson(np.sqrt(2.0 * (energy - xs) - a * a), x=sg)

    # Counter-propagating quantisation on one adiabatic branch: the gauge
    # term contributes +a*s0 to one direction of travel and -a*s0 to the
    # other, so the two directions quantise at different energies.
    mode = 80
    target = 2.0 * np.pi * mode
    e0 = 0.5 * (target / s0) ** 2
    e_right = brentq(lambda e: a * s0 + action(e) - target, 0.5 * e0, 2.0 * e0)
    e_left = brentq(lambda e: -a * s0 + action(e) - target, 0.5 * e0, 2.0 * e0)
    predicted = abs(e_right - e_left)

    n = 2048
    matrix = discretize(ham, Grid1D(s0, n, bc="periodic"), sparse=True)
    vals, vecs = eigensolve_near(matrix, 0.5 * (e_right + e_left), 12)
    hits = []
    for val, vec in zip(vals, vecs.T):
        spec = np.abs(np.fft.fft(vec[:n])) ** 2 + np.abs(np.fft.fft(vec[n:])) ** 2
        j = int(np.argmax(spec))
        hits.append((float(np.real(val)), min(j, n - j)))
    levels = sorted(e for e, m in hits if m == mode)
    assert len(levels) == 4, f"expected two doublets, got {levels}"
    measured = abs(np.mean(levels[2:]) - np.mean(levels[:2]))
    mismatch = abs(predicted - measured) / measured
    dt = time.time() - t0
    ok = mismatch < 0.05 and dt < 60.0
    _report(
        "chirality-splitting",
        ok,
        f"semiclassical {predicted:.4f} vs eigensolver {measured:.4f}, "
        f"mismatch {mismatch:.1%} <5%, {dt:.1f}s <60s",
    )


def test_cross_section_phase_flip_and_rotation():
    t0 = time.time()
    s0 = 50.0
    ham = assemble_combined(
        0.02, 0.02, lambda s: np.sin(2.0 * np.pi * s / s0), 0.02, 1, 2, 1.0
    )
    energy = 59.2
    jump = phase_evolution_scan(ham, energy, +1, [0.49 * s0, 0.51 * s0]).phase_jumps[0]

    scan = phase_evolution_scan(ham, energy, +1, [s0 / 4.0, 3.0 * s0 / 4.0])
    a_first = scan.fields[0].amplitude
    a_second = scan.fields[1].amplitude
    corr = max(
        np.corrcoef(a_second.ravel(), np.rot90(a_first, k).ravel())[0, 1]
        for k in (1, 3)
    )
    dt = time.time() - t0
    ok = abs(jump - np.pi) < 0.2 and corr > 0.99 and dt < 30.0
    _report(
        "cross-section-phase-flip",
        ok,
        f"phase jump {jump:.3f} rad (pi+-0.2), quarter-turn correlation "
        f"{corr:.6f} >0.99, {dt:.1f}s <30s",
    )


def test_geometric_tensor_consistency():
    t0 = time.time()
    p, tau = 10.0, 0.02
    l12 = angular_expectation(1, 2)

    no_drive = qgt_analytic(0.05, 0.4, p, 0.0, 1, 2, 1.0, tau=tau)
    curvature_off = no_drive.F[0, 1] == 0.0

    worst_identity = 0.0
    for om in np.linspace(0.01, 0.1, 50):
        for f in np.linspace(0.05, 1.0, 50):
            ap = (om + tau) * l12 * p
            phi, lam = mixing_angle(f, ap, DELTA_E)
            scale = np.sqrt(2.0 * lam * (lam - ap))
            c = 2.0 * f * DELTA_E / scale
            s = (lam - ap) / scale
            worst_identity = max(worst_identity, abs(c * c + s * s - 1.0))

    worst_metric = worst_asym = 0.0
    min_eig = np.inf
    for om, f in ((0.05, 0.4), (0.02, 0.15), (0.08, 0.9)):
        g_fd = qgt_fd_oracle(om, f, p, 1, 2, 1.0, tau=tau)
        pt = qgt_analytic(om, f, p, 0.0, 1, 2, 1.0, tau=tau)
        worst_metric = max(worst_metric, np.max(np.abs(pt.g - g_fd)))
        worst_asym = max(worst_asym, abs(g_fd[0, 1] - g_fd[1, 0]))
        min_eig = min(min_eig, np.min(np.linalg.eigvalsh(g_fd)))

    loop = [(0.01, 0.1), (0.05, 0.1), (0.05, 0.5), (0.01, 0.5)]
    area, line = berry_loop(
        loop, p, lambda om, f: 0.02 + 0.01 * np.sin(5.0 * om + 2.0 * f),
        1, 2, 1.0, tau=tau,
    )
    stokes = abs(line - area) / abs(area)
    dt = time.time() - t0
    ok = (
        curvature_off
        and worst_identity < 1e-12
        and worst_metric < 1e-6
        and worst_asym < 1e-9
        and min_eig > -1e-12
        and stokes < 1e-4
        and dt < 30.0
    )
    _report(
        "geometric-tensor",
        ok,
        f"F12(no drive)=0 {curvature_off}, angle identity {worst_identity:.1e} "
        f"<1e-12, metric vs oracle {worst_metric:.1e} <1e-6, oracle symmetric "
        f"PSD (asym {worst_asym:.1e}, min eig {min_eig:.1e}), loop flux "
        f"mismatch {stokes:.1e} <1e-4, {dt:.1f}s <30s",
    )


def test_discretization_second_order_convergence():
    ham = assemble_combined(0.0, 0.0, 0.0, 0.02, 1, 2, 1.0)
    length = 10.0
    exact = np.pi**2 / (2.0 * length**2)
    errors = []
    for n in (256, 512, 1024):
        matrix = discretize(ham, Grid1D(length, n, bc="dirichlet"), sparse=True)
        vals, _ = eigensolve_near(matrix, exact, 2)
        errors.append(abs(float(np.real(vals[0])) - exact))
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
    ok = all(abs(o - 2.0) < 0.2 for o in orders)
    _report(
        "discretization-convergence",
        ok,
        f"measured orders {orders[0]:.3f}, {orders[1]:.3f} within 2.0+-0.2",
    )
