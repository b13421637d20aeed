"""Command-line interface.

Every subcommand reads a JSON run configuration, writes deterministic
tables (and optionally figures) into the output directory, and prints a
one-line summary. Exit codes: 0 success, 2 configuration error,
3 geometry error, 4 transverse/effective-model error, 5 dynamics error,
6 quantum-geometry error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import config as cfgmod
from . import report
from .config import ConfigError, RunConfig
from .dynamics import (
    DynamicsError,
    Grid1D,
    TurningPointError,
    discretize,
    eigensolve,
    eigensolve_near,
    flux_invariant,
    phase_evolution_scan,
    propagate,
    wkb_momenta,
    wkb_spinors,
)
from .effective import (
    EffectiveHamiltonian,
    assemble_combined,
    assemble_rotation_circular,
    assemble_rotation_square,
    assemble_scaling_circular,
    assemble_scaling_square,
    assemble_shearing,
)
from .geometry import GeometryError, metric_tensor, metric_tensor_fd
from .qgt import QGTError, berry_loop, qgt_analytic
from .transverse import angular_expectation, box_energy, circular_mode, square_mode

EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_EFFECTIVE = 4
EXIT_DYNAMICS = 5
EXIT_QGT = 6


def build_hamiltonian(cfg: RunConfig) -> EffectiveHamiltonian:
    """Assemble the effective Hamiltonian selected by the configuration."""
    curve = cfg.build_curve()
    kappa, tau = curve.kappa, curve.tau
    p = cfg.profile
    d = cfg.cross_size
    if p.kind == "rotation":
        if cfg.cross_kind == "circular":
            return assemble_rotation_circular(p.omega, tau, cfg.circ_l, kappa)
        return assemble_rotation_square(p.omega, tau, cfg.n1, cfg.n2, kappa)
    if p.kind == "scaling":
        f1 = p.f1_value or 0.0
        f2 = p.f2_value or 0.0
        if cfg.cross_kind == "circular":
            mode = circular_mode(d, cfg.circ_n, cfg.circ_l)
            return assemble_scaling_circular(f1, f2, p.delta, mode, tau, kappa)
        return assemble_scaling_square(f1, f2, p.delta, cfg.n1, cfg.n2, d,
                                       tau, kappa)
    if p.kind == "shearing":
        f, _ = p.f_function(cfg.length)
        if cfg.cross_kind == "circular":
            mode = circular_mode(d, cfg.circ_n, cfg.circ_l)
            return assemble_shearing(f, "circular", mode, tau, kappa=kappa)
        mode = square_mode(d, cfg.n1, cfg.n2)
        return assemble_shearing(f, "square", mode, tau, d=d, kappa=kappa)
    # combined rotation + squeezing (square pair)
    if cfg.cross_kind != "square":
        raise ConfigError("combined profile requires a square cross section")
    f, _ = p.f_function(cfg.length)
    return assemble_combined(p.omega, tau, f, p.delta, cfg.n1, cfg.n2, d,
                             kappa, include_delta=cfg.coupling_includes_delta)


def resolve_energy(cfg: RunConfig, ham: EffectiveHamiltonian) -> float:
    """Longitudinal energy: the configured value, or in 'auto' mode a
    hundredfold of the largest perturbation scale so the fast-mover
    expansion is valid."""
    if cfg.energy != "auto":
        return float(cfg.energy)
    s = np.linspace(0.0, cfg.length, 201)
    a_max = max(abs(ham.alpha(x)) for x in s)
    v_max = max(np.max(np.abs(ham.vmat_at(x))) for x in s)
    scale = max(v_max, 0.5 * a_max**2, 1e-3)
    return 100.0 * scale


def _load(args) -> RunConfig:
    cfg = cfgmod.parse_config(args.config)
    updates = {}
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.format is not None:
        updates["out_format"] = args.format
    if args.grid is not None:
        updates["points"] = args.grid
    if args.energy is not None:
        updates["energy"] = args.energy if args.energy == "auto" else float(args.energy)
    if updates:
        from dataclasses import replace
        cfg = replace(cfg, **updates)
    return cfg


def cmd_modes(cfg: RunConfig):
    table = report.ResultTable("modes")
    if cfg.cross_kind == "square":
        n_max = max(cfg.n1, cfg.n2) + 2
        rows = [(n, m) for n in range(1, n_max + 1) for m in range(1, n_max + 1)
                if n <= m]
        table.add_column("n1", [r[0] for r in rows])
        table.add_column("n2", [r[1] for r in rows])
        table.add_column("energy", [box_energy(cfg.cross_size, r[0])
                                    + box_energy(cfg.cross_size, r[1])
                                    for r in rows])
        table.add_column("l_expectation", [angular_expectation(r[0], r[1])
                                           for r in rows])
        pair = square_mode(cfg.cross_size, cfg.n1, cfg.n2)
        head = (f"modes: square pair ({cfg.n1},{cfg.n2}) energy={pair.energy:.6g} "
                f"<L>={pair.l_exp:.6g}")
    else:
        rows = [(n, l) for n in range(1, 4) for l in range(0, 4)]
        modes = [circular_mode(cfg.cross_size, n, l) for n, l in rows]
        table.add_column("n", [r[0] for r in rows])
        table.add_column("l", [r[1] for r in rows])
        table.add_column("energy", [m.energy for m in modes])
        table.add_column("l_expectation", [m.l_exp for m in modes])
        m0 = circular_mode(cfg.cross_size, cfg.circ_n, cfg.circ_l)
        head = (f"modes: circular (n={cfg.circ_n}, l={cfg.circ_l}) "
                f"energy={m0.energy:.6g}")
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    print(f"{head} -> {path}")


def cmd_geometry_check(cfg: RunConfig):
    curve = cfg.build_curve()
    profile = cfg.build_profile()
    q_max = 0.45 * cfg.cross_size
    s_samples = np.linspace(0.0, cfg.length, 9)
    q_samples = [(-q_max, 0.3 * q_max), (0.2 * q_max, -q_max),
                 (0.5 * q_max, 0.5 * q_max), (q_max, q_max)]
    table = report.ResultTable("geometry_check")
    cols = {k: [] for k in ("s", "q1", "q2", "det_closed", "det_direct",
                            "metric_err", "inverse_err", "gauge_div")}
    worst = 0.0
    for s in s_samples:
        for q in q_samples:
            ev = metric_tensor(curve, profile, s, q)
            g_fd = metric_tensor_fd(curve, profile, s, q)
            err = float(np.max(np.abs(ev.G - g_fd)))
            inv_err = float(np.max(np.abs(ev.G @ ev.Ginv - np.eye(3))))
            worst = max(worst, err, inv_err)
            cols["s"].append(float(s))
            cols["q1"].append(q[0])
            cols["q2"].append(q[1])
            cols["det_closed"].append(ev.det_closed)
            cols["det_direct"].append(float(np.linalg.det(ev.G)))
            cols["metric_err"].append(err)
            cols["inverse_err"].append(inv_err)
            cols["gauge_div"].append(
                float(np.linalg.norm(ev.gauge)) if ev.gauge is not None else 0.0)
    for k, v in cols.items():
        table.add_column(k, v)
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    print(f"geometry-check: {len(cols['s'])} points, worst deviation "
          f"{worst:.3e} -> {path}")


def cmd_effective(cfg: RunConfig):
    ham = build_hamiltonian(cfg)
    s = np.linspace(0.0, cfg.length, 101)
    table = report.ResultTable("effective")
    table.add_column("s", s)
    table.add_column("alpha", [ham.alpha(x) for x in s])
    table.add_column("v_geometric", [ham.vg(x) for x in s])
    if ham.dim == 2:
        table.add_column("v_diag", [ham.vmat_at(x)[0, 0] for x in s])
        table.add_column("v_offdiag", [ham.vmat_at(x)[0, 1] for x in s])
    else:
        table.add_column("v_diag", [ham.vmat_at(x)[0, 0] for x in s])
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    a_max = max(abs(v) for v in table.columns["alpha"])
    print(f"effective: case={ham.meta['case']} max|alpha|={a_max:.6g} -> {path}")


def cmd_spectrum(cfg: RunConfig, k: int = 16, near: float | None = None):
    ham = build_hamiltonian(cfg)
    grid = Grid1D(cfg.length, cfg.points, cfg.bc)
    if near is None:
        matrix = discretize(ham, grid)
        energies, _ = eigensolve(matrix, k)
    else:
        matrix = discretize(ham, grid, sparse=True)
        energies, _ = eigensolve_near(matrix, near, k)
    table = report.ResultTable("spectrum")
    table.add_column("index", np.arange(len(energies)))
    table.add_column("energy", energies)
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    figs = []
    if cfg.figures:
        figs.append(report.render_spectrum(energies, cfg.out_dir))
    report.emit_summary({"command": "spectrum", "k": len(energies),
                         "lowest": float(energies[0]),
                         "highest": float(energies[-1]),
                         "grid_points": cfg.points, "boundary": cfg.bc},
                        cfg.out_dir)
    print(f"spectrum: {len(energies)} levels in "
          f"[{energies[0]:.6g}, {energies[-1]:.6g}] -> {path}")


def cmd_propagate(cfg: RunConfig):
    ham = build_hamiltonian(cfg)
    energy = resolve_energy(cfg, ham)
    sample = wkb_spinors(0.0, +1, ham, energy)
    phi0 = sample.amplitude * sample.u
    dphi0 = 1j * sample.p * phi0
    field = propagate(ham, energy, phi0, dphi0, (0.0, cfg.length),
                      n_samples=501)
    flux = flux_invariant(field, ham)
    table = report.ResultTable("propagate")
    table.add_column("s", field.s)
    for i in range(field.values.shape[1]):
        table.add_column(f"re_phi{i + 1}", field.values[:, i].real)
        table.add_column(f"im_phi{i + 1}", field.values[:, i].imag)
    table.add_column("flux", flux)
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    drift = float(np.max(np.abs(flux - flux[0])) / max(abs(flux[0]), 1e-30))
    print(f"propagate: E={energy:.6g} flux drift {drift:.3e} -> {path}")


def cmd_wkb(cfg: RunConfig):
    ham = build_hamiltonian(cfg)
    energy = resolve_energy(cfg, ham)
    s = np.linspace(0.0, cfg.length, 201)
    table = report.ResultTable("wkb")
    table.add_column("s", s)
    p_plus, p_minus = [], []
    for x in s:
        fde = float(np.real(ham.vmat_at(x)[0, 1])) / 2.0 if ham.dim == 2 else 0.0
        pp, pm = wkb_momenta(energy, ham.alpha(x), fde, warn=False)
        pp, pm = float(np.real(pp)), float(np.real(pm))
        p_plus.append(pp)
        p_minus.append(pm)
    table.add_column("p_plus", p_plus)
    table.add_column("p_minus", p_minus)
    if ham.dim == 2:
        for branch, namebr in ((+1, "upper"), (-1, "lower")):
            amps, u0r, u1r = [], [], []
            for x in s:
                smp = wkb_spinors(x, branch, ham, energy)
                amps.append(smp.amplitude)
                u0r.append(abs(smp.u[0]))
                u1r.append(abs(smp.u[1]))
            table.add_column(f"amp_{namebr}", amps)
            table.add_column(f"abs_u1_{namebr}", u0r)
            table.add_column(f"abs_u2_{namebr}", u1r)
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    print(f"wkb: E={energy:.6g} p in [{min(p_minus):.6g}, {max(p_plus):.6g}] "
          f"-> {path}")


def cmd_field_scan(cfg: RunConfig, n_samples: int = 4):
    ham = build_hamiltonian(cfg)
    if ham.dim != 2:
        raise DynamicsError("field-scan needs a two-level (square-pair) model")
    energy = resolve_energy(cfg, ham)
    # cell midpoints: keeps samples away from zeros of a sinusoidal drive,
    # where the branch spinor is undefined
    s_samples = (np.arange(n_samples) + 0.5) * cfg.length / n_samples
    scan = phase_evolution_scan(ham, energy, +1, s_samples,
                                grid2d=cfg.field_resolution)
    paths = []
    for k, fld in enumerate(scan.fields):
        t = report.ResultTable(f"field_s{k}")
        q1g, q2g = np.meshgrid(fld.q1, fld.q2, indexing="ij")
        t.add_column("q1", q1g.ravel())
        t.add_column("q2", q2g.ravel())
        t.add_column("amplitude", fld.amplitude.ravel())
        t.add_column("phase", fld.phase.ravel())
        paths.append(report.emit_table(t, cfg.out_dir, cfg.out_format))
        if cfg.figures:
            report.render_field(fld, cfg.out_dir, f"s{k}")
    report.emit_summary(
        {"command": "field-scan", "energy": energy,
         "s_samples": list(scan.s_samples),
         "phase_jumps": list(scan.phase_jumps)},
        cfg.out_dir)
    jump = float(np.max(scan.phase_jumps)) if len(scan.phase_jumps) else 0.0
    print(f"field-scan: {len(scan.fields)} snapshots, largest inter-snapshot "
          f"phase step {jump:.4g} rad -> {paths[0].parent}")


def _qgt_setup(cfg: RunConfig):
    if cfg.cross_kind != "square":
        raise QGTError("quantum-geometry commands require the square pair")
    curve = cfg.build_curve()
    tau = float(curve.tau(0.0))
    ham = build_hamiltonian(cfg)
    energy = resolve_energy(cfg, ham)
    # reference momentum of the fast mover at the configured energy
    p = float(np.sqrt(2.0 * energy))
    return tau, p


def cmd_qgt(cfg: RunConfig, n_grid: int = 25):
    tau, p = _qgt_setup(cfg)
    om0 = cfg.profile.omega
    f0 = cfg.profile.f_value if cfg.profile.f_value else 1.0
    omegas = np.linspace(0.5 * om0 if om0 else 0.01, 1.5 * om0 if om0 else 0.05,
                         n_grid)
    fs = np.linspace(0.1 * f0, f0, n_grid)
    phi_dot = 0.05 * 2.0 * np.pi / cfg.length
    table = report.ResultTable("qgt_grid")
    cols = {k: [] for k in ("omega", "f", "phi", "lambda", "g_ww", "g_wf",
                            "g_ff", "berry_f12")}
    curv = np.empty((n_grid, n_grid))
    for i, om in enumerate(omegas):
        for j, ff in enumerate(fs):
            pt = qgt_analytic(om, ff, p, phi_dot, cfg.n1, cfg.n2,
                              cfg.cross_size, tau=tau)
            cols["omega"].append(om)
            cols["f"].append(ff)
            cols["phi"].append(pt.phi)
            cols["lambda"].append(pt.lam)
            cols["g_ww"].append(pt.g[0, 0])
            cols["g_wf"].append(pt.g[0, 1])
            cols["g_ff"].append(pt.g[1, 1])
            cols["berry_f12"].append(pt.F[0, 1])
            curv[i, j] = pt.F[0, 1]
    for k, v in cols.items():
        table.add_column(k, v)
    path = report.emit_table(table, cfg.out_dir, cfg.out_format)
    if cfg.figures:
        report.render_qgt_grid(omegas, fs, curv, cfg.out_dir)
    print(f"qgt: {n_grid}x{n_grid} grid at p={p:.6g}, max|F12|="
          f"{np.max(np.abs(curv)):.3e} -> {path}")


def cmd_berry_loop(cfg: RunConfig):
    tau, p = _qgt_setup(cfg)
    om0 = cfg.profile.omega or 0.02
    f0 = cfg.profile.f_value or 1.0
    loop = [(0.5 * om0, 0.2 * f0), (1.5 * om0, 0.2 * f0),
            (1.5 * om0, f0), (0.5 * om0, f0)]
    # a smooth nonzero drive makes the curvature nontrivial
    k = 2.0 * np.pi / cfg.length
    phi_dot = 0.05 * k

    def phi_dot_field(om, ff):
        return phi_dot

    area, line = berry_loop(loop, p, phi_dot_field, cfg.n1, cfg.n2,
                            cfg.cross_size, tau=tau)
    rel = abs(area - line) / max(abs(area), 1e-30)
    report.emit_summary(
        {"command": "berry-loop", "loop": [list(v) for v in loop],
         "p": p, "phi_dot": phi_dot, "flux_area": area, "flux_line": line,
         "relative_mismatch": rel},
        cfg.out_dir)
    print(f"berry-loop: flux area={area:.10g} line={line:.10g} "
          f"mismatch {rel:.3e} -> {cfg.out_dir}/summary.json")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twistube",
        description="Effective quantum dynamics in twisted tubes with "
                    "slowly deformed cross sections.")
    parser.add_argument("command", choices=[
        "modes", "geometry-check", "effective", "spectrum", "propagate",
        "wkb", "field-scan", "qgt", "berry-loop"])
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--format", choices=["csv", "json"],
                        help="table format (overrides config)")
    parser.add_argument("--grid", type=int, help="longitudinal grid points")
    parser.add_argument("--energy", help="longitudinal energy or 'auto'")
    parser.add_argument("--near", type=float,
                        help="(spectrum) target energy for interior eigenvalues")
    parser.add_argument("--levels", type=int, default=16,
                        help="(spectrum) number of levels")
    args = parser.parse_args(argv)

    try:
        cfg = _load(args)
        if args.command == "modes":
            cmd_modes(cfg)
        elif args.command == "geometry-check":
            cmd_geometry_check(cfg)
        elif args.command == "effective":
            cmd_effective(cfg)
        elif args.command == "spectrum":
            cmd_spectrum(cfg, k=args.levels, near=args.near)
        elif args.command == "propagate":
            cmd_propagate(cfg)
        elif args.command == "wkb":
            cmd_wkb(cfg)
        elif args.command == "field-scan":
            cmd_field_scan(cfg)
        elif args.command == "qgt":
            cmd_qgt(cfg)
        elif args.command == "berry-loop":
            cmd_berry_loop(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (DynamicsError, TurningPointError) as exc:
        print(f"dynamics error: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS
    except QGTError as exc:
        print(f"quantum-geometry error: {exc}", file=sys.stderr)
        return EXIT_QGT
    except ValueError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_EFFECTIVE
    return 0


if __name__ == "__main__":
    sys.exit(main())
