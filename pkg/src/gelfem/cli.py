"""Command-line driver.

Subcommands
-----------
free-swell
    Sweep the bath chemical potential on a one-element cube and compare
    the finite-element stretch with the scalar equilibrium at every step.
uniaxial
    Drive a one-element bar to a set of axial stretches (by prescribed
    displacement or by face force) and compare the transverse stretch
    with the closed-form solution.
run
    Execute a model file: continuation, VTK/CSV emission, convergence log.
mesh
    Generate a cube model file that the run subcommand accepts unchanged.
verify
    Run the self-check suite (residuals plus finite-difference probes).

Exit codes: 0 success, 1 verification failure, 2 parse or argument error,
3 convergence failure, 4 inadmissible state.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .analytic import (free_swelling_curve, stretch_from_displacement,
                       uniaxial_curve, uniaxial_transverse_stretch)
from .benchmarks import (element_average_nominal_stress, face_stretch,
                         free_swelling_cube_model, uniaxial_bar_model)
from .errors import (AdmissibilityError, ConvergenceError,
                     InvertedElementError, ModelParseError,
                     ParameterDomainError, SingularSystemError)
from .material import solve_free_swelling_stretch
from .model_io import (format_float, parse_model_file, write_convergence_csv,
                       write_free_swelling_csv, write_model_file,
                       write_uniaxial_csv, write_vtk)
from .solver import run_continuation
from .verify import verify_all

__all__ = ["main", "build_parser"]


def _add_material_flags(p, mu_kind):
    p.add_argument("--Nv", type=float, default=1e-3,
                   help="crosslink density measure N*v (default 1e-3)")
    p.add_argument("--chi", type=float, default=0.1,
                   help="interaction parameter (default 0.1)")
    if mu_kind == "sweep":
        p.add_argument("--mu", type=float, nargs=2, default=(-0.05, 0.0),
                       metavar=("START", "END"),
                       help="chemical potential sweep bounds in kT "
                            "(default -0.05 0)")
    elif mu_kind == "single":
        p.add_argument("--mu", type=float, default=0.0,
                       help="bath chemical potential in kT (default 0)")


def _add_output_flags(p):
    p.add_argument("--out-dir", default=".",
                   help="directory for emitted files (default current)")
    p.add_argument("--format", choices=("vtk", "csv"), default="vtk",
                   help="field output format (default vtk)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gelfem",
        description="Finite-element equilibrium of swelling polymer gels.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("free-swell",
                       help="chemical-potential sweep on a one-element cube")
    _add_material_flags(p, "sweep")
    p.add_argument("--steps", type=int, default=10,
                   help="continuation points across the sweep (default 10)")
    p.add_argument("--cells", type=int, default=1,
                   help="cells per cube edge (default 1)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_free_swell)

    p = sub.add_parser("uniaxial",
                       help="axially driven one-element bar vs closed form")
    _add_material_flags(p, "single")
    p.add_argument("--lambda1", type=float, nargs="*", default=None,
                   help="axial stretch targets, dry frame (default: 8 values "
                        "spanning 0.9 to 1.3 times the free-swelling stretch)")
    p.add_argument("--steps", type=int, default=5,
                   help="continuation points per target (default 5)")
    p.add_argument("--mode", choices=("displacement", "force"),
                   default="displacement",
                   help="how the axial face is driven (default displacement)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_uniaxial)

    p = sub.add_parser("run", help="execute a model file")
    p.add_argument("model_file", help="path to a model file")
    _add_output_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mesh", help="emit a runnable cube model file")
    p.add_argument("--cube", type=float, nargs=4, default=(1, 1, 1, 1.0),
                   metavar=("NX", "NY", "NZ", "L"),
                   help="cells per edge and edge length (default 1 1 1 1.0)")
    _add_material_flags(p, "sweep")
    p.add_argument("--steps", type=int, default=10,
                   help="continuation points (default 10)")
    p.add_argument("--out-dir", default=".",
                   help="directory for the model file (default current)")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--states", type=int, default=100,
                   help="random states per finite-difference family "
                        "(default 100)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: GELFEM_SEED or a fixed value)")
    p.set_defaults(func=cmd_verify)
    return parser


def _ensure_out_dir(args):
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _write_displacement_csv(path, model, state):
    lines = ["node,x,y,z,ux,uy,uz"]
    u = state.u.reshape(-1, 3)
    for i, (xyz, d) in enumerate(zip(model.nodes, u)):
        vals = [format_float(v) for v in (*xyz, *d)]
        lines.append(",".join([str(i)] + vals))
    lines.append("")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))


def _emit_fields(args, prefix, model, state):
    out = _ensure_out_dir(args)
    if args.format == "vtk":
        path = os.path.join(out, f"{prefix}.vtk")
        write_vtk(path, model, state)
    else:
        path = os.path.join(out, f"{prefix}_displacements.csv")
        _write_displacement_csv(path, model, state)
    return path


def cmd_free_swell(args):
    mu_start, mu_end = args.mu
    if args.steps < 1:
        raise ParameterDomainError(f"--steps must be >= 1, got {args.steps}")
    model = free_swelling_cube_model(args.Nv, args.chi, mu_start, mu_end,
                                     args.steps, n_cells=args.cells)
    L = float(model.nodes[:, 0].max())
    states = run_continuation(model)

    print(f"free swelling sweep: Nv={args.Nv:g} chi={args.chi:g} "
          f"mu {mu_start:g} to {mu_end:g} in {args.steps} steps")
    print(f"{'mu_bar':>12} {'lambda_fe':>20} {'lambda_analytic':>20} "
          f"{'rel_error':>12}")
    worst = 0.0
    rows = []
    for st in states:
        lam_fe = face_stretch(model, st, 0, L)
        lam_ref = solve_free_swelling_stretch(args.Nv, args.chi, st.mu_bar)
        err = abs(lam_fe - lam_ref) / lam_ref
        worst = max(worst, err)
        rows.append((st.mu_bar, lam_ref))
        print(f"{st.mu_bar:>12.6g} {lam_fe:>20.12f} {lam_ref:>20.12f} "
              f"{err:>12.3e}")
    print(f"max relative error: {worst:.3e}")

    out = _ensure_out_dir(args)
    curve = free_swelling_curve(args.Nv, args.chi,
                                np.array([r[0] for r in rows]))
    write_free_swelling_csv(os.path.join(out, "free_swell_curve.csv"), curve)
    write_convergence_csv(os.path.join(out, "free_swell_convergence.csv"),
                          states)
    _emit_fields(args, "free_swell", model, states[-1])
    return 0


def cmd_uniaxial(args):
    if args.steps < 1:
        raise ParameterDomainError(f"--steps must be >= 1, got {args.steps}")
    lam0 = solve_free_swelling_stretch(args.Nv, args.chi, args.mu)
    targets = args.lambda1
    if not targets:
        targets = list(np.linspace(0.9 * lam0, 1.3 * lam0, 8))
    L = 1.0

    print(f"uniaxial bar: Nv={args.Nv:g} chi={args.chi:g} mu={args.mu:g} "
          f"mode={args.mode} (free-swelling stretch {lam0:.12f})")
    print(f"{'lambda1':>14} {'lambda2_fe':>18} {'lambda2_analytic':>18} "
          f"{'rel_error':>12} {'|P22_fe|':>12}")
    worst = 0.0
    lam1_all, lam2_all = [], []
    last_model, last_state, all_states = None, None, []
    for lam1 in targets:
        model = uniaxial_bar_model(args.Nv, args.chi, args.mu, lam1,
                                   args.steps, L=L, mode=args.mode)
        states = run_continuation(model)
        st = states[-1]
        lam1_fe = face_stretch(model, st, 0, L)
        lam2_fe = face_stretch(model, st, 1, L)
        lam2_ref = uniaxial_transverse_stretch(args.Nv, args.chi, args.mu,
                                               lam1_fe)
        err = abs(lam2_fe - lam2_ref) / lam2_ref
        worst = max(worst, err)
        P = element_average_nominal_stress(model, st)
        p22 = float(np.max(np.abs(P[:, 1, 1])))
        print(f"{lam1_fe:>14.8f} {lam2_fe:>18.12f} {lam2_ref:>18.12f} "
              f"{err:>12.3e} {p22:>12.3e}")
        lam1_all.append(lam1_fe)
        lam2_all.append(lam2_fe)
        last_model, last_state = model, st
        all_states.extend(states)
    print(f"max relative error: {worst:.3e}")

    out = _ensure_out_dir(args)
    curve = uniaxial_curve(args.Nv, args.chi, args.mu, np.array(lam1_all))
    write_uniaxial_csv(os.path.join(out, "uniaxial_curve.csv"), curve)
    write_convergence_csv(os.path.join(out, "uniaxial_convergence.csv"),
                          all_states)
    _emit_fields(args, "uniaxial", last_model, last_state)
    return 0


def cmd_run(args):
    model = parse_model_file(args.model_file)
    states = run_continuation(model)
    st = states[-1]
    out = _ensure_out_dir(args)
    write_convergence_csv(os.path.join(out, "convergence.csv"), states)
    field_path = _emit_fields(args, "result", model, st)
    n_iter = sum(len(s.residual_history) for s in states)
    print(f"converged {len(states)} continuation points "
          f"({n_iter} Newton iterations total)")
    print(f"final state: mu_bar={st.mu_bar:g} load_factor={st.load_factor:g} "
          f"max |u| = {np.max(np.abs(st.u)):.12g}")
    print(f"wrote {field_path}")
    return 0


def cmd_mesh(args):
    nx, ny, nz, L = args.cube
    mu_start, mu_end = args.mu
    out = _ensure_out_dir(args)
    path = os.path.join(out, "model.gel")
    bcs = [("X=0", "x", 0.0), ("Y=0", "y", 0.0), ("Z=0", "z", 0.0)]
    write_model_file(path, args.Nv, args.chi, mu_start, mu_end, args.steps,
                     cube=(int(nx), int(ny), int(nz), L), bcs=bcs)
    # prove the emitted file is runnable before reporting success
    parse_model_file(path)
    print(f"wrote {path}")
    return 0


def cmd_verify(args):
    results = verify_all(n_states=args.states, seed=args.seed)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelParseError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, SingularSystemError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (AdmissibilityError, InvertedElementError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
