"""Uniaxially loaded gel bar: transverse contraction and axial stress.

A swollen bar is stretched along its axis while it stays in contact with
the solvent. Pulling the network apart axially changes how much solvent
the gel wants to hold, so the transverse stretch is not a Poisson-ratio
effect but a full swelling equilibrium of its own. The closed form is a
scalar root for the transverse stretch at each imposed axial stretch;
the finite element bar must land on the same state whether the face is
driven by displacement or by a consistently lumped axial force.

Run:  python3 demos/uniaxial_bar.py
"""

import numpy as np

from gelfem import (element_average_nominal_stress, face_stretch,
                    run_continuation, solve_free_swelling_stretch,
                    uniaxial_axial_stress, uniaxial_bar_model,
                    uniaxial_curve, uniaxial_transverse_stretch,
                    write_uniaxial_csv)

Nv = 1e-3
chi = 0.1
mu_bar = 0.0    # bar stays in contact with saturated solvent


def run_mode(mode, targets, lam0):
    print(f"drive mode: {mode}")
    print(f"{'lambda1':>10} {'lambda2 (FE)':>16} {'lambda2 (exact)':>16} "
          f"{'rel error':>11} {'axial stress':>13} {'|P22|':>10}")
    for lam1 in targets:
        model = uniaxial_bar_model(Nv, chi, mu_bar, lam1, n_steps=5, mode=mode)
        st = run_continuation(model)[-1]
        lam1_fe = face_stretch(model, st, 0, 1.0)
        lam2_fe = face_stretch(model, st, 1, 1.0)
        lam2_ref = uniaxial_transverse_stretch(Nv, chi, mu_bar, lam1_fe)
        P = element_average_nominal_stress(model, st)[0]
        s_axial = uniaxial_axial_stress(Nv, chi, mu_bar, lam1_fe, lam2_fe)
        err = abs(lam2_fe - lam2_ref) / lam2_ref
        print(f"{lam1_fe:>10.5f} {lam2_fe:>16.10f} {lam2_ref:>16.10f} "
              f"{err:>11.2e} {s_axial:>13.4e} {abs(P[1, 1]):>10.2e}")
    print()


def main():
    lam0 = solve_free_swelling_stretch(Nv, chi, mu_bar)
    print(f"free-swelling stretch at mu/kT = {mu_bar}: {lam0:.6f}")
    print("at lambda1 = lambda0 the bar is stress free and "
          "lambda2 = lambda0\n")

    targets = np.linspace(0.92 * lam0, 1.25 * lam0, 6)
    run_mode("displacement", targets, lam0)
    run_mode("force", targets[2::2], lam0)

    curve = uniaxial_curve(Nv, chi, mu_bar)
    write_uniaxial_csv("uniaxial_curve.csv", curve)
    print(f"wrote uniaxial_curve.csv ({len(curve.lambda1)} closed-form points)")


if __name__ == "__main__":
    main()
