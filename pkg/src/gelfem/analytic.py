"""Closed-form swelling benchmarks used to validate the finite elements.

Both benchmarks reduce to scalar root finding. A free-swelling gel in a
bath of chemical potential mu_bar takes an isotropic stretch relative to
the dry network, found from the swelling equilibrium condition. A uniaxial
bar held at axial stretch lambda1 picks its transverse stretch lambda2 so
that the transverse nominal stress vanishes. Stretches are total (dry
frame); divide by the reference stretch to compare with the displacement
field of the solver, which works relative to the free-swelling state.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterDomainError
from .material import solve_free_swelling_stretch

__all__ = [
    "FreeSwellingCurve",
    "UniaxialCurve",
    "free_swelling_curve",
    "uniaxial_transverse_residual",
    "uniaxial_transverse_stretch",
    "uniaxial_axial_stress",
    "uniaxial_curve",
    "stretch_from_displacement",
]

DEFAULT_GRID_POINTS = 50


@dataclass(frozen=True)
class FreeSwellingCurve:
    """Isotropic swelling stretch against bath chemical potential."""

    Nv: float
    chi: float
    mu_grid: np.ndarray
    stretch: np.ndarray


@dataclass(frozen=True)
class UniaxialCurve:
    """Transverse stretch and axial nominal stress of a swollen bar.

    ``stress`` is the axial nominal stress in kT/v, per unit dry-frame
    reference area.
    """

    Nv: float
    chi: float
    mu_bar: float
    lambda1: np.ndarray
    lambda2: np.ndarray
    stress: np.ndarray


def free_swelling_curve(Nv, chi, mu_grid=None):
    """Swelling stretch over a grid of bath chemical potentials.

    Parameters
    ----------
    Nv : float
        Crosslink density measure, dimensionless (chains per volume times
        monomer volume). Must be positive.
    chi : float
        Polymer-solvent interaction parameter.
    mu_grid : array_like, optional
        Chemical potentials in kT, each <= 0. Defaults to 50 points on
        [-0.05, 0].

    Returns
    -------
    FreeSwellingCurve
    """
    if mu_grid is None:
        mu_grid = np.linspace(-0.05, 0.0, DEFAULT_GRID_POINTS)
    mu_grid = np.asarray(mu_grid, dtype=float)
    stretch = np.array([solve_free_swelling_stretch(Nv, chi, m) for m in mu_grid])
    return FreeSwellingCurve(Nv=float(Nv), chi=float(chi),
                             mu_grid=mu_grid, stretch=stretch)


def _mixing_bracket(J, chi, mu_bar):
    # J*log(1 - 1/J) + 1 + chi/J - mu_bar*J, the solvent contribution to
    # the nominal stress over 1/stretch
    return J * np.log1p(-1.0 / J) + 1.0 + chi / J - mu_bar * J


def uniaxial_transverse_residual(lambda2, Nv, chi, mu_bar, lambda1):
    """Transverse nominal stress of a bar at stretches (lambda1, lambda2).

    Vanishes at the traction-free transverse equilibrium. Stretches are
    measured from the dry network; the swollen volume is J = lambda1 *
    lambda2**2 and must exceed 1.
    """
    J = lambda1 * lambda2 ** 2
    if J <= 1.0:
        raise ParameterDomainError(
            f"swollen volume J = {J} must exceed 1 (all solvent expelled)")
    return Nv * (lambda2 - 1.0 / lambda2) + _mixing_bracket(J, chi, mu_bar) / lambda2


def uniaxial_transverse_stretch(Nv, chi, mu_bar, lambda1):
    """Transverse stretch of a traction-free bar at axial stretch lambda1.

    Solves the scalar transverse equilibrium by bracketed root finding.
    The residual at the returned root is below 1e-12 in kT/v units.
    """
    if Nv <= 0.0:
        raise ParameterDomainError(f"Nv must be positive, got {Nv}")
    if mu_bar > 0.0:
        raise ParameterDomainError(f"mu_bar must be <= 0, got {mu_bar}")
    if lambda1 <= 0.0:
        raise ParameterDomainError(f"lambda1 must be positive, got {lambda1}")

    def f(lam2):
        return uniaxial_transverse_residual(lam2, Nv, chi, mu_bar, lambda1)

    # J > 1 needs lambda2 > lambda1**-0.5; walk in from that edge until
    # the residual is negative, then expand outward until it is positive
    lo = (1.0 + 1e-9) / np.sqrt(lambda1)
    for _ in range(60):
        if f(lo) < 0.0:
            break
        lo = (lo - 1.0 / np.sqrt(lambda1)) * 0.5 + 1.0 / np.sqrt(lambda1)
    else:
        raise ParameterDomainError(
            f"no sign change near J = 1 for lambda1 = {lambda1}; "
            "transverse equilibrium has no swollen root")
    hi = max(2.0 * lo, 2.0)
    for _ in range(200):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise ParameterDomainError(
            f"transverse residual stays negative up to lambda2 = {hi}; "
            "no equilibrium root")
    lam2 = brentq(f, lo, hi, xtol=1e-15, rtol=8.882e-16, maxiter=200)
    if abs(f(lam2)) > 1e-12:
        raise ParameterDomainError(
            f"transverse equilibrium root residual {f(lam2):.3e} exceeds 1e-12")
    return lam2


def uniaxial_axial_stress(Nv, chi, mu_bar, lambda1, lambda2):
    """Axial nominal stress of the bar, kT/v per unit dry reference area."""
    J = lambda1 * lambda2 ** 2
    return Nv * (lambda1 - 1.0 / lambda1) + _mixing_bracket(J, chi, mu_bar) / lambda1


def uniaxial_curve(Nv, chi, mu_bar, lambda1_grid=None):
    """Uniaxial response over a grid of axial stretches.

    ``lambda1_grid`` defaults to 50 points spanning 0.9 to 1.5 times the
    free-swelling stretch at (Nv, chi, mu_bar).
    """
    if lambda1_grid is None:
        lam0 = solve_free_swelling_stretch(Nv, chi, mu_bar)
        lambda1_grid = np.linspace(0.9 * lam0, 1.5 * lam0, DEFAULT_GRID_POINTS)
    lambda1_grid = np.asarray(lambda1_grid, dtype=float)
    lambda2 = np.array([uniaxial_transverse_stretch(Nv, chi, mu_bar, l1)
                        for l1 in lambda1_grid])
    stress = uniaxial_axial_stress(Nv, chi, mu_bar, lambda1_grid, lambda2)
    return UniaxialCurve(Nv=float(Nv), chi=float(chi), mu_bar=float(mu_bar),
                         lambda1=lambda1_grid, lambda2=lambda2, stress=stress)


def stretch_from_displacement(delta, L, lambda0):
    """Total axial stretch of a bar of swollen length L displaced by delta.

    The solver reports displacements in the free-swelling frame, so the
    total (dry frame) stretch is (1 + delta / L) * lambda0.
    """
    if L <= 0.0:
        raise ParameterDomainError(f"bar length must be positive, got {L}")
    return (1.0 + delta / L) * lambda0
