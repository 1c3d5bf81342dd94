"""Flory-Rehner constitutive kernel in the free-swelling reference frame.

The gel free energy combines network stretching and polymer-solvent mixing,
with the solvent content eliminated through the chemical potential of the
surrounding bath. Everything here is dimensionless: energies and stresses
are measured in kT/v (thermal energy per solvent-molecule volume), and the
material is characterized by the groups

    Nv      -- crosslink density times solvent volume,
    chi     -- mixing enthalpy parameter,
    mu_bar  -- bath chemical potential over kT (<= 0 below saturation).

The mixing term is singular in the dry network (total swelling ratio -> 1),
so the computational reference configuration is the stress-free isotropically
swollen state with stretch ``lambda0`` from the dry network. All kinematic
quantities passed in (``Fp``, ``Cp``, ...) are measured from that state; the
energy is evaluated by composing back to the dry frame,

    W'(F') = lambda0**-3 * W(lambda0 * F'),

which keeps a single authoritative expression for the energy. Stress is the
second Piola-Kirchhoff tensor conjugate to the primed Green strain,
S = 2 dW'/dC', and the consistent tangent D = 2 dS/dC' comes out in the
two-term inverse-metric form

    D = delta1 * Cinv (x) Cinv + delta2 * Cinv (.) Cinv

because the energy is linear in the first invariant. Voigt order is
(11, 22, 33, 23, 13, 12) with engineering shear strains.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import AdmissibilityError, ParameterDomainError

__all__ = [
    "MaterialParams",
    "DeformationState",
    "StressTangent",
    "solve_free_swelling_stretch",
    "free_swelling_residual",
    "energy",
    "stress_and_tangent",
    "nominal_stress",
    "VOIGT_PAIRS",
    "sym_to_voigt",
    "voigt_to_sym",
]

# Voigt pair ordering (11, 22, 33, 23, 13, 12)
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))

# total swelling ratio must exceed the dry volume by this margin
ADMISSIBILITY_GUARD = 1e-9

# free-swelling root search bracket and convergence width
_LAMBDA_LO = 1.0 + 1e-4
_LAMBDA_HI = 100.0
_ROOT_WIDTH = 1e-13


def sym_to_voigt(A):
    """Pack a symmetric 3x3 tensor into a 6-vector, order (11,22,33,23,13,12)."""
    return np.array([A[0, 0], A[1, 1], A[2, 2], A[1, 2], A[0, 2], A[0, 1]])


def voigt_to_sym(v):
    """Unpack a 6-vector (11,22,33,23,13,12) into a symmetric 3x3 tensor."""
    return np.array([[v[0], v[5], v[4]],
                     [v[5], v[1], v[3]],
                     [v[4], v[3], v[2]]])


def free_swelling_residual(lam, Nv, chi, mu_bar):
    """Residual of the isotropic stress-free swelling condition.

    Zero transverse nominal stress in an isotropically swollen, unloaded gel
    reduces to a single scalar equation in the stretch ``lam`` from the dry
    network:

        Nv*(1/lam - 1/lam**3) + log(1 - 1/lam**3) + 1/lam**3
            + chi/lam**6 - mu_bar = 0
    """
    l3 = lam**3
    return Nv * (1.0 / lam - 1.0 / l3) + np.log1p(-1.0 / l3) + 1.0 / l3 \
        + chi / l3**2 - mu_bar


def _free_swelling_residual_prime(lam, Nv, chi):
    l3 = lam**3
    l4 = lam**4
    return (Nv * (-1.0 / lam**2 + 3.0 / l4)
            + (3.0 / l4) / (1.0 - 1.0 / l3)
            - 3.0 / l4
            - 6.0 * chi / lam**7)


def solve_free_swelling_stretch(Nv, chi, mu0_bar):
    """Stretch of the stress-free swollen state relative to the dry network.

    Solves the scalar swelling equilibrium equation for the isotropic
    stretch, bracketed on (1, 100]: bisection narrows the bracket, a
    safeguarded Newton iteration polishes the root to |dlam| < 1e-13.

    Parameters
    ----------
    Nv : float
        Dimensionless crosslink density, > 0.
    chi : float
        Mixing enthalpy parameter.
    mu0_bar : float
        Bath chemical potential over kT, <= 0.

    Returns
    -------
    float
        Free-swelling stretch lambda0 > 1.

    Raises
    ------
    ParameterDomainError
        If the parameters are out of range or no root lies in the bracket.
    """
    if Nv <= 0.0:
        raise ParameterDomainError(f"Nv must be positive, got {Nv}")
    if mu0_bar > 0.0:
        raise ParameterDomainError(
            f"mu0_bar must be <= 0 (solvent at or below saturation), got {mu0_bar}")

    def f(lam):
        return free_swelling_residual(lam, Nv, chi, mu0_bar)

    lo, hi = _LAMBDA_LO, _LAMBDA_HI
    flo, fhi = f(lo), f(hi)
    if flo > 0.0:
        raise ParameterDomainError(
            f"no swelling root: residual at lambda={lo} is {flo:.3e} > 0 "
            "(expected negative near the dry state)")
    if fhi < 0.0:
        raise ParameterDomainError(
            f"no swelling root: residual at lambda={hi} is {fhi:.3e} < 0 "
            "(expected positive for a swollen gel)")

    # bisection until the bracket is narrow enough for Newton to be safe
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm

    lam = 0.5 * (lo + hi)
    for _ in range(60):
        step = f(lam) / _free_swelling_residual_prime(lam, Nv, chi)
        lam_next = lam - step
        if not (lo <= lam_next <= hi):
            lam_next = 0.5 * (lo + hi)  # Newton left the bracket; fall back
        if f(lam_next) * flo <= 0.0:
            hi = lam_next
        else:
            lo = lam_next
        done = abs(lam_next - lam) < _ROOT_WIDTH
        lam = lam_next
        if done:
            break

    return lam


@dataclass(frozen=True)
class MaterialParams:
    """Dimensionless gel constants plus the derived free-swelling stretch.

    ``mu_bar`` is the chemical potential the stress is currently evaluated
    at; ``mu0_bar`` is the one ``lambda0`` was computed for (the reference
    state is stress-free only when the two agree).
    """

    Nv: float
    chi: float
    mu_bar: float
    mu0_bar: float
    lambda0: float

    def __post_init__(self):
        if self.Nv <= 0.0:
            raise ParameterDomainError(f"Nv must be positive, got {self.Nv}")
        if self.lambda0 <= 1.0:
            raise ParameterDomainError(
                f"lambda0 must exceed 1 (compressible gel), got {self.lambda0}")
        res = free_swelling_residual(self.lambda0, self.Nv, self.chi, self.mu0_bar)
        if abs(res) >= 1e-12:
            raise ParameterDomainError(
                f"lambda0={self.lambda0} does not satisfy the swelling "
                f"equilibrium at mu0_bar={self.mu0_bar}: residual {res:.3e}")

    @classmethod
    def equilibrated(cls, Nv, chi, mu0_bar):
        """Construct parameters with lambda0 solved at ``mu0_bar``."""
        lam0 = solve_free_swelling_stretch(Nv, chi, mu0_bar)
        return cls(Nv=Nv, chi=chi, mu_bar=mu0_bar, mu0_bar=mu0_bar, lambda0=lam0)

    def with_mu(self, mu_bar):
        """Same gel, evaluated at a different bath chemical potential."""
        return replace(self, mu_bar=mu_bar)


@dataclass(frozen=True)
class DeformationState:
    """Per-point kinematics measured from the free-swelling state."""

    Fp: np.ndarray       # deformation gradient, 3x3
    Cp: np.ndarray       # right Cauchy-Green tensor Fp.T @ Fp
    Cp_inv: np.ndarray
    I1p: float           # tr(Cp)
    I3p: float           # det(Cp)
    Jp: float            # det(Fp) = sqrt(I3p)

    @classmethod
    def from_F(cls, Fp):
        """Build the state from a deformation gradient."""
        Fp = np.asarray(Fp, dtype=float)
        Jp = np.linalg.det(Fp)
        if Jp <= 0.0:
            raise AdmissibilityError(
                f"non-invertible motion: det F' = {Jp:.6e} <= 0")
        Cp = Fp.T @ Fp
        return cls(Fp=Fp, Cp=Cp, Cp_inv=np.linalg.inv(Cp),
                   I1p=np.trace(Cp), I3p=Jp * Jp, Jp=Jp)

    @classmethod
    def from_C(cls, Cp):
        """Build the state from a right Cauchy-Green tensor.

        The stored Fp is the Cholesky factor (upper), which reproduces Cp
        exactly; energy and stress depend on Fp only through Cp anyway.
        """
        Cp = np.asarray(Cp, dtype=float)
        Cp = 0.5 * (Cp + Cp.T)
        try:
            L = np.linalg.cholesky(Cp)
        except np.linalg.LinAlgError as exc:
            raise AdmissibilityError(
                "C' is not symmetric positive definite") from exc
        return cls.from_F(L.T)


@dataclass(frozen=True)
class StressTangent:
    """Second Piola-Kirchhoff stress, consistent tangent, and energy density.

    ``S`` is the 6-vector Voigt stress (kT/v), ``D`` the 6x6 tangent matrix
    against the engineering-shear Green strain vector (kT/v), ``W`` the free
    energy per unit free-swelling volume (kT/v).
    """

    S: np.ndarray
    D: np.ndarray
    W: float


def _require_admissible(params, state):
    J_total = params.lambda0**3 * state.Jp
    if J_total <= 1.0 + ADMISSIBILITY_GUARD:
        raise AdmissibilityError(
            f"total volume at/below dry network: lambda0^3 * J' = {J_total:.6e}")
    return J_total


def _dry_frame_energy(Nv, chi, mu_bar, I1, J):
    # energy per unit dry-network volume; (J-1)log(J/(J-1)) = -(J-1)log1p(-1/J)
    elastic = 0.5 * Nv * (I1 - 3.0 - 2.0 * np.log(J))
    mixing = -(J - 1.0) * np.log1p(-1.0 / J) + chi / J
    return elastic - mixing - mu_bar * (J - 1.0)


def energy(params, state):
    """Free energy density per unit free-swelling volume, in kT/v.

    Evaluated by composition: lift the primed deformation gradient back to
    the dry frame with the free-swelling stretch, evaluate the dry-frame
    energy there, and rescale the volume.
    """
    J_total = _require_admissible(params, state)
    lam0 = params.lambda0
    I1_total = lam0**2 * state.I1p
    W_dry = _dry_frame_energy(params.Nv, params.chi, params.mu_bar,
                              I1_total, J_total)
    return W_dry / lam0**3


def _energy_derivatives(params, state):
    """dW'/dI1', dW'/dJ', d2W'/dJ'2 of the composed energy (kT/v)."""
    lam0 = params.lambda0
    l3 = lam0**3
    Jp = state.Jp
    J = l3 * Jp

    dW_dI1p = 0.5 * params.Nv / lam0
    dW_dJp = (-params.Nv / (l3 * Jp)
              + np.log1p(-1.0 / J)
              + 1.0 / J
              + params.chi / J**2
              - params.mu_bar)
    d2W_dJp2 = (params.Nv / (l3 * Jp * Jp)
                + l3 * (1.0 / (J * (J - 1.0))
                        - 1.0 / J**2
                        - 2.0 * params.chi / J**3))
    return dW_dI1p, dW_dJp, d2W_dJp2


def stress_and_tangent(params, state):
    """Second Piola-Kirchhoff stress and consistent tangent moduli.

    Stress follows the invariant form S = 2*(dW/dI1) I + 2*I3*(dW/dI3) Cinv;
    the tangent is delta1 * Cinv (x) Cinv + delta2 * Cinv (.) Cinv with

        delta1 = 4*(I3*dW/dI3 + I3**2 * d2W/dI3**2),
        delta2 = -4*I3*dW/dI3,

    all derivatives taken with respect to the primed configuration through
    the chain rule J' = sqrt(I3'). Both are returned in Voigt form, order
    (11,22,33,23,13,12), tangent against engineering shear strains.

    Returns
    -------
    StressTangent
    """
    _require_admissible(params, state)
    dW_dI1p, dW_dJp, d2W_dJp2 = _energy_derivatives(params, state)

    Jp, I3p = state.Jp, state.I3p
    # chain rule through J' = I3'**0.5
    dW_dI3p = dW_dJp / (2.0 * Jp)
    d2W_dI3p2 = d2W_dJp2 / (4.0 * I3p) - dW_dJp / (4.0 * I3p * Jp)

    Cinv = state.Cp_inv
    S_mat = 2.0 * dW_dI1p * np.eye(3) + 2.0 * I3p * dW_dI3p * Cinv
    S = sym_to_voigt(S_mat)

    delta1 = 4.0 * (I3p * dW_dI3p + I3p * I3p * d2W_dI3p2)
    delta2 = -4.0 * I3p * dW_dI3p

    civ = sym_to_voigt(Cinv)
    D = delta1 * np.outer(civ, civ)
    for a, (i, j) in enumerate(VOIGT_PAIRS):
        for b, (k, l) in enumerate(VOIGT_PAIRS):
            D[a, b] += delta2 * 0.5 * (Cinv[i, k] * Cinv[j, l]
                                       + Cinv[i, l] * Cinv[j, k])

    return StressTangent(S=S, D=D, W=energy(params, state))


def nominal_stress(params, state):
    """First Piola-Kirchhoff stress in the primed frame, in kT/v.

    Computed directly from the dry-frame nominal stress

        P(F) = Nv*(F - F^-T) - [J*log(J/(J-1)) - 1 - chi/J] F^-T
               - mu_bar * J * F^-T

    lifted with F = lambda0*F' and rescaled, P' = lambda0**-2 * P. This is a
    deliberately separate derivative route from ``stress_and_tangent``; the
    two are tied together by the identity P' = F' S'.
    """
    _require_admissible(params, state)
    lam0 = params.lambda0
    F = lam0 * state.Fp
    J = lam0**3 * state.Jp
    FinvT = np.linalg.inv(F).T
    # J*log(J/(J-1)) - 1 - chi/J
    bracket = -J * np.log1p(-1.0 / J) - 1.0 - params.chi / J
    P_dry = (params.Nv * (F - FinvT)
             - bracket * FinvT
             - params.mu_bar * J * FinvT)
    return P_dry / lam0**2
