"""Runtime self-checks: residuals of the scalar equilibria and finite
difference probes of the stress, tangent and element stiffness.

Everything here re-derives the quantity under test by a second route
(central differences, or direct residual evaluation), so a passing run
certifies the analytic derivatives without trusting them. The random
states are drawn from a seedable generator; set the GELFEM_SEED
environment variable to change the default seed.
"""

import os
from dataclasses import dataclass

import numpy as np

from .element import (HEX8_CORNERS, element_gauss_data, internal_force,
                      stiffness)
from .errors import AdmissibilityError, InvertedElementError
from .material import (DeformationState, MaterialParams, energy,
                       nominal_stress, solve_free_swelling_stretch,
                       free_swelling_residual, stress_and_tangent,
                       voigt_to_sym)
from .analytic import (uniaxial_transverse_residual,
                       uniaxial_transverse_stretch)

__all__ = [
    "CheckResult",
    "random_rotation",
    "random_admissible_state",
    "fd_stress",
    "fd_tangent",
    "fd_element_stiffness",
    "check_stress_gradient",
    "check_tangent",
    "check_element_stiffness",
    "check_stress_identity",
    "verify_all",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 12345

# central-difference step for probes in C and in nodal displacement;
# balances truncation against cancellation in the energy differences
_FD_STEP = 1e-5

_VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification check."""

    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self):
        return self.max_error <= self.tolerance

    def line(self):
        status = "pass" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: max error {self.max_error:.3e} "
                f"(tolerance {self.tolerance:.0e})")


def _seed_from_env(seed):
    if seed is not None:
        return int(seed)
    return int(os.environ.get("GELFEM_SEED", DEFAULT_SEED))


def random_rotation(rng):
    """Haar-ish random proper rotation from a QR factorization."""
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_admissible_state(rng, params, stretch_range=(0.75, 1.4)):
    """Random deformation with principal stretches in a safe swollen band."""
    for _ in range(100):
        s = rng.uniform(*stretch_range, size=3)
        F = random_rotation(rng) @ np.diag(s) @ random_rotation(rng)
        if params.lambda0 ** 3 * np.prod(s) > 1.0 + 1e-6:
            return DeformationState.from_F(F)
    raise RuntimeError("could not sample an admissible state")  # pragma: no cover


def _perturbed_state(C, pair, h):
    Cp = C.copy()
    i, j = pair
    Cp[i, j] += h
    if i != j:
        Cp[j, i] += h
    return DeformationState.from_C(Cp)


def fd_stress(params, state, h=_FD_STEP):
    """Second Piola-Kirchhoff stress by central differences of the energy."""
    S = np.zeros(6)
    for b, (i, j) in enumerate(_VOIGT_PAIRS):
        Wp = energy(params, _perturbed_state(state.Cp, (i, j), h))
        Wm = energy(params, _perturbed_state(state.Cp, (i, j), -h))
        # dW = (1/2) S : dC; the off-diagonal probe moves two entries of C
        S[b] = (Wp - Wm) / h if i == j else (Wp - Wm) / (2.0 * h)
    return S


def fd_tangent(params, state, h=_FD_STEP):
    """Voigt material tangent by central differences of the stress."""
    D = np.zeros((6, 6))
    for b, (i, j) in enumerate(_VOIGT_PAIRS):
        Sp = stress_and_tangent(params, _perturbed_state(state.Cp, (i, j), h)).S
        Sm = stress_and_tangent(params, _perturbed_state(state.Cp, (i, j), -h)).S
        # the +-h probe moves the Voigt normal strain by h in total and the
        # engineering shear strain by 2h (E = (C - I)/2, gamma = 2E_ij = C_ij)
        D[:, b] = (Sp - Sm) / h if i == j else (Sp - Sm) / (2.0 * h)
    return D


def fd_element_stiffness(element_nodes, nodal_u, params, h=_FD_STEP):
    """Element stiffness by central differences of the internal force."""
    gauss = element_gauss_data(element_nodes)
    K = np.zeros((24, 24))
    u = nodal_u.reshape(24).astype(float)
    for col in range(24):
        up = u.copy()
        up[col] += h
        um = u.copy()
        um[col] -= h
        fp = internal_force(element_nodes, up.reshape(8, 3), params, gauss)
        fm = internal_force(element_nodes, um.reshape(8, 3), params, gauss)
        K[:, col] = (fp - fm) / (2.0 * h)
    return K


def _rel_err(a, ref):
    return np.max(np.abs(a - ref)) / max(np.max(np.abs(ref)), 1e-12)


def check_stress_gradient(params, state, h=_FD_STEP):
    """Relative deviation of analytic S from the energy gradient."""
    return _rel_err(stress_and_tangent(params, state).S, fd_stress(params, state, h))


def check_tangent(params, state, h=_FD_STEP):
    """Relative deviation of analytic D from the stress Jacobian."""
    return _rel_err(stress_and_tangent(params, state).D, fd_tangent(params, state, h))


def check_stress_identity(params, state):
    """Relative deviation of the nominal stress from F S.

    The nominal stress is evaluated by an independent closed-form route,
    so agreement ties the two stress measures together.
    """
    S = voigt_to_sym(stress_and_tangent(params, state).S)
    P_from_S = state.Fp @ S
    P = nominal_stress(params, state)
    return _rel_err(P, P_from_S)


def check_element_stiffness(params, rng, h=_FD_STEP):
    """Relative deviation of one random element's K from FD of f_int."""
    # distorted unit hex, mildly perturbed so the geometry terms are live
    nodes = 0.5 * (np.array(HEX8_CORNERS, dtype=float) + 1.0)
    nodes += rng.uniform(-0.05, 0.05, size=(8, 3))
    for _ in range(100):
        u = rng.uniform(-0.1, 0.1, size=(8, 3))
        try:
            K = stiffness(nodes, u, params)
            break
        except (AdmissibilityError, InvertedElementError):
            continue
    else:  # pragma: no cover
        raise RuntimeError("could not sample an admissible element state")
    K_fd = fd_element_stiffness(nodes, u, params, h)
    return _rel_err(K, K_fd)


def _scalar_residual_checks(results):
    # free-swelling roots over a sweep of parameters
    worst = 0.0
    for Nv, chi in ((1e-3, 0.1), (1e-2, 0.2), (5e-4, 0.3)):
        for mu in np.linspace(-0.05, 0.0, 11):
            lam = solve_free_swelling_stretch(Nv, chi, mu)
            worst = max(worst, abs(free_swelling_residual(lam, Nv, chi, mu)))
    results.append(CheckResult("free-swelling residual at solved roots",
                               worst, 1e-12))

    worst = 0.0
    lam0 = solve_free_swelling_stretch(1e-3, 0.1, 0.0)
    for lam1 in np.linspace(0.85 * lam0, 1.3 * lam0, 9):
        lam2 = uniaxial_transverse_stretch(1e-3, 0.1, 0.0, lam1)
        worst = max(worst, abs(uniaxial_transverse_residual(
            lam2, 1e-3, 0.1, 0.0, lam1)))
    results.append(CheckResult("transverse equilibrium residual at solved roots",
                               worst, 1e-12))


def verify_all(n_states=100, seed=None):
    """Run the full self-check suite.

    Parameters
    ----------
    n_states : int
        Number of random states for each finite-difference family.
    seed : int, optional
        RNG seed; falls back to GELFEM_SEED, then a fixed default.

    Returns
    -------
    list of CheckResult
    """
    rng = np.random.default_rng(_seed_from_env(seed))
    results = []
    _scalar_residual_checks(results)

    param_sets = [MaterialParams.equilibrated(1e-3, 0.1, 0.0),
                  MaterialParams.equilibrated(1e-3, 0.1, -0.02),
                  MaterialParams.equilibrated(1e-2, 0.2, -0.01)]

    worst_S = worst_D = worst_P = 0.0
    for k in range(n_states):
        params = param_sets[k % len(param_sets)]
        state = random_admissible_state(rng, params)
        worst_S = max(worst_S, check_stress_gradient(params, state))
        worst_D = max(worst_D, check_tangent(params, state))
        worst_P = max(worst_P, check_stress_identity(params, state))
    results.append(CheckResult(
        f"stress vs energy gradient ({n_states} random states)", worst_S, 1e-6))
    results.append(CheckResult(
        f"tangent vs stress Jacobian ({n_states} random states)", worst_D, 1e-5))
    results.append(CheckResult(
        f"nominal stress vs F S identity ({n_states} random states)",
        worst_P, 1e-10))

    worst_K = 0.0
    n_k = max(10, n_states // 10)
    for k in range(n_k):
        params = param_sets[k % len(param_sets)]
        worst_K = max(worst_K, check_element_stiffness(params, rng))
    results.append(CheckResult(
        f"element stiffness vs force Jacobian ({n_k} random elements)",
        worst_K, 1e-5))
    return results
