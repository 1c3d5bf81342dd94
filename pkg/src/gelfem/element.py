"""Trilinear 8-node hexahedral element in the total-Lagrangian frame.

Shape functions live on the parent cube [-1,1]^3 with the VTK hexahedron
corner ordering (counter-clockwise bottom face, then top face). Reference
integrals are pulled back to the parent domain, so the reference Jacobian
only ever needs evaluating once per element. The Green-strain variation
matrix, the internal force vector and the material + geometric stiffness
follow the standard total-Lagrangian pattern; the stiffness is the exact
Jacobian of the internal force at the same quadrature rule, which is what
buys quadratic Newton convergence downstream.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, InvertedElementError
from .material import DeformationState, energy, stress_and_tangent, voigt_to_sym

__all__ = [
    "Hex8Element",
    "GaussPointData",
    "HEX8_CORNERS",
    "gauss_rule_1d",
    "shape_functions",
    "shape_gradients",
    "element_gauss_data",
    "deformation_gradient",
    "b_matrix",
    "internal_force",
    "stiffness",
    "force_and_stiffness",
    "strain_energy",
]

# parent coordinates, VTK hexahedron corner ordering
HEX8_CORNERS = np.array([
    [-1.0, -1.0, -1.0],
    [+1.0, -1.0, -1.0],
    [+1.0, +1.0, -1.0],
    [-1.0, +1.0, -1.0],
    [-1.0, -1.0, +1.0],
    [+1.0, -1.0, +1.0],
    [+1.0, +1.0, +1.0],
    [-1.0, +1.0, +1.0],
])


@dataclass(frozen=True)
class Hex8Element:
    """Connectivity of one hexahedral element.

    ``node_ids`` are global node indices in VTK corner order; ``gauss_rule``
    is the number of Gauss points per axis (2 is full integration for the
    trilinear element and the default everywhere).
    """

    node_ids: tuple
    gauss_rule: int = 2

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(int(i) for i in self.node_ids))
        if len(self.node_ids) != 8:
            raise ValueError(f"hex8 needs 8 node ids, got {len(self.node_ids)}")


@dataclass(frozen=True)
class GaussPointData:
    """Reference-configuration quadrature data, fixed for the whole solve."""

    xi: np.ndarray      # parent coordinates (3,)
    weight: float       # parent-domain quadrature weight
    dN_dX: np.ndarray   # shape-function gradients w.r.t. reference coords (8,3)
    Jxi: float          # reference Jacobian determinant


def gauss_rule_1d(n):
    """Points and weights of the n-point Gauss-Legendre rule on [-1,1]."""
    return np.polynomial.legendre.leggauss(n)


def shape_functions(xi):
    """Trilinear shape functions at a parent point, shape (8,)."""
    g = HEX8_CORNERS
    return 0.125 * (1.0 + g[:, 0] * xi[0]) * (1.0 + g[:, 1] * xi[1]) \
        * (1.0 + g[:, 2] * xi[2])


def _shape_gradients_parent(xi):
    """dN/dxi at a parent point, shape (8,3)."""
    g = HEX8_CORNERS
    a = 1.0 + g[:, 0] * xi[0]
    b = 1.0 + g[:, 1] * xi[1]
    c = 1.0 + g[:, 2] * xi[2]
    dN = np.empty((8, 3))
    dN[:, 0] = 0.125 * g[:, 0] * b * c
    dN[:, 1] = 0.125 * a * g[:, 1] * c
    dN[:, 2] = 0.125 * a * b * g[:, 2]
    return dN


def shape_gradients(element_nodes, xi):
    """Shape-function gradients w.r.t. reference coordinates at one point.

    Parameters
    ----------
    element_nodes : (8,3) array
        Reference coordinates of the element corners.
    xi : (3,) array_like
        Parent coordinates.

    Returns
    -------
    dN_dX : (8,3) ndarray
    Jxi : float
        Determinant of the parent-to-reference Jacobian, > 0.

    Raises
    ------
    InvertedElementError
        If the Jacobian determinant is not positive at ``xi``.
    """
    dN_dxi = _shape_gradients_parent(xi)
    # Jmat[b,a] = dX_a/dxi_b
    Jmat = dN_dxi.T @ element_nodes
    Jxi = np.linalg.det(Jmat)
    if Jxi <= 0.0:
        raise InvertedElementError(
            f"non-positive reference Jacobian {Jxi:.6e} at parent point "
            f"({xi[0]:.4f}, {xi[1]:.4f}, {xi[2]:.4f})")
    dN_dX = np.linalg.solve(Jmat, dN_dxi.T).T
    return dN_dX, Jxi


def element_gauss_data(element_nodes, gauss_rule=2):
    """Precompute quadrature data for one element.

    Raises ``InvertedElementError`` (with the Gauss point index) if the
    reference geometry is inverted anywhere.
    """
    pts, wts = gauss_rule_1d(gauss_rule)
    data = []
    k = 0
    for i in range(gauss_rule):
        for j in range(gauss_rule):
            for m in range(gauss_rule):
                xi = np.array([pts[i], pts[j], pts[m]])
                try:
                    dN_dX, Jxi = shape_gradients(element_nodes, xi)
                except InvertedElementError as exc:
                    raise InvertedElementError(
                        f"{exc} (gauss point {k})") from None
                data.append(GaussPointData(
                    xi=xi, weight=wts[i] * wts[j] * wts[m],
                    dN_dX=dN_dX, Jxi=Jxi))
                k += 1
    return data


def deformation_gradient(dN_dX, nodal_u):
    """Deformation gradient F' = I + sum_I u_I (x) dN_I/dX, shape (3,3)."""
    return np.eye(3) + np.asarray(nodal_u).T @ dN_dX


def b_matrix(dN_dX, F):
    """Green-strain variation matrix, 6x24.

    Each node contributes a 6x3 block: normal rows are
    (dN_I/dX_a)(dx_j/dX_a), shear rows pair two derivative products, in the
    Voigt order (11,22,33,23,13,12) with engineering shears, so that
    dE_voigt = B du for any virtual nodal displacement.
    """
    B = np.zeros((6, 24))
    for j in range(3):
        cols = slice(j, 24, 3)
        B[0, cols] = dN_dX[:, 0] * F[j, 0]
        B[1, cols] = dN_dX[:, 1] * F[j, 1]
        B[2, cols] = dN_dX[:, 2] * F[j, 2]
        B[3, cols] = dN_dX[:, 1] * F[j, 2] + dN_dX[:, 2] * F[j, 1]
        B[4, cols] = dN_dX[:, 0] * F[j, 2] + dN_dX[:, 2] * F[j, 0]
        B[5, cols] = dN_dX[:, 0] * F[j, 1] + dN_dX[:, 1] * F[j, 0]
    return B


def _gauss_data_or_compute(element_nodes, gauss_data):
    if gauss_data is None:
        return element_gauss_data(np.asarray(element_nodes, dtype=float))
    return gauss_data


def _point_state(gp, nodal_u, k):
    F = deformation_gradient(gp.dN_dX, nodal_u)
    try:
        return F, DeformationState.from_F(F)
    except AdmissibilityError as exc:
        raise AdmissibilityError(f"{exc} (gauss point {k})") from None


def internal_force(element_nodes, nodal_u, params, gauss_data=None):
    """Internal nodal force vector, 24 entries (x,y,z per node).

    Quadrature sum of B^T {S} over the reference element; admissibility
    failures carry the offending Gauss point index.
    """
    gauss_data = _gauss_data_or_compute(element_nodes, gauss_data)
    f = np.zeros(24)
    for k, gp in enumerate(gauss_data):
        F, state = _point_state(gp, nodal_u, k)
        try:
            st = stress_and_tangent(params, state)
        except AdmissibilityError as exc:
            raise AdmissibilityError(f"{exc} (gauss point {k})") from None
        B = b_matrix(gp.dN_dX, F)
        f += B.T @ st.S * (gp.weight * gp.Jxi)
    return f


def stiffness(element_nodes, nodal_u, params, gauss_data=None):
    """Element tangent stiffness, 24x24: material part B^T D B plus the
    geometric part (dN_I . S . dN_J) I3, the exact Jacobian of
    ``internal_force``."""
    return force_and_stiffness(element_nodes, nodal_u, params, gauss_data)[1]


def force_and_stiffness(element_nodes, nodal_u, params, gauss_data=None):
    """Internal force and tangent stiffness in one quadrature sweep."""
    gauss_data = _gauss_data_or_compute(element_nodes, gauss_data)
    f = np.zeros(24)
    K = np.zeros((24, 24))
    for k, gp in enumerate(gauss_data):
        F, state = _point_state(gp, nodal_u, k)
        try:
            st = stress_and_tangent(params, state)
        except AdmissibilityError as exc:
            raise AdmissibilityError(f"{exc} (gauss point {k})") from None
        B = b_matrix(gp.dN_dX, F)
        dV = gp.weight * gp.Jxi
        f += B.T @ st.S * dV
        K += B.T @ st.D @ B * dV
        G = gp.dN_dX
        K += np.kron(G @ voigt_to_sym(st.S) @ G.T, np.eye(3)) * dV
    return f, K


def strain_energy(element_nodes, nodal_u, params, gauss_data=None):
    """Total stored free energy of the element (kT/v times volume)."""
    gauss_data = _gauss_data_or_compute(element_nodes, gauss_data)
    W = 0.0
    for k, gp in enumerate(gauss_data):
        _, state = _point_state(gp, nodal_u, k)
        try:
            W += energy(params, state) * gp.weight * gp.Jxi
        except AdmissibilityError as exc:
            raise AdmissibilityError(f"{exc} (gauss point {k})") from None
    return W
