"""Structured hexahedral meshes and axis-aligned node selection.

Meshes live in the free-swelling reference frame. Node sets for boundary
conditions and loads are picked with plane selectors such as ``"X=0"``
(axis letter, equals sign, coordinate), matched within an absolute
tolerance of 1e-9.
"""

import re

import numpy as np

from .element import Hex8Element, element_gauss_data
from .errors import ModelParseError

__all__ = [
    "generate_cube_mesh",
    "parse_plane_selector",
    "nodes_on_plane",
    "faces_on_plane",
    "face_loads",
    "node_loads",
    "mesh_volume",
]

PLANE_TOL = 1e-9

# local corner quads of the six hex faces, outward ordering not required
_HEX_FACES = (
    (0, 3, 7, 4),   # xi = -1
    (1, 2, 6, 5),   # xi = +1
    (0, 1, 5, 4),   # eta = -1
    (3, 2, 6, 7),   # eta = +1
    (0, 1, 2, 3),   # zeta = -1
    (4, 5, 6, 7),   # zeta = +1
)

_GAUSS_1D_2PT = (-1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0))


def generate_cube_mesh(nx, ny, nz, L):
    """Structured hex8 mesh of a cube of edge length L.

    Nodes are numbered x-fastest; each cell's corners follow the bottom
    quad counterclockwise, then the top quad, matching the element and
    VTK conventions.

    Returns
    -------
    nodes : (n_nodes, 3) float array
    elements : list of Hex8Element
    """
    nx, ny, nz = int(nx), int(ny), int(nz)
    if min(nx, ny, nz) < 1:
        raise ValueError(f"cell counts must be >= 1, got ({nx}, {ny}, {nz})")
    if L <= 0:
        raise ValueError(f"edge length must be positive, got {L}")

    xs = np.linspace(0.0, L, nx + 1)
    ys = np.linspace(0.0, L, ny + 1)
    zs = np.linspace(0.0, L, nz + 1)
    Z, Y, X = np.meshgrid(zs, ys, xs, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    def nid(i, j, k):
        return i + (nx + 1) * (j + (ny + 1) * k)

    elements = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                elements.append(Hex8Element((
                    nid(i, j, k), nid(i + 1, j, k),
                    nid(i + 1, j + 1, k), nid(i, j + 1, k),
                    nid(i, j, k + 1), nid(i + 1, j, k + 1),
                    nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1))))
    return nodes, elements


def parse_plane_selector(selector):
    """Split an axis-aligned plane selector into (axis index, coordinate).

    Accepts ``"X=0"``, ``"y == 1.5"``, etc. Raises ModelParseError on
    anything else.
    """
    m = re.fullmatch(r"\s*([xyzXYZ])\s*==?\s*([-+0-9.eE]+)\s*", selector)
    if m is None:
        raise ModelParseError(
            f"bad plane selector {selector!r}; expected e.g. 'X=0' or 'Z=1.5'")
    axis = "xyz".index(m.group(1).lower())
    try:
        value = float(m.group(2))
    except ValueError:
        raise ModelParseError(
            f"bad coordinate in plane selector {selector!r}") from None
    return axis, value


def nodes_on_plane(nodes, selector, tol=PLANE_TOL):
    """Indices of nodes lying on an axis-aligned plane."""
    axis, value = parse_plane_selector(selector)
    return np.flatnonzero(np.abs(np.asarray(nodes)[:, axis] - value) <= tol)


def faces_on_plane(nodes, elements, selector, tol=PLANE_TOL):
    """Element faces whose four corners all lie on the plane.

    Returns a list of 4-tuples of global node ids (one per face, in the
    face's cyclic corner order).
    """
    axis, value = parse_plane_selector(selector)
    nodes = np.asarray(nodes)
    on = np.abs(nodes[:, axis] - value) <= tol
    faces = []
    for elem in elements:
        ids = elem.node_ids
        for quad in _HEX_FACES:
            gids = tuple(ids[c] for c in quad)
            if all(on[g] for g in gids):
                faces.append(gids)
    return faces


def _quad_shape_weights(corners):
    # integral of each bilinear shape function over the quad, 2x2 quadrature
    corners = np.asarray(corners, dtype=float)
    w = np.zeros(4)
    for xi in _GAUSS_1D_2PT:
        for eta in _GAUSS_1D_2PT:
            N = 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                                 (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])
            dN_dxi = 0.25 * np.array([
                [-(1 - eta), -(1 - xi)],
                [(1 - eta), -(1 + xi)],
                [(1 + eta), (1 + xi)],
                [-(1 + eta), (1 - xi)],
            ])
            t = corners.T @ dN_dxi          # (3,2) tangent vectors
            dA = np.linalg.norm(np.cross(t[:, 0], t[:, 1]))
            w += N * dA
    return w


def face_loads(nodes, elements, selector, dof, total_force, tol=PLANE_TOL):
    """Consistently lumped nodal loads carrying total_force across a face.

    The total is distributed in proportion to each node's shape-function
    integral over the selected faces, so uniform traction on a flat face
    is represented exactly.

    Returns
    -------
    list of (node, dof, force) triples summing to total_force.
    """
    faces = faces_on_plane(nodes, elements, selector, tol)
    if not faces:
        raise ModelParseError(f"no element faces found on plane {selector!r}")
    nodes = np.asarray(nodes)
    weights = {}
    for gids in faces:
        w = _quad_shape_weights(nodes[list(gids)])
        for g, wi in zip(gids, w):
            weights[g] = weights.get(g, 0.0) + wi
    area = sum(weights.values())
    return [(int(g), int(dof), total_force * weights[g] / area)
            for g in sorted(weights)]


def node_loads(nodes, selector, dof, total_force, tol=PLANE_TOL):
    """Equal split of total_force over the nodes matching a plane selector."""
    ids = nodes_on_plane(nodes, selector, tol)
    if ids.size == 0:
        raise ModelParseError(f"no nodes found on plane {selector!r}")
    share = total_force / ids.size
    return [(int(g), int(dof), share) for g in ids]


def mesh_volume(nodes, elements):
    """Total reference volume by element quadrature."""
    nodes = np.asarray(nodes)
    vol = 0.0
    for elem in elements:
        for gp in element_gauss_data(nodes[list(elem.node_ids)], elem.gauss_rule):
            vol += gp.weight * gp.Jxi
    return vol
