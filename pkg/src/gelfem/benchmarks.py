"""Ready-made single-cube benchmark models and field extraction helpers.

The two classical checks both run on a cube of gel meshed in its
free-swelling reference state with symmetry conditions on the three
coordinate planes. Free swelling ramps the bath chemical potential with
all other faces free; the uniaxial bar additionally drives the X = L face
axially, by prescribed displacement or by a consistently lumped face
force. Both deformations are homogeneous, so stretches can be read off
any face node.
"""

import numpy as np

from .analytic import (stretch_from_displacement, uniaxial_axial_stress,
                       uniaxial_transverse_stretch)
from .material import MaterialParams, voigt_to_sym
from .mesh import face_loads, generate_cube_mesh, nodes_on_plane
from .solver import ContinuationSchedule, Model

__all__ = [
    "free_swelling_cube_model",
    "uniaxial_bar_model",
    "face_stretch",
    "element_average_nominal_stress",
]


def _symmetry_bcs(nodes):
    bcs = []
    for axis, selector in enumerate(("X=0", "Y=0", "Z=0")):
        bcs.extend((int(g), axis, 0.0) for g in nodes_on_plane(nodes, selector))
    return bcs


def free_swelling_cube_model(Nv, chi, mu_start, mu_target, n_steps,
                             n_cells=1, L=1.0):
    """Cube with symmetry planes fixed, chemical potential ramped.

    The cube swells freely; displacements stay proportional to position,
    so the run reproduces the scalar swelling equilibrium at every step.
    """
    nodes, elements = generate_cube_mesh(n_cells, n_cells, n_cells, L)
    params = MaterialParams.equilibrated(Nv, chi, mu_start)
    schedule = ContinuationSchedule.linear(mu_start, mu_target, n_steps)
    return Model(nodes=nodes, elements=elements, dirichlet=_symmetry_bcs(nodes),
                 loads=[], params=params, schedule=schedule)


def uniaxial_bar_model(Nv, chi, mu_bar, lambda1_target, n_steps, L=1.0,
                       mode="displacement"):
    """Unit-cell bar brought to axial stretch lambda1_target at fixed bath.

    In displacement mode the X = L face is driven to the end displacement
    matching the target stretch. In force mode the face carries the total
    axial force computed from the closed-form stress at the target state,
    so the equilibrium should land on the same stretch pair.
    """
    nodes, elements = generate_cube_mesh(1, 1, 1, L)
    params = MaterialParams.equilibrated(Nv, chi, mu_bar)
    lam0 = params.lambda0
    bcs = _symmetry_bcs(nodes)
    loads = []
    if mode == "displacement":
        delta = (lambda1_target / lam0 - 1.0) * L
        selector = f"X={L}"
        bcs.extend((int(g), 0, delta) for g in nodes_on_plane(nodes, selector))
    elif mode == "force":
        lam2 = uniaxial_transverse_stretch(Nv, chi, mu_bar, lambda1_target)
        stress = uniaxial_axial_stress(Nv, chi, mu_bar, lambda1_target, lam2)
        # nominal force per swollen-frame reference area is stress/lam0^2
        total = stress / lam0 ** 2 * L ** 2
        loads = face_loads(nodes, elements, f"X={L}", 0, total)
    else:
        raise ValueError(f"mode must be 'displacement' or 'force', got {mode!r}")
    schedule = ContinuationSchedule.linear(mu_bar, mu_bar, n_steps)
    return Model(nodes=nodes, elements=elements, dirichlet=bcs, loads=loads,
                 params=params, schedule=schedule)


def face_stretch(model, state, axis, L):
    """Total stretch along an axis, read from the face at coordinate L.

    Valid for homogeneous states: converts the average normal displacement
    of the face into a dry-frame stretch.
    """
    selector = f"{'XYZ'[axis]}={L}"
    ids = nodes_on_plane(model.nodes, selector)
    disp = state.u.reshape(-1, 3)[ids, axis]
    return stretch_from_displacement(float(np.mean(disp)), L,
                                     model.params.lambda0)


def element_average_nominal_stress(model, state):
    """Element-averaged dry-frame nominal stress tensors, (n_elements, 3, 3).

    Recovers P = F S at each Gauss point in the swollen reference frame,
    then rescales to force per unit dry-network area so values compare
    directly with the closed-form bar stress.
    """
    lam0 = model.params.lambda0
    Fp = state.gp_fields.Fp
    S = state.gp_fields.S
    n_el, n_gp = S.shape[:2]
    P = np.zeros((n_el, 3, 3))
    for e in range(n_el):
        for k in range(n_gp):
            P[e] += Fp[e, k] @ voigt_to_sym(S[e, k])
        P[e] *= lam0 ** 2 / n_gp
    return P
