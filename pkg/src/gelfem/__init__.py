"""Finite-element equilibrium of swelling polymer gels.

A total-Lagrangian hexahedral solver for gels whose free energy combines
network elasticity with polymer-solvent mixing, driven by the chemical
potential of a surrounding solvent bath. The swollen stress-free state
serves as the computational reference, so dry-state singularities never
enter the discrete equations. Closed-form swelling and uniaxial-bar
solutions ship alongside the solver and everything is cross-checked by
finite differences; see the verify module and the command line's
``gelfem verify``.
"""

from .errors import (GelFemError, ParameterDomainError, AdmissibilityError,
                     InvertedElementError, SingularSystemError,
                     ConvergenceError, ModelParseError)
from .material import (MaterialParams, DeformationState, StressTangent,
                       solve_free_swelling_stretch, free_swelling_residual,
                       energy, stress_and_tangent, nominal_stress,
                       sym_to_voigt, voigt_to_sym)
from .element import (Hex8Element, shape_functions, shape_gradients,
                      element_gauss_data, deformation_gradient, b_matrix,
                      internal_force, stiffness, force_and_stiffness,
                      strain_energy)
from .solver import (Model, ContinuationSchedule, NewtonSettings,
                     SolutionState, GaussPointFields, assemble, solve_step,
                     run_continuation)
from .analytic import (FreeSwellingCurve, UniaxialCurve, free_swelling_curve,
                       uniaxial_transverse_residual,
                       uniaxial_transverse_stretch, uniaxial_axial_stress,
                       uniaxial_curve, stretch_from_displacement)
from .mesh import (generate_cube_mesh, nodes_on_plane, faces_on_plane,
                   face_loads, node_loads, mesh_volume)
from .benchmarks import (free_swelling_cube_model, uniaxial_bar_model,
                         face_stretch, element_average_nominal_stress)
from .model_io import (parse_model_file, parse_model_text, write_model_file,
                       write_vtk, write_free_swelling_csv, write_uniaxial_csv,
                       write_convergence_csv)
from .verify import verify_all, CheckResult

__version__ = "0.1.0"

__all__ = [
    "GelFemError", "ParameterDomainError", "AdmissibilityError",
    "InvertedElementError", "SingularSystemError", "ConvergenceError",
    "ModelParseError",
    "MaterialParams", "DeformationState", "StressTangent",
    "solve_free_swelling_stretch", "free_swelling_residual", "energy",
    "stress_and_tangent", "nominal_stress", "sym_to_voigt", "voigt_to_sym",
    "Hex8Element", "shape_functions", "shape_gradients", "element_gauss_data",
    "deformation_gradient", "b_matrix", "internal_force", "stiffness",
    "force_and_stiffness", "strain_energy",
    "Model", "ContinuationSchedule", "NewtonSettings", "SolutionState",
    "GaussPointFields", "assemble", "solve_step", "run_continuation",
    "FreeSwellingCurve", "UniaxialCurve", "free_swelling_curve",
    "uniaxial_transverse_residual", "uniaxial_transverse_stretch",
    "uniaxial_axial_stress", "uniaxial_curve", "stretch_from_displacement",
    "generate_cube_mesh", "nodes_on_plane", "faces_on_plane", "face_loads",
    "node_loads", "mesh_volume",
    "free_swelling_cube_model", "uniaxial_bar_model", "face_stretch",
    "element_average_nominal_stress",
    "parse_model_file", "parse_model_text", "write_model_file", "write_vtk",
    "write_free_swelling_csv", "write_uniaxial_csv", "write_convergence_csv",
    "verify_all", "CheckResult",
    "__version__",
]
