"""Global assembly, Dirichlet handling, and Newton-Raphson continuation.

The equilibrium problem is solved on the free-swelling reference mesh with
a full Newton iteration on (K_mat + K_geo) dU = R - F_int. Constraints are
enforced by row/column elimination, so prescribed dofs hold their values
exactly at every iterate and reactions fall out of the internal force at
convergence. Because the swelling response is violently nonlinear in the
bath chemical potential, loads and chemical potential are ramped together
along a continuation schedule; any step that fails to converge is bisected
and retried.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .element import Hex8Element, element_gauss_data, deformation_gradient, \
    force_and_stiffness, internal_force
from .errors import AdmissibilityError, ConvergenceError, SingularSystemError
from .material import DeformationState, MaterialParams, stress_and_tangent

__all__ = [
    "Model",
    "ContinuationSchedule",
    "NewtonSettings",
    "SolutionState",
    "GaussPointFields",
    "assemble",
    "assemble_internal_force",
    "solve_step",
    "run_continuation",
]

# below this many free dofs a dense factorization is used
_DENSE_DOF_LIMIT = 300


@dataclass(frozen=True)
class NewtonSettings:
    """Newton iteration and continuation controls."""

    rtol: float = 1e-10          # force residual, relative to max(1, |f_ext|)
    atol_u: float = 1e-12        # displacement increment norm
    max_iterations: int = 30
    max_halvings: int = 8        # update damping on inadmissible/diverging trials
    residual_growth_limit: float = 10.0
    max_bisection_depth: int = 10


@dataclass(frozen=True)
class ContinuationSchedule:
    """Joint ramp of chemical potential and load factor.

    Both paths have the same length; the first entry must be the stress-free
    starting state (the reference chemical potential at load factor zero).
    """

    mu_path: tuple
    load_factor_path: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu_path", tuple(float(m) for m in self.mu_path))
        object.__setattr__(self, "load_factor_path",
                           tuple(float(f) for f in self.load_factor_path))
        if len(self.mu_path) != len(self.load_factor_path):
            raise ValueError("mu_path and load_factor_path must have equal length")
        if not self.mu_path:
            raise ValueError("schedule must contain at least one entry")
        if self.load_factor_path[0] != 0.0:
            raise ValueError("schedule must start at load factor 0")

    @property
    def n_steps(self):
        return len(self.mu_path)

    @classmethod
    def linear(cls, mu0_bar, mu_target, n_steps):
        """Uniform ramp from (mu0_bar, 0) to (mu_target, 1) in n_steps points."""
        if n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {n_steps}")
        return cls(mu_path=tuple(np.linspace(mu0_bar, mu_target, n_steps)),
                   load_factor_path=tuple(np.linspace(0.0, 1.0, n_steps)))


@dataclass
class Model:
    """Mesh, constraints, loads and solver settings for one problem.

    ``nodes`` are reference (free-swelling frame) coordinates, (N,3);
    ``dirichlet`` entries are (node, dof, value-at-full-load) with dof in
    {0,1,2}; ``loads`` entries are (node, dof, force-at-full-load) in
    kT/v times area units.
    """

    nodes: np.ndarray
    elements: list
    dirichlet: list
    loads: list
    params: MaterialParams
    schedule: ContinuationSchedule
    settings: NewtonSettings = field(default_factory=NewtonSettings)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = [e if isinstance(e, Hex8Element) else Hex8Element(e)
                         for e in self.elements]
        seen = set()
        for node, dof, _ in self.dirichlet:
            if dof not in (0, 1, 2):
                raise ValueError(f"dirichlet dof must be 0, 1 or 2, got {dof}")
            if (node, dof) in seen:
                raise ValueError(
                    f"duplicate dirichlet constraint on node {node} dof {dof}")
            seen.add((node, dof))
        self._cache = None

    @property
    def n_dofs(self):
        return 3 * len(self.nodes)

    def fixed_dof_indices(self):
        return np.array([3 * node + dof for node, dof, _ in self.dirichlet],
                        dtype=int)

    def free_dof_mask(self):
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.fixed_dof_indices()] = False
        return mask

    def _assembly_data(self):
        """Per-element quadrature data and dof maps, computed once."""
        if self._cache is None:
            gauss = []
            edofs = []
            for elem in self.elements:
                ids = np.array(elem.node_ids)
                gauss.append(element_gauss_data(self.nodes[ids], elem.gauss_rule))
                edofs.append((3 * ids[:, None] + np.arange(3)).ravel())
            self._cache = (gauss, edofs)
        return self._cache


@dataclass
class GaussPointFields:
    """Per-element, per-Gauss-point state at a converged solution."""

    Fp: np.ndarray   # (n_elements, n_gp, 3, 3)
    S: np.ndarray    # (n_elements, n_gp, 6) Voigt stress, kT/v
    W: np.ndarray    # (n_elements, n_gp) energy density, kT/v


@dataclass
class SolutionState:
    """Converged equilibrium at one continuation point."""

    u: np.ndarray
    residual_history: list
    gp_fields: GaussPointFields
    reactions: np.ndarray
    mu_bar: float
    load_factor: float


def _element_params(model, mu_bar):
    params = model.params
    return params if mu_bar is None else params.with_mu(mu_bar)


def assemble(model, u, mu_bar=None):
    """Global tangent stiffness (sparse CSR) and internal force vector.

    Evaluates every element even after a failure so that admissibility
    errors can be reported with all offending element ids at once.
    """
    params = _element_params(model, mu_bar)
    gauss, edofs = model._assembly_data()
    n = model.n_dofs
    u = np.asarray(u, dtype=float)

    rows, cols, vals = [], [], []
    f_int = np.zeros(n)
    failures = []
    for e, elem in enumerate(model.elements):
        edof = edofs[e]
        nodal_u = u[edof].reshape(8, 3)
        nodes_e = model.nodes[list(elem.node_ids)]
        try:
            f_e, K_e = force_and_stiffness(nodes_e, nodal_u, params, gauss[e])
        except AdmissibilityError as exc:
            failures.append((e, str(exc)))
            continue
        f_int[edof] += f_e
        rows.append(np.repeat(edof, 24))
        cols.append(np.tile(edof, 24))
        vals.append(K_e.ravel())

    if failures:
        detail = "; ".join(f"element {e}: {msg}" for e, msg in failures)
        raise AdmissibilityError(f"inadmissible state in {len(failures)} "
                                 f"element(s): {detail}")

    K = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n)).tocsr()
    return K, f_int


def assemble_internal_force(model, u, mu_bar=None):
    """Internal force only (used for damping probes)."""
    params = _element_params(model, mu_bar)
    gauss, edofs = model._assembly_data()
    u = np.asarray(u, dtype=float)
    f_int = np.zeros(model.n_dofs)
    failures = []
    for e, elem in enumerate(model.elements):
        edof = edofs[e]
        nodes_e = model.nodes[list(elem.node_ids)]
        try:
            f_int[edof] += internal_force(nodes_e, u[edof].reshape(8, 3),
                                          params, gauss[e])
        except AdmissibilityError as exc:
            failures.append((e, str(exc)))
    if failures:
        detail = "; ".join(f"element {e}: {msg}" for e, msg in failures)
        raise AdmissibilityError(f"inadmissible state in {len(failures)} "
                                 f"element(s): {detail}")
    return f_int


def _external_force(model, load_factor):
    f = np.zeros(model.n_dofs)
    for node, dof, force in model.loads:
        f[3 * node + dof] += load_factor * force
    return f


def _check_rigid_modes_constrained(model):
    """Raise unless the fixed dofs remove all six rigid-body modes.

    A rigid mode survives elimination exactly when it vanishes on every
    constrained dof, so the six modes restricted to the fixed dofs must
    have full rank.
    """
    fixed = model.fixed_dof_indices()
    X = model.nodes - model.nodes.mean(axis=0)
    n = len(model.nodes)
    modes = np.zeros((3 * n, 6))
    for a in range(3):
        modes[a::3, a] = 1.0
        axis = np.zeros(3)
        axis[a] = 1.0
        modes[:, 3 + a] = np.cross(axis, X).ravel()
    rank = np.linalg.matrix_rank(modes[fixed]) if fixed.size else 0
    if rank < 6:
        raise SingularSystemError(
            f"boundary conditions leave rigid-body modes unconstrained "
            f"(rank {rank} of 6); the global tangent would be singular")


def _solve_linear(K, r, free):
    """Solve the free-dof system K_ff du = r_f; full-size du (zeros on fixed)."""
    K_ff = K[free][:, free]
    r_f = r[free]
    try:
        if r_f.size < _DENSE_DOF_LIMIT:
            with warnings.catch_warnings():
                warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
                du_f = scipy.linalg.solve(K_ff.toarray(), r_f, assume_a="sym")
        else:
            du_f = spla.spsolve(K_ff.tocsc(), r_f)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning,
            RuntimeError) as exc:
        raise SingularSystemError(
            f"global tangent is singular ({exc}); check that rigid-body "
            "modes are constrained") from None
    if not np.all(np.isfinite(du_f)):
        raise SingularSystemError(
            "global tangent is rank deficient (non-finite Newton update); "
            "check that rigid-body modes are constrained")
    du = np.zeros_like(r)
    du[free] = du_f
    return du


def _collect_gp_fields(model, u, mu_bar):
    params = _element_params(model, mu_bar)
    gauss, edofs = model._assembly_data()
    n_el = len(model.elements)
    n_gp = len(gauss[0]) if n_el else 0
    fields = GaussPointFields(
        Fp=np.zeros((n_el, n_gp, 3, 3)),
        S=np.zeros((n_el, n_gp, 6)),
        W=np.zeros((n_el, n_gp)))
    for e in range(n_el):
        nodal_u = u[edofs[e]].reshape(8, 3)
        for k, gp in enumerate(gauss[e]):
            F = deformation_gradient(gp.dN_dX, nodal_u)
            st = stress_and_tangent(params, DeformationState.from_F(F))
            fields.Fp[e, k] = F
            fields.S[e, k] = st.S
            fields.W[e, k] = st.W
    return fields


def solve_step(model, u_prev, mu_bar, load_factor):
    """Newton-solve the equilibrium at one (mu_bar, load_factor) point.

    Converges when the free-dof force residual drops below
    rtol * max(1, |f_ext|) and the Newton increment norm below atol_u.
    Prescribed dofs are set to load_factor times their full-load values
    before iterating and never touched by the updates. A trial update that
    makes any Gauss point inadmissible or grows the residual more than
    tenfold is halved, up to ``max_halvings`` times.

    Returns
    -------
    SolutionState

    Raises
    ------
    ConvergenceError
        If the iteration or the update damping fails.
    """
    cfg = model.settings
    _check_rigid_modes_constrained(model)
    u = np.asarray(u_prev, dtype=float).copy()
    fixed = model.fixed_dof_indices()
    free = model.free_dof_mask()
    if fixed.size:
        u[fixed] = load_factor * np.array([v for _, _, v in model.dirichlet])

    f_ext = _external_force(model, load_factor)
    scale = max(1.0, np.linalg.norm(f_ext[free]))
    history = []

    f_int = None
    for _ in range(cfg.max_iterations):
        K, f_int = assemble(model, u, mu_bar)
        r = f_ext - f_int
        res = np.linalg.norm(r[free])
        history.append(res)
        du = _solve_linear(K, r, free)
        if res < cfg.rtol * scale and np.linalg.norm(du) < cfg.atol_u:
            break

        alpha = 1.0
        for _ in range(cfg.max_halvings + 1):
            u_trial = u + alpha * du
            try:
                f_trial = assemble_internal_force(model, u_trial, mu_bar)
            except AdmissibilityError:
                alpha *= 0.5
                continue
            res_trial = np.linalg.norm((f_ext - f_trial)[free])
            if res_trial <= cfg.residual_growth_limit * max(res, cfg.rtol * scale):
                break
            alpha *= 0.5
        else:
            raise ConvergenceError(
                f"update damping exhausted after {cfg.max_halvings} halvings "
                f"at residual {res:.3e} (mu_bar={mu_bar}, factor={load_factor})")
        u = u_trial
    else:
        raise ConvergenceError(
            f"no convergence in {cfg.max_iterations} iterations; last "
            f"residual {history[-1]:.3e} (mu_bar={mu_bar}, factor={load_factor})")

    reactions = np.zeros(model.n_dofs)
    if fixed.size:
        reactions[fixed] = (f_int - f_ext)[fixed]
    return SolutionState(u=u, residual_history=history,
                         gp_fields=_collect_gp_fields(model, u, mu_bar),
                         reactions=reactions, mu_bar=mu_bar,
                         load_factor=load_factor)


def _solve_with_bisection(model, u, start, target, depth):
    try:
        return solve_step(model, u, *target)
    except (ConvergenceError, AdmissibilityError):
        if depth >= model.settings.max_bisection_depth:
            raise ConvergenceError(
                f"continuation bisection depth exhausted; last good state "
                f"mu_bar={start[0]}, load factor={start[1]}") from None
    mid = (0.5 * (start[0] + target[0]), 0.5 * (start[1] + target[1]))
    state_mid = _solve_with_bisection(model, u, start, mid, depth + 1)
    return _solve_with_bisection(model, state_mid.u, mid, target, depth + 1)


def run_continuation(model, u0=None):
    """Walk the model's schedule, warm-starting each step from the last.

    Steps that fail to converge are bisected (recursively, up to the depth
    limit); only the scheduled points contribute to the returned list.

    Returns
    -------
    list of SolutionState, one per schedule entry.
    """
    sched = model.schedule
    if abs(sched.mu_path[0] - model.params.mu0_bar) > 1e-14:
        raise ValueError(
            f"schedule must start at the reference chemical potential "
            f"{model.params.mu0_bar}, got {sched.mu_path[0]}")
    u = np.zeros(model.n_dofs) if u0 is None else np.asarray(u0, dtype=float).copy()
    states = []
    start = (sched.mu_path[0], sched.load_factor_path[0])
    for target in zip(sched.mu_path, sched.load_factor_path):
        state = _solve_with_bisection(model, u, start, target, depth=0)
        states.append(state)
        u = state.u
        start = target
    return states
