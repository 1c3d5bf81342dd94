"""Model files, VTK emission and CSV emission.

A model file is a sectioned text format::

    [material]
    Nv = 0.001
    chi = 0.1
    mu0_bar = -0.05
    mu_target = 0.0

    [mesh]
    cube = 1 1 1 2.0

    [bcs]
    fix = X=0 x 0.0

    [loads]
    face = X=2 x 0.001
    node = Y=2 y 0.0005

    [schedule]
    n_steps = 10

Meshes are either generated (``cube = nx ny nz L``) or given inline with
repeated ``node = x y z`` and ``element = i0 ... i7`` lines (node ids are
implicit file order). Boundary conditions fix one displacement component
(x, y or z) of every node matching a plane selector; loads spread a total
force over a node set, either equally (``node``) or by consistent
shape-function lumping over element faces (``face``). All values ramp
with the continuation load factor. Unknown sections or keys are rejected.

Results go out as legacy ASCII VTK unstructured grids (deformed points,
displacement vectors, element-averaged stress and energy density) and as
CSV. Every float is printed with 17 significant digits so reruns are
byte-identical.
"""

import numpy as np

from .errors import ModelParseError
from .mesh import face_loads, generate_cube_mesh, node_loads, nodes_on_plane
from .element import Hex8Element
from .material import MaterialParams
from .solver import ContinuationSchedule, Model

__all__ = [
    "parse_model_file",
    "parse_model_text",
    "write_model_file",
    "write_vtk",
    "write_free_swelling_csv",
    "write_uniaxial_csv",
    "write_convergence_csv",
    "format_float",
]

_DOF_NAMES = {"x": 0, "y": 1, "z": 2}
_DOF_LETTERS = {v: k for k, v in _DOF_NAMES.items()}

_SECTIONS = {
    "material": {"Nv", "chi", "mu0_bar", "mu_target"},
    "mesh": {"cube", "node", "element"},
    "bcs": {"fix"},
    "loads": {"node", "face"},
    "schedule": {"n_steps"},
}


def format_float(x):
    """17-significant-digit decimal form, round-trip exact for doubles."""
    return "%.17g" % float(x)


def _parse_dof(token, where):
    try:
        return _DOF_NAMES[token]
    except KeyError:
        raise ModelParseError(
            f"{where}: dof must be x, y or z, got {token!r}") from None


def _parse_float(token, where):
    try:
        return float(token)
    except ValueError:
        raise ModelParseError(f"{where}: expected a number, got {token!r}") from None


def _split_sections(text):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ModelParseError(f"line {lineno}: unknown section [{name}]")
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ModelParseError(
                f"line {lineno}: content before any [section] header")
        if "=" not in line:
            raise ModelParseError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        current.append((lineno, key.strip(), value.strip()))
    return sections


def _section_items(sections, name, required=True):
    if name not in sections:
        if required:
            raise ModelParseError(f"missing required section [{name}]")
        return []
    items = sections[name]
    allowed = _SECTIONS[name]
    for lineno, key, _ in items:
        if key not in allowed:
            raise ModelParseError(
                f"line {lineno}: unknown key {key!r} in [{name}] "
                f"(allowed: {', '.join(sorted(allowed))})")
    return items


def _single_value(items, key, section):
    hits = [(lineno, v) for lineno, k, v in items if k == key]
    if not hits:
        raise ModelParseError(f"[{section}] is missing key {key!r}")
    if len(hits) > 1:
        raise ModelParseError(
            f"line {hits[1][0]}: duplicate key {key!r} in [{section}]")
    return hits[0]


def _parse_mesh(items):
    cubes = [(lineno, v) for lineno, k, v in items if k == "cube"]
    node_lines = [(lineno, v) for lineno, k, v in items if k == "node"]
    elem_lines = [(lineno, v) for lineno, k, v in items if k == "element"]
    if cubes and (node_lines or elem_lines):
        raise ModelParseError(
            f"line {cubes[0][0]}: 'cube' cannot be mixed with inline "
            "node/element lines")
    if cubes:
        if len(cubes) > 1:
            raise ModelParseError(f"line {cubes[1][0]}: duplicate 'cube' line")
        lineno, value = cubes[0]
        parts = value.split()
        if len(parts) != 4:
            raise ModelParseError(
                f"line {lineno}: 'cube' needs nx ny nz L, got {value!r}")
        try:
            nx, ny, nz = (int(p) for p in parts[:3])
        except ValueError:
            raise ModelParseError(
                f"line {lineno}: cell counts must be integers") from None
        L = _parse_float(parts[3], f"line {lineno}")
        try:
            return generate_cube_mesh(nx, ny, nz, L), ("cube", (nx, ny, nz, L))
        except ValueError as exc:
            raise ModelParseError(f"line {lineno}: {exc}") from None
    if not node_lines or not elem_lines:
        raise ModelParseError(
            "[mesh] needs either a 'cube' line or inline node/element lines")
    nodes = []
    for lineno, value in node_lines:
        parts = value.split()
        if len(parts) != 3:
            raise ModelParseError(
                f"line {lineno}: 'node' needs three coordinates")
        nodes.append([_parse_float(p, f"line {lineno}") for p in parts])
    nodes = np.array(nodes)
    elements = []
    for lineno, value in elem_lines:
        parts = value.split()
        if len(parts) != 8:
            raise ModelParseError(f"line {lineno}: 'element' needs 8 node ids")
        try:
            ids = tuple(int(p) for p in parts)
        except ValueError:
            raise ModelParseError(
                f"line {lineno}: node ids must be integers") from None
        if any(i < 0 or i >= len(nodes) for i in ids):
            raise ModelParseError(
                f"line {lineno}: node id out of range 0..{len(nodes) - 1}")
        elements.append(Hex8Element(ids))
    return (nodes, elements), ("inline", None)


def parse_model_text(text):
    """Parse model-file text into a ready-to-run Model."""
    sections = _split_sections(text)
    for name in ("material", "mesh", "bcs", "schedule"):
        if name not in sections:
            raise ModelParseError(f"missing required section [{name}]")

    mat_items = _section_items(sections, "material")
    lineno, v = _single_value(mat_items, "Nv", "material")
    Nv = _parse_float(v, f"line {lineno}")
    lineno, v = _single_value(mat_items, "chi", "material")
    chi = _parse_float(v, f"line {lineno}")
    lineno, v = _single_value(mat_items, "mu0_bar", "material")
    mu0_bar = _parse_float(v, f"line {lineno}")
    lineno, v = _single_value(mat_items, "mu_target", "material")
    mu_target = _parse_float(v, f"line {lineno}")

    (nodes, elements), _mesh_source = _parse_mesh(_section_items(sections, "mesh"))

    dirichlet = []
    for lineno, key, value in _section_items(sections, "bcs"):
        parts = value.split()
        if len(parts) != 3:
            raise ModelParseError(
                f"line {lineno}: 'fix' needs selector dof value")
        selector, dof_tok, val_tok = parts
        dof = _parse_dof(dof_tok, f"line {lineno}")
        val = _parse_float(val_tok, f"line {lineno}")
        ids = nodes_on_plane(nodes, selector)
        if ids.size == 0:
            raise ModelParseError(
                f"line {lineno}: no nodes on plane {selector!r}")
        dirichlet.extend((int(g), dof, val) for g in ids)

    loads = []
    for lineno, key, value in _section_items(sections, "loads", required=False):
        parts = value.split()
        if len(parts) != 3:
            raise ModelParseError(
                f"line {lineno}: '{key}' needs selector dof total_force")
        selector, dof_tok, force_tok = parts
        dof = _parse_dof(dof_tok, f"line {lineno}")
        total = _parse_float(force_tok, f"line {lineno}")
        try:
            if key == "face":
                loads.extend(face_loads(nodes, elements, selector, dof, total))
            else:
                loads.extend(node_loads(nodes, selector, dof, total))
        except ModelParseError as exc:
            raise ModelParseError(f"line {lineno}: {exc}") from None

    sched_items = _section_items(sections, "schedule")
    lineno, v = _single_value(sched_items, "n_steps", "schedule")
    try:
        n_steps = int(v)
    except ValueError:
        raise ModelParseError(
            f"line {lineno}: n_steps must be an integer") from None
    if n_steps < 1:
        raise ModelParseError(f"line {lineno}: n_steps must be >= 1")

    try:
        params = MaterialParams.equilibrated(Nv, chi, mu0_bar)
        schedule = ContinuationSchedule.linear(mu0_bar, mu_target, n_steps)
        return Model(nodes=nodes, elements=elements, dirichlet=dirichlet,
                     loads=loads, params=params, schedule=schedule)
    except ValueError as exc:
        raise ModelParseError(str(exc)) from None


def parse_model_file(path):
    """Read and parse a model file. See parse_model_text."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelParseError(f"cannot read model file {path}: {exc}") from None
    return parse_model_text(text)


def write_model_file(path, Nv, chi, mu0_bar, mu_target, n_steps, cube=None,
                     nodes=None, elements=None, bcs=(), loads=()):
    """Emit a model file that re-parses to the same Model.

    Pass either ``cube=(nx, ny, nz, L)`` or inline ``nodes``/``elements``.
    ``bcs`` entries are (selector, dof_letter, value); ``loads`` entries
    are (kind, selector, dof_letter, total_force) with kind 'node' or
    'face'.
    """
    lines = ["[material]",
             f"Nv = {format_float(Nv)}",
             f"chi = {format_float(chi)}",
             f"mu0_bar = {format_float(mu0_bar)}",
             f"mu_target = {format_float(mu_target)}",
             "",
             "[mesh]"]
    if cube is not None:
        nx, ny, nz, L = cube
        lines.append(f"cube = {int(nx)} {int(ny)} {int(nz)} {format_float(L)}")
    else:
        if nodes is None or elements is None:
            raise ValueError("need cube=... or both nodes and elements")
        for xyz in np.asarray(nodes):
            lines.append("node = " + " ".join(format_float(c) for c in xyz))
        for elem in elements:
            ids = elem.node_ids if isinstance(elem, Hex8Element) else elem
            lines.append("element = " + " ".join(str(int(i)) for i in ids))
    lines += ["", "[bcs]"]
    for selector, dof_letter, value in bcs:
        lines.append(f"fix = {selector} {dof_letter} {format_float(value)}")
    if loads:
        lines += ["", "[loads]"]
        for kind, selector, dof_letter, total in loads:
            if kind not in ("node", "face"):
                raise ValueError(f"load kind must be 'node' or 'face', got {kind!r}")
            lines.append(f"{kind} = {selector} {dof_letter} {format_float(total)}")
    lines += ["", "[schedule]", f"n_steps = {int(n_steps)}", ""]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))


def write_vtk(path, model, state):
    """Legacy ASCII VTK unstructured grid of one converged state.

    Points are deformed coordinates; point data holds the displacement
    vectors; cell data holds the element-averaged Voigt stress and energy
    density.
    """
    u = state.u.reshape(-1, 3)
    points = model.nodes + u
    n_points = len(points)
    n_cells = len(model.elements)
    S_avg = state.gp_fields.S.mean(axis=1)
    W_avg = state.gp_fields.W.mean(axis=1)

    out = ["# vtk DataFile Version 3.0",
           "swollen gel equilibrium state",
           "ASCII",
           "DATASET UNSTRUCTURED_GRID",
           f"POINTS {n_points} double"]
    for p in points:
        out.append(" ".join(format_float(c) for c in p))
    out.append(f"CELLS {n_cells} {9 * n_cells}")
    for elem in model.elements:
        out.append("8 " + " ".join(str(i) for i in elem.node_ids))
    out.append(f"CELL_TYPES {n_cells}")
    out.extend(["12"] * n_cells)
    out.append(f"POINT_DATA {n_points}")
    out.append("VECTORS displacement double")
    for d in u:
        out.append(" ".join(format_float(c) for c in d))
    out.append(f"CELL_DATA {n_cells}")
    out.append("FIELD results 2")
    out.append(f"S_voigt 6 {n_cells} double")
    for row in S_avg:
        out.append(" ".join(format_float(c) for c in row))
    out.append(f"W 1 {n_cells} double")
    for w in W_avg:
        out.append(format_float(w))
    out.append("")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out))


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(x) for x in row))
    lines.append("")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))


def write_free_swelling_csv(path, curve):
    """Free-swelling curve as CSV with columns mu_bar,lambda."""
    _write_csv(path, ("mu_bar", "lambda"), zip(curve.mu_grid, curve.stretch))


def write_uniaxial_csv(path, curve):
    """Uniaxial curve as CSV with columns lambda1,lambda2,stress."""
    _write_csv(path, ("lambda1", "lambda2", "stress"),
               zip(curve.lambda1, curve.lambda2, curve.stress))


def write_convergence_csv(path, states):
    """Newton residual history of a continuation run, one row per iteration."""
    rows = []
    for step, st in enumerate(states):
        for it, res in enumerate(st.residual_history):
            rows.append((step, st.mu_bar, st.load_factor, it, res))
    _write_csv(path, ("step", "mu_bar", "load_factor", "iteration", "residual"),
               rows)
