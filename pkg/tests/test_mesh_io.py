"""Mesh generation, selectors, load lumping, model files, VTK/CSV output."""

import numpy as np
import pytest

from gelfem import (ModelParseError, face_loads, faces_on_plane,
                    free_swelling_curve, generate_cube_mesh, mesh_volume,
                    node_loads, nodes_on_plane, parse_model_text,
                    parse_model_file, run_continuation, uniaxial_curve,
                    write_free_swelling_csv, write_model_file,
                    write_uniaxial_csv, write_vtk)
from gelfem.mesh import parse_plane_selector
from gelfem.model_io import format_float

MODEL_TEXT = """
# one-element swelling cube
[material]
Nv = 0.001
chi = 0.1
mu0_bar = -0.05
mu_target = 0.0

[mesh]
cube = 1 1 1 1.0

[bcs]
fix = X=0 x 0.0
fix = Y=0 y 0.0
fix = Z=0 z 0.0

[schedule]
n_steps = 5
"""


class TestCubeMesh:
    def test_counts(self):
        nodes, elements = generate_cube_mesh(1, 1, 1, 2.0)
        assert nodes.shape == (8, 3)
        assert len(elements) == 1
        assert nodes.max() == 2.0

        nodes, elements = generate_cube_mesh(2, 1, 1, 2.0)
        assert nodes.shape == (12, 3)
        assert len(elements) == 2
        shared = set(elements[0].node_ids) & set(elements[1].node_ids)
        assert len(shared) == 4

    def test_volume_by_quadrature(self):
        for dims in ((1, 1, 1, 2.0), (3, 2, 4, 1.5)):
            nodes, elements = generate_cube_mesh(*dims)
            assert mesh_volume(nodes, elements) == pytest.approx(
                dims[3] ** 3, rel=1e-12)

    def test_positive_jacobians_everywhere(self):
        from gelfem import element_gauss_data
        nodes, elements = generate_cube_mesh(2, 3, 2, 1.0)
        for e in elements:
            for gp in element_gauss_data(nodes[list(e.node_ids)]):
                assert gp.Jxi > 0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            generate_cube_mesh(0, 1, 1, 1.0)
        with pytest.raises(ValueError):
            generate_cube_mesh(1, 1, 1, -1.0)


class TestSelectors:
    def test_parse_variants(self):
        assert parse_plane_selector("X=0") == (0, 0.0)
        assert parse_plane_selector("y == 1.5") == (1, 1.5)
        assert parse_plane_selector(" Z=2e0 ") == (2, 2.0)

    def test_parse_errors(self):
        for bad in ("W=0", "X", "X<1", "X=abc"):
            with pytest.raises(ModelParseError):
                parse_plane_selector(bad)

    def test_plane_membership(self):
        nodes, _ = generate_cube_mesh(2, 2, 2, 1.0)
        assert len(nodes_on_plane(nodes, "X=0")) == 9
        assert len(nodes_on_plane(nodes, "Z=1")) == 9
        assert len(nodes_on_plane(nodes, "Y=0.5")) == 9
        assert len(nodes_on_plane(nodes, "X=0.1")) == 0


class TestLoads:
    def test_single_face_equal_corners(self):
        nodes, elements = generate_cube_mesh(1, 1, 1, 1.0)
        loads = face_loads(nodes, elements, "X=1", 0, 8.0)
        assert len(loads) == 4
        for _, dof, f in loads:
            assert dof == 0
            assert f == pytest.approx(2.0, rel=1e-13)

    def test_structured_face_lumping_pattern(self):
        # 2x2 face: corners carry 1/16, edges 1/8, the center 1/4
        nodes, elements = generate_cube_mesh(2, 2, 2, 1.0)
        loads = dict()
        for n, _, f in face_loads(nodes, elements, "Z=1", 2, 1.0):
            loads[n] = f
        total = sum(loads.values())
        assert total == pytest.approx(1.0, rel=1e-13)
        xy = {n: nodes[n, :2] for n in loads}
        for n, f in loads.items():
            n_edges = sum(1 for c in xy[n] if c in (0.0, 1.0))
            expect = {2: 1 / 16, 1: 1 / 8, 0: 1 / 4}[n_edges]
            assert f == pytest.approx(expect, rel=1e-12)

    def test_faces_on_plane_counts(self):
        nodes, elements = generate_cube_mesh(2, 2, 2, 1.0)
        assert len(faces_on_plane(nodes, elements, "X=0")) == 4
        assert len(faces_on_plane(nodes, elements, "Y=0.5")) == 8

    def test_node_loads_equal_split(self):
        nodes, _ = generate_cube_mesh(1, 1, 1, 1.0)
        loads = node_loads(nodes, "Y=1", 1, 2.0)
        assert len(loads) == 4
        assert all(f == 0.5 for _, _, f in loads)

    def test_missing_plane_raises(self):
        nodes, elements = generate_cube_mesh(1, 1, 1, 1.0)
        with pytest.raises(ModelParseError):
            face_loads(nodes, elements, "X=9", 0, 1.0)
        with pytest.raises(ModelParseError):
            node_loads(nodes, "X=9", 0, 1.0)


class TestModelParse:
    def test_basic_model(self):
        model = parse_model_text(MODEL_TEXT)
        assert len(model.nodes) == 8
        assert len(model.elements) == 1
        assert len(model.dirichlet) == 12
        assert model.params.Nv == 0.001
        assert model.schedule.n_steps == 5
        assert model.schedule.mu_path[0] == -0.05
        assert model.schedule.mu_path[-1] == 0.0

    def test_inline_mesh(self):
        text = MODEL_TEXT.replace(
            "cube = 1 1 1 1.0",
            "\n".join([f"node = {x} {y} {z}"
                       for z in (0.0, 1.0) for y in (0.0, 1.0)
                       for x in (0.0, 1.0)]
                      + ["element = 0 1 3 2 4 5 7 6"]))
        model = parse_model_text(text)
        assert len(model.nodes) == 8
        assert model.elements[0].node_ids == (0, 1, 3, 2, 4, 5, 7, 6)

    def test_loads_section(self):
        text = MODEL_TEXT + "\n[loads]\nface = X=1 x 0.25\nnode = Y=1 y 1.0\n"
        model = parse_model_text(text)
        face_part = [l for l in model.loads if l[1] == 0]
        node_part = [l for l in model.loads if l[1] == 1]
        assert sum(f for _, _, f in face_part) == pytest.approx(0.25)
        assert [f for _, _, f in node_part] == [0.25] * 4

    @pytest.mark.parametrize("mutation,needle", [
        (("[material]", "[stuff]"), "unknown section"),
        (("Nv = 0.001", "Nv = 0.001\nbogus = 1"), "unknown key"),
        (("Nv = 0.001", ""), "missing key"),
        (("fix = X=0 x 0.0", "fix = X=0 w 0.0"), "dof must be"),
        (("n_steps = 5", "n_steps = 0"), "n_steps"),
        (("n_steps = 5", "n_steps = 5\nn_steps = 6"), "duplicate"),
        (("cube = 1 1 1 1.0", "cube = 1 1 1"), "cube"),
        (("fix = X=0 x 0.0", "fix = X=7 x 0.0"), "no nodes"),
        (("mu0_bar = -0.05", "mu0_bar = 0.05"), "mu0_bar"),
    ])
    def test_parse_errors(self, mutation, needle):
        old, new = mutation
        with pytest.raises(ModelParseError, match=needle):
            parse_model_text(MODEL_TEXT.replace(old, new))

    def test_content_before_section_rejected(self):
        with pytest.raises(ModelParseError):
            parse_model_text("Nv = 1\n" + MODEL_TEXT)

    def test_cube_and_inline_conflict(self):
        text = MODEL_TEXT.replace("cube = 1 1 1 1.0",
                                  "cube = 1 1 1 1.0\nnode = 0 0 0")
        with pytest.raises(ModelParseError, match="cannot be mixed"):
            parse_model_text(text)


class TestModelRoundTrip:
    def test_write_parse_write_is_stable(self, tmp_path):
        p1 = tmp_path / "a.gel"
        p2 = tmp_path / "b.gel"
        bcs = [("X=0", "x", 0.0), ("Y=0", "y", 0.0), ("Z=0", "z", 0.0)]
        loads = [("face", "X=1", "x", 0.125)]
        write_model_file(p1, 1e-3, 0.1, -0.05, 0.0, 5, cube=(2, 2, 2, 1.0),
                         bcs=bcs, loads=loads)
        m1 = parse_model_file(p1)
        write_model_file(p2, m1.params.Nv, m1.params.chi, m1.params.mu0_bar,
                         m1.schedule.mu_path[-1], m1.schedule.n_steps,
                         cube=(2, 2, 2, 1.0), bcs=bcs, loads=loads)
        assert p1.read_bytes() == p2.read_bytes()

    def test_reparse_gives_identical_model(self, tmp_path):
        path = tmp_path / "m.gel"
        write_model_file(path, 1e-3, 0.1, -0.05, 0.0, 5, cube=(2, 1, 1, 2.0),
                         bcs=[("X=0", "x", 0.0), ("Y=0", "y", 0.0),
                              ("Z=0", "z", 0.0)])
        m1 = parse_model_file(path)
        m2 = parse_model_file(path)
        assert np.array_equal(m1.nodes, m2.nodes)
        assert [e.node_ids for e in m1.elements] == \
            [e.node_ids for e in m2.elements]
        assert m1.dirichlet == m2.dirichlet
        assert m1.loads == m2.loads
        assert m1.params == m2.params
        assert m1.schedule == m2.schedule


class TestWriters:
    def test_vtk_structure(self, tmp_path):
        model = parse_model_text(MODEL_TEXT)
        state = run_continuation(model)[-1]
        path = tmp_path / "out.vtk"
        write_vtk(path, model, state)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# vtk DataFile")
        assert lines[2] == "ASCII"
        assert lines[3] == "DATASET UNSTRUCTURED_GRID"
        assert lines[4] == "POINTS 8 double"
        icells = lines.index("CELLS 1 9")
        itypes = lines.index("CELL_TYPES 1")
        ipdata = lines.index("POINT_DATA 8")
        icdata = lines.index("CELL_DATA 1")
        assert 4 < icells < itypes < ipdata < icdata
        assert lines[itypes + 1] == "12"
        cell = [int(t) for t in lines[icells + 1].split()]
        assert cell[0] == 8 and sorted(cell[1:]) == list(range(8))
        # deformed points = reference + displacement
        pts = np.array([[float(t) for t in lines[5 + i].split()]
                        for i in range(8)])
        assert np.allclose(pts, model.nodes + state.u.reshape(-1, 3))

    def test_csv_headers_and_determinism(self, tmp_path):
        c1 = free_swelling_curve(1e-3, 0.1, np.linspace(-0.02, 0.0, 4))
        pa = tmp_path / "a.csv"
        pb = tmp_path / "b.csv"
        write_free_swelling_csv(pa, c1)
        write_free_swelling_csv(pb, c1)
        assert pa.read_bytes() == pb.read_bytes()
        lines = pa.read_text().splitlines()
        assert lines[0] == "mu_bar,lambda"
        assert len(lines) == 5
        # every float round-trips exactly through the emitted text
        mu_back = float(lines[1].split(",")[0])
        assert mu_back == c1.mu_grid[0]

        cu = uniaxial_curve(1e-3, 0.1, 0.0, np.array([3.4, 3.6]))
        pu = tmp_path / "u.csv"
        write_uniaxial_csv(pu, cu)
        assert pu.read_text().splitlines()[0] == "lambda1,lambda2,stress"

    def test_format_float_is_round_trip_exact(self):
        rng = np.random.default_rng(53)
        for x in rng.standard_normal(50) * 10.0 ** rng.integers(-10, 10, 50):
            assert float(format_float(x)) == x
