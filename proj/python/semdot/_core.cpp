#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semdot/config.hpp"
#include "semdot/contour.hpp"
#include "semdot/fea.hpp"
#include "semdot/filter.hpp"
#include "semdot/problems.hpp"
#include "semdot/projection.hpp"
#include "semdot/runner.hpp"
#include "semdot/sensitivity.hpp"
#include "semdot/writers.hpp"

#include <filesystem>

namespace py = pybind11;
using namespace semdot;

namespace {

// Per-element fields cross the boundary as (ny, nx) arrays, row 0 at the
// bottom of the domain.
py::array_t<double> field_to_array(const Field& f, const Mesh& mesh) {
  py::array_t<double> arr({mesh.ny, mesh.nx});
  auto view = arr.mutable_unchecked<2>();
  for (int ey = 0; ey < mesh.ny; ++ey)
    for (int ex = 0; ex < mesh.nx; ++ex) view(ey, ex) = f[mesh.element_id(ex, ey)];
  return arr;
}

Field array_to_field(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
                     const Mesh& mesh) {
  if (arr.ndim() != 2 || arr.shape(0) != mesh.ny || arr.shape(1) != mesh.nx)
    throw Error("expected a (ny, nx) array matching the mesh");
  auto view = arr.unchecked<2>();
  Field f(static_cast<size_t>(mesh.element_count()));
  for (int ey = 0; ey < mesh.ny; ++ey)
    for (int ex = 0; ex < mesh.nx; ++ex) f[mesh.element_id(ex, ey)] = view(ey, ex);
  return f;
}

std::vector<double> array_to_nodal(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
    const Mesh& mesh) {
  if (arr.ndim() != 2 || arr.shape(0) != mesh.ny + 1 || arr.shape(1) != mesh.nx + 1)
    throw Error("expected a (ny+1, nx+1) nodal array matching the mesh");
  auto view = arr.unchecked<2>();
  std::vector<double> rho(static_cast<size_t>(mesh.node_count()));
  for (int iy = 0; iy <= mesh.ny; ++iy)
    for (int ix = 0; ix <= mesh.nx; ++ix) rho[mesh.node_id(ix, iy)] = view(iy, ix);
  return rho;
}

py::dict history_to_dict(const RunHistory& history) {
  const auto n = static_cast<py::ssize_t>(history.records.size());
  py::array_t<double> objective(n), volume(n), alteration(n), berr(n), beta(n), psi(n);
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& r = history.records[static_cast<size_t>(i)];
    objective.mutable_at(i) = r.objective;
    volume.mutable_at(i) = r.volume;
    alteration.mutable_at(i) = r.alteration;
    berr.mutable_at(i) = r.boundary_error;
    beta.mutable_at(i) = r.beta;
    psi.mutable_at(i) = r.psi;
  }
  py::dict d;
  d["objective"] = objective;
  d["volume"] = volume;
  d["alteration"] = alteration;
  d["boundary_error"] = berr;
  d["beta"] = beta;
  d["psi"] = psi;
  d["converged"] = history.converged;
  return d;
}

py::dict result_to_dict(const RunResult& result, const Mesh& mesh) {
  py::dict d;
  d["history"] = history_to_dict(result.history);
  d["x_raw"] = field_to_array(result.x_raw, mesh);
  d["x_tilde"] = field_to_array(result.x_tilde, mesh);
  d["x_new"] = field_to_array(result.x_new, mesh);
  d["delta"] = field_to_array(result.delta, mesh);
  d["objective"] = result.objective;
  d["iterations"] = result.iterations;
  d["converged"] = result.history.converged;
  d["psi"] = result.psi;
  d["beta"] = result.beta;
  py::list boundary;
  for (const auto& line : result.boundary) {
    py::array_t<double> pts({static_cast<py::ssize_t>(line.points.size()), py::ssize_t(2)});
    auto view = pts.mutable_unchecked<2>();
    for (size_t i = 0; i < line.points.size(); ++i) {
      view(static_cast<py::ssize_t>(i), 0) = line.points[i][0];
      view(static_cast<py::ssize_t>(i), 1) = line.points[i][1];
    }
    boundary.append(py::make_tuple(pts, line.closed));
  }
  d["boundary"] = boundary;
  return d;
}

RunConfig config_from_kwargs(const std::string& preset, const py::kwargs& kwargs) {
  std::string text;
  if (!preset.empty()) text += "preset = " + preset + "\n";
  for (auto item : kwargs) {
    const std::string key = py::str(item.first);
    const std::string value = py::str(item.second);
    text += key + " = " + value + "\n";
  }
  return parse_config(text, "<kwargs>");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topology optimization with elemental volume fractions and smooth boundaries";

  py::register_exception<Error>(m, "SemdotError");

  py::class_<Mesh>(m, "Mesh")
      .def(py::init<int, int>(), py::arg("nx"), py::arg("ny"))
      .def_readonly("nx", &Mesh::nx)
      .def_readonly("ny", &Mesh::ny)
      .def("node_count", &Mesh::node_count)
      .def("element_count", &Mesh::element_count)
      .def("dof_count", &Mesh::dof_count);

  py::class_<MaterialModel>(m, "MaterialModel")
      .def(py::init([](double E1, double nu, double p, double rho_min) {
             MaterialModel m_{E1, nu, p, rho_min};
             m_.validate();
             return m_;
           }),
           py::arg("E1") = 1.0, py::arg("nu") = 0.3, py::arg("p") = 1.5,
           py::arg("rho_min") = 1e-3)
      .def_readwrite("E1", &MaterialModel::E1)
      .def_readwrite("nu", &MaterialModel::nu)
      .def_readwrite("p", &MaterialModel::p)
      .def_readwrite("rho_min", &MaterialModel::rho_min);

  m.def("element_stiffness_q4",
        [](const MaterialModel& material) {
          const ElementMatrix ke = element_stiffness_q4(material);
          py::array_t<double> arr({8, 8});
          auto view = arr.mutable_unchecked<2>();
          for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) view(i, j) = ke(i, j);
          return arr;
        },
        py::arg("material"),
        "Plane-stress Q4 stiffness for a unit square element");

  m.def("preset_names", &preset_names);

  py::class_<FilterOperator>(m, "Filter")
      .def(py::init([](int nx, int ny, double rmin, double upsilon) {
             return build_filter(Mesh(nx, ny), FilterSpec{rmin, upsilon});
           }),
           py::arg("nx"), py::arg("ny"), py::arg("rmin") = 2.0, py::arg("upsilon") = 1.0)
      .def("apply",
           [](const FilterOperator& op, py::array_t<double> x, int nx, int ny) {
             const Mesh mesh(nx, ny);
             return field_to_array(op.apply(array_to_field(x, mesh)), mesh);
           },
           py::arg("x"), py::arg("nx"), py::arg("ny"))
      .def("backproject",
           [](const FilterOperator& op, py::array_t<double> g, int nx, int ny) {
             const Mesh mesh(nx, ny);
             return field_to_array(op.backproject(array_to_field(g, mesh)), mesh);
           },
           py::arg("g"), py::arg("nx"), py::arg("ny"))
      .def("nodal_densities",
           [](const FilterOperator& op, py::array_t<double> x, int nx, int ny) {
             const Mesh mesh(nx, ny);
             const auto rho = op.nodal_densities(array_to_field(x, mesh));
             py::array_t<double> arr({ny + 1, nx + 1});
             auto view = arr.mutable_unchecked<2>();
             for (int iy = 0; iy <= ny; ++iy)
               for (int ix = 0; ix <= nx; ++ix) view(iy, ix) = rho[mesh.node_id(ix, iy)];
             return arr;
           },
           py::arg("x"), py::arg("nx"), py::arg("ny"));

  m.def("heaviside_step", &heaviside_step, py::arg("rho"), py::arg("psi"),
        py::arg("rho_min") = 1e-3);
  m.def("heaviside_smooth", &heaviside_smooth, py::arg("rho"), py::arg("psi"), py::arg("beta"),
        py::arg("rho_min") = 1e-3);

  m.def("bisect_threshold",
        [](py::array_t<double> rho_nodal, double vstar, double beta, const std::string& mode,
           int grid_n, double rho_min) {
          const int ny = static_cast<int>(rho_nodal.shape(0)) - 1;
          const int nx = static_cast<int>(rho_nodal.shape(1)) - 1;
          const Mesh mesh(nx, ny);
          ProjectionState state;
          state.beta = beta;
          state.mode = mode == "step" ? ProjectionMode::step : ProjectionMode::smooth;
          const ProjectionResult res =
              project_design(mesh, GridSpec::make(grid_n), array_to_nodal(rho_nodal, mesh),
                             vstar, state, {}, rho_min);
          py::dict d;
          d["psi"] = res.psi;
          d["volume"] = res.volume;
          d["boundary_error"] = res.boundary_error;
          d["x_new"] = field_to_array(res.x_new, mesh);
          return d;
        },
        py::arg("rho_nodal"), py::arg("vstar"), py::arg("beta") = 1.0,
        py::arg("mode") = "smooth", py::arg("grid_n") = 10, py::arg("rho_min") = 1e-3,
        "Threshold bisection and projection of a nodal density field");

  m.def("extract_boundary",
        [](py::array_t<double> rho_nodal, double psi, int grid_n) {
          const int ny = static_cast<int>(rho_nodal.shape(0)) - 1;
          const int nx = static_cast<int>(rho_nodal.shape(1)) - 1;
          const Mesh mesh(nx, ny);
          const auto lines =
              extract_boundary(mesh, GridSpec::make(grid_n), array_to_nodal(rho_nodal, mesh), psi);
          py::list out;
          for (const auto& line : lines) {
            py::array_t<double> pts(
                {static_cast<py::ssize_t>(line.points.size()), py::ssize_t(2)});
            auto view = pts.mutable_unchecked<2>();
            for (size_t i = 0; i < line.points.size(); ++i) {
              view(static_cast<py::ssize_t>(i), 0) = line.points[i][0];
              view(static_cast<py::ssize_t>(i), 1) = line.points[i][1];
            }
            out.append(py::make_tuple(pts, line.closed));
          }
          return out;
        },
        py::arg("rho_nodal"), py::arg("psi"), py::arg("grid_n") = 10,
        "Marching-squares iso-contour of a nodal density field");

  m.def("load_config", &load_config, py::arg("path"));

  m.def("run",
        [](const std::string& preset, const std::string& out_dir, const py::kwargs& kwargs) {
          RunConfig cfg = config_from_kwargs(preset, kwargs);
          const ProblemDefinition problem = cfg.problem();
          const RunParams params = cfg.params();
          const RunResult result = params.optimizer == OptimizerChoice::simp_d
                                       ? run_simp_baseline(problem, params)
                                       : run_semdot(problem, params);
          if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            const Mesh mesh = problem.mesh();
            const std::filesystem::path dir(out_dir);
            write_history(result.history, (dir / "history.csv").string());
            write_design_field(result.x_new, mesh, (dir / "design.txt").string(),
                               FieldFormat::text);
            write_design_field(result.x_new, mesh, (dir / "design.vti").string(),
                               FieldFormat::vti);
            write_boundary_svg(result.boundary, mesh, cfg.grid, (dir / "boundary.svg").string());
            write_run_json(cfg, result, (dir / "run.json").string());
          }
          return result_to_dict(result, problem.mesh());
        },
        py::arg("preset"), py::arg("out_dir") = "",
        "Run the optimizer on a preset; keyword arguments override config keys");
}
