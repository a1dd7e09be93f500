#include "semdot/writers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace semdot {

namespace {

std::string fmt_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_history(const RunHistory& history, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "iter,objective,volume,alteration,boundary_error,beta,psi,wall_ms\n";
  for (const auto& r : history.records) {
    out << r.iter << ',' << fmt_fixed(r.objective) << ',' << fmt_fixed(r.volume) << ','
        << fmt_fixed(r.alteration) << ',' << fmt_fixed(r.boundary_error) << ','
        << fmt_fixed(r.beta) << ',' << fmt_fixed(r.psi) << ',' << fmt_fixed(r.wall_ms)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_design_field(const Field& field, const Mesh& mesh, const std::string& path,
                        FieldFormat format) {
  if (static_cast<int>(field.size()) != mesh.element_count())
    throw Error("design field size does not match the mesh");
  std::ofstream out = open_out(path);
  if (format == FieldFormat::text) {
    for (int ey = mesh.ny - 1; ey >= 0; --ey) {
      for (int ex = 0; ex < mesh.nx; ++ex) {
        if (ex) out << ' ';
        out << fmt_exact(field[mesh.element_id(ex, ey)]);
      }
      out << '\n';
    }
  } else {
    out << "<?xml version=\"1.0\"?>\n"
        << "<VTKFile type=\"ImageData\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
        << "  <ImageData WholeExtent=\"0 " << mesh.nx << " 0 " << mesh.ny
        << " 0 0\" Origin=\"0 0 0\" Spacing=\"1 1 1\">\n"
        << "    <Piece Extent=\"0 " << mesh.nx << " 0 " << mesh.ny << " 0 0\">\n"
        << "      <CellData Scalars=\"design\">\n"
        << "        <DataArray type=\"Float64\" Name=\"design\" format=\"ascii\">\n";
    for (int ey = 0; ey < mesh.ny; ++ey) {
      out << "          ";
      for (int ex = 0; ex < mesh.nx; ++ex) {
        if (ex) out << ' ';
        out << fmt_exact(field[mesh.element_id(ex, ey)]);
      }
      out << '\n';
    }
    out << "        </DataArray>\n"
        << "      </CellData>\n"
        << "    </Piece>\n"
        << "  </ImageData>\n"
        << "</VTKFile>\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

Field read_design_field(const std::string& path, FieldFormat format, int& nx, int& ny) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);

  if (format == FieldFormat::text) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::vector<double> row;
      double v;
      while (ls >> v) row.push_back(v);
      if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty design field file: " + path);
    ny = static_cast<int>(rows.size());
    nx = static_cast<int>(rows.front().size());
    for (const auto& row : rows)
      if (static_cast<int>(row.size()) != nx) throw IoError("ragged design field file: " + path);
    Field field(static_cast<size_t>(nx) * ny);
    const Mesh mesh(nx, ny);
    for (int r = 0; r < ny; ++r)
      for (int ex = 0; ex < nx; ++ex) field[mesh.element_id(ex, ny - 1 - r)] = rows[r][ex];
    return field;
  }

  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto extent_pos = text.find("WholeExtent=\"");
  if (extent_pos == std::string::npos) throw IoError("not a VTK image-data file: " + path);
  {
    std::istringstream es(text.substr(extent_pos + 13));
    int x0, x1, y0, y1;
    es >> x0 >> x1 >> y0 >> y1;
    if (!es) throw IoError("bad extent in: " + path);
    nx = x1 - x0;
    ny = y1 - y0;
  }
  const auto open_tag = text.find("format=\"ascii\">");
  const auto close_tag = text.find("</DataArray>");
  if (open_tag == std::string::npos || close_tag == std::string::npos)
    throw IoError("missing data array in: " + path);
  std::istringstream ds(text.substr(open_tag + 15, close_tag - open_tag - 15));
  Field field(static_cast<size_t>(nx) * ny);
  for (auto& v : field)
    if (!(ds >> v)) throw IoError("truncated data array in: " + path);
  return field;
}

void write_boundary_svg(const std::vector<Polyline>& polylines, const Mesh& mesh, int grid_n,
                        const std::string& path) {
  std::ofstream out = open_out(path);
  const double stroke = 1.0 / std::max(grid_n, 1);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << mesh.nx << ' '
      << mesh.ny << "\">\n";

  auto emit_points = [&](std::ostream& os, const Polyline& line) {
    for (size_t i = 0; i < line.points.size(); ++i) {
      os << (i == 0 ? 'M' : 'L') << fmt_exact(line.points[i][0]) << ' '
         << fmt_exact(mesh.ny - line.points[i][1]);
    }
  };

  // Region layer: all closed contours in one even-odd filled path so that
  // interior holes are punched out.
  std::ostringstream region;
  for (const auto& line : polylines) {
    if (!line.closed || line.points.size() < 3) continue;
    emit_points(region, line);
    region << 'Z';
  }
  if (!region.str().empty())
    out << "  <path d=\"" << region.str()
        << "\" fill=\"#c8c8c8\" fill-rule=\"evenodd\" stroke=\"none\"/>\n";

  for (const auto& line : polylines) {
    if (line.points.size() < 2) continue;
    out << "  <path d=\"";
    emit_points(out, line);
    if (line.closed) out << 'Z';
    out << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_run_json(const RunConfig& config, const RunResult& result, const std::string& path) {
  nlohmann::json j;
  j["preset"] = config.preset;
  j["nx"] = config.nx;
  j["ny"] = config.ny;
  j["volfrac"] = config.volfrac;
  j["rmin"] = config.rmin;
  j["upsilon"] = config.upsilon;
  j["grid"] = config.grid;
  j["beta0"] = config.beta0;
  j["lambda"] = config.lambda;
  j["penalty"] = config.penalty;
  j["rho_min"] = config.rho_min;
  j["young"] = config.young;
  j["poisson"] = config.poisson;
  j["tau"] = config.tau;
  j["epsilon"] = config.epsilon;
  j["max_iter"] = config.max_iter;
  j["min_iter"] = config.min_iter;
  j["mode"] = config.mode;
  j["optimizer"] = config.optimizer;
  j["symmetry"] = config.symmetry;
  j["out"] = config.out_dir;
  j["result"] = {{"converged", result.history.converged},
                 {"iterations", result.iterations},
                 {"objective", result.objective},
                 {"psi", result.psi},
                 {"beta", result.beta}};
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace semdot
