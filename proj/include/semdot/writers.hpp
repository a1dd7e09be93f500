#pragma once

#include <string>
#include <vector>

#include "semdot/config.hpp"
#include "semdot/contour.hpp"
#include "semdot/core.hpp"
#include "semdot/mesh.hpp"
#include "semdot/runner.hpp"

namespace semdot {

/// CSV with header iter,objective,volume,alteration,boundary_error,beta,psi,
/// wall_ms; fixed six-decimal formatting.
void write_history(const RunHistory& history, const std::string& path);

enum class FieldFormat { text, vti };

/// Plain text matrix (ny rows, nx columns, top row first) or VTK image data
/// with one cell scalar per element. Values round-trip bit-exactly.
void write_design_field(const Field& field, const Mesh& mesh, const std::string& path,
                        FieldFormat format);

/// Reads either format back; the mesh dimensions are recovered from the file.
Field read_design_field(const std::string& path, FieldFormat format, int& nx, int& ny);

/// Boundary polylines as an SVG: a filled even-odd region layer from the
/// closed contours plus one stroked path per polyline. Stroke width equals
/// the grid-point spacing.
void write_boundary_svg(const std::vector<Polyline>& polylines, const Mesh& mesh, int grid_n,
                        const std::string& path);

/// Resolved-configuration echo plus run outcome, as JSON.
void write_run_json(const RunConfig& config, const RunResult& result, const std::string& path);

}  // namespace semdot
