#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "semdot/contour.hpp"

using namespace semdot;

TEST_CASE("all-void field produces no contours") {
  const Mesh mesh(4, 4);
  const GridSpec spec = GridSpec::make(5);
  std::vector<double> rho(mesh.node_count(), 1e-3);
  CHECK(extract_boundary(mesh, spec, rho, 0.5).empty());
}

TEST_CASE("single solid element yields one closed CCW loop") {
  const Mesh mesh(5, 5);
  const GridSpec spec = GridSpec::make(6);
  std::vector<double> rho(mesh.node_count(), 1e-3);
  for (int node : mesh.element_nodes(mesh.element_id(2, 2))) rho[node] = 1.0;

  const auto lines = extract_boundary(mesh, spec, rho, 0.5);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  // Solid on the left of the travel direction means the enclosed solid loop
  // runs counter-clockwise: positive signed area.
  CHECK(lines[0].signed_area() > 0.0);
  // The loop surrounds the element's neighborhood.
  for (const auto& pt : lines[0].points) {
    CHECK(pt[0] > 1.0);
    CHECK(pt[0] < 4.0);
    CHECK(pt[1] > 1.0);
    CHECK(pt[1] < 4.0);
  }
}

TEST_CASE("half-plane transition yields a single open polyline") {
  const Mesh mesh(6, 4);
  const GridSpec spec = GridSpec::make(5);
  std::vector<double> rho(mesh.node_count(), 1e-3);
  for (int iy = 0; iy <= mesh.ny; ++iy)
    for (int ix = 0; ix <= 3; ++ix) rho[mesh.node_id(ix, iy)] = 1.0;

  const auto lines = extract_boundary(mesh, spec, rho, 0.5);
  REQUIRE(lines.size() == 1);
  CHECK(!lines[0].closed);
  // Crossing where the bilinear ramp from 1 (x=3) to rho_min (x=4) hits 0.5.
  const double expected_x = 3.0 + (1.0 - 0.5) / (1.0 - 1e-3);
  for (const auto& pt : lines[0].points)
    CHECK(pt[0] == doctest::Approx(expected_x).epsilon(1e-9));
  // Spans the full domain height.
  const auto [ymin, ymax] = std::minmax_element(
      lines[0].points.begin(), lines[0].points.end(),
      [](const auto& a, const auto& b) { return a[1] < b[1]; });
  CHECK((*ymin)[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((*ymax)[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("radial bump contour area matches the analytic level set") {
  const Mesh mesh(40, 40);
  const GridSpec spec = GridSpec::make(10);
  const double cx = 20.0, cy = 20.0, R = 12.0;
  std::vector<double> rho(mesh.node_count());
  for (int iy = 0; iy <= 40; ++iy)
    for (int ix = 0; ix <= 40; ++ix) {
      const double r2 = (ix - cx) * (ix - cx) + (iy - cy) * (iy - cy);
      rho[mesh.node_id(ix, iy)] = std::max(0.0, 1.0 - r2 / (R * R));
    }
  const double psi = 0.5;
  const auto lines = extract_boundary(mesh, spec, rho, psi);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  const double analytic = M_PI * R * R * (1.0 - psi);
  CHECK(std::abs(lines[0].signed_area() - analytic) / analytic < 0.02);
}

TEST_CASE("void pocket inside solid runs clockwise") {
  const Mesh mesh(9, 9);
  const GridSpec spec = GridSpec::make(5);
  std::vector<double> rho(mesh.node_count(), 1.0);
  for (int iy = 3; iy <= 6; ++iy)
    for (int ix = 3; ix <= 6; ++ix) rho[mesh.node_id(ix, iy)] = 1e-3;
  const auto lines = extract_boundary(mesh, spec, rho, 0.5);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  CHECK(lines[0].signed_area() < 0.0);
}
