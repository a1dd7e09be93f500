#pragma once

#include <vector>

#include "semdot/core.hpp"
#include "semdot/mesh.hpp"

namespace semdot {

struct FilterSpec {
  double r_min = 2.0;        ///< element-filter radius, element widths
  double upsilon_min = 1.0;  ///< nodal-filter radius, element widths

  void validate() const {
    if (r_min < 1.0) throw ConfigError("filter: r_min must be >= 1");
    if (upsilon_min < 1.0) throw ConfigError("filter: upsilon_min must be >= 1");
  }
};

/// Precomputed linear-weight tables: element-to-element weights
/// w_el = max(0, r_min - dist(e,l)) and node-to-element weights
/// w_ne = max(0, upsilon_min - dist(n,e)). Rows renormalize over the
/// neighbors that exist (no ghost padding at the domain border).
class FilterOperator {
 public:
  /// Filtered volume fractions: Xf_e = sum_l w_el X_l / sum_l w_el.
  Field apply(const Field& x) const;

  /// Chain-rule back-projection: out_l = sum_e (w_el / sum w_e.) g_e,
  /// the transpose of the row-normalized weight matrix.
  Field backproject(const Field& g) const;

  /// Nodal densities rho_n = sum_e w_ne Xf_e / sum_e w_ne.
  std::vector<double> nodal_densities(const Field& xtilde) const;

  int element_count() const { return static_cast<int>(elem_offsets_.size()) - 1; }
  int node_count() const { return static_cast<int>(node_offsets_.size()) - 1; }

  /// Raw weight table rows, exposed for tests.
  std::vector<std::pair<int, double>> element_row(int e) const;
  std::vector<std::pair<int, double>> node_row(int n) const;

  friend FilterOperator build_filter(const Mesh& mesh, const FilterSpec& spec);

 private:
  std::vector<int> elem_offsets_, elem_cols_;
  std::vector<double> elem_weights_, elem_row_sums_;
  std::vector<int> node_offsets_, node_cols_;
  std::vector<double> node_weights_, node_row_sums_;
};

FilterOperator build_filter(const Mesh& mesh, const FilterSpec& spec);

}  // namespace semdot
