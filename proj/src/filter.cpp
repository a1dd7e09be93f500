#include "semdot/filter.hpp"

#include <algorithm>
#include <cmath>

namespace semdot {

FilterOperator build_filter(const Mesh& mesh, const FilterSpec& spec) {
  spec.validate();
  FilterOperator op;

  // Element-to-element weights over center distances.
  {
    const double r = spec.r_min;
    const int reach = std::max(0, static_cast<int>(std::ceil(r)) - 1);
    op.elem_offsets_.reserve(mesh.element_count() + 1);
    op.elem_offsets_.push_back(0);
    for (int ey = 0; ey < mesh.ny; ++ey) {
      for (int ex = 0; ex < mesh.nx; ++ex) {
        double row_sum = 0.0;
        for (int dy = -reach; dy <= reach; ++dy) {
          const int ly = ey + dy;
          if (ly < 0 || ly >= mesh.ny) continue;
          for (int dx = -reach; dx <= reach; ++dx) {
            const int lx = ex + dx;
            if (lx < 0 || lx >= mesh.nx) continue;
            const double w = r - std::hypot(static_cast<double>(dx), static_cast<double>(dy));
            if (w <= 0.0) continue;
            op.elem_cols_.push_back(mesh.element_id(lx, ly));
            op.elem_weights_.push_back(w);
            row_sum += w;
          }
        }
        op.elem_offsets_.push_back(static_cast<int>(op.elem_cols_.size()));
        op.elem_row_sums_.push_back(row_sum);
      }
    }
  }

  // Node-to-element weights over node-to-center distances.
  {
    const double u = spec.upsilon_min;
    const int reach = static_cast<int>(std::ceil(u + 0.5));
    op.node_offsets_.reserve(mesh.node_count() + 1);
    op.node_offsets_.push_back(0);
    for (int iy = 0; iy <= mesh.ny; ++iy) {
      for (int ix = 0; ix <= mesh.nx; ++ix) {
        double row_sum = 0.0;
        for (int ey = iy - reach; ey <= iy + reach; ++ey) {
          if (ey < 0 || ey >= mesh.ny) continue;
          for (int ex = ix - reach; ex <= ix + reach; ++ex) {
            if (ex < 0 || ex >= mesh.nx) continue;
            const double w = u - std::hypot(ix - (ex + 0.5), iy - (ey + 0.5));
            if (w <= 0.0) continue;
            op.node_cols_.push_back(mesh.element_id(ex, ey));
            op.node_weights_.push_back(w);
            row_sum += w;
          }
        }
        op.node_offsets_.push_back(static_cast<int>(op.node_cols_.size()));
        op.node_row_sums_.push_back(row_sum);
      }
    }
  }

  return op;
}

Field FilterOperator::apply(const Field& x) const {
  const int ne = element_count();
  if (static_cast<int>(x.size()) != ne) throw Error("filter: field size mismatch");
  Field out(x.size());
  for (int e = 0; e < ne; ++e) {
    double acc = 0.0;
    for (int idx = elem_offsets_[e]; idx < elem_offsets_[e + 1]; ++idx)
      acc += elem_weights_[idx] * x[elem_cols_[idx]];
    out[e] = acc / elem_row_sums_[e];
  }
  return out;
}

Field FilterOperator::backproject(const Field& g) const {
  const int ne = element_count();
  if (static_cast<int>(g.size()) != ne) throw Error("filter: field size mismatch");
  Field out(g.size(), 0.0);
  for (int e = 0; e < ne; ++e) {
    const double scaled = g[e] / elem_row_sums_[e];
    for (int idx = elem_offsets_[e]; idx < elem_offsets_[e + 1]; ++idx)
      out[elem_cols_[idx]] += elem_weights_[idx] * scaled;
  }
  return out;
}

std::vector<double> FilterOperator::nodal_densities(const Field& xtilde) const {
  if (static_cast<int>(xtilde.size()) != element_count())
    throw Error("filter: field size mismatch");
  const int nn = node_count();
  std::vector<double> out(static_cast<size_t>(nn));
  for (int n = 0; n < nn; ++n) {
    double acc = 0.0;
    for (int idx = node_offsets_[n]; idx < node_offsets_[n + 1]; ++idx)
      acc += node_weights_[idx] * xtilde[node_cols_[idx]];
    out[n] = acc / node_row_sums_[n];
  }
  return out;
}

std::vector<std::pair<int, double>> FilterOperator::element_row(int e) const {
  std::vector<std::pair<int, double>> row;
  for (int idx = elem_offsets_[e]; idx < elem_offsets_[e + 1]; ++idx)
    row.emplace_back(elem_cols_[idx], elem_weights_[idx]);
  return row;
}

std::vector<std::pair<int, double>> FilterOperator::node_row(int n) const {
  std::vector<std::pair<int, double>> row;
  for (int idx = node_offsets_[n]; idx < node_offsets_[n + 1]; ++idx)
    row.emplace_back(node_cols_[idx], node_weights_[idx]);
  return row;
}

}  // namespace semdot
