#include "subdiff/mesh.hpp"

#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

Mesh build_mesh(std::span<const Interval> bounds, int cells) {
  if (bounds.size() != 1 && bounds.size() != 2) {
    throw InputError("build_mesh: dimension must be 1 or 2");
  }
  if (cells < 2) {
    throw InputError("build_mesh: need at least 2 cells per axis, got " + std::to_string(cells));
  }
  for (const auto& iv : bounds) {
    if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      std::ostringstream os;
      os << "build_mesh: degenerate or reversed interval [" << iv.lo << ", " << iv.hi << "]";
      throw InputError(os.str());
    }
  }

  Mesh m;
  m.sig_.dim = static_cast<int>(bounds.size());
  m.sig_.cells = cells;
  m.sig_.bounds[0] = bounds[0];
  m.sig_.bounds[1] = bounds.size() == 2 ? bounds[1] : Interval{0.0, 0.0};

  const std::size_t n1 = static_cast<std::size_t>(cells) + 1;
  m.num_nodes_ = m.sig_.dim == 1 ? n1 : n1 * n1;
  m.on_boundary_.assign(m.num_nodes_, 0);
  m.interior_pos_.assign(m.num_nodes_, Mesh::npos);

  for (std::size_t k = 0; k < m.num_nodes_; ++k) {
    bool boundary = false;
    if (m.sig_.dim == 1) {
      boundary = k == 0 || k + 1 == n1;
    } else {
      const std::size_t i = k % n1;
      const std::size_t j = k / n1;
      boundary = i == 0 || j == 0 || i + 1 == n1 || j + 1 == n1;
    }
    if (boundary) {
      m.on_boundary_[k] = 1;
      m.boundary_.push_back(k);
    } else {
      m.interior_pos_[k] = m.interior_.size();
      m.interior_.push_back(k);
    }
  }
  return m;
}

Mesh build_mesh(Interval bounds, int cells) {
  return build_mesh(std::span<const Interval>(&bounds, 1), cells);
}

std::size_t Mesh::num_elements() const {
  const auto c = static_cast<std::size_t>(sig_.cells);
  return sig_.dim == 1 ? c : c * c;
}

Point Mesh::node(std::size_t index) const {
  const std::size_t n1 = nodes_per_axis();
  // Coordinates are computed from the index, never accumulated, so that
  // nested meshes produce bitwise-equal shared coordinates where possible.
  auto coord = [&](int axis, std::size_t i) {
    const Interval& iv = sig_.bounds[axis];
    if (i + 1 == n1) return iv.hi;
    return iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(sig_.cells);
  };
  if (sig_.dim == 1) return {coord(0, index), 0.0};
  return {coord(0, index % n1), coord(1, index / n1)};
}

std::array<std::size_t, 4> Mesh::element_nodes(std::size_t e) const {
  if (sig_.dim == 1) return {e, e + 1, 0, 0};
  const std::size_t c = static_cast<std::size_t>(sig_.cells);
  const std::size_t n1 = c + 1;
  const std::size_t i = e % c;
  const std::size_t j = e / c;
  const std::size_t ll = j * n1 + i;
  // Local order: (0,0), (1,0), (0,1), (1,1) in reference coordinates.
  return {ll, ll + 1, ll + n1, ll + n1 + 1};
}

NodalField::NodalField(const Mesh& m, std::vector<double> v)
    : mesh(m.signature()), values(std::move(v)) {
  if (values.size() != m.num_nodes()) {
    throw InputError("NodalField: " + std::to_string(values.size()) + " values for a mesh with " +
                     std::to_string(m.num_nodes()) + " nodes");
  }
}

void require_aligned(const NodalField& field, const Mesh& mesh, const char* what) {
  if (!field.aligned_with(mesh)) {
    throw InputError(std::string(what) + ": field is not aligned with the mesh (" +
                     std::to_string(field.size()) + " values, mesh has " +
                     std::to_string(mesh.num_nodes()) + " nodes)");
  }
}

NodalField interpolate_nodal(const SpatialFunction& fn, const Mesh& mesh) {
  NodalField out(mesh);
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
    const Point p = mesh.node(k);
    const double v = fn(p);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "interpolate_nodal: non-finite value at node " << k << " (x=" << p.x;
      if (mesh.dim() == 2) os << ", y=" << p.y;
      os << ")";
      throw NumericalError(os.str());
    }
    out[k] = v;
  }
  return out;
}

NodalField interpolate_boundary(const SpatialFunction& fn, const Mesh& mesh) {
  NodalField out(mesh);
  for (std::size_t k : mesh.boundary_nodes()) {
    const double v = fn(mesh.node(k));
    if (!std::isfinite(v)) {
      throw NumericalError("interpolate_boundary: non-finite value at node " + std::to_string(k));
    }
    out[k] = v;
  }
  return out;
}

}  // namespace subdiff
