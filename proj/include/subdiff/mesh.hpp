#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace subdiff {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Scalar function of space. In 1D the y coordinate is ignored.
using SpatialFunction = std::function<double(const Point&)>;

/// Geometric identity of a mesh. Two meshes with equal signatures
/// generate the same node set in the same order.
struct MeshSignature {
  int dim = 1;
  int cells = 0;
  std::array<Interval, 2> bounds{};

  bool operator==(const MeshSignature& other) const {
    return dim == other.dim && cells == other.cells &&
           bounds[0].lo == other.bounds[0].lo && bounds[0].hi == other.bounds[0].hi &&
           bounds[1].lo == other.bounds[1].lo && bounds[1].hi == other.bounds[1].hi;
  }
};

/// Uniform tensor-product grid on an interval or a rectangle with
/// lexicographic node ordering (x fastest).
///
/// All axes carry the same number of cells. In 2D the cell width is taken
/// from the x axis; square domains give square cells.
class Mesh {
 public:
  Mesh() = default;

  int dim() const { return sig_.dim; }
  int cells() const { return sig_.cells; }
  const Interval& bounds(int axis) const { return sig_.bounds[axis]; }
  double h(int axis = 0) const { return sig_.bounds[axis].length() / sig_.cells; }
  const MeshSignature& signature() const { return sig_; }

  std::size_t nodes_per_axis() const { return static_cast<std::size_t>(sig_.cells) + 1; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_elements() const;
  Point node(std::size_t index) const;

  /// Node indices of element e; 1D elements use the first two entries.
  std::array<std::size_t, 4> element_nodes(std::size_t e) const;

  const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_; }
  bool is_boundary(std::size_t index) const { return on_boundary_[index] != 0; }

  /// Position of a node inside interior_nodes(), or npos for boundary nodes.
  std::size_t interior_position(std::size_t index) const { return interior_pos_[index]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  friend Mesh build_mesh(std::span<const Interval> bounds, int cells);

  MeshSignature sig_{};
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<unsigned char> on_boundary_;
  std::vector<std::size_t> interior_pos_;
};

/// Builds a uniform grid with `cells` cells per axis; bounds.size() is the
/// dimension (1 or 2). Throws InputError for cells < 2 or degenerate bounds.
Mesh build_mesh(std::span<const Interval> bounds, int cells);
Mesh build_mesh(Interval bounds, int cells);

/// Vector of nodal values identified with a Q1 finite element function.
struct NodalField {
  MeshSignature mesh;
  std::vector<double> values;

  NodalField() = default;
  NodalField(const Mesh& m, double fill = 0.0)
      : mesh(m.signature()), values(m.num_nodes(), fill) {}
  NodalField(const Mesh& m, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool aligned_with(const Mesh& m) const {
    return mesh == m.signature() && values.size() == m.num_nodes();
  }
};

/// Throws InputError unless the field is aligned with the mesh.
void require_aligned(const NodalField& field, const Mesh& mesh, const char* what);

/// Lagrange interpolation: value at node i is fn(x_i). Throws NumericalError
/// on a non-finite evaluation.
NodalField interpolate_nodal(const SpatialFunction& fn, const Mesh& mesh);

/// Lagrange interpolation restricted to boundary nodes; interior entries are 0.
NodalField interpolate_boundary(const SpatialFunction& fn, const Mesh& mesh);

}  // namespace subdiff
