#include "subdiff/fem.hpp"

#include <array>
#include <cmath>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

// 2-point Gauss rule on [0,1].
constexpr std::array<double, 2> kGaussPts{0.21132486540518713, 0.78867513459481287};
constexpr std::array<double, 2> kGaussWts{0.5, 0.5};

// 1D element matrices on a unit-length reference cell, scaled later.
constexpr double kMass1d[2][2] = {{2.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 6.0}};
constexpr double kStiff1d[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};

double shape1d(int a, double t) { return a == 0 ? 1.0 - t : t; }

int local_count(const Mesh& mesh) { return mesh.dim() == 1 ? 2 : 4; }

// Local node a of a 2D element has reference indices (a & 1, a >> 1).
template <class ElementMatrix>
CsrMatrix assemble(const Mesh& mesh, ElementMatrix&& local) {
  CsrMatrix A = q1_pattern(mesh);
  const int nl = local_count(mesh);
  std::array<std::array<double, 4>, 4> Ke{};
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    local(e, nodes, Ke);
    for (int a = 0; a < nl; ++a) {
      for (int b = 0; b < nl; ++b) *A.find(nodes[a], nodes[b]) += Ke[a][b];
    }
  }
  return A;
}

}  // namespace

CsrMatrix q1_pattern(const Mesh& mesh) {
  CsrMatrix A;
  A.n = mesh.num_nodes();
  A.row_ptr.assign(A.n + 1, 0);
  const auto n1 = static_cast<std::ptrdiff_t>(mesh.nodes_per_axis());
  for (std::size_t k = 0; k < A.n; ++k) {
    if (mesh.dim() == 1) {
      const auto i = static_cast<std::ptrdiff_t>(k);
      for (std::ptrdiff_t di = -1; di <= 1; ++di) {
        if (i + di >= 0 && i + di < n1) A.col.push_back(static_cast<std::size_t>(i + di));
      }
    } else {
      const auto i = static_cast<std::ptrdiff_t>(k) % n1;
      const auto j = static_cast<std::ptrdiff_t>(k) / n1;
      for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
        for (std::ptrdiff_t di = -1; di <= 1; ++di) {
          if (i + di < 0 || i + di >= n1 || j + dj < 0 || j + dj >= n1) continue;
          A.col.push_back(static_cast<std::size_t>((j + dj) * n1 + i + di));
        }
      }
    }
    A.row_ptr[k + 1] = A.col.size();
  }
  A.val.assign(A.col.size(), 0.0);
  return A;
}

CsrMatrix assemble_mass(const Mesh& mesh) {
  const double h = mesh.h();
  if (mesh.dim() == 1) {
    return assemble(mesh, [&](std::size_t, const auto&, auto& Ke) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) Ke[a][b] = h * kMass1d[a][b];
    });
  }
  const double hy = mesh.h(1);
  return assemble(mesh, [&](std::size_t, const auto&, auto& Ke) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        Ke[a][b] = h * hy * kMass1d[a & 1][b & 1] * kMass1d[a >> 1][b >> 1];
  });
}

CsrMatrix assemble_stiffness(const Mesh& mesh) {
  const double h = mesh.h();
  if (mesh.dim() == 1) {
    return assemble(mesh, [&](std::size_t, const auto&, auto& Ke) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) Ke[a][b] = kStiff1d[a][b] / h;
    });
  }
  const double hy = mesh.h(1);
  return assemble(mesh, [&](std::size_t, const auto&, auto& Ke) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const int ax = a & 1, ay = a >> 1, bx = b & 1, by = b >> 1;
        Ke[a][b] = (hy / h) * kStiff1d[ax][bx] * kMass1d[ay][by] +
                   (h / hy) * kMass1d[ax][bx] * kStiff1d[ay][by];
      }
    }
  });
}

CsrMatrix assemble_weighted_mass(const Mesh& mesh, const NodalField& q) {
  require_aligned(q, mesh, "assemble_weighted_mass");
  const double h = mesh.h();
  if (mesh.dim() == 1) {
    return assemble(mesh, [&](std::size_t, const auto& nodes, auto& Ke) {
      for (auto& row : Ke) row.fill(0.0);
      for (int g = 0; g < 2; ++g) {
        const double t = kGaussPts[g];
        const double qg = q[nodes[0]] * shape1d(0, t) + q[nodes[1]] * shape1d(1, t);
        const double w = kGaussWts[g] * h * qg;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) Ke[a][b] += w * shape1d(a, t) * shape1d(b, t);
      }
    });
  }
  const double hy = mesh.h(1);
  return assemble(mesh, [&](std::size_t, const auto& nodes, auto& Ke) {
    for (auto& row : Ke) row.fill(0.0);
    for (int gy = 0; gy < 2; ++gy) {
      for (int gx = 0; gx < 2; ++gx) {
        const double s = kGaussPts[gx], t = kGaussPts[gy];
        std::array<double, 4> phi{};
        for (int a = 0; a < 4; ++a) phi[a] = shape1d(a & 1, s) * shape1d(a >> 1, t);
        double qg = 0.0;
        for (int a = 0; a < 4; ++a) qg += q[nodes[a]] * phi[a];
        const double w = kGaussWts[gx] * kGaussWts[gy] * h * hy * qg;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) Ke[a][b] += w * phi[a] * phi[b];
      }
    }
  });
}

FemOperators assemble_operators(const Mesh& mesh, const NodalField& q) {
  return {assemble_mass(mesh), assemble_stiffness(mesh), assemble_weighted_mass(mesh, q)};
}

std::vector<double> assemble_load(const Mesh& mesh, const SpatialFunction& f) {
  std::vector<double> F(mesh.num_nodes(), 0.0);
  const double h = mesh.h();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const Point p0 = mesh.node(nodes[0]);
    if (mesh.dim() == 1) {
      for (int g = 0; g < 2; ++g) {
        const double t = kGaussPts[g];
        const double fg = f({p0.x + t * h, 0.0});
        for (int a = 0; a < 2; ++a) F[nodes[a]] += kGaussWts[g] * h * fg * shape1d(a, t);
      }
    } else {
      const double hy = mesh.h(1);
      for (int gy = 0; gy < 2; ++gy) {
        for (int gx = 0; gx < 2; ++gx) {
          const double s = kGaussPts[gx], t = kGaussPts[gy];
          const double fg = f({p0.x + s * h, p0.y + t * hy});
          const double w = kGaussWts[gx] * kGaussWts[gy] * h * hy * fg;
          for (int a = 0; a < 4; ++a) F[nodes[a]] += w * shape1d(a & 1, s) * shape1d(a >> 1, t);
        }
      }
    }
  }
  for (double v : F) {
    if (!std::isfinite(v)) throw NumericalError("assemble_load: non-finite source value");
  }
  return F;
}

double l2_norm(std::span<const double> values, const CsrMatrix& mass) {
  const auto Mv = spmv(mass, values);
  return std::sqrt(std::max(0.0, dot(values, Mv)));
}

double l2_norm(const NodalField& field, const Mesh& mesh) {
  require_aligned(field, mesh, "l2_norm");
  return l2_norm(field.values, assemble_mass(mesh));
}

CsrMatrix interior_block(const Mesh& mesh, const CsrMatrix& A) {
  const auto& interior = mesh.interior_nodes();
  CsrMatrix R;
  R.n = interior.size();
  R.row_ptr.assign(R.n + 1, 0);
  for (std::size_t r = 0; r < R.n; ++r) {
    const std::size_t i = interior[r];
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const std::size_t c = mesh.interior_position(A.col[k]);
      if (c == Mesh::npos) continue;
      R.col.push_back(c);
      R.val.push_back(A.val[k]);
    }
    R.row_ptr[r + 1] = R.col.size();
  }
  return R;
}

ReducedSystem apply_dirichlet(const Mesh& mesh, const CsrMatrix& A, std::span<const double> rhs,
                              const NodalField& boundary_values) {
  if (A.n != mesh.num_nodes() || rhs.size() != A.n) {
    throw InputError("apply_dirichlet: matrix/rhs size does not match mesh");
  }
  require_aligned(boundary_values, mesh, "apply_dirichlet");
  ReducedSystem out{interior_block(mesh, A), {}};
  const auto& interior = mesh.interior_nodes();
  out.rhs.resize(interior.size());
  for (std::size_t r = 0; r < interior.size(); ++r) {
    const std::size_t i = interior[r];
    double s = rhs[i];
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      if (mesh.is_boundary(A.col[k])) s -= A.val[k] * boundary_values[A.col[k]];
    }
    out.rhs[r] = s;
  }
  return out;
}

NodalField expand_interior(const Mesh& mesh, std::span<const double> interior,
                           const NodalField& boundary_values) {
  require_aligned(boundary_values, mesh, "expand_interior");
  if (interior.size() != mesh.interior_nodes().size()) {
    throw InputError("expand_interior: wrong number of interior values");
  }
  NodalField out(mesh);
  for (std::size_t k : mesh.boundary_nodes()) out[k] = boundary_values[k];
  for (std::size_t r = 0; r < interior.size(); ++r) out[mesh.interior_nodes()[r]] = interior[r];
  return out;
}

}  // namespace subdiff
