#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subdiff/cq.hpp"
#include "subdiff/expr.hpp"
#include "subdiff/fem.hpp"
#include "subdiff/mesh.hpp"
#include "subdiff/sparse.hpp"

namespace subdiff {

/// Full description of one (sub)diffusion problem on a fixed grid.
struct ProblemSpec {
  double alpha = 0.5;
  double T = 1.0;
  std::size_t num_steps = 100;
  Mesh mesh;
  FieldExpr v;  // initial value
  FieldExpr b;  // boundary value (time independent)
  FieldExpr f;  // source (time independent)
  double M1 = 5.0;          // potential upper bound
  double M2_floor = 1e-6;   // smallest admissible data value
  double lin_tol = 1e-12;
  double fp_tol = 1e-10;
  std::size_t max_iter = 50000;
  std::uint64_t seed = 0;

  double tau() const { return T / static_cast<double>(num_steps); }

  /// Throws InputError for out-of-range parameters or when v != b at a
  /// boundary node.
  void validate() const;
};

/// The same problem on a different grid and/or step count.
ProblemSpec with_discretization(const ProblemSpec& spec, const Mesh& mesh, std::size_t num_steps);

struct ForwardSolution {
  NodalField terminal;             // u_h^N
  NodalField frac_deriv_terminal;  // CQ derivative of u_h at t_N
  std::optional<History> history;  // u_h^0..u_h^N when requested
};

/// Fully discrete solver for a fixed ProblemSpec. Caches the mass and
/// stiffness matrices, the load vector and the boundary data so repeated
/// solves with different potentials only reassemble the weighted mass.
///
/// Each step solves (tau^-alpha M + S + M_q) u^n = F + tau^-alpha M H^n on
/// interior nodes, where H^n = u^0 - sum_{j>=1} b_j (u^{n-j} - u^0). The
/// matrix is factored once per potential.
class ForwardSolver {
 public:
  explicit ForwardSolver(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return spec_.mesh; }
  const CQWeights& weights() const { return weights_; }
  const CsrMatrix& mass() const { return mass_; }
  const CsrMatrix& stiffness() const { return stiffness_; }
  const std::vector<double>& load() const { return load_; }
  const NodalField& initial() const { return initial_; }
  const NodalField& boundary() const { return boundary_; }
  const NodalField& source_nodal() const { return source_nodal_; }

  /// q must be aligned with the mesh and lie in [0, M1] nodewise.
  ForwardSolution solve(const NodalField& q, bool keep_history = false) const;

  /// Largest relative interior residual over all steps of a stored history,
  /// for verification.
  double max_step_residual(const NodalField& q, const History& history) const;

 private:
  ProblemSpec spec_;
  CQWeights weights_;
  CsrMatrix mass_;
  CsrMatrix stiffness_;
  std::vector<double> load_;
  NodalField initial_;
  NodalField boundary_;
  NodalField source_nodal_;
};

ForwardSolution solve_forward(const ProblemSpec& spec, const NodalField& q, bool keep_history = false);

/// Samples a fine-grid field at the nodes of a nested coarse grid. Throws
/// InputError unless fine.cells is an integer multiple of coarse.cells on
/// the same domain.
NodalField restrict_to_mesh(const NodalField& field, const Mesh& fine, const Mesh& coarse);

}  // namespace subdiff
