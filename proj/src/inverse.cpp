#include "subdiff/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

void ObservationData::validate(const Mesh& mesh, double floor) const {
  require_aligned(g_delta, mesh, "ObservationData.g_delta");
  require_aligned(boundary_trace, mesh, "ObservationData.boundary_trace");
  require_aligned(psi_boundary, mesh, "ObservationData.psi_boundary");
  for (std::size_t k : mesh.boundary_nodes()) {
    if (g_delta[k] != boundary_trace[k]) {
      std::ostringstream os;
      os << "ObservationData: data " << g_delta[k] << " differs from boundary trace " << boundary_trace[k]
         << " at boundary node " << k;
      throw InputError(os.str());
    }
  }
  const auto it = std::min_element(g_delta.values.begin(), g_delta.values.end());
  if (!(*it >= floor)) {
    std::ostringstream os;
    os << "ObservationData: data value " << *it << " at node " << (it - g_delta.values.begin())
       << " is below the admissible floor " << floor;
    throw NumericalError(os.str());
  }
}

NodalField compute_psi_h(const Mesh& mesh, const NodalField& g_delta, const NodalField& psi_boundary,
                         double lin_tol) {
  require_aligned(g_delta, mesh, "compute_psi_h");
  require_aligned(psi_boundary, mesh, "compute_psi_h");
  const CsrMatrix M = assemble_mass(mesh);
  const CsrMatrix S = assemble_stiffness(mesh);
  std::vector<double> rhs = spmv(S, g_delta.values);
  for (double& r : rhs) r = -r;
  const ReducedSystem sys = apply_dirichlet(mesh, M, rhs, psi_boundary);
  const auto interior = solve_spd_or_throw(sys.matrix, sys.rhs, lin_tol, "compute_psi_h");
  return expand_interior(mesh, interior, psi_boundary);
}

NodalField clamp_potential(NodalField field, double M1) {
  for (double& a : field.values) a = std::max(std::min(M1, a), 0.0);
  return field;
}

NodalField potential_update(const NodalField& f, const NodalField& deriv, const NodalField& psi_h,
                            const NodalField& g, double M1) {
  const std::size_t n = f.size();
  if (deriv.size() != n || psi_h.size() != n || g.size() != n) {
    throw InputError("potential_update: fields have different lengths");
  }
  NodalField out = f;
  for (std::size_t k = 0; k < n; ++k) out[k] = (f[k] - deriv[k] + psi_h[k]) / g[k];
  return clamp_potential(std::move(out), M1);
}

namespace {

NodalField quotient(const ForwardSolver& solver, std::span<const double> deriv,
                    const ObservationData& obs, const NodalField& psi_h) {
  NodalField d = psi_h;
  d.values.assign(deriv.begin(), deriv.end());
  return potential_update(solver.source_nodal(), d, psi_h, obs.g_delta, solver.spec().M1);
}

void check_inputs(const ForwardSolver& solver, const ObservationData& obs, const NodalField& psi_h) {
  require_aligned(psi_h, solver.mesh(), "apply_K");
  obs.validate(solver.mesh(), solver.spec().M2_floor);
}

}  // namespace

NodalField apply_K(const ForwardSolver& solver, const NodalField& q, const ObservationData& obs,
                   const NodalField& psi_h) {
  check_inputs(solver, obs, psi_h);
  const ForwardSolution sol = solver.solve(q);
  return quotient(solver, sol.frac_deriv_terminal.values, obs, psi_h);
}

NodalField apply_K(const ProblemSpec& spec, const NodalField& q, const ObservationData& obs,
                   const NodalField& psi_h) {
  return apply_K(ForwardSolver(spec), q, obs, psi_h);
}

NodalField initial_guess(const ForwardSolver& solver, const ObservationData& obs, const NodalField& psi_h) {
  check_inputs(solver, obs, psi_h);
  const std::vector<double> zero(solver.mesh().num_nodes(), 0.0);
  return quotient(solver, zero, obs, psi_h);
}

ReconstructionResult reconstruct(const ProblemSpec& spec, const ObservationData& obs,
                                 const ReconstructOptions& options) {
  const ForwardSolver solver(spec);
  const Mesh& mesh = solver.mesh();
  obs.validate(mesh, spec.M2_floor);

  const NodalField psi_h = compute_psi_h(mesh, obs.g_delta, obs.psi_boundary, spec.lin_tol);
  NodalField q = options.q0 ? clamp_potential(interpolate_nodal(options.q0->as_function(), mesh), spec.M1)
                            : initial_guess(solver, obs, psi_h);

  std::optional<NodalField> truth;
  ReconstructionResult result;
  if (options.q_true) {
    truth = interpolate_nodal(options.q_true->as_function(), mesh);
    result.errors_vs_truth.emplace();
  }
  auto error_of = [&](const NodalField& qk) {
    std::vector<double> d(qk.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = qk[k] - (*truth)[k];
    return l2_norm(d, solver.mass());
  };
  if (truth) result.errors_vs_truth->push_back(error_of(q));

  const double h = mesh.h();
  std::vector<double> diff(mesh.num_nodes());
  while (result.iterations < spec.max_iter) {
    NodalField next = quotient(solver, solver.solve(q).frac_deriv_terminal.values, obs, psi_h);
    std::size_t rising = 0;
    for (std::size_t k = 0; k < diff.size(); ++k) {
      diff[k] = next[k] - q[k];
      if (diff[k] > h) ++rising;
    }
    const double inc = l2_norm(diff, solver.mass());
    result.increments.push_back(inc);
    result.rising_fraction.push_back(static_cast<double>(rising) / static_cast<double>(diff.size()));
    q = std::move(next);
    ++result.iterations;
    if (truth) result.errors_vs_truth->push_back(error_of(q));
    if (inc <= spec.fp_tol) {
      result.converged = true;
      break;
    }
  }
  result.q_star = std::move(q);
  return result;
}

}  // namespace subdiff
