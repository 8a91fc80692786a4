#include "subdiff/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

void ProblemSpec::validate() const {
  std::ostringstream err;
  if (!(alpha > 0.0 && alpha <= 1.0)) err << "alpha must lie in (0,1], got " << alpha << "; ";
  if (!(T > 0.0)) err << "T must be positive; ";
  if (num_steps < 1) err << "num_steps must be >= 1; ";
  if (!(M1 > 0.0)) err << "M1 must be positive; ";
  if (!(M2_floor > 0.0)) err << "M2_floor must be positive; ";
  if (!(lin_tol > 0.0 && lin_tol < 1.0)) err << "lin_tol must lie in (0,1); ";
  if (!(fp_tol > 0.0)) err << "fp_tol must be positive; ";
  if (mesh.num_nodes() == 0) err << "mesh is empty; ";
  if (!v.valid() || !b.valid() || !f.valid()) err << "v, b and f must all be given; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw InputError("ProblemSpec: " + msg.substr(0, msg.size() - 2));

  for (std::size_t k : mesh.boundary_nodes()) {
    const Point p = mesh.node(k);
    const double vk = v(p), bk = b(p);
    if (std::abs(vk - bk) > 1e-12 * std::max(1.0, std::abs(bk))) {
      std::ostringstream os;
      os << "ProblemSpec: initial value " << vk << " differs from boundary value " << bk
         << " at boundary node " << k;
      throw InputError(os.str());
    }
  }
}

ProblemSpec with_discretization(const ProblemSpec& spec, const Mesh& mesh, std::size_t num_steps) {
  ProblemSpec out = spec;
  out.mesh = mesh;
  out.num_steps = num_steps;
  return out;
}

namespace {

ProblemSpec validated(ProblemSpec spec) {
  spec.validate();
  return spec;
}

}  // namespace

ForwardSolver::ForwardSolver(ProblemSpec spec)
    : spec_(validated(std::move(spec))),
      weights_(cq_weights(spec_.alpha, spec_.num_steps, spec_.tau())),
      mass_(assemble_mass(spec_.mesh)),
      stiffness_(assemble_stiffness(spec_.mesh)),
      load_(assemble_load(spec_.mesh, spec_.f.as_function())),
      initial_(interpolate_nodal(spec_.v.as_function(), spec_.mesh)),
      boundary_(interpolate_boundary(spec_.b.as_function(), spec_.mesh)),
      source_nodal_(interpolate_nodal(spec_.f.as_function(), spec_.mesh)) {
  // u^0 = I_h v; compatibility makes its boundary trace equal I_h^d b, and
  // we pin it so the boundary stays bitwise constant over all steps.
  for (std::size_t k : spec_.mesh.boundary_nodes()) initial_[k] = boundary_[k];
}

namespace {

CsrMatrix step_matrix(const ForwardSolver& fs, const NodalField& q, double c0) {
  const CsrMatrix Mq = assemble_weighted_mass(fs.mesh(), q);
  CsrMatrix A = linear_combination(c0, fs.mass(), 1.0, fs.stiffness());
  return linear_combination(1.0, A, 1.0, Mq);
}

void check_potential(const ProblemSpec& spec, const NodalField& q) {
  require_aligned(q, spec.mesh, "solve_forward");
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!(q[k] >= 0.0 && q[k] <= spec.M1)) {
      std::ostringstream os;
      os << "solve_forward: potential value " << q[k] << " at node " << k << " outside [0, "
         << spec.M1 << "]";
      throw InputError(os.str());
    }
  }
}

}  // namespace

ForwardSolution ForwardSolver::solve(const NodalField& q, bool keep_history) const {
  check_potential(spec_, q);
  const Mesh& mesh = spec_.mesh;
  const std::size_t n_nodes = mesh.num_nodes();
  const auto& interior = mesh.interior_nodes();
  const std::size_t N = spec_.num_steps;
  const double c0 = weights_.b[0] * std::pow(spec_.tau(), -spec_.alpha);

  const CsrMatrix A = step_matrix(*this, q, c0);
  const BandedCholesky chol(interior_block(mesh, A));

  // Boundary coupling: F_i - (A u_b)_i is the same at every step.
  std::vector<double> fixed(interior.size());
  {
    NodalField ub = boundary_;
    for (std::size_t k : interior) ub[k] = 0.0;
    const auto Aub = spmv(A, ub.values);
    for (std::size_t r = 0; r < interior.size(); ++r) fixed[r] = load_[interior[r]] - Aub[interior[r]];
  }

  History hist(n_nodes, N + 1);
  hist.push(initial_.values);
  std::vector<double> memory(n_nodes), H(n_nodes), MH(n_nodes), rhs(interior.size());
  std::vector<double> u = initial_.values;
  for (std::size_t n = 1; n <= N; ++n) {
    cq_memory(weights_, hist, n, memory);
    const auto u0 = hist.level(0);
    for (std::size_t i = 0; i < n_nodes; ++i) H[i] = u0[i] - memory[i];
    spmv(mass_, H, MH);
    for (std::size_t r = 0; r < interior.size(); ++r) rhs[r] = fixed[r] + c0 * MH[interior[r]];
    chol.solve_in_place(rhs);
    for (std::size_t r = 0; r < interior.size(); ++r) u[interior[r]] = rhs[r];
    for (double x : rhs) {
      if (!std::isfinite(x)) throw NumericalError("solve_forward: non-finite state at step " + std::to_string(n));
    }
    hist.push(u);
  }

  ForwardSolution out;
  out.terminal = NodalField(mesh, u);
  out.frac_deriv_terminal = NodalField(mesh, discrete_caputo(hist, weights_, N));
  if (keep_history) out.history = std::move(hist);
  return out;
}

double ForwardSolver::max_step_residual(const NodalField& q, const History& history) const {
  check_potential(spec_, q);
  const Mesh& mesh = spec_.mesh;
  const CsrMatrix Mq = assemble_weighted_mass(mesh, q);
  double worst = 0.0;
  std::vector<double> Su(mesh.num_nodes()), Mqu(mesh.num_nodes()), Mw(mesh.num_nodes());
  for (std::size_t n = 1; n < history.levels(); ++n) {
    const auto w = discrete_caputo(history, weights_, n);
    const auto u = history.level(n);
    spmv(stiffness_, u, Su);
    spmv(Mq, u, Mqu);
    spmv(mass_, w, Mw);
    double res2 = 0.0, load2 = 0.0, mem2 = 0.0;
    for (std::size_t k : mesh.interior_nodes()) {
      const double r = Mw[k] + Su[k] + Mqu[k] - load_[k];
      res2 += r * r;
      load2 += load_[k] * load_[k];
      mem2 += Mw[k] * Mw[k];
    }
    const double scale = std::sqrt(load2) + std::sqrt(mem2);
    if (scale > 0.0) worst = std::max(worst, std::sqrt(res2) / scale);
  }
  return worst;
}

ForwardSolution solve_forward(const ProblemSpec& spec, const NodalField& q, bool keep_history) {
  return ForwardSolver(spec).solve(q, keep_history);
}

NodalField restrict_to_mesh(const NodalField& field, const Mesh& fine, const Mesh& coarse) {
  require_aligned(field, fine, "restrict_to_mesh");
  if (fine.dim() != coarse.dim()) throw InputError("restrict_to_mesh: dimension mismatch");
  for (int a = 0; a < fine.dim(); ++a) {
    if (fine.bounds(a).lo != coarse.bounds(a).lo || fine.bounds(a).hi != coarse.bounds(a).hi) {
      throw InputError("restrict_to_mesh: meshes cover different domains");
    }
  }
  if (fine.cells() % coarse.cells() != 0) {
    throw InputError("restrict_to_mesh: fine grid (" + std::to_string(fine.cells()) +
                     " cells) is not nested in coarse grid (" + std::to_string(coarse.cells()) + " cells)");
  }
  const std::size_t ratio = static_cast<std::size_t>(fine.cells() / coarse.cells());
  const std::size_t nf = fine.nodes_per_axis();
  const std::size_t nc = coarse.nodes_per_axis();
  NodalField out(coarse);
  for (std::size_t k = 0; k < coarse.num_nodes(); ++k) {
    if (coarse.dim() == 1) {
      out[k] = field[k * ratio];
    } else {
      const std::size_t i = k % nc, j = k / nc;
      out[k] = field[(j * ratio) * nf + i * ratio];
    }
  }
  return out;
}

}  // namespace subdiff
