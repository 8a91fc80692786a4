#include "subdiff/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

Mesh refine(const Mesh& mesh, std::size_t factor) {
  std::vector<Interval> bounds;
  for (int a = 0; a < mesh.dim(); ++a) bounds.push_back(mesh.bounds(a));
  return build_mesh(bounds, mesh.cells() * static_cast<int>(factor));
}

Mesh with_cells(const Mesh& mesh, int cells) {
  std::vector<Interval> bounds;
  for (int a = 0; a < mesh.dim(); ++a) bounds.push_back(mesh.bounds(a));
  return build_mesh(bounds, cells);
}

}  // namespace

ObservationData make_observation(const ProblemSpec& spec, const FieldExpr& q_true,
                                 const ObservationOptions& options, double delta, std::uint64_t seed) {
  if (options.fine_factor < 1) throw InputError("make_observation: fine_factor must be >= 1");
  if (!(delta >= 0.0)) throw InputError("make_observation: delta must be nonnegative");
  const Mesh& coarse = spec.mesh;
  const Mesh fine = refine(coarse, options.fine_factor);
  const std::size_t fine_steps =
      options.fine_steps > 0 ? options.fine_steps : options.fine_factor * spec.num_steps;

  const ForwardSolver solver(with_discretization(spec, fine, fine_steps));
  const NodalField q_fine = interpolate_nodal(q_true.as_function(), fine);
  for (double qk : q_fine.values) {
    if (!(qk >= 0.0 && qk <= spec.M1)) {
      std::ostringstream os;
      os << "make_observation: true potential takes value " << qk << " outside [0, " << spec.M1 << "]";
      throw InputError(os.str());
    }
  }
  const ForwardSolution sol = solver.solve(q_fine);

  ObservationData obs;
  obs.delta = delta;
  obs.g_delta = restrict_to_mesh(sol.terminal, fine, coarse);
  obs.boundary_trace = interpolate_boundary(spec.b.as_function(), coarse);
  obs.psi_boundary = NodalField(coarse);
  for (std::size_t k : coarse.boundary_nodes()) {
    const Point p = coarse.node(k);
    obs.g_delta[k] = obs.boundary_trace[k];
    obs.psi_boundary[k] = q_true(p) * spec.b(p) - spec.f(p);
  }
  if (delta > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> zeta(0.0, 1.0);
    for (std::size_t k : coarse.interior_nodes()) obs.g_delta[k] += delta * zeta(rng);
  }
  obs.validate(coarse, spec.M2_floor);
  return obs;
}

double relative_error(const NodalField& q_star, const FieldExpr& q_true, const Mesh& mesh) {
  require_aligned(q_star, mesh, "relative_error");
  const NodalField truth = interpolate_nodal(q_true.as_function(), mesh);
  const CsrMatrix M = assemble_mass(mesh);
  const double denom = l2_norm(truth.values, M);
  if (denom == 0.0) throw InputError("relative_error: exact potential has zero norm");
  std::vector<double> d(truth.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = truth[k] - q_star[k];
  return l2_norm(d, M) / denom;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("loglog_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

int snap_cells(double length, double h_target) {
  if (!(h_target > 0.0)) throw InputError("snap_cells: target width must be positive");
  return std::max(2, static_cast<int>(std::lround(length / h_target)));
}

double RateTable::slope_for(double alpha) const {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] == alpha) return slopes[i];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RowSetup sweep_row_setup(const SweepConfig& config, double alpha, double delta) {
  if (!(delta > 0.0)) throw InputError("rate_sweep: noise levels must be positive");
  const double scale = std::cbrt(delta);
  const Mesh& base = config.base.mesh;
  const int cells = snap_cells(base.bounds(0).length(), scale);
  const auto steps =
      static_cast<std::size_t>(std::max(1L, std::lround(10.0 / scale)));

  RowSetup row{with_discretization(config.base, with_cells(base, cells), steps), {}};
  row.spec.alpha = alpha;

  std::size_t ff = std::max<std::size_t>(1, config.fine_factor);
  if (config.ref_h > 0.0) {
    while (row.spec.mesh.h() / static_cast<double>(ff) > config.ref_h * (1.0 + 1e-9)) ++ff;
  }
  std::size_t fs = std::max<std::size_t>(1, config.fine_time_factor) * steps;
  if (config.ref_tau > 0.0) {
    const auto need = static_cast<std::size_t>(std::ceil(config.base.T / config.ref_tau - 1e-9));
    fs = std::max(fs, need);
  }
  row.obs = {ff, fs};
  return row;
}

RateTable rate_sweep(const SweepConfig& config) {
  for (std::size_t i = 1; i < config.deltas.size(); ++i) {
    if (!(config.deltas[i] < config.deltas[i - 1])) {
      throw InputError("rate_sweep: deltas must be strictly descending");
    }
  }
  RateTable table;
  table.alphas = config.alphas;
  const std::size_t nd = config.deltas.size();
  table.rows.resize(config.alphas.size() * nd);

  const auto nrows = static_cast<std::ptrdiff_t>(table.rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t rr = 0; rr < nrows; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    RateRow& row = table.rows[r];
    row.alpha = config.alphas[r / nd];
    row.delta = config.deltas[r % nd];
    const auto start = std::chrono::steady_clock::now();
    try {
      const RowSetup setup = sweep_row_setup(config, row.alpha, row.delta);
      row.h = setup.spec.mesh.h();
      row.tau = setup.spec.tau();
      const std::uint64_t seed = config.base.seed + r;
      const ObservationData obs = make_observation(setup.spec, config.q_true, setup.obs, row.delta, seed);
      const ReconstructionResult res = reconstruct(setup.spec, obs);
      row.e_q = relative_error(res.q_star, config.q_true, setup.spec.mesh);
      row.iterations = res.iterations;
      row.converged = res.converged;
    } catch (const std::exception& e) {
      row.failed = true;
      row.message = e.what();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  for (std::size_t a = 0; a < config.alphas.size(); ++a) {
    std::vector<double> x, y;
    for (std::size_t d = 0; d < nd; ++d) {
      const RateRow& row = table.rows[a * nd + d];
      if (row.failed) continue;
      x.push_back(row.delta);
      y.push_back(row.e_q);
    }
    table.slopes.push_back(loglog_slope(x, y));
  }
  return table;
}

HistoryRun convergence_history(const ProblemSpec& spec, const FieldExpr& q_true, double delta,
                               const std::optional<FieldExpr>& q0_override,
                               const ObservationOptions& options) {
  const ObservationData obs = make_observation(spec, q_true, options, delta, spec.seed);
  HistoryRun run;
  run.result = reconstruct(spec, obs, {q_true, q0_override});
  const auto& errors = *run.result.errors_vs_truth;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double inc = k == 0 ? std::numeric_limits<double>::quiet_NaN() : run.result.increments[k - 1];
    run.rows.push_back({k, errors[k], inc});
  }
  return run;
}

}  // namespace subdiff
