#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subdiff/expr.hpp"
#include "subdiff/forward.hpp"
#include "subdiff/inverse.hpp"

namespace subdiff {

/// How the synthetic "exact" data is produced: the forward problem is solved
/// on a grid refined by fine_factor in every axis with fine_steps time steps
/// (0 means fine_factor * num_steps), then sampled on the coarse grid.
struct ObservationOptions {
  std::size_t fine_factor = 1;
  std::size_t fine_steps = 0;
};

/// g_delta(x_i) = u_fine(x_i, T) + delta * zeta_i with zeta_i ~ N(0,1) i.i.d.
/// at interior nodes; boundary nodes keep I_h^d b exactly. Throws
/// NumericalError when the noisy data falls below spec.M2_floor.
ObservationData make_observation(const ProblemSpec& spec, const FieldExpr& q_true,
                                 const ObservationOptions& options, double delta, std::uint64_t seed);

/// ||I_h q_true - q_star||_{L2} / ||I_h q_true||_{L2}.
double relative_error(const NodalField& q_star, const FieldExpr& q_true, const Mesh& mesh);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Cells per axis for a target width: round(L / h_target), at least 2.
int snap_cells(double length, double h_target);

struct SweepConfig {
  ProblemSpec base;  // mesh and num_steps are replaced per row
  FieldExpr q_true;
  std::vector<double> deltas;
  std::vector<double> alphas;
  /// Reference data: fine_factor is raised until the fine width is at most
  /// ref_h (when ref_h > 0); fine_steps is raised until the fine step is at
  /// most ref_tau (when ref_tau > 0) and is at least fine_time_factor * N.
  std::size_t fine_factor = 1;
  std::size_t fine_time_factor = 1;
  double ref_h = 0.0;
  double ref_tau = 0.0;
};

struct RateRow {
  double delta = 0.0;
  double h = 0.0;
  double tau = 0.0;
  double alpha = 0.0;
  double e_q = 0.0;
  std::size_t iterations = 0;
  double runtime_s = 0.0;
  bool converged = false;
  bool failed = false;
  std::string message;
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Fitted slope of log e_q against log delta, one per entry of alphas
  /// (NaN when fewer than two rows succeeded).
  std::vector<double> alphas;
  std::vector<double> slopes;

  double slope_for(double alpha) const;
};

/// Rows are ordered alpha-major; row r uses seed base.seed + r. Failures
/// are recorded in the row rather than thrown.
RateTable rate_sweep(const SweepConfig& config);

/// Grid and options for one sweep row.
struct RowSetup {
  ProblemSpec spec;
  ObservationOptions obs;
};
RowSetup sweep_row_setup(const SweepConfig& config, double alpha, double delta);

struct HistoryRow {
  std::size_t k = 0;
  double e_k = 0.0;
  double increment = 0.0;  // ||q_k - q_{k-1}||, NaN for k = 0
};

struct HistoryRun {
  std::vector<HistoryRow> rows;
  ReconstructionResult result;
};

/// Reconstruction from synthetic data with e_k = ||q_k - I_h q_true|| logged
/// per iteration.
HistoryRun convergence_history(const ProblemSpec& spec, const FieldExpr& q_true, double delta,
                               const std::optional<FieldExpr>& q0_override,
                               const ObservationOptions& options = {});

}  // namespace subdiff
