#pragma once

#include <optional>
#include <vector>

#include "subdiff/forward.hpp"
#include "subdiff/mesh.hpp"

namespace subdiff {

/// Terminal observation on the reconstruction mesh.
struct ObservationData {
  NodalField g_delta;         // noisy terminal state
  double delta = 0.0;         // nominal noise level
  NodalField boundary_trace;  // I_h^d b, read at boundary nodes only
  NodalField psi_boundary;    // q b - f on the boundary, read at boundary nodes only

  /// Throws InputError when fields are misaligned or g_delta does not
  /// match boundary_trace on the boundary; NumericalError when
  /// min g_delta < floor.
  void validate(const Mesh& mesh, double floor) const;
};

struct ReconstructionResult {
  NodalField q_star;
  std::size_t iterations = 0;
  std::vector<double> increments;                 // ||q_{k+1} - q_k||, k = 0..iterations-1
  std::optional<std::vector<double>> errors_vs_truth;  // ||q_k - I_h q_true||, k = 0..iterations
  /// Fraction of nodes with q_{k+1} > q_k + h, per iteration. Diagnostic only.
  std::vector<double> rising_fraction;
  bool converged = false;
};

struct ReconstructOptions {
  /// Exact potential, when known; enables errors_vs_truth.
  std::optional<FieldExpr> q_true;
  /// Replaces the default start P[(f + psi_h) / g_delta]; clamped before use.
  std::optional<FieldExpr> q0;
};

/// Discrete Laplacian of the data: (psi, phi) = -(grad I_h g, grad phi) for
/// interior test functions, with prescribed boundary values.
NodalField compute_psi_h(const Mesh& mesh, const NodalField& g_delta, const NodalField& psi_boundary,
                         double lin_tol = 1e-12);

/// Nodewise max(min(M1, a), 0).
NodalField clamp_potential(NodalField field, double M1);

/// Nodewise P_[0,M1]((f - deriv + psi_h) / g).
NodalField potential_update(const NodalField& f, const NodalField& deriv, const NodalField& psi_h,
                            const NodalField& g, double M1);

/// K q = P_[0,M1]((f - D^alpha u_h^N(q) + psi_h) / g_delta), nodewise.
NodalField apply_K(const ForwardSolver& solver, const NodalField& q, const ObservationData& obs,
                   const NodalField& psi_h);
NodalField apply_K(const ProblemSpec& spec, const NodalField& q, const ObservationData& obs,
                   const NodalField& psi_h);

/// Default starting point P_[0,M1]((f + psi_h) / g_delta).
NodalField initial_guess(const ForwardSolver& solver, const ObservationData& obs, const NodalField& psi_h);

/// Fixed-point iteration q_{k+1} = K q_k until ||q_{k+1} - q_k||_{L2} <= fp_tol
/// or max_iter iterations. Non-convergence is flagged, not thrown.
ReconstructionResult reconstruct(const ProblemSpec& spec, const ObservationData& obs,
                                 const ReconstructOptions& options = {});

}  // namespace subdiff
