#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "subdiff/experiments.hpp"
#include "subdiff/forward.hpp"

namespace subdiff {

/// Everything a CLI run needs, read from a JSON config:
///
///   { "alpha": 0.5, "T": 1, "num_steps": 100,
///     "domain": {"dim": 1, "a": 0, "b": 10, "cells": 100},
///     "fields": {"v": "...", "b": "1", "f": "10", "q_true": "..."},
///     "M1": 5, "delta": 1e-3, "seed": 1, "tol": 1e-10, "max_iter": 50000,
///     "fine_factor": 10 }
///
/// Optional keys: fields.q0, fields.q_boundary, fine_steps, fine_time_factor,
/// ref_h, ref_tau, alphas, deltas, lin_tol, M2_floor.
struct RunConfig {
  ProblemSpec spec;
  std::optional<FieldExpr> q_true;
  std::optional<FieldExpr> q0;
  std::optional<FieldExpr> q_boundary;
  double delta = 0.0;
  ObservationOptions observation;
  std::size_t fine_time_factor = 1;
  double ref_h = 0.0;
  double ref_tau = 0.0;
  std::vector<double> alphas;
  std::vector<double> deltas;
};

/// Throws InputError (or ExprError) on any malformed or missing entry.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// "%.17g"
std::string format_real(double v);

/// node_index,x[,y],value
void write_field_csv(const std::filesystem::path& path, const NodalField& field, const Mesh& mesh);
/// Reads a field dump; node count and coordinates (to 1e-9 relative) must
/// match the mesh.
NodalField read_field_csv(const std::filesystem::path& path, const Mesh& mesh);

/// delta,h,tau,alpha,e_q,iterations,runtime_s
void write_sweep_csv(const std::filesystem::path& path, const RateTable& table);
/// k,e_k,increment
void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& rows);

}  // namespace subdiff
