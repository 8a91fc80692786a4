#include "subdiff/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("config: missing key '") + key + "'");
  return get_or<T>(j, key, T{});
}

FieldExpr field(const json& fields, const char* key) {
  const auto text = require<std::string>(fields, key);
  try {
    return FieldExpr::parse(text);
  } catch (const ExprError& e) {
    throw ExprError(std::string("config: fields.") + key + ": " + e.what(), e.offset());
  }
}

std::optional<FieldExpr> optional_field(const json& fields, const char* key) {
  if (!fields.contains(key)) return std::nullopt;
  return field(fields, key);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config: top level must be an object");

  RunConfig cfg;
  ProblemSpec& s = cfg.spec;
  s.alpha = require<double>(j, "alpha");
  s.T = require<double>(j, "T");
  s.num_steps = require<std::size_t>(j, "num_steps");

  if (!j.contains("domain") || !j["domain"].is_object()) throw InputError("config: missing object 'domain'");
  const json& dom = j["domain"];
  const int dim = require<int>(dom, "dim");
  const Interval iv{require<double>(dom, "a"), require<double>(dom, "b")};
  const int cells = require<int>(dom, "cells");
  if (dim == 1) {
    s.mesh = build_mesh(iv, cells);
  } else if (dim == 2) {
    const std::vector<Interval> b2{iv, iv};
    s.mesh = build_mesh(b2, cells);
  } else {
    throw InputError("config: domain.dim must be 1 or 2");
  }

  if (!j.contains("fields") || !j["fields"].is_object()) throw InputError("config: missing object 'fields'");
  const json& fields = j["fields"];
  s.v = field(fields, "v");
  s.b = field(fields, "b");
  s.f = field(fields, "f");
  cfg.q_true = optional_field(fields, "q_true");
  cfg.q0 = optional_field(fields, "q0");
  cfg.q_boundary = optional_field(fields, "q_boundary");

  s.M1 = get_or<double>(j, "M1", s.M1);
  s.M2_floor = get_or<double>(j, "M2_floor", s.M2_floor);
  s.lin_tol = get_or<double>(j, "lin_tol", s.lin_tol);
  s.fp_tol = get_or<double>(j, "tol", s.fp_tol);
  s.max_iter = get_or<std::size_t>(j, "max_iter", s.max_iter);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);

  cfg.delta = get_or<double>(j, "delta", 0.0);
  cfg.observation.fine_factor = get_or<std::size_t>(j, "fine_factor", 1);
  cfg.observation.fine_steps = get_or<std::size_t>(j, "fine_steps", 0);
  cfg.fine_time_factor = get_or<std::size_t>(j, "fine_time_factor", 1);
  cfg.ref_h = get_or<double>(j, "ref_h", 0.0);
  cfg.ref_tau = get_or<double>(j, "ref_tau", 0.0);
  cfg.alphas = get_or<std::vector<double>>(j, "alphas", {});
  cfg.deltas = get_or<std::vector<double>>(j, "deltas", {});

  s.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const NodalField& field, const Mesh& mesh) {
  require_aligned(field, mesh, "write_field_csv");
  auto out = open_out(path);
  out << (mesh.dim() == 1 ? "node_index,x,value\n" : "node_index,x,y,value\n");
  for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
    const Point p = mesh.node(k);
    out << k << ',' << format_real(p.x) << ',';
    if (mesh.dim() == 2) out << format_real(p.y) << ',';
    out << format_real(field[k]) << '\n';
  }
}

NodalField read_field_csv(const std::filesystem::path& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file " + path.string());
  std::string line;
  std::getline(in, line);
  const std::size_t expected_cols = mesh.dim() == 1 ? 3 : 4;
  NodalField field(mesh);
  std::vector<char> seen(mesh.num_nodes(), 0);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cols.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (cols.size() != expected_cols) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expected_cols) + " columns");
    }
    const auto k = static_cast<std::size_t>(cols[0]);
    if (cols[0] < 0 || k >= mesh.num_nodes() || static_cast<double>(k) != cols[0]) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad node index");
    }
    const Point p = mesh.node(k);
    const double scale = std::max(1.0, std::abs(mesh.bounds(0).hi));
    if (std::abs(cols[1] - p.x) > 1e-9 * scale || (mesh.dim() == 2 && std::abs(cols[2] - p.y) > 1e-9 * scale)) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": node coordinates do not match the mesh");
    }
    field[k] = cols.back();
    seen[k] = 1;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw InputError(path.string() + ": missing value for node " + std::to_string(k));
  }
  return field;
}

void write_sweep_csv(const std::filesystem::path& path, const RateTable& table) {
  auto out = open_out(path);
  out << "delta,h,tau,alpha,e_q,iterations,runtime_s\n";
  for (const auto& r : table.rows) {
    out << format_real(r.delta) << ',' << format_real(r.h) << ',' << format_real(r.tau) << ','
        << format_real(r.alpha) << ',' << (r.failed ? std::string("nan") : format_real(r.e_q)) << ','
        << r.iterations << ',' << format_real(r.runtime_s) << '\n';
  }
}

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRow>& rows) {
  auto out = open_out(path);
  out << "k,e_k,increment\n";
  for (const auto& r : rows) {
    out << r.k << ',' << format_real(r.e_k) << ',' << format_real(r.increment) << '\n';
  }
}

}  // namespace subdiff
