// Command-line driver: forward solves, reconstructions, rate sweeps and
// convergence histories. Exit codes: 0 success, 2 config/parse error,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "subdiff/errors.hpp"
#include "subdiff/experiments.hpp"
#include "subdiff/io.hpp"

namespace fs = std::filesystem;
using namespace subdiff;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> T;
  std::optional<double> delta;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON config file")->required();
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "RNG seed override");
  cmd->add_option("--alpha", flags.alpha, "fractional order override");
  cmd->add_option("--T", flags.T, "final time override");
  cmd->add_option("--delta", flags.delta, "noise level override");
}

RunConfig load(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags.config);
  if (flags.seed) cfg.spec.seed = *flags.seed;
  if (flags.alpha) cfg.spec.alpha = *flags.alpha;
  if (flags.T) cfg.spec.T = *flags.T;
  if (flags.delta) cfg.delta = *flags.delta;
  cfg.spec.validate();
  return cfg;
}

const FieldExpr& need_q_true(const RunConfig& cfg, const char* cmd) {
  if (!cfg.q_true) throw InputError(std::string(cmd) + ": config needs fields.q_true");
  return *cfg.q_true;
}

int run_forward(const CommonFlags& flags, bool observe) {
  const RunConfig cfg = load(flags);
  const Mesh& mesh = cfg.spec.mesh;
  const NodalField q = cfg.q_true ? interpolate_nodal(cfg.q_true->as_function(), mesh) : NodalField(mesh, 0.0);
  const ForwardSolution sol = solve_forward(cfg.spec, q);
  const fs::path out(flags.out);
  write_field_csv(out / "terminal.csv", sol.terminal, mesh);
  write_field_csv(out / "frac_deriv.csv", sol.frac_deriv_terminal, mesh);
  if (observe) {
    const ObservationData obs =
        make_observation(cfg.spec, need_q_true(cfg, "forward --observe"), cfg.observation, cfg.delta, cfg.spec.seed);
    write_field_csv(out / "observation.csv", obs.g_delta, mesh);
  }
  std::cout << "forward: " << mesh.num_nodes() << " nodes, " << cfg.spec.num_steps << " steps, wrote "
            << (out / "terminal.csv").string() << '\n';
  return 0;
}

int run_invert(const CommonFlags& flags, const std::string& data_path) {
  const RunConfig cfg = load(flags);
  const Mesh& mesh = cfg.spec.mesh;
  const FieldExpr* qb = cfg.q_boundary ? &*cfg.q_boundary : (cfg.q_true ? &*cfg.q_true : nullptr);
  if (!qb) throw InputError("invert: config needs fields.q_boundary or fields.q_true for the boundary potential");

  ObservationData obs;
  obs.delta = cfg.delta;
  obs.g_delta = read_field_csv(data_path, mesh);
  obs.boundary_trace = interpolate_boundary(cfg.spec.b.as_function(), mesh);
  obs.psi_boundary = NodalField(mesh);
  for (std::size_t k : mesh.boundary_nodes()) {
    const Point p = mesh.node(k);
    const double bk = obs.boundary_trace[k];
    if (std::abs(obs.g_delta[k] - bk) > 1e-12 * std::max(1.0, std::abs(bk))) {
      throw InputError("invert: data at boundary node " + std::to_string(k) + " does not match b");
    }
    obs.g_delta[k] = bk;
    obs.psi_boundary[k] = (*qb)(p) * cfg.spec.b(p) - cfg.spec.f(p);
  }

  const ReconstructionResult res = reconstruct(cfg.spec, obs, {cfg.q_true, cfg.q0});
  const fs::path out(flags.out);
  write_field_csv(out / "q_star.csv", res.q_star, mesh);
  std::vector<HistoryRow> rows;
  for (std::size_t k = 0; k <= res.iterations; ++k) {
    const double ek = res.errors_vs_truth ? (*res.errors_vs_truth)[k] : std::nan("");
    rows.push_back({k, ek, k == 0 ? std::nan("") : res.increments[k - 1]});
  }
  write_history_csv(out / "history.csv", rows);
  std::cout << "invert: " << res.iterations << " iterations, "
            << (res.converged ? "converged" : "NOT converged");
  if (cfg.q_true) std::cout << ", e_q = " << format_real(relative_error(res.q_star, *cfg.q_true, mesh));
  std::cout << '\n';
  return res.converged ? 0 : kExitNumerical;
}

int run_sweep(const CommonFlags& flags) {
  const RunConfig cfg = load(flags);
  SweepConfig sc;
  sc.base = cfg.spec;
  sc.q_true = need_q_true(cfg, "sweep");
  sc.deltas = cfg.deltas.empty() ? std::vector<double>{cfg.delta} : cfg.deltas;
  sc.alphas = cfg.alphas.empty() || flags.alpha ? std::vector<double>{cfg.spec.alpha} : cfg.alphas;
  sc.fine_factor = cfg.observation.fine_factor;
  sc.fine_time_factor = cfg.fine_time_factor;
  sc.ref_h = cfg.ref_h;
  sc.ref_tau = cfg.ref_tau;
  const RateTable table = rate_sweep(sc);
  write_sweep_csv(fs::path(flags.out) / "sweep.csv", table);
  bool failed = false;
  for (const auto& r : table.rows) {
    if (r.failed) {
      failed = true;
      std::cerr << "sweep: alpha=" << r.alpha << " delta=" << r.delta << " failed: " << r.message << '\n';
    }
  }
  for (std::size_t i = 0; i < table.alphas.size(); ++i) {
    std::cout << "alpha=" << table.alphas[i] << " slope=" << format_real(table.slopes[i]) << '\n';
  }
  return failed ? kExitNumerical : 0;
}

int run_history(const CommonFlags& flags) {
  const RunConfig cfg = load(flags);
  const HistoryRun run =
      convergence_history(cfg.spec, need_q_true(cfg, "history"), cfg.delta, cfg.q0, cfg.observation);
  const fs::path out(flags.out);
  write_history_csv(out / "history.csv", run.rows);
  write_field_csv(out / "q_star.csv", run.result.q_star, cfg.spec.mesh);
  std::cout << "history: " << run.result.iterations << " iterations, final e_k = "
            << format_real(run.rows.back().e_k) << '\n';
  return run.result.converged ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional diffusion forward solver and potential reconstruction"};
  app.require_subcommand(1);

  CommonFlags fwd_flags, inv_flags, sweep_flags, hist_flags;
  bool observe = false;
  std::string data_path;

  auto* fwd = app.add_subcommand("forward", "solve and dump the terminal field");
  add_common(fwd, fwd_flags);
  fwd->add_flag("--observe", observe, "also write synthetic noisy data (observation.csv)");

  auto* inv = app.add_subcommand("invert", "reconstruct the potential from a data file");
  add_common(inv, inv_flags);
  inv->add_option("--data", data_path, "terminal data (field dump CSV)")->required();

  auto* sweep = app.add_subcommand("sweep", "error-versus-noise rate table");
  add_common(sweep, sweep_flags);

  auto* hist = app.add_subcommand("history", "per-iteration reconstruction errors");
  add_common(hist, hist_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*fwd) return run_forward(fwd_flags, observe);
    if (*inv) return run_invert(inv_flags, data_path);
    if (*sweep) return run_sweep(sweep_flags);
    if (*hist) return run_history(hist_flags);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
