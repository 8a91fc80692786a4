#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/forward.hpp"

using namespace subdiff;
using namespace testing_support;

namespace {

ProblemSpec unit_interval(double alpha, double T, int cells, std::size_t steps, const char* v,
                          const char* b = "0", const char* f = "0") {
  ProblemSpec s;
  s.alpha = alpha;
  s.T = T;
  s.num_steps = steps;
  s.mesh = build_mesh(Interval{0.0, 1.0}, cells);
  s.v = FieldExpr::parse(v);
  s.b = FieldExpr::parse(b);
  s.f = FieldExpr::parse(f);
  return s;
}

NodalField constant(const Mesh& m, double c) { return NodalField(m, c); }

}  // namespace

TEST_CASE("constant steady state is preserved in 1D and 2D") {
  // q = 1.5, u = 2 solves -u'' + q u = 3 with u = 2 on the boundary.
  for (int dim : {1, 2}) {
    ProblemSpec s = unit_interval(0.5, 1.0, 8, 20, "2", "2", "3");
    if (dim == 2) {
      const Interval box[2] = {{0.0, 1.0}, {0.0, 1.0}};
      s.mesh = build_mesh(box, 6);
    }
    const ForwardSolution sol = solve_forward(s, constant(s.mesh, 1.5), true);
    for (double u : sol.terminal.values) CHECK(std::abs(u - 2.0) <= 1e-10);
    for (double d : sol.frac_deriv_terminal.values) CHECK(std::abs(d) <= 1e-9);
    REQUIRE(sol.history.has_value());
    CHECK(sol.history->levels() == 21);
  }
}

TEST_CASE("alpha = 1, one step matches a dense backward-Euler solve") {
  const double tau = 0.1;
  ProblemSpec s = unit_interval(1.0, tau, 8, 1, "sin(pi*x)");
  const ForwardSolver solver(s);
  const NodalField q(s.mesh, 0.0);
  const ForwardSolution sol = solver.solve(q);

  const auto& interior = s.mesh.interior_nodes();
  const Dense M = to_dense(interior_block(s.mesh, solver.mass()));
  const Dense S = to_dense(interior_block(s.mesh, solver.stiffness()));
  const std::size_t n = interior.size();
  Dense A(n, std::vector<double>(n));
  std::vector<double> u0(n);
  for (std::size_t i = 0; i < n; ++i) {
    u0[i] = solver.initial().values[interior[i]];
    for (std::size_t j = 0; j < n; ++j) A[i][j] = M[i][j] / tau + S[i][j];
  }
  std::vector<double> rhs = dense_mul(M, u0);
  for (double& r : rhs) r /= tau;
  const std::vector<double> expect = dense_solve(A, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(sol.terminal.values[interior[i]] - expect[i]) <= 1e-10);
  CHECK(sol.terminal.values.front() == 0.0);
  CHECK(sol.terminal.values.back() == 0.0);
}

TEST_CASE("discrete eigenmodes decay by the scalar CQ recursion") {
  const int cells = 16;
  const double h = 1.0 / cells;
  for (double alpha : {1.0, 0.5}) {
    for (int k : {1, 3}) {
      const std::size_t N = 40;
      const double T = 0.2;
      const double tau = T / N;
      char v[64];
      std::snprintf(v, sizeof v, "sin(%d*pi*x)", k);
      ProblemSpec s = unit_interval(alpha, T, cells, N, v);
      const ForwardSolution sol = solve_forward(s, NodalField(s.mesh, 0.0));

      const double c = std::cos(k * std::numbers::pi * h);
      const double lambda = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
      // tau^-alpha sum_j b_j (a_{n-j} - a_0) + lambda a_n = 0
      const CQWeights w = cq_weights(alpha, N, tau);
      const double scale = std::pow(tau, -alpha);
      std::vector<double> a{1.0};
      for (std::size_t n = 1; n <= N; ++n) {
        double mem = 0.0;
        for (std::size_t j = 1; j <= n; ++j) mem += w.b[j] * (a[n - j] - 1.0);
        a.push_back((scale * (1.0 - mem)) / (scale + lambda));
      }
      const NodalField expected = interpolate_nodal(s.v.as_function(), s.mesh);
      for (std::size_t i = 0; i < expected.values.size(); ++i) {
        CHECK(std::abs(sol.terminal.values[i] - a[N] * expected.values[i]) <= 1e-8);
      }
      if (alpha == 1.0) {
        CHECK(a[N] == doctest::Approx(std::pow(1.0 + tau * lambda, -double(N))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("per-step residual is small and boundary values are exact") {
  const ProblemSpec s = reference_1d(0.5, 1.0, 50, 50);
  const ForwardSolver solver(s);
  const NodalField q = interpolate_nodal(FieldExpr::parse(kSmoothPotential).as_function(), s.mesh);
  const ForwardSolution sol = solver.solve(q, true);
  REQUIRE(sol.history.has_value());
  CHECK(solver.max_step_residual(q, *sol.history) <= 1e-10);
  for (std::size_t n = 0; n < sol.history->levels(); ++n) {
    const auto level = sol.history->level(n);
    for (std::size_t b : s.mesh.boundary_nodes()) CHECK(level[b] == 1.0);
  }
}

TEST_CASE("solution stays above the boundary value with a positive source") {
  const ProblemSpec s = reference_1d(0.5, 1.0, 100, 100);
  const NodalField q = interpolate_nodal(FieldExpr::parse(kSmoothPotential).as_function(), s.mesh);
  const ForwardSolution sol = solve_forward(s, q, true);
  for (std::size_t n = 0; n < sol.history->levels(); ++n) {
    for (double u : sol.history->level(n)) CHECK(u >= 0.9);
  }
}

TEST_CASE("forward solves are deterministic") {
  const ProblemSpec s = reference_1d(0.75, 1.0, 40, 30);
  const NodalField q = interpolate_nodal(FieldExpr::parse(kStepPotential).as_function(), s.mesh);
  const ForwardSolution a = solve_forward(s, q);
  const ForwardSolution b = solve_forward(s, q);
  CHECK(a.terminal.values == b.terminal.values);
  CHECK(a.frac_deriv_terminal.values == b.frac_deriv_terminal.values);
}

TEST_CASE("input validation") {
  ProblemSpec s = reference_1d(0.5, 1.0, 10, 10);
  const ForwardSolver solver(s);
  CHECK_THROWS_AS(solver.solve(NodalField(s.mesh, -0.1)), InputError);
  CHECK_THROWS_AS(solver.solve(NodalField(s.mesh, 5.5)), InputError);
  CHECK_NOTHROW(solver.solve(NodalField(s.mesh, 5.0)));
  const Mesh other = build_mesh(Interval{0.0, 10.0}, 12);
  CHECK_THROWS_AS(solver.solve(NodalField(other, 1.0)), InputError);

  ProblemSpec bad = s;
  bad.v = FieldExpr::parse("2");
  CHECK_THROWS_AS(ForwardSolver{bad}, InputError);
  bad = s;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(ForwardSolver{bad}, InputError);
  bad = s;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(ForwardSolver{bad}, InputError);
  bad = s;
  bad.T = -1.0;
  CHECK_THROWS_AS(ForwardSolver{bad}, InputError);
  bad = s;
  bad.num_steps = 0;
  CHECK_THROWS_AS(ForwardSolver{bad}, InputError);
}

TEST_CASE("restrict_to_mesh samples nested nodes") {
  const Mesh fine = build_mesh(Interval{0.0, 1.0}, 8);
  const Mesh coarse = build_mesh(Interval{0.0, 1.0}, 4);
  NodalField f(fine, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = double(i);
  const NodalField r = restrict_to_mesh(f, fine, coarse);
  CHECK(r.values == std::vector<double>{0, 2, 4, 6, 8});

  const Interval box[2] = {{0.0, 1.0}, {0.0, 1.0}};
  const Mesh fine2 = build_mesh(box, 4);
  const Mesh coarse2 = build_mesh(box, 2);
  NodalField g(fine2, 0.0);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = double(i);
  const NodalField r2 = restrict_to_mesh(g, fine2, coarse2);
  CHECK(r2.values == std::vector<double>{0, 2, 4, 10, 12, 14, 20, 22, 24});

  CHECK_THROWS_AS(restrict_to_mesh(f, fine, build_mesh(Interval{0.0, 1.0}, 3)), InputError);
  CHECK_THROWS_AS(restrict_to_mesh(f, fine, build_mesh(Interval{0.0, 2.0}, 4)), InputError);
  CHECK_THROWS_AS(restrict_to_mesh(f, fine, coarse2), InputError);
}
