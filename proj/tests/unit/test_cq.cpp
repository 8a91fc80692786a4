#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdiff/cq.hpp"
#include "subdiff/errors.hpp"

using namespace subdiff;

namespace {

// b_j = (-1)^j Gamma(alpha+1) / (Gamma(alpha-j+1) Gamma(j+1)), evaluated with the
// reflection formula Gamma(alpha-j+1) Gamma(j-alpha) = pi / sin(pi (alpha-j+1))
// so that large j stays finite.
double gamma_formula_weight(double alpha, std::size_t j) {
  if (j == 0) return 1.0;
  const double dj = static_cast<double>(j);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  const double s = std::sin(std::numbers::pi * (alpha - dj + 1.0));
  const double mag = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(dj - alpha) - std::lgamma(dj + 1.0));
  return sign * s * mag / std::numbers::pi;
}

}  // namespace

TEST_CASE("cq_weights: examples") {
  CHECK(cq_weights(1.0, 3).b == std::vector<double>{1.0, -1.0, 0.0, 0.0});
  CHECK(cq_weights(0.5, 3).b == std::vector<double>{1.0, -0.5, -0.125, -0.0625});
  CHECK(cq_weights(0.25, 1).b == std::vector<double>{1.0, -0.25});
}

TEST_CASE("cq_weights: rejects bad parameters") {
  CHECK_THROWS_AS(cq_weights(0.0, 3), InputError);
  CHECK_THROWS_AS(cq_weights(1.5, 3), InputError);
  CHECK_THROWS_AS(cq_weights(0.5, 0), InputError);
  CHECK_THROWS_AS(cq_weights(0.5, 3, -1.0), InputError);
}

TEST_CASE("cq_weights: recurrence matches the Gamma formula") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto w = cq_weights(alpha, 1000);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 1000; ++j) worst = std::max(worst, std::abs(w.b[j] - gamma_formula_weight(alpha, j)));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("cq_weights: sign pattern and monotone positive partial sums") {
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9, 0.999}) {
    for (std::size_t N : {1u, 2u, 10u, 500u}) {
      const auto w = cq_weights(alpha, N);
      CHECK(w.b[0] == 1.0);
      double partial = 1.0;
      for (std::size_t j = 1; j <= N; ++j) {
        CHECK(w.b[j] < 0.0);
        const double next = partial + w.b[j];
        CHECK(next > 0.0);
        CHECK(next <= partial);
        partial = next;
      }
    }
  }
  const auto w1 = cq_weights(1.0, 50);
  for (std::size_t j = 2; j <= 50; ++j) CHECK(w1.b[j] == 0.0);
}

TEST_CASE("discrete_caputo: constant history vanishes") {
  History h(3);
  for (int j = 0; j < 6; ++j) h.push(std::vector<double>{2.0, -1.0, 0.5});
  const auto w = cq_weights(0.6, 5, 0.1);
  for (std::size_t n = 0; n <= 5; ++n)
    for (double v : discrete_caputo(h, w, n)) CHECK(v == 0.0);
}

TEST_CASE("discrete_caputo: alpha = 1 is the backward difference") {
  const double tau = 0.25;
  const auto w = cq_weights(1.0, 8, tau);
  History h(2);
  for (int j = 0; j <= 8; ++j) h.push(std::vector<double>{j * tau, std::sin(0.3 * j)});
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto d = discrete_caputo(h, w, n);
    CHECK(d[0] == 1.0);
    CHECK(d[1] == doctest::Approx((std::sin(0.3 * n) - std::sin(0.3 * (n - 1))) / tau).epsilon(1e-13));
  }
}

TEST_CASE("discrete_caputo: hand convolution for alpha = 1/2") {
  const auto w = cq_weights(0.5, 2, 1.0);
  History h(1);
  for (double u : {0.0, 1.0, 2.0}) h.push(std::vector<double>{u});
  CHECK(discrete_caputo(h, w, 2)[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(discrete_caputo(h, w, 1)[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete_caputo: insufficient history is rejected") {
  History h(1);
  h.push(std::vector<double>{0.0});
  CHECK_THROWS_AS(discrete_caputo(h, cq_weights(0.5, 4), 2), InputError);
}

TEST_CASE("cq_memory: parallel and serial kernels agree bitwise") {
  const std::size_t nodes = 1500, N = 40;
  const auto w = cq_weights(0.37, N, 0.01);
  History h(nodes, N + 1);
  std::vector<double> level(nodes);
  for (std::size_t j = 0; j <= N; ++j) {
    for (std::size_t i = 0; i < nodes; ++i) level[i] = std::cos(0.01 * static_cast<double>(i * (j + 1)));
    h.push(level);
  }
  std::vector<double> a(nodes), b(nodes);
  for (std::size_t n : {1u, 17u, 40u}) {
    cq_memory(w, h, n, a);
    cq_memory_serial(w, h, n, b);
    CHECK(a == b);
  }
}
