#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "translev/errors.hpp"
#include "translev/hermite.hpp"

using namespace translev;

namespace {
// Independent 1-d quadrature oracle: composite Simpson on [-L, L].
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}
}  // namespace

TEST_CASE("hermite function values at frozen oracle points") {
  // h_0(0) = pi^{-1/4}
  CHECK(hermite_values(0, 0.0)[0] == doctest::Approx(0.75112554446494248).epsilon(1e-14));
  // h_1 is odd
  CHECK(hermite_values(1, 0.0)[1] == doctest::Approx(0.0));
  // h_1(1) = sqrt(2) pi^{-1/4} e^{-1/2}
  CHECK(hermite_values(1, 1.0)[1] == doctest::Approx(0.64428836511347518).epsilon(1e-14));
  // h_2(0) = -pi^{-1/4}/sqrt(2)
  CHECK(hermite_values(2, 0.0)[2] == doctest::Approx(-0.53112596601359846).epsilon(1e-14));
}

TEST_CASE("hermite recurrence relation holds") {
  const auto v = hermite_values(12, 0.7);
  for (int n = 1; n < 12; ++n) {
    const double expect = std::sqrt(2.0 / (n + 1)) * 0.7 * v[n] - std::sqrt(double(n) / (n + 1)) * v[n - 1];
    CHECK(v[n + 1] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("hermite values stay bounded for N=200, |t|<=20") {
  for (double t : {-20.0, -7.3, 0.0, 3.1, 20.0}) {
    const auto v = hermite_values(200, t);
    for (double x : v) {
      CHECK(std::isfinite(x));
      CHECK(std::abs(x) < 2.0);
    }
  }
}

TEST_CASE("hermite_values rejects non-finite input") {
  CHECK_THROWS_AS(hermite_values(3, std::nan("")), Error);
}

TEST_CASE("scaled values remove the Gaussian factor") {
  const auto scaled = hermite_values_scaled(8, 1.3);
  const auto plain = hermite_values(8, 1.3);
  const double gauss = std::exp(-1.3 * 1.3 / 2.0);
  for (int n = 0; n <= 8; ++n) {
    CHECK(plain[n] == doctest::Approx(scaled[n] * gauss).epsilon(1e-13));
  }
}

TEST_CASE("eval_hd is the tensor product") {
  // h_{(0,0)}(0,0) = pi^{-1/2}
  CHECK(eval_hd(MultiIndex{{0, 0}}, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(0.56418958354775629).epsilon(1e-14));
  // h_1(0) = 0 factor kills the product
  CHECK(eval_hd(MultiIndex{{1, 0}}, std::vector<double>{0.0, 3.7}) == doctest::Approx(0.0));
  CHECK(eval_hd(MultiIndex{{2}}, std::vector<double>{0.0}) ==
        doctest::Approx(-0.53112596601359846).epsilon(1e-13));
  CHECK_THROWS_AS(eval_hd(MultiIndex{{1, 2}}, std::vector<double>{0.0}), Error);
}

TEST_CASE("gauss-hermite rule: frozen low orders") {
  const auto r1 = gauss_hermite_rule(1);
  CHECK(r1.nodes[0] == doctest::Approx(0.0));
  CHECK(r1.weights[0] == doctest::Approx(1.772453850905516).epsilon(1e-14));  // sqrt(pi)

  const auto r2 = gauss_hermite_rule(2);
  CHECK(r2.nodes[1] == doctest::Approx(0.70710678118654752).epsilon(1e-13));
  CHECK(r2.nodes[0] == doctest::Approx(-0.70710678118654752).epsilon(1e-13));
  CHECK(r2.weights[0] == doctest::Approx(0.88622692545275801).epsilon(1e-13));  // sqrt(pi)/2
}

TEST_CASE("gauss-hermite rule: weights sum to sqrt(pi), moments exact") {
  for (int q : {1, 2, 5, 16, 40, 200}) {
    const auto rule = gauss_hermite_rule(q);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(s == doctest::Approx(1.772453850905516).epsilon(1e-12));
  }
  // Even Gaussian moments: int t^{2k} e^{-t^2} dt = sqrt(pi) (2k-1)!! / 2^k.
  const auto rule = gauss_hermite_rule(8);
  double moment = 1.772453850905516;  // k = 0
  for (int k = 1; k <= 7; ++k) {
    moment *= (2.0 * k - 1.0) / 2.0;
    double est = 0.0;
    for (int i = 0; i < rule.order(); ++i) {
      est += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
    }
    CHECK(est == doctest::Approx(moment).epsilon(1e-11));
  }
}

TEST_CASE("gauss-hermite order ceiling") {
  CHECK_THROWS_AS(gauss_hermite_rule(201), Error);
  CHECK_THROWS_AS(gauss_hermite_rule(0), Error);
}

TEST_CASE("orthonormality through the quadrature rewrite") {
  // For m, n <= N and Q >= N+1 the integrand (h_m h_n e^{t^2}) e^{-t^2} is
  // resolved exactly; compare with the Simpson oracle on one pair.
  const int n_max = 10;
  const auto rule = gauss_hermite_rule(n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    for (int n = m; n <= n_max; ++n) {
      double est = 0.0;
      for (int q = 0; q < rule.order(); ++q) {
        const auto v = hermite_values_scaled(n_max, rule.nodes[q]);
        est += rule.weights[q] * v[m] * v[n];
      }
      CHECK(est == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
  const double oracle = simpson([](double t) { return hermite_values(10, t)[3] * hermite_values(10, t)[3]; },
                                -12.0, 12.0, 4000);
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gauss-legendre rule integrates polynomials on [-1,1]") {
  const auto rule = gauss_legendre_rule(8);
  double s = 0.0;
  for (double w : rule.weights) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
  double est = 0.0;
  for (int i = 0; i < rule.order(); ++i) est += rule.weights[i] * std::pow(rule.nodes[i], 6);
  CHECK(est == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
}
