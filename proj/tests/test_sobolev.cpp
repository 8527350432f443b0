#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "translev/errors.hpp"
#include "translev/hermite_rep.hpp"

using namespace translev;

namespace {

HermiteRep random_rep(std::shared_ptr<const Basis> basis, unsigned seed, double p = 0.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis->size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(gen);
  return HermiteRep(basis, c, p);
}

}  // namespace

TEST_CASE("inner_p on frozen examples") {
  auto basis = Basis::get(1, 8);
  const HermiteRep h2 = HermiteRep::basis_function(basis, MultiIndex{{2}});
  CHECK(inner_p(h2, h2, 1.0) == doctest::Approx(25.0).epsilon(1e-14));

  const HermiteRep f = random_rep(basis, 11);
  CHECK(inner_p(f, f, 0.0) == doctest::Approx(f.coeffs().squaredNorm()).epsilon(1e-14));

  // d=1, f = h0 + h1, g = h0 - h1, p = -1: 1 - 1/9 (hand-check oracle).
  Eigen::VectorXd cf = Eigen::VectorXd::Zero(9), cg = Eigen::VectorXd::Zero(9);
  cf[0] = 1.0; cf[1] = 1.0;
  cg[0] = 1.0; cg[1] = -1.0;
  CHECK(inner_p(HermiteRep(basis, cf), HermiteRep(basis, cg), -1.0) ==
        doctest::Approx(1.0 - 1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("norm_p examples and monotonicity in p") {
  auto basis = Basis::get(1, 8);
  const HermiteRep h2 = HermiteRep::basis_function(basis, MultiIndex{{2}});
  CHECK(norm_p(h2, 1.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(norm_p(HermiteRep::zero(basis), 2.3) == 0.0);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(9);
  c[0] = 1.0; c[3] = 1.0;
  const HermiteRep f(basis, c);
  CHECK(norm_p(f, -1.0) <= norm_p(f, 0.0));
  CHECK(norm_p(f, 0.0) <= norm_p(f, 1.0));

  // Property: monotone over random reps and a ladder of p values.
  const HermiteRep g = random_rep(basis, 5);
  double prev = norm_p(g, -2.0);
  for (double p : {-1.0, -0.5, 0.0, 0.75, 2.0}) {
    const double cur = norm_p(g, p);
    CHECK(prev <= cur * (1.0 + 1e-13));
    prev = cur;
  }
}

TEST_CASE("duality pairing") {
  auto basis = Basis::get(1, 5);
  const HermiteRep h1 = HermiteRep::basis_function(basis, MultiIndex{{1}});
  const HermiteRep h3 = HermiteRep::basis_function(basis, MultiIndex{{3}});
  CHECK(duality(h1, h3) == 0.0);
  CHECK(duality(h1, h1) == 1.0);

  Eigen::VectorXd cu = Eigen::VectorXd::Zero(6), cp = Eigen::VectorXd::Zero(6);
  cu[0] = 1.0; cu[1] = 2.0;
  cp[0] = 3.0; cp[1] = -1.0;
  CHECK(duality(HermiteRep(basis, cu), HermiteRep(basis, cp)) == doctest::Approx(1.0));
}

TEST_CASE("duality Cauchy-Schwarz and reweighting identity") {
  auto basis = Basis::get(2, 6);
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const HermiteRep u = random_rep(basis, seed);
    const HermiteRep phi = random_rep(basis, seed + 100);
    for (double p : {-1.5, 0.5, 1.0}) {
      CHECK(std::abs(duality(u, phi)) <= norm_p(u, -p) * norm_p(phi, p) * (1.0 + 1e-12));
      // duality(u, phi) = <W^{-p} u, W^{p} phi>_0
      Eigen::ArrayXd w = weight_array(*basis, p);
      const HermiteRep wu(basis, (u.coeffs().array() / w).matrix().eval());
      const HermiteRep wp(basis, (phi.coeffs().array() * w).matrix().eval());
      CHECK(duality(u, phi) ==
            doctest::Approx(inner_p(wu, wp, 0.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("project recovers finite Hermite sums") {
  auto basis = Basis::get(1, 6);
  const auto f3 = [](std::span<const double> x) { return eval_hd(MultiIndex{{3}}, x); };
  const HermiteRep proj = project(f3, basis, 8);
  for (std::size_t k = 0; k < basis->size(); ++k) {
    CHECK(proj.coeffs()[static_cast<Eigen::Index>(k)] ==
          doctest::Approx(k == 3 ? 1.0 : 0.0).epsilon(1e-10));
  }

  const HermiteRep zero = project([](std::span<const double>) { return 0.0; }, basis, 8);
  CHECK(zero.coeffs().isZero(0.0));

  // Identity on random finite sums when Q >= N+1 (property).
  const HermiteRep g = random_rep(basis, 3);
  const auto g_fun = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.basis()->size(); ++k) {
      s += g.coeffs()[static_cast<Eigen::Index>(k)] * eval_hd(g.basis()->index(k), x);
    }
    return s;
  };
  const HermiteRep gp = project(g_fun, basis, 7);
  CHECK((gp.coeffs() - g.coeffs()).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("project the plain Gaussian: c_0 = pi^{1/4}, odd coefficients vanish") {
  auto basis = Basis::get(1, 10);
  const HermiteRep proj = project(
      [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2.0); }, basis, 24);
  CHECK(proj.coeffs()[0] == doctest::Approx(1.3313353638003897).epsilon(1e-12));
  for (int n = 1; n <= 10; n += 2) CHECK(std::abs(proj.coeffs()[n]) < 1e-12);
  // e^{-t^2/2} is exactly pi^{1/4} h_0.
  for (int n = 2; n <= 10; n += 2) CHECK(std::abs(proj.coeffs()[n]) < 1e-10);
}

TEST_CASE("project in two dimensions") {
  auto basis = Basis::get(2, 4);
  const auto f = [](std::span<const double> x) {
    return eval_hd(MultiIndex{{1, 2}}, x);
  };
  const HermiteRep proj = project(f, basis, 8);
  const std::ptrdiff_t k12 = basis->find(MultiIndex{{1, 2}});
  for (std::size_t k = 0; k < basis->size(); ++k) {
    const double expect = (static_cast<std::ptrdiff_t>(k) == k12) ? 1.0 : 0.0;
    CHECK(proj.coeffs()[static_cast<Eigen::Index>(k)] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("project reports the offending node") {
  auto basis = Basis::get(1, 4);
  CHECK_THROWS_AS(project([](std::span<const double> x) { return 1.0 / (x[0] - x[0]); }, basis, 6),
                  Error);
}

TEST_CASE("tail_mass") {
  auto basis = Basis::get(1, 6);
  CHECK(tail_mass(HermiteRep::basis_function(basis, MultiIndex{{0}}), 1.0) == 0.0);

  // Only top-shell coefficients: tail equals the full weighted mass.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(7);
  c[5] = 0.7; c[6] = -0.2;
  const HermiteRep top(basis, c);
  for (double p : {-1.0, 0.0, 2.0}) {
    CHECK(tail_mass(top, p) == doctest::Approx(inner_p(top, top, p)).epsilon(1e-14));
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(7);
  c2[0] = 1.0; c2[6] = 1.0;
  CHECK(tail_mass(HermiteRep(basis, c2), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("delta constructor matches pointwise Hermite values") {
  auto basis = Basis::get(2, 5);
  const std::vector<double> x0{0.3, -1.1};
  const HermiteRep delta = HermiteRep::delta_at(basis, x0, -1.5);
  for (std::size_t k = 0; k < basis->size(); ++k) {
    CHECK(delta.coeffs()[static_cast<Eigen::Index>(k)] ==
          doctest::Approx(eval_hd(basis->index(k), x0)).epsilon(1e-13));
  }
  CHECK(delta.p_tag() == -1.5);
  // duality(delta_{x0}, phi) reproduces phi(x0) for truncated phi.
  const HermiteRep h2 = HermiteRep::basis_function(basis, MultiIndex{{2, 0}});
  CHECK(duality(delta, h2) == doctest::Approx(eval_hd(MultiIndex{{2, 0}}, x0)).epsilon(1e-13));
}

TEST_CASE("json round trip is bit exact") {
  auto basis = Basis::get(2, 4);
  const HermiteRep f = random_rep(basis, 42, -1.5);
  std::stringstream ss;
  write_rep_json(f, ss);
  const HermiteRep g = read_rep_json(ss);
  CHECK(g.dim() == f.dim());
  CHECK(g.max_degree() == f.max_degree());
  CHECK(g.p_tag() == f.p_tag());
  CHECK(g.coeffs() == f.coeffs());
}

TEST_CASE("shape and finiteness validation") {
  auto b1 = Basis::get(1, 4);
  auto b2 = Basis::get(1, 5);
  const HermiteRep f = HermiteRep::zero(b1);
  const HermiteRep g = HermiteRep::zero(b2);
  CHECK_THROWS_AS(inner_p(f, g, 0.0), Error);
  CHECK_THROWS_AS(duality(f, g), Error);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(5);
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermiteRep(b1, bad), Error);
  CHECK_THROWS_AS(HermiteRep(b1, Eigen::VectorXd::Zero(4)), Error);
}
