#include "translev/hermite_rep.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "translev/errors.hpp"

namespace translev {

HermiteRep::HermiteRep(std::shared_ptr<const Basis> basis, Eigen::VectorXd coeffs, double p_tag)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), p_tag_(p_tag) {
  if (!basis_) throw_invalid("HermiteRep: null basis");
  if (static_cast<std::size_t>(coeffs_.size()) != basis_->size()) {
    throw_invalid("HermiteRep: coefficient vector length must equal C(N+d,d)");
  }
  if (!coeffs_.allFinite()) throw_invalid("HermiteRep: coefficients must be finite");
}

HermiteRep HermiteRep::zero(std::shared_ptr<const Basis> basis, double p_tag) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  return HermiteRep(std::move(basis), std::move(c), p_tag);
}

HermiteRep HermiteRep::basis_function(std::shared_ptr<const Basis> basis, const MultiIndex& n,
                                      double p_tag) {
  const std::ptrdiff_t k = basis->find(n);
  if (k < 0) throw_invalid("HermiteRep::basis_function: multi-index outside truncation");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  c[static_cast<Eigen::Index>(k)] = 1.0;
  return HermiteRep(std::move(basis), std::move(c), p_tag);
}

HermiteRep HermiteRep::delta_at(std::shared_ptr<const Basis> basis, std::span<const double> x0,
                                double p_tag) {
  if (static_cast<int>(x0.size()) != basis->dim()) {
    throw_invalid("HermiteRep::delta_at: dimension mismatch");
  }
  const int d = basis->dim();
  const int N = basis->max_degree();
  std::vector<std::vector<double>> axis_values(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) axis_values[static_cast<std::size_t>(i)] = hermite_values(N, x0[i]);
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t k = 0; k < basis->size(); ++k) {
    const MultiIndex& n = basis->index(k);
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
      prod *= axis_values[static_cast<std::size_t>(i)][static_cast<std::size_t>(n.entries[i])];
    }
    c[static_cast<Eigen::Index>(k)] = prod;
  }
  return HermiteRep(std::move(basis), std::move(c), p_tag);
}

Eigen::ArrayXd weight_array(const Basis& basis, double two_p_exponent) {
  Eigen::ArrayXd w(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = std::pow(basis.weight(k), two_p_exponent);
  }
  return w;
}

double inner_p(const HermiteRep& f, const HermiteRep& g, double p) {
  if (!f.same_shape(g)) throw_invalid("inner_p: shape mismatch");
  if (p == 0.0) return f.coeffs().dot(g.coeffs());
  const Eigen::ArrayXd w = weight_array(*f.basis(), 2.0 * p);
  return (f.coeffs().array() * g.coeffs().array() * w).sum();
}

double norm_p(const HermiteRep& f, double p) { return std::sqrt(inner_p(f, f, p)); }

double duality(const HermiteRep& u, const HermiteRep& phi) {
  if (!u.same_shape(phi)) throw_invalid("duality: shape mismatch");
  return u.coeffs().dot(phi.coeffs());
}

HermiteRep project(const std::function<double(std::span<const double>)>& f,
                   std::shared_ptr<const Basis> basis, int quad_order, double p_tag) {
  const int d = basis->dim();
  const int N = basis->max_degree();
  const QuadratureRule rule = gauss_hermite_rule(quad_order);
  const int Q = rule.order();

  // Tensor product of the 1-d rule; c_n = sum_q W_q f(x_q) prod_i
  // (scaled h)(x_q,i) e^{x_q,i^2 / 2}, the analytic e^{|x|^2} rewrite.
  std::vector<std::vector<double>> scaled(static_cast<std::size_t>(Q));
  std::vector<double> half_gauss(static_cast<std::size_t>(Q));
  for (int q = 0; q < Q; ++q) {
    scaled[static_cast<std::size_t>(q)] = hermite_values_scaled(N, rule.nodes[static_cast<std::size_t>(q)]);
    half_gauss[static_cast<std::size_t>(q)] =
        std::exp(rule.nodes[static_cast<std::size_t>(q)] * rule.nodes[static_cast<std::size_t>(q)] / 2.0);
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  std::vector<int> qidx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  while (true) {
    double wq = 1.0;
    double gauss_half = 1.0;
    for (int i = 0; i < d; ++i) {
      const int q = qidx[static_cast<std::size_t>(i)];
      x[static_cast<std::size_t>(i)] = rule.nodes[static_cast<std::size_t>(q)];
      wq *= rule.weights[static_cast<std::size_t>(q)];
      gauss_half *= half_gauss[static_cast<std::size_t>(q)];
    }
    const double fv = f(std::span<const double>(x.data(), x.size()));
    if (!std::isfinite(fv)) {
      std::ostringstream msg;
      msg << "project: non-finite evaluation at node (";
      for (int i = 0; i < d; ++i) msg << (i ? "," : "") << x[static_cast<std::size_t>(i)];
      msg << ")";
      throw_numeric(msg.str());
    }
    const double common = wq * fv * gauss_half;
    if (common != 0.0) {
      for (std::size_t k = 0; k < basis->size(); ++k) {
        const MultiIndex& n = basis->index(k);
        double hb = 1.0;
        for (int i = 0; i < d; ++i) {
          hb *= scaled[static_cast<std::size_t>(qidx[static_cast<std::size_t>(i)])]
                      [static_cast<std::size_t>(n.entries[i])];
        }
        c[static_cast<Eigen::Index>(k)] += common * hb;
      }
    }
    int axis = d - 1;
    while (axis >= 0 && ++qidx[static_cast<std::size_t>(axis)] == Q) {
      qidx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return HermiteRep(std::move(basis), std::move(c), p_tag);
}

double tail_mass(const HermiteRep& f, double p) {
  const Basis& basis = *f.basis();
  const int N = basis.max_degree();
  if (N < 2) throw_invalid("tail_mass: max_degree must be >= 2");
  double s = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const int deg = basis.degree_of(k);
    if (deg >= N - 1) {
      const double c = f.coeffs()[static_cast<Eigen::Index>(k)];
      s += std::pow(basis.weight(k), 2.0 * p) * c * c;
    }
  }
  return s;
}

void write_rep_json(const HermiteRep& f, std::ostream& os) {
  nlohmann::json j;
  j["d"] = f.dim();
  j["N"] = f.max_degree();
  j["p"] = f.p_tag();
  j["coeffs"] = std::vector<double>(f.coeffs().data(), f.coeffs().data() + f.coeffs().size());
  os << j.dump(2) << "\n";
}

HermiteRep read_rep_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_io(std::string("read_rep_json: ") + e.what());
  }
  const int d = j.at("d").get<int>();
  const int N = j.at("N").get<int>();
  const double p = j.at("p").get<double>();
  const auto values = j.at("coeffs").get<std::vector<double>>();
  auto basis = Basis::get(d, N);
  if (values.size() != basis->size()) throw_invalid("read_rep_json: wrong coefficient count");
  Eigen::VectorXd c(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) c[static_cast<Eigen::Index>(k)] = values[k];
  return HermiteRep(std::move(basis), std::move(c), p);
}

}  // namespace translev
