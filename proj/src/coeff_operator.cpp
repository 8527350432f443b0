#include "translev/coeff_operator.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <unordered_map>

#include "translev/errors.hpp"

namespace translev {

CoeffOperator::CoeffOperator(std::shared_ptr<const Basis> basis, Eigen::SparseMatrix<double> m)
    : basis_(std::move(basis)), matrix_(std::move(m)) {
  if (!basis_) throw_invalid("CoeffOperator: null basis");
  const auto n = static_cast<Eigen::Index>(basis_->size());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw_invalid("CoeffOperator: matrix shape must match the basis");
  }
}

HermiteRep CoeffOperator::apply(const HermiteRep& f) const {
  if (f.basis().get() != basis_.get() &&
      !(f.dim() == basis_->dim() && f.max_degree() == basis_->max_degree())) {
    throw_invalid("CoeffOperator::apply: shape mismatch");
  }
  return HermiteRep(f.basis(), matrix_ * f.coeffs(), f.p_tag());
}

CoeffOperator CoeffOperator::compose(const CoeffOperator& other) const {
  Eigen::SparseMatrix<double> m = matrix_ * other.matrix_;
  return CoeffOperator(basis_, std::move(m));
}

CoeffOperator CoeffOperator::transpose() const {
  Eigen::SparseMatrix<double> m = matrix_.transpose();
  return CoeffOperator(basis_, std::move(m));
}

CoeffOperator CoeffOperator::scaled(double a) const {
  Eigen::SparseMatrix<double> m = matrix_ * a;
  return CoeffOperator(basis_, std::move(m));
}

CoeffOperator CoeffOperator::plus(const CoeffOperator& other) const {
  Eigen::SparseMatrix<double> m = matrix_ + other.matrix_;
  return CoeffOperator(basis_, std::move(m));
}

CoeffOperator CoeffOperator::identity(std::shared_ptr<const Basis> basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setIdentity();
  return CoeffOperator(std::move(basis), std::move(m));
}

void CoeffOperator::write_coordinate_text(std::ostream& os) const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm(matrix_);
  char buf[64];
  for (Eigen::Index r = 0; r < rm.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, r); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      os << buf;
    }
  }
}

CoeffOperator derivative_op(int axis, std::shared_ptr<const Basis> basis) {
  const int d = basis->dim();
  if (axis < 0 || axis >= d) throw_invalid("derivative_op: axis out of range");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * basis->size());
  for (std::size_t m = 0; m < basis->size(); ++m) {
    const int mi = basis->index(m).entries[axis];
    const std::ptrdiff_t up = basis->neighbor(m, axis, +1);
    if (up >= 0) {
      trip.emplace_back(static_cast<int>(m), static_cast<int>(up), std::sqrt((mi + 1) / 2.0));
    }
    const std::ptrdiff_t down = basis->neighbor(m, axis, -1);
    if (down >= 0) {
      trip.emplace_back(static_cast<int>(m), static_cast<int>(down), -std::sqrt(mi / 2.0));
    }
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::SparseMatrix<double> mat(n, n);
  mat.setFromTriplets(trip.begin(), trip.end());
  return CoeffOperator(std::move(basis), std::move(mat));
}

CoeffOperator adjoint_in_p(const CoeffOperator& op, double p) {
  if (p == 0.0) return op.transpose();
  const Basis& basis = *op.basis();
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::SparseMatrix<double> t = op.matrix().transpose();
  // W^{-2p} O^T W^{2p} entrywise: scale row m by w_m^{-2p}, column k by w_k^{2p}.
  for (Eigen::Index c = 0; c < t.outerSize(); ++c) {
    const double colw = std::pow(basis.weight(static_cast<std::size_t>(c)), 2.0 * p);
    for (Eigen::SparseMatrix<double>::InnerIterator it(t, c); it; ++it) {
      const double roww = std::pow(basis.weight(static_cast<std::size_t>(it.row())), -2.0 * p);
      it.valueRef() *= roww * colw;
    }
  }
  (void)n;
  return CoeffOperator(op.basis(), std::move(t));
}

CoeffOperator adjoint_defect_op(int axis, std::shared_ptr<const Basis> basis, double p) {
  CoeffOperator d = derivative_op(axis, basis);
  return d.plus(adjoint_in_p(d, p));
}

namespace {

// 1-d factor matrix <tau_x h_n, h_m> for m, n <= N. With the substitution
// y = u + x/2 the integrand becomes (scaled h_n)(u - x/2) (scaled h_m)(u + x/2)
// e^{-x^2/4} e^{-u^2}, polynomial times the Gauss-Hermite weight.
Eigen::MatrixXd translation_factor(int max_degree, double x, int quad_order) {
  const int n1 = max_degree + 1;
  Eigen::MatrixXd t(n1, n1);
  if (x == 0.0) {
    t.setIdentity();
    return t;
  }
  const QuadratureRule rule = gauss_hermite_rule(quad_order);
  t.setZero();
  const double gauss = std::exp(-x * x / 4.0);
  for (int q = 0; q < rule.order(); ++q) {
    const double u = rule.nodes[static_cast<std::size_t>(q)];
    const double w = rule.weights[static_cast<std::size_t>(q)] * gauss;
    const std::vector<double> hn = hermite_values_scaled(max_degree, u - x / 2.0);
    const std::vector<double> hm = hermite_values_scaled(max_degree, u + x / 2.0);
    for (int m = 0; m < n1; ++m) {
      const double wm = w * hm[static_cast<std::size_t>(m)];
      for (int n = 0; n < n1; ++n) {
        t(m, n) += wm * hn[static_cast<std::size_t>(n)];
      }
    }
  }
  return t;
}

struct FactorKey {
  int max_degree;
  int quad_order;
  std::uint64_t x_bits;
  bool operator==(const FactorKey& o) const {
    return max_degree == o.max_degree && quad_order == o.quad_order && x_bits == o.x_bits;
  }
};

struct FactorKeyHash {
  std::size_t operator()(const FactorKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(k.max_degree));
    mix(static_cast<std::uint64_t>(k.quad_order));
    mix(k.x_bits);
    return static_cast<std::size_t>(h);
  }
};

// Per-thread factor cache, capped by total byte footprint. Values are pure
// functions of the key, so eviction only costs recomputation.
std::shared_ptr<const Eigen::MatrixXd> cached_factor(int max_degree, double x, int quad_order) {
  thread_local std::unordered_map<FactorKey, std::shared_ptr<const Eigen::MatrixXd>, FactorKeyHash>
      cache;
  thread_local std::size_t cached_bytes = 0;
  constexpr std::size_t kMaxBytes = 32u << 20;

  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  const FactorKey key{max_degree, quad_order, bits};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto mat = std::make_shared<const Eigen::MatrixXd>(translation_factor(max_degree, x, quad_order));
  const std::size_t bytes = static_cast<std::size_t>(mat->size()) * sizeof(double);
  if (cached_bytes + bytes > kMaxBytes) {
    cache.clear();
    cached_bytes = 0;
  }
  cache.emplace(key, mat);
  cached_bytes += bytes;
  return mat;
}

}  // namespace

TranslationOp::TranslationOp(std::shared_ptr<const Basis> basis, std::span<const double> x,
                             int quad_order)
    : basis_(std::move(basis)), quad_order_(quad_order) {
  if (static_cast<int>(x.size()) != basis_->dim()) {
    throw_invalid("TranslationOp: dimension mismatch");
  }
  for (double xi : x) {
    if (!std::isfinite(xi)) throw_invalid("TranslationOp: non-finite shift");
  }
  shift_.assign(x.begin(), x.end());
  if (basis_->dim() > 1) {
    // Multi-axis application contracts against the per-axis matrices; in
    // one dimension apply() works in factored quadrature form and the
    // matrix is only materialized on demand.
    ensure_axis_matrices();
  }
}

void TranslationOp::ensure_axis_matrices() const {
  if (!axis_matrices_.empty()) return;
  axis_matrices_.reserve(shift_.size());
  for (double xi : shift_) {
    axis_matrices_.push_back(cached_factor(basis_->max_degree(), xi, quad_order_));
  }
}

Eigen::VectorXd TranslationOp::apply_coeffs(const Eigen::VectorXd& c) const {
  const int d = basis_->dim();
  const std::size_t n1 = static_cast<std::size_t>(basis_->max_degree()) + 1;

  if (d == 1) {
    // Factored quadrature form: out_m = e^{-x^2/4} sum_q w_q p_m(u_q + x/2)
    // [sum_n p_n(u_q - x/2) c_n], avoiding the (N+1)^2 matrix build on the
    // per-step hot path.
    const double x = shift_[0];
    if (x == 0.0) return c;
    const QuadratureRule rule = gauss_hermite_rule(quad_order_);
    const double gauss = std::exp(-x * x / 4.0);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(c.size());
    const int max_degree = basis_->max_degree();
    for (int q = 0; q < rule.order(); ++q) {
      const double u = rule.nodes[static_cast<std::size_t>(q)];
      const std::vector<double> pn = hermite_values_scaled(max_degree, u - x / 2.0);
      double s = 0.0;
      for (std::size_t n = 0; n < n1; ++n) s += pn[n] * c[static_cast<Eigen::Index>(n)];
      const double wq = rule.weights[static_cast<std::size_t>(q)] * gauss * s;
      const std::vector<double> pm = hermite_values_scaled(max_degree, u + x / 2.0);
      for (std::size_t m = 0; m < n1; ++m) out[static_cast<Eigen::Index>(m)] += wq * pm[m];
    }
    return out;
  }

  // Embed into the full tensor grid (row-major, axis 0 slowest) and
  // contract axis by axis; zero-shift axes are exact identities.
  std::vector<double> full(basis_->full_grid_size(), 0.0);
  for (std::size_t k = 0; k < basis_->size(); ++k) {
    full[basis_->full_grid_pos(k)] = c[static_cast<Eigen::Index>(k)];
  }
  std::vector<double> next(full.size());
  for (int axis = 0; axis < d; ++axis) {
    if (shift_[static_cast<std::size_t>(axis)] == 0.0) continue;
    std::size_t inner = 1;
    for (int a = axis + 1; a < d; ++a) inner *= n1;
    const std::size_t outer = full.size() / (n1 * inner);
    const std::size_t block = n1 * inner;
    const Eigen::MatrixXd& t = *axis_matrices_[static_cast<std::size_t>(axis)];
    for (std::size_t o = 0; o < outer; ++o) {
      const double* in_block = full.data() + o * block;
      double* out_block = next.data() + o * block;
      for (std::size_t m = 0; m < n1; ++m) {
        for (std::size_t i = 0; i < inner; ++i) {
          double s = 0.0;
          for (std::size_t n = 0; n < n1; ++n) {
            s += t(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) * in_block[n * inner + i];
          }
          out_block[m * inner + i] = s;
        }
      }
    }
    full.swap(next);
  }

  Eigen::VectorXd out(c.size());
  for (std::size_t k = 0; k < basis_->size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = full[basis_->full_grid_pos(k)];
  }
  return out;
}

HermiteRep TranslationOp::apply(const HermiteRep& f) const {
  if (f.dim() != basis_->dim() || f.max_degree() != basis_->max_degree()) {
    throw_invalid("TranslationOp::apply: shape mismatch");
  }
  return HermiteRep(f.basis(), apply_coeffs(f.coeffs()), f.p_tag());
}

Eigen::MatrixXd TranslationOp::dense() const {
  ensure_axis_matrices();
  const auto size = static_cast<Eigen::Index>(basis_->size());
  Eigen::MatrixXd out(size, size);
  const int d = basis_->dim();
  for (Eigen::Index r = 0; r < size; ++r) {
    const MultiIndex& m = basis_->index(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < size; ++c) {
      const MultiIndex& n = basis_->index(static_cast<std::size_t>(c));
      double prod = 1.0;
      for (int a = 0; a < d; ++a) {
        prod *= (*axis_matrices_[static_cast<std::size_t>(a)])(m.entries[a], n.entries[a]);
      }
      out(r, c) = prod;
    }
  }
  return out;
}

HermiteRep translate(const HermiteRep& f, std::span<const double> x, int quad_order) {
  return TranslationOp(f.basis(), x, quad_order).apply(f);
}

CoeffOperator translation_matrix(std::span<const double> x, std::shared_ptr<const Basis> basis,
                                 int quad_order) {
  TranslationOp op(basis, x, quad_order);
  return CoeffOperator(basis, op.dense().sparseView(0.0, 0.0));
}

std::vector<HermiteRep> diffusion_ops(const HermiteRep& rho,
                                      const std::vector<std::vector<HermiteRep>>& sigma) {
  const int d = rho.dim();
  if (static_cast<int>(sigma.size()) != d) throw_invalid("diffusion_ops: sigma must be d x d");
  std::vector<HermiteRep> drho;
  drho.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) drho.push_back(derivative_op(i, rho.basis()).apply(rho));
  std::vector<HermiteRep> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(rho.coeffs().size());
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(sigma[static_cast<std::size_t>(i)].size()) != d) {
        throw_invalid("diffusion_ops: sigma must be d x d");
      }
      const double pairing = duality(sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], rho);
      acc -= pairing * drho[static_cast<std::size_t>(i)].coeffs();
    }
    out.emplace_back(rho.basis(), std::move(acc), rho.p_tag());
  }
  return out;
}

HermiteRep continuous_generator(const HermiteRep& rho,
                                const std::vector<std::vector<HermiteRep>>& sigma,
                                const std::vector<HermiteRep>& b) {
  const int d = rho.dim();
  if (static_cast<int>(sigma.size()) != d || static_cast<int>(b.size()) != d) {
    throw_invalid("continuous_generator: coefficient shape mismatch");
  }
  Eigen::MatrixXd s(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s(i, j) = duality(sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], rho);
    }
  }
  const Eigen::MatrixXd a = s * s.transpose();

  std::vector<HermiteRep> drho;
  drho.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) drho.push_back(derivative_op(i, rho.basis()).apply(rho));

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(rho.coeffs().size());
  for (int i = 0; i < d; ++i) {
    const CoeffOperator di = derivative_op(i, rho.basis());
    for (int j = 0; j < d; ++j) {
      if (a(i, j) != 0.0) {
        acc += 0.5 * a(i, j) * di.apply(drho[static_cast<std::size_t>(j)]).coeffs();
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    const double pairing = duality(b[static_cast<std::size_t>(i)], rho);
    if (pairing != 0.0) acc -= pairing * drho[static_cast<std::size_t>(i)].coeffs();
  }
  return HermiteRep(rho.basis(), std::move(acc), rho.p_tag());
}

HermiteRep levy_generator(
    const HermiteRep& rho, const std::vector<std::vector<HermiteRep>>& sigma,
    const std::vector<HermiteRep>& b,
    const std::function<Eigen::VectorXd(const HermiteRep&, const Eigen::VectorXd&)>& jump_coeff,
    std::span<const WeightedMark> nu_small, int quad_order) {
  HermiteRep out = continuous_generator(rho, sigma, b);
  if (nu_small.empty()) return out;
  const int d = rho.dim();
  std::vector<HermiteRep> drho;
  drho.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) drho.push_back(derivative_op(i, rho.basis()).apply(rho));
  for (const WeightedMark& mark : nu_small) {
    const Eigen::VectorXd fv = jump_coeff(rho, mark.x);
    Eigen::VectorXd term =
        translate(rho, std::span<const double>(fv.data(), static_cast<std::size_t>(fv.size())),
                  quad_order)
            .coeffs() -
        rho.coeffs();
    for (int i = 0; i < d; ++i) term += fv[i] * drho[static_cast<std::size_t>(i)].coeffs();
    out.coeffs() += mark.weight * term;
  }
  return out;
}

}  // namespace translev
