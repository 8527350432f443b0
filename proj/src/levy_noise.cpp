#include "translev/levy_noise.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "translev/errors.hpp"

namespace translev {

struct Rng::Impl {
  std::mt19937_64 engine;
  bool has_spare = false;
  double spare = 0.0;
};

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream)
    : impl_(std::make_shared<Impl>()) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id & 0xffffffffu), static_cast<std::uint32_t>(stream_id >> 32),
      static_cast<std::uint32_t>(substream & 0xffffffffu), static_cast<std::uint32_t>(substream >> 32)};
  impl_->engine.seed(seq);
}

std::uint64_t Rng::raw() { return impl_->engine(); }

double Rng::uniform() {
  // 53-bit mantissa in (0,1); never returns 0 so logs are safe.
  const double u = (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53;
  return u;
}

double Rng::normal() {
  if (impl_->has_spare) {
    impl_->has_spare = false;
    return impl_->spare;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  impl_->spare = r * std::sin(a);
  impl_->has_spare = true;
  return r * std::cos(a);
}

double Rng::exponential(double rate) {
  if (rate <= 0.0) throw_invalid("Rng::exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

namespace {

void check_annulus(const std::vector<WeightedMark>& marks, JumpMeasure::Annulus annulus, int dim) {
  for (const WeightedMark& m : marks) {
    if (m.x.size() != dim) throw_invalid("JumpMeasure: mark dimension mismatch");
    const double r = m.x.norm();
    if (annulus == JumpMeasure::Annulus::small) {
      if (!(r > 0.0 && r < 1.0)) throw_invalid("JumpMeasure: small-jump atom must satisfy 0 < |x| < 1");
    } else {
      if (!(r >= 1.0)) throw_invalid("JumpMeasure: large-jump atom must satisfy |x| >= 1");
    }
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw_invalid("JumpMeasure: atom rate must be finite and nonnegative");
    }
  }
}

}  // namespace

JumpMeasure JumpMeasure::zero(int dim, Annulus annulus) {
  JumpMeasure m;
  m.dim_ = dim;
  m.annulus_ = annulus;
  m.total_mass_ = 0.0;
  return m;
}

JumpMeasure JumpMeasure::atoms(int dim, Annulus annulus, std::vector<WeightedMark> marks) {
  check_annulus(marks, annulus, dim);
  JumpMeasure m;
  m.dim_ = dim;
  m.annulus_ = annulus;
  m.points_ = std::move(marks);
  double mass = 0.0;
  for (const WeightedMark& a : m.points_) mass += a.weight;
  m.total_mass_ = mass;
  return m;
}

JumpMeasure JumpMeasure::power_law_truncated(double scale, double alpha, double eps,
                                             int quad_points) {
  if (!(scale > 0.0)) throw_invalid("power_law_truncated: scale must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw_invalid("power_law_truncated: need 0 < eps < 1");
  if (quad_points < 8) throw_invalid("power_law_truncated: too few quadrature points");

  JumpMeasure m;
  m.dim_ = 1;
  m.annulus_ = Annulus::small;
  m.density_form_ = true;

  // Two-sided density scale * |x|^{-1-alpha} on eps <= |x| < 1. Geometric
  // midpoint rule on |x| (log-spaced, matched to the power-law steepness),
  // mirrored to both signs; these points back every nu-integral, so
  // atom-style exactness is traded for a fixed-order rule.
  const double log_ratio = std::log(1.0 / eps) / quad_points;
  m.points_.reserve(2 * static_cast<std::size_t>(quad_points));
  double mass = 0.0;
  for (int i = 0; i < quad_points; ++i) {
    const double r = eps * std::exp((i + 0.5) * log_ratio);
    const double w = scale * std::pow(r, -1.0 - alpha) * r * log_ratio;
    Eigen::VectorXd xp(1), xn(1);
    xp[0] = r;
    xn[0] = -r;
    m.points_.push_back({xp, w});
    m.points_.push_back({xn, w});
    mass += 2.0 * w;
  }
  m.total_mass_ = mass;

  // Discarded bias of the truncation: int_{|x| < eps} x^2 nu(dx), which is
  // 2 scale eps^{2-alpha} / (2-alpha) for alpha < 2 and divergent otherwise.
  m.discarded_quadratic_mass_ =
      alpha < 2.0 ? 2.0 * scale * std::pow(eps, 2.0 - alpha) / (2.0 - alpha)
                  : std::numeric_limits<double>::infinity();

  // Tabulated CDF of |x| for inverse sampling.
  const int table = 2048;
  m.cdf_abscissae_.resize(table + 1);
  m.cdf_values_.resize(table + 1);
  double acc = 0.0;
  m.cdf_abscissae_[0] = eps;
  m.cdf_values_[0] = 0.0;
  const double ht = (1.0 - eps) / table;
  for (int i = 1; i <= table; ++i) {
    const double r0 = eps + (i - 1) * ht;
    const double r1 = eps + i * ht;
    const double mid = 0.5 * (r0 + r1);
    acc += 2.0 * scale * std::pow(mid, -1.0 - alpha) * ht;
    m.cdf_abscissae_[static_cast<std::size_t>(i)] = r1;
    m.cdf_values_[static_cast<std::size_t>(i)] = acc;
  }
  for (double& v : m.cdf_values_) v /= acc;
  return m;
}

double JumpMeasure::integrate(const std::function<double(const Eigen::VectorXd&)>& g) const {
  double s = 0.0;
  for (const WeightedMark& m : points_) s += m.weight * g(m.x);
  return s;
}

Eigen::VectorXd JumpMeasure::integrate_vector(
    int out_dim, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(out_dim);
  for (const WeightedMark& m : points_) s += m.weight * g(m.x);
  return s;
}

Eigen::VectorXd JumpMeasure::sample_mark(Rng& rng) const {
  if (is_zero()) throw_invalid("JumpMeasure::sample_mark: zero measure");
  if (!density_form_) {
    // Atom with probability rate / total mass.
    double u = rng.uniform() * total_mass_;
    for (const WeightedMark& m : points_) {
      u -= m.weight;
      if (u <= 0.0) return m.x;
    }
    return points_.back().x;
  }
  // Inverse CDF on |x|, then a random sign (symmetric density).
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_values_.begin(), cdf_values_.end(), u);
  const std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(std::distance(cdf_values_.begin(), it)), cdf_values_.size() - 1);
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  double r;
  if (hi == lo) {
    r = cdf_abscissae_[hi];
  } else {
    const double den = cdf_values_[hi] - cdf_values_[lo];
    const double frac = den > 0.0 ? (u - cdf_values_[lo]) / den : 0.0;
    r = cdf_abscissae_[lo] + frac * (cdf_abscissae_[hi] - cdf_abscissae_[lo]);
  }
  const bool negative = rng.uniform() < 0.5;
  Eigen::VectorXd x(1);
  x[0] = negative ? -r : r;
  return x;
}

namespace {
constexpr std::uint64_t kBrownianStream = 1;
constexpr std::uint64_t kSmallStream = 2;
constexpr std::uint64_t kLargeStream = 3;
}  // namespace

std::vector<Eigen::VectorXd> sample_brownian(double T, double dt, int dim, std::uint64_t seed) {
  if (!(T > 0.0) || !(dt > 0.0)) throw_invalid("sample_brownian: T and dt must be positive");
  const int K = static_cast<int>(std::ceil(T / dt - 1e-9));
  Rng rng(seed, kBrownianStream, 0);
  const double sd = std::sqrt(dt);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = sd * rng.normal();
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<JumpEvent> sample_jump_events(const JumpMeasure& measure, double T, std::uint64_t seed,
                                          std::uint64_t stream_id, std::uint64_t substream) {
  std::vector<JumpEvent> events;
  if (measure.is_zero()) return events;
  if (!std::isfinite(measure.total_mass())) {
    throw_unsupported("sample_jump_events: infinite total mass; use an epsilon-truncated measure");
  }
  Rng rng(seed, stream_id, substream);
  double t = 0.0;
  while (true) {
    t += rng.exponential(measure.total_mass());
    if (t > T) break;
    events.push_back({t, measure.sample_mark(rng)});
  }
  return events;
}

NoisePath sample_noise_path(const LevyModel& model, double T, double dt, std::uint64_t seed,
                            std::uint64_t substream) {
  if (!(T > 0.0) || !(dt > 0.0)) throw_invalid("sample_noise_path: T and dt must be positive");
  NoisePath path;
  path.dim = model.dim;
  path.T = T;
  path.dt = dt;
  path.seed = seed;
  path.small_jumps = sample_jump_events(model.small, T, seed, kSmallStream, substream);
  path.large_jumps = sample_jump_events(model.large, T, seed, kLargeStream, substream);

  // Refined grid: uniform points merged with all jump times.
  struct TimeTag {
    double t;
    int uniform_index;
  };
  std::vector<TimeTag> tags;
  const int K = static_cast<int>(std::ceil(T / dt - 1e-9));
  tags.push_back({0.0, 0});
  for (int k = 1; k < K; ++k) tags.push_back({k * dt, k});
  tags.push_back({T, K});
  for (const JumpEvent& e : path.small_jumps) tags.push_back({e.t, -1});
  for (const JumpEvent& e : path.large_jumps) tags.push_back({e.t, -1});
  std::sort(tags.begin(), tags.end(), [](const TimeTag& a, const TimeTag& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.uniform_index > b.uniform_index;  // keep the uniform tag on exact ties
  });
  path.times.clear();
  path.uniform_index.clear();
  for (const TimeTag& tag : tags) {
    if (!path.times.empty() && path.times.back() == tag.t) continue;
    path.times.push_back(tag.t);
    path.uniform_index.push_back(tag.uniform_index);
  }

  Rng rng(seed, kBrownianStream, substream);
  path.brownian.reserve(path.times.size() - 1);
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    const double sd = std::sqrt(path.times[k + 1] - path.times[k]);
    Eigen::VectorXd v(model.dim);
    for (int i = 0; i < model.dim; ++i) v[i] = sd * rng.normal();
    path.brownian.push_back(std::move(v));
  }
  return path;
}

NoisePath coarsen(const NoisePath& path, int factor) {
  if (factor < 1) throw_invalid("coarsen: factor must be >= 1");
  if (factor == 1) return path;
  NoisePath out;
  out.dim = path.dim;
  out.T = path.T;
  out.dt = path.dt * factor;
  out.seed = path.seed;
  out.small_jumps = path.small_jumps;
  out.large_jumps = path.large_jumps;

  const int fine_K = path.uniform_index.empty() ? 0 : path.uniform_index.back();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(path.dim);
  out.times.push_back(path.times.front());
  out.uniform_index.push_back(0);
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    acc += path.brownian[k];
    const int ui = path.uniform_index[k + 1];
    const bool keep = (ui == -1) || (ui % factor == 0) || (ui == fine_K);
    if (keep) {
      out.times.push_back(path.times[k + 1]);
      out.uniform_index.push_back(ui == -1 ? -1 : ui / factor);
      out.brownian.push_back(acc);
      acc.setZero();
    }
  }
  return out;
}

void write_noise_jsonl(const NoisePath& path, std::ostream& os) {
  nlohmann::json meta;
  meta["type"] = "meta";
  meta["d"] = path.dim;
  meta["T"] = path.T;
  meta["dt"] = path.dt;
  meta["seed"] = path.seed;
  os << meta.dump() << "\n";
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    nlohmann::json j;
    j["type"] = "brownian";
    j["t0"] = path.times[k];
    j["t1"] = path.times[k + 1];
    j["uniform_index"] = path.uniform_index[k + 1];
    j["db"] = std::vector<double>(path.brownian[k].data(), path.brownian[k].data() + path.dim);
    os << j.dump() << "\n";
  }
  for (const JumpEvent& e : path.small_jumps) {
    nlohmann::json j;
    j["type"] = "small_jump";
    j["t"] = e.t;
    j["x"] = std::vector<double>(e.x.data(), e.x.data() + e.x.size());
    os << j.dump() << "\n";
  }
  for (const JumpEvent& e : path.large_jumps) {
    nlohmann::json j;
    j["type"] = "large_jump";
    j["t"] = e.t;
    j["x"] = std::vector<double>(e.x.data(), e.x.data() + e.x.size());
    os << j.dump() << "\n";
  }
}

NoisePath read_noise_jsonl(std::istream& is) {
  NoisePath path;
  std::string line;
  bool have_meta = false;
  std::vector<double> t0s, t1s;
  std::vector<int> uis;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw_io(std::string("read_noise_jsonl: ") + e.what());
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "meta") {
      path.dim = j.at("d").get<int>();
      path.T = j.at("T").get<double>();
      path.dt = j.at("dt").get<double>();
      path.seed = j.at("seed").get<std::uint64_t>();
      have_meta = true;
    } else if (type == "brownian") {
      t0s.push_back(j.at("t0").get<double>());
      t1s.push_back(j.at("t1").get<double>());
      uis.push_back(j.at("uniform_index").get<int>());
      const auto db = j.at("db").get<std::vector<double>>();
      Eigen::VectorXd v(static_cast<Eigen::Index>(db.size()));
      for (std::size_t i = 0; i < db.size(); ++i) v[static_cast<Eigen::Index>(i)] = db[i];
      path.brownian.push_back(std::move(v));
    } else if (type == "small_jump" || type == "large_jump") {
      const auto xv = j.at("x").get<std::vector<double>>();
      Eigen::VectorXd x(static_cast<Eigen::Index>(xv.size()));
      for (std::size_t i = 0; i < xv.size(); ++i) x[static_cast<Eigen::Index>(i)] = xv[i];
      JumpEvent e{j.at("t").get<double>(), std::move(x)};
      (type == "small_jump" ? path.small_jumps : path.large_jumps).push_back(std::move(e));
    } else {
      throw_io("read_noise_jsonl: unknown record type " + type);
    }
  }
  if (!have_meta) throw_io("read_noise_jsonl: missing meta record");
  if (!t0s.empty()) {
    path.times.push_back(t0s.front());
    path.uniform_index.push_back(0);
    for (std::size_t k = 0; k < t1s.size(); ++k) {
      path.times.push_back(t1s[k]);
      path.uniform_index.push_back(uis[k]);
    }
  }
  return path;
}

}  // namespace translev
