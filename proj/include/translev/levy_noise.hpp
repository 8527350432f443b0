#ifndef TRANSLEV_LEVY_NOISE_HPP
#define TRANSLEV_LEVY_NOISE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "translev/weighted_mark.hpp"

namespace translev {

/// Deterministic random stream: a standard mt19937_64 engine (bit-exact
/// across platforms) with our own uniform/normal/exponential transforms,
/// since the std distributions are implementation-defined.
class Rng {
 public:
  /// Independent stream for (seed, stream kind, substream), e.g. one
  /// substream per Monte Carlo path; distinct ids give disjoint seed_seq
  /// material.
  Rng(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0);

  std::uint64_t raw();
  double uniform();               // in (0, 1)
  double normal();                // standard normal, Box-Muller
  double exponential(double rate);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Jump measure on an annulus: either a finite atom list (exact
/// nu-integrals) or, for d = 1 only, a power-law density
/// c |x|^{-1-alpha} dx truncated to eps <= |x| < 1 (small) with
/// fixed-order quadrature for integrals and inverse-CDF sampling.
class JumpMeasure {
 public:
  enum class Annulus { small, large };

  static JumpMeasure zero(int dim, Annulus annulus);
  static JumpMeasure atoms(int dim, Annulus annulus, std::vector<WeightedMark> marks);
  /// Infinite-activity small measure via epsilon-truncation; the discarded
  /// quadratic mass int_{|x|<eps} x^2 nu(dx) is recorded as a bias
  /// diagnostic. Symmetric two-sided power law, d = 1.
  static JumpMeasure power_law_truncated(double scale, double alpha, double eps,
                                         int quad_points = 256);

  int dim() const { return dim_; }
  Annulus annulus() const { return annulus_; }
  double total_mass() const { return total_mass_; }
  bool is_zero() const { return total_mass_ == 0.0; }
  /// Exact atoms, or quadrature points for the density form.
  const std::vector<WeightedMark>& integration_points() const { return points_; }
  /// Mean-measure functional m(g) = int g(x) nu(dx).
  double integrate(const std::function<double(const Eigen::VectorXd&)>& g) const;
  Eigen::VectorXd integrate_vector(int out_dim,
                                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g) const;
  /// Bias of the epsilon-truncation (0 for atom measures).
  double discarded_quadratic_mass() const { return discarded_quadratic_mass_; }

  Eigen::VectorXd sample_mark(Rng& rng) const;

  JumpMeasure() = default;  // zero measure on the small annulus

 private:
  int dim_ = 1;
  Annulus annulus_ = Annulus::small;
  double total_mass_ = 0.0;
  std::vector<WeightedMark> points_;
  double discarded_quadratic_mass_ = 0.0;
  // density form (d=1): sampling via tabulated inverse CDF on |x|.
  bool density_form_ = false;
  std::vector<double> cdf_abscissae_;
  std::vector<double> cdf_values_;
};

struct LevyModel {
  int dim = 1;
  JumpMeasure small;  // on 0 < |x| < 1
  JumpMeasure large;  // on |x| >= 1
};

struct JumpEvent {
  double t = 0.0;
  Eigen::VectorXd x;
};

/// One realization of the driving noise on [0, T]: the refined grid
/// (uniform dt points merged with all jump times), one Brownian increment
/// per grid segment, and the two jump event streams. A NoisePath is a pure
/// function of (model, T, dt, seed).
struct NoisePath {
  int dim = 1;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;                 // 0 = t_0 < ... < t_K = T
  std::vector<int> uniform_index;            // k for t = k dt, -1 for inserted jump times
  std::vector<Eigen::VectorXd> brownian;     // increment over [t_k, t_{k+1}], size K
  std::vector<JumpEvent> small_jumps;        // sorted by time
  std::vector<JumpEvent> large_jumps;        // strictly increasing arrival times
};

/// ceil(T/dt) i.i.d. N(0, dt I_d) increments, deterministic under seed.
std::vector<Eigen::VectorXd> sample_brownian(double T, double dt, int dim, std::uint64_t seed);

/// Poisson(lambda T) events with exact exponential inter-arrival times and
/// i.i.d. marks from the normalized measure.
std::vector<JumpEvent> sample_jump_events(const JumpMeasure& measure, double T, std::uint64_t seed,
                                          std::uint64_t stream_id, std::uint64_t substream);

/// Full noise realization; Brownian, small-jump and large-jump streams use
/// disjoint sub-seeds. `substream` selects the Monte Carlo path.
NoisePath sample_noise_path(const LevyModel& model, double T, double dt, std::uint64_t seed,
                            std::uint64_t substream = 0);

/// Coarsen the uniform grid by an integer factor (Brownian increments are
/// summed); jump events and their inserted grid points are kept. The result
/// is the same noise realization viewed on the coarser grid.
NoisePath coarsen(const NoisePath& path, int factor);

/// JSONL replay format: one meta line, then one line per increment/event.
void write_noise_jsonl(const NoisePath& path, std::ostream& os);
NoisePath read_noise_jsonl(std::istream& is);

}  // namespace translev

#endif
