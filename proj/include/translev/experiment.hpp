#ifndef TRANSLEV_EXPERIMENT_HPP
#define TRANSLEV_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "translev/coefficients.hpp"
#include "translev/hermite_rep.hpp"
#include "translev/levy_noise.hpp"

namespace translev {

struct SpaceConfig {
  int d = 1;
  int N = 40;
  double p = 1.5;
  int Q = 88;  // Gauss-Hermite order for translation matrices and projections
};

struct ToleranceConfig {
  double correspondence_max = 0.0;  // bitwise
  double jump_identity_max = 1e-8;
  double ito_max_residual = 1e-8;
  int uniqueness_refinements = 3;
};

struct InequalityConfig {
  int samples = 1000;
  std::uint64_t seed = 777;
  std::vector<int> stability_levels{20, 30, 40};
  double stability_tol = 0.10;
  double equality_tol = 1e-8;
  double taylor_rel_tol = 1e-6;
  std::vector<double> x_grid{0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  bool emit_sample_csv = false;
};

struct RunConfig {
  double m = 1e6;
  int threads = 1;
  int snapshot_paths = 2;
  int test_degree_max = 5;  // residuals paired against h_0..h_j
  ToleranceConfig tolerances;
  HypothesisCeilings ceilings;
  InequalityConfig inequalities;
};

struct NoiseConfig {
  double T = 1.0;
  double dt = 0.01;
  std::uint64_t seed = 12345;
  int paths = 10;
};

/// A full experiment: space, initial data, coefficients, noise, run knobs.
/// Round-trips through JSON bit-exactly; every output embeds content_hash().
class ExperimentConfig {
 public:
  SpaceConfig space;
  NoiseConfig noise_cfg;
  RunConfig run;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  /// FNV-1a 64 hash of the canonical serialization, hex encoded.
  std::string content_hash() const;

  const HermiteRep& xi() const { return *xi_; }
  const Eigen::VectorXd& kappa() const { return kappa_; }
  const CoefficientSet& coefficients() const { return *set_; }
  const LevyModel& model() const { return model_; }
  std::shared_ptr<const Basis> basis() const { return basis_; }

  void override_seed(std::uint64_t seed);
  void override_threads(int threads);

 private:
  std::shared_ptr<const Basis> basis_;
  std::optional<HermiteRep> xi_;
  Eigen::VectorXd kappa_;
  std::optional<CoefficientSet> set_;
  LevyModel model_;
  nlohmann::json raw_;  // canonical parsed document (defaults filled)
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 tolerance failure, 2 config error
  nlohmann::json summary;
};

CommandResult run_simulate(const ExperimentConfig& config, const std::string& out_dir);
CommandResult run_verify(const ExperimentConfig& config, const std::string& suite,
                         const std::string& out_dir);
CommandResult run_inequalities(const ExperimentConfig& config, const std::string& out_dir);
CommandResult run_hypotheses(const ExperimentConfig& config, const std::string& out_dir);

/// FNV-1a 64 of a byte string, hex encoded (stable output fingerprint).
std::string fnv1a_hex(const std::string& bytes);

}  // namespace translev

#endif
