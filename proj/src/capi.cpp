#include "translev.h"

#include <string>

#include "translev/errors.hpp"
#include "translev/experiment.hpp"

struct translev_experiment {
  translev::ExperimentConfig config;
  std::string hash;
};

namespace {

thread_local std::string g_last_error;

translev_status status_from_code(translev::ErrorCode code) {
  switch (code) {
    case translev::ErrorCode::tolerance: return TRANSLEV_ERR_TOLERANCE;
    case translev::ErrorCode::config: return TRANSLEV_ERR_CONFIG;
    case translev::ErrorCode::invalid_input: return TRANSLEV_ERR_INVALID;
    case translev::ErrorCode::numeric: return TRANSLEV_ERR_NUMERIC;
    case translev::ErrorCode::io: return TRANSLEV_ERR_IO;
    case translev::ErrorCode::unsupported: return TRANSLEV_ERR_UNSUPPORTED;
  }
  return TRANSLEV_ERR_INTERNAL;
}

template <typename Fn>
translev_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const translev::Error& e) {
    g_last_error = e.what();
    return status_from_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TRANSLEV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TRANSLEV_ERR_INTERNAL;
  }
}

translev_status run_result(const translev::CommandResult& result) {
  if (result.exit_code == 0) return TRANSLEV_OK;
  if (result.exit_code == 1) {
    g_last_error = "a configured tolerance failed";
    return TRANSLEV_ERR_TOLERANCE;
  }
  g_last_error = "configuration error";
  return TRANSLEV_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* translev_version(void) { return "0.1.0"; }

translev_status translev_experiment_create(const char* config_json, translev_experiment** out) {
  if (config_json == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  *out = nullptr;
  return guarded([&]() -> translev_status {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      g_last_error = std::string("config parse failure: ") + e.what();
      return TRANSLEV_ERR_CONFIG;
    }
    auto* experiment = new translev_experiment{translev::ExperimentConfig::from_json(j), {}};
    experiment->hash = experiment->config.content_hash();
    *out = experiment;
    return TRANSLEV_OK;
  });
}

translev_status translev_experiment_create_from_file(const char* path, translev_experiment** out) {
  if (path == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  *out = nullptr;
  return guarded([&]() -> translev_status {
    auto* experiment =
        new translev_experiment{translev::ExperimentConfig::from_file(path), {}};
    experiment->hash = experiment->config.content_hash();
    *out = experiment;
    return TRANSLEV_OK;
  });
}

void translev_experiment_free(translev_experiment* experiment) { delete experiment; }

const char* translev_experiment_hash(const translev_experiment* experiment) {
  return experiment == nullptr ? "" : experiment->hash.c_str();
}

translev_status translev_experiment_set_seed(translev_experiment* experiment, uint64_t seed) {
  if (experiment == nullptr) {
    g_last_error = "null experiment";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    experiment->config.override_seed(seed);
    experiment->hash = experiment->config.content_hash();
    return TRANSLEV_OK;
  });
}

translev_status translev_experiment_set_threads(translev_experiment* experiment, int threads) {
  if (experiment == nullptr) {
    g_last_error = "null experiment";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    experiment->config.override_threads(threads);
    return TRANSLEV_OK;
  });
}

translev_status translev_run_simulate(translev_experiment* experiment, const char* out_dir) {
  if (experiment == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    return run_result(translev::run_simulate(experiment->config, out_dir));
  });
}

translev_status translev_run_verify(translev_experiment* experiment, const char* suite,
                                    const char* out_dir) {
  if (experiment == nullptr || suite == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    return run_result(translev::run_verify(experiment->config, suite, out_dir));
  });
}

translev_status translev_run_inequalities(translev_experiment* experiment, const char* out_dir) {
  if (experiment == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    return run_result(translev::run_inequalities(experiment->config, out_dir));
  });
}

translev_status translev_run_hypotheses(translev_experiment* experiment, const char* out_dir) {
  if (experiment == nullptr || out_dir == nullptr) {
    g_last_error = "null argument";
    return TRANSLEV_ERR_INVALID;
  }
  return guarded([&]() -> translev_status {
    return run_result(translev::run_hypotheses(experiment->config, out_dir));
  });
}

const char* translev_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
