#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lipdim {

/// One checked claim: `measured` compared against `bound`.
struct Verdict {
  std::string claim;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  std::vector<Verdict> verdicts;
  double seconds = 0.0;
  bool passed() const;
};

struct ExperimentOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  double ladder_ratio = 0.5;
  double kappa = 4.0;
};

/// Names accepted by run_experiment, in acceptance order.
const std::vector<std::string>& experiment_names();

/// Runs a named fixture experiment. Throws std::invalid_argument for an
/// unknown name.
ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& opts = {});

nlohmann::json to_json(const ExperimentResult& r);

}  // namespace lipdim
