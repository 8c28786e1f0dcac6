// Runs every fixture experiment and prints one PASS/FAIL line per criterion.
// Thresholds live with the experiments (core/src/experiments.cpp).
//
//   lipdim_acceptance [--out-dir DIR] [name...]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lipdim/experiments.hpp"

int main(int argc, char** argv) {
  std::filesystem::path out_dir;
  std::vector<std::string> names;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out-dir" && i + 1 < argc) out_dir = argv[++i];
    else names.push_back(a);
  }
  if (names.empty()) names = lipdim::experiment_names();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  int failed = 0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    lipdim::ExperimentResult r;
    try {
      r = lipdim::run_experiment(names[k]);
    } catch (const std::exception& e) {
      std::printf("[%2zu] FAIL %-20s error: %s\n", k + 1, names[k].c_str(), e.what());
      std::fflush(stdout);
      ++failed;
      continue;
    }
    std::printf("[%2zu] %s %-20s %6.1f s\n", k + 1, r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    for (const auto& v : r.verdicts)
      if (!v.pass)
        std::printf("       failed: %s (measured %.6g, bound %.6g) %s\n", v.claim.c_str(), v.measured, v.bound,
                    v.detail.c_str());
    std::fflush(stdout);
    if (!r.passed()) ++failed;
    if (!out_dir.empty()) std::ofstream(out_dir / (r.name + ".json")) << lipdim::to_json(r).dump(2) << "\n";
  }
  std::printf("%zu of %zu criteria pass\n", names.size() - failed, names.size());
  return failed == 0 ? 0 : 1;
}
