// lipdim command line: generate spaces, build maps, run profiles and
// estimators, reproduce the named fixture experiments.
//
// Exit codes: 0 pass, 1 claim-check failure, 2 invalid spec, 3 I/O or schema.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lipdim/components.hpp"
#include "lipdim/constructions.hpp"
#include "lipdim/dimension.hpp"
#include "lipdim/experiments.hpp"
#include "lipdim/generators.hpp"
#include "lipdim/io.hpp"
#include "lipdim/lightness.hpp"
#include "lipdim/space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lipdim;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitClaim = 1;
constexpr int kExitSpec = 2;
constexpr int kExitIo = 3;

struct Common {
  std::string spec;
  std::string space;
  std::string map;
  std::string pairing;
  double ladder_ratio = 0.5;
  double kappa = 4.0;
  double r_max = 0.0;
  std::string windows;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string out;
};

SpacePtr share(FiniteMetricSpace s) { return std::make_shared<const FiniteMetricSpace>(std::move(s)); }

fs::path out_path(const Common& c, const std::string& fallback) {
  return c.out.empty() ? fs::path(c.out_dir) / fallback : fs::path(c.out);
}

/// An experiment spec file may hold "space", "map", "ladder", "windows",
/// "seed" and "out_dir"; a bare space spec is also accepted.
struct ExperimentSpecFile {
  std::optional<SpaceSpec> space;
  std::optional<MapSpec> map;
  json raw;
};

ExperimentSpecFile read_experiment_spec(Common& c) {
  ExperimentSpecFile e;
  if (c.spec.empty()) return e;
  e.raw = read_json(c.spec);
  if (!e.raw.is_object()) throw IoError(c.spec + ": expected a JSON object");
  if (e.raw.contains("kind")) {
    e.space = space_spec_from_json(e.raw);
    return e;
  }
  if (e.raw.contains("space")) e.space = space_spec_from_json(e.raw.at("space"));
  if (e.raw.contains("map")) e.map = map_spec_from_json(e.raw.at("map"));
  if (e.raw.contains("ladder")) {
    const json& l = e.raw.at("ladder");
    c.ladder_ratio = l.value("ratio", c.ladder_ratio);
    c.kappa = l.value("kappa", c.kappa);
    c.r_max = l.value("r_max", c.r_max);
  }
  if (c.windows.empty()) c.windows = e.raw.value("windows", std::string());
  if (!c.seed && e.raw.contains("seed")) c.seed = e.raw.at("seed").get<std::uint64_t>();
  if (e.raw.contains("out_dir") && c.out_dir == ".") c.out_dir = e.raw.at("out_dir").get<std::string>();
  return e;
}

SpacePtr load_space(Common& c, const ExperimentSpecFile& e) {
  if (!c.space.empty()) return share(read_space(c.space));
  if (e.space) {
    SpaceSpec s = *e.space;
    if (c.seed) s.seed = *c.seed;
    return share(generate(s));
  }
  throw std::invalid_argument("need --space or a spec with a space");
}

SampledMap load_map(Common& c, const ExperimentSpecFile& e, SpacePtr x) {
  if (!c.pairing.empty()) return read_pairing(x, c.pairing);
  if (!c.map.empty()) return build_map(map_spec_from_json(read_json(c.map)), x);
  if (e.map) return build_map(*e.map, x);
  throw std::invalid_argument("need --map, --pairing or a spec with a map");
}

/// Ball windows everywhere, plus grid windows for Euclidean codomains.
WindowMode window_mode(const Common& c, const SampledMap& f) {
  if (!c.windows.empty()) return parse_window_mode(c.windows);
  const auto& rule = f.codomain->rule();
  return rule->kind() == MetricKind::Euclidean ? WindowMode::BallAndGrid : WindowMode::Ball;
}

ScaleLadder ladder(const Common& c, const FiniteMetricSpace& x) {
  return certified_ladder(x, c.r_max > 0.0 ? c.r_max : x.diameter(), c.ladder_ratio, c.kappa);
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--spec", c.spec, "JSON space spec or experiment spec");
  app->add_option("--space", c.space, "point-cloud CSV (with its JSON sidecar)");
  app->add_option("--map", c.map, "JSON map spec");
  app->add_option("--pairing", c.pairing, "pairing CSV `id,y1..`");
  app->add_option("--ladder-ratio", c.ladder_ratio, "ratio between ladder scales")->capture_default_str();
  app->add_option("--kappa", c.kappa, "certification factor: scales >= kappa * resolution")->capture_default_str();
  app->add_option("--r-max", c.r_max, "top ladder scale (default: diameter)");
  app->add_option("--windows", c.windows, "ball | grid | ball+grid | diam");
  app->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  app->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "seed override");
  app->add_option("--out", c.out, "output file (overrides --out-dir naming)");
}

int cmd_generate(Common& c) {
  const ExperimentSpecFile e = read_experiment_spec(c);
  if (!e.space) throw std::invalid_argument("generate needs --spec with a space spec");
  SpaceSpec s = *e.space;
  if (c.seed) s.seed = *c.seed;
  const FiniteMetricSpace x = generate(s);
  const fs::path csv = out_path(c, s.kind + ".csv");
  write_space(x, csv);
  std::cout << "wrote " << csv.string() << " (" << x.size() << " points, resolution "
            << format_double(x.resolution()) << ")\n";
  return kExitPass;
}

int cmd_map(Common& c) {
  const ExperimentSpecFile e = read_experiment_spec(c);
  SpacePtr x = load_space(c, e);
  const SampledMap f = load_map(c, e, x);
  const fs::path csv = out_path(c, f.name + "_pairing.csv");
  write_pairing(f, csv);
  std::cout << "wrote " << csv.string() << " (" << f.codomain->size() << " distinct images)\n";
  return kExitPass;
}

int cmd_profile(Common& c, const std::string& expect) {
  const ExperimentSpecFile e = read_experiment_spec(c);
  SpacePtr x = load_space(c, e);
  const SampledMap f = load_map(c, e, x);
  LightnessOptions opts;
  opts.windows = window_mode(c, f);
  opts.threads = c.threads;
  opts.kappa = c.kappa;
  const LightnessProfile p = ll_profile(f, ladder(c, *x), opts);
  const fs::path dir(c.out_dir);
  const fs::path json_path = c.out.empty() ? dir / (f.name + "_profile.json") : fs::path(c.out);
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  write_text(json_path, to_json(p, *f.codomain).dump(2) + "\n");
  write_text(csv_path, profile_series_csv(p));
  std::cout << "map " << f.name << ", windows " << to_string(p.windows) << "\n";
  for (std::size_t j = 0; j < p.scales.size(); ++j)
    std::cout << "  r=" << format_double(p.scales[j]) << "  C=" << format_double(p.constants[j]) << "\n";
  std::cout << "slope " << format_double(p.slope) << ", " << to_string(p.classification) << "\n";
  if (!expect.empty() && expect != to_string(p.classification)) {
    std::cout << "claim failed: expected " << expect << "\n";
    return kExitClaim;
  }
  return kExitPass;
}

int cmd_estimate(Common& c, const std::string& estimator, double porosity_threshold) {
  const ExperimentSpecFile e = read_experiment_spec(c);
  SpacePtr x = load_space(c, e);
  const ScaleLadder l = ladder(c, *x);
  LightnessOptions opts;
  opts.threads = c.threads;
  opts.kappa = c.kappa;
  DimensionReport r;
  if (estimator == "box") r = box_counting(*x, l, c.kappa);
  else if (estimator == "assouad") r = assouad_scan(*x, l, c.kappa);
  else if (estimator == "nagata") r = nagata_zero_constant(*x, l, opts);
  else if (estimator == "porosity") r = porosity_constant(*x, l, porosity_threshold, -1.0, c.kappa);
  else throw std::invalid_argument("unknown estimator '" + estimator + "' (box, assouad, nagata, porosity)");
  write_text(out_path(c, r.estimator + ".json"), to_json(r).dump(2) + "\n");
  std::cout << r.estimator << ": estimate " << format_double(r.estimate) << ", " << r.verdict << "\n";
  return kExitPass;
}

int cmd_components(Common& c, double r) {
  const ExperimentSpecFile e = read_experiment_spec(c);
  SpacePtr x = load_space(c, e);
  const fs::path dir(c.out_dir);
  if (r > 0.0) {
    const ComponentPartition p = r_components(*x, r);
    write_text(c.out.empty() ? dir / "partition.csv" : fs::path(c.out), partition_csv(p, *x));
    std::cout << p.count() << " components at r=" << format_double(r) << ", max diameter "
              << format_double(p.max_diameter()) << "\n";
  } else {
    const Dendrogram d = dendrogram(*x);
    write_text(c.out.empty() ? dir / "dendrogram.json" : fs::path(c.out), to_json(d, *x).dump(2) + "\n");
    std::cout << d.merges.size() << " merges\n";
  }
  return kExitPass;
}

int cmd_reproduce(Common& c, const std::vector<std::string>& names) {
  std::vector<std::string> run = names;
  if (run.size() == 1 && run.front() == "all") run = experiment_names();
  for (const auto& n : run) {
    bool known = false;
    for (const auto& k : experiment_names()) known = known || k == n;
    if (!known) {
      std::string list;
      for (const auto& k : experiment_names()) list += "\n  " + k;
      throw std::invalid_argument("unknown experiment '" + n + "'; available:" + list);
    }
  }
  ExperimentOptions o;
  o.threads = c.threads;
  o.seed = c.seed.value_or(0);
  o.ladder_ratio = c.ladder_ratio;
  o.kappa = c.kappa;
  bool all_pass = true;
  for (const auto& n : run) {
    const ExperimentResult r = run_experiment(n, o);
    all_pass = all_pass && r.passed();
    std::printf("%s: %s (%.1f s)\n", r.name.c_str(), r.passed() ? "PASS" : "FAIL", r.seconds);
    for (const auto& v : r.verdicts)
      std::printf("  %-4s %s | measured %s, bound %s%s%s\n", v.pass ? "ok" : "FAIL", v.claim.c_str(),
                  format_double(v.measured).c_str(), format_double(v.bound).c_str(), v.detail.empty() ? "" : " | ",
                  v.detail.c_str());
    write_text(fs::path(c.out_dir) / (n + ".json"), to_json(r).dump(2) + "\n");
  }
  return all_pass ? kExitPass : kExitClaim;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipdim: Lipschitz-light profiles and dimension estimates for finite metric spaces"};
  app.require_subcommand(1);
  Common c;

  auto* gen = app.add_subcommand("generate", "write a generated space as CSV + sidecar");
  add_common(gen, c);
  auto* map = app.add_subcommand("map", "build a map and write its pairing CSV");
  add_common(map, c);
  std::string expect;
  auto* prof = app.add_subcommand("profile", "Lipschitz-light constant profile of a map");
  add_common(prof, c);
  prof->add_option("--expect", expect, "bounded | diverging | inconclusive; mismatch exits 1");
  std::string estimator = "box";
  double threshold = 0.05;
  auto* est = app.add_subcommand("estimate", "dimension estimators on a space");
  add_common(est, c);
  est->add_option("--estimator", estimator, "box | assouad | nagata | porosity")->capture_default_str();
  est->add_option("--porosity-threshold", threshold, "porous verdict threshold")->capture_default_str();
  double r = 0.0;
  auto* comp = app.add_subcommand("components", "r-components (with --r) or the dendrogram");
  add_common(comp, c);
  comp->add_option("--r", r, "scale; omit for the full dendrogram");
  std::vector<std::string> names;
  auto* rep = app.add_subcommand("reproduce", "run named fixture experiments ('all' for every one)");
  add_common(rep, c);
  rep->add_option("names", names, "experiment names")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitSpec;
  }

  try {
    if (*gen) return cmd_generate(c);
    if (*map) return cmd_map(c);
    if (*prof) return cmd_profile(c, expect);
    if (*est) return cmd_estimate(c, estimator, threshold);
    if (*comp) return cmd_components(c, r);
    if (*rep) return cmd_reproduce(c, names);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return kExitSpec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return kExitSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitPass;
}
