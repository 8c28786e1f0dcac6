#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lipdim/components.hpp"
#include "lipdim/space.hpp"

namespace lipdim {

/// A map between finite metric spaces given by a total index pairing
/// (domain position -> codomain position).
struct SampledMap {
  std::string name;
  SpacePtr domain;
  SpacePtr codomain;
  std::vector<std::size_t> pairing;

  /// Throws std::domain_error when the pairing is not total or points outside
  /// the codomain.
  void validate() const;
  /// Domain positions mapped to each codomain position.
  std::vector<std::vector<std::size_t>> fibers() const;
};

SampledMap make_map(std::string name, SpacePtr domain, SpacePtr codomain,
                    std::vector<std::size_t> pairing);

enum class WindowMode { Ball, Grid, BallAndGrid, Diam };

std::string to_string(WindowMode mode);
WindowMode parse_window_mode(const std::string& text);

/// One tested subset W of the codomain.
struct Window {
  WindowMode kind = WindowMode::Ball;   // Ball, Grid or Diam
  std::size_t center = 0;               // codomain position (Ball, Diam)
  double radius = 0.0;                  // Ball, Diam
  int lattice = 0;                      // Grid: 0 or 1 (half-offset)
  std::vector<std::int64_t> cell;       // Grid cell coordinates
  double side = 0.0;                    // Grid cell side
};

/// Codomain positions inside `w`, ascending.
std::vector<std::size_t> window_image(const SampledMap& map, const Window& w);

struct Witness {
  double scale = 0.0;        // nominal ladder scale r
  double path_scale = 0.0;   // step bound of the path: r, or diam(W) for Diam windows
  double diameter = 0.0;     // diameter of the extremal preimage component
  double constant = 0.0;     // diameter / path_scale
  Window window;
  std::size_t window_points = 0;
  std::size_t preimage_points = 0;
  PointId from = 0;          // domain ids realising the diameter
  PointId to = 0;
  std::vector<PointId> path; // domain ids, consecutive steps ≤ path_scale
  bool exact = true;
};

struct LightnessOptions {
  WindowMode windows = WindowMode::Ball;
  ComponentOptions components;
  unsigned threads = 1;
  double kappa = 4.0;
  double bounded_slope = 0.1;
  double diverging_slope = 0.3;
  /// Consecutive constants may dip by this factor inside a diverging trend.
  double monotone_slack = 0.9;
  /// Domain pairs used by the Lipschitz estimate before net subsampling.
  std::size_t lipschitz_cap = 4096;
};

struct ScaleResult {
  double constant = 0.0;
  Witness witness;
  std::size_t windows_tested = 0;
  bool exact = true;
};

/// C(r) = max over windows W of (max r-component diameter of f^{-1}(W)) / r.
ScaleResult ll_constant_at_scale(const SampledMap& map, double r, const LightnessOptions& opts = {});

/// Recomputes the witness component diameter from scratch.
double evaluate_witness(const SampledMap& map, const Witness& witness,
                        const ComponentOptions& opts = {});

enum class Classification { Bounded, Diverging, Inconclusive };
std::string to_string(Classification c);

struct LipschitzEstimate {
  double max_ratio = 0.0;  // Lipschitz constant
  double min_ratio = 0.0;  // co-Lipschitz constant (bi-Lipschitz lower bound)
  bool exact = true;
  std::size_t sample = 0;  // domain points used
};

LipschitzEstimate lipschitz_constant(const SampledMap& map, std::size_t cap = 4096);

struct LightnessProfile {
  std::string map_name;
  WindowMode windows = WindowMode::Ball;
  std::vector<double> scales;     // ladder order (decreasing)
  std::vector<double> constants;  // C(r_j)
  std::vector<Witness> witnesses;
  LipschitzEstimate lipschitz;
  double slope = 0.0;             // least squares of log C against log(1/r)
  Classification classification = Classification::Inconclusive;
  bool exact = true;

  double max_constant() const;
};

/// Least-squares slope of log(values) against log(1/scales), skipping zeros.
double loglog_slope(const std::vector<double>& scales, const std::vector<double>& values);
Classification classify(const std::vector<double>& scales, const std::vector<double>& constants,
                        const LightnessOptions& opts);

/// Per-scale constants over a certified ladder. Throws std::domain_error when
/// a scale is below kappa·resolution of the domain.
LightnessProfile ll_profile(const SampledMap& map, const ScaleLadder& ladder,
                            const LightnessOptions& opts = {});

}  // namespace lipdim
