#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipdim/components.hpp"
#include "lipdim/dimension.hpp"
#include "lipdim/lightness.hpp"
#include "lipdim/space.hpp"

namespace lipdim {

inline constexpr int kSchemaVersion = 1;

/// File or schema problems (missing files, malformed rows, unknown fields).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that round-trips: printf "%.17g".
std::string format_double(double v);

nlohmann::json rule_to_json(const MetricRule& rule);
RulePtr rule_from_json(const nlohmann::json& j);

/// Sidecar path for a point-cloud CSV: cloud.csv -> cloud.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes `id,x1..xk` rows and the metric sidecar. Explicit matrices also
/// get `<stem>.matrix.csv`.
void write_space(const FiniteMetricSpace& space, const std::filesystem::path& csv);
/// Reads a CSV written by write_space. Without a sidecar every column is
/// treated as a Euclidean coordinate.
FiniteMetricSpace read_space(const std::filesystem::path& csv);

/// Pairing as `id,y1..yk` (domain id, image coordinates).
void write_pairing(const SampledMap& map, const std::filesystem::path& csv);
/// Builds a map with a Euclidean codomain from a pairing CSV. Every domain
/// id needs exactly one row.
SampledMap read_pairing(SpacePtr domain, const std::filesystem::path& csv, std::string name = "pairing");

nlohmann::json to_json(const Witness& w, const FiniteMetricSpace& codomain);
nlohmann::json to_json(const LightnessProfile& p, const FiniteMetricSpace& codomain);
/// `scale,C` rows.
std::string profile_series_csv(const LightnessProfile& p);
nlohmann::json to_json(const Dendrogram& d, const FiniteMetricSpace& space);
/// `id,component,scale` rows.
std::string partition_csv(const ComponentPartition& p, const FiniteMetricSpace& space,
                          const std::vector<std::size_t>& members = {});
nlohmann::json to_json(const DimensionReport& r);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lipdim
