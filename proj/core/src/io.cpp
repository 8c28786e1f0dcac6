#include "lipdim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "lipdim/constructions.hpp"

namespace lipdim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Metric rules

json rule_to_json(const MetricRule& rule) {
  json j{{"offset", rule.offset()}};
  json params = json::object();
  switch (rule.kind()) {
    case MetricKind::Euclidean:
      j["kind"] = "euclidean";
      params["dim"] = rule.width();
      break;
    case MetricKind::Scaled:
      j["kind"] = "scaled";
      params["lambda"] = rule.parameter();
      params["base"] = rule_to_json(*rule.left());
      break;
    case MetricKind::Snowflake:
      j["kind"] = "snowflake";
      params["alpha"] = rule.parameter();
      params["base"] = rule_to_json(*rule.left());
      break;
    case MetricKind::Koranyi:
      j["kind"] = "koranyi";
      break;
    case MetricKind::UltrametricWords:
      j["kind"] = "ultrametric_words";
      params["depth"] = rule.width();
      break;
    case MetricKind::TreePath:
      j["kind"] = "tree_path";
      params["parent"] = rule.tree()->parent();
      params["edge_length"] = rule.tree()->edge_length();
      break;
    case MetricKind::ProductSup:
      j["kind"] = "product_sup";
      params["left"] = rule_to_json(*rule.left());
      params["right"] = rule_to_json(*rule.right());
      break;
    case MetricKind::ExplicitMatrix:
      j["kind"] = "explicit_matrix";
      params["n"] = rule.matrix()->n;
      break;
  }
  j["params"] = params;
  return j;
}

RulePtr rule_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const std::size_t offset = j.value("offset", std::size_t{0});
    const json params = j.value("params", json::object());
    if (kind == "euclidean") return euclidean(params.at("dim").get<std::size_t>(), offset);
    if (kind == "scaled") return scaled(params.at("lambda").get<double>(), rule_from_json(params.at("base")));
    if (kind == "snowflake") return snowflake(params.at("alpha").get<double>(), rule_from_json(params.at("base")));
    if (kind == "koranyi") return koranyi(offset);
    if (kind == "ultrametric_words") return ultrametric_words(params.at("depth").get<std::size_t>(), offset);
    if (kind == "tree_path") {
      auto tree = std::make_shared<const TreeData>(params.at("parent").get<std::vector<long>>(),
                                                   params.at("edge_length").get<std::vector<double>>());
      return tree_path(std::move(tree), offset);
    }
    if (kind == "product_sup")
      return product_sup(rule_from_json(params.at("left")), rule_from_json(params.at("right")));
    if (kind == "explicit_matrix") {
      auto m = std::make_shared<DistanceMatrix>();
      m->n = params.at("n").get<std::size_t>();
      m->values = params.at("values").get<std::vector<double>>();
      if (m->values.size() != m->n * m->n) throw IoError("explicit matrix has the wrong number of entries");
      return explicit_matrix(std::move(m), offset);
    }
    throw IoError("unknown metric kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed metric description: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Text helpers

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const fs::path& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw IoError(path.string() + ":" + std::to_string(line) + ": not a number '" + text + "'");
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw IoError(path.string() + ":" + std::to_string(no) + ": expected " +
                    std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, path, no));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string csv_header(const std::string& first, const std::string& prefix, std::size_t k) {
  std::string h = first;
  for (std::size_t a = 1; a <= k; ++a) h += "," + prefix + std::to_string(a);
  return h + "\n";
}

PointId as_id(double v, const fs::path& path) {
  const auto id = static_cast<PointId>(v);
  if (static_cast<double>(id) != v) throw IoError(path.string() + ": non-integer id");
  return id;
}

}  // namespace

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

void write_space(const FiniteMetricSpace& space, const fs::path& csv) {
  const std::size_t w = space.record_width();
  std::string text = csv_header("id", "x", w);
  for (std::size_t i = 0; i < space.size(); ++i) {
    text += std::to_string(space.id(i));
    for (double c : space.coords(i)) text += "," + format_double(c);
    text += "\n";
  }
  write_text(csv, text);

  json meta{{"schema_version", kSchemaVersion},
            {"metric", rule_to_json(*space.rule())},
            {"record_width", w},
            {"points", space.size()},
            {"resolution", space.resolution()}};
  // Explicit matrices live next to the cloud.
  std::function<void(json&, const MetricRule&)> attach = [&](json& j, const MetricRule& rule) {
    if (rule.kind() == MetricKind::ExplicitMatrix) {
      fs::path mpath = csv;
      mpath.replace_extension(".matrix.csv");
      const auto& m = *rule.matrix();
      std::string mt;
      for (std::size_t r = 0; r < m.n; ++r) {
        for (std::size_t c = 0; c < m.n; ++c) mt += (c ? "," : "") + format_double(m.at(r, c));
        mt += "\n";
      }
      write_text(mpath, mt);
      j["params"]["matrix_file"] = mpath.filename().string();
    }
    if (rule.left()) attach(j["params"][rule.kind() == MetricKind::ProductSup ? "left" : "base"], *rule.left());
    if (rule.right()) attach(j["params"]["right"], *rule.right());
  };
  attach(meta["metric"], *space.rule());
  write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

FiniteMetricSpace read_space(const fs::path& csv) {
  Table t = read_table(csv);
  if (t.header.empty() || t.header.front() != "id") throw IoError(csv.string() + ": first column must be 'id'");
  const std::size_t w = t.header.size() - 1;
  std::vector<PointId> ids;
  std::vector<double> coords;
  for (const auto& row : t.rows) {
    ids.push_back(as_id(row[0], csv));
    coords.insert(coords.end(), row.begin() + 1, row.end());
  }
  RulePtr rule = euclidean(w);
  double resolution = 0.0;
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    json meta = read_json(side);
    if (meta.value("schema_version", 0) != kSchemaVersion)
      throw IoError(side.string() + ": unsupported schema_version");
    if (!meta.contains("metric")) throw IoError(side.string() + ": missing 'metric'");
    std::function<void(json&)> load = [&](json& j) {
      if (!j.is_object()) return;
      if (j.contains("params") && j["params"].contains("matrix_file")) {
        const fs::path mpath = csv.parent_path() / j["params"]["matrix_file"].get<std::string>();
        std::ifstream in(mpath);
        if (!in) throw IoError("cannot read " + mpath.string());
        std::vector<double> values;
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
          ++no;
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (line.empty()) continue;
          for (const auto& c : split(line)) values.push_back(parse_number(c, mpath, no));
        }
        j["params"]["values"] = values;
      }
      if (j.contains("params"))
        for (const char* key : {"base", "left", "right"})
          if (j["params"].contains(key)) load(j["params"][key]);
    };
    load(meta["metric"]);
    rule = rule_from_json(meta["metric"]);
    resolution = meta.value("resolution", 0.0);
  }
  try {
    return FiniteMetricSpace(std::move(ids), std::move(coords), w, rule, resolution);
  } catch (const std::domain_error& e) {
    throw IoError(csv.string() + ": " + e.what());
  }
}

void write_pairing(const SampledMap& map, const fs::path& csv) {
  map.validate();
  const auto& cod = *map.codomain;
  const std::size_t k = cod.record_width();
  std::string text = csv_header("id", "y", k);
  for (std::size_t i = 0; i < map.domain->size(); ++i) {
    text += std::to_string(map.domain->id(i));
    for (double c : cod.coords(map.pairing[i])) text += "," + format_double(c);
    text += "\n";
  }
  write_text(csv, text);
}

SampledMap read_pairing(SpacePtr domain, const fs::path& csv, std::string name) {
  Table t = read_table(csv);
  if (t.header.empty() || t.header.front() != "id") throw IoError(csv.string() + ": first column must be 'id'");
  const std::size_t k = t.header.size() - 1;
  std::unordered_map<PointId, std::size_t> row_of;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const PointId id = as_id(t.rows[r][0], csv);
    if (!row_of.emplace(id, r).second) throw IoError(csv.string() + ": duplicate pairing row for id " + std::to_string(id));
  }
  std::vector<double> images(domain->size() * k);
  for (std::size_t i = 0; i < domain->size(); ++i) {
    auto it = row_of.find(domain->id(i));
    if (it == row_of.end())
      throw IoError(csv.string() + ": missing pairing row for id " + std::to_string(domain->id(i)));
    for (std::size_t a = 0; a < k; ++a) images[i * k + a] = t.rows[it->second][a + 1];
  }
  if (row_of.size() != domain->size()) throw IoError(csv.string() + ": pairing rows for unknown ids");
  return map_from_images(std::move(name), std::move(domain), images, k);
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const Witness& w, const FiniteMetricSpace& codomain) {
  json win{{"kind", to_string(w.window.kind)}};
  if (w.window.kind == WindowMode::Grid) {
    win["lattice"] = w.window.lattice;
    win["cell"] = w.window.cell;
    win["side"] = w.window.side;
  } else if (!codomain.empty()) {
    win["center"] = codomain.id(w.window.center);
    win["radius"] = w.window.radius;
  }
  return json{{"scale", w.scale},
              {"path_scale", w.path_scale},
              {"diameter", w.diameter},
              {"constant", w.constant},
              {"window", win},
              {"window_points", w.window_points},
              {"preimage_points", w.preimage_points},
              {"from", w.from},
              {"to", w.to},
              {"path", w.path},
              {"exact", w.exact}};
}

json to_json(const LightnessProfile& p, const FiniteMetricSpace& codomain) {
  json witnesses = json::array();
  for (const auto& w : p.witnesses) witnesses.push_back(to_json(w, codomain));
  return json{{"schema_version", kSchemaVersion},
              {"map", p.map_name},
              {"windows", to_string(p.windows)},
              {"scales", p.scales},
              {"C", p.constants},
              {"lipschitz",
               {{"max_ratio", p.lipschitz.max_ratio},
                {"min_ratio", p.lipschitz.min_ratio},
                {"exact", p.lipschitz.exact},
                {"sample", p.lipschitz.sample}}},
              {"slope", p.slope},
              {"classification", to_string(p.classification)},
              {"exact", p.exact},
              {"witnesses", witnesses}};
}

std::string profile_series_csv(const LightnessProfile& p) {
  std::string text = "scale,C\n";
  for (std::size_t j = 0; j < p.scales.size(); ++j)
    text += format_double(p.scales[j]) + "," + format_double(p.constants[j]) + "\n";
  return text;
}

json to_json(const Dendrogram& d, const FiniteMetricSpace& space) {
  json merges = json::array();
  for (const auto& m : d.merges)
    merges.push_back({{"scale", m.scale},
                      {"left", m.left},
                      {"right", m.right},
                      {"merged", m.merged},
                      {"diameter", m.diameter},
                      {"diameter_exact", m.diameter_exact}});
  return json{{"schema_version", kSchemaVersion},
              {"leaves", space.ids()},
              {"merges", merges},
              {"approximate", d.approximate}};
}

std::string partition_csv(const ComponentPartition& p, const FiniteMetricSpace& space,
                          const std::vector<std::size_t>& members) {
  std::string text = "id,component,scale\n";
  const std::string scale = format_double(p.r);
  for (std::size_t a = 0; a < p.component.size(); ++a) {
    const std::size_t pos = members.empty() ? a : members[a];
    text += std::to_string(space.id(pos)) + "," + std::to_string(p.component[a]) + "," + scale + "\n";
  }
  return text;
}

json to_json(const DimensionReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"estimator", r.estimator},
              {"scales", r.scales},
              {"values", r.values},
              {"table", r.table},
              {"estimate", r.estimate},
              {"verdict", r.verdict},
              {"notes", r.notes},
              {"exact", r.exact}};
}

}  // namespace lipdim
