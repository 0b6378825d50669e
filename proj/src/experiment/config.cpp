#include <fstream>
#include <set>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

namespace wsnphm {

using nlohmann::json;

std::string_view to_string(ImputePolicy policy) noexcept {
  return policy == ImputePolicy::SentinelZero ? "sentinel-zero" : "training-mean";
}

std::string_view to_string(InstanceMode mode) noexcept {
  return mode == InstanceMode::PerLocation ? "per-location" : "global";
}

std::string_view to_string(HazardMode mode) noexcept { return mode == HazardMode::Inverted ? "inverted" : "literal"; }

void ExperimentConfig::validate() const {
  try {
    region.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (sensors.temperature < 0 || sensors.pressure < 0 || sensors.humidity < 0 || sensors.total() == 0) {
    throw ConfigError("sensor counts must be non-negative with at least one sensor");
  }
  for (double b : {leaf_battery, cluster_head_battery, distribution_battery}) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw ConfigError(fmt::format("batteries must be positive, got {}", b));
    }
  }
  if (cluster_count < 1 || cluster_count > sensors.total()) {
    throw ConfigError(fmt::format("cluster_count must be in 1..{}, got {}", sensors.total(), cluster_count));
  }
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) {
    throw ConfigError(fmt::format("min_coverage must be in [0, 1], got {}", min_coverage));
  }
  if (topologies.empty()) {
    throw ConfigError("topology list is empty");
  }
  if (algorithms.empty()) {
    throw ConfigError("algorithm list is empty");
  }
  if (t_max < 0) {
    throw ConfigError(fmt::format("t_max must be >= 0, got {}", t_max));
  }
  if (seeds < 1) {
    throw ConfigError(fmt::format("seeds must be >= 1, got {}", seeds));
  }
  radio.validate();
  if (aggregation.window < 1) {
    throw ConfigError(fmt::format("aggregation_window must be >= 1, got {}", aggregation.window));
  }
  if (dataset.rows < 1) {
    throw ConfigError(fmt::format("dataset rows must be >= 1, got {}", dataset.rows));
  }
  if (coverage_grid < 2) {
    throw ConfigError(fmt::format("coverage_grid must be >= 2, got {}", coverage_grid));
  }
  if (instance_mode == InstanceMode::PerLocation &&
      (dataset.temperature != 1 || dataset.pressure != 1 || dataset.humidity != 1)) {
    throw ConfigError("per-location instances need a dataset with one feature of each kind");
  }
  if (instance_mode == InstanceMode::Global &&
      (dataset.temperature != sensors.temperature || dataset.pressure != sensors.pressure ||
       dataset.humidity != sensors.humidity)) {
    throw ConfigError("global instances need dataset feature counts equal to the sensor counts");
  }
}

DeployOptions ExperimentConfig::deploy_options() const {
  DeployOptions options;
  options.battery = leaf_battery;
  options.min_coverage = min_coverage;
  return options;
}

TopologyConfig ExperimentConfig::topology_config() const {
  TopologyConfig topo;
  topo.cluster_count = cluster_count;
  topo.cluster_head_battery = cluster_head_battery;
  topo.distribution_battery = distribution_battery;
  return topo;
}

namespace {

// Reads the keys of one JSON object, then rejects any it did not ask for.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) {
      throw ConfigError(fmt::format("{} must be an object", label()));
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) {
        throw ConfigError(fmt::format("{} must be a number", name(key)));
      }
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(fmt::format("{} must be an integer", name(key)));
      }
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(fmt::format("{} must be a non-negative integer", name(key)));
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) {
        throw ConfigError(fmt::format("{} must be true or false", name(key)));
      }
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(const std::string& key) {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw ConfigError(fmt::format("{} must be a string", name(key)));
      }
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  std::optional<Reader> object(const std::string& key) {
    if (const json* v = find(key)) {
      return Reader(*v, name(key));
    }
    return std::nullopt;
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError(fmt::format("unknown key {}", name(key)));
      }
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? std::string("config") : path_; }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename Parse>
void read_list(Reader& reader, const std::string& key, std::vector<T>& out, Parse parse) {
  const json* v = reader.find(key);
  if (v == nullptr) {
    return;
  }
  if (!v->is_array()) {
    throw ConfigError(fmt::format("{} must be a list", reader.name(key)));
  }
  out.clear();
  for (const json& item : *v) {
    if (!item.is_string()) {
      throw ConfigError(fmt::format("{} entries must be strings", reader.name(key)));
    }
    const auto name = item.get<std::string>();
    const auto parsed = parse(name);
    if (!parsed) {
      throw ConfigError(fmt::format("{}: unknown entry '{}'", reader.name(key), name));
    }
    if (std::ranges::find(out, *parsed) != out.end()) {
      throw ConfigError(fmt::format("{}: '{}' listed twice", reader.name(key), name));
    }
    out.push_back(*parsed);
  }
}

template <typename Enum>
Enum parse_choice(const std::string& key, const std::string& value, std::initializer_list<Enum> options) {
  for (Enum option : options) {
    if (to_string(option) == value) {
      return option;
    }
  }
  throw ConfigError(fmt::format("{}: unknown value '{}'", key, value));
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig config;
  Reader root(doc, "");

  if (auto region = root.object("region")) {
    region->number("length", config.region.length);
    region->number("width", config.region.width);
    if (auto sink = region->object("sink")) {
      sink->number("x", config.region.sink.x);
      sink->number("y", config.region.sink.y);
      sink->finish();
    }
    region->finish();
  }
  if (auto sensors = root.object("sensors")) {
    sensors->integer("temperature", config.sensors.temperature);
    sensors->integer("pressure", config.sensors.pressure);
    sensors->integer("humidity", config.sensors.humidity);
    sensors->finish();
  }
  if (auto batteries = root.object("batteries")) {
    batteries->number("leaf", config.leaf_battery);
    batteries->number("cluster_head", config.cluster_head_battery);
    batteries->number("distribution", config.distribution_battery);
    batteries->finish();
  }
  root.integer("cluster_count", config.cluster_count);
  root.number("min_coverage", config.min_coverage);
  read_list(root, "topologies", config.topologies, [](const std::string& s) { return parse_topology(s); });
  read_list(root, "algorithms", config.algorithms, [](const std::string& s) { return parse_algorithm(s); });
  root.integer("t_max", config.t_max);
  root.integer("seeds", config.seeds);
  root.unsigned_integer("master_seed", config.master_seed);
  if (auto radio = root.object("radio")) {
    radio->number("e_elec", config.radio.e_elec);
    radio->number("e_rx", config.radio.e_rx);
    radio->number("e_amp", config.radio.e_amp);
    radio->number("e_da", config.radio.e_da);
    radio->finish();
  }
  root.integer("aggregation_window", config.aggregation.window);
  if (auto data = root.object("dataset")) {
    data->integer("rows", config.dataset.rows);
    data->integer("temperature", config.dataset.temperature);
    data->integer("pressure", config.dataset.pressure);
    data->integer("humidity", config.dataset.humidity);
    data->boolean("include_broken", config.dataset.include_broken);
    if (auto hazard = data->string("hazard")) {
      config.dataset.hazard_mode =
          parse_choice(data->name("hazard"), *hazard, {HazardMode::Inverted, HazardMode::Literal});
    }
    data->finish();
  }
  if (auto impute = root.string("impute")) {
    config.impute = parse_choice("impute", *impute, {ImputePolicy::SentinelZero, ImputePolicy::TrainingMean});
  }
  if (auto mode = root.string("instance_mode")) {
    config.instance_mode = parse_choice("instance_mode", *mode, {InstanceMode::PerLocation, InstanceMode::Global});
  }
  root.integer("coverage_grid", config.coverage_grid);
  if (auto output = root.object("output")) {
    if (auto dir = output->string("directory")) {
      config.output.directory = *dir;
    }
    output->boolean("charts", config.output.charts);
    output->finish();
  }
  root.finish();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open config {}", path.string()));
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& config) {
  json topologies = json::array();
  for (TopologyKind kind : config.topologies) {
    topologies.push_back(std::string(to_string(kind)));
  }
  json algorithms = json::array();
  for (AlgorithmKind kind : config.algorithms) {
    algorithms.push_back(std::string(to_string(kind)));
  }
  return {
      {"region",
       {{"length", config.region.length},
        {"width", config.region.width},
        {"sink", {{"x", config.region.sink.x}, {"y", config.region.sink.y}}}}},
      {"sensors",
       {{"temperature", config.sensors.temperature},
        {"pressure", config.sensors.pressure},
        {"humidity", config.sensors.humidity}}},
      {"batteries",
       {{"leaf", config.leaf_battery},
        {"cluster_head", config.cluster_head_battery},
        {"distribution", config.distribution_battery}}},
      {"cluster_count", config.cluster_count},
      {"min_coverage", config.min_coverage},
      {"topologies", topologies},
      {"algorithms", algorithms},
      {"t_max", config.t_max},
      {"seeds", config.seeds},
      {"master_seed", config.master_seed},
      {"radio",
       {{"e_elec", config.radio.e_elec},
        {"e_rx", config.radio.e_rx},
        {"e_amp", config.radio.e_amp},
        {"e_da", config.radio.e_da}}},
      {"aggregation_window", config.aggregation.window},
      {"dataset",
       {{"rows", config.dataset.rows},
        {"temperature", config.dataset.temperature},
        {"pressure", config.dataset.pressure},
        {"humidity", config.dataset.humidity},
        {"include_broken", config.dataset.include_broken},
        {"hazard", std::string(to_string(config.dataset.hazard_mode))}}},
      {"impute", std::string(to_string(config.impute))},
      {"instance_mode", std::string(to_string(config.instance_mode))},
      {"coverage_grid", config.coverage_grid},
      {"output", {{"directory", config.output.directory.string()}, {"charts", config.output.charts}}},
  };
}

}  // namespace wsnphm
