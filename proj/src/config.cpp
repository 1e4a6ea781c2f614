#include "motkit/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mot {

namespace {

using nlohmann::json;

json load_json_object(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open config file");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError(path.string() + ": invalid JSON");
  }
  if (!j.is_object()) {
    throw ConfigError(path.string() + ": config must be a JSON object");
  }
  return j;
}

/// Merges "key=value" command-line pairs into the config object. Values are
/// parsed as integers when they look integral, as doubles otherwise.
void apply_overrides(json& j, const std::vector<std::string>& overrides,
                     const std::string& context) {
  for (const std::string& pair : overrides) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq == pair.size() - 1) {
      throw ConfigError(context + ": override '" + pair +
                        "' is not of the form key=value");
    }
    const std::string key = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);

    std::int64_t as_int = 0;
    auto [iptr, iec] =
        std::from_chars(value.data(), value.data() + value.size(), as_int);
    if (iec == std::errc() && iptr == value.data() + value.size()) {
      j[key] = as_int;
      continue;
    }
    double as_double = 0.0;
    auto [dptr, dec] =
        std::from_chars(value.data(), value.data() + value.size(), as_double);
    if (dec == std::errc() && dptr == value.data() + value.size()) {
      j[key] = as_double;
      continue;
    }
    throw ConfigError(context + ": override '" + pair +
                      "' has a non-numeric value");
  }
}

struct KeyReader {
  const json& j;
  std::string context;

  double number(const std::string& key, double fallback) const {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) {
      throw ConfigError(context + ": key '" + key + "' must be a number");
    }
    return it->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) {
      throw ConfigError(context + ": key '" + key + "' must be an integer");
    }
    return it->get<std::int64_t>();
  }

  bool has(const std::string& key) const { return j.contains(key); }

  void reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) {
        throw ConfigError(context + ": unknown config key '" + key + "'");
      }
    }
  }
};

struct KeyDoc {
  const char* key;
  const char* fallback;
  const char* description;
};

constexpr KeyDoc kConfigKeys[] = {
    {"alpha", "0.5", "weight on the position (IoU) distance"},
    {"beta", "0.5", "weight on the appearance (cosine) distance"},
    {"max_cost", "0.7", "matches costlier than this are discarded"},
    {"process_noise_pos", "1.0", "Kalman position process noise, px"},
    {"process_noise_vel", "0.5", "Kalman velocity process noise, px/frame"},
    {"measurement_noise", "2.0", "Kalman measurement noise, px"},
    {"initial_vel_uncertainty", "10.0",
     "velocity std of freshly created tracks, px/frame"},
    {"max_age", "30", "frames a Lost track survives before removal"},
    {"min_hits", "1", "matches required before a track is reported"},
    {"emb_momentum", "0.9", "EMA weight on the old track embedding"},
    {"score_floor", "0.0", "minimum detection score for track birth"},
    {"image_width", "0", "proposal clamp width, px (0 = unbounded)"},
    {"image_height", "0", "proposal clamp height, px (0 = unbounded)"},
    {"images_per_batch", "8", "frames sampled per mining batch"},
    {"window_length", "16", "consecutive-frame window for batch sampling"},
    {"min_identities", "8", "identities required for a valid batch"},
    {"min_instances", "4", "instances per identity required for a valid batch"},
    {"margin", "0.2", "triplet margin"},
    {"retry_budget", "100", "batch sampling attempts before giving up"},
};

constexpr KeyDoc kScenarioKeys[] = {
    {"width", "640", "image width, px"},
    {"height", "480", "image height, px"},
    {"objects", "8", "number of simulated objects"},
    {"frames", "100", "sequence length"},
    {"speed_min", "1.0", "minimum per-axis speed, px/frame"},
    {"speed_max", "4.0", "maximum per-axis speed, px/frame"},
    {"dropout", "0.0", "per-detection dropout probability"},
    {"jitter", "0.0", "box corner jitter sigma, px"},
    {"false_positive_rate", "0.0", "per-frame probability of a spurious box"},
    {"embedding_dim", "128", "embedding dimension"},
    {"embedding_noise", "0.0", "gaussian sigma added to identity prototypes"},
    {"seed", "(required)", "RNG seed; mandatory, no ambient randomness"},
    {"occlusions", "[]",
     "list of {\"start\": frame, \"duration\": frames, \"object\": id}"},
};

Config config_from_json(const json& j, const std::string& context) {
  const KeyReader reader{j, context};

  Config cfg;
  cfg.tracker.cost.alpha = reader.number("alpha", cfg.tracker.cost.alpha);
  cfg.tracker.cost.beta = reader.number("beta", cfg.tracker.cost.beta);
  cfg.tracker.cost.max_cost =
      reader.number("max_cost", cfg.tracker.cost.max_cost);
  cfg.tracker.kalman.process_noise_pos = reader.number(
      "process_noise_pos", cfg.tracker.kalman.process_noise_pos);
  cfg.tracker.kalman.process_noise_vel = reader.number(
      "process_noise_vel", cfg.tracker.kalman.process_noise_vel);
  cfg.tracker.kalman.measurement_noise = reader.number(
      "measurement_noise", cfg.tracker.kalman.measurement_noise);
  cfg.tracker.kalman.initial_vel_uncertainty = reader.number(
      "initial_vel_uncertainty", cfg.tracker.kalman.initial_vel_uncertainty);
  cfg.tracker.max_age =
      static_cast<int>(reader.integer("max_age", cfg.tracker.max_age));
  cfg.tracker.min_hits =
      static_cast<int>(reader.integer("min_hits", cfg.tracker.min_hits));
  cfg.tracker.emb_momentum =
      reader.number("emb_momentum", cfg.tracker.emb_momentum);
  cfg.tracker.score_floor =
      reader.number("score_floor", cfg.tracker.score_floor);
  cfg.tracker.image_width =
      reader.number("image_width", cfg.tracker.image_width);
  cfg.tracker.image_height =
      reader.number("image_height", cfg.tracker.image_height);
  cfg.mining.images_per_batch = static_cast<int>(
      reader.integer("images_per_batch", cfg.mining.images_per_batch));
  cfg.mining.window_length = static_cast<int>(
      reader.integer("window_length", cfg.mining.window_length));
  cfg.mining.min_identities = static_cast<int>(
      reader.integer("min_identities", cfg.mining.min_identities));
  cfg.mining.min_instances = static_cast<int>(
      reader.integer("min_instances", cfg.mining.min_instances));
  cfg.mining.margin = reader.number("margin", cfg.mining.margin);
  cfg.mining.retry_budget = static_cast<int>(
      reader.integer("retry_budget", cfg.mining.retry_budget));

  std::set<std::string> known;
  for (const KeyDoc& doc : kConfigKeys) known.insert(doc.key);
  reader.reject_unknown(known);

  try {
    cfg.tracker.validate();
    cfg.mining.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return cfg;
}

ScenarioParams scenario_from_json(const json& j, const std::string& context) {
  const KeyReader reader{j, context};

  ScenarioParams params;
  params.width = reader.number("width", params.width);
  params.height = reader.number("height", params.height);
  params.object_count =
      static_cast<int>(reader.integer("objects", params.object_count));
  params.frames = reader.integer("frames", params.frames);
  params.speed_min = reader.number("speed_min", params.speed_min);
  params.speed_max = reader.number("speed_max", params.speed_max);
  params.dropout_rate = reader.number("dropout", params.dropout_rate);
  params.jitter_sigma = reader.number("jitter", params.jitter_sigma);
  params.false_positive_rate =
      reader.number("false_positive_rate", params.false_positive_rate);
  params.embedding_dim =
      static_cast<int>(reader.integer("embedding_dim", params.embedding_dim));
  params.embedding_noise_sigma =
      reader.number("embedding_noise", params.embedding_noise_sigma);

  if (!reader.has("seed")) {
    throw ConfigError(context + ": missing mandatory key 'seed'");
  }
  params.seed = static_cast<std::uint64_t>(reader.integer("seed", 0));

  if (reader.has("occlusions")) {
    const json& occ = j.at("occlusions");
    if (!occ.is_array()) {
      throw ConfigError(context + ": 'occlusions' must be an array");
    }
    for (const json& ev : occ) {
      if (!ev.is_object() || !ev.contains("start") ||
          !ev.contains("duration") || !ev.contains("object") ||
          !ev["start"].is_number_integer() ||
          !ev["duration"].is_number_integer() ||
          !ev["object"].is_number_integer()) {
        throw ConfigError(
            context + ": occlusion entries need integer start/duration/object");
      }
      params.occlusions.push_back({ev["start"].get<std::int64_t>(),
                                   ev["duration"].get<std::int64_t>(),
                                   ev["object"].get<std::int64_t>()});
    }
  }

  std::set<std::string> known;
  for (const KeyDoc& doc : kScenarioKeys) known.insert(doc.key);
  reader.reject_unknown(known);

  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
  return params;
}

}  // namespace

Config default_config() { return Config{}; }

Config load_config(const std::filesystem::path& path) {
  return config_from_json(load_json_object(path), path.string());
}

Config make_config(const std::string& path,
                   const std::vector<std::string>& overrides) {
  json j = path.empty() ? json::object() : load_json_object(path);
  const std::string context = path.empty() ? "config" : path;
  apply_overrides(j, overrides, context);
  return config_from_json(j, context);
}

std::string config_documentation() {
  std::ostringstream out;
  for (const KeyDoc& doc : kConfigKeys) {
    out << "  " << doc.key << " (default " << doc.fallback << "): "
        << doc.description << '\n';
  }
  return out.str();
}

ScenarioParams load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(load_json_object(path), path.string());
}

ScenarioParams make_scenario(const std::string& path,
                             const std::vector<std::string>& overrides) {
  json j = path.empty() ? json::object() : load_json_object(path);
  const std::string context = path.empty() ? "scenario" : path;
  apply_overrides(j, overrides, context);
  return scenario_from_json(j, context);
}

std::string scenario_documentation() {
  std::ostringstream out;
  for (const KeyDoc& doc : kScenarioKeys) {
    out << "  " << doc.key << " (default " << doc.fallback << "): "
        << doc.description << '\n';
  }
  return out.str();
}

}  // namespace mot
