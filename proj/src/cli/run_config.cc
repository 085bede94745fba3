#include "subevent/cli/run_config.h"

#include <fstream>

#include <fmt/format.h>

#include "subevent/config_value.h"
#include "subevent/errors.h"
#include "subevent/labeler/model_io.h"

namespace subevent::cli {
namespace {

using nlohmann::json;

std::vector<synth::SubEventType> ParseTypes(const json &value) {
  if (!value.is_array()) throw ConfigError("config key 'types' must be an array");
  std::vector<synth::SubEventType> types;
  for (const auto &item : value) {
    synth::SubEventType t;
    if (item.is_string()) {
      t.name = item.get<std::string>();
    } else if (item.is_object()) {
      for (const auto &[k, v] : item.items()) {
        if (k == "name") t.name = ConfigValue<std::string>("types.name", v);
        else if (k == "mean_length") t.mean_length = ConfigValue<double>("types.mean_length", v);
        else if (k == "intensity") t.intensity = ConfigValue<double>("types.intensity", v);
        else throw ConfigError(fmt::format("unknown key 'types.{}'", k));
      }
    } else {
      throw ConfigError("entries of 'types' must be names or objects");
    }
    types.push_back(std::move(t));
  }
  return types;
}

bool SetSynthField(synth::SynthConfig &s, const std::string &key, const json &v) {
  if (key == "n_streams") s.n_streams = ConfigValue<std::size_t>(key, v);
  else if (key == "n_bins") s.n_bins = ConfigValue<std::size_t>(key, v);
  else if (key == "interval") s.interval = ConfigValue<std::int64_t>(key, v);
  else if (key == "start_time") s.start_time = ConfigValue<std::int64_t>(key, v);
  else if (key == "base_rate") s.base_rate = ConfigValue<double>(key, v);
  else if (key == "burst_rate") s.burst_rate = ConfigValue<double>(key, v);
  else if (key == "types") s.types = ParseTypes(v);
  else if (key == "spans_per_stream") s.spans_per_stream = ConfigValue<std::size_t>(key, v);
  else if (key == "cues_per_type") s.cues_per_type = ConfigValue<std::size_t>(key, v);
  else if (key == "noise_vocab") s.noise_vocab = ConfigValue<std::size_t>(key, v);
  else if (key == "zipf_exponent") s.zipf_exponent = ConfigValue<double>(key, v);
  else if (key == "cue_prob") s.cue_prob = ConfigValue<double>(key, v);
  else if (key == "cue_leak") s.cue_leak = ConfigValue<double>(key, v);
  else if (key == "rate_decay") s.rate_decay = ConfigValue<double>(key, v);
  else if (key == "cue_decay") s.cue_decay = ConfigValue<double>(key, v);
  else if (key == "reaction_prob") s.reaction_prob = ConfigValue<double>(key, v);
  else if (key == "reaction_tokens") s.reaction_tokens = ConfigValue<std::size_t>(key, v);
  else if (key == "distractor_bursts") s.distractor_bursts = ConfigValue<std::size_t>(key, v);
  else if (key == "min_words") s.min_words = ConfigValue<std::size_t>(key, v);
  else if (key == "max_words") s.max_words = ConfigValue<std::size_t>(key, v);
  else if (key == "url_prob") s.url_prob = ConfigValue<double>(key, v);
  else if (key == "mention_prob") s.mention_prob = ConfigValue<double>(key, v);
  else if (key == "hashtag_prob") s.hashtag_prob = ConfigValue<double>(key, v);
  else if (key == "synth_seed") s.seed = ConfigValue<std::uint64_t>(key, v);
  else return false;
  return true;
}

}  // namespace

void RunConfig::Set(const std::string &key, const json &value) {
  if (labeler::SetModelConfigField(model, key, value)) return;
  if (SetSynthField(synth, key, value)) return;
  if (key == "n_train") n_train = ConfigValue<std::size_t>(key, value);
  else if (key == "n_dev") n_dev = ConfigValue<std::size_t>(key, value);
  else if (key == "burst_threshold") burst.threshold = ConfigValue<double>(key, value);
  else if (key == "burst_window") burst.window = ConfigValue<std::size_t>(key, value);
  else if (key == "train_dir") train_dir = ConfigValue<std::string>(key, value);
  else if (key == "dev_dir") dev_dir = ConfigValue<std::string>(key, value);
  else if (key == "test_dir") test_dir = ConfigValue<std::string>(key, value);
  else if (key == "out_dir") out_dir = ConfigValue<std::string>(key, value);
  else throw ConfigError(fmt::format("unknown config key '{}'", key));
}

void RunConfig::SetFromString(const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("expected key=value, got '{}'", assignment));
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  Set(key, value);
}

void RunConfig::Validate() const {
  model.Validate();
  synth.Validate();
  if (n_train == 0) throw ConfigError("n_train must be positive");
  if (n_train + n_dev > synth.n_streams) {
    throw ConfigError(fmt::format("n_train + n_dev = {} exceeds n_streams = {}", n_train + n_dev,
                                  synth.n_streams));
  }
  if (!(burst.threshold > 0.0)) throw ConfigError("burst_threshold must be positive");
}

nlohmann::ordered_json RunConfig::ToJson() const {
  nlohmann::ordered_json j = labeler::ModelConfigToJson(model);
  j["n_streams"] = synth.n_streams;
  j["n_bins"] = synth.n_bins;
  j["interval"] = synth.interval;
  j["start_time"] = synth.start_time;
  j["base_rate"] = synth.base_rate;
  j["burst_rate"] = synth.burst_rate;
  nlohmann::ordered_json types = nlohmann::ordered_json::array();
  for (const auto &t : synth.types) {
    types.push_back({{"name", t.name}, {"mean_length", t.mean_length}, {"intensity", t.intensity}});
  }
  j["types"] = types;
  j["spans_per_stream"] = synth.spans_per_stream;
  j["cues_per_type"] = synth.cues_per_type;
  j["noise_vocab"] = synth.noise_vocab;
  j["zipf_exponent"] = synth.zipf_exponent;
  j["cue_prob"] = synth.cue_prob;
  j["cue_leak"] = synth.cue_leak;
  j["rate_decay"] = synth.rate_decay;
  j["cue_decay"] = synth.cue_decay;
  j["reaction_prob"] = synth.reaction_prob;
  j["reaction_tokens"] = synth.reaction_tokens;
  j["distractor_bursts"] = synth.distractor_bursts;
  j["min_words"] = synth.min_words;
  j["max_words"] = synth.max_words;
  j["url_prob"] = synth.url_prob;
  j["mention_prob"] = synth.mention_prob;
  j["hashtag_prob"] = synth.hashtag_prob;
  j["synth_seed"] = synth.seed;
  j["n_train"] = n_train;
  j["n_dev"] = n_dev;
  j["burst_threshold"] = burst.threshold;
  j["burst_window"] = burst.window;
  j["train_dir"] = train_dir;
  j["dev_dir"] = dev_dir;
  j["test_dir"] = test_dir;
  j["out_dir"] = out_dir;
  return j;
}

RunConfig LoadRunConfig(const std::filesystem::path &file, const std::vector<std::string> &overrides) {
  RunConfig config;
  if (!file.empty()) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", file.string()));
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error &e) {
      throw ConfigError(fmt::format("{}: {}", file.string(), e.what()));
    }
    if (!j.is_object()) throw ConfigError(fmt::format("{}: expected a flat JSON object", file.string()));
    for (const auto &[key, value] : j.items()) config.Set(key, value);
  }
  for (const auto &o : overrides) config.SetFromString(o);
  return config;
}

void WriteResolvedConfig(const std::filesystem::path &dir, const RunConfig &config) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / kResolvedConfigFile, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / kResolvedConfigFile).string()));
  out << config.ToJson().dump(2) << '\n';
}

}  // namespace subevent::cli
