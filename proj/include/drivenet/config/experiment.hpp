/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/sha.h>

#include "drivenet/dataio/synthetic.hpp"
#include "drivenet/eval/report.hpp"
#include "drivenet/train/trainer.hpp"

namespace drivenet::config {

enum class Profile { desk, paper };

inline std::string_view to_string(Profile p) { return p == Profile::paper ? "paper" : "desk"; }

inline Profile parse_profile(std::string_view s) {
  if (s == "desk") return Profile::desk;
  if (s == "paper") return Profile::paper;
  throw ConfigError("unknown profile: " + std::string(s));
}

enum class ValueKind { integer, real, text, boolean, int_list, letters };

struct KeySpec {
  const char* key;  // "section.name"
  ValueKind kind;
  const char* desk;
  const char* paper;
};

inline constexpr const char* kSections[] = {"data", "augment", "model", "train", "eval"};

// clang-format off
inline const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"data.root",                     ValueKind::text,     "data",           "data"},
      {"data.synthetic_clips",          ValueKind::integer,  "500",            "500"},
      {"data.synthetic_seed",           ValueKind::integer,  "7",              "7"},
      {"data.frame_size",               ValueKind::integer,  "64",             "128"},
      {"data.noise_sigma",              ValueKind::real,     "4",              "4"},
      {"data.drivers",                  ValueKind::integer,  "10",             "10"},
      {"data.split_ratio",              ValueKind::real,     "0.8",            "0.8"},
      {"data.split_seed",               ValueKind::integer,  "7",              "7"},
      {"data.val_fraction",             ValueKind::real,     "0",              "0"},
      {"augment.preset",                ValueKind::letters,  "E",              "E"},
      {"augment.flip_prob",             ValueKind::real,     "0.5",            "0.5"},
      {"augment.translate_max",         ValueKind::integer,  "4",              "4"},
      {"augment.cutout_side",           ValueKind::integer,  "16",             "32"},
      {"augment.augmix_width",          ValueKind::integer,  "3",              "3"},
      {"augment.augmix_depth",          ValueKind::integer,  "3",              "3"},
      {"augment.augmix_alpha",          ValueKind::real,     "1",              "1"},
      {"augment.smoothing",             ValueKind::real,     "0.1",            "0.1"},
      {"model.scenario",                ValueKind::text,     "both",           "both"},
      {"model.backbone",                ValueKind::text,     "tiny_conv",      "tiny_conv"},
      {"model.backbone_channels",       ValueKind::int_list, "4,8,8,16",       "16,32,64,128"},
      {"model.external_channels",       ValueKind::integer,  "1024",           "1024"},
      {"model.appearance_input_size",   ValueKind::integer,  "64",             "128"},
      {"model.appearance_lstm_units",   ValueKind::integer,  "32",             "512"},
      {"model.attention_units",         ValueKind::integer,  "32",             "512"},
      {"model.flow_input_height",       ValueKind::integer,  "64",             "128"},
      {"model.flow_input_width",        ValueKind::integer,  "192",            "384"},
      {"model.flow_lstm_units",         ValueKind::integer,  "32",             "128"},
      {"model.fusion_dense_units",      ValueKind::integer,  "64",             "512"},
      {"model.fusion_dropout",          ValueKind::real,     "0.45",           "0.45"},
      {"model.dropblock_block_size",    ValueKind::integer,  "5",              "5"},
      {"model.dropblock_keep_prob",     ValueKind::real,     "0.9",            "0.9"},
      {"train.epochs",                  ValueKind::integer,  "30",             "320"},
      {"train.batch_size",              ValueKind::integer,  "5",              "5"},
      {"train.learning_rate",           ValueKind::real,     "0.0003",         "0.0003"},
      {"train.beta1",                   ValueKind::real,     "0.9",            "0.9"},
      {"train.beta2",                   ValueKind::real,     "0.999",          "0.999"},
      {"train.epsilon",                 ValueKind::real,     "1e-08",          "1e-08"},
      {"train.loss",                    ValueKind::text,     "isda",           "isda"},
      {"train.label_smoothing",         ValueKind::real,     "0",              "0"},
      {"train.isda_lambda0",            ValueKind::real,     "0.5",            "0.5"},
      {"train.seed",                    ValueKind::integer,  "7",              "7"},
      {"train.workers",                 ValueKind::integer,  "1",              "1"},
      {"eval.horizons",                 ValueKind::int_list, "0,-1,-2,-3,-4",  "0,-1,-2,-3,-4"},
      {"eval.otc",                      ValueKind::boolean,  "false",          "false"},
      {"eval.k_folds",                  ValueKind::integer,  "5",              "5"},
      {"eval.presets",                  ValueKind::letters,  "ABCDE",          "ABCDE"},
      {"eval.formats",                  ValueKind::text,     "csv,json",       "csv,json"},
  };
  return specs;
}
// clang-format on

/// Keys that never change results and are left out of the config hash.
inline bool hash_exempt(const std::string& key) { return key == "train.workers"; }

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// 1-based line of `key` inside `[section]` (or of the header when `key` is
/// empty); 0 when not found.
inline int line_of(const std::filesystem::path& path, const std::string& section, const std::string& key) {
  std::ifstream in(path);
  std::string line, current;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return n;
      continue;
    }
    if (!key.empty() && current == section && trim(t.substr(0, t.find('='))) == key) return n;
  }
  return 0;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

inline long parse_long(const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data() + (!v.empty() && v[0] == '+'), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw std::invalid_argument("expected an integer");
  return out;
}

inline double parse_double(const std::string& v) {
  double out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data() + (!v.empty() && v[0] == '+'), end, out);
  if (ec != std::errc() || p != end || v.empty() || !std::isfinite(out)) throw std::invalid_argument("expected a number");
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// Parses `raw` as `kind` and returns its canonical spelling.
inline std::string canonicalize(ValueKind kind, const std::string& raw) {
  const std::string v = trim(raw);
  switch (kind) {
    case ValueKind::integer: return std::to_string(parse_long(v));
    case ValueKind::real: return format_double(parse_double(v));
    case ValueKind::text:
      if (v.empty()) throw std::invalid_argument("expected a non-empty value");
      return v;
    case ValueKind::boolean:
      if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
      if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
      throw std::invalid_argument("expected true or false");
    case ValueKind::int_list: {
      std::string out;
      for (const auto& item : split(v, ',')) out += (out.empty() ? "" : ",") + std::to_string(parse_long(item));
      if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
      return out;
    }
    case ValueKind::letters: {
      std::string out;
      for (char c : v) {
        if (c == ',' || c == ' ') continue;
        const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (u < 'A' || u > 'E') throw std::invalid_argument("expected preset letters A-E");
        out += u;
      }
      if (out.empty()) throw std::invalid_argument("expected preset letters A-E");
      return out;
    }
  }
  return v;
}

inline std::vector<int> int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(parse_long(s)));
  return out;
}

}  // namespace detail

/// Flat map of every effective setting, keyed "section.name". Values are
/// stored in canonical spelling so the resolved text and its hash do not
/// depend on how a value was written.
class ExperimentConfig {
public:
  explicit ExperimentConfig(Profile p = Profile::desk) : profile_(p) {
    for (const auto& s : key_specs()) values_[s.key] = detail::canonicalize(s.kind, p == Profile::paper ? s.paper : s.desk);
  }

  Profile profile() const { return profile_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  static const KeySpec& spec(const std::string& key) {
    for (const auto& s : key_specs())
      if (key == s.key) return s;
    throw ConfigError("unknown config key: " + key);
  }

  /// `origin` names where the value came from for diagnostics.
  void set(const std::string& key, const std::string& value, const std::string& origin = "override") {
    const auto& s = spec(key);
    try {
      values_[key] = detail::canonicalize(s.kind, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(origin + ": " + key + ": " + e.what() + ", got '" + value + "'");
    }
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
  }
  long get_int(const std::string& key) const { return detail::parse_long(get(key)); }
  double get_real(const std::string& key) const { return detail::parse_double(get(key)); }
  bool get_bool(const std::string& key) const { return get(key) == "true"; }

  /// "section.key=value"
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + assignment);
    set(detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1), "override");
  }

  /// Reads an INI file. Keys outside a section are rejected except
  /// `profile`, which is consumed by resolve().
  void load_file(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    auto where = [&](const std::string& section, const std::string& key) {
      return path.string() + ":" + std::to_string(detail::line_of(path, section, key)) + ": ";
    };
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        if (section == "profile") continue;
        throw ConfigError(where("", section) + "key outside a section: " + section);
      }
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
        throw ConfigError(where(section, "") + "unknown section [" + section + "]");
      for (const auto& [key, node] : body) {
        const std::string full = section + "." + key;
        try {
          spec(full);
        } catch (const ConfigError&) {
          throw ConfigError(where(section, key) + "unknown key " + key + " in [" + section + "]");
        }
        set(full, node.get_value<std::string>(), path.string() + ":" + std::to_string(detail::line_of(path, section, key)));
      }
    }
  }

  /// Applies PREFIX<SECTION>__<KEY> variables, e.g. DRIVENET_TRAIN__EPOCHS.
  void load_env(const std::function<const char*(const char*)>& getenv_fn, const std::string& prefix = "DRIVENET_") {
    for (const auto& s : key_specs()) {
      std::string name = prefix;
      for (const char* c = s.key; *c; ++c)
        name += *c == '.' ? std::string("__") : std::string(1, static_cast<char>(std::toupper(*c)));
      if (const char* v = getenv_fn(name.c_str())) set(s.key, v, "environment " + name);
    }
  }

  /// INI text with every key in section order; loading it reproduces this
  /// configuration exactly.
  std::string resolved_text(bool include_exempt = true) const {
    std::ostringstream out;
    out << "profile = " << to_string(profile_) << "\n";
    for (const char* section : kSections) {
      out << "\n[" << section << "]\n";
      const std::string prefix = std::string(section) + ".";
      for (const auto& s : key_specs()) {
        const std::string key = s.key;
        if (key.rfind(prefix, 0) != 0) continue;
        if (!include_exempt && hash_exempt(key)) continue;
        out << key.substr(prefix.size()) << " = " << values_.at(key) << "\n";
      }
    }
    return out.str();
  }

  /// Hex SHA-256 of the resolved text without hash-exempt keys.
  std::string hash() const {
    const std::string text = resolved_text(false);
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned char b : digest) {
      out += hex[b >> 4];
      out += hex[b & 15];
    }
    return out;
  }

  void write_resolved(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << resolved_text();
  }

  SyntheticConfig synthetic() const {
    SyntheticConfig c;
    c.n_clips = static_cast<int>(get_int("data.synthetic_clips"));
    c.seed = static_cast<std::uint64_t>(get_int("data.synthetic_seed"));
    c.frame_size = static_cast<int>(get_int("data.frame_size"));
    c.noise_sigma = get_real("data.noise_sigma");
    c.n_drivers = static_cast<int>(get_int("data.drivers"));
    return c;
  }

  augment::AugPipelineConfig augment_pipeline() const {
    augment::AugPipelineConfig a;
    const std::string& preset = get("augment.preset");
    if (preset.size() != 1) throw ConfigError("augment.preset: expected a single letter A-E");
    a.enabled = augment::preset_ops(preset[0]);
    a.flip_prob = get_real("augment.flip_prob");
    a.translate_max = static_cast<int>(get_int("augment.translate_max"));
    a.cutout.side = static_cast<int>(get_int("augment.cutout_side"));
    a.augmix.width = static_cast<int>(get_int("augment.augmix_width"));
    a.augmix.max_depth = static_cast<int>(get_int("augment.augmix_depth"));
    a.augmix.alpha = get_real("augment.augmix_alpha");
    a.smoothing = get_real("augment.smoothing");
    return a;
  }

  net::ModelConfig model() const {
    net::ModelConfig m;
    m.scenario = net::parse_scenario(get("model.scenario"));
    m.backbone.kind = net::parse_backbone(get("model.backbone"));
    m.backbone.channels = detail::int_list(get("model.backbone_channels"));
    m.backbone.external_channels = static_cast<int>(get_int("model.external_channels"));
    auto& d = m.dims;
    d.appearance_input_size = static_cast<int>(get_int("model.appearance_input_size"));
    d.appearance_lstm_units = static_cast<int>(get_int("model.appearance_lstm_units"));
    d.attention_units = static_cast<int>(get_int("model.attention_units"));
    d.flow_input_height = static_cast<int>(get_int("model.flow_input_height"));
    d.flow_input_width = static_cast<int>(get_int("model.flow_input_width"));
    d.flow_lstm_units = static_cast<int>(get_int("model.flow_lstm_units"));
    d.fusion_dense_units = static_cast<int>(get_int("model.fusion_dense_units"));
    d.fusion_dropout = get_real("model.fusion_dropout");
    m.dropblock.block_size = static_cast<int>(get_int("model.dropblock_block_size"));
    m.dropblock.keep_prob = get_real("model.dropblock_keep_prob");
    return m;
  }

  train::TrainConfig train() const {
    train::TrainConfig t;
    t.epochs = static_cast<int>(get_int("train.epochs"));
    t.batch_size = static_cast<int>(get_int("train.batch_size"));
    t.adam.learning_rate = get_real("train.learning_rate");
    t.adam.beta1 = get_real("train.beta1");
    t.adam.beta2 = get_real("train.beta2");
    t.adam.epsilon = get_real("train.epsilon");
    t.loss = train::parse_loss(get("train.loss"));
    t.label_smoothing = get_real("train.label_smoothing");
    t.isda_lambda0 = get_real("train.isda_lambda0");
    t.seed = static_cast<std::uint64_t>(get_int("train.seed"));
    t.workers = static_cast<int>(get_int("train.workers"));
    t.val_fraction = get_real("data.val_fraction");
    t.model = model();
    t.augment = augment_pipeline();
    t.config_hash = hash();
    return t;
  }

  eval::EvalOptions eval_options() const {
    eval::EvalOptions e;
    e.horizons = detail::int_list(get("eval.horizons"));
    e.otc = get_bool("eval.otc");
    e.otc_cutout.side = static_cast<int>(get_int("augment.cutout_side"));
    e.seed = static_cast<std::uint64_t>(get_int("train.seed"));
    e.workers = static_cast<int>(get_int("train.workers"));
    return e;
  }

  std::set<eval::ReportFormat> report_formats() const {
    std::set<eval::ReportFormat> out;
    for (const auto& f : detail::split(get("eval.formats"), ',')) out.insert(eval::parse_report_format(f));
    return out;
  }

  /// Checks every cross-field constraint; the message names the field.
  void validate() const {
    try {
      const auto t = train();
      t.validate();
      augment::Augmentor check(t.augment);
      const int fs = static_cast<int>(get_int("data.frame_size"));
      if (fs < 16) throw ConfigError("data.frame_size must be >= 16");
      const int ai = t.model.dims.appearance_input_size;
      t.augment.cutout.validate(std::min(fs, ai), std::min(fs, ai));
      if (t.model.backbone.kind == net::BackboneKind::tiny_conv) {
        if (t.model.backbone.channels.empty()) throw ConfigError("model.backbone_channels must not be empty");
        for (int c : t.model.backbone.channels)
          if (c <= 0) throw ConfigError("model.backbone_channels must be positive");
        int s = ai;
        for (int stride : net::backbone_strides(s, t.model.backbone.channels.size())) s = net::conv_out_size(s, stride);
        t.model.dropblock.validate(s, s);
      }
      for (int h : eval_options().horizons) HorizonSpec{h};
      const double r = get_real("data.split_ratio");
      if (!(r > 0.0 && r < 1.0)) throw ConfigError("data.split_ratio must be in (0, 1)");
      if (get_int("eval.k_folds") < 2) throw ConfigError("eval.k_folds must be >= 2");
      if (get_int("train.workers") < 1) throw ConfigError("train.workers must be >= 1");
      if (get_int("data.synthetic_clips") < 5 || get_int("data.synthetic_clips") % 5 != 0)
        throw ConfigError("data.synthetic_clips must be a positive multiple of 5");
      if (get_int("data.drivers") < 1) throw ConfigError("data.drivers must be >= 1");
      report_formats();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("invalid config: ") + e.what());
    }
  }

private:
  Profile profile_;
  std::map<std::string, std::string> values_;
};

struct ResolveRequest {
  std::optional<Profile> profile;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;
  std::function<const char*(const char*)> getenv_fn = [](const char* n) { return std::getenv(n); };
};

/// Precedence, lowest first: profile defaults, environment, config file,
/// key=value overrides. The profile comes from the request, else the file's
/// top-level `profile`, else DRIVENET_PROFILE, else desk.
inline ExperimentConfig resolve(const ResolveRequest& req) {
  Profile profile = Profile::desk;
  if (req.profile) {
    profile = *req.profile;
  } else {
    std::optional<std::string> from_file;
    if (req.config_path) {
      if (!std::filesystem::exists(*req.config_path))
        throw ConfigError("config file not found: " + req.config_path->string());
      boost::property_tree::ptree tree;
      try {
        boost::property_tree::ini_parser::read_ini(req.config_path->string(), tree);
      } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(req.config_path->string() + ":" + std::to_string(e.line()) + ": " + e.message());
      }
      if (auto p = tree.get_optional<std::string>("profile")) from_file = detail::trim(*p);
    }
    if (from_file) profile = parse_profile(*from_file);
    else if (const char* e = req.getenv_fn ? req.getenv_fn("DRIVENET_PROFILE") : nullptr) profile = parse_profile(e);
  }
  ExperimentConfig cfg(profile);
  if (req.getenv_fn) cfg.load_env(req.getenv_fn);
  if (req.config_path) {
    if (!std::filesystem::exists(*req.config_path))
      throw ConfigError("config file not found: " + req.config_path->string());
    cfg.load_file(*req.config_path);
  }
  for (const auto& o : req.overrides) cfg.apply_override(o);
  cfg.validate();
  return cfg;
}

}  // namespace drivenet::config
