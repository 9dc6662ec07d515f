#include "iekf/app/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "iekf/errors.hpp"

namespace iekf::app {

namespace {

using namespace std::string_view_literals;

constexpr std::array kTopKeys = {"schema_version"sv, "mode"sv, "trials"sv,
                                 "output"sv, "scenario"sv, "filter"sv};
constexpr std::array kScenarioKeys = {"duration"sv,
                                      "dt"sv,
                                      "omega"sv,
                                      "gyro_noise_std"sv,
                                      "reference_directions"sv,
                                      "measurement_noise_std"sv,
                                      "initial_attitude_error_std"sv,
                                      "convention"sv,
                                      "seed"sv};
constexpr std::array kOmegaKeys = {"profile"sv, "offset"sv, "amplitude"sv, "frequency_hz"sv};
constexpr std::array kFilterKeys = {"max_iterations"sv, "termination_threshold"sv, "exact_J"sv,
                                    "update_variant"sv};

// Common alternative spellings, mapped to the canonical key.
constexpr std::array<std::pair<std::string_view, std::string_view>, 10> kAliases = {{
    {"epsilon", "termination_threshold"},
    {"eps", "termination_threshold"},
    {"tolerance", "termination_threshold"},
    {"threshold", "termination_threshold"},
    {"iterations", "max_iterations"},
    {"max_iter", "max_iterations"},
    {"n", "max_iterations"},
    {"variant", "update_variant"},
    {"output_path", "output"},
    {"directions", "reference_directions"},
}};

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                        std::tolower(static_cast<unsigned char>(b[j - 1]));
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (same ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

[[noreturn]] void invalid(const std::string& what) {
  throw ConfigError(kExitInvalidConfig, what);
}

template <std::size_t N>
void reject_unknown(const YAML::Node& node, const std::array<std::string_view, N>& known,
                    const std::string& prefix) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string msg = "unknown key '" + prefix + key + "'";
    if (auto s = suggest_key(key, known)) msg += " (did you mean '" + *s + "'?)";
    invalid(msg);
  }
}

YAML::Node section(const YAML::Node& parent, const char* key, const std::string& where) {
  YAML::Node node = parent[key];
  if (node && !node.IsMap()) invalid("'" + where + key + "' must be a mapping");
  return node;
}

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) {
  const YAML::Node node = parent[key];
  if (!node) return;
  try {
    out = node.as<T>();
  } catch (const YAML::Exception&) {
    invalid("'" + prefix + key + "' has the wrong type");
  }
}

Eigen::Vector3d read_vec3(const YAML::Node& node, const std::string& name) {
  std::vector<double> v;
  try {
    v = node.as<std::vector<double>>();
  } catch (const YAML::Exception&) {
    invalid("'" + name + "' must be a list of 3 numbers");
  }
  if (v.size() != 3) invalid("'" + name + "' must be a list of 3 numbers");
  return {v[0], v[1], v[2]};
}

void parse_scenario(const YAML::Node& node, sim::ScenarioConfig& s) {
  const std::string p = "scenario.";
  reject_unknown(node, kScenarioKeys, p);
  read(node, "duration", p, s.duration);
  read(node, "dt", p, s.dt);
  read(node, "gyro_noise_std", p, s.gyro_noise_std);
  read(node, "measurement_noise_std", p, s.measurement_noise_std);
  read(node, "initial_attitude_error_std", p, s.initial_attitude_error_std);
  read(node, "seed", p, s.seed);

  if (const auto c = node["convention"]) {
    const auto text = c.as<std::string>();
    if (text == "right") {
      s.convention = So3Convention::kRightPerturbation;
    } else if (text == "left") {
      s.convention = So3Convention::kLeftPerturbation;
    } else {
      invalid("'scenario.convention' must be 'right' or 'left', got '" + text + "'");
    }
  }

  if (const auto dirs = node["reference_directions"]) {
    if (!dirs.IsSequence()) invalid("'scenario.reference_directions' must be a list");
    s.reference_directions.clear();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const std::string name = p + "reference_directions[" + std::to_string(i) + "]";
      const Eigen::Vector3d d = read_vec3(dirs[i], name);
      if (!(d.norm() > 0.0)) invalid("'" + name + "' must be nonzero");
      s.reference_directions.push_back(d.normalized());
    }
  }

  if (const auto omega = section(node, "omega", p)) {
    const std::string q = p + "omega.";
    reject_unknown(omega, kOmegaKeys, q);
    if (const auto kind = omega["profile"]) {
      const auto text = kind.as<std::string>();
      if (text == "constant") {
        s.omega.kind = sim::OmegaProfile::Kind::kConstant;
      } else if (text == "sinusoidal") {
        s.omega.kind = sim::OmegaProfile::Kind::kSinusoidal;
      } else {
        invalid("'" + q + "profile' must be 'constant' or 'sinusoidal', got '" + text + "'");
      }
    }
    if (omega["offset"]) s.omega.offset = read_vec3(omega["offset"], q + "offset");
    if (omega["amplitude"]) s.omega.amplitude = read_vec3(omega["amplitude"], q + "amplitude");
    if (omega["frequency_hz"]) {
      s.omega.frequency_hz = read_vec3(omega["frequency_hz"], q + "frequency_hz");
    }
  }
}

void parse_filter(const YAML::Node& node, IekfConfig& f) {
  const std::string p = "filter.";
  reject_unknown(node, kFilterKeys, p);
  read(node, "max_iterations", p, f.max_iterations);
  read(node, "termination_threshold", p, f.termination_threshold);
  read(node, "exact_J", p, f.exact_J);
  if (const auto v = node["update_variant"]) {
    const auto text = v.as<std::string>();
    const auto parsed = parse_variant(text);
    if (!parsed) invalid("'filter.update_variant' must be standard, qr or information, got '" + text + "'");
    f.update_variant = *parsed;
  }
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kSingle: return "single";
    case Mode::kMonteCarlo: return "monte-carlo";
    case Mode::kCompare: return "compare";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "single") return Mode::kSingle;
  if (text == "monte-carlo") return Mode::kMonteCarlo;
  if (text == "compare") return Mode::kCompare;
  return std::nullopt;
}

std::optional<UpdateVariant> parse_variant(std::string_view text) {
  if (text == "standard") return UpdateVariant::kStandard;
  if (text == "qr") return UpdateVariant::kQrCompressed;
  if (text == "information") return UpdateVariant::kInformationForm;
  return std::nullopt;
}

std::optional<std::string> suggest_key(std::string_view unknown,
                                       std::span<const std::string_view> known) {
  std::optional<std::string> best;
  std::size_t best_distance = std::max<std::size_t>(2, unknown.size() / 3) + 1;
  auto consider = [&](std::string_view candidate, std::string_view canonical) {
    const std::size_t d = edit_distance(unknown, candidate);
    if (d < best_distance) {
      best_distance = d;
      best = std::string(canonical);
    }
  };
  for (const auto k : known) consider(k, k);
  for (const auto& [alias, canonical] : kAliases) {
    if (std::find(known.begin(), known.end(), canonical) != known.end()) consider(alias, canonical);
  }
  return best;
}

void RunManifest::validate() const {
  if (schema_version != kSchemaVersion) {
    invalid("'schema_version' must be " + std::to_string(kSchemaVersion) + ", got " +
            std::to_string(schema_version));
  }
  if (trials < 1) invalid("'trials' must be >= 1");
  if (output_path.empty()) invalid("'output' must not be empty");
  try {
    scenario.validate();
  } catch (const ContractViolation& e) {
    invalid(e.what());
  }
  if (filter.max_iterations < 1) invalid("'filter.max_iterations' must be >= 1");
  if (!(filter.termination_threshold > 0.0)) invalid("'filter.termination_threshold' must be > 0");
}

namespace {
void fill_manifest(const YAML::Node& root, RunManifest& m);
}  // namespace

RunManifest parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(kExitMalformedConfig, std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError(kExitMalformedConfig, "malformed config: top level must be a mapping");

  reject_unknown(root, kTopKeys, "");
  if (!root["schema_version"]) invalid("missing required key 'schema_version'");

  RunManifest m;
  try {
    fill_manifest(root, m);
  } catch (const YAML::Exception& e) {
    invalid(std::string("invalid config value: ") + e.what());
  }
  m.validate();
  return m;
}

namespace {

void fill_manifest(const YAML::Node& root, RunManifest& m) {
  read(root, "schema_version", "", m.schema_version);
  read(root, "trials", "", m.trials);
  read(root, "output", "", m.output_path);
  if (const auto mode = root["mode"]) {
    const auto t = mode.as<std::string>();
    const auto parsed = parse_mode(t);
    if (!parsed) invalid("'mode' must be single, monte-carlo or compare, got '" + t + "'");
    m.mode = *parsed;
  }
  if (const auto s = section(root, "scenario", "")) parse_scenario(s, m.scenario);
  if (const auto f = section(root, "filter", "")) parse_filter(f, m.filter);
}

}  // namespace

RunManifest parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(kExitMissingFile, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace iekf::app
