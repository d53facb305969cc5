#include "xapagy/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xapagy/error.hpp"

namespace xapagy {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k = {
      {"seed", 1.0, "seed of the agent RNG"},
      {"focus.lambda", 0.2, "instance decay rate per tick"},
      {"focus.lambda_vi", 0.2, "VI decay rate per tick"},
      {"focus.expiry", 0.05, "strength below which items leave the focus"},
      {"focus.push_out", 0.5, "strength multiplier for predecessors of a new action"},
      {"focus.answer_window", 3.0, "ticks after a question in which an answer is linked"},
      {"shadow.mu", 0.1, "shadow body decay rate"},
      {"shadow.rate_head", 0.05, "rule b: head attribute match"},
      {"shadow.rate_body", 0.05, "rule c: body attribute match"},
      {"shadow.beta", 0.5, "rule c attenuation"},
      {"shadow.rate_verb", 0.05, "rule d: verb match"},
      {"shadow.gamma", 0.2, "rule d share fed into part shadows"},
      {"shadow.rate_identity", 0.05, "rule e: identity"},
      {"shadow.rate_link", 0.05, "rule f: link consistency"},
      {"shadow.rate_sharpen_instance", 0.1, "rule g: same-scene instance sharpening"},
      {"shadow.rate_sharpen_vi", 0.1, "rule h: same-scene VI sharpening"},
      {"shadow.cap_instance", 1.0, "instance shadow mass cap"},
      {"shadow.cap_vi", 1.0, "VI shadow mass cap"},
      {"shadow.epsilon", 0.001, "body entries below this are dropped"},
      {"shadow.salience_floor", 0.0, "memory items at or below this salience are not scanned"},
      {"hls.epsilon_svr", 0.001, "SVRs below this energy are pruned"},
      {"hls.theta_compat", 0.8, "verb/attribute match for compatible templates"},
      {"hls.new_floor", 0.1, "minimum weight of the NEW interpretation"},
      {"summarization.window", 3.0, "consecutive actions for a built-in summary"},
      {"mood", std::string("story_following"), "mood preset: story_following, recall, confabulation"},
      {"mood.relaxation", 1.0, "multiplier of shadow rates b-h, divisor of theta_compat"},
      {"mood.adherence", 1.0, "probability of taking the best continuation"},
      {"mood.top_k", 3.0, "continuations sampled from when not adhering"},
  };
  const char* purposes[] = {"continuation", "missing_action", "missing_relation", "summarization"};
  for (const char* p : purposes) {
    k.push_back({std::string("mood.budget.") + p, 0.0, "energy budget per tick"});
  }
  for (const char* p : purposes) {
    k.push_back({std::string("mood.threshold.") + p, 0.01, "minimum support to instantiate"});
  }
  const char* types[] = {"in_shadow", "predecessor", "successor", "summary", "elaboration",
                         "answer", "question", "context", "context_implication"};
  std::map<std::string, double> signs = {
      {"continuation.successor", 1.0},        {"continuation.context_implication", 0.5},
      {"continuation.elaboration", 0.3},      {"continuation.predecessor", -1.0},
      {"continuation.in_shadow", -1.0},       {"missing_action.predecessor", 1.0},
      {"missing_action.context_implication", 0.3}, {"missing_action.in_shadow", -1.0},
      {"missing_action.successor", -0.5},     {"missing_relation.context", 1.0},
      {"missing_relation.in_shadow", -1.0},   {"summarization.summary", 1.0},
      {"summarization.in_shadow", -1.0},
  };
  for (const char* p : purposes) {
    for (const char* t : types) {
      std::string key = std::string(p) + "." + t;
      auto it = signs.find(key);
      k.push_back({"support." + key, it == signs.end() ? 0.0 : it->second, "evidence weight"});
    }
  }
  return k;
}

}  // namespace

const std::vector<ConfigKey>& Config::keys() {
  static const std::vector<ConfigKey> k = build_keys();
  return k;
}

Config::Config() {
  for (const auto& key : keys()) values_[key.name] = key.default_value;
}

void Config::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  std::string v = trim(value);
  if (std::holds_alternative<std::string>(it->second)) {
    if (v.empty()) throw ConfigError("empty value for '" + std::string(key) + "'");
    it->second = v;
  } else {
    double d = 0.0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(d)) {
      throw ConfigError("'" + std::string(key) + "' expects a number, got '" + v + "'");
    }
    it->second = d;
  }
  explicit_.insert(std::string(key));
}

void Config::set(std::string_view key, double value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  if (!std::holds_alternative<double>(it->second)) {
    throw ConfigError("'" + std::string(key) + "' expects text");
  }
  if (!std::isfinite(value)) throw ConfigError("'" + std::string(key) + "' must be finite");
  it->second = value;
  explicit_.insert(std::string(key));
}

void Config::set_assignment(std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void Config::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      set_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

void Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  parse(buf.str());
}

double Config::number(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw ConfigError("'" + std::string(key) + "' is not numeric");
}

const std::string& Config::text(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("'" + std::string(key) + "' is not text");
}

}  // namespace xapagy
