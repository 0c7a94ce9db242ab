#include "mixlap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixlap/errors.hpp"

namespace mixlap {

namespace {

struct KeySpec {
  const char* key;
  ConfigType type;
  // kinds the key applies to; empty means all
  std::vector<std::string> kinds;
  std::optional<ConfigValue> fallback;
  bool required = false;
};

using Arr = std::vector<double>;

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      // every kind
      {"kind", ConfigType::kString, {}, {}, true},
      {"seed", ConfigType::kInteger, {}, 0.0},
      {"output_dir", ConfigType::kString, {}, std::string("out")},
      {"workers", ConfigType::kInteger, {}, 1.0},
      {"N", ConfigType::kInteger, {}, 3.0},
      {"s", ConfigType::kNumber, {}, 0.25},
      {"required", ConfigType::kBool, {}, {}},
      // certificates
      {"regime", ConfigType::kString, {"certify"}, {}},
      {"certificate", ConfigType::kString, {"certify"}, std::string("elliptic")},
      {"beta", ConfigType::kNumber, {"certify"}, {}},
      {"alpha", ConfigType::kNumber, {"certify", "exhaustion", "parabolic"}, {}},
      {"C0", ConfigType::kNumber, {"certify", "sweep", "exhaustion"}, 1.0},
      {"c0", ConfigType::kNumber, {"certify", "exhaustion", "parabolic"}, {}},
      {"c0_factor", ConfigType::kNumber, {"certify", "sweep", "exhaustion"}, 1.1},
      {"p", ConfigType::kNumber, {"certify", "sweep", "exhaustion"}, 1.0},
      {"lambda", ConfigType::kNumber, {"certify", "parabolic"}, {}},
      {"epsilon", ConfigType::kNumber, {"certify"}, {}},
      {"safety", ConfigType::kNumber, {"certify"}, 0.1},
      {"r0", ConfigType::kNumber, {"certify", "sweep", "exhaustion", "parabolic"}, 1.0},
      {"C_scale", ConfigType::kNumber, {"certify"}, 1.0},
      // sweep
      {"alphas", ConfigType::kNumberArray, {"sweep"},
       Arr{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0}},
      {"betas", ConfigType::kNumberArray, {"sweep", "oracle_compare"}, {}},
      {"barrier_c0", ConfigType::kNumber, {"sweep"}, 1.0},
      // exhaustion
      {"mode", ConfigType::kString, {"exhaustion"}, std::string("upper_bound")},
      {"rho_scale", ConfigType::kNumber, {"exhaustion", "parabolic"}, {}},
      {"etas", ConfigType::kNumberArray, {"exhaustion"}, Arr{1.0, 2.0}},
      {"radii", ConfigType::kNumberArray, {"exhaustion", "oracle_compare"}, {}},
      {"intervals", ConfigType::kInteger, {"exhaustion", "parabolic"}, {}},
      {"r_obs", ConfigType::kNumber, {"exhaustion"}, {}},
      {"c0_threshold_beta", ConfigType::kNumber, {"exhaustion"}, {}},
      {"cauchy_tol", ConfigType::kNumber, {"exhaustion"}, 1e-3},
      {"barrier", ConfigType::kBool, {"exhaustion"}, true},
      // parabolic
      {"radius", ConfigType::kNumber, {"parabolic"}, 10.0},
      {"dt", ConfigType::kNumber, {"parabolic"}, 1e-2},
      {"T", ConfigType::kNumber, {"parabolic"}, 1.0},
      {"eta", ConfigType::kNumber, {"parabolic"}, 0.0},
      {"u0_beta", ConfigType::kNumber, {"parabolic"}, 3.0},
      {"snapshot_times", ConfigType::kNumberArray, {"parabolic"}, Arr{0.0, 0.5, 1.0}},
      {"zero_steps", ConfigType::kInteger, {"parabolic"}, 1000.0},
      {"steady_dt", ConfigType::kNumber, {"parabolic"}, 1.0},
      {"steady_tol", ConfigType::kNumber, {"parabolic"}, 1e-13},
      {"lambda_regime", ConfigType::kString, {"parabolic"}, {}},
      {"lambda_beta", ConfigType::kNumber, {"parabolic"}, {}},
      {"lambda_alpha", ConfigType::kNumber, {"parabolic"}, 0.3},
      {"lambda_C0", ConfigType::kNumber, {"parabolic"}, 1.0},
      // oracle comparison
      {"Ns", ConfigType::kNumberArray, {"oracle_compare"}, Arr{2.0, 3.0, 4.0}},
      {"ss", ConfigType::kNumberArray, {"oracle_compare"}, Arr{0.25, 0.5, 0.75}},
      {"random_radii", ConfigType::kInteger, {"oracle_compare"}, 0.0},
      {"tolerance", ConfigType::kNumber, {"oracle_compare"}, 1e-5},
  };
  return keys;
}

bool applies(const KeySpec& k, const std::string& kind) {
  return k.kinds.empty() || std::find(k.kinds.begin(), k.kinds.end(), kind) != k.kinds.end();
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema())
    if (key == k.key) return &k;
  return nullptr;
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

// ------------------------------------------------------------------ lexer

struct Cursor {
  const std::string& s;
  size_t i = 0;
  int line;

  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }
  void skip_ws() {
    while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  [[noreturn]] void fail(const std::string& what, const std::string& key = {}) const {
    throw ConfigError(where(line) + what, key, line);
  }
};

bool is_bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

std::string parse_string(Cursor& c) {
  const char q = c.s[c.i++];
  std::string out;
  while (!c.done() && c.s[c.i] != q) {
    char ch = c.s[c.i++];
    if (q == '"' && ch == '\\') {
      if (c.done()) c.fail("unterminated escape");
      const char e = c.s[c.i++];
      switch (e) {
        case 'n': ch = '\n'; break;
        case 't': ch = '\t'; break;
        case '"': ch = '"'; break;
        case '\\': ch = '\\'; break;
        default: c.fail(std::string("unsupported escape \\") + e);
      }
    }
    out.push_back(ch);
  }
  if (c.done()) c.fail("unterminated string");
  ++c.i;
  return out;
}

double parse_number(Cursor& c) {
  size_t j = c.i;
  while (j < c.s.size() && (std::isalnum(static_cast<unsigned char>(c.s[j])) || std::strchr("+-._", c.s[j]))) ++j;
  std::string tok = c.s.substr(c.i, j - c.i);
  tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
  if (tok == "inf" || tok == "+inf" || tok == "-inf" || tok == "nan" || tok == "+nan" || tok == "-nan")
    c.fail("non-finite number '" + tok + "' is not allowed");
  const char* first = tok.data() + (tok.size() > 0 && tok[0] == '+' ? 1 : 0);
  double v = 0.0;
  const auto res = std::from_chars(first, tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    c.fail("cannot read a value from '" + c.s.substr(c.i, j - c.i) + "'");
  c.i = j;
  return v;
}

ConfigValue parse_value(Cursor& c) {
  c.skip_ws();
  const char ch = c.peek();
  if (ch == '"' || ch == '\'') return parse_string(c);
  if (ch == '[') {
    ++c.i;
    std::vector<double> arr;
    for (;;) {
      c.skip_ws();
      if (c.peek() == ']') {
        ++c.i;
        break;
      }
      if (c.done()) c.fail("unterminated array");
      arr.push_back(parse_number(c));
      c.skip_ws();
      if (c.peek() == ',') {
        ++c.i;
      } else if (c.peek() != ']') {
        c.fail("expected ',' or ']' in array");
      }
    }
    return arr;
  }
  if (c.s.compare(c.i, 4, "true") == 0 && (c.i + 4 == c.s.size() || !is_bare_key_char(c.s[c.i + 4]))) {
    c.i += 4;
    return true;
  }
  if (c.s.compare(c.i, 5, "false") == 0 && (c.i + 5 == c.s.size() || !is_bare_key_char(c.s[c.i + 5]))) {
    c.i += 5;
    return false;
  }
  return parse_number(c);
}

void expect_line_end(Cursor& c) {
  c.skip_ws();
  if (!c.done() && c.peek() != '#') c.fail("unexpected text after value: '" + c.s.substr(c.i) + "'");
}

bool type_matches(const ConfigValue& v, ConfigType t) {
  switch (t) {
    case ConfigType::kBool: return std::holds_alternative<bool>(v);
    case ConfigType::kNumber: return std::holds_alternative<double>(v);
    case ConfigType::kInteger:
      return std::holds_alternative<double>(v) && std::get<double>(v) == std::trunc(std::get<double>(v)) &&
             std::abs(std::get<double>(v)) < 9e15;
    case ConfigType::kString: return std::holds_alternative<std::string>(v);
    case ConfigType::kNumberArray: return std::holds_alternative<std::vector<double>>(v);
  }
  return false;
}

}  // namespace

const char* to_string(ConfigType t) {
  switch (t) {
    case ConfigType::kBool: return "boolean";
    case ConfigType::kNumber: return "number";
    case ConfigType::kInteger: return "integer";
    case ConfigType::kString: return "string";
    case ConfigType::kNumberArray: return "array of numbers";
  }
  return "?";
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"certify", "sweep", "exhaustion", "parabolic", "oracle_compare"};
  return kinds;
}

std::vector<std::pair<std::string, ConfigType>> config_keys(const std::string& kind) {
  std::vector<std::pair<std::string, ConfigType>> out;
  for (const auto& k : schema())
    if (applies(k, kind)) out.emplace_back(k.key, k.type);
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    Cursor c{raw, 0, line};
    c.skip_ws();
    if (c.done() || c.peek() == '#') continue;
    if (c.peek() == '[') c.fail("tables are not supported; all keys are top-level");
    std::string key;
    if (c.peek() == '"') {
      key = parse_string(c);
    } else {
      while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.s[c.i++]);
    }
    if (key.empty()) c.fail("expected a key");
    c.skip_ws();
    if (c.peek() != '=') c.fail("expected '=' after key '" + key + "'", key);
    ++c.i;
    ConfigValue v = parse_value(c);
    expect_line_end(c);
    if (cfg.entries_.count(key)) c.fail("duplicate key '" + key + "'", key);
    cfg.entries_[key] = Entry{std::move(v), line};
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& text) {
  Cursor c{text, 0, 0};
  try {
    ConfigValue v = parse_value(c);
    expect_line_end(c);
    set(key, std::move(v));
  } catch (const ConfigError&) {
    set(key, ConfigValue(text));
  }
}

void ExperimentConfig::set(const std::string& key, ConfigValue value) { entries_[key] = Entry{std::move(value), 0}; }

ExperimentConfig ExperimentConfig::resolved() const {
  if (!has("kind")) {
    std::string req;
    for (const auto& k : schema())
      if (k.required) req += std::string(req.empty() ? "" : ", ") + k.key;
    throw ConfigError("missing required keys: " + req + " (certify also needs regime)", "kind");
  }
  const Entry& ke = entry("kind");
  if (!std::holds_alternative<std::string>(ke.value))
    throw ConfigError(where(ke.line) + "kind must be a string", "kind", ke.line);
  const std::string kind = std::get<std::string>(ke.value);
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ConfigError(where(ke.line) + "unknown kind '" + kind +
                          "' (expected certify, sweep, exhaustion, parabolic or oracle_compare)",
                      "kind", ke.line);

  ExperimentConfig out;
  for (const auto& [key, e] : entries_) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(where(e.line) + "unknown key '" + key + "'", key, e.line);
    if (!applies(*spec, kind))
      throw ConfigError(where(e.line) + "key '" + key + "' does not apply to kind " + kind, key, e.line);
    if (!type_matches(e.value, spec->type))
      throw ConfigError(where(e.line) + "key '" + key + "' must be a " + to_string(spec->type), key, e.line);
    out.entries_[key] = e;
  }
  for (const auto& spec : schema()) {
    if (!applies(spec, kind) || out.has(spec.key)) continue;
    if (spec.fallback) out.entries_[spec.key] = Entry{*spec.fallback, 0};
  }
  if (!out.has("required")) out.entries_["required"] = Entry{kind == "certify", 0};
  return out;
}

const ExperimentConfig::Entry& ExperimentConfig::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'", key);
  return it->second;
}

int ExperimentConfig::line_of(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::string ExperimentConfig::kind() const { return string("kind"); }

double ExperimentConfig::number(const std::string& key) const {
  const Entry& e = entry(key);
  if (!std::holds_alternative<double>(e.value))
    throw ConfigError(where(e.line) + "key '" + key + "' must be a number", key, e.line);
  return std::get<double>(e.value);
}

long long ExperimentConfig::integer(const std::string& key) const {
  const Entry& e = entry(key);
  if (!type_matches(e.value, ConfigType::kInteger))
    throw ConfigError(where(e.line) + "key '" + key + "' must be an integer", key, e.line);
  return static_cast<long long>(std::get<double>(e.value));
}

bool ExperimentConfig::boolean(const std::string& key) const {
  const Entry& e = entry(key);
  if (!std::holds_alternative<bool>(e.value))
    throw ConfigError(where(e.line) + "key '" + key + "' must be a boolean", key, e.line);
  return std::get<bool>(e.value);
}

const std::string& ExperimentConfig::string(const std::string& key) const {
  const Entry& e = entry(key);
  if (!std::holds_alternative<std::string>(e.value))
    throw ConfigError(where(e.line) + "key '" + key + "' must be a string", key, e.line);
  return std::get<std::string>(e.value);
}

const std::vector<double>& ExperimentConfig::numbers(const std::string& key) const {
  const Entry& e = entry(key);
  if (!std::holds_alternative<std::vector<double>>(e.value))
    throw ConfigError(where(e.line) + "key '" + key + "' must be an array of numbers", key, e.line);
  return std::get<std::vector<double>>(e.value);
}

std::optional<double> ExperimentConfig::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

}  // namespace mixlap
