#include "nhqc/experiments/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

namespace nhqc::experiments {

namespace {

struct Names {
  Experiment kind;
  const char* name;
};

constexpr Names kExperiments[] = {
    {Experiment::Spectrum, "spectrum"},  {Experiment::Winding, "winding"},
    {Experiment::WindingMap, "winding-map"}, {Experiment::EvolveCT, "evolve-ct"},
    {Experiment::EvolveQW, "evolve-qw"}, {Experiment::Fig1, "fig1"},
    {Experiment::Fig2, "fig2"},          {Experiment::Fig3, "fig3"},
    {Experiment::Fig4, "fig4"},
};

using Member = std::variant<int ExperimentConfig::*, long ExperimentConfig::*,
                            double ExperimentConfig::*, bool ExperimentConfig::*,
                            std::string ExperimentConfig::*>;

struct Field {
  const char* section;
  const char* key;
  Member member;
  std::vector<std::string> choices = {};  // non-empty => enumerated string
};

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      {"run", "experiment", &C::experiment,
       {"spectrum", "winding", "winding-map", "evolve-ct", "evolve-qw", "fig1", "fig2", "fig3",
        "fig4"}},
      {"run", "variant", &C::variant, {"all", "a", "b", "c", "d"}},
      {"run", "seed", &C::seed},
      {"model", "kind", &C::kind, {"hamiltonian", "walk"}},
      {"model", "L", &C::L},
      {"model", "kappa", &C::kappa},
      {"model", "h", &C::h},
      {"model", "theta", &C::theta},
      {"model", "phi", &C::phi},
      {"model", "epsilon", &C::epsilon},
      {"model", "V1", &C::V1},
      {"model", "V2", &C::V2},
      {"model", "alpha_mode", &C::alpha_mode, {"rational", "irrational"}},
      {"model", "beta", &C::beta},
      {"numerics", "tol_eig", &C::tol_eig},
      {"numerics", "im_tol_rel", &C::im_tol_rel},
      {"numerics", "ipr_threshold", &C::ipr_threshold},
      {"numerics", "initial_samples", &C::initial_samples},
      {"numerics", "max_refinements", &C::max_refinements},
      {"winding", "nu", &C::nu, {"theta", "phi"}},
      {"winding", "E_B_re", &C::E_B_re},
      {"winding", "E_B_im", &C::E_B_im},
      {"winding", "re_min", &C::re_min},
      {"winding", "re_max", &C::re_max},
      {"winding", "n_re", &C::n_re},
      {"winding", "im_min", &C::im_min},
      {"winding", "im_max", &C::im_max},
      {"winding", "n_im", &C::n_im},
      {"dynamics", "n0", &C::n0},
      {"dynamics", "t_max", &C::t_max},
      {"dynamics", "n_times", &C::n_times},
      {"dynamics", "time_grid", &C::time_grid, {"linear", "log"}},
      {"dynamics", "t_min_log", &C::t_min_log},
      {"dynamics", "steps", &C::steps},
      {"dynamics", "loop", &C::loop, {"u", "v"}},
      {"dynamics", "fit_lo", &C::fit_lo},
      {"dynamics", "fit_hi", &C::fit_hi},
      {"dynamics", "wrap_band", &C::wrap_band},
      {"dynamics", "wrap_threshold", &C::wrap_threshold},
      {"dynamics", "store_profiles", &C::store_profiles},
      {"output", "dir", &C::dir},
      {"output", "formats", &C::formats},
  };
  return table;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return v.substr(1, v.size() - 2);
  return v;
}

const Field& find_field(std::string_view key) {
  const auto& table = fields();
  const auto dot = key.find('.');
  if (dot != std::string_view::npos) {
    const auto sec = key.substr(0, dot), k = key.substr(dot + 1);
    for (const auto& f : table)
      if (sec == f.section && k == f.key) return f;
  } else {
    for (const auto& f : table)
      if (key == f.key) return f;
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("key '" + std::string(key) + "': cannot parse '" + v + "'");
  return out;
}

void assign(ExperimentConfig& c, const Field& f, const std::string& raw) {
  const std::string key = std::string(f.section) + "." + f.key;
  const std::string v = unquote(trim(raw));
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(c.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (!f.choices.empty() &&
              std::find(f.choices.begin(), f.choices.end(), v) == f.choices.end())
            throw ConfigError("key '" + key + "': invalid value '" + v + "'");
          c.*member = v;
        } else if constexpr (std::is_same_v<T, bool>) {
          if (v == "true" || v == "1")
            c.*member = true;
          else if (v == "false" || v == "0")
            c.*member = false;
          else
            throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
        } else {
          c.*member = parse_number<T>(key, v);
        }
      },
      f.member);
}

std::string json_scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw ConfigError("key '" + key + "': expected a scalar value");
}

ExperimentConfig parse_json(std::string_view text, const ExperimentConfig& base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
  if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  ExperimentConfig c = base;
  for (auto& [section, body] : doc.items()) {
    if (!body.is_object()) {
      assign(c, find_field(section), json_scalar_text(body, section));
      continue;
    }
    for (auto& [key, value] : body.items()) {
      const std::string full = section + "." + key;
      assign(c, find_field(full), json_scalar_text(value, full));
    }
  }
  return c;
}

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& n : kExperiments)
    if (n.kind == e) return n.name;
  return "spectrum";
}

Experiment experiment_from_string(std::string_view name) {
  for (const auto& n : kExperiments)
    if (name == n.name) return n.kind;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

bool ExperimentConfig::wants(std::string_view format) const {
  std::stringstream ss(formats);
  std::string item;
  while (std::getline(ss, item, ','))
    if (trim(item) == format) return true;
  return false;
}

LatticeParams lattice_params(const ExperimentConfig& c) {
  LatticeParams p;
  p.L = c.L;
  p.kappa = c.kappa;
  p.h = c.h;
  p.theta = c.theta;
  p.phi = c.phi;
  p.epsilon = c.epsilon;
  p.V1 = c.V1;
  p.V2 = c.V2;
  p.alpha_mode = c.alpha();
  return p;
}

WalkParams walk_params(const ExperimentConfig& c) {
  WalkParams p;
  p.L = c.L;
  p.beta = c.beta;
  p.h = c.h;
  p.phi = c.phi;
  p.epsilon = c.epsilon;
  p.V1 = c.V1;
  p.V2 = c.V2;
  p.alpha_mode = c.alpha();
  return p;
}

void apply_override(ExperimentConfig& c, std::string_view key, std::string_view value) {
  assign(c, find_field(key), std::string(value));
}

ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& base) {
  const std::string stripped = trim(text);
  if (!stripped.empty() && stripped.front() == '{') return parse_json(stripped, base);

  ExperimentConfig c = base;
  std::istringstream in{std::string(text)};
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      assign(c, find_field(full), value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& f : fields()) {
    std::visit([&](auto member) { out[f.section][f.key] = c.*member; }, f.member);
  }
  return out;
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  std::string section;
  const auto j = to_json(c);
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    const auto& v = j[f.section][f.key];
    out << f.key << " = " << (v.is_string() ? "\"" + v.get<std::string>() + "\"" : v.dump())
        << "\n";
  }
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(std::string(f.section) + "." + f.key);
  return keys;
}

void validate_config(const ExperimentConfig& c) {
  try {
    (void)c.experiment_kind();
    if (c.is_walk())
      validate(walk_params(c));
    else
      validate(lattice_params(c));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid model parameters: ") + e.what());
  }
  if (c.n0 >= c.L) throw ConfigError("key 'dynamics.n0': launch site outside the lattice");
  if (c.initial_samples < 8) throw ConfigError("key 'numerics.initial_samples': must be >= 8");
  if (c.max_refinements < 1) throw ConfigError("key 'numerics.max_refinements': must be >= 1");
  if (c.n_times < 2) throw ConfigError("key 'dynamics.n_times': must be >= 2");
  if (c.steps < 0) throw ConfigError("key 'dynamics.steps': must be >= 0");
  if (!(c.t_max > 0)) throw ConfigError("key 'dynamics.t_max': must be positive");
  if (c.time_grid == "log" && !(c.t_min_log > 0 && c.t_min_log < c.t_max))
    throw ConfigError("key 'dynamics.t_min_log': must lie in (0, t_max)");
  if (c.n_re < 1 || c.n_im < 1) throw ConfigError("key 'winding.n_re/n_im': must be >= 1");
  if (!(c.tol_eig > 0)) throw ConfigError("key 'numerics.tol_eig': must be positive");
}

}  // namespace nhqc::experiments
