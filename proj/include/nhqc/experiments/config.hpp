#pragma once

#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhqc/dynamics.hpp"
#include "nhqc/model.hpp"
#include "nhqc/topology.hpp"

namespace nhqc::experiments {

enum class Experiment { Spectrum, Winding, WindingMap, EvolveCT, EvolveQW, Fig1, Fig2, Fig3, Fig4 };

const char* to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

/// Invalid configuration; message carries the line (when known) and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat experiment description. Enumerated settings are kept as validated
/// lowercase strings and converted through the accessors below.
struct ExperimentConfig {
  // [run]
  std::string experiment = "spectrum";
  std::string variant = "all";
  long seed = 0;

  // [model]
  std::string kind = "hamiltonian";  // hamiltonian | walk
  int L = 377;
  double kappa = 1.0;
  double h = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double epsilon = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  std::string alpha_mode = "rational";  // rational | irrational
  double beta = 0.9 * std::numbers::pi / 2;

  // [numerics]
  double tol_eig = 1e-8;
  double im_tol_rel = 1e-6;    // im_tol = im_tol_rel * ||M||_F
  double ipr_threshold = 0.0;  // 0 => 10 / dimension
  int initial_samples = 256;
  int max_refinements = 16;

  // [winding]
  std::string nu = "theta";  // theta | phi
  double E_B_re = 0.0;
  double E_B_im = 0.0;
  double re_min = -3.0, re_max = 3.0;
  int n_re = 25;
  double im_min = -1.5, im_max = 1.5;
  int n_im = 13;

  // [dynamics]
  int n0 = -1;  // -1 => floor(L/2)
  double t_max = 80.0;
  int n_times = 161;
  std::string time_grid = "linear";  // linear | log
  double t_min_log = 0.1;
  int steps = 100;
  std::string loop = "u";  // u | v
  double fit_lo = 0.0;
  double fit_hi = 0.0;  // fit disabled unless fit_hi > fit_lo
  int wrap_band = 2;
  double wrap_threshold = 1e-3;
  bool store_profiles = true;

  // [output]
  std::string dir = "out";
  std::string formats = "csv,json,svg";

  Experiment experiment_kind() const { return experiment_from_string(experiment); }
  bool is_walk() const { return kind == "walk"; }
  AlphaMode alpha() const {
    return alpha_mode == "irrational" ? AlphaMode::Irrational : AlphaMode::RationalApproximant;
  }
  LoopParameter loop_parameter() const {
    return nu == "phi" ? LoopParameter::Phi : LoopParameter::Theta;
  }
  Loop launch_loop() const { return loop == "v" ? Loop::V : Loop::U; }
  int launch_site() const { return n0 < 0 ? default_launch_site(L) : n0; }
  bool wants(std::string_view format) const;
};

LatticeParams lattice_params(const ExperimentConfig& c);
WalkParams walk_params(const ExperimentConfig& c);

/// Parses TOML-style `[section]` / `key = value` text, or a JSON document
/// (either the config object itself or a meta.json carrying it under "config").
ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base = {});

/// `key` may be `section.key` or a bare key.
void apply_override(ExperimentConfig& c, std::string_view key, std::string_view value);

/// Every configuration key, grouped by section.
nlohmann::ordered_json to_json(const ExperimentConfig& c);

/// TOML-style rendering accepted by parse_config.
std::string to_text(const ExperimentConfig& c);

std::vector<std::string> config_keys();

/// Rejects physically invalid parameter sets with a ConfigError.
void validate_config(const ExperimentConfig& c);

}  // namespace nhqc::experiments
