// nhqc: command-line front end for the experiment runner.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhqc/experiments/config.hpp"
#include "nhqc/experiments/run.hpp"

namespace ex = nhqc::experiments;

namespace {

constexpr int kOk = 0, kConfigError = 2, kNumericalError = 3, kOtherError = 1;

// Turns "--key value" / "--key=value" leftovers into config overrides.
void apply_extras(ex::ExperimentConfig& c, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2)
      throw ex::ConfigError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw ex::ConfigError("key '" + key + "': missing value");
      value = extras[++i];
    }
    ex::apply_override(c, key, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian quasicrystal lattice and quantum-walk experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NHQC_VERSION);

  std::string config_path, out_dir, figure;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "eigenvalues, IPR and labels"},
      {"winding", "spectral winding number at one base energy"},
      {"winding-map", "winding numbers over a grid of base energies"},
      {"evolve-ct", "continuous-time spreading of a single-site state"},
      {"evolve-qw", "quantum-walk spreading of a single pulse"},
      {"reproduce", "all figure panels, or one with --figure"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config", config_path, "configuration file (TOML-style or meta.json)");
    sub->add_option("--out", out_dir, "output directory");
    if (name == "reproduce")
      sub->add_option("--figure", figure, "fig1 | fig2 | fig3 | fig4")
          ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
    sub->footer("Any configuration key can be overridden as --key value or --section.key value.");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  CLI::App* sub = nullptr;
  for (CLI::App* s : subs)
    if (s->parsed()) sub = s;
  const std::string command = sub->get_name();

  try {
    ex::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ex::load_config(config_path);
    apply_extras(cfg, sub->remaining());
    if (!out_dir.empty()) cfg.dir = out_dir;

    ex::RunResult result;
    if (command == "reproduce") {
      if (figure.empty()) {
        result = ex::reproduce_all(cfg);
      } else {
        cfg.experiment = figure;
        result = ex::run(cfg);
      }
    } else {
      cfg.experiment = command;
      result = ex::run(cfg);
    }
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << "\n";
    std::cout << result.summary.dump(2) << "\n";
    return kOk;
  } catch (const ex::ConfigError& e) {
    std::cerr << "nhqc: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nhqc::NumericalError& e) {
    std::cerr << "nhqc: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const nhqc::DomainError& e) {
    std::cerr << "nhqc: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "nhqc: " << e.what() << "\n";
    return kOtherError;
  }
}
