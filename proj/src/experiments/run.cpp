#include "nhqc/experiments/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "nhqc/experiments/output.hpp"
#include "nhqc/experiments/svg.hpp"

#ifndef NHQC_VERSION
#define NHQC_VERSION "0.0.0"
#endif

namespace nhqc::experiments {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxHeatRows = 150, kMaxHeatCols = 150;

struct Sink {
  const ExperimentConfig& cfg;
  std::vector<fs::path>& files;

  void csv(const fs::path& p, const CsvTable& t) {
    if (!cfg.wants("csv")) return;
    t.write(p);
    files.push_back(p);
  }
  void svg(const fs::path& p, const std::string& text) {
    if (!cfg.wants("svg")) return;
    write_text(p, text);
    files.push_back(p);
  }
  void json(const fs::path& p, const ordered_json& doc) {
    if (!cfg.wants("json")) return;
    write_json(p, doc);
    files.push_back(p);
  }
};

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

// ---- spectra ---------------------------------------------------------------

struct SpectrumRun {
  ComplexSpectrum spec;
  double im_tol = 0;
  double ipr_threshold = 0;
  bool walk = false;
};

SpectrumRun compute_spectrum(const ExperimentConfig& c) {
  SpectrumRun out;
  out.walk = c.is_walk();
  EigenOptions eo;
  eo.tol_eig = c.tol_eig;
  std::size_t dim = 0;
  if (out.walk) {
    const ComplexMatrix U = build_walk_operator<double>(walk_params(c));
    out.spec = quasienergies(U, eo).states;
    dim = static_cast<std::size_t>(U.rows());
  } else {
    const ComplexMatrix H = build_hamiltonian<double>(lattice_params(c));
    out.spec = eigendecompose(H, eo);
    dim = static_cast<std::size_t>(H.rows());
  }
  out.im_tol = c.im_tol_rel * out.spec.frobenius_norm;
  out.ipr_threshold = c.ipr_threshold > 0 ? c.ipr_threshold : default_ipr_threshold(dim);
  out.spec = classify_states(std::move(out.spec), out.im_tol, out.ipr_threshold);
  return out;
}

ordered_json spectrum_summary(const SpectrumRun& r) {
  const auto& s = r.spec;
  std::size_t n_complex = 0, n_loc = 0;
  double max_im = 0, max_ipr = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    n_complex += s.complex_energy[j];
    n_loc += s.labels[j] == StateLabel::Localized;
    max_im = std::max(max_im, std::abs(s.eigenvalues[j].imag()));
    max_ipr = std::max(max_ipr, s.ipr[j]);
  }
  ordered_json j;
  j["dimension"] = s.size();
  j["im_tol"] = r.im_tol;
  j["ipr_threshold"] = r.ipr_threshold;
  j["n_complex"] = n_complex;
  j["fraction_complex"] = static_cast<double>(n_complex) / static_cast<double>(s.size());
  j["n_localized"] = n_loc;
  j["max_abs_im"] = max_im;
  j["median_ipr"] = median(s.ipr);
  j["max_ipr"] = max_ipr;
  if (r.walk) j["pi_shift_hausdorff"] = pi_shift_asymmetry(s.eigenvalues);
  return j;
}

std::vector<ScatterSeries> class_series(const ComplexSpectrum& s, const std::string& suffix = "") {
  ScatterSeries loc{"Localized" + suffix, "#1f77b4", 2.5, {}};
  ScatterSeries ext{"Extended" + suffix, "#ff7f0e", 2.5, {}};
  for (std::size_t j = 0; j < s.size(); ++j)
    (s.labels[j] == StateLabel::Localized ? loc : ext)
        .points.emplace_back(s.eigenvalues[j].real(), s.eigenvalues[j].imag());
  return {loc, ext};
}

const char* energy_axis(bool walk, bool imag) {
  if (walk) return imag ? "Im quasi-energy" : "Re quasi-energy";
  return imag ? "Im E" : "Re E";
}

void write_spectrum(Sink& sink, const fs::path& dir, const SpectrumRun& r, const std::string& title) {
  sink.csv(dir / "spectrum.csv", spectrum_table(r.spec));
  sink.svg(dir / "figure.svg", scatter_svg(class_series(r.spec), title, energy_axis(r.walk, false),
                                           energy_axis(r.walk, true)));
}

// ---- dynamics ---------------------------------------------------------------

EvolveOptions evolve_options(const ExperimentConfig& c) {
  EvolveOptions o;
  o.store_profiles = c.store_profiles && c.wants("svg");
  o.wrap_band = c.wrap_band;
  o.wrap_threshold = c.wrap_threshold;
  return o;
}

std::vector<std::size_t> even_picks(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    for (std::size_t k = 0; k < n; ++k) idx.push_back(k);
    return idx;
  }
  for (std::size_t k = 0; k < cap; ++k) idx.push_back(k * (n - 1) / (cap - 1));
  return idx;
}

std::string spreading_svg(const SpreadingRecord& rec, bool walk, const std::string& title) {
  const auto rows = even_picks(rec.profiles.size(), kMaxHeatRows);
  const Eigen::Index L = rec.profiles.empty() ? 0 : rec.profiles.front().size();
  const Eigen::Index bins = std::min<Eigen::Index>(L, kMaxHeatCols);
  Eigen::MatrixXd heat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), bins);
  std::vector<double> coords;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const RealVector& p = rec.profiles[rows[r]];
    // |psi~| averaged over equal site bins
    for (Eigen::Index n = 0; n < L; ++n) heat(r, n * bins / L) += std::sqrt(std::max(p(n), 0.0));
    coords.push_back(rec.times[rows[r]]);
  }
  for (Eigen::Index b = 0; b < bins; ++b) {
    const Eigen::Index lo = (b * L + bins - 1) / bins, hi = ((b + 1) * L + bins - 1) / bins;
    if (hi > lo) heat.col(b) /= static_cast<double>(hi - lo);
  }
  LineInset inset{"sigma", rec.times, rec.sigma, false};
  if (rec.times.size() > 2 && rec.times.back() > 50 * rec.times[1]) inset.log_x = true;
  return heatmap_svg(heat, coords, 0, static_cast<double>(L - 1), title, "site n",
                     walk ? "step m" : "time t", inset);
}

ordered_json spreading_summary(const SpreadingRecord& rec, const ExperimentConfig& c) {
  ordered_json j;
  j["n0"] = rec.n0;
  j["samples"] = rec.size();
  j["sigma_final"] = rec.sigma.empty() ? 0.0 : rec.sigma.back();
  j["com_final"] = rec.center_of_mass.empty() ? 0.0 : rec.center_of_mass.back();
  j["used_fallback"] = rec.used_fallback;
  j["wrapped_at"] = rec.wrapped_at ? ordered_json(*rec.wrapped_at) : ordered_json(nullptr);
  if (!rec.warning.empty()) j["warning"] = rec.warning;
  if (c.fit_hi > c.fit_lo) {
    const TransportFit fit = transport_classifier(rec, c.fit_lo, c.fit_hi);
    ordered_json f;
    f["window"] = {c.fit_lo, c.fit_hi};
    f["exponent"] = fit.exponent;
    f["speed"] = fit.speed ? ordered_json(*fit.speed) : ordered_json(nullptr);
    f["verdict"] = to_string(fit.verdict);
    f["samples"] = fit.samples;
    j["fit"] = f;
  }
  return j;
}

ordered_json run_evolve(const ExperimentConfig& c, const fs::path& dir, Sink& sink) {
  SpreadingRecord rec;
  const bool walk = c.experiment_kind() == Experiment::EvolveQW || c.experiment_kind() == Experiment::Fig4;
  if (walk) {
    if (!c.is_walk()) throw ConfigError("key 'model.kind': walk evolution needs kind = walk");
    rec = evolve_qw(walk_params(c), PotentialSpec::bichromatic(c.V1, c.V2), c.launch_site(),
                    c.launch_loop(), c.steps, evolve_options(c));
  } else {
    if (c.is_walk()) throw ConfigError("key 'model.kind': continuous evolution needs kind = hamiltonian");
    const ComplexMatrix H = build_hamiltonian<double>(lattice_params(c));
    rec = evolve_ct(H, c.launch_site(), time_grid(c), evolve_options(c));
  }
  sink.csv(dir / "spreading.csv", spreading_table(rec));
  if (!rec.profiles.empty())
    sink.svg(dir / "figure.svg", spreading_svg(rec, walk, walk ? "walk |psi| (u+v)" : "|psi(n, t)|"));
  return spreading_summary(rec, c);
}

// ---- winding ----------------------------------------------------------------

WindingRequest winding_request(const ExperimentConfig& c, LoopParameter nu, Complex eb) {
  WindingRequest req;
  req.params = lattice_params(c);
  req.nu = nu;
  req.base_energy = eb;
  req.initial_samples = c.initial_samples;
  req.max_refinements = c.max_refinements;
  return req;
}

ordered_json winding_json(const WindingResult& w) {
  ordered_json j;
  j["W"] = w.winding;
  j["raw_phase"] = w.raw_phase;
  j["quant_err"] = w.quantization_error;
  j["accepted"] = w.accepted();
  j["samples_used"] = w.samples_used;
  return j;
}

void require_lattice(const ExperimentConfig& c) {
  if (c.is_walk()) throw ConfigError("key 'model.kind': winding numbers need kind = hamiltonian");
}

ordered_json run_winding(const ExperimentConfig& c, const fs::path& dir, Sink& sink) {
  require_lattice(c);
  const Complex eb(c.E_B_re, c.E_B_im);
  const WindingResult w = winding_number(winding_request(c, c.loop_parameter(), eb));
  sink.csv(dir / "winding.csv", winding_table({WindingRow{eb, w}}));
  ordered_json j = winding_json(w);
  j["nu"] = to_string(c.loop_parameter());
  j["E_B"] = complex_json(eb);
  return j;
}

ordered_json run_winding_map(const ExperimentConfig& c, const fs::path& dir, Sink& sink) {
  require_lattice(c);
  const EnergyGrid grid = EnergyGrid::uniform(c.re_min, c.re_max, c.n_re, c.im_min, c.im_max, c.n_im);
  WindingMapOptions o;
  o.initial_samples = c.initial_samples;
  o.max_refinements = c.max_refinements;
  o.threads = worker_count();
  const WindingMap map = winding_map(lattice_params(c), c.loop_parameter(), grid, o);
  sink.csv(dir / "winding.csv", winding_table(map));

  std::size_t failed = 0;
  int wmin = 0, wmax = 0;
  Eigen::MatrixXd heat(map.winding.rows(), map.winding.cols());
  for (Eigen::Index i = 0; i < heat.rows(); ++i)
    for (Eigen::Index r = 0; r < heat.cols(); ++r) {
      const int w = map.winding(i, r);
      if (w == kWindingFailed) {
        ++failed;
        heat(i, r) = 0;
        continue;
      }
      heat(i, r) = w;
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
    }
  sink.svg(dir / "figure.svg",
           heatmap_svg(heat, grid.im, c.re_min, c.re_max,
                       std::string("winding W_") + to_string(c.loop_parameter()), "Re E_B", "Im E_B"));
  ordered_json j;
  j["nu"] = to_string(c.loop_parameter());
  j["cells"] = map.results.size();
  j["failed"] = failed;
  j["W_min"] = wmin;
  j["W_max"] = wmax;
  return j;
}

// ---- figures ----------------------------------------------------------------

std::vector<std::string> figure_panels(Experiment fig, const std::string& variant) {
  const bool time_panels = fig == Experiment::Fig2 || fig == Experiment::Fig4;
  if (variant == "all") return time_panels ? std::vector<std::string>{"a", "b"}
                                           : std::vector<std::string>{"a", "c"};
  if (time_panels) {
    if (variant == "a" || variant == "b") return {variant};
    throw ConfigError("key 'run.variant': " + std::string(to_string(fig)) + " has panels a and b");
  }
  // b and d show the same runs as a and c
  if (variant == "a" || variant == "b") return {"a"};
  return {"c"};
}

ordered_json overlay_and_windings(const ExperimentConfig& pc, const fs::path& dir, Sink& sink) {
  ExperimentConfig hc = pc;
  hc.h = 0;
  hc.epsilon = 0;
  const SpectrumRun herm = compute_spectrum(hc);
  const SpectrumRun nh = compute_spectrum(pc);
  write_spectrum(sink, dir / "hermitian", herm, "Hermitian limit");
  write_spectrum(sink, dir / "nonhermitian", nh, "non-Hermitian");

  const bool walk = pc.is_walk();
  ScatterSeries red{"h = eps = 0", "#d62728", 3.5, {}};
  for (const auto& E : herm.spec.eigenvalues) red.points.emplace_back(E.real(), E.imag());
  ScatterSeries blue{"non-Hermitian", "#1f77b4", 2.0, {}};
  ScatterSeries ipr_loc{"Localized", "#1f77b4", 2.5, {}}, ipr_ext{"Extended", "#ff7f0e", 2.5, {}};
  for (std::size_t j = 0; j < nh.spec.size(); ++j) {
    const Complex E = nh.spec.eigenvalues[j];
    blue.points.emplace_back(E.real(), E.imag());
    (nh.spec.labels[j] == StateLabel::Localized ? ipr_loc : ipr_ext)
        .points.emplace_back(E.real(), nh.spec.ipr[j]);
  }
  sink.svg(dir / "figure.svg", scatter_svg({red, blue}, "complex spectrum",
                                           energy_axis(walk, false), energy_axis(walk, true)));
  sink.svg(dir / "ipr.svg", scatter_svg({ipr_loc, ipr_ext}, "IPR", energy_axis(walk, false), "IPR"));

  ordered_json j;
  j["hermitian"] = spectrum_summary(herm);
  j["nonhermitian"] = spectrum_summary(nh);
  if (walk) return j;

  const LoopParameter relevant = pc.h != 0 ? LoopParameter::Theta : LoopParameter::Phi;
  const LoopParameter dual = relevant == LoopParameter::Theta ? LoopParameter::Phi : LoopParameter::Theta;
  std::vector<Complex> points = loop_centroids(nh.spec, nh.im_tol);
  double radius = 0;
  for (const auto& E : nh.spec.eigenvalues) radius = std::max(radius, std::abs(E));
  points.emplace_back(2 * radius + 1, 0);  // outside the spectrum

  std::vector<WindingRow> rel_rows, dual_rows;
  ordered_json pts = ordered_json::array();
  for (const Complex eb : points) {
    ordered_json p;
    p["E_B"] = complex_json(eb);
    for (auto [nu, rows] : {std::pair{relevant, &rel_rows}, std::pair{dual, &dual_rows}}) {
      try {
        const WindingResult w = winding_number(winding_request(pc, nu, eb));
        rows->push_back({eb, w});
        p[std::string("W_") + to_string(nu)] = winding_json(w);
      } catch (const NumericalError& e) {
        rows->push_back({eb, std::nullopt});
        p[std::string("W_") + to_string(nu)] = {{"error", e.what()}};
      }
    }
    pts.push_back(p);
  }
  sink.csv(dir / "winding.csv", winding_table(rel_rows));
  sink.csv(dir / "winding_dual.csv", winding_table(dual_rows));
  j["relevant_nu"] = to_string(relevant);
  j["winding_points"] = pts;
  return j;
}

ordered_json run_panel(const ExperimentConfig& pc, const fs::path& dir, Sink& sink) {
  switch (pc.experiment_kind()) {
    case Experiment::Fig1:
    case Experiment::Fig3: return overlay_and_windings(pc, dir, sink);
    case Experiment::Fig2:
    case Experiment::Fig4: return run_evolve(pc, dir, sink);
    default: break;
  }
  throw std::logic_error("run_panel: not a figure");
}

bool is_figure(Experiment e) {
  return e == Experiment::Fig1 || e == Experiment::Fig2 || e == Experiment::Fig3 || e == Experiment::Fig4;
}

ordered_json meta_document(const ExperimentConfig& echo, const ExperimentConfig* panel,
                           const ordered_json& summary, double seconds) {
  ordered_json m;
  m["config"] = to_json(echo);
  if (panel) m["panel_config"] = to_json(*panel);
  m["library"] = {{"name", "nhqc"}, {"version", NHQC_VERSION}};
  m["wall_time_s"] = seconds;
  m["summary"] = summary;
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one figure panel into dir; `echo` is the config that reproduces it.
RunResult run_one_panel(const ExperimentConfig& echo, Experiment fig, const std::string& panel,
                        const fs::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig pc = figure_config(fig, panel, echo);
  validate_config(pc);
  RunResult res;
  Sink sink{pc, res.files};
  res.summary = run_panel(pc, dir, sink);
  sink.json(dir / "meta.json", meta_document(echo, &pc, res.summary, seconds_since(t0)));
  return res;
}

// Runs jobs on up to worker_count() threads, merging results in job order.
RunResult run_jobs(const std::vector<std::function<RunResult()>>& jobs,
                   const std::vector<std::string>& names) {
  std::vector<RunResult> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      try {
        out[k] = jobs[k]();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(worker_count(), jobs.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  RunResult merged;
  merged.summary = ordered_json::object();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    merged.files.insert(merged.files.end(), out[k].files.begin(), out[k].files.end());
    merged.summary[names[k]] = out[k].summary;
  }
  return merged;
}

}  // namespace

unsigned worker_count() {
  const char* env = std::getenv("NHQC_THREADS");
  long n = 0;
  if (env && *env) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 0) throw ConfigError("NHQC_THREADS must be a non-negative integer");
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(n);
}

std::vector<double> time_grid(const ExperimentConfig& c) {
  std::vector<double> t(c.n_times);
  if (c.time_grid == "log") {
    t[0] = 0;
    const double a = std::log(c.t_min_log), b = std::log(c.t_max);
    for (int k = 1; k < c.n_times; ++k)
      t[k] = c.n_times == 2 ? c.t_max : std::exp(a + (b - a) * (k - 1) / (c.n_times - 2));
  } else {
    for (int k = 0; k < c.n_times; ++k) t[k] = c.t_max * k / (c.n_times - 1);
  }
  return t;
}

ExperimentConfig figure_config(Experiment fig, const std::string& panel, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  c.experiment = to_string(fig);
  c.variant = panel;
  c.L = 377;
  c.kappa = 1.0;
  c.theta = c.phi = 0.0;
  c.alpha_mode = "rational";
  c.n0 = -1;
  c.loop = "u";
  const bool first = panel == "a";
  auto lattice = [&](bool type_one) {
    c.kind = "hamiltonian";
    c.V1 = type_one ? 2.0 : 0.2;
    c.V2 = type_one ? 1.5 : 0.5;
    c.h = type_one ? 0.5 : 0.0;
    c.epsilon = type_one ? 0.0 : 0.6;
    c.nu = type_one ? "theta" : "phi";
  };
  auto walk = [&](bool type_one) {
    c.kind = "walk";
    c.beta = 0.9 * std::numbers::pi / 2;
    c.V1 = type_one ? 0.2356 : 0.0157;
    c.V2 = type_one ? 0.1178 : 0.0393;
    c.h = type_one ? 0.4 : 0.0;
    c.epsilon = type_one ? 0.0 : 0.6;
  };
  switch (fig) {
    case Experiment::Fig1: lattice(first || panel == "b"); break;
    case Experiment::Fig3: walk(first || panel == "b"); break;
    case Experiment::Fig2:
      lattice(first);
      c.time_grid = first ? "linear" : "log";
      c.t_max = first ? 80.0 : 1000.0;
      c.n_times = first ? 161 : 241;
      c.t_min_log = 0.1;
      c.fit_lo = first ? 20.0 : 50.0;
      c.fit_hi = first ? 80.0 : 500.0;
      break;
    case Experiment::Fig4:
      walk(first);
      c.steps = first ? 100 : 1000;
      c.fit_lo = first ? 20.0 : 100.0;
      c.fit_hi = first ? 80.0 : 1000.0;
      break;
    default: throw ConfigError("key 'run.experiment': not a figure");
  }
  return c;
}

RunResult run(const ExperimentConfig& c) {
  validate_config(c);
  const Experiment e = c.experiment_kind();
  const fs::path dir = c.dir;

  if (is_figure(e)) {
    std::vector<std::function<RunResult()>> jobs;
    std::vector<std::string> names;
    for (const auto& panel : figure_panels(e, c.variant)) {
      ExperimentConfig echo = c;
      echo.variant = panel;
      jobs.push_back([echo, e, panel, dir] { return run_one_panel(echo, e, panel, dir / panel); });
      names.push_back(panel);
    }
    return run_jobs(jobs, names);
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  Sink sink{c, res.files};
  switch (e) {
    case Experiment::Spectrum: {
      const SpectrumRun r = compute_spectrum(c);
      write_spectrum(sink, dir, r, r.walk ? "quasi-energy spectrum" : "spectrum");
      res.summary = spectrum_summary(r);
      break;
    }
    case Experiment::Winding: res.summary = run_winding(c, dir, sink); break;
    case Experiment::WindingMap: res.summary = run_winding_map(c, dir, sink); break;
    case Experiment::EvolveCT:
    case Experiment::EvolveQW: res.summary = run_evolve(c, dir, sink); break;
    default: throw std::logic_error("run: unhandled experiment");
  }
  sink.json(dir / "meta.json", meta_document(c, nullptr, res.summary, seconds_since(t0)));
  return res;
}

RunResult reproduce_all(const ExperimentConfig& base) {
  std::vector<std::function<RunResult()>> jobs;
  std::vector<std::string> names;
  const fs::path root = base.dir;
  for (Experiment fig : {Experiment::Fig1, Experiment::Fig2, Experiment::Fig3, Experiment::Fig4}) {
    for (const auto& panel : figure_panels(fig, "all")) {
      ExperimentConfig echo = base;
      echo.experiment = to_string(fig);
      echo.variant = panel;
      echo.dir = (root / to_string(fig)).string();
      jobs.push_back([echo, fig, panel] { return run_one_panel(echo, fig, panel, fs::path(echo.dir) / panel); });
      names.push_back(std::string(to_string(fig)) + panel);
    }
  }
  return run_jobs(jobs, names);
}

}  // namespace nhqc::experiments
