#include "nhqc/topology.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace nhqc {

const char* to_string(LoopParameter nu) { return nu == LoopParameter::Theta ? "theta" : "phi"; }

LogDet loop_log_det(const LatticeParams& params, const PotentialSpec& potential, LoopParameter nu,
                    double nu_value, Complex base_energy) {
  LatticeParams p = params;
  if (nu == LoopParameter::Theta)
    p.theta += nu_value;
  else
    p.phi += nu_value;
  ComplexMatrix A = build_hamiltonian(p, potential);
  A.diagonal().array() -= base_energy;
  return log_det<double>(std::move(A));
}

namespace {

constexpr double kMaxJump = std::numbers::pi / 2;

class LoopIntegrator {
 public:
  LoopIntegrator(const WindingRequest& req, const PotentialSpec& pot) : req_(req), pot_(pot) {}

  double arg_at(double nu) {
    ++evaluations_;
    const LogDet ld = loop_log_det(req_.params, pot_, req_.nu, nu, req_.base_energy);
    if (ld.singular) {
      std::ostringstream msg;
      msg << "winding_number: E_B = " << req_.base_energy << " collides with an eigenvalue at "
          << to_string(req_.nu) << " = " << nu;
      throw NumericalError(msg.str());
    }
    return ld.arg;
  }

  // Continuous phase change over [a, b]. An interval is accepted only when its
  // jump and both half jumps stay below pi/2 and agree, which guards against
  // jumps aliased by multiples of 2 pi.
  double integrate(double a, double fa, double b, double fb, int depth) {
    const double m = 0.5 * (a + b);
    const double fm = arg_at(m);
    const double whole = wrap_angle(fb - fa);
    const double left = wrap_angle(fm - fa);
    const double right = wrap_angle(fb - fm);
    if (std::abs(whole) < kMaxJump && std::abs(left) < kMaxJump && std::abs(right) < kMaxJump &&
        std::abs(left + right - whole) < 1e-9)
      return left + right;
    if (depth >= req_.max_refinements) {
      std::ostringstream msg;
      msg << "winding_number: refinement budget exhausted on " << to_string(req_.nu) << " in ["
          << a << ", " << b << "], phase jump " << whole << " after " << evaluations_
          << " evaluations";
      throw NumericalError(msg.str());
    }
    return integrate(a, fa, m, fm, depth + 1) + integrate(m, fm, b, fb, depth + 1);
  }

  int evaluations() const { return evaluations_; }

 private:
  const WindingRequest& req_;
  const PotentialSpec& pot_;
  int evaluations_ = 0;
};

}  // namespace

WindingResult winding_number(const WindingRequest& req) {
  validate(req.params);
  if (req.initial_samples < 8) throw DomainError("winding_number: initial_samples must be >= 8");
  if (req.max_refinements < 1) throw DomainError("winding_number: max_refinements must be >= 1");
  const PotentialSpec pot =
      req.potential.value_or(PotentialSpec::bichromatic(req.params.V1, req.params.V2));

  LoopIntegrator integ(req, pot);
  const int N = req.initial_samples;
  const double step = 2 * std::numbers::pi / N;
  std::vector<double> f(N + 1);
  for (int k = 0; k < N; ++k) f[k] = integ.arg_at(k * step);
  f[N] = f[0];  // H(2 pi) == H(0)

  double total = 0;
  for (int k = 0; k < N; ++k) total += integ.integrate(k * step, f[k], (k + 1) * step, f[k + 1], 0);

  WindingResult out;
  out.raw_phase = total;
  out.samples_used = integ.evaluations();
  const double ratio = total / (2 * std::numbers::pi * req.params.L);
  out.winding = static_cast<int>(std::lround(ratio));
  out.quantization_error = std::abs(ratio - out.winding);
  return out;
}

EnergyGrid EnergyGrid::uniform(double re_min, double re_max, int n_re, double im_min,
                               double im_max, int n_im) {
  if (n_re < 1 || n_im < 1) throw DomainError("EnergyGrid: counts must be positive");
  auto axis = [](double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
  };
  return {axis(re_min, re_max, n_re), axis(im_min, im_max, n_im)};
}

WindingMap winding_map(const LatticeParams& params, LoopParameter nu, const EnergyGrid& grid,
                       const WindingMapOptions& opts) {
  validate(params);
  const std::size_t n_re = grid.re.size(), n_im = grid.im.size();
  const std::size_t cells = n_re * n_im;

  WindingMap out;
  out.grid = grid;
  out.winding = Eigen::MatrixXi::Constant(static_cast<Eigen::Index>(n_im),
                                          static_cast<Eigen::Index>(n_re), kWindingFailed);
  out.results.assign(cells, std::nullopt);
  out.failures.assign(cells, std::string());

  auto run_cell = [&](std::size_t c) {
    const std::size_t i = c / n_re, r = c % n_re;
    WindingRequest req;
    req.params = params;
    req.potential = opts.potential;
    req.nu = nu;
    req.base_energy = Complex(grid.re[r], grid.im[i]);
    req.initial_samples = opts.initial_samples;
    req.max_refinements = opts.max_refinements;
    try {
      out.results[c] = winding_number(req);
    } catch (const NumericalError& e) {
      out.failures[c] = e.what();
    }
  };

  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(cells, 1)));
  if (threads <= 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
  }

  for (std::size_t c = 0; c < cells; ++c)
    if (out.results[c])
      out.winding(static_cast<Eigen::Index>(c / n_re), static_cast<Eigen::Index>(c % n_re)) =
          out.results[c]->winding;
  return out;
}

std::vector<Complex> loop_centroids(const ComplexSpectrum& spec, double im_tol, double link_factor,
                                    std::size_t min_cluster) {
  std::vector<Complex> centroids;
  for (int sign : {+1, -1}) {
    std::vector<Complex> pts;
    for (const auto& E : spec.eigenvalues)
      if (sign * E.imag() > im_tol) pts.push_back(E);
    const std::size_t n = pts.size();
    if (n < std::max<std::size_t>(min_cluster, 2)) continue;

    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) nn[a] = std::min(nn[a], std::abs(pts[a] - pts[b]));
    std::vector<double> sorted = nn;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double link = link_factor * sorted[n / 2];

    // single linkage via union-find
    std::vector<std::size_t> parent(n);
    for (std::size_t a = 0; a < n; ++a) parent[a] = a;
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (std::abs(pts[a] - pts[b]) <= link) parent[find(a)] = find(b);

    std::vector<std::size_t> roots;
    for (std::size_t a = 0; a < n; ++a)
      if (find(a) == a) roots.push_back(a);
    std::vector<Complex> found;
    for (std::size_t r : roots) {
      Complex sum{0, 0};
      std::size_t count = 0;
      for (std::size_t a = 0; a < n; ++a)
        if (find(a) == r) {
          sum += pts[a];
          ++count;
        }
      if (count >= min_cluster) found.push_back(sum / static_cast<double>(count));
    }
    std::sort(found.begin(), found.end(),
              [](Complex x, Complex y) { return x.real() < y.real(); });
    centroids.insert(centroids.end(), found.begin(), found.end());
  }
  return centroids;
}

}  // namespace nhqc
