#pragma once
// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

/// Uniform ring with hopping kappa e^{+-(h + i theta)}: Bloch energies.
inline std::vector<cd> ring_energies(int L, double kappa, double h = 0.0, double theta = 0.0) {
  std::vector<cd> E;
  for (int k = 0; k < L; ++k) {
    const double q = 2 * pi * k / L;
    E.push_back(kappa * (std::exp(cd(h, theta + q)) + std::exp(cd(-h, -theta - q))));
  }
  return E;
}

/// Symmetric Hausdorff distance; with `mod_2pi` the real part is periodic.
inline double hausdorff(const std::vector<cd>& a, const std::vector<cd>& b, bool mod_2pi = false) {
  auto d = [&](cd x, cd y) {
    double dr = x.real() - y.real();
    if (mod_2pi) dr = std::remainder(dr, 2 * pi);
    return std::hypot(dr, x.imag() - y.imag());
  };
  auto one = [&](const std::vector<cd>& p, const std::vector<cd>& q) {
    double worst = 0;
    for (cd x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (cd y : q) best = std::min(best, d(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(a, b), one(b, a));
}

/// Winding of prod_k (E_k(theta) - E_B) for the uniform ring, each Bloch
/// factor unwrapped separately, normalized by 2 pi L.
inline double bloch_product_winding(int L, double kappa, double h, cd E_B, int samples = 4096) {
  double total = 0;
  for (int k = 0; k < L; ++k) {
    const double q = 2 * pi * k / L;
    auto f = [&](double th) {
      return std::arg(kappa * (std::exp(cd(h, th + q)) + std::exp(cd(-h, -th - q))) - E_B);
    };
    double prev = f(0);
    for (int s = 1; s <= samples; ++s) {
      const double cur = f(2 * pi * s / samples);
      total += std::remainder(cur - prev, 2 * pi);
      prev = cur;
    }
  }
  return total / (2 * pi * L);
}

/// Follows each eigenvalue of M(nu) - E_B by nearest-neighbour matching over
/// a fine loop and sums the per-eigenvalue phase increments.
inline double trajectory_winding(const std::function<Eigen::MatrixXcd(double)>& build, cd E_B,
                                 int samples = 4000) {
  auto eig = [&](double nu) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(build(nu), false);
    std::vector<cd> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return v;
  };
  std::vector<cd> prev = eig(0.0);
  const std::size_t n = prev.size();
  double total = 0;
  for (int s = 1; s <= samples; ++s) {
    std::vector<cd> cur = eig(2 * pi * s / samples);
    std::vector<cd> matched(n);
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (!used[j] && std::abs(cur[j] - prev[i]) < bd) {
          bd = std::abs(cur[j] - prev[i]);
          best = j;
        }
      used[best] = true;
      matched[i] = cur[best];
      total += std::remainder(std::arg(matched[i] - E_B) - std::arg(prev[i] - E_B), 2 * pi);
    }
    prev = matched;
  }
  return total / (2 * pi * static_cast<double>(n));
}

/// Free infinite chain from a single site: p_n(t) = J_{n-n0}(2 kappa t)^2.
inline std::vector<double> bessel_profile(int L, int n0, double kappa, double t) {
  std::vector<double> p(L);
  for (int n = 0; n < L; ++n) {
    const double j = std::cyl_bessel_j(static_cast<double>(std::abs(n - n0)), 2 * kappa * t);
    p[n] = j * j;
  }
  return p;
}

inline double second_moment(const std::vector<double>& p, int n0) {
  long double s = 0, norm = 0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const long double d = static_cast<long double>(n) - n0;
    s += d * d * p[n];
    norm += p[n];
  }
  return static_cast<double>(std::sqrt(s / norm));
}

/// Direct expm of a small matrix by scaling and squaring of a Taylor series.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A) {
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(A.norm(), 1e-300)))) + 4);
  const Eigen::MatrixXcd B = A / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(A.rows(), A.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  while (squarings-- > 0) sum = sum * sum;
  return sum;
}

/// Bichromatic potential written out in full.
inline cd bichromatic(double V1, double V2, double alpha, int n, double phi, double eps) {
  const cd x(2 * pi * alpha * n + phi, eps);
  return V1 * std::cos(x) + V2 * std::cos(2.0 * x);
}

}  // namespace oracle
