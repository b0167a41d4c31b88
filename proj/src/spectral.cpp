#include "nhqc/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace nhqc {

const char* to_string(StateLabel label) {
  switch (label) {
    case StateLabel::Localized: return "Localized";
    case StateLabel::Extended: return "Extended";
    case StateLabel::Unset: break;
  }
  return "Unset";
}

namespace {

double abs1(const Complex& z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Diagonal similarity scaling (powers of two, no permutations) in the style of
// the classic Parlett-Reinsch balancing. Returns D with B = D^-1 A D.
RealVector balance_in_place(ComplexMatrix& A) {
  const Eigen::Index n = A.rows();
  RealVector d = RealVector::Ones(n);
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0, r = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs1(A(j, i));
        r += abs1(A(i, j));
      }
      if (c == 0 || r == 0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        d(i) *= f;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
  return d;
}

// First (highest) index whose subdiagonal entry in the partial Schur form has
// not deflated.
long unconverged_index(const ComplexMatrix& balanced) {
  Eigen::ComplexSchur<ComplexMatrix> schur(balanced.rows());
  schur.compute(balanced);
  const auto& T = schur.matrixT();
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = T.rows() - 1; i > 0; --i) {
    if (std::abs(T(i, i - 1)) > eps * (std::abs(T(i, i)) + std::abs(T(i - 1, i - 1))))
      return static_cast<long>(i);
  }
  return 0;
}

}  // namespace

ComplexSpectrum eigendecompose(const ComplexMatrix& M, const EigenOptions& opts) {
  if (M.rows() != M.cols() || M.rows() == 0)
    throw DomainError("eigendecompose: matrix must be square and non-empty");
  if (!M.allFinite()) throw DomainError("eigendecompose: matrix has non-finite entries");

  const Eigen::Index n = M.rows();
  ComplexMatrix B = M;
  RealVector scale = RealVector::Ones(n);
  if (opts.balance) scale = balance_in_place(B);

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(B, true);
  if (solver.info() != Eigen::Success) {
    const long idx = unconverged_index(B);
    throw NumericalError("eigendecompose: QR iteration did not converge at eigenvalue " +
                             std::to_string(idx),
                         idx);
  }

  ComplexSpectrum out;
  out.frobenius_norm = M.norm();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& evals = solver.eigenvalues();
  if (opts.sort) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (evals(a).real() != evals(b).real()) return evals(a).real() < evals(b).real();
      return evals(a).imag() < evals(b).imag();
    });
  }

  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (Eigen::Index k : order) {
    ComplexVector v = scale.cast<Complex>().cwiseProduct(solver.eigenvectors().col(k));
    v.normalize();
    const Complex E = evals(k);
    out.residuals.push_back((M * v - E * v).norm());
    out.ipr.push_back(ipr(v));
    out.eigenvalues.push_back(E);
    out.eigenvectors.push_back(std::move(v));
  }
  out.labels.assign(n, StateLabel::Unset);

  const double bound = opts.tol_eig * std::max(out.frobenius_norm, 1e-300);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(out.residuals[j] <= bound))
      throw NumericalError("eigendecompose: residual " + std::to_string(out.residuals[j]) +
                               " exceeds bound for eigenvalue " + std::to_string(j),
                           static_cast<long>(j));
  }
  return out;
}

double default_im_tol(const ComplexSpectrum& spec) { return 1e-6 * spec.frobenius_norm; }

double default_ipr_threshold(std::size_t L) { return 10.0 / static_cast<double>(L); }

ComplexSpectrum classify_states(ComplexSpectrum spec, double im_tol, double ipr_threshold) {
  const std::size_t n = spec.size();
  spec.labels.resize(n);
  spec.complex_energy.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    spec.labels[j] = spec.ipr[j] >= ipr_threshold ? StateLabel::Localized : StateLabel::Extended;
    spec.complex_energy[j] = std::abs(spec.eigenvalues[j].imag()) > im_tol;
  }
  return spec;
}

QuasiEnergySpectrum quasienergies(const ComplexMatrix& U, const EigenOptions& opts) {
  QuasiEnergySpectrum out;
  EigenOptions inner = opts;
  inner.sort = false;
  ComplexSpectrum raw = eigendecompose(U, inner);

  const std::size_t n = raw.size();
  std::vector<Complex> E(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex lambda = raw.eigenvalues[j];
    if (std::abs(lambda) == 0.0 || !std::isfinite(std::log(std::abs(lambda))))
      throw NumericalError("quasienergies: zero multiplier at index " + std::to_string(j),
                           static_cast<long>(j));
    // lambda = exp(-i E)  =>  E = i log(lambda)
    E[j] = Complex(wrap_angle(-std::arg(lambda)), std::log(std::abs(lambda)));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (opts.sort) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (E[a].real() != E[b].real()) return E[a].real() < E[b].real();
      return E[a].imag() < E[b].imag();
    });
  }

  ComplexSpectrum& s = out.states;
  s.frobenius_norm = raw.frobenius_norm;
  for (std::size_t k : order) {
    out.multipliers.push_back(raw.eigenvalues[k]);
    s.eigenvalues.push_back(E[k]);
    s.eigenvectors.push_back(std::move(raw.eigenvectors[k]));
    s.ipr.push_back(raw.ipr[k]);
    s.residuals.push_back(raw.residuals[k]);
  }
  s.labels.assign(n, StateLabel::Unset);
  return out;
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b,
                          bool mod_2pi) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff_distance: empty point set");
  auto dist = [mod_2pi](Complex x, Complex y) {
    return mod_2pi ? quasienergy_distance(x, y) : std::abs(x - y);
  };
  auto directed = [&](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, dist(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double pi_shift_asymmetry(const std::vector<Complex>& quasienergies) {
  std::vector<Complex> shifted;
  shifted.reserve(quasienergies.size());
  for (const auto& E : quasienergies)
    shifted.emplace_back(wrap_angle(E.real() + std::numbers::pi), E.imag());
  return hausdorff_distance(quasienergies, shifted, true);
}

}  // namespace nhqc
