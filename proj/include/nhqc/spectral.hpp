#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "nhqc/types.hpp"

namespace nhqc {

enum class StateLabel { Unset, Localized, Extended };

const char* to_string(StateLabel label);

/// Right eigenpairs of a dense complex matrix with per-state diagnostics.
struct ComplexSpectrum {
  std::vector<Complex> eigenvalues;
  std::vector<ComplexVector> eigenvectors;  // unit 2-norm
  std::vector<double> ipr;
  std::vector<StateLabel> labels;
  std::vector<double> residuals;  // ||M v - E v||_2
  std::vector<bool> complex_energy;  // |Im E| > im_tol, filled by classify_states
  double frobenius_norm = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
};

/// Quasi-energies E = i log(lambda) of a one-step operator; `states` holds the
/// quasi-energies as its eigenvalues so classify_states applies unchanged.
struct QuasiEnergySpectrum {
  std::vector<Complex> multipliers;  // lambda_j
  ComplexSpectrum states;

  const std::vector<Complex>& quasienergies() const { return states.eigenvalues; }
};

struct EigenOptions {
  double tol_eig = 1e-8;  // relative residual bound
  bool balance = true;
  bool sort = true;  // by (Re, Im)
};

ComplexSpectrum eigendecompose(const ComplexMatrix& M, const EigenOptions& opts = {});

/// sum |v|^4 / (sum |v|^2)^2
template <typename Derived>
double ipr(const Eigen::MatrixBase<Derived>& v) {
  double s2 = 0, s4 = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = std::norm(v(i));
    s2 += p;
    s4 += p * p;
  }
  if (!(s2 > 0)) throw DomainError("ipr: zero vector");
  return s4 / (s2 * s2);
}

/// Localized iff ipr >= ipr_threshold; complex_energy iff |Im E| > im_tol.
ComplexSpectrum classify_states(ComplexSpectrum spec, double im_tol, double ipr_threshold);

/// Default thresholds: im_tol = 1e-6 ||M||_F, ipr_threshold = 10 / L.
double default_im_tol(const ComplexSpectrum& spec);
double default_ipr_threshold(std::size_t L);

struct LogDet {
  double log_abs = 0.0;
  double arg = 0.0;  // principal value in (-pi, pi]
  bool singular = false;
};

/// log|det M| and arg det M from a partially pivoted LU factorization.
/// Zero entries are skipped, so banded and cyclic-banded inputs factor in
/// O(n^2) rather than O(n^3).
template <typename Real>
LogDet log_det(ComplexMatrixT<Real> A) {
  using C = std::complex<Real>;
  if (A.rows() != A.cols()) throw DomainError("log_det: matrix must be square");
  const Eigen::Index n = A.rows();
  LogDet out;
  C phase(1, 0);
  Real log_abs = 0;
  std::vector<Eigen::Index> rows, cols;
  rows.reserve(n);
  cols.reserve(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    Real best = std::abs(A(k, k));
    rows.clear();
    for (Eigen::Index i = k; i < n; ++i) {
      if (A(i, k) == C(0)) continue;
      if (i > k) rows.push_back(i);
      const Real a = std::abs(A(i, k));
      if (a > best) {
        best = a;
        piv = i;
      }
    }
    if (best == Real(0)) {
      out.singular = true;
      out.log_abs = -std::numeric_limits<double>::infinity();
      out.arg = 0.0;
      return out;
    }
    if (piv != k) {
      A.row(k).swap(A.row(piv));
      phase = -phase;
      // piv was in the nonzero list; k takes its place unless A(k,k) was zero
      for (auto& r : rows)
        if (r == piv) r = (A(piv, k) == C(0)) ? -1 : piv;
    }
    const C d = A(k, k);
    log_abs += std::log(std::abs(d));
    phase *= d / std::abs(d);
    phase /= std::abs(phase);

    cols.clear();
    for (Eigen::Index j = k + 1; j < n; ++j)
      if (A(k, j) != C(0)) cols.push_back(j);
    for (Eigen::Index i : rows) {
      if (i < 0) continue;
      const C m = A(i, k) / d;
      A(i, k) = C(0);
      for (Eigen::Index j : cols) A(i, j) -= m * A(k, j);
    }
  }
  out.log_abs = static_cast<double>(log_abs);
  double a = static_cast<double>(std::arg(phase));
  if (a <= -std::numbers::pi) a = std::numbers::pi;
  out.arg = a;
  return out;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

QuasiEnergySpectrum quasienergies(const ComplexMatrix& U, const EigenOptions& opts = {});

/// Distance between quasi-energies with the real part taken modulo 2 pi.
inline double quasienergy_distance(Complex a, Complex b) {
  return std::hypot(wrap_angle(a.real() - b.real()), a.imag() - b.imag());
}

/// Hausdorff distance between two point sets; periodic in Re when `mod_2pi`.
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b,
                          bool mod_2pi = false);

/// Hausdorff distance between a quasi-energy set and its copy shifted by pi.
double pi_shift_asymmetry(const std::vector<Complex>& quasienergies);

}  // namespace nhqc
