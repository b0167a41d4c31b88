#pragma once

// Quasiperiodic ring Hamiltonian with complex gauge and potential phases,
// and the one-step operator of the two-loop discrete-time walk.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "nhqc/types.hpp"

namespace nhqc {

enum class AlphaMode { RationalApproximant, Irrational };

struct LatticeParams {
  int L = 377;
  double kappa = 1.0;
  double h = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double epsilon = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  AlphaMode alpha_mode = AlphaMode::RationalApproximant;
};

struct WalkParams {
  int L = 377;
  double beta = 0.9 * std::numbers::pi / 2;
  double h = 0.0;
  double phi = 0.0;
  double epsilon = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  AlphaMode alpha_mode = AlphaMode::RationalApproximant;
};

struct Harmonic {
  double amplitude;
  int multiplier;
};

/// V(x) = sum_j amplitude_j cos(multiplier_j x).
struct PotentialSpec {
  std::vector<Harmonic> harmonics;

  static PotentialSpec bichromatic(double V1, double V2) { return {{{V1, 1}, {V2, 2}}}; }

  double max_amplitude_sum() const {
    double s = 0;
    for (const auto& hm : harmonics) s += std::abs(hm.amplitude);
    return s;
  }
};

/// Consecutive Fibonacci numbers (F_{n-1}, F_n) with F_0 = F_1 = 1.
inline std::pair<std::int64_t, std::int64_t> fibonacci_approximant(int n) {
  if (n < 1) throw DomainError("fibonacci_approximant: index must be >= 1");
  if (n > 90) throw DomainError("fibonacci_approximant: index overflows 64-bit");
  std::int64_t prev = 1, cur = 1;
  for (int k = 1; k < n; ++k) {
    std::int64_t next = cur + prev;
    prev = cur;
    cur = next;
  }
  return {prev, cur};
}

/// Index n with F_n == L (n >= 2), or -1 if L is not such a Fibonacci number.
inline int fibonacci_index(std::int64_t L) {
  for (int n = 2; n <= 90; ++n) {
    auto [prev, cur] = fibonacci_approximant(n);
    if (cur == L) return n;
    if (cur > L) break;
  }
  return -1;
}

inline constexpr double golden_alpha() { return 0.6180339887498948482; }  // (sqrt5 - 1)/2

namespace detail {

template <typename P>
inline void validate_common(const P& p) {
  if (p.L < 2) throw DomainError("lattice size L must be >= 2");
  if (p.alpha_mode == AlphaMode::RationalApproximant && fibonacci_index(p.L) < 0)
    throw DomainError("RationalApproximant mode requires L to be a Fibonacci number, got L=" +
                      std::to_string(p.L));
}

// Fraction {alpha * n} in [0, 1). Exact modular reduction in rational mode
// keeps the sequence exactly L-periodic.
template <typename Real, typename P>
inline Real alpha_phase_fraction(const P& p, long n) {
  if (p.alpha_mode == AlphaMode::RationalApproximant) {
    auto [num, den] = fibonacci_approximant(fibonacci_index(p.L));
    long long r = (static_cast<long long>(num) * n) % den;
    if (r < 0) r += den;
    return static_cast<Real>(r) / static_cast<Real>(den);
  }
  Real x = static_cast<Real>(golden_alpha()) * static_cast<Real>(n);
  return x - std::floor(x);
}

}  // namespace detail

inline void validate(const LatticeParams& p) { detail::validate_common(p); }

inline void validate(const WalkParams& p) {
  detail::validate_common(p);
  if (!(p.beta >= 0.0 && p.beta <= std::numbers::pi / 2))
    throw DomainError("coupling angle beta must lie in [0, pi/2]");
}

/// alpha actually used for the configured mode.
template <typename P>
inline double alpha_value(const P& p) {
  validate(p);
  if (p.alpha_mode == AlphaMode::Irrational) return golden_alpha();
  auto [num, den] = fibonacci_approximant(fibonacci_index(p.L));
  return static_cast<double>(num) / static_cast<double>(den);
}

/// V at site n (any integer), x = 2 pi alpha n + phi + i epsilon.
template <typename Real = double, typename P>
std::complex<Real> potential_at(const P& p, const PotentialSpec& spec, long n) {
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  const Real base = two_pi * detail::alpha_phase_fraction<Real>(p, n);
  std::complex<Real> v{0, 0};
  for (const auto& hm : spec.harmonics) {
    const Real a = hm.multiplier * (base + static_cast<Real>(p.phi));
    const Real b = hm.multiplier * static_cast<Real>(p.epsilon);
    // cos(a + ib) = cos a cosh b - i sin a sinh b
    v += static_cast<Real>(hm.amplitude) *
         std::complex<Real>(std::cos(a) * std::cosh(b), -std::sin(a) * std::sinh(b));
  }
  return v;
}

template <typename Real = double, typename P>
ComplexVectorT<Real> potential_values(const P& p, const PotentialSpec& spec) {
  validate(p);
  ComplexVectorT<Real> v(p.L);
  for (int n = 0; n < p.L; ++n) v(n) = potential_at<Real>(p, spec, n);
  return v;
}

template <typename Real = double>
ComplexMatrixT<Real> build_hamiltonian(const LatticeParams& p, const PotentialSpec& spec) {
  validate(p);
  const int L = p.L;
  const auto V = potential_values<Real>(p, spec);
  const std::complex<Real> gauge(static_cast<Real>(p.h), static_cast<Real>(p.theta));
  const std::complex<Real> fwd = static_cast<Real>(p.kappa) * std::exp(gauge);
  const std::complex<Real> bwd = static_cast<Real>(p.kappa) * std::exp(-gauge);

  ComplexMatrixT<Real> H = ComplexMatrixT<Real>::Zero(L, L);
  for (int n = 0; n < L; ++n) {
    H(n, (n + 1) % L) += fwd;
    H(n, (n + L - 1) % L) += bwd;
    H(n, n) += V(n);
  }
  return H;
}

template <typename Real = double>
ComplexMatrixT<Real> build_hamiltonian(const LatticeParams& p) {
  return build_hamiltonian<Real>(p, PotentialSpec::bichromatic(p.V1, p.V2));
}

/// One step of the walk on the stacked state (u_0..u_{L-1}, v_0..v_{L-1}).
template <typename Real = double>
ComplexMatrixT<Real> build_walk_operator(const WalkParams& p, const PotentialSpec& spec) {
  validate(p);
  const int L = p.L;
  const auto V = potential_values<Real>(p, spec);
  const Real c = std::cos(static_cast<Real>(p.beta));
  const std::complex<Real> is(0, std::sin(static_cast<Real>(p.beta)));
  const Real gain = std::exp(static_cast<Real>(p.h));
  const Real loss = std::exp(-static_cast<Real>(p.h));

  ComplexMatrixT<Real> U = ComplexMatrixT<Real>::Zero(2 * L, 2 * L);
  for (int n = 0; n < L; ++n) {
    const int right = (n + 1) % L;
    const int left = (n + L - 1) % L;
    const std::complex<Real> phase = gain * std::exp(std::complex<Real>(0, -2) * V(n));
    U(n, right) += c * phase;
    U(n, L + right) += is * phase;
    U(L + n, L + left) += c * loss;
    U(L + n, left) += is * loss;
  }
  return U;
}

template <typename Real = double>
ComplexMatrixT<Real> build_walk_operator(const WalkParams& p) {
  return build_walk_operator<Real>(p, PotentialSpec::bichromatic(p.V1, p.V2));
}

}  // namespace nhqc
