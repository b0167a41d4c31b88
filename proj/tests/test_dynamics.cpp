#include <doctest.h>

#include "nhqc/dynamics.hpp"
#include "nhqc/model.hpp"
#include "oracles.hpp"

using namespace nhqc;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = a + (b - a) * k / (n - 1);
  return t;
}

SpreadingRecord synthetic(const std::function<double(double)>& sigma) {
  SpreadingRecord r;
  for (double t : linspace(0, 100, 101)) {
    r.times.push_back(t);
    r.sigma.push_back(sigma(t));
  }
  return r;
}

}  // namespace

TEST_CASE("free ring spreading follows the Bessel solution") {
  LatticeParams p;
  p.L = 233;
  const int n0 = default_launch_site(233);
  EvolveOptions o;
  o.store_profiles = true;
  const auto times = linspace(0, 30, 31);
  const auto rec = evolve_ct(build_hamiltonian(p), n0, times, o);
  REQUIRE(rec.size() == times.size());
  CHECK_FALSE(rec.used_fallback);
  CHECK(rec.sigma[0] == 0.0);
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const auto ref = oracle::bessel_profile(233, n0, 1.0, times[k]);
    double err = 0;
    for (int n = 0; n < 233; ++n) err = std::max(err, std::abs(rec.profiles[k](n) - ref[n]));
    CHECK(err < 1e-10);
    CHECK(rec.sigma[k] == doctest::Approx(std::sqrt(2.0) * times[k]).epsilon(1e-6));
    CHECK(std::abs(rec.center_of_mass[k]) < 1e-9);
    CHECK(std::abs(rec.log_norms[k]) < 1e-9);
  }
}

TEST_CASE("moments against brute force") {
  std::vector<double> p{0.1, 0.2, 0.05, 0.4, 0.25};
  RealVector v = Eigen::Map<RealVector>(p.data(), 5);
  CHECK(second_moment(v, 2) == doctest::Approx(oracle::second_moment(p, 2)));
  CHECK(center_of_mass(v, 2) == doctest::Approx(-0.2 - 0.2 + 0.4 + 0.5));
  v(0) = 0.2;
  CHECK_THROWS_AS(second_moment(v, 2), DomainError);
}

TEST_CASE("walk recurrence equals powers of the one-step operator") {
  WalkParams w;
  w.L = 21;
  w.beta = 0.9 * std::numbers::pi / 2;
  w.h = 0.4;
  w.V1 = 0.2356;
  w.V2 = 0.1178;
  w.epsilon = 0.1;
  const ComplexMatrix U = build_walk_operator(w);
  EvolveOptions o;
  o.store_states = true;
  o.wrap_band = 0;
  const int n0 = 10;
  const auto rec = evolve_qw(w, PotentialSpec::bichromatic(w.V1, w.V2), n0, Loop::V, 30, o);
  REQUIRE(rec.states.size() == 31);
  ComplexVector psi = ComplexVector::Zero(42);
  psi(21 + n0) = 1.0;
  for (int m = 0; m <= 30; ++m) {
    const double nrm = psi.norm();
    CHECK((rec.states[m] - psi / nrm).norm() < 1e-12);
    CHECK(rec.log_norms[m] == doctest::Approx(std::log(nrm)).epsilon(1e-12));
    psi = U * psi;
  }
}

TEST_CASE("beta = pi/2 walk has period-two recurrence") {
  WalkParams w;
  w.L = 34;
  w.beta = std::numbers::pi / 2;
  w.h = 0.3;
  ComplexVector psi(68);
  for (int k = 0; k < 68; ++k) psi(k) = Complex(std::sin(k + 1.0), std::cos(3.0 * k));
  ComplexVector s = psi;
  ComplexVector zero = ComplexVector::Zero(34);
  walk_step(w, zero, s);
  walk_step(w, zero, s);
  CHECK((s + psi).norm() < 1e-12 * psi.norm());

  // with a real potential two steps are diagonal: -exp(-2i V_n) on u, -exp(-2i V_{n-1}) on v
  w.V1 = 0.7;
  w.V2 = 0.2;
  const ComplexVector V = potential_values(w, PotentialSpec::bichromatic(0.7, 0.2));
  s = psi;
  walk_step(w, V, s);
  walk_step(w, V, s);
  double err = 0;
  for (int n = 0; n < 34; ++n) {
    err = std::max(err, std::abs(s(n) + std::exp(Complex(0, -2) * V(n)) * psi(n)));
    err = std::max(err, std::abs(s(34 + n) + std::exp(Complex(0, -2) * V((n + 33) % 34)) * psi(34 + n)));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("beta = 0 free walk translates by one site per step") {
  WalkParams w;
  w.L = 34;
  w.beta = 0;
  const auto rec = evolve_qw(w, PotentialSpec::bichromatic(0, 0), 17, Loop::U, 10);
  REQUIRE(rec.size() == 11);
  for (int m = 0; m <= 10; ++m) {
    CHECK(rec.sigma[m] == doctest::Approx(m));
    CHECK(rec.center_of_mass[m] == doctest::Approx(-m));
  }
}

TEST_CASE("non-diagonalizable generator falls back to stepping") {
  ComplexMatrix H = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 3; ++i) H(i, i + 1) = 1.0;
  EvolveOptions o;
  o.store_states = true;
  o.wrap_band = 0;
  const auto times = linspace(0, 2, 5);
  const auto rec = evolve_ct(H, 3, times, o);
  CHECK(rec.used_fallback);
  CHECK_FALSE(rec.warning.empty());
  REQUIRE(rec.states.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    ComplexVector ref = oracle::expm(Complex(0, -times[k]) * H).col(3);
    CHECK(rec.log_norms[k] == doctest::Approx(std::log(ref.norm())).epsilon(1e-8));
    ref.normalize();
    CHECK((rec.states[k] - ref).norm() < 1e-8);
  }
}

TEST_CASE("eigenbasis propagation equals dense stepping at L = 13") {
  LatticeParams t1;
  t1.L = 13;
  t1.h = 0.5;
  t1.V1 = 2;
  t1.V2 = 1.5;
  LatticeParams t2;
  t2.L = 13;
  t2.epsilon = 0.6;
  t2.V1 = 0.2;
  t2.V2 = 0.5;
  EvolveOptions o;
  o.store_states = true;
  o.wrap_band = 0;
  const auto times = linspace(0, 50, 51);
  for (const auto& p : {t1, t2}) {
    const ComplexMatrix H = build_hamiltonian(p);
    const auto eig = evolve_ct(H, 6, times, o);
    const auto rk = evolve_dense_rk4(H, 6, times, 0.0, o);
    REQUIRE_FALSE(eig.used_fallback);
    REQUIRE(eig.size() == rk.size());
    double err = 0, lerr = 0;
    for (std::size_t k = 0; k < eig.size(); ++k) {
      err = std::max(err, (eig.states[k] - rk.states[k]).norm());
      lerr = std::max(lerr, std::abs(eig.log_norms[k] - rk.log_norms[k]));
    }
    CHECK(err < 1e-6);
    CHECK(lerr < 1e-6);
  }
}

TEST_CASE("wrap detection truncates the record") {
  LatticeParams p;
  p.L = 21;
  const auto times = linspace(0, 20, 41);
  const auto rec = evolve_ct(build_hamiltonian(p), 10, times);
  REQUIRE(rec.wrapped_at.has_value());
  CHECK(rec.size() < times.size());
  CHECK(*rec.wrapped_at == times[rec.size()]);
  EvolveOptions off;
  off.wrap_band = 0;
  const auto full = evolve_ct(build_hamiltonian(p), 10, times, off);
  CHECK(full.size() == times.size());
  CHECK_FALSE(full.wrapped_at.has_value());
}

TEST_CASE("time grid and launch site checks") {
  LatticeParams p;
  p.L = 13;
  const ComplexMatrix H = build_hamiltonian(p);
  CHECK_THROWS_AS(evolve_ct(H, 13, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(evolve_ct(H, 3, {0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(evolve_ct(H, 3, {0.0, 1.0, 1.0}), DomainError);
  CHECK(default_launch_site(377) == 188);
}

TEST_CASE("transport classifier verdicts") {
  auto lin = transport_classifier(synthetic([](double t) { return 2 * t; }), 20, 80);
  CHECK(lin.verdict == TransportVerdict::Ballistic);
  CHECK(lin.exponent == doctest::Approx(1.0));
  REQUIRE(lin.speed.has_value());
  CHECK(*lin.speed == doctest::Approx(2.0));

  auto flat = transport_classifier(synthetic([](double) { return 5.0; }), 20, 80);
  CHECK(flat.verdict == TransportVerdict::PseudoLocalized);
  CHECK_FALSE(flat.speed.has_value());

  auto diff = transport_classifier(synthetic([](double t) { return std::sqrt(t); }), 20, 80);
  CHECK(diff.verdict == TransportVerdict::Subballistic);
  CHECK(diff.exponent == doctest::Approx(0.5));
  CHECK(std::string(to_string(diff.verdict)) == "Subballistic");

  CHECK_THROWS_AS(transport_classifier(synthetic([](double t) { return t; }), 20, 25), DomainError);
  CHECK_THROWS_AS(transport_classifier(synthetic([](double t) { return t; }), 80, 20), DomainError);
}

TEST_CASE("least squares line") {
  const auto [a, b] = least_squares_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(a == doctest::Approx(1));
  CHECK(b == doctest::Approx(2));
  CHECK_THROWS_AS(least_squares_line({1, 1}, {0, 1}), DomainError);
}
