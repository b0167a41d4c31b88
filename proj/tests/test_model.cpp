#include <doctest.h>

#include "nhqc/model.hpp"
#include "oracles.hpp"

using namespace nhqc;

TEST_CASE("fibonacci approximants") {
  CHECK(fibonacci_approximant(1) == std::pair<std::int64_t, std::int64_t>{1, 1});
  CHECK(fibonacci_approximant(5) == std::pair<std::int64_t, std::int64_t>{5, 8});
  CHECK(fibonacci_approximant(13) == std::pair<std::int64_t, std::int64_t>{233, 377});
  CHECK(fibonacci_index(377) == 13);
  CHECK(fibonacci_index(13) == 6);
  CHECK(fibonacci_index(100) < 0);
  CHECK_THROWS_AS(fibonacci_approximant(0), DomainError);
}

TEST_CASE("parameter validation") {
  LatticeParams p;
  p.L = 100;
  CHECK_THROWS_AS(validate(p), DomainError);
  p.alpha_mode = AlphaMode::Irrational;
  CHECK_NOTHROW(validate(p));
  p.L = 1;
  CHECK_THROWS_AS(validate(p), DomainError);

  WalkParams w;
  w.beta = 2.0;
  CHECK_THROWS_AS(validate(w), DomainError);
  w.beta = std::numbers::pi / 2;
  CHECK_NOTHROW(validate(w));
}

TEST_CASE("complex potential matches direct complex cosine") {
  LatticeParams p;
  p.L = 377;
  p.phi = 0.37;
  p.epsilon = 0.6;
  const auto spec = PotentialSpec::bichromatic(0.2, 0.5);
  const double alpha = 233.0 / 377.0;
  for (int n : {0, 1, 7, 188, 376}) {
    const auto v = potential_at(p, spec, n);
    const auto ref = oracle::bichromatic(0.2, 0.5, alpha, n, 0.37, 0.6);
    CHECK(std::abs(v - ref) < 1e-11);
  }
}

TEST_CASE("rational mode potential is L-periodic") {
  LatticeParams p;
  p.L = 55;
  p.epsilon = 0.3;
  const auto spec = PotentialSpec::bichromatic(1.0, 0.7);
  for (int n = 0; n < 55; ++n) CHECK(potential_at(p, spec, n) == potential_at(p, spec, n + 55));
}

TEST_CASE("hamiltonian structure") {
  LatticeParams p;
  p.L = 13;
  p.kappa = 0.8;
  p.h = 0.5;
  p.theta = 0.3;
  p.V1 = 2;
  p.V2 = 1.5;
  const ComplexMatrix H = build_hamiltonian(p);
  const Complex fwd = 0.8 * std::exp(Complex(0.5, 0.3));
  const Complex bwd = 0.8 * std::exp(Complex(-0.5, -0.3));
  CHECK(std::abs(H(0, 1) - fwd) < 1e-15);
  CHECK(std::abs(H(12, 0) - fwd) < 1e-15);
  CHECK(std::abs(H(0, 12) - bwd) < 1e-15);
  CHECK(std::abs(H(5, 4) - bwd) < 1e-15);
  CHECK(H(0, 5) == Complex(0));
  CHECK(std::abs(H(3, 3) - oracle::bichromatic(2, 1.5, 8.0 / 13.0, 3, 0, 0)) < 1e-12);

  SUBCASE("hermitian when h = epsilon = 0") {
    p.h = 0;
    const ComplexMatrix Hh = build_hamiltonian(p);
    CHECK((Hh - Hh.adjoint()).norm() < 1e-14);
  }
  SUBCASE("two-site ring sums both links") {
    p.L = 2;
    p.V1 = p.V2 = 0;
    const ComplexMatrix H2 = build_hamiltonian(p);
    CHECK(std::abs(H2(0, 1) - (fwd + bwd)) < 1e-15);
  }
}

TEST_CASE("long double builder agrees with double") {
  LatticeParams p;
  p.L = 34;
  p.h = 0.5;
  p.epsilon = 0.2;
  p.V1 = 2;
  p.V2 = 1.5;
  const ComplexMatrix Hd = build_hamiltonian<double>(p);
  const auto Hl = build_hamiltonian<long double>(p);
  CHECK((Hd - Hl.cast<Complex>()).norm() < 1e-13);
}

TEST_CASE("walk operator rows") {
  WalkParams w;
  w.L = 8;
  w.beta = 0.7;
  w.h = 0.4;
  w.V1 = 0.3;
  w.V2 = 0.1;
  const ComplexMatrix U = build_walk_operator(w);
  const auto V = potential_values(w, PotentialSpec::bichromatic(0.3, 0.1));
  const Complex phase = std::exp(0.4) * std::exp(Complex(0, -2) * V(2));
  CHECK(std::abs(U(2, 3) - std::cos(0.7) * phase) < 1e-14);
  CHECK(std::abs(U(2, 8 + 3) - Complex(0, std::sin(0.7)) * phase) < 1e-14);
  CHECK(std::abs(U(8 + 2, 8 + 1) - std::cos(0.7) * std::exp(-0.4)) < 1e-14);
  CHECK(std::abs(U(8 + 2, 1) - Complex(0, std::sin(0.7)) * std::exp(-0.4)) < 1e-14);
  CHECK(std::abs(U(8 + 0, 7) - Complex(0, std::sin(0.7)) * std::exp(-0.4)) < 1e-14);

  SUBCASE("unitary when h = epsilon = 0") {
    w.h = 0;
    const ComplexMatrix U0 = build_walk_operator(w);
    CHECK((U0 * U0.adjoint() - ComplexMatrix::Identity(16, 16)).norm() < 1e-13);
  }
}
