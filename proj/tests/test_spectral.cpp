#include <doctest.h>

#include <random>

#include "nhqc/model.hpp"
#include "nhqc/spectral.hpp"
#include "oracles.hpp"

using namespace nhqc;

namespace {

std::vector<Complex> to_vec(const ComplexSpectrum& s) { return s.eigenvalues; }

}  // namespace

TEST_CASE("circulant ring eigenvalues") {
  for (int L : {8, 13, 34}) {
    LatticeParams p;
    p.L = L;
    p.kappa = 1.0;
    const auto spec = eigendecompose(build_hamiltonian(p));
    CHECK(oracle::hausdorff(to_vec(spec), oracle::ring_energies(L, 1.0)) < 1e-8);
    CHECK(spec.size() == static_cast<std::size_t>(L));
  }
}

TEST_CASE("hatano-nelson ring eigenvalues lie on the ellipse") {
  LatticeParams p;
  p.L = 21;
  p.h = 0.5;
  p.kappa = 0.7;
  const auto spec = eigendecompose(build_hamiltonian(p));
  CHECK(oracle::hausdorff(to_vec(spec), oracle::ring_energies(21, 0.7, 0.5)) < 1e-8);
}

TEST_CASE("eigenpairs: residuals, unit vectors, sort order") {
  LatticeParams p;
  p.L = 55;
  p.h = 0.5;
  p.V1 = 2;
  p.V2 = 1.5;
  const ComplexMatrix H = build_hamiltonian(p);
  const auto spec = eigendecompose(H);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    CHECK(std::abs(spec.eigenvectors[j].norm() - 1) < 1e-12);
    CHECK(spec.residuals[j] <= 1e-8 * H.norm());
    if (j) {
      const auto a = spec.eigenvalues[j - 1], b = spec.eigenvalues[j];
      CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
    }
  }
  CHECK(std::abs(spec.frobenius_norm - H.norm()) < 1e-12);
}

TEST_CASE("ipr of simple vectors") {
  ComplexVector v = ComplexVector::Zero(10);
  v(3) = Complex(0, 2);
  CHECK(ipr(v) == doctest::Approx(1.0));
  v.setConstant(Complex(0.3, -0.4));
  CHECK(ipr(v) == doctest::Approx(0.1));
  CHECK_THROWS_AS(ipr(ComplexVector::Zero(4)), DomainError);
}

TEST_CASE("classification thresholds") {
  ComplexSpectrum s;
  s.eigenvalues = {{0, 0}, {1, 1e-3}, {2, -1e-9}};
  s.ipr = {0.5, 0.01, 0.2};
  s.frobenius_norm = 100;
  const auto c = classify_states(s, default_im_tol(s), 0.1);
  CHECK(default_im_tol(s) == doctest::Approx(1e-4));
  CHECK(c.labels == std::vector<StateLabel>{StateLabel::Localized, StateLabel::Extended,
                                             StateLabel::Localized});
  CHECK(c.complex_energy == std::vector<bool>{false, true, false});
  CHECK(default_ipr_threshold(377) == doctest::Approx(10.0 / 377));
}

TEST_CASE("log_det against eigenvalue product on random matrices") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix A(6, 6);
    for (Eigen::Index i = 0; i < 36; ++i) A.data()[i] = Complex(g(rng), g(rng));
    Complex prod = 1;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(A, false);
    for (Eigen::Index k = 0; k < 6; ++k) prod *= es.eigenvalues()(k);
    const LogDet d = log_det<double>(A);
    CHECK_FALSE(d.singular);
    CHECK(d.log_abs == doctest::Approx(std::log(std::abs(prod))).epsilon(1e-10));
    CHECK(std::abs(std::remainder(d.arg - std::arg(prod), 2 * std::numbers::pi)) < 1e-9);
  }
}

TEST_CASE("log_det on cyclic tridiagonal and singular input") {
  LatticeParams p;
  p.L = 34;
  p.h = 0.3;
  p.V1 = 1;
  p.V2 = 0.5;
  ComplexMatrix M = build_hamiltonian(p) - Complex(0.2, 0.1) * ComplexMatrix::Identity(34, 34);
  const LogDet d = log_det<double>(M);
  const Complex det = M.fullPivLu().determinant();
  CHECK(d.log_abs == doctest::Approx(std::log(std::abs(det))).epsilon(1e-10));
  CHECK(std::abs(std::remainder(d.arg - std::arg(det), 2 * std::numbers::pi)) < 1e-9);

  ComplexMatrix S = ComplexMatrix::Zero(3, 3);
  S(0, 0) = 1;
  S(1, 2) = 2;
  CHECK(log_det<double>(S).singular);
}

TEST_CASE("wrap_angle range") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
}

TEST_CASE("quasi-energies of the free walk") {
  WalkParams w;
  w.L = 34;  // even ring: k + pi is an allowed momentum, so the pi shift is exact
  w.beta = 0.9 * std::numbers::pi / 2;
  const ComplexMatrix U = build_walk_operator(w);
  const auto qs = quasienergies(U);
  REQUIRE(qs.multipliers.size() == 68);
  for (std::size_t j = 0; j < 68; ++j) {
    // lambda = exp(-i E)
    CHECK(std::abs(std::exp(Complex(0, -1) * qs.quasienergies()[j]) - qs.multipliers[j]) < 1e-12);
    CHECK(std::abs(qs.quasienergies()[j].imag()) < 1e-10);  // unitary
  }
  CHECK(pi_shift_asymmetry(qs.quasienergies()) < 1e-10);
}

TEST_CASE("hausdorff distance") {
  const std::vector<Complex> a{{0, 0}, {1, 0}}, b{{0, 0.1}, {1, 0}, {1.05, 0}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.1));
  const std::vector<Complex> c{{3.1, 0}}, d{{-3.1, 0}};
  CHECK(hausdorff_distance(c, d, true) == doctest::Approx(2 * std::numbers::pi - 6.2));
  CHECK_THROWS_AS(hausdorff_distance({}, a), DomainError);
}

TEST_CASE("zero multiplier is a numerical failure") {
  ComplexMatrix U = ComplexMatrix::Identity(3, 3);
  U(1, 1) = 0;
  CHECK_THROWS_AS(quasienergies(U), NumericalError);
}

TEST_CASE("eigendecompose rejects bad input") {
  CHECK_THROWS_AS(eigendecompose(ComplexMatrix(2, 3)), DomainError);
  ComplexMatrix M = ComplexMatrix::Identity(2, 2);
  M(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigendecompose(M), DomainError);
}
