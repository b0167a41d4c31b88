#include "nhqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

namespace nhqc {

const char* to_string(TransportVerdict v) {
  switch (v) {
    case TransportVerdict::Ballistic: return "Ballistic";
    case TransportVerdict::PseudoLocalized: return "PseudoLocalized";
    case TransportVerdict::Subballistic: break;
  }
  return "Subballistic";
}

namespace {

void check_profile(const RealVector& p) {
  const double s = p.sum();
  if (!(std::abs(s - 1.0) <= 1e-9))
    throw DomainError("profile must sum to 1 within 1e-9, got " + std::to_string(s));
}

void check_site(int n0, int L) {
  if (n0 < 0 || n0 >= L) throw DomainError("launch site outside the lattice");
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw DomainError("time grid is empty");
  if (times.front() != 0.0) throw DomainError("time grid must start at t = 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw DomainError("time grid must be increasing");
}

// Accumulates spreading statistics from unit-norm states; stops at the first
// detected wrap around the ring.
class Recorder {
 public:
  Recorder(int L, int n0, const EvolveOptions& opts) : opts_(opts) {
    rec_.L = L;
    rec_.n0 = n0;
  }

  // `site_prob` must already sum to one.
  bool push(double t, const RealVector& site_prob, double log_norm, const ComplexVector* state) {
    if (stopped_) return false;
    if (opts_.wrap_band > 0 && wrapped(site_prob)) {
      rec_.wrapped_at = t;
      stopped_ = true;
      return false;
    }
    rec_.times.push_back(t);
    rec_.sigma.push_back(second_moment(site_prob, rec_.n0));
    rec_.center_of_mass.push_back(center_of_mass(site_prob, rec_.n0));
    rec_.log_norms.push_back(log_norm);
    if (opts_.store_profiles) rec_.profiles.push_back(site_prob);
    if (opts_.store_states && state) rec_.states.push_back(*state);
    return true;
  }

  SpreadingRecord take() { return std::move(rec_); }
  SpreadingRecord& record() { return rec_; }

 private:
  bool wrapped(const RealVector& p) const {
    const int L = rec_.L;
    double mass = 0;
    for (int n = 0; n < L; ++n) {
      const int d = std::abs(n - rec_.n0);
      const int to_antipode = std::abs(std::min(d, L - d) - L / 2);
      if (to_antipode < opts_.wrap_band) mass += p(n);
    }
    return mass > opts_.wrap_threshold;
  }

  const EvolveOptions& opts_;
  SpreadingRecord rec_;
  bool stopped_ = false;
};

RealVector probabilities(const ComplexVector& psi) { return psi.cwiseAbs2(); }

}  // namespace

double second_moment(const RealVector& profile, int n0) {
  check_profile(profile);
  double s = 0;
  for (Eigen::Index n = 0; n < profile.size(); ++n) {
    const double d = static_cast<double>(n - n0);
    s += d * d * profile(n);
  }
  return std::sqrt(s);
}

double center_of_mass(const RealVector& profile, int n0) {
  double s = 0;
  for (Eigen::Index n = 0; n < profile.size(); ++n) s += static_cast<double>(n - n0) * profile(n);
  return s;
}

SpreadingRecord evolve_dense_rk4(const ComplexMatrix& H, int n0, const std::vector<double>& times,
                                 double dt, const EvolveOptions& opts) {
  const int L = static_cast<int>(H.rows());
  check_site(n0, L);
  check_times(times);
  const double hnorm = H.norm();
  if (dt <= 0) dt = hnorm > 0 ? 0.01 / hnorm : 1.0;

  const ComplexMatrix G = Complex(0, -1) * H;
  ComplexVector psi = ComplexVector::Zero(L);
  psi(n0) = 1.0;
  double log_norm = 0.0;
  Recorder rec(L, n0, opts);
  rec.push(0.0, probabilities(psi), 0.0, &psi);

  ComplexVector k1(L), k2(L), k3(L), k4(L);
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double span = times[s] - times[s - 1];
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      k1.noalias() = G * psi;
      k2.noalias() = G * (psi + (0.5 * h) * k1);
      k3.noalias() = G * (psi + (0.5 * h) * k2);
      k4.noalias() = G * (psi + h * k3);
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double nrm = psi.norm();
      log_norm += std::log(nrm);
      psi /= nrm;
    }
    if (!rec.push(times[s], probabilities(psi), log_norm, &psi)) break;
  }
  return rec.take();
}

SpreadingRecord evolve_ct(const ComplexMatrix& H, int n0, const std::vector<double>& times,
                          const EvolveOptions& opts) {
  const int L = static_cast<int>(H.rows());
  check_site(n0, L);
  check_times(times);

  std::string reason;
  if (opts.force_stepper) reason = "stepper forced";
  ComplexSpectrum spec;
  ComplexMatrix V;
  ComplexVector coeff;
  if (reason.empty()) {
    try {
      spec = eigendecompose(H, {.tol_eig = 1e-8, .balance = true, .sort = false});
      V.resize(L, L);
      for (int j = 0; j < L; ++j) V.col(j) = spec.eigenvectors[j];
      Eigen::PartialPivLU<ComplexMatrix> lu(V);
      const double cond = 1.0 / lu.rcond();
      if (!(cond <= opts.max_condition)) {
        reason = "eigenvector matrix condition " + std::to_string(cond) + " exceeds limit";
      } else {
        ComplexVector e = ComplexVector::Zero(L);
        e(n0) = 1.0;
        coeff = lu.solve(e);
      }
    } catch (const NumericalError& err) {
      reason = err.what();
    }
  }
  if (!reason.empty()) {
    SpreadingRecord r = evolve_dense_rk4(H, n0, times, opts.stepper_dt, opts);
    r.used_fallback = true;
    r.warning = "eigenbasis propagation replaced by RK4: " + reason;
    return r;
  }

  double growth = -std::numeric_limits<double>::infinity();
  for (const auto& E : spec.eigenvalues) growth = std::max(growth, E.imag());

  Recorder rec(L, n0, opts);
  ComplexVector a(L), psi(L);
  for (double t : times) {
    if (t == 0.0) {
      psi.setZero();
      psi(n0) = 1.0;
      if (!rec.push(t, probabilities(psi), 0.0, &psi)) break;
      continue;
    }
    for (int j = 0; j < L; ++j) {
      const Complex E = spec.eigenvalues[j];
      a(j) = coeff(j) * std::exp(Complex((E.imag() - growth) * t, -E.real() * t));
    }
    psi.noalias() = V * a;
    const double nrm = psi.norm();
    if (!(nrm > 0) || !std::isfinite(nrm))
      throw NumericalError("evolve_ct: state norm underflow at t = " + std::to_string(t));
    psi /= nrm;
    if (!rec.push(t, probabilities(psi), growth * t + std::log(nrm), &psi)) break;
  }
  return rec.take();
}

void walk_step(const WalkParams& params, const ComplexVector& potential, ComplexVector& state) {
  const int L = params.L;
  const double c = std::cos(params.beta);
  const Complex is(0, std::sin(params.beta));
  const double gain = std::exp(params.h), loss = std::exp(-params.h);
  ComplexVector next(2 * L);
  for (int n = 0; n < L; ++n) {
    const int r = (n + 1) % L, l = (n + L - 1) % L;
    next(n) = (c * state(r) + is * state(L + r)) * gain * std::exp(Complex(0, -2) * potential(n));
    next(L + n) = (c * state(L + l) + is * state(l)) * loss;
  }
  state = std::move(next);
}

SpreadingRecord evolve_qw(const WalkParams& params, const PotentialSpec& potential, int n0, Loop loop,
                          int steps, const EvolveOptions& opts) {
  validate(params);
  const int L = params.L;
  check_site(n0, L);
  if (steps < 0) throw DomainError("evolve_qw: steps must be >= 0");
  const ComplexVector Vn = potential_values(params, potential);

  ComplexVector state = ComplexVector::Zero(2 * L);
  state(loop == Loop::U ? n0 : L + n0) = 1.0;
  double log_norm = 0.0;

  auto site_prob = [L](const ComplexVector& s) {
    RealVector p(L);
    for (int n = 0; n < L; ++n) p(n) = std::norm(s(n)) + std::norm(s(L + n));
    return p;
  };

  Recorder rec(L, n0, opts);
  rec.push(0.0, site_prob(state), 0.0, &state);
  for (int m = 1; m <= steps; ++m) {
    walk_step(params, Vn, state);
    const double nrm = state.norm();
    if (!(nrm > 0) || !std::isfinite(nrm))
      throw NumericalError("evolve_qw: state norm degenerate at step " + std::to_string(m));
    log_norm += std::log(nrm);
    state /= nrm;
    RealVector p = site_prob(state);
    p /= p.sum();
    if (!rec.push(static_cast<double>(m), p, log_norm, &state)) break;
  }
  return rec.take();
}

std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("least_squares_line: need >= 2 paired samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DomainError("least_squares_line: degenerate abscissae");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

TransportFit transport_classifier(const SpreadingRecord& record, double t_lo, double t_hi,
                                  const ClassifierThresholds& thresholds) {
  if (!(t_hi > t_lo)) throw DomainError("transport_classifier: empty fit window");
  std::vector<double> lt, ls, t, s;
  for (std::size_t k = 0; k < record.size(); ++k) {
    const double tk = record.times[k], sk = record.sigma[k];
    if (tk < t_lo || tk > t_hi || !(tk > 0) || !(sk > 0)) continue;
    lt.push_back(std::log(tk));
    ls.push_back(std::log(sk));
    t.push_back(tk);
    s.push_back(sk);
  }
  if (lt.size() < 10)
    throw DomainError("transport_classifier: fit window holds " + std::to_string(lt.size()) +
                      " usable samples, need >= 10");
  TransportFit fit;
  fit.samples = lt.size();
  fit.exponent = least_squares_line(lt, ls).second;
  if (fit.exponent >= thresholds.ballistic) {
    fit.verdict = TransportVerdict::Ballistic;
    fit.speed = least_squares_line(t, s).second;
  } else if (fit.exponent <= thresholds.localized) {
    fit.verdict = TransportVerdict::PseudoLocalized;
  } else {
    fit.verdict = TransportVerdict::Subballistic;
  }
  return fit;
}

}  // namespace nhqc
