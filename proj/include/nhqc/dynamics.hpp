#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhqc/model.hpp"
#include "nhqc/spectral.hpp"

namespace nhqc {

/// Unit-norm amplitudes; the true state is amplitudes * exp(log_norm).
struct WaveState {
  ComplexVector amplitudes;
  double log_norm = 0.0;
  double time = 0.0;
};

struct SpreadingRecord {
  int L = 0;
  int n0 = 0;
  std::vector<double> times;  // t, or step index m for walks
  std::vector<double> sigma;
  std::vector<double> center_of_mass;  // mean displacement from n0
  std::vector<double> log_norms;
  std::vector<RealVector> profiles;   // |psi~_n|^2 per time, if requested
  std::vector<ComplexVector> states;  // normalized amplitudes, if requested
  bool used_fallback = false;         // eigenbasis ill-conditioned, RK4 used
  std::string warning;
  std::optional<double> wrapped_at;   // first time the front reached the antipode

  std::size_t size() const { return times.size(); }
};

struct EvolveOptions {
  bool store_profiles = false;
  bool store_states = false;
  double max_condition = 1e12;
  bool force_stepper = false;
  double stepper_dt = 0.0;  // 0 => 0.01 / ||H||_F
  // Wrap detection: probability within wrap_band sites of the antipode of n0
  // above wrap_threshold stops the record. wrap_band 0 disables detection.
  int wrap_band = 2;
  double wrap_threshold = 1e-3;
};

enum class Loop { U, V };

inline int default_launch_site(int L) { return L / 2; }

/// sqrt(sum_n (n - n0)^2 p_n); p must sum to 1 within 1e-9.
double second_moment(const RealVector& profile, int n0);
double center_of_mass(const RealVector& profile, int n0);

/// Continuous-time evolution exp(-iHt) delta_{n0} by eigenbasis expansion,
/// falling back to RK4 stepping when the eigenvector matrix is ill-conditioned.
SpreadingRecord evolve_ct(const ComplexMatrix& H, int n0, const std::vector<double>& times,
                          const EvolveOptions& opts = {});

/// Fixed-step fourth-order Runge-Kutta propagation with per-step renormalization.
SpreadingRecord evolve_dense_rk4(const ComplexMatrix& H, int n0, const std::vector<double>& times,
                                 double dt, const EvolveOptions& opts = {});

/// One step of the walk recurrence on the stacked (u, v) vector, in place
/// without renormalization.
void walk_step(const WalkParams& params, const ComplexVector& potential, ComplexVector& state);

/// Walk launched as a single pulse at n0 in the chosen loop; records steps 0..steps.
SpreadingRecord evolve_qw(const WalkParams& params, const PotentialSpec& potential, int n0, Loop loop,
                          int steps, const EvolveOptions& opts = {});

enum class TransportVerdict { Ballistic, Subballistic, PseudoLocalized };

const char* to_string(TransportVerdict v);

struct TransportFit {
  double exponent = 0.0;         // slope of log sigma vs log t
  std::optional<double> speed;   // slope of sigma vs t when ballistic
  TransportVerdict verdict = TransportVerdict::Subballistic;
  std::size_t samples = 0;
};

struct ClassifierThresholds {
  double ballistic = 0.9;
  double localized = 0.2;
};

TransportFit transport_classifier(const SpreadingRecord& record, double t_lo, double t_hi,
                                  const ClassifierThresholds& thresholds = {});

/// Linear (a, b) with y ~ a + b x by least squares.
std::pair<double, double> least_squares_line(const std::vector<double>& x,
                                             const std::vector<double>& y);

}  // namespace nhqc
