#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nhqc/model.hpp"
#include "nhqc/spectral.hpp"

namespace nhqc {

enum class LoopParameter { Theta, Phi };

const char* to_string(LoopParameter nu);

struct WindingRequest {
  LatticeParams params;
  std::optional<PotentialSpec> potential;  // defaults to bichromatic(V1, V2)
  LoopParameter nu = LoopParameter::Theta;
  Complex base_energy{0.0, 0.0};
  int initial_samples = 256;
  int max_refinements = 16;  // bisection depth per initial interval
};

struct WindingResult {
  int winding = 0;
  double raw_phase = 0.0;  // continuous change of arg det over the loop
  int samples_used = 0;    // log_det evaluations
  double quantization_error = 0.0;

  bool accepted() const { return quantization_error <= 0.1; }
};

/// Spectral winding number of det(H(nu) - E_B) around nu in [0, 2pi),
/// normalized by 2 pi L. Counterclockwise phase advance counts positive.
WindingResult winding_number(const WindingRequest& req);

/// det(H(nu) - E_B) in log form for a single loop parameter value.
LogDet loop_log_det(const LatticeParams& params, const PotentialSpec& potential, LoopParameter nu,
                    double nu_value, Complex base_energy);

struct EnergyGrid {
  std::vector<double> re;
  std::vector<double> im;

  static EnergyGrid uniform(double re_min, double re_max, int n_re, double im_min, double im_max,
                            int n_im);
};

inline constexpr int kWindingFailed = std::numeric_limits<int>::min();

struct WindingMap {
  EnergyGrid grid;
  Eigen::MatrixXi winding;  // (im index, re index); kWindingFailed marks failures
  std::vector<std::optional<WindingResult>> results;  // row-major over (im, re)
  std::vector<std::string> failures;                  // message per failed cell, "" otherwise
};

struct WindingMapOptions {
  int initial_samples = 256;
  int max_refinements = 16;
  std::optional<PotentialSpec> potential;
  unsigned threads = 1;  // 0 = hardware concurrency
};

WindingMap winding_map(const LatticeParams& params, LoopParameter nu, const EnergyGrid& grid,
                       const WindingMapOptions& opts = {});

/// Base energies inside complex-energy loops: eigenvalues with |Im E| > im_tol
/// are clustered by single linkage separately in the upper and lower half
/// planes, and each cluster's centroid is returned.
std::vector<Complex> loop_centroids(const ComplexSpectrum& spec, double im_tol,
                                    double link_factor = 4.0, std::size_t min_cluster = 3);

}  // namespace nhqc
