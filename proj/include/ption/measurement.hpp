#pragma once

// Shot-noise emulation of electron-shelving readout and recovery of the loss
// rate from noisy ground-population data.
//
// Readout model. Every shot ends in a binary fluorescence test that
// distinguishes |0> from {|1>, |2>}; `n_dark` counts the shots read as |0>
// (the name is kept from the CSV schema). Two observables are supported:
//
//  * P0 - the shot reads |0> with probability rho00(t). The estimate
//    p_hat = n_dark / n_shots targets rho00.
//  * SY - an ideal pi/2 analysis pulse inside the (|0>, |1>) block maps the
//    +1 eigenstate of sigma_y onto |0> before the same readout. Each shot is
//    drawn from three outcomes: leaked (probability rho22, counted in
//    `n_leak`), read as |0> (probability (Tr_01 + <sigma_y>) / 2 where
//    Tr_01 = rho00 + rho11 and <sigma_y> = 2 Im rho01), or dark otherwise.
//    Hence <sigma_y> = 2 p_hat - (1 - n_leak / n_shots).
//
// Sampling: record i gets its own std::mt19937_64 stream seeded through
// std::seed_seq{seed & 0xffffffff, seed >> 32, i}, so records are independent
// streams split off one seed. Every shot takes one 64-bit draw,
// u = (x >> 11) * 2^-53, and the outcome is the first cumulative probability
// exceeding u. The identifier below is written into output metadata.
//
// n_shots = 0 selects noiseless mode: p_hat is the exact probability and
// std_err is zero.

#include <cstdint>
#include <string_view>
#include <vector>

#include "ption/dynamics.hpp"

namespace ption {

inline constexpr std::string_view kPrngAlgorithm = "mt19937_64+seed_seq(seed_lo,seed_hi,index)/u53-threshold";

enum class ReadoutObservable { P0, SY };

struct ShotRecord {
  double t = 0.0;  ///< s
  std::int64_t n_shots = 0;
  std::int64_t n_dark = 0;
  std::int64_t n_leak = 0;
  double p_hat = 0.0;
  double std_err = 0.0;
  double leak_hat = 0.0;  ///< n_leak / n_shots, or the exact leak probability when noiseless
};

/// Exact per-shot probabilities along a time grid.
struct ReadoutProbabilities {
  std::vector<double> times;
  std::vector<double> p_read0;  ///< probability the shot is read as |0>
  std::vector<double> p_leak;   ///< probability of the leaked outcome (SY only)
};

/// Probabilities from the 3-level Lindblad dynamics started in |0>.
ReadoutProbabilities readout_probabilities(const SystemParams& p, const std::vector<double>& t_grid,
                                           ReadoutObservable observable);

/// Draws shot records from precomputed probabilities.
std::vector<ShotRecord> sample_shots(const ReadoutProbabilities& probs, std::int64_t n_shots, std::uint64_t seed);

/// readout_probabilities followed by sample_shots.
std::vector<ShotRecord> simulate_shots(const SystemParams& p, const std::vector<double>& t_grid, std::int64_t n_shots,
                                       std::uint64_t seed, ReadoutObservable observable = ReadoutObservable::P0);

/// <sigma_y> (unnormalized, lossy picture) from an SY record.
double sigma_y_estimate(const ShotRecord& record);

class FitError : public NumericalDomainError {
 public:
  using NumericalDomainError::NumericalDomainError;
};

struct FitResult {
  double gamma_hat = 0.0;     ///< rad/s
  double sse = 0.0;
  double gamma_stderr = 0.0;  ///< rad/s, from the SSE curvature at the optimum
  int n_iters = 0;
};

/// Least-squares fit of gamma to P0 records with Omega known. SSE over
/// gamma in [0, 10 Omega] is scanned on a 1001-point grid to bracket the
/// global minimum, then refined by Brent's method (golden section with
/// parabolic steps) to relative tolerance ~1e-7. Requires >= 5 records
/// spanning at least half a Rabi period and non-constant data.
FitResult fit_gamma(const std::vector<ShotRecord>& records, double omega);

struct PtPoint {
  double t = 0.0;
  double rho00_pt = 0.0;
  double std_err = 0.0;
};

/// rho00_PT(t_i) = e^{gamma_hat t_i} p_hat(t_i) with the same scaling on the
/// standard errors.
std::vector<PtPoint> reconstruct_pt_series(const std::vector<ShotRecord>& records, const FitResult& fit);

}  // namespace ption
