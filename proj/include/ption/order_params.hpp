#pragma once

// Order parameters of the PT transition: long-time averages of the
// normalized <sigma_z> and |<sigma_y>|, plus the fixed-time population
// turning point.

#include <vector>

#include "ption/dynamics.hpp"

namespace ption {

enum class Axis { Z, Y };

enum class AverageMethod { PeriodAverage, SteadyState };

const char* to_string(AverageMethod method);

/// 0 below the EP, -sqrt(gamma^2 - Omega^2) / gamma at and above it.
double sigma_z_analytic(const SystemParams& p);

/// (Omega/gamma) (1 - 2 arccos(gamma/Omega) / pi) below the EP, Omega/gamma
/// at and above it. At gamma = 0 the value is the limit 2/pi (see
/// `is_zero_loss_limit`).
double sigma_y_analytic(const SystemParams& p);
bool is_zero_loss_limit(const SystemParams& p);

/// Numerical order parameter from the propagated state, starting at `rho0`
/// (default |0>):
///  - symmetric phase: mean of the normalized observable (absolute value for
///    Y) over n_points samples t_n = n T / n_points, n = 1..n_points, of one
///    period T = 2 pi / sqrt(Omega^2 - gamma^2);
///  - broken phase: the normalized observable at t_e chosen so that the
///    subdominant modes are suppressed by e^{-kappa t_e} < 1e-6;
///  - within 10 kEpTolerance of the EP: a single evaluation on the
///    quasi-stationary plateau (Omega t_e = 1e7 at or above the EP, half a
///    period below it).
/// Uses the exact generator exponential, not the closed forms.
double sigma_numeric(const SystemParams& p, Axis which, int n_points, const DensityMatrix& rho0 = ket0());

AverageMethod numeric_method(const SystemParams& p);

struct OrderParamResult {
  double gamma = 0.0;
  double sigma_z_analytic = 0.0;
  double sigma_y_analytic = 0.0;
  double sigma_z_numeric = 0.0;
  double sigma_y_numeric = 0.0;
  AverageMethod method = AverageMethod::PeriodAverage;
};

OrderParamResult order_parameters(const SystemParams& p, int n_points = 4096);

/// One result per gamma, in input order.
std::vector<OrderParamResult> order_parameter_sweep(double omega, const std::vector<double>& gammas,
                                                    int n_points = 4096);

struct PopulationPoint {
  double gamma = 0.0;
  double rho00 = 0.0;
};

/// Lossy rho00(t) from |0> for each gamma.
std::vector<PopulationPoint> population_sweep(double omega, const std::vector<double>& gammas, double t);

/// Turning point of rho00(t; gamma) over gamma in (0, 3 Omega].
///
/// For t beyond about one Rabi period the ground amplitude crosses zero at
/// several loss rates below the EP, and each crossing is an exact (global)
/// minimum of rho00. The turning point reported is the local minimizer with
/// the largest gamma, which is the one that moves toward the EP as t grows.
/// Minima are bracketed on a grid uniform in sqrt(Omega^2 - gamma^2) (where
/// the crossings are evenly spaced) merged with a uniform gamma grid, then
/// refined to relative tolerance 1e-7.
double find_gamma_min(double omega, double t);

}  // namespace ption
