#include "ption/order_params.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ption {

namespace {

constexpr double kPi = std::numbers::pi;

double normalized_observable(const DensityMatrix& rho, Axis which) {
  const Observables o = observables(rho);
  return which == Axis::Z ? o.sigma_z_norm : o.sigma_y_norm;
}

// Evaluation time for the broken phase: the R_2, R_3 modes fall off as
// e^{-kappa t} relative to R_1, with prefactors that grow like Omega/kappa
// toward the EP.
double steady_time(const SystemParams& p) {
  const double k = std::sqrt(p.kappa_sq());
  return (std::log(1e6) + 2.0 * std::log1p(p.omega / k)) / k;
}

}  // namespace

const char* to_string(AverageMethod method) {
  return method == AverageMethod::PeriodAverage ? "period_average" : "steady_state";
}

double sigma_z_analytic(const SystemParams& p) {
  p.validate();
  if (p.gamma < p.omega) return 0.0;
  return -std::sqrt(p.kappa_sq()) / p.gamma;
}

bool is_zero_loss_limit(const SystemParams& p) { return p.gamma == 0.0; }

double sigma_y_analytic(const SystemParams& p) {
  p.validate();
  if (p.gamma >= p.omega) return p.omega / p.gamma;
  if (p.gamma == 0.0) return 2.0 / kPi;
  // 1 - 2 arccos(g)/pi = 2 asin(g)/pi, which stays accurate as g -> 0.
  const double g = p.gamma / p.omega;
  return 2.0 / kPi * std::asin(g) / g;
}

AverageMethod numeric_method(const SystemParams& p) {
  p.validate();
  if (in_ep_band(p, 10.0 * kEpTolerance) || p.kappa_sq() > 0.0) return AverageMethod::SteadyState;
  return AverageMethod::PeriodAverage;
}

double sigma_numeric(const SystemParams& p, Axis which, int n_points, const DensityMatrix& rho0) {
  p.validate();
  if (n_points < 64) throw InvalidArgument("sigma_numeric: n_points must be at least 64");
  if (rho0.dim() != 2) throw InvalidArgument("sigma_numeric: expects a 2-level initial state");

  const double k2 = p.kappa_sq();
  if (in_ep_band(p, 10.0 * kEpTolerance)) {
    double t_e = 1e7 / p.omega;
    if (k2 < 0.0 && !in_ep_band(p)) t_e = std::min(t_e, kPi / std::sqrt(-k2));
    return normalized_observable(propagate_exact(p, rho0, t_e, Picture::PT), which);
  }
  if (k2 > 0.0) return normalized_observable(propagate_exact(p, rho0, steady_time(p), Picture::PT), which);

  const double period = 2.0 * kPi / std::sqrt(-k2);
  const double dt = period / n_points;
  CMat gen = build_liouvillian(p);
  gen += CMat::identity(4) * cplx{p.gamma, 0.0};
  const CMat step = mat_exp(gen, dt);
  CVec v = liouville_vector(rho0.m);
  double sum = 0.0;
  for (int n = 1; n <= n_points; ++n) {
    v = step * v;
    const double x = normalized_observable({from_liouville_vector(v), Picture::PT}, which);
    sum += which == Axis::Y ? std::abs(x) : x;
  }
  return sum / n_points;
}

OrderParamResult order_parameters(const SystemParams& p, int n_points) {
  OrderParamResult r;
  r.gamma = p.gamma;
  r.sigma_z_analytic = sigma_z_analytic(p);
  r.sigma_y_analytic = sigma_y_analytic(p);
  r.sigma_z_numeric = sigma_numeric(p, Axis::Z, n_points);
  r.sigma_y_numeric = sigma_numeric(p, Axis::Y, n_points);
  r.method = numeric_method(p);
  return r;
}

std::vector<OrderParamResult> order_parameter_sweep(double omega, const std::vector<double>& gammas, int n_points) {
  std::vector<OrderParamResult> out;
  out.reserve(gammas.size());
  for (double g : gammas) out.push_back(order_parameters({omega, g}, n_points));
  return out;
}

std::vector<PopulationPoint> population_sweep(double omega, const std::vector<double>& gammas, double t) {
  if (gammas.empty()) throw InvalidArgument("population_sweep: empty gamma list");
  if (!(t > 0.0)) throw InvalidArgument("population_sweep: t must be positive");
  std::vector<PopulationPoint> out;
  out.reserve(gammas.size());
  for (double g : gammas) out.push_back({g, ground_population({omega, g}, t)});
  return out;
}

double find_gamma_min(double omega, double t) {
  if (!(omega > 0.0)) throw InvalidArgument("find_gamma_min: omega must be positive");
  if (!(t > 0.0)) throw InvalidArgument("find_gamma_min: t must be positive");

  const double g_max = 3.0 * omega;
  // Zero crossings of the ground amplitude are evenly spaced in
  // w = sqrt(Omega^2 - gamma^2) with spacing 2 pi / t; sample at least 20
  // points per crossing.
  const auto n_w = static_cast<std::size_t>(std::max(2000.0, std::ceil(20.0 * omega * t / kPi)));
  const std::size_t n_g = 3000;
  std::vector<double> grid;
  grid.reserve(n_w + n_g);
  for (std::size_t i = 1; i < n_w; ++i) {
    const double w = omega * static_cast<double>(i) / static_cast<double>(n_w);
    grid.push_back(std::sqrt((omega - w) * (omega + w)));
  }
  for (std::size_t i = 1; i <= n_g; ++i) grid.push_back(g_max * static_cast<double>(i) / static_cast<double>(n_g));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const auto f = [&](double g) { return ground_population({omega, g}, t); };
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), f);

  std::size_t best = grid.size();
  for (std::size_t i = grid.size() - 2; i >= 1; --i) {
    if (values[i] <= values[i - 1] && values[i] <= values[i + 1]) {
      best = i;
      break;
    }
  }
  if (best == grid.size()) {
    // Monotone on the grid: the minimum sits on the boundary.
    return values.front() <= values.back() ? grid.front() : grid.back();
  }
  const auto r = boost::math::tools::brent_find_minima(f, grid[best - 1], grid[best + 1], 24);
  return r.first;
}

}  // namespace ption
