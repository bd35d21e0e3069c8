#include "ption/measurement.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ption {

ReadoutProbabilities readout_probabilities(const SystemParams& p, const std::vector<double>& t_grid,
                                           ReadoutObservable observable) {
  p.validate();
  if (t_grid.empty()) throw InvalidArgument("readout_probabilities: empty time grid");

  // propagate_numeric wants a grid starting at 0.
  std::vector<double> grid = t_grid;
  const bool prepend = grid.front() != 0.0;
  if (prepend) grid.insert(grid.begin(), 0.0);
  const Trajectory traj = propagate_numeric(p, ket0(3), grid, default_time_step(p), 3);

  ReadoutProbabilities out;
  out.times = t_grid;
  for (std::size_t i = prepend ? 1 : 0; i < traj.states.size(); ++i) {
    const CMat& m = traj.states[i].m;
    const double rho00 = std::clamp(m(0, 0).real(), 0.0, 1.0);
    const double rho11 = std::clamp(m(1, 1).real(), 0.0, 1.0);
    const double rho22 = std::clamp(m(2, 2).real(), 0.0, 1.0);
    if (observable == ReadoutObservable::P0) {
      out.p_read0.push_back(rho00);
      out.p_leak.push_back(0.0);
    } else {
      const double sy = 2.0 * m(0, 1).imag();
      out.p_read0.push_back(std::clamp(0.5 * (rho00 + rho11 + sy), 0.0, 1.0 - rho22));
      out.p_leak.push_back(rho22);
    }
  }
  return out;
}

std::vector<ShotRecord> sample_shots(const ReadoutProbabilities& probs, std::int64_t n_shots, std::uint64_t seed) {
  if (n_shots < 0) throw InvalidArgument("sample_shots: n_shots must be >= 1, or 0 for noiseless mode");
  std::vector<ShotRecord> out;
  out.reserve(probs.times.size());
  for (std::size_t i = 0; i < probs.times.size(); ++i) {
    ShotRecord r;
    r.t = probs.times[i];
    r.n_shots = n_shots;
    const double p_leak = probs.p_leak[i];
    const double p_read0 = probs.p_read0[i];
    if (n_shots == 0) {
      r.p_hat = p_read0;
      r.leak_hat = p_leak;
      out.push_back(r);
      continue;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 engine(seq);
    for (std::int64_t s = 0; s < n_shots; ++s) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      if (u < p_leak)
        ++r.n_leak;
      else if (u < p_leak + p_read0)
        ++r.n_dark;
    }
    const auto n = static_cast<double>(n_shots);
    r.p_hat = static_cast<double>(r.n_dark) / n;
    r.leak_hat = static_cast<double>(r.n_leak) / n;
    r.std_err = std::sqrt(r.p_hat * (1.0 - r.p_hat) / n);
    out.push_back(r);
  }
  return out;
}

std::vector<ShotRecord> simulate_shots(const SystemParams& p, const std::vector<double>& t_grid, std::int64_t n_shots,
                                       std::uint64_t seed, ReadoutObservable observable) {
  if (n_shots < 0) throw InvalidArgument("simulate_shots: n_shots must be >= 1, or 0 for noiseless mode");
  return sample_shots(readout_probabilities(p, t_grid, observable), n_shots, seed);
}

double sigma_y_estimate(const ShotRecord& record) { return 2.0 * record.p_hat - (1.0 - record.leak_hat); }

namespace {

double sum_squared_error(const std::vector<ShotRecord>& records, double omega, double gamma) {
  const SystemParams p{omega, gamma};
  double sse = 0.0;
  for (const auto& r : records) {
    const double d = r.p_hat - ground_population(p, r.t);
    sse += d * d;
  }
  return sse;
}

}  // namespace

FitResult fit_gamma(const std::vector<ShotRecord>& records, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("fit_gamma: omega must be positive");
  if (records.size() < 5) throw FitError("fit_gamma: need at least 5 records");
  const auto [t_lo, t_hi] = std::minmax_element(records.begin(), records.end(),
                                                [](const ShotRecord& a, const ShotRecord& b) { return a.t < b.t; });
  if (t_hi->t - t_lo->t < std::numbers::pi / omega * (1.0 - 1e-9))
    throw FitError("fit_gamma: records must span at least half a Rabi period");
  const auto [p_lo, p_hi] = std::minmax_element(
      records.begin(), records.end(), [](const ShotRecord& a, const ShotRecord& b) { return a.p_hat < b.p_hat; });
  if (p_hi->p_hat - p_lo->p_hat < 1e-12) throw FitError("fit_gamma: data are constant; gamma is not identifiable");

  const auto sse = [&](double g) { return sum_squared_error(records, omega, g); };
  const double g_max = 10.0 * omega;
  constexpr int kGrid = 1000;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double v = sse(g_max * i / kGrid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = g_max * std::max(best - 1, 0) / kGrid;
  const double hi = g_max * std::min(best + 1, kGrid) / kGrid;

  boost::uintmax_t iters = 200;
  const auto [g_hat, s_min] = boost::math::tools::brent_find_minima(sse, lo, hi, 24, iters);

  FitResult fit;
  fit.gamma_hat = g_hat;
  fit.sse = s_min;
  fit.n_iters = static_cast<int>(iters);

  // Var(gamma) ~ sigma^2 (J^T J)^{-1} with SSE'' ~ 2 J^T J.
  const double h = std::max(1e-4 * g_hat, 1e-6 * omega);
  const double g0 = std::max(g_hat, h);
  const double curvature = (sse(g0 + h) - 2.0 * sse(g0) + sse(g0 - h)) / (h * h);
  const double sigma2 = s_min / static_cast<double>(records.size() - 1);
  fit.gamma_stderr = curvature > 0.0 ? std::sqrt(2.0 * sigma2 / curvature) : std::numeric_limits<double>::infinity();
  return fit;
}

std::vector<PtPoint> reconstruct_pt_series(const std::vector<ShotRecord>& records, const FitResult& fit) {
  if (!(fit.gamma_hat >= 0.0) || !std::isfinite(fit.gamma_hat))
    throw InvalidArgument("reconstruct_pt_series: invalid fit");
  std::vector<PtPoint> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (fit.gamma_hat * r.t > 700.0) throw NumericalDomainError("reconstruct_pt_series: e^{gamma t} would overflow");
    const double scale = std::exp(fit.gamma_hat * r.t);
    out.push_back({r.t, scale * r.p_hat, scale * r.std_err});
  }
  return out;
}

}  // namespace ption
