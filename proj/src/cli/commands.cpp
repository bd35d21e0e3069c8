#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "ption/cli.hpp"
#include "ption/order_params.hpp"

namespace ption::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUs = 1e-6;

std::string num(double v) { return fmt::format("{:.9g}", v == 0.0 ? 0.0 : v); }

void write_header(std::ostream& out, const RunConfig& cfg) {
  fmt::print(out, "# ption {}\n", to_string(cfg.command));
  for (const auto& [key, value] : cfg.describe()) fmt::print(out, "# {} = {}\n", key, value);
}

double rad_per_s(double khz) { return kTwoPi * 1e3 * khz; }
double to_khz(double rad_s) { return rad_s / (kTwoPi * 1e3); }

SystemParams params_at(const RunConfig& cfg, double gamma_khz) { return params_from_khz(cfg.omega_khz, gamma_khz); }

DensityMatrix initial_density(const InitialState& s) {
  switch (s.kind) {
    case InitialKind::Ket0: return ket0();
    case InitialKind::Ket1: return ket1();
    case InitialKind::Custom: return pure_state(s.c0, s.c1);
  }
  return ket0();
}

void write_trajectory_row(std::ostream& out, double t, const DensityMatrix& rho, const Observables& o) {
  const cplx r01 = rho.m(0, 1);
  fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", num(t / kUs), num(o.rho00), num(o.rho11),
             rho.dim() == 3 ? num(o.rho22) : std::string(), num(r01.real()), num(r01.imag()), num(o.trace),
             num(o.sigma_z_norm), num(o.sigma_y_norm));
}

std::vector<double> sample_times(const RunConfig& cfg) {
  std::vector<double> t(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) t[static_cast<std::size_t>(i)] = cfg.t_max_us * kUs * i / (cfg.n_samples - 1);
  return t;
}

std::string derived_pt_path(const std::string& output) {
  std::string base = output;
  if (base.size() > 4 && base.compare(base.size() - 4, 4, ".csv") == 0) base.resize(base.size() - 4);
  return base + "_pt.csv";
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path));
  f << content;
  f.close();
  if (!f) throw IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace

void run_spectrum(const RunConfig& cfg, std::ostream& out) {
  write_header(out, cfg);
  out << "# eigenvalues in units of Omega: e = H_PT, heff = H_eff, l = Liouvillian\n";
  out << "gamma_over_omega,re_e1,im_e1,re_e2,im_e2,re_heff1,im_heff1,re_heff2,im_heff2,"
         "re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_l4,im_l4\n";
  for (double g : grid_values(cfg.gamma_khz)) {
    const SystemParams p = params_at(cfg, g);
    const auto e = h_pt_eigenvalues(p);
    const auto h = h_eigensystem(p);
    const auto l = liouvillian_spectrum(p).lambdas;
    std::string row = num(p.gamma / p.omega);
    for (cplx z : {e[0], e[1], h.e1, h.e2, l[0], l[1], l[2], l[3]})
      row += "," + num(z.real() / p.omega) + "," + num(z.imag() / p.omega);
    out << row << '\n';
  }
}

double run_evolve(const RunConfig& cfg, std::ostream& out) {
  const SystemParams p = params_at(cfg, cfg.gamma_khz.start);
  const DensityMatrix rho0 = initial_density(cfg.initial_state);
  const std::vector<double> grid = sample_times(cfg);
  const Trajectory traj = propagate_numeric(p, rho0, grid, default_time_step(p), cfg.levels);

  // Reference: closed form from |0>, otherwise the spectral sum (matrix
  // exponential near the EP, where the eigenbasis is ill-conditioned).
  const bool from_ket0 = cfg.initial_state.kind == InitialKind::Ket0;
  const bool near_ep = in_ep_band(p, 1e-3);
  const char* reference = from_ket0 ? "closed_form" : (near_ep ? "matrix_exponential" : "spectral");
  const LiouvillianSpectrum spec = liouvillian_spectrum(p);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    CMat ref;
    if (from_ket0)
      ref = to_lossy_picture(closed_form_pt(p, t), p.gamma, t).m;
    else if (near_ep)
      ref = propagate_exact(p, rho0, t).m;
    else
      ref = propagate_spectral(spec, rho0, t).m;
    max_diff = std::max(max_diff, max_abs_diff(qubit_block(traj.states[i]).m, ref));
  }

  write_header(out, cfg);
  out << "t_us,rho00,rho11,rho22,re_rho01,im_rho01,trace,sigma_z_norm,sigma_y_norm\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    DensityMatrix rho = traj.states[i];
    if (cfg.picture == Picture::PT) rho = to_pt_picture(rho, p.gamma, grid[i]);
    write_trajectory_row(out, grid[i], rho, observables(rho));
  }
  fmt::print(out, "# max_abs_diff_numeric_vs_{} = {}\n", reference, num(max_diff));
  return max_diff;
}

void run_order_params(const RunConfig& cfg, std::ostream& out) {
  std::vector<double> gammas;
  for (double g : grid_values(cfg.gamma_khz)) gammas.push_back(rad_per_s(g));
  const double omega = rad_per_s(cfg.omega_khz);
  const auto rows = order_parameter_sweep(omega, gammas, cfg.n_points);

  write_header(out, cfg);
  out << "gamma_over_omega,sigma_z_analytic,sigma_z_numeric,sigma_y_analytic,sigma_y_numeric,method\n";
  for (const auto& r : rows)
    fmt::print(out, "{},{},{},{},{},{}\n", num(r.gamma / omega), num(r.sigma_z_analytic), num(r.sigma_z_numeric),
               num(r.sigma_y_analytic), num(r.sigma_y_numeric), to_string(r.method));
}

void run_turning_point(const RunConfig& cfg, std::ostream& out) {
  const double omega = rad_per_s(cfg.omega_khz);
  std::vector<double> gammas;
  for (double g : grid_values(cfg.gamma_khz)) gammas.push_back(rad_per_s(g));
  std::vector<std::vector<PopulationPoint>> columns;
  for (double k : cfg.t_periods) columns.push_back(population_sweep(omega, gammas, k * kTwoPi / omega));

  write_header(out, cfg);
  out << "gamma_over_omega";
  for (double k : cfg.t_periods) fmt::print(out, ",rho00_{}T", k);
  out << '\n';
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    out << num(gammas[i] / omega);
    for (const auto& col : columns) out << ',' << num(col[i].rho00);
    out << '\n';
  }
  for (double k : cfg.t_periods) {
    const double g_min = find_gamma_min(omega, k * kTwoPi / omega);
    fmt::print(out, "# gamma_min t_periods = {} gamma_over_omega = {} gamma_khz = {}\n", k, num(g_min / omega),
               num(to_khz(g_min)));
  }
}

FitResult run_experiment(const RunConfig& cfg, std::ostream& shots_out, std::ostream& pt_out, std::ostream& log) {
  const SystemParams p = params_at(cfg, cfg.gamma_khz.start);
  std::vector<ShotRecord> records;
  if (!cfg.shots_input.empty()) {
    std::ifstream in(cfg.shots_input);
    if (!in) throw IoError(fmt::format("cannot open shots_input '{}'", cfg.shots_input));
    records = read_shots_csv(in);
  } else {
    records = simulate_shots(p, sample_times(cfg), cfg.n_shots, cfg.seed, ReadoutObservable::P0);
  }

  write_header(shots_out, cfg);
  fmt::print(shots_out, "# metadata seed = {} omega_khz = {} gamma_true_khz = {} prng = {}\n", cfg.seed,
             num(cfg.omega_khz), num(cfg.gamma_khz.start), kPrngAlgorithm);
  shots_out << "t_us,n_shots,n_dark,p_hat,std_err\n";
  for (const auto& r : records)
    fmt::print(shots_out, "{},{},{},{},{}\n", num(r.t / kUs), r.n_shots, r.n_dark, num(r.p_hat), num(r.std_err));

  const FitResult fit = fit_gamma(records, p.omega);
  const auto pt = reconstruct_pt_series(records, fit);

  write_header(pt_out, cfg);
  fmt::print(pt_out, "# fit gamma_hat_khz = {} gamma_stderr_khz = {} sse = {} n_iters = {}\n",
             num(to_khz(fit.gamma_hat)), num(to_khz(fit.gamma_stderr)), num(fit.sse), fit.n_iters);
  pt_out << "t_us,rho00_pt,std_err\n";
  for (const auto& q : pt) fmt::print(pt_out, "{},{},{}\n", num(q.t / kUs), num(q.rho00_pt), num(q.std_err));

  fmt::print(log, "gamma_hat = {} +/- {} kHz (gamma_true = {} kHz)\n", num(to_khz(fit.gamma_hat)),
             num(to_khz(fit.gamma_stderr)), num(cfg.gamma_khz.start));
  return fit;
}

std::vector<ShotRecord> read_shots_csv(std::istream& in) {
  std::vector<ShotRecord> records;
  std::string line;
  bool seen_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != "t_us,n_shots,n_dark,p_hat,std_err")
        throw ConfigError(fmt::format("shots csv line {}: unexpected header '{}'", line_no, line));
      seen_header = true;
      continue;
    }
    std::istringstream ss(line);
    ShotRecord r;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    double t_us = 0.0;
    ss >> t_us >> c1 >> r.n_shots >> c2 >> r.n_dark >> c3 >> r.p_hat >> c4 >> r.std_err;
    if (!ss || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || !(ss >> std::ws).eof())
      throw ConfigError(fmt::format("shots csv line {}: malformed row", line_no));
    if (r.n_shots < 0 || r.n_dark < 0 || r.n_dark > r.n_shots || r.p_hat < 0.0 || r.p_hat > 1.0)
      throw ConfigError(fmt::format("shots csv line {}: counts out of range", line_no));
    if (r.n_shots > 0) r.p_hat = static_cast<double>(r.n_dark) / static_cast<double>(r.n_shots);
    r.t = t_us * kUs;
    records.push_back(r);
  }
  if (!seen_header) throw ConfigError("shots csv: missing header");
  return records;
}

int run(const RunConfig& cfg, std::ostream& err) {
  try {
    std::ostringstream out;
    switch (cfg.command) {
      case Command::Spectrum: run_spectrum(cfg, out); break;
      case Command::Evolve: run_evolve(cfg, out); break;
      case Command::OrderParams: run_order_params(cfg, out); break;
      case Command::TurningPoint: run_turning_point(cfg, out); break;
      case Command::Experiment: {
        std::ostringstream pt;
        run_experiment(cfg, out, pt, err);
        std::string pt_path = cfg.pt_output;
        if (pt_path.empty()) pt_path = cfg.output == "-" ? "-" : derived_pt_path(cfg.output);
        write_file(cfg.output, out.str());
        if (pt_path == "-" && cfg.output == "-") std::cout << '\n';
        write_file(pt_path, pt.str());
        return kExitOk;
      }
    }
    write_file(cfg.output, out.str());
    return kExitOk;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    fmt::print(err, "i/o error: {}\n", e.what());
    return kExitIo;
  } catch (const std::domain_error& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace ption::cli
