#include "ption/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ption {

const char* to_string(Picture picture) { return picture == Picture::Lossy ? "lossy" : "pt"; }

DensityMatrix ket0(std::size_t dim) {
  if (dim != 2 && dim != 3) throw InvalidArgument("ket0: dimension must be 2 or 3");
  DensityMatrix rho{CMat(dim), Picture::Lossy};
  rho.m(0, 0) = 1.0;
  return rho;
}

DensityMatrix ket1(std::size_t dim) {
  if (dim != 2 && dim != 3) throw InvalidArgument("ket1: dimension must be 2 or 3");
  DensityMatrix rho{CMat(dim), Picture::Lossy};
  rho.m(1, 1) = 1.0;
  return rho;
}

DensityMatrix pure_state(cplx c0, cplx c1) {
  const double n2 = std::norm(c0) + std::norm(c1);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw InvalidArgument("pure_state: amplitudes must be finite and not all zero");
  const double s = 1.0 / std::sqrt(n2);
  c0 *= s;
  c1 *= s;
  return {CMat{{c0 * std::conj(c0), c0 * std::conj(c1)}, {c1 * std::conj(c0), c1 * std::conj(c1)}}, Picture::Lossy};
}

void validate_state(const DensityMatrix& rho) {
  const CMat& m = rho.m;
  if (m.dim() != 2 && m.dim() != 3) throw InvalidArgument("state: dimension must be 2 or 3");
  if (!m.is_finite()) throw InvalidArgument("state: non-finite entries");
  if (!m.is_hermitian(1e-12)) throw InvalidArgument("state: not Hermitian");
  const double tr = m.trace().real();
  if (tr < -1e-9 || tr > 1.0 + 1e-9) throw InvalidArgument("state: trace outside [0, 1]");
  // Sylvester-style check on all principal minors is enough at these sizes.
  for (std::size_t i = 0; i < m.dim(); ++i)
    if (m(i, i).real() < -1e-9) throw InvalidArgument("state: negative population");
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j)
      if (m(i, i).real() * m(j, j).real() - std::norm(m(i, j)) < -1e-9)
        throw InvalidArgument("state: not positive semidefinite");
  if (m.dim() == 3) {
    const cplx det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if (det.real() < -1e-9) throw InvalidArgument("state: not positive semidefinite");
  }
}

DensityMatrix qubit_block(const DensityMatrix& rho) {
  if (rho.dim() == 2) return rho;
  if (rho.dim() != 3) throw InvalidArgument("qubit_block: dimension must be 2 or 3");
  return {CMat{{rho.m(0, 0), rho.m(0, 1)}, {rho.m(1, 0), rho.m(1, 1)}}, rho.picture};
}

Observables observables(const DensityMatrix& rho) {
  if (rho.dim() != 2 && rho.dim() != 3) throw InvalidArgument("observables: dimension must be 2 or 3");
  const CMat& m = rho.m;
  Observables o;
  o.rho00 = m(0, 0).real();
  o.rho11 = m(1, 1).real();
  o.rho22 = rho.dim() == 3 ? m(2, 2).real() : 0.0;
  o.trace = o.rho00 + o.rho11;
  if (!(std::abs(o.trace) > 1e-300)) throw DegenerateStateError("observables: zero trace on the qubit block");
  o.sigma_z_norm = (o.rho11 - o.rho00) / o.trace;
  o.sigma_y_norm = (kI * (m(1, 0) - m(0, 1))).real() / o.trace;
  return o;
}

Trajectory make_trajectory(std::vector<double> times, std::vector<DensityMatrix> states) {
  if (times.size() != states.size()) throw InvalidArgument("trajectory: times and states differ in length");
  Trajectory traj{std::move(times), std::move(states), {}};
  traj.obs.reserve(traj.states.size());
  for (const auto& s : traj.states) traj.obs.push_back(observables(s));
  return traj;
}

std::vector<double> uniform_grid(double t_max, std::size_t n) {
  if (n < 2) throw InvalidArgument("uniform_grid: need at least two points");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("uniform_grid: t_max must be positive");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

double default_time_step(const SystemParams& p) {
  p.validate();
  double dt = 2.0 * std::numbers::pi / p.omega / 1000.0;
  if (p.gamma > 0.0) dt = std::min(dt, 1.0 / (10.0 * p.gamma));
  return dt;
}

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("time grid is empty");
  if (t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]) || !std::isfinite(t_grid[i]))
      throw InvalidArgument("time grid must be strictly increasing");
}

CMat embed3(const CMat& m2) {
  CMat m3(3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) m3(i, j) = m2(i, j);
  return m3;
}

// Generator of the (|0>, |1>) block without jumps.
Derivative two_level_rhs(const SystemParams& p) {
  const CMat h = build_h_eff(p);
  const CMat h_dag = h.adjoint();
  return [h, h_dag](const CVec& y) {
    const CMat rho = unflatten(y);
    return flatten(-kI * (h * rho - rho * h_dag));
  };
}

// Full Lindblad equation on (|0>, |1>, |2>) with J = sqrt(2 gamma) |2><1|.
Derivative three_level_rhs(const SystemParams& p) {
  CMat h(3);
  h(0, 1) = h(1, 0) = 0.5 * p.omega;
  CMat j(3);
  j(2, 1) = std::sqrt(2.0 * p.gamma);
  const CMat j_dag = j.adjoint();
  const CMat jdj = j_dag * j;
  return [h, j, j_dag, jdj](const CVec& y) {
    const CMat rho = unflatten(y);
    CMat d = -kI * (h * rho - rho * h);
    d += j * rho * j_dag;
    d -= 0.5 * (jdj * rho + rho * jdj);
    return flatten(d);
  };
}

// e^{-damping t} times the three entire functions of kappa^2 from which the
// |0>-initial closed forms are assembled:
//   cosh(kt), sinh(kt)/k, (cosh(kt) - 1)/k^2, and e^{-damping t} itself.
struct Kernel {
  double c, s, d, e;
};

Kernel kernel(double kappa_sq, double t, double damping) {
  const double e = std::exp(-damping * t);
  const double x = kappa_sq * t * t;
  if (std::abs(x) < 0.1) {
    // Power series in x; 12 terms leave < 1e-30 relative error.
    double c = 0.0, s = 0.0, d = 0.0;
    double term = 1.0;  // x^n / (2n)!
    for (int n = 0; n < 12; ++n) {
      c += term;
      s += term / (2.0 * n + 1.0);
      d += term / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      term *= x / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return {e * c, e * s * t, e * d * t * t, e};
  }
  if (kappa_sq < 0.0) {
    const double w = std::sqrt(-kappa_sq);
    const double half = std::sin(0.5 * w * t);
    return {e * std::cos(w * t), e * std::sin(w * t) / w, e * 2.0 * half * half / (w * w), e};
  }
  const double k = std::sqrt(kappa_sq);
  const double kt = k * t;
  if (kt < 20.0) {
    const double half = std::sinh(0.5 * kt);
    return {e * std::cosh(kt), e * std::sinh(kt) / k, e * 2.0 * half * half / kappa_sq, e};
  }
  // Combine exponents before exponentiating so e^{kt} never overflows on
  // its own when the damping brings it back into range.
  const double grow = std::exp((k - damping) * t);
  const double decay = std::exp(-(k + damping) * t);
  const double c = 0.5 * (grow + decay);
  return {c, 0.5 * (grow - decay) / k, (c - e) / kappa_sq, e};
}

}  // namespace

Trajectory propagate_numeric(const SystemParams& p, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                             double dt, int levels) {
  p.validate();
  if (levels != 2 && levels != 3) throw InvalidArgument("propagate_numeric: levels must be 2 or 3");
  if (rho0.picture != Picture::Lossy) throw InvalidArgument("propagate_numeric: initial state must be in the lossy picture");
  validate_state(rho0);
  if (static_cast<int>(rho0.dim()) > levels)
    throw InvalidArgument("propagate_numeric: 3-level initial state needs a 3-level run");
  check_grid(t_grid);

  const Derivative rhs = levels == 2 ? two_level_rhs(p) : three_level_rhs(p);
  CVec y = flatten(levels == 3 && rho0.dim() == 2 ? embed3(rho0.m) : rho0.m);

  std::vector<DensityMatrix> states;
  states.reserve(t_grid.size());
  states.push_back({unflatten(y), Picture::Lossy});
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    y = rk4_propagate(rhs, std::move(y), t_grid[i] - t_grid[i - 1], dt);
    states.push_back({unflatten(y), Picture::Lossy});
  }
  return make_trajectory(t_grid, std::move(states));
}

DensityMatrix propagate_exact(const SystemParams& p, const DensityMatrix& rho0, double t, Picture picture) {
  p.validate();
  if (rho0.dim() != 2) throw InvalidArgument("propagate_exact: expects a 2-level state");
  CMat gen = build_liouvillian(p);
  if (picture == Picture::PT) gen += CMat::identity(4) * cplx{p.gamma, 0.0};
  // Near the EP the generator is close to defective and repeated squaring
  // amplifies rounding exponentially; stepping with a short-time propagator
  // keeps the error growth linear in the number of steps.
  const double span = gen.one_norm() * t;
  const double n_steps = std::max(1.0, std::ceil(span / 4.0));
  if (n_steps > 1e8) throw NumericalDomainError("propagate_exact: t too large for stepped propagation");
  const auto n = static_cast<long long>(n_steps);
  const CMat u = mat_exp(gen, t / static_cast<double>(n));
  CVec v = liouville_vector(rho0.m);
  for (long long i = 0; i < n; ++i) v = u * v;
  return {from_liouville_vector(v), picture};
}

DensityMatrix propagate_spectral(const LiouvillianSpectrum& spec, const DensityMatrix& rho0, double t,
                                 Picture picture) {
  if (spec.at_ep)
    throw EpDegenerateError("propagate_spectral: Liouvillian is defective at the EP; use propagate_exact");
  if (rho0.dim() != 2) throw InvalidArgument("propagate_spectral: expects a 2-level state");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("propagate_spectral: t must be non-negative");
  const double g = spec.params.gamma;
  CMat out(2);
  for (std::size_t i = 0; i < 4; ++i) {
    const cplx c = trace_inner(spec.lefts[i], rho0.m);
    if (c == cplx{}) continue;
    // lambda_i = -gamma + eta_i
    const cplx rate = picture == Picture::Lossy ? spec.lambdas[i] : spec.lambdas[i] + g;
    out += spec.rights[i] * (std::exp(rate * t) * c);
  }
  if (!out.is_finite()) throw NumericalDomainError("propagate_spectral: result overflowed");
  return {out, picture};
}

DensityMatrix closed_form_pt(const SystemParams& p, double t) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("closed_form_pt: t must be non-negative");
  const Kernel k = kernel(p.kappa_sq(), t, 0.0);
  const double g = p.gamma;
  const double w = p.omega;
  const double rho00 = 1.0 + g * k.s + (g * g - 0.5 * w * w) * k.d;
  const double rho11 = 0.5 * w * w * k.d;
  const cplx rho01 = kI * (0.5 * w * (g * k.d + k.s));
  CMat m{{rho00, rho01}, {std::conj(rho01), rho11}};
  if (!m.is_finite()) throw NumericalDomainError("closed_form_pt: PT-picture state overflowed");
  return {m, Picture::PT};
}

double ground_population(const SystemParams& p, double t) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("ground_population: t must be non-negative");
  const Kernel k = kernel(p.kappa_sq(), t, p.gamma);
  const double g = p.gamma;
  return k.e + g * k.s + (g * g - 0.5 * p.omega * p.omega) * k.d;
}

DensityMatrix to_pt_picture(const DensityMatrix& rho, double gamma, double t) {
  if (rho.picture != Picture::Lossy) throw InvalidArgument("to_pt_picture: input must be in the lossy picture");
  if (gamma * t > 700.0) throw NumericalDomainError("to_pt_picture: e^{gamma t} would overflow");
  return {rho.m * cplx{std::exp(gamma * t), 0.0}, Picture::PT};
}

DensityMatrix to_lossy_picture(const DensityMatrix& rho, double gamma, double t) {
  if (rho.picture != Picture::PT) throw InvalidArgument("to_lossy_picture: input must be in the PT picture");
  return {rho.m * cplx{std::exp(-gamma * t), 0.0}, Picture::Lossy};
}

DensityMatrix normalize(const DensityMatrix& rho) {
  const cplx tr = rho.m.trace();
  if (!(std::abs(tr) > 1e-300)) throw DegenerateStateError("normalize: trace is zero");
  return {rho.m * (1.0 / tr), rho.picture};
}

std::vector<double> trace_distance_to_steady(const SystemParams& p, const Trajectory& traj) {
  if (classify_phase(p).tag != PhaseTag::PTB)
    throw PhaseError("trace_distance_to_steady: the dominant mode is a steady state only in the broken phase");
  const LiouvillianSpectrum spec = liouvillian_spectrum(p);
  const CMat steady = normalize({spec.rights[0], Picture::Lossy}).m;
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(trace_norm_diff(normalize(qubit_block(s)).m, steady));
  return out;
}

}  // namespace ption
