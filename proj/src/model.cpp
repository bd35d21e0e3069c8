#include "ption/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ption {

void SystemParams::validate() const {
  if (!std::isfinite(omega) || !(omega > 0.0)) throw InvalidArgument("SystemParams: omega must be positive and finite");
  if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidArgument("SystemParams: gamma must be non-negative and finite");
}

SystemParams params_from_khz(double omega_khz, double gamma_khz) {
  constexpr double kKhzToRad = 2.0 * std::numbers::pi * 1e3;
  SystemParams p{omega_khz * kKhzToRad, gamma_khz * kKhzToRad};
  p.validate();
  return p;
}

const char* to_string(PhaseTag tag) {
  switch (tag) {
    case PhaseTag::PTS: return "PTS";
    case PhaseTag::EP: return "EP";
    case PhaseTag::PTB: return "PTB";
  }
  return "?";
}

bool in_ep_band(const SystemParams& p, double band) {
  return std::abs(p.kappa_sq()) <= band * band * p.omega * p.omega;
}

Phase classify_phase(const SystemParams& p) {
  p.validate();
  const double k2 = p.kappa_sq();
  if (in_ep_band(p)) return {PhaseTag::EP, k2};
  return {k2 < 0.0 ? PhaseTag::PTS : PhaseTag::PTB, k2};
}

cplx kappa(const SystemParams& p) {
  const double k2 = p.kappa_sq();
  return k2 >= 0.0 ? cplx{std::sqrt(k2), 0.0} : cplx{0.0, std::sqrt(-k2)};
}

CMat sigma_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
CMat sigma_y() { return {{0.0, kI}, {-kI, 0.0}}; }
CMat sigma_z() { return {{-1.0, 0.0}, {0.0, 1.0}}; }

CMat build_h_eff(const SystemParams& p) {
  const double half = 0.5 * p.omega;
  return {{0.0, half}, {half, -kI * p.gamma}};
}

CMat build_h_pt(const SystemParams& p) {
  return 0.5 * p.omega * sigma_x() - kI * (0.5 * p.gamma) * sigma_z();
}

namespace {

// sqrt(Omega^2 - gamma^2) on the principal branch.
cplx detuning_root(const SystemParams& p) {
  const double d2 = -p.kappa_sq();
  return d2 >= 0.0 ? cplx{std::sqrt(d2), 0.0} : cplx{0.0, std::sqrt(-d2)};
}

}  // namespace

HamiltonianSpectrum h_eigensystem(const SystemParams& p) {
  p.validate();
  const cplx s = detuning_root(p);
  HamiltonianSpectrum out;
  out.e1 = 0.5 * (-kI * p.gamma + s);
  out.e2 = 0.5 * (-kI * p.gamma - s);
  out.v1 = {p.omega, -kI * p.gamma + s};
  out.v2 = {p.omega, -kI * p.gamma - s};
  out.at_ep = in_ep_band(p);
  return out;
}

std::array<cplx, 2> h_pt_eigenvalues(const SystemParams& p) {
  p.validate();
  const cplx s = detuning_root(p);
  return {0.5 * s, -0.5 * s};
}

CMat build_liouvillian(const SystemParams& p) {
  const cplx a = kI * (0.5 * p.omega);
  const double g = p.gamma;
  return {
      {-2.0 * g, a, -a, 0.0},
      {a, -g, 0.0, -a},
      {-a, 0.0, -g, a},
      {0.0, -a, a, 0.0},
  };
}

CVec liouville_vector(const CMat& rho) {
  if (rho.dim() != 2) throw InvalidArgument("liouville_vector: expects a 2x2 matrix");
  return {rho(1, 1), rho(1, 0), rho(0, 1), rho(0, 0)};
}

CMat from_liouville_vector(const CVec& v) {
  if (v.size() != 4) throw InvalidArgument("from_liouville_vector: expects 4 components");
  return {{v[3], v[2]}, {v[1], v[0]}};
}

CMat reverse_basis(const CMat& m) {
  const std::size_t n = m.dim();
  CMat out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = m(n - 1 - i, n - 1 - j);
  return out;
}

cplx trace_inner(const CMat& a, const CMat& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("trace_inner: dimension mismatch");
  cplx s{};
  for (std::size_t k = 0; k < a.data().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
  return s;
}

LiouvillianSpectrum liouvillian_spectrum(const SystemParams& p) {
  p.validate();
  const cplx k = kappa(p);
  const double g = p.gamma;
  const double w = p.omega;
  const double w2 = w * w;

  LiouvillianSpectrum out;
  out.params = p;
  out.at_ep = in_ep_band(p);
  out.lambdas = {-g + k, cplx{-g, 0.0}, cplx{-g, 0.0}, -g - k};

  // Written in the reversed (|1>, |0>) order, then converted.
  const CMat r1{{-(2.0 * g * (-g + k) + w2) / w2, kI * (-g + k) / w}, {-kI * (-g + k) / w, 1.0}};
  const CMat r2{{1.0, -2.0 * kI * g / w}, {0.0, 1.0}};
  const CMat r3{{0.0, 1.0}, {1.0, 0.0}};
  const CMat r4{{(2.0 * g * (g + k) - w2) / w2, -kI * (g + k) / w}, {kI * (g + k) / w, 1.0}};
  out.rights = {reverse_basis(r1), reverse_basis(r2), reverse_basis(r3), reverse_basis(r4)};

  if (out.at_ep) {
    // Coalesced mode, scaled to unit trace: (1/2) [[1, -i], [i, 1]] reversed.
    const CMat r_ep = reverse_basis(CMat{{0.5, -0.5 * kI}, {0.5 * kI, 0.5}});
    out.rights[0] = r_ep;
    out.rights[3] = r_ep;
    return out;
  }

  // Columns are the right eigenvectors; rows of the inverse are the dual
  // (left) eigenvectors w_i with w_i V = e_i. vec(L_i) = conj(w_i).
  CMat v(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const CVec col = liouville_vector(out.rights[i]);
    for (std::size_t r = 0; r < 4; ++r) v(r, i) = col[r];
  }
  const CMat w_inv = inverse(v);
  for (std::size_t i = 0; i < 4; ++i) {
    CVec row(4);
    for (std::size_t c = 0; c < 4; ++c) row[c] = std::conj(w_inv(i, c));
    out.lefts[i] = from_liouville_vector(row);
  }
  return out;
}

}  // namespace ption
