#pragma once

// Generators of the lossy qubit: the non-Hermitian Hamiltonians and the
// 4x4 Liouvillian of the (|0>, |1>) block, with their closed-form spectra.
//
// Conventions, fixed once for the whole library:
//  * Basis order is (|0>, |1>) (and |2> for the leaked level); matrix index
//    0 is |0>.
//  * Reference tables of this model are usually printed in the reversed
//    order (|1>, |0>). `reverse_basis` converts between the two.
//  * Liouville vectors stack rho as (rho11, rho10, rho01, rho00), i.e. the
//    row-major flattening of rho written in the reversed order. The 4x4
//    generator acts on vectors in that order.
//  * Rates are angular frequencies in rad/s, times in seconds.

#include <array>

#include "ption/numerics.hpp"

namespace ption {

/// Relative EP tolerance on |kappa| / Omega. Inside this band the closed
/// forms are evaluated through their kappa -> 0 limits and spectral
/// propagation is refused.
inline constexpr double kEpTolerance = 1e-6;

struct SystemParams {
  double omega = 0.0;  ///< Rabi rate, rad/s
  double gamma = 0.0;  ///< loss rate of |1>, rad/s

  /// Throws InvalidArgument unless omega > 0, gamma >= 0 and both finite.
  void validate() const;
  /// kappa^2 = gamma^2 - Omega^2, in (rad/s)^2.
  double kappa_sq() const { return (gamma - omega) * (gamma + omega); }
};

/// Build parameters from ordinary frequencies in kHz (multiplies by 2 pi 10^3).
SystemParams params_from_khz(double omega_khz, double gamma_khz);

enum class PhaseTag { PTS, EP, PTB };

struct Phase {
  PhaseTag tag = PhaseTag::PTS;
  double kappa_sq = 0.0;
};

const char* to_string(PhaseTag tag);

/// PTS below the EP band, EP inside |kappa| <= kEpTolerance * Omega, PTB above.
Phase classify_phase(const SystemParams& p);
bool in_ep_band(const SystemParams& p, double band = kEpTolerance);

/// kappa = sqrt(gamma^2 - Omega^2) on the principal branch: real and >= 0 in
/// the broken phase, +i*omega in the symmetric phase.
cplx kappa(const SystemParams& p);

/// H_eff = (Omega/2) sigma_x - i gamma |1><1|.
CMat build_h_eff(const SystemParams& p);
/// H_PT = (Omega/2) sigma_x - i (gamma/2) sigma_z = H_eff + i (gamma/2) I.
CMat build_h_pt(const SystemParams& p);

/// Pauli operators on the (|0>, |1>) block in the sign convention used
/// throughout: <sigma_z> = rho11 - rho00 (so |0> has sigma_z = -1) and
/// <sigma_y> = i (rho10 - rho01) = 2 Im rho01.
CMat sigma_x();
CMat sigma_y();
CMat sigma_z();

struct HamiltonianSpectrum {
  cplx e1, e2;
  CVec v1, v2;  ///< unnormalized, internal basis order
  bool at_ep = false;
};

/// E = (-i gamma +/- sqrt(Omega^2 - gamma^2)) / 2 with eigenvectors
/// (Omega, -i gamma +/- sqrt(Omega^2 - gamma^2)).
HamiltonianSpectrum h_eigensystem(const SystemParams& p);

/// Eigenvalues of H_PT, +/- sqrt(Omega^2 - gamma^2) / 2 (first has the
/// non-negative real/imaginary part).
std::array<cplx, 2> h_pt_eigenvalues(const SystemParams& p);

/// 4x4 generator on Liouville vectors (rho11, rho10, rho01, rho00),
/// equivalent to d rho/dt = -i (H_eff rho - rho H_eff^dagger).
CMat build_liouvillian(const SystemParams& p);

CVec liouville_vector(const CMat& rho);
CMat from_liouville_vector(const CVec& v);

/// Conjugation by the exchange matrix: swaps the roles of |0> and |1>.
CMat reverse_basis(const CMat& m);

struct LiouvillianSpectrum {
  SystemParams params;
  std::array<cplx, 4> lambdas;  ///< {-gamma+kappa, -gamma, -gamma, -gamma-kappa}
  std::array<CMat, 4> rights;   ///< R_i, internal basis order
  std::array<CMat, 4> lefts;    ///< L_i with Tr[L_i^dagger R_j] = delta_ij; empty at the EP
  bool at_ep = false;
};

/// Closed-form Liouvillian eigensystem. Right eigenmatrices follow the
/// standard closed forms (R_2 with off-diagonal -2 i gamma / Omega in the
/// reversed order); left eigenmatrices come from inverting the matrix of
/// right eigenvectors, which enforces biorthonormality. At the EP R_1 and
/// R_4 coincide, no left basis exists and `at_ep` is set.
LiouvillianSpectrum liouvillian_spectrum(const SystemParams& p);

/// Tr[A^dagger B].
cplx trace_inner(const CMat& a, const CMat& b);

}  // namespace ption
