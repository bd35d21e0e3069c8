#pragma once

// State propagation for the lossy qubit (and its 3-level completion), in the
// lossy picture rho(t) and the balanced gain/loss picture
// rho_PT(t) = e^{gamma t} rho(t).

#include <optional>
#include <vector>

#include "ption/model.hpp"

namespace ption {

enum class Picture { Lossy, PT };

const char* to_string(Picture picture);

/// Density matrix over (|0>, |1>) or (|0>, |1>, |2>). Entries are allowed to
/// be unnormalized; Liouvillian eigenmodes (not all of them Hermitian) are
/// carried in the same type.
struct DensityMatrix {
  CMat m;
  Picture picture = Picture::Lossy;

  std::size_t dim() const { return m.dim(); }
};

/// Raised by spectral propagation inside the EP band.
class EpDegenerateError : public NumericalDomainError {
 public:
  using NumericalDomainError::NumericalDomainError;
};

/// Raised when a normalization or normalized expectation needs a trace that
/// is (numerically) zero.
class DegenerateStateError : public NumericalDomainError {
 public:
  using NumericalDomainError::NumericalDomainError;
};

/// Raised when an operation only makes sense in a particular PT phase.
class PhaseError : public NumericalDomainError {
 public:
  using NumericalDomainError::NumericalDomainError;
};

DensityMatrix ket0(std::size_t dim = 2);
DensityMatrix ket1(std::size_t dim = 2);
/// |psi><psi| for psi = (c0, c1), normalized. Throws InvalidArgument on a
/// zero vector.
DensityMatrix pure_state(cplx c0, cplx c1);

/// Checks a lossy-picture physical state: Hermitian, 0 <= Tr <= 1 and
/// positive semidefinite to 1e-9. Throws InvalidArgument otherwise.
void validate_state(const DensityMatrix& rho);

struct Observables {
  double sigma_z_norm = 0.0;
  double sigma_y_norm = 0.0;
  double rho00 = 0.0;
  double rho11 = 0.0;
  double rho22 = 0.0;  ///< zero for 2-level states
  double trace = 0.0;  ///< trace of the (|0>, |1>) block
};

/// Expectations Tr[sigma rho] / Tr[rho] over the (|0>, |1>) block, with
/// <sigma_z> = rho11 - rho00 and <sigma_y> = 2 Im rho01. For a 3-level
/// state the block trace excludes the leaked population rho22.
Observables observables(const DensityMatrix& rho);

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<Observables> obs;
};

Trajectory make_trajectory(std::vector<double> times, std::vector<DensityMatrix> states);

/// Uniform grid of n points over [0, t_max] (n >= 2).
std::vector<double> uniform_grid(double t_max, std::size_t n);

/// (2 pi / Omega) / 1000, reduced to 1 / (10 gamma) when that is smaller.
double default_time_step(const SystemParams& p);

/// RK4 integration of the master equation sampled on `t_grid` (strictly
/// increasing, starting at 0). `levels` = 2 integrates
/// d rho/dt = -i (H_eff rho - rho H_eff^dagger); `levels` = 3 integrates the
/// full Lindblad equation with jump operator sqrt(2 gamma) |2><1|, embedding
/// 2-level inputs with rho22 = 0. Output is always in the lossy picture.
Trajectory propagate_numeric(const SystemParams& p, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                             double dt, int levels = 2);

/// rho(t) = exp(L t) rho(0) with the 4x4 generator (PT picture uses
/// L + gamma I), applied as n equal steps with ||L t / n||_1 <= 4. Valid
/// everywhere including the EP, where it is the reference path.
DensityMatrix propagate_exact(const SystemParams& p, const DensityMatrix& rho0, double t,
                              Picture picture = Picture::Lossy);

/// Spectral decomposition: rho_PT(t) = sum_i e^{eta_i t} c_i R_i with
/// eta = {kappa, 0, 0, -kappa} and c_i = Tr[L_i^dagger rho(0)]; the lossy
/// picture adds e^{-gamma t}. Throws EpDegenerateError when spec.at_ep.
DensityMatrix propagate_spectral(const LiouvillianSpectrum& spec, const DensityMatrix& rho0, double t,
                                 Picture picture = Picture::Lossy);

/// Closed-form rho_PT(t) for the initial state |0>, valid in both phases and
/// at the EP: entries are written through the entire functions
/// cosh(kappa t), sinh(kappa t)/kappa and (cosh(kappa t) - 1)/kappa^2 of
/// kappa^2, evaluated with real trigonometric forms in the symmetric phase
/// and by their power series near the EP.
DensityMatrix closed_form_pt(const SystemParams& p, double t);

/// Lossy ground population rho00(t) for the initial state |0>, evaluated so
/// that e^{-gamma t} never multiplies an overflowed hyperbolic function.
double ground_population(const SystemParams& p, double t);

/// Entrywise e^{gamma t} rho. Throws NumericalDomainError if gamma t > 700.
DensityMatrix to_pt_picture(const DensityMatrix& rho, double gamma, double t);
/// Entrywise e^{-gamma t} rho.
DensityMatrix to_lossy_picture(const DensityMatrix& rho, double gamma, double t);

/// rho / Tr[rho]; throws DegenerateStateError if |Tr| <= 1e-300.
DensityMatrix normalize(const DensityMatrix& rho);

/// Trace norm between normalize(rho(t)) and the normalized dominant mode
/// R_1, per trajectory sample. Only defined in the broken phase. For a
/// 3-level trajectory the (|0>, |1>) block is used.
std::vector<double> trace_distance_to_steady(const SystemParams& p, const Trajectory& traj);

/// The (|0>, |1>) block of a 2- or 3-level state.
DensityMatrix qubit_block(const DensityMatrix& rho);

}  // namespace ption
