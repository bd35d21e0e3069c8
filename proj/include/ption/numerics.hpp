#pragma once

// Small dense complex linear algebra and fixed-step integration.
//
// Everything here works on matrices of dimension <= 9 (a 3-level density
// matrix flattened is the largest object we ever touch), so storage is a
// plain row-major vector and all algorithms are the textbook ones.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace ption {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a caller violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for errors where the inputs are well-formed but the requested
/// computation has no meaningful value (EP degeneracy, zero trace, overflow).
class NumericalDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using CVec = std::vector<cplx>;

class CMat {
 public:
  CMat() = default;
  explicit CMat(std::size_t dim);
  CMat(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMat identity(std::size_t dim);
  static CMat diagonal(std::span<const cplx> diag);
  static CMat diagonal(std::initializer_list<cplx> diag) { return diagonal(std::span<const cplx>(diag.begin(), diag.size())); }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t row, std::size_t col) { return a_[row * dim_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return a_[row * dim_ + col]; }

  std::span<const cplx> data() const { return a_; }
  std::span<cplx> data() { return a_; }

  CMat adjoint() const;
  CMat transpose() const;
  cplx trace() const;
  double frobenius_norm() const;
  /// Maximum absolute column sum.
  double one_norm() const;
  bool is_finite() const;
  bool is_hermitian(double tol) const;

  CMat& operator+=(const CMat& rhs);
  CMat& operator-=(const CMat& rhs);
  CMat& operator*=(cplx s);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

CMat operator+(CMat lhs, const CMat& rhs);
CMat operator-(CMat lhs, const CMat& rhs);
CMat operator*(const CMat& lhs, const CMat& rhs);
CMat operator*(CMat m, cplx s);
CMat operator*(cplx s, CMat m);
CVec operator*(const CMat& m, const CVec& v);

/// Largest entrywise modulus of a - b.
double max_abs_diff(const CMat& a, const CMat& b);

/// Row-major flatten / unflatten of a square matrix.
CVec flatten(const CMat& m);
CMat unflatten(const CVec& v);

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Throws NumericalDomainError when a pivot falls below `singular_tol`
/// relative to the matrix one-norm.
CMat inverse(const CMat& m, double singular_tol = 1e-13);

/// exp(m * t) by scaling and squaring with a Taylor series, truncated once
/// the next term drops below 1e-16 relative to the partial sum.
CMat mat_exp(const CMat& m, double t);

using Derivative = std::function<CVec(const CVec&)>;

/// Classical fixed-step RK4 from 0 to t_end. When dt does not divide t_end
/// the last step is shortened so the integration lands exactly on t_end.
CVec rk4_propagate(const Derivative& deriv, CVec y0, double t_end, double dt);

/// Trace norm of a - b (sum of singular values), without the conventional
/// factor 1/2.
double trace_norm_diff(const CMat& a, const CMat& b);

}  // namespace ption
