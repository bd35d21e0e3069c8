#include "ption/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace ption {

CMat::CMat(std::size_t dim) : dim_(dim), a_(dim * dim, cplx{0.0, 0.0}) {
  if (dim == 0) throw InvalidArgument("CMat: dimension must be positive");
}

CMat::CMat(std::initializer_list<std::initializer_list<cplx>> rows) : CMat(rows.size()) {
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != dim_) throw InvalidArgument("CMat: rows must form a square matrix");
    std::copy(row.begin(), row.end(), a_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    ++r;
  }
}

CMat CMat::identity(std::size_t dim) {
  CMat m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(std::span<const cplx> diag) {
  CMat m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMat CMat::adjoint() const {
  CMat out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(j, i));
  return out;
}

CMat CMat::transpose() const {
  CMat out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(j, i);
  return out;
}

cplx CMat::trace() const {
  cplx tr{0.0, 0.0};
  for (std::size_t i = 0; i < dim_; ++i) tr += (*this)(i, i);
  return tr;
}

double CMat::frobenius_norm() const {
  double s = 0.0;
  for (const auto& x : a_) s += std::norm(x);
  return std::sqrt(s);
}

double CMat::one_norm() const {
  double best = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) col += std::abs((*this)(i, j));
    best = std::max(best, col);
  }
  return best;
}

bool CMat::is_finite() const {
  return std::all_of(a_.begin(), a_.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

bool CMat::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

CMat& CMat::operator+=(const CMat& rhs) {
  if (rhs.dim_ != dim_) throw InvalidArgument("CMat: dimension mismatch in +");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
  return *this;
}

CMat& CMat::operator-=(const CMat& rhs) {
  if (rhs.dim_ != dim_) throw InvalidArgument("CMat: dimension mismatch in -");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& x : a_) x *= s;
  return *this;
}

CMat operator+(CMat lhs, const CMat& rhs) { return lhs += rhs; }
CMat operator-(CMat lhs, const CMat& rhs) { return lhs -= rhs; }
CMat operator*(CMat m, cplx s) { return m *= s; }
CMat operator*(cplx s, CMat m) { return m *= s; }

CMat operator*(const CMat& lhs, const CMat& rhs) {
  const std::size_t n = lhs.dim();
  if (rhs.dim() != n) throw InvalidArgument("CMat: dimension mismatch in *");
  CMat out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx a = lhs(i, k);
      if (a == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

CVec operator*(const CMat& m, const CVec& v) {
  const std::size_t n = m.dim();
  if (v.size() != n) throw InvalidArgument("CMat: dimension mismatch in matrix-vector product");
  CVec out(n, cplx{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m(i, j) * v[j];
  return out;
}

double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("max_abs_diff: dimension mismatch");
  double best = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) best = std::max(best, std::abs(a.data()[k] - b.data()[k]));
  return best;
}

CVec flatten(const CMat& m) { return {m.data().begin(), m.data().end()}; }

CMat unflatten(const CVec& v) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw InvalidArgument("unflatten: length is not a perfect square");
  CMat m(n);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

CMat inverse(const CMat& m, double singular_tol) {
  const std::size_t n = m.dim();
  CMat a = m;
  CMat inv = CMat::identity(n);
  const double scale = std::max(m.one_norm(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= singular_tol * scale) throw NumericalDomainError("inverse: matrix is singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const cplx d = 1.0 / a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) *= d;
      inv(col, j) *= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx f = a(r, col);
      if (f == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

CMat mat_exp(const CMat& m, double t) {
  if (!m.is_finite() || !std::isfinite(t)) throw InvalidArgument("mat_exp: non-finite input");
  if (t < 0.0) throw InvalidArgument("mat_exp: t must be non-negative");
  const std::size_t n = m.dim();
  if (t == 0.0) return CMat::identity(n);

  CMat a = m * cplx{t, 0.0};
  const double norm = a.one_norm();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a *= cplx{std::ldexp(1.0, -squarings), 0.0};

  CMat sum = CMat::identity(n);
  CMat term = CMat::identity(n);
  for (int k = 1; k < 64; ++k) {
    term = term * a;
    term *= cplx{1.0 / k, 0.0};
    sum += term;
    if (term.one_norm() < 1e-16 * sum.one_norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

CVec rk4_propagate(const Derivative& deriv, CVec y, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("rk4_propagate: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("rk4_propagate: t_end must be non-negative");

  const auto axpy = [](const CVec& base, double h, const CVec& k) {
    CVec out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + h * k[i];
    return out;
  };
  const auto step = [&](CVec& state, double h) {
    const CVec k1 = deriv(state);
    const CVec k2 = deriv(axpy(state, 0.5 * h, k1));
    const CVec k3 = deriv(axpy(state, 0.5 * h, k2));
    const CVec k4 = deriv(axpy(state, h, k3));
    for (std::size_t i = 0; i < state.size(); ++i) state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  const auto n_full = static_cast<long long>(std::floor(t_end / dt + 1e-9));
  for (long long i = 0; i < n_full; ++i) step(y, dt);
  const double rest = t_end - static_cast<double>(n_full) * dt;
  if (rest > 1e-12 * dt) step(y, rest);
  return y;
}

double trace_norm_diff(const CMat& a, const CMat& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("trace_norm_diff: dimension mismatch");
  const CMat d = a - b;
  if (d.dim() == 2) {
    // (s1 + s2)^2 = s1^2 + s2^2 + 2 s1 s2 = ||d||_F^2 + 2 |det d|
    const double fro2 = std::norm(d(0, 0)) + std::norm(d(0, 1)) + std::norm(d(1, 0)) + std::norm(d(1, 1));
    const double det = std::abs(d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0));
    return std::sqrt(std::max(0.0, fro2 + 2.0 * det));
  }
  const auto n = static_cast<Eigen::Index>(d.dim());
  Eigen::MatrixXcd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(e).singularValues().sum();
}

}  // namespace ption
