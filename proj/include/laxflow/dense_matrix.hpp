#ifndef LAXFLOW_DENSE_MATRIX_HPP
#define LAXFLOW_DENSE_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "laxflow/errors.hpp"

namespace laxflow {

/// Square dense matrix with row-major storage.
///
/// The element type is usually std::complex<Real>; Real may be double, long
/// double or __float128. Only the arithmetic the Lax machinery needs is
/// provided (sums, products, adjoint, trace, powers). Dimensions are small
/// (n up to a few hundred) so nothing is blocked or vectorised explicitly.
template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, T{}) {}

  DenseMatrix(std::initializer_list<std::initializer_list<T>> rows) : dim_(rows.size()) {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
      if (row.size() != dim_) throw DimensionMismatch("DenseMatrix: rows must form a square");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static DenseMatrix zero(std::size_t dim) { return DenseMatrix(dim); }

  static DenseMatrix identity(std::size_t dim) {
    DenseMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = T(1);
    return m;
  }

  template <class U>
  static DenseMatrix diagonal(std::span<const U> values) {
    DenseMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = T(values[i]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * dim_ + col];
  }

  std::span<const T> values() const noexcept { return data_; }

  DenseMatrix& operator+=(const DenseMatrix& other) {
    require_same_dim(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  DenseMatrix& operator-=(const DenseMatrix& other) {
    require_same_dim(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  DenseMatrix& operator*=(const T& scale) {
    for (auto& v : data_) v *= scale;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
  friend DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
  friend DenseMatrix operator*(DenseMatrix lhs, const T& scale) { return lhs *= scale; }
  friend DenseMatrix operator*(const T& scale, DenseMatrix rhs) { return rhs *= scale; }
  friend DenseMatrix operator-(DenseMatrix m) { return m *= T(-1); }

  friend DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs) {
    lhs.require_same_dim(rhs);
    const std::size_t n = lhs.dim_;
    DenseMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        const T a = lhs(i, l);
        if (a == T{}) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(l, j);
      }
    }
    return out;
  }

  /// Conjugate transpose.
  DenseMatrix adjoint() const {
    DenseMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(j, i) = conj_value((*this)(i, j));
    return out;
  }

  T trace() const {
    T sum{};
    for (std::size_t i = 0; i < dim_; ++i) sum += (*this)(i, i);
    return sum;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  static T conj_value(const T& v) {
    if constexpr (requires { v.imag(); }) {
      return T(v.real(), -v.imag());
    } else {
      return v;
    }
  }

  void require_same_dim(const DenseMatrix& other) const {
    if (other.dim_ != dim_) throw DimensionMismatch("DenseMatrix: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<T> data_;
};

template <class Real>
using BasicComplexMatrix = DenseMatrix<std::complex<Real>>;

using ComplexMatrix = BasicComplexMatrix<double>;

/// Magnitude of a real or complex scalar as a double. Works for __float128,
/// which has no std::abs overload.
template <class T>
double magnitude(const T& v) {
  if constexpr (requires { v.imag(); }) {
    const double re = static_cast<double>(v.real());
    const double im = static_cast<double>(v.imag());
    return std::hypot(re, im);
  } else {
    return std::fabs(static_cast<double>(v));
  }
}

/// Square root for double, long double and __float128. The quad case refines the
/// double estimate with two Newton steps.
template <class Real>
Real real_sqrt(Real x) {
  if constexpr (std::is_same_v<Real, double> || std::is_same_v<Real, long double> ||
                std::is_same_v<Real, float>) {
    return std::sqrt(x);
  } else {
    if (!(x > Real(0))) return Real(0);
    Real r = static_cast<Real>(std::sqrt(static_cast<double>(x)));
    r = Real(0.5) * (r + x / r);
    r = Real(0.5) * (r + x / r);
    return r;
  }
}

/// AB - BA.
template <class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator: dimension mismatch");
  return a * b - b * a;
}

/// Largest entry magnitude.
template <class T>
double max_abs(const DenseMatrix<T>& m) {
  double best = 0.0;
  for (const auto& v : m.values()) best = std::max(best, magnitude(v));
  return best;
}

/// Largest entry magnitude of a - b.
template <class T>
double max_abs_diff(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  return max_abs(a - b);
}

/// Largest entry magnitude of m - m^+.
template <class T>
double hermiticity_defect(const DenseMatrix<T>& m) {
  return max_abs(m - m.adjoint());
}

/// tr(A^k) for k = 1..kmax by iterated multiplication.
template <class T>
std::vector<T> power_traces(const DenseMatrix<T>& a, int kmax) {
  std::vector<T> out;
  if (kmax <= 0) return out;
  out.reserve(static_cast<std::size_t>(kmax));
  DenseMatrix<T> power = a;
  out.push_back(power.trace());
  for (int k = 2; k <= kmax; ++k) {
    power = power * a;
    out.push_back(power.trace());
  }
  return out;
}

/// A^0, A^1, ..., A^kmax.
template <class T>
std::vector<DenseMatrix<T>> matrix_powers(const DenseMatrix<T>& a, int kmax) {
  std::vector<DenseMatrix<T>> out;
  out.reserve(static_cast<std::size_t>(std::max(kmax, 0) + 1));
  out.push_back(DenseMatrix<T>::identity(a.dim()));
  for (int k = 1; k <= kmax; ++k) out.push_back(out.back() * a);
  return out;
}

/// Re-express a matrix in another element type (e.g. quad precision -> double).
template <class To, class From>
DenseMatrix<To> matrix_cast(const DenseMatrix<From>& m) {
  DenseMatrix<To> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const auto& v = m(i, j);
      if constexpr (requires { v.imag(); }) {
        using R = typename To::value_type;
        out(i, j) = To(static_cast<R>(v.real()), static_cast<R>(v.imag()));
      } else {
        out(i, j) = To(v);
      }
    }
  }
  return out;
}

}  // namespace laxflow

#endif  // LAXFLOW_DENSE_MATRIX_HPP
