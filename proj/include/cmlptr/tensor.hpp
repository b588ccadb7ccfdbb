#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmlptr {

using Index = std::ptrdiff_t;
using Complex = std::complex<double>;

/// Row-major dense matrix; holds degradation operators, subspaces and
/// difference matrices.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Extents (I1, I2, I3) of a 3-way tensor.
using Shape3 = std::array<Index, 3>;

std::string to_string(const Shape3& shape);

/// Dense real 3-way array. Element (i1, i2, i3) lives at (i1 * I2 + i2) * I3 + i3,
/// so mode-3 tube fibers are contiguous and mode 1 varies slowest.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(const Shape3& shape, double fill = 0.0);
  Tensor3(const Shape3& shape, std::vector<double> data);

  static Tensor3 zeros(const Shape3& shape) { return Tensor3(shape); }

  const Shape3& shape() const noexcept { return shape_; }
  /// Extent along `mode` (1-based, as in the mathematical notation).
  Index dim(int mode) const;
  Index size() const noexcept { return static_cast<Index>(data_.size()); }

  double& operator()(Index i1, Index i2, Index i3) noexcept {
    return data_[static_cast<std::size_t>((i1 * shape_[1] + i2) * shape_[2] + i3)];
  }
  double operator()(Index i1, Index i2, Index i3) const noexcept {
    return data_[static_cast<std::size_t>((i1 * shape_[1] + i2) * shape_[2] + i3)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double alpha) noexcept;
  /// this += alpha * other
  Tensor3& axpy(double alpha, const Tensor3& other);

  double squared_norm() const noexcept;
  double norm() const noexcept;
  /// Entrywise absolute sum.
  double l1_norm() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Shape3 shape_{0, 0, 0};
  std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double alpha, Tensor3 a);
Tensor3 operator-(Tensor3 a);

/// Throws DimensionError when the shapes differ; `what` names the caller.
void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what);

/// Complex counterpart of Tensor3 with the same layout; holds mode-3 Fourier images.
class ComplexTensor3 {
 public:
  ComplexTensor3() = default;
  explicit ComplexTensor3(const Shape3& shape);

  const Shape3& shape() const noexcept { return shape_; }
  Index dim(int mode) const;
  Index size() const noexcept { return static_cast<Index>(data_.size()); }

  Complex& operator()(Index i1, Index i2, Index i3) noexcept {
    return data_[static_cast<std::size_t>((i1 * shape_[1] + i2) * shape_[2] + i3)];
  }
  const Complex& operator()(Index i1, Index i2, Index i3) const noexcept {
    return data_[static_cast<std::size_t>((i1 * shape_[1] + i2) * shape_[2] + i3)];
  }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  /// Copy of frontal slice k as an I1 x I2 matrix.
  ComplexMatrix slice(Index k) const;
  void set_slice(Index k, const ComplexMatrix& m);

  double squared_norm() const noexcept;

 private:
  Shape3 shape_{0, 0, 0};
  std::vector<Complex> data_;
};

}  // namespace cmlptr
