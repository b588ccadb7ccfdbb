#include "cmlptr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmlptr/errors.hpp"

namespace cmlptr {

namespace {

std::size_t checked_count(const Shape3& shape) {
  for (Index d : shape) {
    if (d <= 0) {
      throw DimensionError("tensor extents must be positive, got " + to_string(shape));
    }
  }
  return static_cast<std::size_t>(shape[0] * shape[1] * shape[2]);
}

Index mode_extent(const Shape3& shape, int mode) {
  if (mode < 1 || mode > 3) {
    throw ArgumentError("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
  return shape[static_cast<std::size_t>(mode - 1)];
}

}  // namespace

std::string to_string(const Shape3& shape) {
  std::ostringstream out;
  out << shape[0] << "x" << shape[1] << "x" << shape[2];
  return out.str();
}

Tensor3::Tensor3(const Shape3& shape, double fill)
    : shape_(shape), data_(checked_count(shape), fill) {}

Tensor3::Tensor3(const Shape3& shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != checked_count(shape)) {
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + to_string(shape));
  }
}

Index Tensor3::dim(int mode) const { return mode_extent(shape_, mode); }

void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_shape(*this, other, "tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_shape(*this, other, "tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double alpha) noexcept {
  for (double& v : data_) v *= alpha;
  return *this;
}

Tensor3& Tensor3::axpy(double alpha, const Tensor3& other) {
  require_same_shape(*this, other, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
  return *this;
}

double Tensor3::squared_norm() const noexcept {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return sum;
}

double Tensor3::norm() const noexcept { return std::sqrt(squared_norm()); }

double Tensor3::l1_norm() const noexcept {
  double sum = 0.0;
  for (double v : data_) sum += std::abs(v);
  return sum;
}

double Tensor3::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Tensor3::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double alpha, Tensor3 a) { return a *= alpha; }
Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

ComplexTensor3::ComplexTensor3(const Shape3& shape)
    : shape_(shape), data_(checked_count(shape)) {}

Index ComplexTensor3::dim(int mode) const { return mode_extent(shape_, mode); }

ComplexMatrix ComplexTensor3::slice(Index k) const {
  ComplexMatrix m(shape_[0], shape_[1]);
  for (Index i = 0; i < shape_[0]; ++i) {
    for (Index j = 0; j < shape_[1]; ++j) m(i, j) = (*this)(i, j, k);
  }
  return m;
}

void ComplexTensor3::set_slice(Index k, const ComplexMatrix& m) {
  for (Index i = 0; i < shape_[0]; ++i) {
    for (Index j = 0; j < shape_[1]; ++j) (*this)(i, j, k) = m(i, j);
  }
}

double ComplexTensor3::squared_norm() const noexcept {
  double sum = 0.0;
  for (const Complex& v : data_) sum += std::norm(v);
  return sum;
}

}  // namespace cmlptr
