#include "cmlptr/tensor_ops.hpp"

#include <cmath>
#include <string>

#include "cmlptr/errors.hpp"
#include "cmlptr/kernels.hpp"

namespace cmlptr {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw ArgumentError("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

// Column of the mode-n unfolding holding element (i1, i2, i3).
Index unfold_column(const Shape3& s, int mode, Index i1, Index i2, Index i3) {
  switch (mode) {
    case 1: return i2 + s[1] * i3;
    case 2: return i1 + s[0] * i3;
    default: return i1 + s[0] * i2;
  }
}

Index unfold_row(int mode, Index i1, Index i2, Index i3) {
  return mode == 1 ? i1 : (mode == 2 ? i2 : i3);
}

void check_spatial(const Tensor3& t, const char* what) {
  if (t.dim(1) < 2 || t.dim(2) < 2) {
    throw DimensionError(std::string(what) + " needs spatial extents >= 2, got " +
                         to_string(t.shape()));
  }
}

}  // namespace

Matrix diff_matrix(Index n) {
  if (n < 2) throw DimensionError("difference matrix needs n >= 2, got " + std::to_string(n));
  Matrix d = Matrix::Zero(n - 1, n);
  for (Index i = 0; i + 1 < n; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -1.0;
  }
  return d;
}

Matrix identity_matrix(Index n) { return Matrix::Identity(n, n); }

Matrix unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const Shape3& s = t.shape();
  const Index rows = t.dim(mode);
  Matrix m(rows, t.size() / rows);
  for (Index i1 = 0; i1 < s[0]; ++i1) {
    for (Index i2 = 0; i2 < s[1]; ++i2) {
      for (Index i3 = 0; i3 < s[2]; ++i3) {
        m(unfold_row(mode, i1, i2, i3), unfold_column(s, mode, i1, i2, i3)) = t(i1, i2, i3);
      }
    }
  }
  return m;
}

Tensor3 fold(const Matrix& m, int mode, const Shape3& shape) {
  check_mode(mode);
  Tensor3 t(shape);
  if (m.rows() != t.dim(mode) || m.rows() * m.cols() != t.size()) {
    throw DimensionError("cannot fold a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix along mode " +
                         std::to_string(mode) + " into " + to_string(shape));
  }
  for (Index i1 = 0; i1 < shape[0]; ++i1) {
    for (Index i2 = 0; i2 < shape[1]; ++i2) {
      for (Index i3 = 0; i3 < shape[2]; ++i3) {
        t(i1, i2, i3) = m(unfold_row(mode, i1, i2, i3), unfold_column(shape, mode, i1, i2, i3));
      }
    }
  }
  return t;
}

Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode) {
  return kernels::mode_n_product(t, m, mode);
}

Tensor3 permute(const Tensor3& t, const std::array<int, 3>& order) {
  std::array<bool, 3> seen{false, false, false};
  for (int o : order) {
    if (o < 1 || o > 3 || seen[static_cast<std::size_t>(o - 1)]) {
      throw ArgumentError("permutation order must be a rearrangement of {1,2,3}");
    }
    seen[static_cast<std::size_t>(o - 1)] = true;
  }
  const Shape3& in = t.shape();
  Shape3 out_shape{};
  for (std::size_t d = 0; d < 3; ++d) out_shape[d] = in[static_cast<std::size_t>(order[d] - 1)];
  Tensor3 out(out_shape);
  std::array<Index, 3> idx{};
  for (idx[0] = 0; idx[0] < in[0]; ++idx[0]) {
    for (idx[1] = 0; idx[1] < in[1]; ++idx[1]) {
      for (idx[2] = 0; idx[2] < in[2]; ++idx[2]) {
        out(idx[static_cast<std::size_t>(order[0] - 1)], idx[static_cast<std::size_t>(order[1] - 1)],
            idx[static_cast<std::size_t>(order[2] - 1)]) = t(idx[0], idx[1], idx[2]);
      }
    }
  }
  return out;
}

namespace {

std::array<int, 3> p_order(int n) {
  if (n != 1 && n != 2) throw ArgumentError("P_n is defined for n in {1,2}, got " + std::to_string(n));
  return {3 - n, 3, n};
}

}  // namespace

Tensor3 permute_p(const Tensor3& t, int n) { return permute(t, p_order(n)); }

Tensor3 inverse_permute_p(const Tensor3& t, int n) {
  const std::array<int, 3> order = p_order(n);
  std::array<int, 3> inverse{};
  for (int d = 0; d < 3; ++d) inverse[static_cast<std::size_t>(order[static_cast<std::size_t>(d)] - 1)] = d + 1;
  return permute(t, inverse);
}

double tv_norm(const Tensor3& t) {
  check_spatial(t, "TV norm");
  const double g1 = mode_n_product(t, diff_matrix(t.dim(1)), 1).squared_norm();
  const double g2 = mode_n_product(t, diff_matrix(t.dim(2)), 2).squared_norm();
  return std::sqrt(g1 + g2);
}

double atv_norm(const Tensor3& t) {
  check_spatial(t, "ATV norm");
  return mode_n_product(t, diff_matrix(t.dim(1)), 1).l1_norm() +
         mode_n_product(t, diff_matrix(t.dim(2)), 2).l1_norm();
}

}  // namespace cmlptr
