#include "cmlptr/kernels.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "cmlptr/errors.hpp"

namespace cmlptr {

namespace {

struct ModeLayout {
  Index outer;   // product of extents before the mode
  Index extent;  // extent of the mode
  Index inner;   // product of extents after the mode
};

ModeLayout layout_for(const Tensor3& t, const Matrix& m, int mode) {
  if (mode < 1 || mode > 3) {
    throw ArgumentError("mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
  const Shape3& s = t.shape();
  const Index extent = s[static_cast<std::size_t>(mode - 1)];
  if (m.cols() != extent) {
    throw DimensionError("mode-" + std::to_string(mode) + " product: matrix has " +
                         std::to_string(m.cols()) + " columns but tensor extent is " +
                         std::to_string(extent));
  }
  if (m.rows() <= 0) throw DimensionError("mode-n product with an empty matrix");
  Index outer = 1;
  Index inner = 1;
  for (int d = 1; d < mode; ++d) outer *= s[static_cast<std::size_t>(d - 1)];
  for (int d = mode + 1; d <= 3; ++d) inner *= s[static_cast<std::size_t>(d - 1)];
  return {outer, extent, inner};
}

Shape3 product_shape(const Tensor3& t, const Matrix& m, int mode) {
  Shape3 s = t.shape();
  s[static_cast<std::size_t>(mode - 1)] = m.rows();
  return s;
}

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the lifetime of the process.
fftw_plan tube_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  std::vector<fftw_complex> scratch(static_cast<std::size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, scratch.data(), scratch.data(), sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw NumericalError("FFTW could not plan a length-" + std::to_string(n) + " DFT");
  plans.emplace(std::make_pair(n, sign), plan);
  return plan;
}

void check_sign(int sign) {
  if (sign != -1 && sign != 1) throw ArgumentError("DFT sign must be -1 or +1");
}

SliceSvd factorize(const ComplexMatrix& m, SvdVectors vectors, bool& ok) {
  unsigned int options = 0;
  if (vectors == SvdVectors::thin) options = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (vectors == SvdVectors::full) options = Eigen::ComputeFullU | Eigen::ComputeFullV;
  Eigen::BDCSVD<ComplexMatrix> svd(m, options);
  ok = svd.info() == Eigen::Success && svd.singularValues().allFinite();
  SliceSvd out;
  out.sigma = svd.singularValues();
  if (vectors != SvdVectors::none) {
    out.u = svd.matrixU();
    out.v = svd.matrixV();
  }
  return out;
}

[[noreturn]] void throw_slice_failure(Index k) {
  throw FactorizationError("SVD failed on Fourier slice " + std::to_string(k));
}

void check_slice_shapes(const ComplexTensor3& a, const ComplexTensor3& b) {
  if (a.shape()[1] != b.shape()[0] || a.shape()[2] != b.shape()[2]) {
    throw DimensionError("t-product needs (I1,K,I3) x (K,I2,I3), got " + to_string(a.shape()) +
                         " and " + to_string(b.shape()));
  }
}

}  // namespace

namespace kernels {

Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode) {
  const ModeLayout l = layout_for(t, m, mode);
  Tensor3 out(product_shape(t, m, mode));
  const Index rows = m.rows();
  const double* in = t.data().data();
  double* res = out.data().data();
  if (l.inner == 1) {
    // contiguous tubes: dot products with a register accumulator, same k order
#pragma omp parallel for collapse(2) schedule(static)
    for (Index a = 0; a < l.outer; ++a) {
      for (Index j = 0; j < rows; ++j) {
        const double* src = in + a * l.extent;
        double sum = 0.0;
        for (Index k = 0; k < l.extent; ++k) sum += m(j, k) * src[k];
        res[a * rows + j] = sum;
      }
    }
    return out;
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (Index a = 0; a < l.outer; ++a) {
    for (Index j = 0; j < rows; ++j) {
      double* dst = res + (a * rows + j) * l.inner;
      for (Index k = 0; k < l.extent; ++k) {
        const double c = m(j, k);
        const double* src = in + (a * l.extent + k) * l.inner;
        for (Index b = 0; b < l.inner; ++b) dst[b] += c * src[b];
      }
    }
  }
  return out;
}

void dft_tubes(ComplexTensor3& t, int sign) {
  check_sign(sign);
  const Index n = t.shape()[2];
  const Index tubes = t.shape()[0] * t.shape()[1];
  fftw_plan plan = tube_plan(static_cast<int>(n), sign);
  auto* base = reinterpret_cast<fftw_complex*>(t.data().data());
#pragma omp parallel for schedule(static)
  for (Index tube = 0; tube < tubes; ++tube) {
    fftw_complex* p = base + tube * n;
    fftw_execute_dft(plan, p, p);
  }
}

std::vector<SliceSvd> slice_svds(const ComplexTensor3& f, SvdVectors vectors,
                                 bool conjugate_symmetric) {
  const Index n3 = f.shape()[2];
  const Index computed = conjugate_symmetric ? n3 / 2 + 1 : n3;
  std::vector<SliceSvd> out(static_cast<std::size_t>(n3));
  std::vector<char> ok(static_cast<std::size_t>(computed), 1);
#pragma omp parallel for schedule(dynamic)
  for (Index k = 0; k < computed; ++k) {
    bool good = true;
    out[static_cast<std::size_t>(k)] = factorize(f.slice(k), vectors, good);
    ok[static_cast<std::size_t>(k)] = good ? 1 : 0;
  }
  for (Index k = 0; k < computed; ++k) {
    if (!ok[static_cast<std::size_t>(k)]) throw_slice_failure(k);
  }
  for (Index k = computed; k < n3; ++k) {
    const SliceSvd& mirror = out[static_cast<std::size_t>(n3 - k)];
    SliceSvd& s = out[static_cast<std::size_t>(k)];
    s.sigma = mirror.sigma;
    if (vectors != SvdVectors::none) {
      s.u = mirror.u.conjugate();
      s.v = mirror.v.conjugate();
    }
  }
  return out;
}

ComplexTensor3 slice_products(const ComplexTensor3& a, const ComplexTensor3& b) {
  check_slice_shapes(a, b);
  ComplexTensor3 out({a.shape()[0], b.shape()[1], a.shape()[2]});
  const Index n3 = a.shape()[2];
  std::vector<ComplexMatrix> slices(static_cast<std::size_t>(n3));
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n3; ++k) {
    slices[static_cast<std::size_t>(k)].noalias() = a.slice(k) * b.slice(k);
  }
  for (Index k = 0; k < n3; ++k) out.set_slice(k, slices[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace kernels

namespace serial {

Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode) {
  const ModeLayout l = layout_for(t, m, mode);
  Tensor3 out(product_shape(t, m, mode));
  const double* in = t.data().data();
  double* res = out.data().data();
  for (Index a = 0; a < l.outer; ++a) {
    for (Index j = 0; j < m.rows(); ++j) {
      for (Index b = 0; b < l.inner; ++b) {
        double sum = 0.0;
        for (Index k = 0; k < l.extent; ++k) sum += m(j, k) * in[(a * l.extent + k) * l.inner + b];
        res[(a * m.rows() + j) * l.inner + b] = sum;
      }
    }
  }
  return out;
}

void dft_tubes(ComplexTensor3& t, int sign) {
  check_sign(sign);
  const Index n = t.shape()[2];
  fftw_plan plan = tube_plan(static_cast<int>(n), sign);
  auto* base = reinterpret_cast<fftw_complex*>(t.data().data());
  for (Index tube = 0; tube < t.shape()[0] * t.shape()[1]; ++tube) {
    fftw_execute_dft(plan, base + tube * n, base + tube * n);
  }
}

std::vector<SliceSvd> slice_svds(const ComplexTensor3& f, SvdVectors vectors) {
  std::vector<SliceSvd> out;
  out.reserve(static_cast<std::size_t>(f.shape()[2]));
  for (Index k = 0; k < f.shape()[2]; ++k) {
    bool good = true;
    out.push_back(factorize(f.slice(k), vectors, good));
    if (!good) throw_slice_failure(k);
  }
  return out;
}

ComplexTensor3 slice_products(const ComplexTensor3& a, const ComplexTensor3& b) {
  check_slice_shapes(a, b);
  ComplexTensor3 out({a.shape()[0], b.shape()[1], a.shape()[2]});
  for (Index k = 0; k < a.shape()[2]; ++k) out.set_slice(k, a.slice(k) * b.slice(k));
  return out;
}

}  // namespace serial

}  // namespace cmlptr
