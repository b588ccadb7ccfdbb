#pragma once

#include <vector>

#include "cmlptr/tensor.hpp"

// Data-parallel inner loops. Every kernel in `cmlptr::kernels` is OpenMP
// parallel over independent slices/rows with no cross-thread reductions, so its
// output is bit-identical for any thread count. `cmlptr::serial` keeps the
// plain single-threaded versions for testing and benchmarking.

namespace cmlptr {

/// Singular triplets of one Fourier-domain frontal slice.
struct SliceSvd {
  ComplexMatrix u;      ///< rows x k (thin) or rows x rows (full)
  Vector sigma;         ///< k = min(rows, cols), nonincreasing
  ComplexMatrix v;      ///< cols x k (thin) or cols x cols (full)
};

enum class SvdVectors { none, thin, full };

namespace kernels {

Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode);

/// In-place DFT of every mode-3 tube. sign = -1 forward, +1 backward (unscaled).
void dft_tubes(ComplexTensor3& t, int sign);

/// SVD of every frontal slice of a Fourier image. When `conjugate_symmetric` is
/// set, the image is assumed to come from a real tensor and slices
/// k > I3/2 are obtained by conjugating slice I3-k instead of being factorized.
std::vector<SliceSvd> slice_svds(const ComplexTensor3& f, SvdVectors vectors,
                                 bool conjugate_symmetric);

/// Frontal-slice products C_k = A_k * B_k of two Fourier images.
ComplexTensor3 slice_products(const ComplexTensor3& a, const ComplexTensor3& b);

}  // namespace kernels

namespace serial {

Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode);
void dft_tubes(ComplexTensor3& t, int sign);
/// Factorizes every slice; no symmetry shortcut.
std::vector<SliceSvd> slice_svds(const ComplexTensor3& f, SvdVectors vectors);
ComplexTensor3 slice_products(const ComplexTensor3& a, const ComplexTensor3& b);

}  // namespace serial

}  // namespace cmlptr
