#pragma once

#include "cmlptr/tensor.hpp"

namespace cmlptr {

/// Unnormalized forward DFT along every mode-3 tube.
ComplexTensor3 fft_mode3(const Tensor3& t);
ComplexTensor3 fft_mode3(const ComplexTensor3& t);

/// Inverse DFT along mode 3 with the 1/I3 factor.
ComplexTensor3 ifft_mode3(const ComplexTensor3& t);

/// Inverse DFT followed by conversion to real. The imaginary residue must be at
/// most `imag_tolerance` relative to the real part (Frobenius), otherwise
/// NumericalError is thrown.
Tensor3 ifft_mode3_real(const ComplexTensor3& t, double imag_tolerance = 1e-8);

/// Real part of a complex tensor under the same residue check.
Tensor3 real_part_checked(const ComplexTensor3& t, double imag_tolerance = 1e-8);

}  // namespace cmlptr
