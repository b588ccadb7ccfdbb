#include "cmlptr/fft.hpp"

#include <cmath>

#include "cmlptr/errors.hpp"
#include "cmlptr/kernels.hpp"

namespace cmlptr {

ComplexTensor3 fft_mode3(const Tensor3& t) {
  ComplexTensor3 f(t.shape());
  auto src = t.data();
  auto dst = f.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Complex(src[i], 0.0);
  kernels::dft_tubes(f, -1);
  return f;
}

ComplexTensor3 fft_mode3(const ComplexTensor3& t) {
  ComplexTensor3 f = t;
  kernels::dft_tubes(f, -1);
  return f;
}

ComplexTensor3 ifft_mode3(const ComplexTensor3& t) {
  ComplexTensor3 f = t;
  kernels::dft_tubes(f, +1);
  const double scale = 1.0 / static_cast<double>(t.shape()[2]);
  for (Complex& v : f.data()) v *= scale;
  return f;
}

Tensor3 real_part_checked(const ComplexTensor3& t, double imag_tolerance) {
  Tensor3 out(t.shape());
  auto src = t.data();
  auto dst = out.data();
  double re2 = 0.0;
  double im2 = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i].real();
    re2 += src[i].real() * src[i].real();
    im2 += src[i].imag() * src[i].imag();
  }
  if (std::sqrt(im2) > imag_tolerance * std::sqrt(re2) && im2 > 0.0) {
    throw NumericalError("imaginary residue " + std::to_string(std::sqrt(im2)) +
                         " exceeds tolerance relative to real part " + std::to_string(std::sqrt(re2)));
  }
  return out;
}

Tensor3 ifft_mode3_real(const ComplexTensor3& t, double imag_tolerance) {
  return real_part_checked(ifft_mode3(t), imag_tolerance);
}

}  // namespace cmlptr
