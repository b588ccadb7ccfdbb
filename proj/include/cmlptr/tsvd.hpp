#pragma once

#include <vector>

#include "cmlptr/kernels.hpp"
#include "cmlptr/tensor.hpp"

namespace cmlptr {

/// Log surrogate psi(x) = log(gamma x + 1) / log(gamma + 1) for singular values.
/// Concave and nondecreasing with psi(0) = 0, psi(1) = 1; its derivative is convex,
/// nonincreasing and tends to gamma / log(gamma + 1) at 0+.
class Surrogate {
 public:
  explicit Surrogate(double gamma);

  double gamma() const noexcept { return gamma_; }
  double value(double x) const noexcept;
  double derivative(double x) const noexcept;
  /// lim_{x -> 0+} psi'(x)
  double slope_at_zero() const noexcept { return slope0_; }

 private:
  double gamma_;
  double log_norm_;  // log(gamma + 1)
  double slope0_;
};

/// t-SVD factors: source = u * s * v^T (t-product), u and v orthogonal, s f-diagonal.
struct TSvdFactors {
  Tensor3 u;  ///< I1 x I1 x I3
  Tensor3 s;  ///< I1 x I2 x I3
  Tensor3 v;  ///< I2 x I2 x I3
};

/// Identity tensor: first frontal slice is I_n, the others are zero.
Tensor3 identity_tensor(Index n, Index tubes);

/// Tensor conjugate transpose: every frontal slice transposed, slices 2..I3 reversed.
Tensor3 t_transpose(const Tensor3& t);

/// Circular-convolution product of (I1,K,I3) and (K,I2,I3) tensors, evaluated
/// slice-wise in the mode-3 Fourier domain.
Tensor3 t_product(const Tensor3& a, const Tensor3& b);

TSvdFactors t_svd(const Tensor3& t);

/// Singular values of every Fourier-domain frontal slice (nonincreasing per slice).
std::vector<Vector> fourier_singular_values(const Tensor3& t);

/// Numerical t-SVD rank: max over Fourier slices of the count of singular values
/// above rel_tol * (largest singular value of the whole tensor).
Index tsvd_rank(const Tensor3& t, double rel_tol = 1e-8);

/// Tensor nuclear norm (1/I3) sum_k |F_k|_*.
double tnn(const Tensor3& t);

/// (1/I3) sum over slices and singular values of psi(sigma).
double ntpnn(const Tensor3& t, const Surrogate& psi);

/// ntpnn(P_n(t)).
double mode_ntpnn(const Tensor3& t, int n, const Surrogate& psi);

/// Global minimizer of psi(x) + rho (x - s)^2 over x >= 0.
double scalar_prox(double s, double rho, const Surrogate& psi);

/// argmin_G ntpnn(G) + rho |G - c|_F^2, solved valuewise on the Fourier-domain
/// singular values of c.
Tensor3 ntpnn_prox(const Tensor3& c, double rho, const Surrogate& psi);

namespace serial {
/// Same as cmlptr::ntpnn_prox but factorizes every Fourier slice on one thread.
Tensor3 ntpnn_prox(const Tensor3& c, double rho, const Surrogate& psi);
}  // namespace serial

}  // namespace cmlptr
