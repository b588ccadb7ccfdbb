#pragma once

#include <string>
#include <vector>

#include "cmlptr/tensor.hpp"
#include "cmlptr/tsvd.hpp"

namespace cmlptr {

/// Spatial gradients of a spatial tensor: g1 = a x_1 D_{I1}, g2 = a x_2 D_{I2}.
struct GradientPair {
  Tensor3 g1;  ///< (I1-1) x I2 x R
  Tensor3 g2;  ///< I1 x (I2-1) x R
};

/// a x_n D_{I_n}, n in {1, 2}.
Tensor3 gradient_tensor(const Tensor3& a, int n);
GradientPair gradients(const Tensor3& a);

/// t-CTV: mean over `modes` of tnn(a x_n D_{I_n}).
double tctv(const Tensor3& a, const std::vector<int>& modes);

/// Mode-shuffled non-convex t-CTV: 1/2 [ mode-2 NTPNN of a x_1 D + mode-1 NTPNN of a x_2 D ].
double nms_tctv(const Tensor3& a, const Surrogate& psi);

struct RankReport {
  int n = 1;
  Index rank_z = 0;         ///< mode-(3-n) t-SVD rank of z
  Index rank_gradient = 0;  ///< mode-(3-n) t-SVD rank of a x_n D
  bool holds = false;       ///< rank_z - 1 <= rank_gradient <= rank_z
};

/// Checks rank(z) - 1 <= rank(a x_n D) <= rank(z) for z = a x_3 s, with a recovered
/// as z x_3 s^T. Throws PreconditionError unless |s^T s - I|_F <= tol.
RankReport check_prop1_rank(const Tensor3& z, const Matrix& s, int n, double tol,
                            double rank_rel_tol = 1e-8);

struct SandwichReport {
  double value = 0.0;  ///< nms_tctv(a)
  double tv = 0.0;
  double atv = 0.0;
  double x_bound = 0.0;  ///< largest Fourier singular value of the gradient tensors
  double b = 0.0;        ///< psi(x_bound) / x_bound
  double g = 0.0;        ///< psi'(0+)
  Index k = 0;           ///< singular-value count constant used in the upper bounds
  double tv_lower = 0.0, tv_upper = 0.0;
  double atv_lower = 0.0, atv_upper = 0.0;
  bool tv_holds = false;
  bool atv_holds = false;
  std::string constants;  ///< human-readable description of the constants used
};

/// Evaluates both two-sided bounds of NMS-t-CTV by the TV and ATV norms:
///   b / (2 sqrt(Im)) TV           <= value <= g sqrt(2k) TV
///   b / (2 sqrt(Im I1 I2 R)) ATV  <= value <= g sqrt(k) ATV
/// with Im = max(I1, I2) and k = max_n min(I_n, R).
SandwichReport check_prop1_tv_sandwich(const Tensor3& a, const Surrogate& psi);

}  // namespace cmlptr
