#include "cmlptr/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmlptr/errors.hpp"
#include "cmlptr/tensor_ops.hpp"

namespace cmlptr {

Tensor3 gradient_tensor(const Tensor3& a, int n) {
  if (n != 1 && n != 2) throw ArgumentError("gradient tensors exist for modes 1 and 2 only");
  if (a.dim(n) < 2) {
    throw DimensionError("gradient along mode " + std::to_string(n) + " needs extent >= 2, got " +
                         to_string(a.shape()));
  }
  return mode_n_product(a, diff_matrix(a.dim(n)), n);
}

GradientPair gradients(const Tensor3& a) { return {gradient_tensor(a, 1), gradient_tensor(a, 2)}; }

double tctv(const Tensor3& a, const std::vector<int>& modes) {
  if (modes.empty()) throw ArgumentError("t-CTV needs a nonempty mode set");
  double sum = 0.0;
  for (int n : modes) {
    if (n < 1 || n > 3) throw ArgumentError("t-CTV modes must lie in {1,2,3}");
    sum += tnn(mode_n_product(a, diff_matrix(a.dim(n)), n));
  }
  return sum / static_cast<double>(modes.size());
}

double nms_tctv(const Tensor3& a, const Surrogate& psi) {
  return 0.5 * (mode_ntpnn(gradient_tensor(a, 1), 2, psi) + mode_ntpnn(gradient_tensor(a, 2), 1, psi));
}

RankReport check_prop1_rank(const Tensor3& z, const Matrix& s, int n, double tol,
                            double rank_rel_tol) {
  if (n != 1 && n != 2) throw ArgumentError("rank check is defined for n in {1,2}");
  if (s.rows() != z.dim(3)) {
    throw DimensionError("subspace has " + std::to_string(s.rows()) + " rows, tensor has " +
                         std::to_string(z.dim(3)) + " bands");
  }
  const double defect = (s.transpose() * s - Matrix::Identity(s.cols(), s.cols())).norm();
  if (defect > tol) {
    throw PreconditionError("subspace is not semi-unitary: |S^T S - I|_F = " + std::to_string(defect));
  }
  const Tensor3 a = mode_n_product(z, s.transpose(), 3);
  RankReport r;
  r.n = n;
  r.rank_z = tsvd_rank(permute_p(z, 3 - n), rank_rel_tol);
  r.rank_gradient = tsvd_rank(permute_p(gradient_tensor(a, n), 3 - n), rank_rel_tol);
  r.holds = r.rank_z - 1 <= r.rank_gradient && r.rank_gradient <= r.rank_z;
  return r;
}

SandwichReport check_prop1_tv_sandwich(const Tensor3& a, const Surrogate& psi) {
  const GradientPair g = gradients(a);
  SandwichReport r;
  r.value = nms_tctv(a, psi);
  r.tv = tv_norm(a);
  r.atv = atv_norm(a);
  for (const Vector& s : fourier_singular_values(permute_p(g.g1, 2))) {
    if (s.size() > 0) r.x_bound = std::max(r.x_bound, s.maxCoeff());
  }
  for (const Vector& s : fourier_singular_values(permute_p(g.g2, 1))) {
    if (s.size() > 0) r.x_bound = std::max(r.x_bound, s.maxCoeff());
  }
  r.b = r.x_bound > 0.0 ? psi.value(r.x_bound) / r.x_bound : psi.slope_at_zero();
  r.g = psi.slope_at_zero();
  const Index rr = a.dim(3);
  r.k = std::max(std::min(a.dim(1), rr), std::min(a.dim(2), rr));
  const double im = static_cast<double>(std::max(a.dim(1), a.dim(2)));
  const double count = static_cast<double>(a.dim(1) * a.dim(2) * rr);

  r.tv_lower = r.b / (2.0 * std::sqrt(im)) * r.tv;
  r.tv_upper = r.g * std::sqrt(2.0 * static_cast<double>(r.k)) * r.tv;
  r.atv_lower = r.b / (2.0 * std::sqrt(im * count)) * r.atv;
  r.atv_upper = r.g * std::sqrt(static_cast<double>(r.k)) * r.atv;

  // Relative slack for rounding in the singular values.
  const double slack = 1e-12 * std::max(1.0, r.value);
  r.tv_holds = r.tv_lower <= r.value + slack && r.value <= r.tv_upper + slack;
  r.atv_holds = r.atv_lower <= r.value + slack && r.value <= r.atv_upper + slack;

  std::ostringstream c;
  c << "b=psi(x_B)/x_B with x_B=" << r.x_bound << "; g=psi'(0+)=" << r.g
    << "; Im=max(I1,I2)=" << im << "; k=max_n min(I_n,R)=" << r.k;
  r.constants = c.str();
  return r;
}

}  // namespace cmlptr
