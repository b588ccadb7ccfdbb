#include "cmlptr/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmlptr/errors.hpp"
#include "cmlptr/fft.hpp"
#include "cmlptr/tensor_ops.hpp"

namespace cmlptr {

Surrogate::Surrogate(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ArgumentError("surrogate gamma must be a positive finite number");
  }
  log_norm_ = std::log1p(gamma);
  slope0_ = gamma / log_norm_;
}

double Surrogate::value(double x) const noexcept { return std::log1p(gamma_ * x) / log_norm_; }

double Surrogate::derivative(double x) const noexcept {
  return gamma_ / ((1.0 + gamma_ * x) * log_norm_);
}

Tensor3 identity_tensor(Index n, Index tubes) {
  Tensor3 t({n, n, tubes});
  for (Index i = 0; i < n; ++i) t(i, i, 0) = 1.0;
  return t;
}

Tensor3 t_transpose(const Tensor3& t) {
  const Shape3& s = t.shape();
  Tensor3 out({s[1], s[0], s[2]});
  for (Index i = 0; i < s[0]; ++i) {
    for (Index j = 0; j < s[1]; ++j) {
      for (Index k = 0; k < s[2]; ++k) out(j, i, k == 0 ? 0 : s[2] - k) = t(i, j, k);
    }
  }
  return out;
}

Tensor3 t_product(const Tensor3& a, const Tensor3& b) {
  if (a.dim(2) != b.dim(1) || a.dim(3) != b.dim(3)) {
    throw DimensionError("t-product needs (I1,K,I3) x (K,I2,I3), got " + to_string(a.shape()) +
                         " and " + to_string(b.shape()));
  }
  return ifft_mode3_real(kernels::slice_products(fft_mode3(a), fft_mode3(b)));
}

TSvdFactors t_svd(const Tensor3& t) {
  const Shape3& s = t.shape();
  const ComplexTensor3 f = fft_mode3(t);
  const std::vector<SliceSvd> svds = kernels::slice_svds(f, SvdVectors::full, true);
  ComplexTensor3 u({s[0], s[0], s[2]});
  ComplexTensor3 sig({s[0], s[1], s[2]});
  ComplexTensor3 v({s[1], s[1], s[2]});
  for (Index k = 0; k < s[2]; ++k) {
    const SliceSvd& sv = svds[static_cast<std::size_t>(k)];
    u.set_slice(k, sv.u);
    v.set_slice(k, sv.v);
    for (Index j = 0; j < sv.sigma.size(); ++j) sig(j, j, k) = sv.sigma(j);
  }
  return {ifft_mode3_real(u), ifft_mode3_real(sig), ifft_mode3_real(v)};
}

std::vector<Vector> fourier_singular_values(const Tensor3& t) {
  std::vector<SliceSvd> svds = kernels::slice_svds(fft_mode3(t), SvdVectors::none, true);
  std::vector<Vector> out;
  out.reserve(svds.size());
  for (SliceSvd& s : svds) out.push_back(std::move(s.sigma));
  return out;
}

Index tsvd_rank(const Tensor3& t, double rel_tol) {
  const std::vector<Vector> sv = fourier_singular_values(t);
  double top = 0.0;
  for (const Vector& s : sv) {
    if (s.size() > 0) top = std::max(top, s.maxCoeff());
  }
  if (top <= 0.0) return 0;
  Index rank = 0;
  for (const Vector& s : sv) {
    rank = std::max(rank, static_cast<Index>((s.array() > rel_tol * top).count()));
  }
  return rank;
}

double tnn(const Tensor3& t) {
  double sum = 0.0;
  for (const Vector& s : fourier_singular_values(t)) sum += s.sum();
  return sum / static_cast<double>(t.dim(3));
}

double ntpnn(const Tensor3& t, const Surrogate& psi) {
  double sum = 0.0;
  for (const Vector& s : fourier_singular_values(t)) {
    for (Index j = 0; j < s.size(); ++j) sum += psi.value(s(j));
  }
  return sum / static_cast<double>(t.dim(3));
}

double mode_ntpnn(const Tensor3& t, int n, const Surrogate& psi) {
  return ntpnn(permute_p(t, n), psi);
}

double scalar_prox(double s, double rho, const Surrogate& psi) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ArgumentError("scalar prox needs a finite s >= 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ArgumentError("scalar prox needs rho > 0");
  if (s == 0.0) return 0.0;
  const double gamma = psi.gamma();
  auto objective = [&](double x) { return psi.value(x) + rho * (x - s) * (x - s); };

  // Stationary points of psi(x) + rho (x - s)^2 after clearing the (gamma x + 1)
  // denominator.
  const double qa = 2.0 * rho * gamma;
  const double qb = 2.0 * rho * (1.0 - gamma * s);
  const double qc = psi.slope_at_zero() - 2.0 * rho * s;
  const double disc = qb * qb - 4.0 * qa * qc;

  double best_x = 0.0;
  double best_f = objective(0.0);
  if (disc >= 0.0) {
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    double roots[2] = {q / qa, q != 0.0 ? qc / q : -1.0};
    for (double x : roots) {
      if (x > 0.0 && std::isfinite(x)) {
        const double f = objective(x);
        if (f < best_f) {
          best_f = f;
          best_x = x;
        }
      }
    }
  }
  return best_x;
}

namespace {

Tensor3 prox_from_svds(const ComplexTensor3& f, const std::vector<SliceSvd>& svds, double rho,
                       const Surrogate& psi, bool parallel) {
  const Shape3& s = f.shape();
  ComplexTensor3 out(s);
#pragma omp parallel for schedule(static) if (parallel)
  for (Index k = 0; k < s[2]; ++k) {
    const SliceSvd& sv = svds[static_cast<std::size_t>(k)];
    Vector shrunk(sv.sigma.size());
    for (Index j = 0; j < sv.sigma.size(); ++j) shrunk(j) = scalar_prox(sv.sigma(j), rho, psi);
    const ComplexMatrix slice = sv.u * shrunk.cast<Complex>().asDiagonal() * sv.v.adjoint();
    out.set_slice(k, slice);
  }
  return ifft_mode3_real(out);
}

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ArgumentError("prox penalty rho must be positive");
}

}  // namespace

Tensor3 ntpnn_prox(const Tensor3& c, double rho, const Surrogate& psi) {
  check_rho(rho);
  const ComplexTensor3 f = fft_mode3(c);
  return prox_from_svds(f, kernels::slice_svds(f, SvdVectors::thin, true), rho, psi, true);
}

namespace serial {

Tensor3 ntpnn_prox(const Tensor3& c, double rho, const Surrogate& psi) {
  check_rho(rho);
  ComplexTensor3 f(c.shape());
  for (Index i = 0; i < c.size(); ++i) f.data()[static_cast<std::size_t>(i)] = c.data()[static_cast<std::size_t>(i)];
  serial::dft_tubes(f, -1);
  return prox_from_svds(f, serial::slice_svds(f, SvdVectors::thin), rho, psi, false);
}

}  // namespace serial

}  // namespace cmlptr
