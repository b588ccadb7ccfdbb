#include "cmlptr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmlptr/errors.hpp"

namespace cmlptr {

namespace {

constexpr Index kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

double band_mse(const Tensor3& ref, const Tensor3& est, Index b) {
  double sum = 0.0;
  for (Index i = 0; i < ref.dim(1); ++i) {
    for (Index j = 0; j < ref.dim(2); ++j) {
      const double d = ref(i, j, b) - est(i, j, b);
      sum += d * d;
    }
  }
  return sum / static_cast<double>(ref.dim(1) * ref.dim(2));
}

double band_mean(const Tensor3& t, Index b) {
  double sum = 0.0;
  for (Index i = 0; i < t.dim(1); ++i) {
    for (Index j = 0; j < t.dim(2); ++j) sum += t(i, j, b);
  }
  return sum / static_cast<double>(t.dim(1) * t.dim(2));
}

double capped_psnr(double peak, double mse, double cap) {
  if (mse <= 0.0) return cap;
  return std::min(cap, 10.0 * std::log10(peak * peak / mse));
}

// Valid-region separable filtering of one band with a symmetric kernel.
Matrix filter_valid(const Matrix& img, const Vector& w) {
  const Index n = w.size();
  const Index rows = img.rows() - n + 1;
  const Index cols = img.cols() - n + 1;
  Matrix tmp(img.rows(), cols);
  for (Index i = 0; i < img.rows(); ++i) {
    for (Index j = 0; j < cols; ++j) {
      double s = 0.0;
      for (Index k = 0; k < n; ++k) s += w(k) * img(i, j + k);
      tmp(i, j) = s;
    }
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double s = 0.0;
      for (Index k = 0; k < n; ++k) s += w(k) * tmp(i + k, j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix band(const Tensor3& t, Index b) {
  Matrix m(t.dim(1), t.dim(2));
  for (Index i = 0; i < t.dim(1); ++i) {
    for (Index j = 0; j < t.dim(2); ++j) m(i, j) = t(i, j, b);
  }
  return m;
}

double keys_weight(double d) {
  constexpr double a = -0.5;
  d = std::abs(d);
  if (d <= 1.0) return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0;
  if (d < 2.0) return ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a;
  return 0.0;
}

// (out_len x in_len) interpolation matrix along one axis.
Matrix cubic_axis(Index in_len, Index factor) {
  Matrix w = Matrix::Zero(in_len * factor, in_len);
  for (Index o = 0; o < w.rows(); ++o) {
    const Index base = o / factor;
    const double t = static_cast<double>(o % factor) / static_cast<double>(factor);
    for (Index k = -1; k <= 2; ++k) {
      const Index src = std::clamp<Index>(base + k, 0, in_len - 1);
      w(o, src) += keys_weight(static_cast<double>(k) - t);
    }
  }
  return w;
}

}  // namespace

double psnr(const Tensor3& ref, const Tensor3& est, double peak, const PsnrOptions& options) {
  require_same_shape(ref, est, "psnr");
  if (!(peak > 0.0)) throw ArgumentError("PSNR peak must be positive");
  if (options.mode == PsnrMode::global) {
    return capped_psnr(peak, (ref - est).squared_norm() / static_cast<double>(ref.size()), options.cap);
  }
  double sum = 0.0;
  for (Index b = 0; b < ref.dim(3); ++b) sum += capped_psnr(peak, band_mse(ref, est, b), options.cap);
  return sum / static_cast<double>(ref.dim(3));
}

ErgasResult ergas_detailed(const Tensor3& ref, const Tensor3& est, double ratio) {
  require_same_shape(ref, est, "ergas");
  if (!(ratio > 0.0)) throw ArgumentError("ERGAS ratio must be positive");
  ErgasResult r;
  double sum = 0.0;
  Index used = 0;
  for (Index b = 0; b < ref.dim(3); ++b) {
    const double mu = band_mean(ref, b);
    if (mu == 0.0) {
      ++r.excluded_bands;
      continue;
    }
    sum += band_mse(ref, est, b) / (mu * mu);
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("ERGAS undefined: every reference band has zero mean");
  r.value = 100.0 / ratio * std::sqrt(sum / static_cast<double>(used));
  return r;
}

double ergas(const Tensor3& ref, const Tensor3& est, double ratio) {
  return ergas_detailed(ref, est, ratio).value;
}

SamResult sam_detailed(const Tensor3& ref, const Tensor3& est) {
  require_same_shape(ref, est, "sam");
  SamResult r;
  double sum = 0.0;
  Index used = 0;
  for (Index i = 0; i < ref.dim(1); ++i) {
    for (Index j = 0; j < ref.dim(2); ++j) {
      double nr = 0.0, ne = 0.0;
      for (Index b = 0; b < ref.dim(3); ++b) {
        nr += ref(i, j, b) * ref(i, j, b);
        ne += est(i, j, b) * est(i, j, b);
      }
      if (nr == 0.0 || ne == 0.0) {
        ++r.skipped_pixels;
        continue;
      }
      // angle = 2 atan2(|u - v|, |u + v|) for unit u, v; exact at 0 unlike acos
      nr = std::sqrt(nr);
      ne = std::sqrt(ne);
      double diff = 0.0, sum_sq = 0.0;
      for (Index b = 0; b < ref.dim(3); ++b) {
        const double u = ref(i, j, b) / nr, v = est(i, j, b) / ne;
        diff += (u - v) * (u - v);
        sum_sq += (u + v) * (u + v);
      }
      sum += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum_sq));
      ++used;
    }
  }
  if (used == 0) throw UndefinedMetricError("SAM undefined: every pixel has a zero spectrum");
  r.degrees = sum / static_cast<double>(used) * 180.0 / std::numbers::pi;
  return r;
}

double sam(const Tensor3& ref, const Tensor3& est) { return sam_detailed(ref, est).degrees; }

double ssim(const Tensor3& ref, const Tensor3& est, double peak) {
  require_same_shape(ref, est, "ssim");
  if (ref.dim(1) < kSsimWindow || ref.dim(2) < kSsimWindow) {
    throw DimensionError("SSIM needs spatial extents >= 11, got " + to_string(ref.shape()));
  }
  if (!(peak > 0.0)) throw ArgumentError("SSIM peak must be positive");
  Vector w(kSsimWindow);
  for (Index k = 0; k < kSsimWindow; ++k) {
    const double x = static_cast<double>(k - kSsimWindow / 2);
    w(k) = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
  }
  w /= w.sum();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);

  std::vector<double> per_band(static_cast<std::size_t>(ref.dim(3)));
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < ref.dim(3); ++b) {
    const Matrix x = band(ref, b);
    const Matrix y = band(est, b);
    const Matrix mx = filter_valid(x, w);
    const Matrix my = filter_valid(y, w);
    const Matrix sxx = filter_valid(x.cwiseProduct(x), w) - mx.cwiseProduct(mx);
    const Matrix syy = filter_valid(y.cwiseProduct(y), w) - my.cwiseProduct(my);
    const Matrix sxy = filter_valid(x.cwiseProduct(y), w) - mx.cwiseProduct(my);
    double sum = 0.0;
    for (Index i = 0; i < mx.rows(); ++i) {
      for (Index j = 0; j < mx.cols(); ++j) {
        const double num = (2.0 * mx(i, j) * my(i, j) + c1) * (2.0 * sxy(i, j) + c2);
        const double den = (mx(i, j) * mx(i, j) + my(i, j) * my(i, j) + c1) * (sxx(i, j) + syy(i, j) + c2);
        sum += num / den;
      }
    }
    per_band[static_cast<std::size_t>(b)] = sum / static_cast<double>(mx.size());
  }
  double total = 0.0;
  for (double v : per_band) total += v;
  return total / static_cast<double>(per_band.size());
}

MetricReport evaluate(const Tensor3& ref, const Tensor3& est, const EvalOptions& options) {
  const double peak = options.peak > 0.0 ? options.peak : *std::max_element(ref.data().begin(), ref.data().end());
  if (!(peak > 0.0)) throw UndefinedMetricError("reference has no positive entry to use as peak");
  return {psnr(ref, est, peak, options.psnr), ergas(ref, est, options.ratio), sam(ref, est),
          ssim(ref, est, peak)};
}

Tensor3 bicubic_upsample(const Tensor3& x, Index factor) {
  if (factor < 1) throw ArgumentError("upsampling factor must be >= 1");
  if (factor == 1) return x;
  const Matrix w1 = cubic_axis(x.dim(1), factor);
  const Matrix w2 = cubic_axis(x.dim(2), factor);
  Tensor3 out({x.dim(1) * factor, x.dim(2) * factor, x.dim(3)});
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < x.dim(3); ++b) {
    const Matrix up = w1 * band(x, b) * w2.transpose();
    for (Index i = 0; i < up.rows(); ++i) {
      for (Index j = 0; j < up.cols(); ++j) out(i, j, b) = up(i, j);
    }
  }
  return out;
}

}  // namespace cmlptr
