#pragma once

#include "cmlptr/tensor.hpp"

namespace cmlptr {

enum class PsnrMode {
  band_average,  ///< mean over bands of per-band PSNR
  global,        ///< single PSNR over the flattened cube
};

struct PsnrOptions {
  double cap = 100.0;  ///< value used for zero-error bands
  PsnrMode mode = PsnrMode::band_average;
};

double psnr(const Tensor3& ref, const Tensor3& est, double peak, const PsnrOptions& options = {});

struct ErgasResult {
  double value = 0.0;
  Index excluded_bands = 0;  ///< bands with zero reference mean
};
ErgasResult ergas_detailed(const Tensor3& ref, const Tensor3& est, double ratio);
double ergas(const Tensor3& ref, const Tensor3& est, double ratio);

struct SamResult {
  double degrees = 0.0;
  Index skipped_pixels = 0;  ///< pixels where either spectrum is zero
};
SamResult sam_detailed(const Tensor3& ref, const Tensor3& est);
double sam(const Tensor3& ref, const Tensor3& est);

/// Mean single-scale SSIM over bands: 11x11 Gaussian window (sigma 1.5),
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2, windows fully inside the image.
double ssim(const Tensor3& ref, const Tensor3& est, double peak);

struct MetricReport {
  double psnr = 0.0;   ///< dB
  double ergas = 0.0;
  double sam = 0.0;    ///< degrees
  double ssim = 0.0;
};

struct EvalOptions {
  double ratio = 8.0;
  double peak = 0.0;  ///< <= 0 means "max entry of the reference"
  PsnrOptions psnr;
};

MetricReport evaluate(const Tensor3& ref, const Tensor3& est, const EvalOptions& options);

/// Per-band bicubic (Keys, a = -0.5) upsampling by an integer factor. Output
/// pixel o samples input coordinate o / factor, matching decimation at offset 0;
/// indices outside the image are clamped.
Tensor3 bicubic_upsample(const Tensor3& x, Index factor);

}  // namespace cmlptr
