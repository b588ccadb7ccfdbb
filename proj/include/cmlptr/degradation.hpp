#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cmlptr/tensor.hpp"

namespace cmlptr {

/// Closed wavelength interval [low_nm, high_nm].
struct SpectralBand {
  double low_nm;
  double high_nm;
};

/// Landsat-7 ETM+ reflective ranges (six bands).
const std::vector<SpectralBand>& landsat7_bands();
/// Four rectangular blue/green/red/NIR bands. This is an approximation of an
/// IKONOS-like response, not the sensor's measured curves.
const std::vector<SpectralBand>& ikonos_like_bands();

/// Band table text: one "low_nm high_nm" pair per line, '#' starts a comment.
std::vector<SpectralBand> parse_band_table(const std::string& text);
std::vector<SpectralBand> read_band_table(const std::filesystem::path& path);

/// `count` samples spread uniformly over [first_nm, last_nm] inclusive.
std::vector<double> uniform_wavelengths(Index count, double first_nm = 400.0,
                                        double last_nm = 2500.0);

enum class Boundary { circular };

struct DegradationMeta {
  Index kernel_size = 9;
  double sigma = 3.3973;
  Index factor = 8;
  Boundary boundary = Boundary::circular;
  std::vector<SpectralBand> bands;
};

/// Spatial (p1: i1 x I1, p2: i2 x I2) and spectral (p3: i3 x I3) degradation operators.
struct DegradationSet {
  Matrix p1;
  Matrix p2;
  Matrix p3;
  DegradationMeta meta;

  /// Checks i_n < I_n and that every row of p3 is nonnegative and sums to 1.
  void validate() const;
};

/// Normalized samples of exp(-k^2 / (2 sigma^2)), k = -(size-1)/2 .. (size-1)/2.
Vector gaussian_kernel_1d(Index size, double sigma);

/// (big_dim / factor) x big_dim matrix: circular convolution with `kernel`
/// followed by keeping samples 0, factor, 2 factor, ...
Matrix build_spatial_degradation(Index big_dim, Index factor, const Vector& kernel,
                                 Boundary boundary = Boundary::circular);

/// Row b averages the wavelengths that fall inside band b.
Matrix build_spectral_response(const std::vector<SpectralBand>& bands,
                               const std::vector<double>& wavelengths);

/// Separable Gaussian blur + decimation on both spatial axes plus band averaging.
DegradationSet build_degradation(const Shape3& hssi_shape, Index factor, Index kernel_size,
                                 double sigma, const std::vector<SpectralBand>& bands,
                                 const std::vector<double>& wavelengths);

/// x = z x_1 P1 x_2 P2, y = z x_3 P3.
std::pair<Tensor3, Tensor3> simulate(const Tensor3& z, const DegradationSet& d);

/// Elementwise z^power for nonnegative z.
Tensor3 gamma_calibrate(const Tensor3& z, double power);

enum class SpectraKind { random_semi_unitary, smooth_gaussians };

struct SceneSpec {
  Shape3 shape{64, 64, 32};
  Index rank = 3;
  Index blocks = 4;  ///< blocks per spatial axis of the piecewise-constant maps
  std::uint64_t seed = 1;
  SpectraKind spectra = SpectraKind::random_semi_unitary;

  void validate() const;
};

struct Scene {
  Tensor3 z;  ///< a x_3 s
  Tensor3 a;  ///< I1 x I2 x R spatial maps
  Matrix s;   ///< I3 x R, orthonormal columns
};

Scene synth_scene(const SceneSpec& spec);

}  // namespace cmlptr
