#include "cmlptr/degradation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cmlptr/errors.hpp"
#include "cmlptr/rng.hpp"
#include "cmlptr/tensor_ops.hpp"

namespace cmlptr {

const std::vector<SpectralBand>& landsat7_bands() {
  static const std::vector<SpectralBand> bands{
      {450, 520}, {520, 600}, {630, 690}, {760, 900}, {1550, 1750}, {2080, 2350}};
  return bands;
}

const std::vector<SpectralBand>& ikonos_like_bands() {
  static const std::vector<SpectralBand> bands{{450, 520}, {520, 600}, {630, 690}, {760, 900}};
  return bands;
}

std::vector<SpectralBand> parse_band_table(const std::string& text) {
  std::vector<SpectralBand> bands;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double lo = 0.0;
    double hi = 0.0;
    if (!(fields >> lo)) continue;  // blank or comment-only
    std::string rest;
    if (!(fields >> hi) || (fields >> rest)) {
      throw ConfigError("band table line " + std::to_string(line_no) + ": expected 'low_nm high_nm'");
    }
    if (!(lo <= hi)) {
      throw ConfigError("band table line " + std::to_string(line_no) + ": low exceeds high");
    }
    bands.push_back({lo, hi});
  }
  if (bands.empty()) throw ConfigError("band table contains no bands");
  return bands;
}

std::vector<SpectralBand> read_band_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open band table " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_band_table(text.str());
}

std::vector<double> uniform_wavelengths(Index count, double first_nm, double last_nm) {
  if (count < 1) throw ArgumentError("wavelength grid needs at least one sample");
  std::vector<double> w(static_cast<std::size_t>(count), first_nm);
  if (count == 1) return w;
  const double step = (last_nm - first_nm) / static_cast<double>(count - 1);
  for (Index i = 0; i < count; ++i) w[static_cast<std::size_t>(i)] = first_nm + step * static_cast<double>(i);
  w.back() = last_nm;
  return w;
}

void DegradationSet::validate() const {
  if (p1.rows() >= p1.cols() || p2.rows() >= p2.cols() || p3.rows() >= p3.cols()) {
    throw DimensionError("degradation must strictly reduce every dimension (i_n < I_n)");
  }
  for (Index b = 0; b < p3.rows(); ++b) {
    if ((p3.row(b).array() < 0.0).any() || std::abs(p3.row(b).sum() - 1.0) > 1e-12) {
      throw ArgumentError("spectral response row " + std::to_string(b) +
                          " must be nonnegative and sum to 1");
    }
  }
}

Vector gaussian_kernel_1d(Index size, double sigma) {
  if (size < 1 || size % 2 == 0) throw ArgumentError("Gaussian kernel size must be odd and positive");
  if (!(sigma > 0.0)) throw ArgumentError("Gaussian sigma must be positive");
  const Index half = size / 2;
  Vector k(size);
  for (Index i = 0; i < size; ++i) {
    const double x = static_cast<double>(i - half);
    k(i) = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return k / k.sum();
}

Matrix build_spatial_degradation(Index big_dim, Index factor, const Vector& kernel,
                                 Boundary boundary) {
  if (factor < 1) throw ArgumentError("downsampling factor must be >= 1");
  if (big_dim < 1 || big_dim % factor != 0) {
    throw DimensionError("dimension " + std::to_string(big_dim) + " is not divisible by factor " +
                         std::to_string(factor));
  }
  if (kernel.size() < 1 || kernel.size() % 2 == 0) throw ArgumentError("blur kernel length must be odd");
  (void)boundary;  // circular is the only rule
  const Index half = kernel.size() / 2;
  Matrix blur = Matrix::Zero(big_dim, big_dim);
  for (Index i = 0; i < big_dim; ++i) {
    for (Index k = 0; k < kernel.size(); ++k) {
      const Index j = ((i + k - half) % big_dim + big_dim) % big_dim;
      blur(i, j) += kernel(k);
    }
  }
  Matrix p(big_dim / factor, big_dim);
  for (Index r = 0; r < p.rows(); ++r) p.row(r) = blur.row(r * factor);
  return p;
}

Matrix build_spectral_response(const std::vector<SpectralBand>& bands,
                               const std::vector<double>& wavelengths) {
  if (bands.empty()) throw ArgumentError("spectral response needs at least one band");
  Matrix p = Matrix::Zero(static_cast<Index>(bands.size()), static_cast<Index>(wavelengths.size()));
  for (std::size_t b = 0; b < bands.size(); ++b) {
    std::vector<Index> members;
    for (std::size_t w = 0; w < wavelengths.size(); ++w) {
      if (wavelengths[w] >= bands[b].low_nm && wavelengths[w] <= bands[b].high_nm) {
        members.push_back(static_cast<Index>(w));
      }
    }
    if (members.empty()) {
      std::ostringstream msg;
      msg << "band " << b << " [" << bands[b].low_nm << ", " << bands[b].high_nm
          << "] nm contains no wavelength sample";
      throw ArgumentError(msg.str());
    }
    for (Index w : members) p(static_cast<Index>(b), w) = 1.0 / static_cast<double>(members.size());
  }
  return p;
}

DegradationSet build_degradation(const Shape3& hssi_shape, Index factor, Index kernel_size,
                                 double sigma, const std::vector<SpectralBand>& bands,
                                 const std::vector<double>& wavelengths) {
  if (static_cast<Index>(wavelengths.size()) != hssi_shape[2]) {
    throw DimensionError("wavelength grid has " + std::to_string(wavelengths.size()) +
                         " samples for " + std::to_string(hssi_shape[2]) + " bands");
  }
  const Vector kernel = gaussian_kernel_1d(kernel_size, sigma);
  DegradationSet d;
  d.p1 = build_spatial_degradation(hssi_shape[0], factor, kernel);
  d.p2 = build_spatial_degradation(hssi_shape[1], factor, kernel);
  d.p3 = build_spectral_response(bands, wavelengths);
  d.meta = {kernel_size, sigma, factor, Boundary::circular, bands};
  d.validate();
  return d;
}

std::pair<Tensor3, Tensor3> simulate(const Tensor3& z, const DegradationSet& d) {
  if (d.p1.cols() != z.dim(1) || d.p2.cols() != z.dim(2) || d.p3.cols() != z.dim(3)) {
    throw DimensionError("degradation operators do not match scene shape " + to_string(z.shape()));
  }
  Tensor3 x = mode_n_product(mode_n_product(z, d.p1, 1), d.p2, 2);
  Tensor3 y = mode_n_product(z, d.p3, 3);
  return {std::move(x), std::move(y)};
}

Tensor3 gamma_calibrate(const Tensor3& z, double power) {
  if (!(power > 0.0 && power <= 1.0)) throw ArgumentError("gamma power must lie in (0, 1]");
  Tensor3 out = z;
  for (double& v : out.data()) {
    if (v < 0.0) throw DomainError("gamma calibration needs nonnegative entries");
    v = std::pow(v, power);
  }
  return out;
}

void SceneSpec::validate() const {
  for (Index d : shape) {
    if (d < 1) throw ConfigError("scene extents must be positive");
  }
  if (rank < 1 || rank > shape[2]) throw ConfigError("scene rank must lie in [1, I3]");
  if (blocks < 1) throw ConfigError("scene needs at least one block per axis");
}

namespace {

Matrix orthonormal_columns(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  const Matrix r = qr.matrixQR();
  for (Index c = 0; c < m.cols(); ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

}  // namespace

Scene synth_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto [n1, n2, n3] = spec.shape;
  const Index r = spec.rank;

  Tensor3 a({n1, n2, r});
  for (Index k = 0; k < r; ++k) {
    Matrix levels(spec.blocks, spec.blocks);
    for (Index bi = 0; bi < spec.blocks; ++bi) {
      for (Index bj = 0; bj < spec.blocks; ++bj) levels(bi, bj) = rng.uniform();
    }
    for (Index i = 0; i < n1; ++i) {
      for (Index j = 0; j < n2; ++j) a(i, j, k) = levels(i * spec.blocks / n1, j * spec.blocks / n2);
    }
  }

  Matrix raw(n3, r);
  if (spec.spectra == SpectraKind::random_semi_unitary) {
    for (Index i = 0; i < n3; ++i) {
      for (Index k = 0; k < r; ++k) raw(i, k) = rng.normal();
    }
  } else {
    const double width = std::max(1.0, static_cast<double>(n3) / (2.0 * static_cast<double>(r)));
    for (Index k = 0; k < r; ++k) {
      const double center = (static_cast<double>(k) + 0.25 + 0.5 * rng.uniform()) *
                            static_cast<double>(n3) / static_cast<double>(r);
      for (Index i = 0; i < n3; ++i) {
        const double x = (static_cast<double>(i) - center) / width;
        raw(i, k) = std::exp(-0.5 * x * x);
      }
    }
  }
  Scene scene;
  scene.s = orthonormal_columns(raw);
  scene.z = mode_n_product(a, scene.s, 3);
  scene.a = std::move(a);
  return scene;
}

}  // namespace cmlptr
