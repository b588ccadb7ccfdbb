#include "cmlptr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cmlptr/errors.hpp"
#include "cmlptr/io.hpp"

namespace cmlptr {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const std::size_t a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": not a finite number: '" + std::string(v) + "'");
  }
  return out;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": not an integer: '" + std::string(v) + "'");
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "r",       "gamma",      "rho0",  "nu",          "eps",        "eps_mode",  "max_iter",
      "tau_mode", "factor",    "kernel_size", "sigma", "band_table", "wl_min",    "wl_max",
      "seed",    "peak",       "psnr_mode",   "calibration", "scene_rank", "blocks", "spectra"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (v.empty()) throw ConfigError(std::string(key) + ": empty value");
  if (key == "r") solver.r = to_int<Index>(key, v);
  else if (key == "gamma") solver.gamma = to_double(key, v);
  else if (key == "rho0") solver.rho0 = to_double(key, v);
  else if (key == "nu") solver.nu = to_double(key, v);
  else if (key == "eps") solver.eps = to_double(key, v);
  else if (key == "eps_mode") {
    if (v == "absolute") solver.eps_mode = ToleranceMode::absolute;
    else if (v == "relative") solver.eps_mode = ToleranceMode::relative;
    else throw ConfigError("eps_mode must be 'absolute' or 'relative'");
  } else if (key == "max_iter") solver.max_iter = to_int<int>(key, v);
  else if (key == "tau_mode") {
    if (v == "safe") solver.tau_mode = TauMode::safe;
    else if (v == "literal") solver.tau_mode = TauMode::literal;
    else throw ConfigError("tau_mode must be 'safe' or 'literal'");
  } else if (key == "factor") factor = to_int<Index>(key, v);
  else if (key == "kernel_size") kernel_size = to_int<Index>(key, v);
  else if (key == "sigma") sigma = to_double(key, v);
  else if (key == "band_table") band_table = std::string(v);
  else if (key == "wl_min") wl_min = to_double(key, v);
  else if (key == "wl_max") wl_max = to_double(key, v);
  else if (key == "seed") seed = to_int<std::uint64_t>(key, v);
  else if (key == "peak") peak = to_double(key, v);
  else if (key == "psnr_mode") {
    if (v == "band_average") psnr_mode = PsnrMode::band_average;
    else if (v == "global") psnr_mode = PsnrMode::global;
    else throw ConfigError("psnr_mode must be 'band_average' or 'global'");
  } else if (key == "calibration") calibration = to_double(key, v);
  else if (key == "scene_rank") scene_rank = to_int<Index>(key, v);
  else if (key == "blocks") blocks = to_int<Index>(key, v);
  else if (key == "spectra") {
    if (v == "random") spectra = SpectraKind::random_semi_unitary;
    else if (v == "gaussians") spectra = SpectraKind::smooth_gaussians;
    else throw ConfigError("spectra must be 'random' or 'gaussians'");
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  solver.validate();
  if (factor < 2) throw ConfigError("factor must be at least 2");
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("kernel_size must be a positive odd number");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (band_table.empty()) throw ConfigError("band_table must not be empty");
  if (!(wl_min < wl_max)) throw ConfigError("wl_min must be below wl_max");
  if (peak < 0.0) throw ConfigError("peak must be nonnegative");
  if (!(calibration > 0.0 && calibration <= 1.0)) throw ConfigError("calibration must lie in (0, 1]");
  if (scene_rank < 1) throw ConfigError("scene_rank must be positive");
  if (blocks < 1) throw ConfigError("blocks must be positive");
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const std::size_t hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string_view key = trim(s.substr(0, eq));
    try {
      c.set(key, s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  try {
    return parse(read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "r=" << solver.r << '\n'
     << "gamma=" << fmt(solver.gamma) << '\n'
     << "rho0=" << fmt(solver.rho0) << '\n'
     << "nu=" << fmt(solver.nu) << '\n'
     << "eps=" << fmt(solver.eps) << '\n'
     << "eps_mode=" << to_string(solver.eps_mode) << '\n'
     << "max_iter=" << solver.max_iter << '\n'
     << "tau_mode=" << to_string(solver.tau_mode) << '\n'
     << "factor=" << factor << '\n'
     << "kernel_size=" << kernel_size << '\n'
     << "sigma=" << fmt(sigma) << '\n'
     << "band_table=" << band_table << '\n'
     << "wl_min=" << fmt(wl_min) << '\n'
     << "wl_max=" << fmt(wl_max) << '\n'
     << "seed=" << seed << '\n'
     << "peak=" << fmt(peak) << '\n'
     << "psnr_mode=" << (psnr_mode == PsnrMode::global ? "global" : "band_average") << '\n'
     << "calibration=" << fmt(calibration) << '\n'
     << "scene_rank=" << scene_rank << '\n'
     << "blocks=" << blocks << '\n'
     << "spectra=" << (spectra == SpectraKind::smooth_gaussians ? "gaussians" : "random") << '\n';
  return os.str();
}

std::vector<SpectralBand> RunConfig::bands() const {
  if (band_table == "landsat7") return landsat7_bands();
  if (band_table == "ikonos") return ikonos_like_bands();
  return read_band_table(band_table);
}

EvalOptions RunConfig::eval_options() const {
  EvalOptions o;
  o.ratio = static_cast<double>(factor);
  o.peak = peak;
  o.psnr.mode = psnr_mode;
  return o;
}

}  // namespace cmlptr
