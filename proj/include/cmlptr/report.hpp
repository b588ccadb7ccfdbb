#pragma once

#include <string>

#include "cmlptr/metrics.hpp"
#include "cmlptr/solver.hpp"

namespace cmlptr {

/// What `fuse` persists next to z_hat: the solver settings and full diagnostics.
struct RunReport {
  SolverConfig config;
  Shape3 hssi_shape{0, 0, 0};
  Diagnostics diagnostics;
};

/// JSON text. Non-finite numbers are written as the strings "inf", "-inf", "nan".
std::string report_to_json(const RunReport& report);
/// Inverse of report_to_json. Malformed input throws ParseError.
RunReport report_from_json(const std::string& text);

/// Header iter,res_x,res_y,res_g1,res_g2,rho,objective then one row per
/// iteration, 17 significant digits.
std::string diagnostics_csv(const Diagnostics& d);

/// First line is "KKT: PASS", "KKT: FAIL" or "KKT: NOT CONVERGED (<reason>)";
/// following lines give the residual maxima and the individual checks.
std::string kkt_summary(const Diagnostics& d);

/// key=value lines: psnr, ergas, sam, ssim.
std::string metrics_to_text(const MetricReport& m);
MetricReport metrics_from_text(const std::string& text);

}  // namespace cmlptr
