#include "cmlptr/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cmlptr/errors.hpp"

namespace cmlptr {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(0, std::string("report is missing '") + key + "'");
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(0, std::string("report field '") + key + "' is not a number");
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(0, std::string("report is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(0, std::string("report field '") + key + "' has the wrong type");
  }
}

json residuals_json(const Residuals& r) {
  return {{"x", num(r.x)}, {"y", num(r.y)}, {"g1", num(r.g1)}, {"g2", num(r.g2)}};
}

Residuals residuals_from(const json& j) {
  return {get_num(j, "x"), get_num(j, "y"), get_num(j, "g1"), get_num(j, "g2")};
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
  const Diagnostics& d = report.diagnostics;
  const SolverConfig& c = report.config;
  json hist = json::array();
  for (const IterationRecord& r : d.history) {
    hist.push_back({{"iter", r.iter},
                    {"res", residuals_json(r.res)},
                    {"rho", num(r.rho)},
                    {"objective", num(r.objective)},
                    {"grad_norm", num(r.grad_norm)},
                    {"mx_norm", num(r.mx_norm)},
                    {"my_norm", num(r.my_norm)},
                    {"seconds", num(r.seconds)}});
  }
  const KktReport& k = d.kkt;
  json j = {
      {"format", "cmlptr-report-1"},
      {"hssi_shape", {report.hssi_shape[0], report.hssi_shape[1], report.hssi_shape[2]}},
      {"config",
       {{"r", c.r},
        {"gamma", num(c.gamma)},
        {"rho0", num(c.rho0)},
        {"nu", num(c.nu)},
        {"eps", num(c.eps)},
        {"eps_mode", to_string(c.eps_mode)},
        {"max_iter", c.max_iter},
        {"tau_mode", to_string(c.tau_mode)}}},
      {"iterations", d.iterations},
      {"converged", d.converged},
      {"stop_reason", d.stop_reason},
      {"tau_mode", to_string(d.tau_mode)},
      {"tau", num(d.tau)},
      {"tau_literal", num(d.tau_literal)},
      {"tau_safe", num(d.tau_safe)},
      {"threshold", num(d.threshold)},
      {"kkt",
       {{"residuals", residuals_json(k.residuals)},
        {"residual_limit", num(k.residual_limit)},
        {"grad_norm", num(k.grad_norm)},
        {"grad_limit", num(k.grad_limit)},
        {"subgradient_error", num(k.subgradient_error)},
        {"retained_values", k.retained_values},
        {"subgradient_limit", num(k.subgradient_limit)},
        {"multiplier_ratio", num(k.multiplier_ratio)},
        {"residuals_ok", k.residuals_ok},
        {"grad_ok", k.grad_ok},
        {"subgradient_ok", k.subgradient_ok},
        {"multipliers_bounded", k.multipliers_bounded},
        {"pass", k.pass}}},
      {"history", std::move(hist)}};
  return j.dump(1) + "\n";
}

namespace {

TauMode tau_from(const std::string& s) {
  if (s == "safe") return TauMode::safe;
  if (s == "literal") return TauMode::literal;
  throw ParseError(0, "unknown tau_mode '" + s + "'");
}

ToleranceMode eps_mode_from(const std::string& s) {
  if (s == "absolute") return ToleranceMode::absolute;
  if (s == "relative") return ToleranceMode::relative;
  throw ParseError(0, "unknown eps_mode '" + s + "'");
}

}  // namespace

RunReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, "malformed report JSON");
  }
  if (!j.is_object() || get<std::string>(j, "format") != "cmlptr-report-1") {
    throw ParseError(0, "not a cmlptr report");
  }
  RunReport r;
  const auto shape = get<std::vector<Index>>(j, "hssi_shape");
  if (shape.size() != 3) throw ParseError(0, "hssi_shape must have three entries");
  r.hssi_shape = {shape[0], shape[1], shape[2]};

  const json& c = j.at("config");
  r.config.r = get<Index>(c, "r");
  r.config.gamma = get_num(c, "gamma");
  r.config.rho0 = get_num(c, "rho0");
  r.config.nu = get_num(c, "nu");
  r.config.eps = get_num(c, "eps");
  r.config.eps_mode = eps_mode_from(get<std::string>(c, "eps_mode"));
  r.config.max_iter = get<int>(c, "max_iter");
  r.config.tau_mode = tau_from(get<std::string>(c, "tau_mode"));

  Diagnostics& d = r.diagnostics;
  d.iterations = get<int>(j, "iterations");
  d.converged = get<bool>(j, "converged");
  d.stop_reason = get<std::string>(j, "stop_reason");
  d.tau_mode = tau_from(get<std::string>(j, "tau_mode"));
  d.tau = get_num(j, "tau");
  d.tau_literal = get_num(j, "tau_literal");
  d.tau_safe = get_num(j, "tau_safe");
  d.threshold = get_num(j, "threshold");

  if (!j.contains("kkt") || !j.at("kkt").is_object()) throw ParseError(0, "report is missing 'kkt'");
  const json& k = j.at("kkt");
  KktReport& kk = d.kkt;
  kk.residuals = residuals_from(k.at("residuals"));
  kk.residual_limit = get_num(k, "residual_limit");
  kk.grad_norm = get_num(k, "grad_norm");
  kk.grad_limit = get_num(k, "grad_limit");
  kk.subgradient_error = get_num(k, "subgradient_error");
  kk.retained_values = get<Index>(k, "retained_values");
  kk.subgradient_limit = get_num(k, "subgradient_limit");
  kk.multiplier_ratio = get_num(k, "multiplier_ratio");
  kk.residuals_ok = get<bool>(k, "residuals_ok");
  kk.grad_ok = get<bool>(k, "grad_ok");
  kk.subgradient_ok = get<bool>(k, "subgradient_ok");
  kk.multipliers_bounded = get<bool>(k, "multipliers_bounded");
  kk.pass = get<bool>(k, "pass");

  if (!j.contains("history") || !j.at("history").is_array()) {
    throw ParseError(0, "report is missing 'history'");
  }
  for (const json& h : j.at("history")) {
    IterationRecord rec;
    rec.iter = get<int>(h, "iter");
    if (!h.contains("res")) throw ParseError(0, "history entry is missing 'res'");
    rec.res = residuals_from(h.at("res"));
    rec.rho = get_num(h, "rho");
    rec.objective = get_num(h, "objective");
    rec.grad_norm = get_num(h, "grad_norm");
    rec.mx_norm = get_num(h, "mx_norm");
    rec.my_norm = get_num(h, "my_norm");
    rec.seconds = get_num(h, "seconds");
    d.history.push_back(rec);
  }
  if (static_cast<int>(d.history.size()) != d.iterations) {
    throw ParseError(0, "history length does not match 'iterations'");
  }
  return r;
}

std::string diagnostics_csv(const Diagnostics& d) {
  std::string out = "iter,res_x,res_y,res_g1,res_g2,rho,objective\n";
  for (const IterationRecord& r : d.history) {
    out += std::to_string(r.iter) + ',' + g17(r.res.x) + ',' + g17(r.res.y) + ',' + g17(r.res.g1) + ',' +
           g17(r.res.g2) + ',' + g17(r.rho) + ',' + g17(r.objective) + '\n';
  }
  return out;
}

std::string kkt_summary(const Diagnostics& d) {
  const KktReport& k = d.kkt;
  std::ostringstream os;
  os.precision(6);
  if (!d.converged) os << "KKT: NOT CONVERGED (" << d.stop_reason << ")\n";
  else os << (k.pass ? "KKT: PASS" : "KKT: FAIL") << '\n';

  Residuals peak;
  for (const IterationRecord& r : d.history) {
    peak.x = std::max(peak.x, r.res.x);
    peak.y = std::max(peak.y, r.res.y);
    peak.g1 = std::max(peak.g1, r.res.g1);
    peak.g2 = std::max(peak.g2, r.res.g2);
  }
  auto ok = [](bool b) { return b ? "ok" : "violated"; };
  os << "iterations: " << d.iterations << " (" << d.stop_reason << "), tau_mode=" << to_string(d.tau_mode)
     << ", tau=" << d.tau << '\n'
     << "final residuals: x=" << k.residuals.x << " y=" << k.residuals.y << " g1=" << k.residuals.g1
     << " g2=" << k.residuals.g2 << " max=" << k.residuals.max() << " limit=" << k.residual_limit << " "
     << ok(k.residuals_ok) << '\n'
     << "residual maxima over run: x=" << peak.x << " y=" << peak.y << " g1=" << peak.g1
     << " g2=" << peak.g2 << '\n'
     << "stationarity: |grad L1|=" << k.grad_norm << " limit=" << k.grad_limit << " " << ok(k.grad_ok) << '\n'
     << "subgradient: max error=" << k.subgradient_error << " over " << k.retained_values
     << " singular values, limit=" << k.subgradient_limit << " " << ok(k.subgradient_ok) << '\n'
     << "multipliers: final/median norm=" << k.multiplier_ratio << " "
     << (k.multipliers_bounded ? "bounded" : "growing") << '\n';
  return os.str();
}

std::string metrics_to_text(const MetricReport& m) {
  return "psnr=" + g17(m.psnr) + "\nergas=" + g17(m.ergas) + "\nsam=" + g17(m.sam) + "\nssim=" + g17(m.ssim) +
         "\n";
}

MetricReport metrics_from_text(const std::string& text) {
  MetricReport m;
  bool seen[4] = {false, false, false, false};
  std::istringstream in(text);
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t at = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(at, "expected key=value");
    const std::string key = line.substr(0, eq);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(line.substr(eq + 1), &used);
      if (used != line.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(at + eq + 1, "bad number for '" + key + "'");
    }
    if (key == "psnr") m.psnr = v, seen[0] = true;
    else if (key == "ergas") m.ergas = v, seen[1] = true;
    else if (key == "sam") m.sam = v, seen[2] = true;
    else if (key == "ssim") m.ssim = v, seen[3] = true;
    else throw ParseError(at, "unknown metric '" + key + "'");
  }
  for (bool s : seen) {
    if (!s) throw ParseError(offset, "metric report is incomplete");
  }
  return m;
}

}  // namespace cmlptr
