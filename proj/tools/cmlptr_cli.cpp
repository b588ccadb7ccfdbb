// cmlptr: simulate -> fuse -> eval -> diagnose pipeline for the CMlpTR fusion model.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cmlptr/config.hpp"
#include "cmlptr/degradation.hpp"
#include "cmlptr/errors.hpp"
#include "cmlptr/io.hpp"
#include "cmlptr/metrics.hpp"
#include "cmlptr/report.hpp"
#include "cmlptr/solver.hpp"

namespace fs = std::filesystem;
using namespace cmlptr;

namespace {

// Per-subcommand RunConfig flags. Values are applied after --config so the
// command line wins.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value file with run settings");
    for (const std::string& key : RunConfig::keys()) {
      std::string dashed = key;
      for (char& c : dashed) {
        if (c == '_') c = '-';
      }
      std::string names = "--" + key;
      if (dashed != key) names += ",--" + dashed;
      cmd->add_option(names, values[key], "overrides '" + key + "'");
    }
  }

  RunConfig resolve(CLI::App* cmd) const {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [key, value] : values) {
      if (cmd->count("--" + key) > 0) c.set(key, value);
    }
    c.validate();
    return c;
  }
};

Shape3 parse_shape(const std::string& text) {
  Shape3 s{0, 0, 0};
  const char* p = text.data();
  const char* end = p + text.size();
  for (int d = 0; d < 3; ++d) {
    auto [next, ec] = std::from_chars(p, end, s[static_cast<std::size_t>(d)]);
    if (ec != std::errc() || s[static_cast<std::size_t>(d)] < 1) {
      throw ConfigError("shape must look like 64x64x32, got '" + text + "'");
    }
    p = next;
    if (d < 2) {
      if (p == end || (*p != 'x' && *p != 'X')) throw ConfigError("shape must look like 64x64x32, got '" + text + "'");
      ++p;
    }
  }
  if (p != end) throw ConfigError("shape must look like 64x64x32, got '" + text + "'");
  return s;
}

int cmd_simulate(const RunConfig& c, const std::string& gt_path, const std::string& envi_path,
                 const std::string& synthetic, const fs::path& out) {
  if (!gt_path.empty() + !envi_path.empty() + !synthetic.empty() != 1) {
    throw ConfigError("give exactly one of --gt, --envi or --synthetic");
  }
  Tensor3 z;
  if (!synthetic.empty()) {
    SceneSpec spec;
    spec.shape = parse_shape(synthetic);
    spec.rank = c.scene_rank;
    spec.blocks = c.blocks;
    spec.seed = c.seed;
    spec.spectra = c.spectra;
    z = synth_scene(spec).z;
  } else if (!envi_path.empty()) {
    z = read_envi(envi_path);
  } else {
    z = read_tensor3(gt_path);
  }
  if (c.calibration != 1.0) z = gamma_calibrate(z, c.calibration);
  const DegradationSet d = build_degradation(z.shape(), c.factor, c.kernel_size, c.sigma, c.bands(),
                                             uniform_wavelengths(z.dim(3), c.wl_min, c.wl_max));
  auto [x, y] = simulate(z, d);
  fs::create_directories(out);
  write_tensor(out / "gt.cmt", z);
  write_tensor(out / "x.cmt", x);
  write_tensor(out / "y.cmt", y);
  write_tensor(out / "p1.cmt", d.p1);
  write_tensor(out / "p2.cmt", d.p2);
  write_tensor(out / "p3.cmt", d.p3);
  write_file_atomic(out / "run.cfg", c.to_text());
  std::cout << "gt=" << to_string(z.shape()) << " x=" << to_string(x.shape()) << " y=" << to_string(y.shape())
            << " bands=" << d.p3.rows() << '\n';
  return 0;
}

struct FuseInputs {
  std::string dir, x, y, p1, p2, p3, out, report;

  fs::path pick(const std::string& explicit_path, const char* name) const {
    if (!explicit_path.empty()) return explicit_path;
    if (dir.empty()) throw ConfigError(std::string("missing --") + name + " (or --in)");
    return fs::path(dir) / (std::string(name) + ".cmt");
  }
};

int cmd_fuse(const RunConfig& c, const FuseInputs& in) {
  FusionProblem p{read_tensor3(in.pick(in.x, "x")), read_tensor3(in.pick(in.y, "y")),
                  read_matrix(in.pick(in.p1, "p1")), read_matrix(in.pick(in.p2, "p2")),
                  read_matrix(in.pick(in.p3, "p3"))};
  const SolveResult r = solve(p, c.solver);
  const fs::path out = !in.out.empty() ? fs::path(in.out) : in.pick("", "z_hat");
  const fs::path rep = !in.report.empty() ? fs::path(in.report) : out.parent_path() / "report.json";
  write_tensor(out, r.z_hat);
  write_file_atomic(rep, report_to_json({c.solver, p.hssi_shape(), r.diagnostics}));
  const Diagnostics& d = r.diagnostics;
  std::cout << "iterations=" << d.iterations << " converged=" << (d.converged ? "true" : "false")
            << " max_residual=" << d.kkt.residuals.max() << " tau_mode=" << to_string(d.tau_mode) << '\n';
  return 0;
}

int cmd_eval(const RunConfig& c, const std::string& ref, const std::string& est, const std::string& out) {
  const MetricReport m = evaluate(read_tensor3(ref), read_tensor3(est), c.eval_options());
  const std::string text = metrics_to_text(m);
  if (!out.empty()) write_file_atomic(out, text);
  std::cout << text;
  return 0;
}

int cmd_diagnose(const std::string& report, const std::string& csv) {
  const RunReport r = report_from_json(read_text(report));
  if (!csv.empty()) write_file_atomic(csv, diagnostics_csv(r.diagnostics));
  std::cout << kkt_summary(r.diagnostics);
  return 0;
}

int cmd_bicubic(const RunConfig& c, const std::string& x, const std::string& out) {
  write_tensor(out, bicubic_upsample(read_tensor3(x), c.factor));
  return 0;
}

int fail(const char* kind, const std::string& what, int code) {
  std::string line = what;
  for (char& ch : line) {
    if (ch == '\n') ch = ' ';
  }
  std::cerr << "error: " << kind << ": " << line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMlpTR hyperspectral super-resolution"};
  app.require_subcommand(1);

  ConfigFlags sim_flags, fuse_flags, eval_flags, bic_flags;
  std::string gt, envi, synthetic, sim_out = ".";
  CLI::App* sim = app.add_subcommand("simulate", "degrade a ground truth into X, Y and P1/P2/P3");
  sim->add_option("--gt", gt, "ground-truth tensor (.cmt)");
  sim->add_option("--envi", envi, "ground truth as an ENVI header (.hdr), band-sequential");
  sim->add_option("--synthetic", synthetic, "generate a scene of this shape, e.g. 64x64x32");
  sim->add_option("-o,--out", sim_out, "output directory");
  sim_flags.attach(sim);

  FuseInputs fin;
  CLI::App* fuse = app.add_subcommand("fuse", "recover the HSSI from X and Y");
  fuse->add_option("--in", fin.dir, "directory holding x.cmt, y.cmt, p1.cmt, p2.cmt, p3.cmt");
  fuse->add_option("--x", fin.x);
  fuse->add_option("--y", fin.y);
  fuse->add_option("--p1", fin.p1);
  fuse->add_option("--p2", fin.p2);
  fuse->add_option("--p3", fin.p3);
  fuse->add_option("-o,--out", fin.out, "z_hat path (default <in>/z_hat.cmt)");
  fuse->add_option("--report", fin.report, "report path (default next to z_hat)");
  fuse_flags.attach(fuse);

  std::string ref, est, metrics_out;
  CLI::App* ev = app.add_subcommand("eval", "PSNR, ERGAS, SAM and SSIM of an estimate");
  ev->add_option("--ref", ref)->required();
  ev->add_option("--est", est)->required();
  ev->add_option("-o,--out", metrics_out, "also write the key=value report here");
  eval_flags.attach(ev);

  std::string report, csv;
  CLI::App* diag = app.add_subcommand("diagnose", "summarize convergence and KKT checks of a fuse report");
  diag->add_option("report", report)->required();
  diag->add_option("--csv", csv, "write per-iteration residuals here");

  std::string bic_x, bic_out;
  CLI::App* bic = app.add_subcommand("bicubic", "bicubic upsampling baseline of X");
  bic->add_option("--x", bic_x)->required();
  bic->add_option("-o,--out", bic_out)->required();
  bic_flags.attach(bic);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*sim) return cmd_simulate(sim_flags.resolve(sim), gt, envi, synthetic, sim_out);
    if (*fuse) return cmd_fuse(fuse_flags.resolve(fuse), fin);
    if (*ev) return cmd_eval(eval_flags.resolve(ev), ref, est, metrics_out);
    if (*diag) return cmd_diagnose(report, csv);
    if (*bic) return cmd_bicubic(bic_flags.resolve(bic), bic_x, bic_out);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const ParseError& e) {
    return fail("parse", e.what(), 3);
  } catch (const IoError& e) {
    return fail("io", e.what(), 3);
  } catch (const DimensionError& e) {
    return fail("dimension", e.what(), 4);
  } catch (const ArgumentError& e) {
    return fail("argument", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), 2);
  } catch (const DivergenceError& e) {
    return fail("divergence", e.what(), 5);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
