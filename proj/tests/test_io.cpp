#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "cmlptr/config.hpp"
#include "cmlptr/errors.hpp"
#include "cmlptr/io.hpp"
#include "cmlptr/report.hpp"
#include "oracles.hpp"

using namespace cmlptr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cmlptr_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void expect_parse_error_at(const std::vector<std::uint8_t>& bytes, std::uint64_t offset) {
  try {
    decode_tensor(bytes);
    FAIL() << "no ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), offset) << e.what();
  }
}

Diagnostics sample_diagnostics(bool converged) {
  Diagnostics d;
  for (int i = 1; i <= 3; ++i) {
    IterationRecord r;
    r.iter = i;
    r.res = {1.0 / i, 2.0 / i, 0.1 / 3.0, std::nextafter(1.0, 2.0)};
    r.rho = 1e-3 * std::pow(1.05, i - 1);
    r.objective = 0.1 * i;
    r.grad_norm = 3.0;
    r.mx_norm = i;
    r.my_norm = 2 * i;
    r.seconds = 0.01;
    d.history.push_back(r);
  }
  d.iterations = 3;
  d.converged = converged;
  d.stop_reason = converged ? "tolerance" : "max_iter";
  d.tau = 17.25;
  d.tau_literal = 2.2;
  d.tau_safe = 17.25;
  d.threshold = 1e-5;
  d.kkt.residuals = {1e-6, 2e-6, 3e-9, 4e-9};
  d.kkt.residual_limit = 1e-4;
  d.kkt.grad_norm = 1e-5;
  d.kkt.grad_limit = 1.7e-3;
  d.kkt.subgradient_error = 5e-7;
  d.kkt.retained_values = 12;
  d.kkt.multiplier_ratio = std::numeric_limits<double>::infinity();
  d.kkt.residuals_ok = d.kkt.grad_ok = d.kkt.subgradient_ok = true;
  d.kkt.pass = true;
  return d;
}

}  // namespace

TEST(TensorFile, RoundTripIsBitExact) {
  Rng rng(1);
  Tensor3 t = oracle::random_tensor({4, 5, 6}, rng);
  t(0, 0, 0) = -0.0;
  t(1, 1, 1) = std::numeric_limits<double>::denorm_min();
  const fs::path p = scratch("t.cmt");
  write_tensor(p, t);
  const Tensor3 back = read_tensor3(p);
  ASSERT_EQ(back.shape(), t.shape());
  EXPECT_EQ(std::memcmp(back.data().data(), t.data().data(), t.data().size() * sizeof(double)), 0);
  EXPECT_EQ(fs::file_size(p), 6 + 3 * 8 + 120 * 8U);

  const Matrix m = oracle::random_matrix(3, 7, rng);
  write_tensor(scratch("m.cmt"), m);
  EXPECT_EQ(read_matrix(scratch("m.cmt")), m);
  EXPECT_THROW(read_matrix(p), DimensionError);
}

TEST(TensorFile, GoldenMatrixBytes) {
  const std::vector<std::uint8_t> bytes = {
      'C', 'M', 'T', '1', 0x01, 0x02,
      2, 0, 0, 0, 0, 0, 0, 0,  // rows
      2, 0, 0, 0, 0, 0, 0, 0,  // cols
      0, 0, 0, 0, 0, 0, 0xF0, 0x3F,  // 1.0
      0, 0, 0, 0, 0, 0, 0x00, 0x40,  // 2.0
      0, 0, 0, 0, 0, 0, 0x08, 0x40,  // 3.0
      0, 0, 0, 0, 0, 0, 0x10, 0x40,  // 4.0
  };
  const TensorData d = decode_tensor(bytes);
  ASSERT_TRUE(std::holds_alternative<Matrix>(d));
  Matrix expect(2, 2);
  expect << 1, 2, 3, 4;
  EXPECT_EQ(std::get<Matrix>(d), expect);
  EXPECT_EQ(encode_tensor(expect), bytes);
}

TEST(TensorFile, ParseErrorsCarryOffsets) {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  const std::vector<std::uint8_t> good = encode_tensor(m);

  std::vector<std::uint8_t> bad = good;
  std::memcpy(bad.data(), "XXXX", 4);
  expect_parse_error_at(bad, 0);

  bad = good;
  bad[4] = 0x02;
  expect_parse_error_at(bad, 4);

  bad = good;
  bad[5] = 4;
  expect_parse_error_at(bad, 5);

  bad.assign(good.begin(), good.end() - 3);
  expect_parse_error_at(bad, bad.size());

  bad.assign(good.begin(), good.begin() + 10);
  expect_parse_error_at(bad, 10);

  bad = good;
  bad.push_back(0);
  expect_parse_error_at(bad, good.size());

  bad = good;
  std::fill(bad.begin() + 6, bad.begin() + 14, 0);
  expect_parse_error_at(bad, 6);

  expect_parse_error_at({}, 0);
  EXPECT_THROW(read_tensor(scratch("does_not_exist.cmt")), IoError);
}

TEST(TensorFile, AtomicWriteLeavesNoTemporaries) {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  write_file_atomic(dir / "a.txt", std::string("one"));
  write_file_atomic(dir / "a.txt", std::string("two"));
  EXPECT_EQ(read_text(dir / "a.txt"), "two");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
  EXPECT_THROW(write_file_atomic(dir / "missing" / "a.txt", std::string("x")), IoError);
}

TEST(Envi, BandSequentialImport) {
  const fs::path hdr = scratch("cube.hdr");
  {
    std::ofstream h(hdr);
    h << "ENVI\ndescription = {test\ncube}\nsamples = 3\nlines = 2\nbands = 2\nheader offset = 0\n"
         "file type = ENVI Standard\ndata type = 4\ninterleave = bsq\nbyte order = 0\n";
  }
  {
    std::ofstream d(scratch("cube.img"), std::ios::binary);
    for (int i = 0; i < 12; ++i) {
      const float v = static_cast<float>(i) * 0.5f;
      d.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  const Tensor3 t = read_envi(hdr);
  ASSERT_EQ(t.shape(), (Shape3{2, 3, 2}));
  // band 1, line 1, sample 2 is element 1*6 + 1*3 + 2
  EXPECT_EQ(t(1, 2, 1), 0.5 * 11);
  EXPECT_EQ(t(0, 1, 0), 0.5);
}

TEST(RunConfigText, ParseOverrideAndReject) {
  const RunConfig c = RunConfig::parse("# run\nr = 5\ngamma=0.1\ntau_mode=literal\nfactor=8\nband_table=landsat7\n");
  EXPECT_EQ(c.solver.r, 5);
  EXPECT_EQ(c.solver.tau_mode, TauMode::literal);
  EXPECT_EQ(c.bands().size(), 6U);
  EXPECT_THROW(RunConfig::parse("bogus=1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("gamma=-1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("nu=1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("kernel_size=8\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("max_iter=ten\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("r\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("tau_mode=fast\n"), ConfigError);

  RunConfig d;
  d.solver.gamma = 0.3;
  d.sigma = 1.0 / 3.0;
  d.spectra = SpectraKind::smooth_gaussians;
  const RunConfig back = RunConfig::parse(d.to_text());
  EXPECT_EQ(back.to_text(), d.to_text());
  EXPECT_EQ(back.sigma, d.sigma);
  EXPECT_EQ(RunConfig{}.solver.gamma, 0.1);
}

TEST(Report, JsonRoundTrip) {
  RunReport r{SolverConfig{}, {64, 64, 32}, sample_diagnostics(true)};
  r.config.tau_mode = TauMode::literal;
  const std::string text = report_to_json(r);
  const RunReport back = report_from_json(text);
  EXPECT_EQ(report_to_json(back), text);
  EXPECT_EQ(back.diagnostics.history[2].res.g2, std::nextafter(1.0, 2.0));
  EXPECT_TRUE(std::isinf(back.diagnostics.kkt.multiplier_ratio));
  EXPECT_EQ(back.config.tau_mode, TauMode::literal);

  EXPECT_THROW(report_from_json("{"), ParseError);
  EXPECT_THROW(report_from_json("{\"format\": \"cmlptr-report-1\"}"), ParseError);
  EXPECT_THROW(report_from_json("[]"), ParseError);
}

TEST(Report, CsvAndSummary) {
  const Diagnostics d = sample_diagnostics(true);
  const std::string csv = diagnostics_csv(d);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,res_x,res_y,res_g1,res_g2,rho,objective");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + d.iterations);
  EXPECT_NE(csv.find("\n3,0.33333333333333331,"), std::string::npos);

  const std::string pass = kkt_summary(d);
  EXPECT_EQ(pass.substr(0, pass.find('\n')), "KKT: PASS");
  EXPECT_NE(pass.find("residual maxima"), std::string::npos);

  Diagnostics failing = d;
  failing.kkt.pass = false;
  EXPECT_EQ(kkt_summary(failing).substr(0, 10), "KKT: FAIL\n");

  const std::string nc = kkt_summary(sample_diagnostics(false));
  EXPECT_EQ(nc.substr(0, nc.find('\n')), "KKT: NOT CONVERGED (max_iter)");
}

TEST(Report, MetricsRoundTrip) {
  const MetricReport m{41.123456789012345, 0.1 / 3.0, 1.25, 0.9876543210987654};
  const MetricReport back = metrics_from_text(metrics_to_text(m));
  EXPECT_EQ(back.psnr, m.psnr);
  EXPECT_EQ(back.ergas, m.ergas);
  EXPECT_EQ(back.sam, m.sam);
  EXPECT_EQ(back.ssim, m.ssim);
  EXPECT_THROW(metrics_from_text("psnr=1\n"), ParseError);
  EXPECT_THROW(metrics_from_text("psnr=x\nergas=0\nsam=0\nssim=1\n"), ParseError);
}
