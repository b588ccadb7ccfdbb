#include <gtest/gtest.h>

#include "cmlptr/errors.hpp"
#include "cmlptr/fft.hpp"
#include "cmlptr/kernels.hpp"
#include "cmlptr/tensor_ops.hpp"
#include "cmlptr/tsvd.hpp"
#include "oracles.hpp"

using namespace cmlptr;

TEST(Surrogate, ShapeProperties) {
  for (double gamma : {0.01, 0.1, 1.0, 10.0}) {
    const Surrogate psi(gamma);
    EXPECT_EQ(psi.value(0.0), 0.0);
    EXPECT_NEAR(psi.value(1.0), 1.0, 1e-15);
    EXPECT_NEAR(psi.slope_at_zero(), gamma / std::log1p(gamma), 1e-15);
    double prev_v = 0.0, prev_d = psi.slope_at_zero();
    for (double x = 0.05; x < 20.0; x += 0.05) {
      EXPECT_GE(psi.value(x), prev_v);
      EXPECT_LE(psi.derivative(x), prev_d);
      // midpoint concavity
      EXPECT_GE(psi.value(x - 0.025), 0.5 * (psi.value(x) + psi.value(x - 0.05)) - 1e-15);
      prev_v = psi.value(x);
      prev_d = psi.derivative(x);
    }
  }
  EXPECT_THROW(Surrogate(0.0), ArgumentError);
}

TEST(TProduct, IdentityAndZero) {
  Rng rng(1);
  const Tensor3 a = oracle::random_tensor({3, 4, 5}, rng);
  EXPECT_LE(oracle::max_abs_diff(t_product(a, identity_tensor(4, 5)), a), 1e-14);
  EXPECT_EQ(t_product(a, Tensor3({4, 2, 5})).norm(), 0.0);
  EXPECT_THROW(t_product(a, Tensor3({3, 2, 5})), DimensionError);
}

TEST(TProduct, MatchesBlockCirculantOracle) {
  Rng rng(2);
  const Tensor3 a = oracle::random_tensor({3, 2, 2}, rng);
  const Tensor3 b = oracle::random_tensor({2, 4, 2}, rng);
  EXPECT_LE(oracle::max_abs_diff(t_product(a, b), oracle::t_product(a, b)), 1e-10);
  const Tensor3 c = oracle::random_tensor({4, 3, 7}, rng);
  const Tensor3 d = oracle::random_tensor({3, 5, 7}, rng);
  EXPECT_LE(oracle::max_abs_diff(t_product(c, d), oracle::t_product(c, d)), 1e-10);
}

TEST(TTranspose, MatchesOracle) {
  Rng rng(3);
  const Tensor3 a = oracle::random_tensor({3, 4, 5}, rng);
  EXPECT_EQ(t_transpose(a), oracle::t_transpose(a));
}

TEST(TSvd, IdentityTensor) {
  const TSvdFactors f = t_svd(identity_tensor(3, 4));
  EXPECT_LE(oracle::max_abs_diff(f.s, identity_tensor(3, 4)), 1e-12);
}

TEST(TSvd, ReconstructionAndOrthogonality) {
  Rng rng(4);
  const Tensor3 a = oracle::random_tensor({6, 4, 5}, rng);
  const TSvdFactors f = t_svd(a);
  const Tensor3 rec = oracle::t_product(oracle::t_product(f.u, f.s), oracle::t_transpose(f.v));
  EXPECT_LE((rec - a).norm() / a.norm(), 1e-10);
  EXPECT_LE(oracle::max_abs_diff(oracle::t_product(oracle::t_transpose(f.u), f.u), oracle::identity(6, 5)), 1e-10);
  EXPECT_LE(oracle::max_abs_diff(oracle::t_product(oracle::t_transpose(f.v), f.v), oracle::identity(4, 5)), 1e-10);
  // f-diagonal
  const ComplexTensor3 sf = fft_mode3(f.s);
  for (Index k = 0; k < 5; ++k) {
    ComplexMatrix m = sf.slice(k);
    for (Index i = 0; i < std::min<Index>(6, 4); ++i) m(i, i) = 0.0;
    EXPECT_LE(m.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TSvd, EqualFrontalSlicesReduceToMatrixSvd) {
  Rng rng(5);
  const Matrix m = oracle::random_matrix(4, 3, rng);
  const Index n3 = 5;
  Tensor3 t({4, 3, n3});
  for (Index k = 0; k < n3; ++k) {
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 3; ++j) t(i, j, k) = m(i, j);
    }
  }
  const std::vector<Vector> sv = fourier_singular_values(t);
  const Eigen::VectorXd expected = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues() * static_cast<double>(n3);
  EXPECT_LE((sv[0] - expected).cwiseAbs().maxCoeff(), 1e-10);
  for (Index k = 1; k < n3; ++k) EXPECT_LE(sv[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Norms, TnnValues) {
  EXPECT_EQ(tnn(Tensor3({3, 4, 2})), 0.0);
  EXPECT_NEAR(tnn(identity_tensor(4, 3)), 4.0, 1e-12);
  Rng rng(6);
  const Tensor3 a = oracle::random_tensor({5, 4, 3}, rng);
  EXPECT_NEAR(tnn(a), oracle::tnn(a), 1e-10);
}

TEST(Norms, NtpnnValues) {
  const Surrogate psi(0.1);
  EXPECT_EQ(ntpnn(Tensor3({3, 4, 2}), psi), 0.0);
  for (double gamma : {0.01, 1.0, 10.0}) EXPECT_NEAR(ntpnn(identity_tensor(3, 4), Surrogate(gamma)), 3.0, 1e-12);
  Rng rng(7);
  const Tensor3 a = oracle::random_tensor({4, 4, 2}, rng);
  EXPECT_NEAR(ntpnn(a, psi), oracle::ntpnn(a, 0.1), 1e-10);
  EXPECT_NEAR(mode_ntpnn(a, 1, psi), oracle::ntpnn(oracle::permute_p(a, 1), 0.1), 1e-10);
}

TEST(Rank, LowRankConstruction) {
  Rng rng(8);
  const Tensor3 l = oracle::random_tensor({6, 2, 4}, rng);
  const Tensor3 r = oracle::random_tensor({2, 5, 4}, rng);
  EXPECT_EQ(tsvd_rank(oracle::t_product(l, r)), 2);
  EXPECT_EQ(tsvd_rank(Tensor3({3, 3, 3})), 0);
}

TEST(ScalarProx, HandCasesAgainstGrid) {
  const Surrogate psi(0.1);
  EXPECT_EQ(scalar_prox(0.0, 5.0, psi), 0.0);
  EXPECT_NEAR(scalar_prox(10.0, 1000.0, psi), oracle::grid_prox(10.0, 1000.0, 0.1), 1e-4);
  EXPECT_EQ(scalar_prox(0.01, 0.01, psi), 0.0);
  EXPECT_EQ(oracle::grid_prox(0.01, 0.01, 0.1), 0.0);
  EXPECT_THROW(scalar_prox(-1.0, 1.0, psi), ArgumentError);
  EXPECT_THROW(scalar_prox(1.0, 0.0, psi), ArgumentError);
}

TEST(ScalarProx, RandomPairsAgainstGrid) {
  const Surrogate psi(0.1);
  Rng rng(9);
  for (int i = 0; i < 60; ++i) {
    const double s = rng.uniform(0.0, 10.0);
    const double rho = std::pow(10.0, rng.uniform(-3.0, 3.0));
    const double x = scalar_prox(s, rho, psi);
    const double g = oracle::grid_prox(s, rho, 0.1);
    EXPECT_LE(std::abs(x - g), 1e-4) << "s=" << s << " rho=" << rho;
    // closed form is never worse than the grid point
    auto f = [&](double v) { return oracle::psi(v, 0.1) + rho * (v - s) * (v - s); };
    EXPECT_LE(f(x), f(g) + 1e-12);
  }
}

TEST(NtpnnProx, TrivialCases) {
  const Surrogate psi(0.1);
  EXPECT_EQ(ntpnn_prox(Tensor3({4, 3, 2}), 1.0, psi).norm(), 0.0);
  Rng rng(10);
  const Tensor3 c = oracle::random_tensor({4, 3, 2}, rng);
  EXPECT_LE((ntpnn_prox(c, 1e9, psi) - c).norm() / c.norm(), 1e-4);
}

TEST(NtpnnProx, LocalOptimalityAgainstPerturbations) {
  const Surrogate psi(0.1);
  Rng rng(11);
  const Tensor3 c = oracle::random_tensor({4, 3, 2}, rng, 0.0, 2.0);
  const double rho = 0.3;
  auto objective = [&](const Tensor3& g) { return oracle::ntpnn(g, 0.1) + rho * (g - c).squared_norm(); };
  const Tensor3 g = ntpnn_prox(c, rho, psi);
  const double best = objective(g);
  for (int i = 0; i < 200; ++i) {
    const double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
    Tensor3 p = g;
    for (double& v : p.data()) v += scale * rng.uniform(-1.0, 1.0);
    EXPECT_LE(best, objective(p) + 1e-12);
  }
}

TEST(Kernels, SliceSvdParallelMatchesSerial) {
  Rng rng(12);
  const Tensor3 t = oracle::random_tensor({7, 5, 9}, rng);
  const ComplexTensor3 f = fft_mode3(t);
  const auto par = kernels::slice_svds(f, SvdVectors::none, true);
  const auto ser = serial::slice_svds(f, SvdVectors::none);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) EXPECT_LE((par[k].sigma - ser[k].sigma).cwiseAbs().maxCoeff(), 1e-12);

  const Surrogate psi(0.1);
  EXPECT_LE(oracle::max_abs_diff(ntpnn_prox(t, 0.7, psi), serial::ntpnn_prox(t, 0.7, psi)), 1e-12);

  const ComplexTensor3 g = fft_mode3(oracle::random_tensor({5, 6, 9}, rng));
  const ComplexTensor3 p1 = kernels::slice_products(f, g), p2 = serial::slice_products(f, g);
  for (std::size_t i = 0; i < p1.data().size(); ++i) ASSERT_EQ(p1.data()[i], p2.data()[i]);
}
