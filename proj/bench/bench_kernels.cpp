// OpenMP kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "cmlptr/fft.hpp"
#include "cmlptr/kernels.hpp"
#include "cmlptr/rng.hpp"
#include "cmlptr/tsvd.hpp"

using namespace cmlptr;

namespace {

Tensor3 random_tensor(const Shape3& s, std::uint64_t seed) {
  Rng rng(seed);
  Tensor3 t(s);
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

template <bool Parallel>
void BM_ModeProduct(benchmark::State& state) {
  const Index n = state.range(0);
  const int mode = static_cast<int>(state.range(1));
  const Tensor3 t = random_tensor({n, n, 32}, 1);
  const Matrix m = random_matrix(t.dim(mode) / 2, t.dim(mode), 2);
  for (auto _ : state) {
    Tensor3 out = Parallel ? kernels::mode_n_product(t, m, mode) : serial::mode_n_product(t, m, mode);
    benchmark::DoNotOptimize(out.data().data());
  }
}

template <bool Parallel>
void BM_DftTubes(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexTensor3 f = fft_mode3(random_tensor({n, n, 32}, 3));
  for (auto _ : state) {
    ComplexTensor3 g = f;
    if (Parallel) kernels::dft_tubes(g, +1);
    else serial::dft_tubes(g, +1);
    benchmark::DoNotOptimize(g.data().data());
  }
}

template <bool Parallel>
void BM_SliceSvds(benchmark::State& state) {
  const Index n = state.range(0);
  const ComplexTensor3 f = fft_mode3(random_tensor({n, 3, n}, 4));
  for (auto _ : state) {
    auto svds = Parallel ? kernels::slice_svds(f, SvdVectors::thin, true) : serial::slice_svds(f, SvdVectors::thin);
    benchmark::DoNotOptimize(svds.data());
  }
}

template <bool Parallel>
void BM_NtpnnProx(benchmark::State& state) {
  const Index n = state.range(0);
  const Tensor3 c = random_tensor({n, 3, n - 1}, 5);
  const Surrogate psi(0.1);
  for (auto _ : state) {
    Tensor3 g = Parallel ? ntpnn_prox(c, 0.5, psi) : serial::ntpnn_prox(c, 0.5, psi);
    benchmark::DoNotOptimize(g.data().data());
  }
}

}  // namespace

BENCHMARK(BM_ModeProduct<true>)->ArgsProduct({{64, 128}, {1, 2, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModeProduct<false>)->ArgsProduct({{64, 128}, {1, 2, 3}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DftTubes<true>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DftTubes<false>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SliceSvds<true>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SliceSvds<false>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NtpnnProx<true>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NtpnnProx<false>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
