#include <benchmark/benchmark.h>

#include "riscr/numerics.hpp"
#include "riscr/rng.hpp"

namespace {

riscr::CMatrix random_psd(int n, riscr::Rng& rng) {
  riscr::CMatrix f(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) f(i, j) = rng.cnormal();
  }
  return f * f.adjoint();
}

void BM_HermitianEig(benchmark::State& state) {
  riscr::Rng rng(1);
  const riscr::HermitianMatrix m(random_psd(static_cast<int>(state.range(0)), rng), 1e-9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(riscr::hermitian_eig(m));
  }
}
BENCHMARK(BM_HermitianEig)->Arg(16)->Arg(41)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
