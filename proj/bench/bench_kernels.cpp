#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "illiq/kernels.hpp"

using namespace illiq;

namespace {

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return a;
}

std::vector<double> bowl(const std::vector<std::vector<double>>& axes) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<double> f(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double v = 0.0;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const double y = axes[k][rem % axes[k].size()];
      rem /= axes[k].size();
      v += 0.5 * y * y + 0.1 * std::abs(y);
    }
    f[flat] = v;
  }
  return f;
}

template <bool Parallel>
void BM_Normals(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::standard_normals(7, 0, out);
    } else {
      serial::standard_normals(7, 0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Conjugate1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<std::vector<double>> y{axis(-50, 50, n)};
  const std::vector<std::vector<double>> u{axis(-60, 60, n)};
  const auto f = bowl(y);
  std::vector<double> out(n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::conjugate(y, f, u, out);
    } else {
      serial::conjugate(y, f, u, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Conjugate2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<std::vector<double>> y{axis(-5, 5, n), axis(-5, 5, n)};
  const std::vector<std::vector<double>> u{axis(-6, 6, n), axis(-6, 6, n)};
  const auto f = bowl(y);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      parallel::conjugate(y, f, u, out);
    } else {
      serial::conjugate(y, f, u, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_Normals<false>)->Name("normals/serial")->Arg(1 << 20);
BENCHMARK(BM_Normals<true>)->Name("normals/parallel")->Arg(1 << 20);
BENCHMARK(BM_Conjugate1D<false>)->Name("conjugate_1d/serial")->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK(BM_Conjugate1D<true>)->Name("conjugate_1d/parallel")->Arg(1 << 10)->Arg(1 << 12);
BENCHMARK(BM_Conjugate2D<false>)->Name("conjugate_2d/serial")->Arg(32);
BENCHMARK(BM_Conjugate2D<true>)->Name("conjugate_2d/parallel")->Arg(32)->Arg(256);

BENCHMARK_MAIN();
