#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "oulab/kernels.hpp"

namespace {

using oulab::GridSpec;
using oulab::kernels::LinePass;

std::vector<double> gaussian(const GridSpec& g) {
  std::vector<double> v(g.size());
  int idx[3] = {0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, idx);
    double r2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) r2 += g.coordinate(idx[d]) * g.coordinate(idx[d]);
    v[i] = std::exp(-0.5 * r2);
  }
  return v;
}

LinePass shear_pass(int dim) {
  LinePass p;
  p.axis = 0;
  p.coeffs.assign(dim, 0.0);
  p.coeffs[0] = 1.2;
  if (dim > 1) p.coeffs[1] = 0.35;
  return p;
}

template <void (*Kernel)(const GridSpec&, const LinePass&, std::span<const double>,
                         std::span<double>)>
void run(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const GridSpec g(dim, 20.0, static_cast<int>(state.range(1)));
  const auto in = gaussian(g);
  std::vector<double> out(g.size());
  const auto pass = shear_pass(dim);
  for (auto _ : state) {
    Kernel(g, pass, in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}

void args(benchmark::internal::Benchmark* b) {
  b->Args({1, 256})->Args({1, 1024})->Args({2, 64})->Args({2, 128})->Args({2, 256});
}

}  // namespace

BENCHMARK(run<oulab::kernels::reference::resample_lines>)->Name("reference/resample")->Apply(args);
BENCHMARK(run<oulab::kernels::resample_lines>)->Name("parallel/resample")->Apply(args);
BENCHMARK(run<oulab::kernels::reference::resample_lines_adjoint>)
    ->Name("reference/adjoint")
    ->Apply(args);
BENCHMARK(run<oulab::kernels::resample_lines_adjoint>)->Name("parallel/adjoint")->Apply(args);

BENCHMARK_MAIN();
