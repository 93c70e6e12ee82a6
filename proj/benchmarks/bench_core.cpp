#include <map>

#include <benchmark/benchmark.h>

#include <sloc/sloc.hpp>

using namespace sloc;

namespace {

const Model& haldane(int n) {
  static std::map<int, Model> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_haldane(n, n, HaldaneParams::haldane_default())).first;
  return it->second;
}

Probe centre_probe(const Model& m, double rho) {
  return {m.lattice.position(m.lattice.nearest_site(m.lattice.center())), rho, 0.2, 0.0};
}

}  // namespace

static void bm_build_haldane(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_haldane(n, n, HaldaneParams::haldane_default()));
}
BENCHMARK(bm_build_haldane)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void bm_local_gap(benchmark::State& state) {
  const Model& m = haldane(30);
  const Probe p = centre_probe(m, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(local_gap(m.hamiltonian, m.lattice, p.x, p.rho).g_rho);
}
BENCHMARK(bm_local_gap)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void bm_assemble(benchmark::State& state) {
  const Model& m = haldane(30);
  const Probe p = centre_probe(m, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m.hamiltonian, m.lattice, p).dim());
}
BENCHMARK(bm_assemble)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void bm_half_signature(benchmark::State& state) {
  const Model& m = haldane(30);
  const LocalizerMatrix lm = assemble(m.hamiltonian, m.lattice, centre_probe(m, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(half_signature(lm).signature());
  state.counters["dim"] = static_cast<double>(lm.dim());
}
BENCHMARK(bm_half_signature)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void bm_localizer_gap(benchmark::State& state) {
  const Model& m = haldane(30);
  const LocalizerMatrix lm = assemble(m.hamiltonian, m.lattice, centre_probe(m, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(localizer_gap(lm));
}
BENCHMARK(bm_localizer_gap)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void bm_cf_fourier(benchmark::State& state) {
  const TaperingProfile f(TaperFamily::Beta, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cf_fourier(f));
}
BENCHMARK(bm_cf_fourier)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
