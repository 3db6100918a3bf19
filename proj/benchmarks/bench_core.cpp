#include <benchmark/benchmark.h>

#include <random>

#include "krein/config.hpp"
#include "krein/harness.hpp"
#include "krein/robin.hpp"
#include "krein/sectorial.hpp"

namespace {

using namespace krein;

ModelSpec spec(const std::string& kind, Index n) {
  ModelSpec m;
  m.kind = kind;
  m.n = n;
  if (kind.rfind("disk", 0) == 0) m.k_max = 4;
  m.potential.kind = "smooth";
  m.potential.polynomial = {Complex(0.6, -0.2), Complex(0.0, 0.5)};
  return m;
}

void weyl_bench(benchmark::State& state, const std::string& kind) {
  const auto model = build_model(spec(kind, state.range(0)));
  const SpectralPoint p = SpectralPoint::at(*model, model->certified_threshold() - 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(weyl(*model, p).norm);
}

void BM_WeylFd1d(benchmark::State& s) { weyl_bench(s, "fd1d"); }
void BM_WeylShoot1d(benchmark::State& s) { weyl_bench(s, "shoot1d"); }
void BM_WeylDiskInterior(benchmark::State& s) { weyl_bench(s, "disk_interior"); }
void BM_WeylDiskExterior(benchmark::State& s) { weyl_bench(s, "disk_exterior"); }

BENCHMARK(BM_WeylFd1d)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_WeylShoot1d)->Arg(65)->Arg(97);
BENCHMARK(BM_WeylDiskInterior)->Arg(32)->Arg(64);
BENCHMARK(BM_WeylDiskExterior)->Arg(32)->Arg(64);

void BM_KreinResolventFd1d(benchmark::State& state) {
  const auto model = build_model(spec("fd1d", state.range(0)));
  std::mt19937_64 rng(1);
  const CVector f = model->random_state(rng);
  CMatrix b(2, 2);
  b << Complex(1.0, 0.5), Complex(0.2), Complex(-0.3, 1.0), Complex(2.0);
  const BoundaryOperator op = BoundaryOperator::from_matrix(b);
  const SpectralPoint p = SpectralPoint::at(*model, -10.0);
  for (auto _ : state) benchmark::DoNotOptimize(krein_resolvent(*model, op, p, f).data());
}
BENCHMARK(BM_KreinResolventFd1d)->Arg(256)->Arg(4096);

void BM_RobinEigsFd1d(benchmark::State& state) {
  const auto model = build_model(spec("fd1d", 256));
  const BoundaryOperator op = BoundaryOperator::scalar(2, Complex(1.0, 1.0));
  const Region region{-40.0, 120.0, -15.0, 15.0};
  const ScanGrid grid{state.range(0), state.range(0) / 4 + 1};
  for (auto _ : state) benchmark::DoNotOptimize(robin_eigs(*model, op, region, grid).eigenvalues.size());
}
BENCHMARK(BM_RobinEigsFd1d)->Arg(41)->Arg(161)->Unit(benchmark::kMillisecond);

void BM_SectorialFd1d(benchmark::State& state) {
  const auto model = build_model(spec("fd1d", state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sectorial_factorization(*model, -20.0).c1_norm);
}
BENCHMARK(BM_SectorialFd1d)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IdentitySuiteSmall(benchmark::State& state) {
  SuiteConfig c;
  c.models = {spec("fd1d", 128)};
  c.random_pairs = 10;
  c.identity_samples = 4;
  c.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_identity_suite(c).records.size());
}
BENCHMARK(BM_IdentitySuiteSmall)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
