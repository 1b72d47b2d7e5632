#include <benchmark/benchmark.h>

#include "pulsefront/dns.hpp"
#include "pulsefront/fields.hpp"
#include "pulsefront/frontsolve.hpp"
#include "pulsefront/linsolve.hpp"

using namespace pulsefront;

namespace {

GeometryConfig wavy(int n_s, int n_xz) {
  GeometryConfig g;
  g.n_s = n_s;
  g.n_x = n_xz;
  g.n_z = n_xz;
  g.a = 8.0;
  g.bottom = WallProfile::fourier(0.0, {0.05}, {}, 1.0);
  g.top = WallProfile::fourier(1.0, {}, {0.1}, 1.0);
  return g;
}

void BM_Assemble(benchmark::State& st) {
  const CellPtr cell = build_period_cell(wavy(static_cast<int>(st.range(0)), 16));
  OperatorSpec op;
  op.eps = 0.02;
  op.drift = 0.6;
  BoundarySpec bc;
  bc.walls = WallCondition::conormal;
  bc.left = 1.0;
  for (auto _ : st) benchmark::DoNotOptimize(assemble(op, bc, cell));
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_TemperatureSolve(benchmark::State& st) {
  const CellPtr cell = build_period_cell(wavy(static_cast<int>(st.range(0)), 16));
  for (auto _ : st) benchmark::DoNotOptimize(solve_T0c(0.6, cell, 0.02));
}
BENCHMARK(BM_TemperatureSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Mollify(benchmark::State& st) {
  const CellPtr cell = build_period_cell(wavy(128, 16));
  GridField g(cell, BcTag::vorticity);
  g.fill_physical([](double s, double x, double z) { return std::exp(-s * s) * std::sin(6.0 * x) * z; });
  const MollifierSpec m{st.range(0) / 100.0, 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(mollify(g, m));
}
BENCHMARK(BM_Mollify)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_DnsStep(benchmark::State& st) {
  DnsConfig cfg;
  cfg.second_order = st.range(0) != 0;
  cfg.dt = 0.005;
  Dns dns(wavy(16, 32), ReactionSpec{}, cfg);
  DnsState s = dns.init();
  for (auto _ : st) dns.step(s, cfg.dt);
}
BENCHMARK(BM_DnsStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
