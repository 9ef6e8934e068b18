#include <benchmark/benchmark.h>

#include "heatfm/forward.hpp"
#include "heatfm/ndmap.hpp"
#include "heatfm/recon.hpp"

using namespace heatfm;

namespace {

ProblemSetup setup(int m) {
  ProblemSetup p;
  p.omega = CurveSpec::circle(0, 0, 1);
  p.cavity = CurveSpec::circle(0, 0, 0.35);
  p.m_omega = m;
  p.m_cavity = m * 3 / 4;
  p.grid = TimeGrid(0.5, m);
  return p;
}

void BM_AssembleBlocks(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const BoundaryCurve c = make_curve(CurveSpec::circle(0, 0, 1), m);
  const TimeGrid grid(0.5, m);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_blocks({&c}, grid));
}
BENCHMARK(BM_AssembleBlocks)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveUniformFlux(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const NeumannSolver s({Component{make_curve(CurveSpec::circle(0, 0, 1), m), Side::inside}}, TimeGrid(0.5, m));
  BoundaryField flux(m, m);
  flux.values.setOnes();
  for (auto _ : state) benchmark::DoNotOptimize(s.solve(flux));
}
BENCHMARK(BM_SolveUniformFlux)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AssembleOperators(benchmark::State& state) {
  const ForwardModel model(setup(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(model));
}
BENCHMARK(BM_AssembleOperators)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AssembleN(benchmark::State& state) {
  const ForwardModel model(setup(static_cast<int>(state.range(0))));
  const OperatorSet ops = assemble_operators(model);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_N(model, ops));
}
BENCHMARK(BM_AssembleN)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Eigendecompose(benchmark::State& state) {
  const ForwardModel model(setup(static_cast<int>(state.range(0))));
  const SpaceTimeOperator n = assemble_N(model, assemble_operators(model));
  const Symmetrized sym = symmetrize(n);
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(sym.S, n.gram_domain, 1e-8));
}
BENCHMARK(BM_Eigendecompose)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GreenProbe(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const NeumannSolver s({Component{make_curve(CurveSpec::circle(0, 0, 1), m), Side::inside}}, TimeGrid(0.5, m));
  for (auto _ : state) benchmark::DoNotOptimize(green_probe_trace(s, Vec2(0.2, 0.1), 0.25));
}
BENCHMARK(BM_GreenProbe)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
