#include <benchmark/benchmark.h>

#include "flashmp/distributed.hpp"
#include "flashmp/random.hpp"
#include "flashmp/ras.hpp"
#include "flashmp/sparse_operator.hpp"
#include "flashmp/subdomain_solver.hpp"
#include "flashmp/transform.hpp"

namespace {

using namespace flashmp;

void BM_ContractAxis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto axis = static_cast<Axis>(state.range(1));
  const Box box = Box::cube(n);
  const auto ts = TransformSet::for_box(box);
  const auto in = random_values(box.volume(), 1);
  std::vector<double> out(box.volume());
  TransformWorkspace ws;
  ws.reserve(box.volume());
  OpCounter counter;
  for (auto _ : state) {
    contract_axis(axis, ts.axis(axis).U, box, in, out, ws, &counter);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["GFlop/s"] =
      benchmark::Counter(static_cast<double>(counter.gemm_flops), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ContractAxis)->ArgsProduct({{16, 32}, {0, 1, 2}});

void BM_ExactSolve(benchmark::State& state) {
  const Box box = Box::cube(static_cast<int>(state.range(0)));
  const auto data = precompute(OperatorParams(box, 0.25));
  const auto r = random_values(box.dof(), 2);
  std::vector<double> e(box.dof());
  SolverWorkspace ws;
  ws.reserve(data);
  for (auto _ : state) {
    exact_solve(data, r, e, ws);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * box.dof()));
}
BENCHMARK(BM_ExactSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const Box box = Box::cube(static_cast<int>(state.range(0)));
  const auto data = precompute(OperatorParams(box, 0.25));
  const auto r = random_values(box.dof(), 3);
  std::vector<double> e(box.dof());
  SolverWorkspace ws;
  ws.reserve(data);
  for (auto _ : state) {
    solve(data, r, e, ws);
    benchmark::DoNotOptimize(e.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * box.dof()));
}
BENCHMARK(BM_Solve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SparseApply(benchmark::State& state) {
  const Box box = Box::cube(static_cast<int>(state.range(0)));
  const auto a = assemble_sparse(OperatorParams(box, 0.25), true);
  const auto x = random_values(box.dof(), 4);
  std::vector<double> y(box.dof());
  for (auto _ : state) {
    a.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SparseApply)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_RasApply(benchmark::State& state) {
  const int overlap = static_cast<int>(state.range(0));
  const Box global = Box::cube(16);
  const Partition owned(global, {2, 2, 2}, 0);
  SerialTransport transport(owned.size());
  DistributedContext ctx(owned, transport);
  SolverCache cache;
  RasPreconditioner ras(ctx, owned.with_overlap(overlap), 0.25, true, cache);
  const auto r = scatter(owned, random_field(global, 5));
  auto z = ctx.zeros();
  for (auto _ : state) {
    ras.apply(r, z);
    benchmark::DoNotOptimize(z.parts.data());
  }
}
BENCHMARK(BM_RasApply)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
