#include <benchmark/benchmark.h>

#include "algebroid/scenarios.hpp"
#include "algebroid/verifier.hpp"

using namespace algebroid;

namespace {

void BM_ParseAndDiff(benchmark::State& state) {
  for (auto _ : state) {
    const Expr e = parse("exp(x1)*cos(x2) + x1*x2^3 - sqrt(1 + y1^2)/(2 + sin(z))");
    benchmark::DoNotOptimize(diff(e, Variable::x(1)));
  }
}
BENCHMARK(BM_ParseAndDiff);

void BM_HamiltonRhs(benchmark::State& state) {
  const Scenario sc = get_scenario("so3xso3-bicocycle");
  const AlgebroidSpec total = sc.total();
  const EnergyLike H = EnergyLike::parse("y1^2 + y2^2/2 + y3^2/3 + y4^2/4 + y5^2/5 + y6^2/6", 0, 6, false);
  const DynState s{{}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(hamiltonian_rhs(total, H, s));
}
BENCHMARK(BM_HamiltonRhs);

void BM_HerglotzRhs(benchmark::State& state) {
  const System sys = get_scenario("so3-ep-herglotz").system(DynamicsKind::herglotz);
  const DynState s{{}, {1.0, 0.5, -0.3}, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(sys.rhs(s));
}
BENCHMARK(BM_HerglotzRhs);

void BM_VerifyTwoBlock(benchmark::State& state) {
  const BdcpSpec b = get_scenario("so3xso3-bicocycle").as_bdcp();
  const SamplePlan plan = SamplePlan::quasi_random(0);
  for (auto _ : state) benchmark::DoNotOptimize(check_bdcp(b, plan));
}
BENCHMARK(BM_VerifyTwoBlock);

void BM_VerifyTangent(benchmark::State& state) {
  const AlgebroidSpec spec = tangent_algebroid(static_cast<int>(state.range(0)));
  const SamplePlan plan = SamplePlan::quasi_random(spec.base_dim());
  const VerifyOptions opts{1e-9, static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(verify_algebroid(spec, plan, opts));
}
BENCHMARK(BM_VerifyTangent)->Args({4, 1})->Args({4, 4})->Args({8, 1})->Args({8, 4});

void BM_IntegrateRigidBody(benchmark::State& state) {
  const System sys = get_scenario("so3-rigid-body").system(DynamicsKind::hamilton);
  IntegrateOptions opts;
  opts.t1 = 10.0;
  opts.method = state.range(0) == 0 ? Method::rk45 : Method::rk4;
  opts.dt = state.range(0) == 0 ? 1e-2 : 1e-3;
  const DynState s0{{}, {1.0, 0.01, 0.01}, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, s0, opts));
}
BENCHMARK(BM_IntegrateRigidBody)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
