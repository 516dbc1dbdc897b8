#include <benchmark/benchmark.h>

#include "siadmm/moments.hpp"
#include "siadmm/si_admm.hpp"
#include "siadmm/synthetic.hpp"

using namespace siadmm;

namespace {

GaussianRegressionSampler centered(long n) {
  return {cholesky_lower(kms_covariance(n, 5.0)), Vec::Zero(n), 0.0, false};
}

void BM_FourthMomentSerial(benchmark::State& st) {
  const long n = st.range(0);
  const auto sm = centered(n);
  const Mat S = kms_covariance(n, 5.0);
  McOptions o;
  o.samples = 20000;
  for (auto _ : st) benchmark::DoNotOptimize(mc_fourth_moment_serial(sm, S, o).mean.sum());
  st.SetItemsProcessed(st.iterations() * o.samples);
}

void BM_FourthMomentParallel(benchmark::State& st) {
  const long n = st.range(0);
  const auto sm = centered(n);
  const Mat S = kms_covariance(n, 5.0);
  McOptions o;
  o.samples = 20000;
  for (auto _ : st) benchmark::DoNotOptimize(mc_fourth_moment(sm, S, o).mean.sum());
  st.SetItemsProcessed(st.iterations() * o.samples);
}

void BM_LassoOuterStep(benchmark::State& st) {
  Stream gen(1);
  const auto inst = gen_lasso(LassoParams{}, gen);
  const auto prob = lasso_problem(inst);
  AlgorithmConfig cfg;
  cfg.rho = 20.0;
  const auto consts = derive_constants(prob, cfg);
  const SiAdmmStepper stepper(prob, cfg, consts);
  SampleStreams ss{Stream(2), Stream(3)};
  Iterate u = Iterate::zeros(10, 10, 10);
  const long T = st.range(0);
  for (auto _ : st) {
    u = stepper.step_exact_y(u, T, ss);
    benchmark::DoNotOptimize(u.x.sum());
  }
  st.SetItemsProcessed(st.iterations() * (T - 1));
}

}  // namespace

BENCHMARK(BM_FourthMomentSerial)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_FourthMomentParallel)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(BM_LassoOuterStep)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
