#include <benchmark/benchmark.h>

#include <random>

#include "fhc/chain_sim.hpp"
#include "fhc/covariance.hpp"
#include "fhc/kernels.hpp"
#include "fhc/lattice.hpp"
#include "fhc/rng.hpp"

namespace {

void MicroStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fhc::ModelParams params(n, 1.0, 1.0, 1.0, 1.0);
    auto rng = fhc::make_stream(1, 0);
    auto s = fhc::micro::sample_initial_state(params, fhc::InitialEnsemble::constant(1.0), rng);
    for (auto _ : state) {
        fhc::micro::step_micro(s, params, 0.05, rng);
        benchmark::DoNotOptimize(s.p.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(MicroStep)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void CovarianceRhs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fhc::ModelParams params(n, 1.0, 1.0, 2.0, 1.0);
    fhc::cov::DriftOperator A(params);
    auto S = fhc::cov::CovarianceState::equilibrium(params, 1.0);
    for (auto _ : state) {
        auto rhs = fhc::cov::covariance_rhs(S, params, A);
        benchmark::DoNotOptimize(rhs.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(CovarianceRhs)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void NeumannTransform(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    fhc::lattice::NeumannBasis nb(n);
    Eigen::VectorXd f = Eigen::VectorXd::Random(n + 1);
    for (auto _ : state) {
        auto fhat = nb.forward(f);
        benchmark::DoNotOptimize(fhat.data());
    }
}
BENCHMARK(NeumannTransform)->RangeMultiplier(4)->Range(16, 256);

void KernelG(benchmark::State& state) {
    for (auto _ : state) {
        const double g = fhc::kernels::boundary_kernel_g(0.3, 0.6, 0, 32);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(KernelG);

void KernelQ(benchmark::State& state) {
    for (auto _ : state) {
        const double q = fhc::kernels::jump_kernel_q(0.3, 0.6);
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(KernelQ);

}  // namespace

BENCHMARK_MAIN();
