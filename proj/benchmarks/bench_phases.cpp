#include "geophase/classical_phase.hpp"
#include "geophase/dynamics_oracle.hpp"
#include "geophase/quantum_phase.hpp"

#include <benchmark/benchmark.h>

using namespace geophase;

namespace {

NoiseRealization realization(int k_max) {
    NoiseStatistics s;
    s.k_max = k_max;
    s.sigma = 0.5;
    s.seed = 7;
    return sample_noise(s);
}

void BM_PhaseExact(benchmark::State& state) {
    const auto n = realization(4);
    const auto intervals = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(phase_exact(1.0, 0.05, n, intervals));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhaseExact)->RangeMultiplier(4)->Range(256, 16384);

void BM_PhasePerturbative(benchmark::State& state) {
    const auto n = realization(4);
    const auto intervals = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(phase_perturbative_phi(1.0, 0.05, n, intervals).total());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PhasePerturbative)->RangeMultiplier(4)->Range(256, 16384);

void BM_EnsembleAverage(benchmark::State& state) {
    NoiseStatistics s;
    s.seed = 3;
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ensemble_average(kPi / 4, 0.05, s, n, {1, 1024}).mean_phase);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnsembleAverage)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TrackedEigenstate(benchmark::State& state) {
    const double l = static_cast<double>(state.range(0));
    const auto sys = angular_momentum_system(l, l - 1, Direction(1.0, 0.3), 1.0);
    const auto h = build_hamiltonian(sys, 0.5);
    const auto ref = reference_state(sys);
    for (auto _ : state) benchmark::DoNotOptimize(tracked_eigenstate(h, ref).energy);
}
BENCHMARK(BM_TrackedEigenstate)->Arg(2)->Arg(10)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_PrecessingStep(benchmark::State& state) {
    const double l = static_cast<double>(state.range(0));
    const auto sys = angular_momentum_system(l, l - 1, Direction(1.0, 0.0), 10.0);
    const PrecessingPath path(build_hamiltonian(sys, 0.5).matrix(), composite_jz(sys.l()[2]), 1e-3);
    CVector psi = reference_state(sys).amplitudes();
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(path.step(psi, t, 0.1));
        t += 0.1;
    }
}
BENCHMARK(BM_PrecessingStep)->Arg(1)->Arg(10)->Arg(40);

void BM_SpinHalfStep(benchmark::State& state) {
    const SpinHalfFieldPath path([](double t) { return Vec3(std::sin(1.0) * std::cos(t), std::sin(1.0) * std::sin(t), std::cos(1.0)); },
                                 1.0);
    CVector psi = spin_up(Direction(1.0, 0.0));
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(path.step(psi, t, 0.1));
        t += 0.1;
    }
}
BENCHMARK(BM_SpinHalfStep);

}  // namespace
BENCHMARK_MAIN();
