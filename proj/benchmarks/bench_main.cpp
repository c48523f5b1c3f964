#include <benchmark/benchmark.h>

#include "conedet/detformula.hpp"
#include "conedet/geometry.hpp"
#include "conedet/moduli.hpp"
#include "conedet/spectral.hpp"

using namespace conedet;

namespace {

const PeriodRatio kSigma(cplx(0.1, 1.2));
const ModulusPoint kT(cplx(0.3, 0.4));

void BM_Theta(benchmark::State& state) {
    const ThetaCharacteristic ch(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(theta(ch, cplx(0.2, 0.1), kSigma));
}
BENCHMARK(BM_Theta);

void BM_ThetaNullwertNearAxis(benchmark::State& state) {
    const PeriodRatio s(cplx(0.37, 0.01));
    const ThetaCharacteristic ch(0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(theta(ch, 0.0, s));
}
BENCHMARK(BM_ThetaNullwertNearAxis);

void BM_Eta(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(log_dedekind_eta(kSigma));
}
BENCHMARK(BM_Eta);

void BM_SigmaFromT(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sigma_from_t(kT));
}
BENCHMARK(BM_SigmaFromT);

void BM_DetValue(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(det_value(kT));
}
BENCHMARK(BM_DetValue);

void BM_SchifferB0(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(schiffer_b0(kT));
}
BENCHMARK(BM_SchifferB0);

void BM_ConformalField(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PeriodRatio s = reduce_to_fundamental_domain(sigma_from_t(kT));
    for (auto _ : state) benchmark::DoNotOptimize(conformal_factor_on_torus(s, kT, {n, n}));
}
BENCHMARK(BM_ConformalField)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LowestEigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PeriodRatio s = reduce_to_fundamental_domain(sigma_from_t(kT));
    const OperatorPair op = assemble(s, kT, {n, n});
    for (auto _ : state) benchmark::DoNotOptimize(lowest_eigenvalues(op, 30));
}
BENCHMARK(BM_LowestEigenvalues)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
