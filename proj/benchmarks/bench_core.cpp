#include <benchmark/benchmark.h>

#include "agdo/operators.hpp"
#include "support.hpp"

using namespace agdo;

namespace {

void BM_ThetaGenusOne(benchmark::State& state)
{
    const PeriodMatrix b = PeriodMatrix::genus_one({-4.0, 0.5});
    const CVector z = CVector::Constant(1, {0.7, 1.3});
    for (auto _ : state) benchmark::DoNotOptimize(theta_eval(b, z));
}
BENCHMARK(BM_ThetaGenusOne);

void BM_ThetaGenusTwo(benchmark::State& state)
{
    std::mt19937_64 rng(1);
    const PeriodMatrix b = testing::random_period_matrix(rng, 2);
    const CVector z = testing::random_vector(rng, 2, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(theta_eval(b, z));
}
BENCHMARK(BM_ThetaGenusTwo);

void BM_PrepareAndPsi(benchmark::State& state)
{
    const SpectralData sd = testing::random_spectral_data(Model::cross, 1);
    const SurfacePoint p = sample_probes(sd, 1, 1)[0];
    for (auto _ : state) benchmark::DoNotOptimize(psi(sd, SiteCross{2, -1}, p));
}
BENCHMARK(BM_PrepareAndPsi);

void BM_HexCoefficients(benchmark::State& state)
{
    const SpectralData sd = testing::random_spectral_data(Model::hex, 2);
    int k = 0;
    for (auto _ : state) {
        const SiteHex s{k % 3, 0, -(k % 3)};
        benchmark::DoNotOptimize(hex_coefficients(sd, s));
        ++k;
    }
}
BENCHMARK(BM_HexCoefficients);

void BM_NullspaceOracle(benchmark::State& state)
{
    const SpectralData sd = testing::random_spectral_data(Model::cross, 3);
    const auto probes = sample_probes(sd, static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(nullspace_oracle(sd, SiteCross{0, 0}, probes));
}
BENCHMARK(BM_NullspaceOracle)->Arg(8)->Arg(20)->Arg(50);

} // namespace

BENCHMARK_MAIN();
