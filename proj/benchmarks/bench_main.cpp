#include <benchmark/benchmark.h>

#include "linrule/bounds.hpp"
#include "linrule/risk.hpp"
#include "linrule/rules.hpp"
#include "linrule/sampler.hpp"
#include "linrule/spectra.hpp"

namespace {

using namespace linrule;

void BM_EffectiveSpectrum(benchmark::State& state) {
    const Spectrum base = capacity_spectrum(static_cast<std::size_t>(state.range(0)), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(effective_spectrum(base, {1.0, 1.0}));
}
BENCHMARK(BM_EffectiveSpectrum)->Arg(1000)->Arg(100000);

void BM_NoiselessSandwich(benchmark::State& state) {
    const Spectrum s = capacity_spectrum(static_cast<std::size_t>(state.range(0)), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(noiseless_sandwich(s, 50));
}
BENCHMARK(BM_NoiselessSandwich)->Arg(1000)->Arg(100000);

void BM_SampleGaussian(benchmark::State& state) {
    const auto law = CovariateLaw::gaussian(capacity_spectrum(static_cast<std::size_t>(state.range(0)), 1.0));
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_covariates(law, 50, SeedSpec{1, k++}));
}
BENCHMARK(BM_SampleGaussian)->Arg(200)->Arg(2000);

// One matrix-form replicate, dual (d > n) and primal (d <= n) paths.
void BM_MatrixFormReplicate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const Spectrum s = capacity_spectrum(d, 1.0);
    const Eigen::MatrixXd Z = sample_covariates(CovariateLaw::gaussian(s), n, SeedSpec{7, 0});
    for (auto _ : state) benchmark::DoNotOptimize(matrix_form_value(s, Z, 0.5));
}
BENCHMARK(BM_MatrixFormReplicate)->Args({200, 50})->Args({2000, 80})->Args({50, 200});

void BM_ProjectionReplicate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Spectrum s = capacity_spectrum(d, 2.0);
    const Eigen::MatrixXd Z = sample_covariates(CovariateLaw::gaussian(s), 50, SeedSpec{7, 0});
    for (auto _ : state) benchmark::DoNotOptimize(projection_value(s, Z));
}
BENCHMARK(BM_ProjectionReplicate)->Arg(200)->Arg(2000);

void BM_FitAndWeigh(benchmark::State& state) {
    const auto kind = static_cast<int>(state.range(0));
    const Spectrum s = capacity_spectrum(200, 1.0);
    const auto law = CovariateLaw::gaussian(s);
    const Eigen::MatrixXd X = sample_covariates(law, 50, SeedSpec{3, 0});
    const Eigen::MatrixXd T = sample_covariates(law, 64, SeedSpec{3, 1});
    RuleSpec rule;
    switch (kind) {
    case 0: rule = RuleSpec::parse("ridge:lambda=0.01"); break;
    case 1: rule = RuleSpec::parse("minnorm"); break;
    case 2: rule = RuleSpec::parse("gf:t=100"); break;
    default: rule = RuleSpec::parse("nw:h=2"); break;
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit(rule, X).weights_batch(T));
}
BENCHMARK(BM_FitAndWeigh)->DenseRange(0, 3);

}  // namespace

BENCHMARK_MAIN();
