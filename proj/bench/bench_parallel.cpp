// Serial reference vs OpenMP paths for the three data-parallel loops.
// Argument 0 runs the serial path, 1 the parallel one.

#include "ssvep/adtrca.hpp"
#include "ssvep/eval.hpp"
#include "ssvep/recognizer.hpp"
#include "ssvep/synth.hpp"

#include <benchmark/benchmark.h>

using namespace ssvep;

namespace {

Execution policy(const benchmark::State& state)
{
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

const Dataset& dataset()
{
    static const Dataset ds = [] {
        SynthConfig c;
        c.n_channels = 8;
        c.n_blocks = 5;
        c.duration_s = 2.0;
        c.snr_db = -8.0;
        c.noise = StructuredNoise::pink;
        return generate(c);
    }();
    return ds;
}

const Dataset& windows()
{
    static const Dataset ds = extract_windows(dataset(), 1.0);
    return ds;
}

void BM_AdTrcaFit(benchmark::State& state)
{
    const Execution exec = policy(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(adtrca_fit(windows(), {}, exec));
}

void BM_ClassifyAll(benchmark::State& state)
{
    const Execution exec = policy(state);
    const RecognizerConfig config;
    const FittedModel model = fit_model(windows(), Method::adtrca_ensemble, config);
    ModelInfo info;
    info.method = Method::adtrca_ensemble;
    info.fs = windows().sampling_rate_hz();
    info.frequencies_hz = windows().stimulus_frequencies_hz();
    info.channel_names = windows().channel_names();
    info.window_s = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(classify_all(model, info, windows().trials(), exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows().trials().size()));
}

void BM_RunBenchmark(benchmark::State& state)
{
    const std::vector<Method> methods{Method::cca, Method::trca, Method::adtrca};
    const std::vector<double> tw{0.5, 1.0};
    const std::vector<ChannelSet> sets{{"all", {}}};
    const std::vector<int> n_train{4};
    BenchConfig config;
    config.exec = policy(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_benchmark(dataset(), methods, tw, sets, n_train, config));
}

} // namespace

BENCHMARK(BM_AdTrcaFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ClassifyAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunBenchmark)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
