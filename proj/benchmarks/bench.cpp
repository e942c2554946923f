#include <benchmark/benchmark.h>

#include "mmfp/flow.hpp"
#include "mmfp/lie.hpp"
#include "mmfp/metrics.hpp"
#include "mmfp/mlp.hpp"
#include "mmfp/rng.hpp"

namespace {

using namespace mmfp;

void bm_mlp_forward(benchmark::State& state) {
    Mlp net(MlpSpec{static_cast<int>(state.range(0)), {128, 128}, 3});
    Rng rng(1);
    net.init(rng);
    std::vector<double> x = rng.normal_vec(net.spec().in_dim);
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(bm_mlp_forward)->Arg(7)->Arg(402)->Arg(2880);

void bm_mlp_backward(benchmark::State& state) {
    Mlp net(MlpSpec{static_cast<int>(state.range(0)), {128, 128}, 3});
    Rng rng(1);
    net.init(rng);
    std::vector<double> x = rng.normal_vec(net.spec().in_dim);
    std::vector<double> dout(3, 1.0);
    std::vector<double> grad(net.params().size(), 0.0);
    for (auto _ : state) {
        Mlp::Tape tape;
        auto y = net.forward(x, tape);
        benchmark::DoNotOptimize(y);
        benchmark::DoNotOptimize(net.backward(tape, dout, grad));
    }
}
BENCHMARK(bm_mlp_backward)->Arg(7)->Arg(402)->Arg(2880);

void bm_so3_exp_log(benchmark::State& state) {
    Rng rng(2);
    Vec3 w = {rng.normal(), rng.normal(), rng.normal()};
    for (auto _ : state) {
        Mat3 r = so3_exp(w);
        benchmark::DoNotOptimize(so3_log(r));
    }
}
BENCHMARK(bm_so3_exp_log);

void bm_mmd_sq(benchmark::State& state) {
    Rng rng(3);
    const int n = static_cast<int>(state.range(0));
    std::vector<std::vector<double>> a, b;
    for (int i = 0; i < n; ++i) {
        a.push_back(rng.normal_vec(128));
        b.push_back(rng.normal_vec(128));
    }
    KernelSpec k{1.0};
    for (auto _ : state) benchmark::DoNotOptimize(mmd_sq(a, b, k));
}
BENCHMARK(bm_mmd_sq)->Arg(20)->Arg(100);

void bm_sample_latent(benchmark::State& state) {
    Mlp field(MlpSpec{1 + 3 + 3, {128, 128}, 3});
    Rng rng(4);
    field.init(rng);
    std::vector<double> tau = rng.normal_vec(3);
    SamplerConfig cfg;
    cfg.steps = static_cast<int>(state.range(0));
    std::vector<double> z0 = rng.normal_vec(3);
    for (auto _ : state) benchmark::DoNotOptimize(sample_latent(field, tau, cfg, z0));
}
BENCHMARK(bm_sample_latent)->Arg(100)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
