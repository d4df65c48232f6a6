#include <benchmark/benchmark.h>

#include "opendecay/evolution.hpp"
#include "opendecay/linalg.hpp"
#include "opendecay/model.hpp"
#include "opendecay/random.hpp"

using namespace opendecay;
using linalg::ComplexMatrix;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::uint64_t seed)
{
    random::SplitMix64 rng(seed);
    ComplexMatrix m(n, n);
    for (auto& z : m.entries()) z = rng.complex_normal();
    return m;
}

model::EnlargedModel random_enlarged(std::size_t d_s, std::uint64_t seed)
{
    random::RandomModelParams p;
    p.seed = seed;
    p.d_s = d_s;
    p.n_lindblad = 2;
    const auto spec = random::random_model(p);
    return model::embed_operators(spec, model::build_B(model::decompose_gamma(spec.Gamma), spec.d_f));
}

void BM_HermitianEig(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const ComplexMatrix m = linalg::hermitian_part(random_matrix(n, 1));
    for (auto _ : state) benchmark::DoNotOptimize(linalg::hermitian_eig(m));
}
BENCHMARK(BM_HermitianEig)->Arg(2)->Arg(6)->Arg(16)->Arg(36);

void BM_Expm(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const ComplexMatrix m = random_matrix(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(linalg::expm(m));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(36);

void BM_AssembleLiouvillian(benchmark::State& state)
{
    const auto model = random_enlarged(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(model::assemble_liouvillian(model));
}
BENCHMARK(BM_AssembleLiouvillian)->Arg(1)->Arg(2)->Arg(3);

void BM_Rk4Enlarged(benchmark::State& state)
{
    const auto model = random_enlarged(static_cast<std::size_t>(state.range(0)), 4);
    const ComplexMatrix rho0 = evolution::embed_system_state(ComplexMatrix::diagonal(
                                                                 std::vector<linalg::Complex>(model.d_s, 1.0 / static_cast<double>(model.d_s))),
                                                             model.d_f);
    evolution::IntegratorConfig cfg;
    cfg.t_max = 1.0;
    cfg.dt = 1e-3;
    cfg.sample_stride = 100;
    for (auto _ : state) benchmark::DoNotOptimize(evolution::evolve_enlarged(model, rho0, cfg));
}
BENCHMARK(BM_Rk4Enlarged)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExactEnlarged(benchmark::State& state)
{
    const auto model = random_enlarged(static_cast<std::size_t>(state.range(0)), 5);
    const ComplexMatrix rho0 = evolution::embed_system_state(ComplexMatrix::diagonal(
                                                                 std::vector<linalg::Complex>(model.d_s, 1.0 / static_cast<double>(model.d_s))),
                                                             model.d_f);
    evolution::IntegratorConfig cfg;
    cfg.t_max = 1.0;
    cfg.dt = 1e-3;
    cfg.sample_stride = 100;
    cfg.method = evolution::Method::exact;
    for (auto _ : state) benchmark::DoNotOptimize(evolution::evolve_enlarged(model, rho0, cfg));
}
BENCHMARK(BM_ExactEnlarged)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
