// random.cpp: SplitMix64 stream and seeded model generator

#include "opendecay/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opendecay/errors.hpp"

namespace opendecay::random {

using linalg::ComplexMatrix;

namespace {

ComplexMatrix draw(SplitMix64& rng, std::size_t rows, std::size_t cols)
{
    ComplexMatrix m(rows, cols);
    for (auto& z : m.entries()) z = rng.complex_normal();
    return m;
}

void bound_entries(ComplexMatrix& m)
{
    double largest = 0.0;
    for (const auto& z : m.entries()) largest = std::max(largest, std::abs(z));
    if (largest > 1.0) m *= 1.0 / largest;
}

} // namespace

std::uint64_t SplitMix64::next() noexcept
{
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() noexcept
{
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

linalg::Complex SplitMix64::complex_normal() noexcept
{
    const double re = normal();
    const double im = normal();
    return {re, im};
}

model::SystemSpec random_model(const RandomModelParams& params)
{
    if (params.d_s == 0) throw ValidationError("random model: d_s must be positive");
    const std::size_t rank = params.gamma_rank == 0 ? params.d_s : params.gamma_rank;
    if (rank > params.d_s) throw ValidationError("random model: gamma_rank exceeds d_s");

    SplitMix64 rng(params.seed);
    model::SystemSpec spec;
    spec.d_s = params.d_s;

    const ComplexMatrix x = draw(rng, params.d_s, params.d_s);
    spec.H = linalg::hermitian_part(x);
    bound_entries(spec.H);

    const ComplexMatrix g = draw(rng, rank, params.d_s);
    spec.Gamma = linalg::hermitian_part(linalg::adjoint(g) * g);
    bound_entries(spec.Gamma);

    for (std::size_t j = 0; j < params.n_lindblad; ++j) {
        ComplexMatrix a = draw(rng, params.d_s, params.d_s);
        bound_entries(a);
        spec.lindblad.push_back(std::move(a));
    }

    spec.d_f = params.d_f != 0 ? params.d_f : std::max<std::size_t>(1, model::decompose_gamma(spec.Gamma).rank);
    return spec;
}

} // namespace opendecay::random
