// random.hpp: Portable seeded generator and the random-model recipe.
//
// The stream is SplitMix64 with its reference constants, so a given seed
// produces the same models on any platform:
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Uniforms use the top 53 bits; normals use the cosine branch of Box-Muller
// (two uniforms per normal).

#pragma once

#include <cstddef>
#include <cstdint>

#include "opendecay/linalg.hpp"
#include "opendecay/model.hpp"

namespace opendecay::random {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept;
    // [0, 1)
    double uniform() noexcept;
    // N(0, 1)
    double normal() noexcept;
    // re, im independent N(0, 1), drawn in that order
    linalg::Complex complex_normal() noexcept;

private:
    std::uint64_t state_;
};

struct RandomModelParams {
    std::uint64_t seed = 0;
    std::size_t d_s = 2;
    std::size_t n_lindblad = 1;
    std::size_t gamma_rank = 0; // 0 means full rank (d_s)
    std::size_t d_f = 0;        // 0 means d_f = rank of Gamma

    friend bool operator==(const RandomModelParams&, const RandomModelParams&) = default;
};

/// Draw order (all entries row-major, re before im):
///   X (d_s x d_s)            -> H = (X + X^dag) / 2
///   G (gamma_rank x d_s)     -> Gamma = G^dag G
///   A_j (d_s x d_s), j = 1..n_lindblad
/// Each of H, Gamma and A_j is then divided by its largest entry modulus when
/// that exceeds 1, so all entries are bounded by 1. Gamma is PSD by construction.
model::SystemSpec random_model(const RandomModelParams& params);

} // namespace opendecay::random
