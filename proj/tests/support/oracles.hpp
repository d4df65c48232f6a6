// oracles.hpp: Independent reference computations for the test suites.
//
// Nothing here calls into the library's factorizations or superoperator
// builders; only ComplexMatrix storage is shared.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "opendecay/linalg.hpp"
#include "opendecay/random.hpp"

namespace oracle {

using opendecay::linalg::Complex;
using opendecay::linalg::ComplexMatrix;

inline ComplexMatrix naive_mul(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Complex s{};
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    }
    return out;
}

inline ComplexMatrix naive_add(const ComplexMatrix& a, const ComplexMatrix& b, Complex beta = 1.0)
{
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + beta * b(i, j);
    }
    return out;
}

inline ComplexMatrix naive_dagger(const ComplexMatrix& a)
{
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    }
    return out;
}

inline double naive_fro(const ComplexMatrix& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
    }
    return std::sqrt(s);
}

inline double fro_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return naive_fro(naive_add(a, b, -1.0));
}

// exp(M) by the truncated Taylor series sum_{k<terms} M^k / k!.
inline ComplexMatrix taylor_expm(const ComplexMatrix& m, int terms = 20)
{
    const std::size_t n = m.rows();
    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k < terms; ++k) {
        term = naive_mul(term, m);
        for (auto& x : term.entries()) x /= static_cast<double>(k);
        sum = naive_add(sum, term);
    }
    return sum;
}

// exp(M) = (exp(M / 2^s))^(2^s) with a long Taylor series at the bottom,
// for norms where a plain series would lose accuracy.
inline ComplexMatrix scaled_taylor_expm(const ComplexMatrix& m, int squarings = 10, int terms = 30)
{
    ComplexMatrix scaled = m;
    for (auto& x : scaled.entries()) x = std::ldexp(1.0, -squarings) * x;
    ComplexMatrix r = taylor_expm(scaled, terms);
    for (int i = 0; i < squarings; ++i) r = naive_mul(r, r);
    return r;
}

// Lindblad right-hand side written entry by entry:
// drho_ij = -i sum_k (H_ik rho_kj - rho_ik H_kj)
//           + sum_K sum_kl [ K_ik rho_kl conj(K_jl) - 1/2 (KdK_ik rho_kj + rho_ik KdK_kj) ]
inline ComplexMatrix entrywise_lindblad(const ComplexMatrix& rho, const ComplexMatrix& h,
                                        const std::vector<ComplexMatrix>& jumps)
{
    const std::size_t d = rho.rows();
    const Complex I{0.0, 1.0};
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            Complex v{};
            for (std::size_t k = 0; k < d; ++k) v += -I * (h(i, k) * rho(k, j) - rho(i, k) * h(k, j));
            out(i, j) = v;
        }
    }
    for (const auto& k : jumps) {
        const ComplexMatrix kdk = naive_mul(naive_dagger(k), k);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                Complex v{};
                for (std::size_t a = 0; a < d; ++a) {
                    for (std::size_t b = 0; b < d; ++b) v += k(i, a) * rho(a, b) * std::conj(k(j, b));
                    v -= 0.5 * (kdk(i, a) * rho(a, j) + rho(i, a) * kdk(a, j));
                }
                out(i, j) += v;
            }
        }
    }
    return out;
}

inline ComplexMatrix random_matrix(opendecay::random::SplitMix64& rng, std::size_t rows, std::size_t cols,
                                   double scale = 1.0)
{
    ComplexMatrix m(rows, cols);
    for (auto& z : m.entries()) z = Complex{scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0)};
    return m;
}

inline ComplexMatrix random_hermitian(opendecay::random::SplitMix64& rng, std::size_t n)
{
    ComplexMatrix m = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) m(j, i) = std::conj(m(i, j));
    }
    return m;
}

// Random density matrix X X^dag / Tr(X X^dag).
inline ComplexMatrix random_density(opendecay::random::SplitMix64& rng, std::size_t n)
{
    const ComplexMatrix x = random_matrix(rng, n, n);
    ComplexMatrix rho = naive_mul(x, naive_dagger(x));
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += rho(i, i).real();
    for (auto& z : rho.entries()) z /= tr;
    return rho;
}

// Random unitary via Gram-Schmidt on a random square matrix.
inline ComplexMatrix random_unitary(opendecay::random::SplitMix64& rng, std::size_t n)
{
    ComplexMatrix q = random_matrix(rng, n, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            Complex dot{};
            for (std::size_t r = 0; r < n; ++r) dot += std::conj(q(r, p)) * q(r, c);
            for (std::size_t r = 0; r < n; ++r) q(r, c) -= dot * q(r, p);
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) norm += std::norm(q(r, c));
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < n; ++r) q(r, c) /= norm;
    }
    return q;
}

} // namespace oracle
