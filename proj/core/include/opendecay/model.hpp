// model.hpp: Physical system description, decay-matrix factorization and the
// enlarged (system + decay products) operator set.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opendecay/linalg.hpp"

namespace opendecay::model {

using linalg::ComplexMatrix;

// Unstable system: effective Hamiltonian H - (i/2) Gamma plus Lindblad operators
// acting on a d_s-dimensional space, and a d_f-dimensional space of decay states.
struct SystemSpec {
    std::size_t d_s = 0;
    std::size_t d_f = 0;
    ComplexMatrix H;
    ComplexMatrix Gamma;
    std::vector<ComplexMatrix> lindblad;

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// Gamma = sum_j gammas[j] |phi_j><phi_j| over the strictly positive part of
// the spectrum. `phis` is d_s x rank with orthonormal columns.
struct GammaDecomposition {
    std::vector<double> gammas; // descending, all > 0
    ComplexMatrix phis;
    std::size_t rank = 0;
    std::size_t n0 = 0; // multiplicity of the zero eigenvalue
};

// B : H_s -> H_f with B^dagger B = Gamma, written in the {f_k} x {phi_j} basis
// as b_coeffs (d_f x rank).
struct DecayOperator {
    ComplexMatrix B;
    ComplexMatrix b_coeffs;
};

struct EnlargedModel {
    std::size_t d_s = 0;
    std::size_t d_f = 0;
    std::size_t d_tot = 0;
    ComplexMatrix calH;                  // diag(H, 0)
    std::vector<ComplexMatrix> calA;     // diag(A_j, 0)
    ComplexMatrix calB;                  // [[0, 0], [B, 0]]
};

// Generator acting on column-stacked density matrices: d vec(rho)/dt = L vec(rho).
struct Liouvillian {
    ComplexMatrix L; // d^2 x d^2
    std::size_t d = 0;
};

inline constexpr double kSpecTolerance = 1e-10;
inline constexpr double kZeroEigenvalueTolerance = 1e-12;

/// Checks every structural and physical constraint on `spec` and returns it
/// unchanged. Hermiticity of H and Gamma is measured relative to
/// max(1, ||.||_F); Gamma may not have an eigenvalue below -tol * max(1, ||Gamma||_F).
/// d_f must be at least rank(Gamma).
///
/// Throws DimensionError, NotHermitianError, NotPSDError or NumericalError.
const SystemSpec& validate_spec(const SystemSpec& spec, double tol = kSpecTolerance);

/// Spectral factorization of the decay matrix. Eigenvalues at or below
/// zero_tol * max(1, ||Gamma||_F) count toward n0; the rest are returned in
/// descending order (ties ordered lexicographically by phase-fixed eigenvector).
GammaDecomposition decompose_gamma(const ComplexMatrix& gamma,
                                   double zero_tol = kZeroEigenvalueTolerance);

/// Decay operator B. Without `custom` the canonical choice b_kj = sqrt(gamma_j) delta_kj
/// is used (zero rows appended when d_f > rank). A custom d_f x rank matrix
/// must satisfy sum_k conj(b_ki) b_kj = delta_ij gamma_j within 1e-8 * max(1, max gamma).
DecayOperator build_B(const GammaDecomposition& dec, std::size_t d_f,
                      const std::optional<ComplexMatrix>& custom = std::nullopt);

EnlargedModel embed_operators(const SystemSpec& spec, const DecayOperator& decay);

// H - (i/2) Gamma
ComplexMatrix effective_hamiltonian(const SystemSpec& spec);

/// Generator of d rho/dt = -i[H, rho] - sum_K D_K[rho] for the jump operators
/// `jumps`, in the column-stacking convention:
///   L = -i (I (x) H - H^T (x) I) + sum_K [conj(K) (x) K - 1/2 I (x) K^dag K - 1/2 (K^dag K)^T (x) I]
Liouvillian lindblad_generator(const ComplexMatrix& hamiltonian,
                               const std::vector<ComplexMatrix>& jumps);

Liouvillian assemble_liouvillian(const ComplexMatrix& calH, const std::vector<ComplexMatrix>& calA,
                                 const ComplexMatrix& calB);
Liouvillian assemble_liouvillian(const EnlargedModel& model);

// Generator of the non-hermitian master equation on H_s:
//   -i (I (x) H_eff) + i (conj(H_eff) (x) I) + Lindblad terms of A_j.
Liouvillian assemble_liouvillian_wwa(const SystemSpec& spec);

} // namespace opendecay::model
