// model.cpp: System validation, decay factorization, enlarged operators, Liouvillians

#include "opendecay/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "opendecay/errors.hpp"

namespace opendecay::model {

using linalg::Complex;

namespace {

constexpr Complex kI{0.0, 1.0};

std::string dims(const ComplexMatrix& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const ComplexMatrix& m, std::size_t rows, std::size_t cols, const std::string& what)
{
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError(what + " has shape " + dims(m) + ", expected " + std::to_string(rows) +
                             "x" + std::to_string(cols));
    }
}

void require_hermitian(const ComplexMatrix& m, double tol, const std::string& what)
{
    const double defect = linalg::hermiticity_defect(m);
    if (defect > tol * std::max(1.0, linalg::frobenius_norm(m))) {
        throw NotHermitianError(what + " is not hermitian (||M - M^dagger||_F = " +
                                std::to_string(defect) + ")");
    }
}

// Lexicographic "greater" on columns, so that ties list e_1 before e_2.
bool column_lex_greater(const ComplexMatrix& v, std::size_t a, std::size_t b)
{
    for (std::size_t i = 0; i < v.rows(); ++i) {
        if (v(i, a).real() != v(i, b).real()) return v(i, a).real() > v(i, b).real();
        if (v(i, a).imag() != v(i, b).imag()) return v(i, a).imag() > v(i, b).imag();
    }
    return false;
}

void add_jump_terms(ComplexMatrix& L, const ComplexMatrix& k, const ComplexMatrix& id)
{
    const ComplexMatrix kdk = linalg::adjoint(k) * k;
    L += linalg::kron(linalg::conjugate(k), k);
    L -= 0.5 * linalg::kron(id, kdk);
    L -= 0.5 * linalg::kron(linalg::transpose(kdk), id);
}

} // namespace

const SystemSpec& validate_spec(const SystemSpec& spec, double tol)
{
    if (spec.d_s == 0) throw DimensionError("d_s must be positive");
    if (spec.d_f == 0) throw DimensionError("d_f must be positive");
    require_shape(spec.H, spec.d_s, spec.d_s, "H");
    require_shape(spec.Gamma, spec.d_s, spec.d_s, "Gamma");
    for (std::size_t j = 0; j < spec.lindblad.size(); ++j) {
        const std::string name = "A[" + std::to_string(j) + "]";
        require_shape(spec.lindblad[j], spec.d_s, spec.d_s, name);
        linalg::require_finite(spec.lindblad[j], name.c_str());
    }
    linalg::require_finite(spec.H, "H");
    linalg::require_finite(spec.Gamma, "Gamma");
    require_hermitian(spec.H, tol, "H");
    require_hermitian(spec.Gamma, tol, "Gamma");

    const double scale = std::max(1.0, linalg::frobenius_norm(spec.Gamma));
    const double lowest = linalg::min_eigenvalue_hermitian(linalg::hermitian_part(spec.Gamma));
    if (lowest < -tol * scale) {
        throw NotPSDError("Gamma is not positive semidefinite (smallest eigenvalue " +
                          std::to_string(lowest) + ")");
    }

    const auto dec = decompose_gamma(spec.Gamma);
    if (spec.d_f < dec.rank) {
        throw DimensionError("decay space too small: need dim H_f >= r, got d_f = " +
                             std::to_string(spec.d_f) + " < r = " + std::to_string(dec.rank));
    }
    return spec;
}

GammaDecomposition decompose_gamma(const ComplexMatrix& gamma, double zero_tol)
{
    if (!gamma.is_square()) throw DimensionError("Gamma has shape " + dims(gamma) + ", expected square");
    linalg::require_finite(gamma, "Gamma");
    require_hermitian(gamma, kSpecTolerance, "Gamma");

    const double scale = std::max(1.0, linalg::frobenius_norm(gamma));
    const auto eig = linalg::hermitian_eig(linalg::hermitian_part(gamma), kSpecTolerance);
    const std::size_t n = gamma.rows();
    if (n > 0 && eig.eigenvalues.front() < -kSpecTolerance * scale) {
        throw NotPSDError("Gamma is not positive semidefinite (smallest eigenvalue " +
                          std::to_string(eig.eigenvalues.front()) + ")");
    }

    std::vector<std::size_t> positive;
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.eigenvalues[k] > zero_tol * scale) positive.push_back(k);
    }
    // Descending by eigenvalue; near-equal eigenvalues fall back to eigenvector order.
    const double tie = 1e-12 * scale;
    std::sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
        const double ga = eig.eigenvalues[a];
        const double gb = eig.eigenvalues[b];
        if (std::abs(ga - gb) > tie) return ga > gb;
        return column_lex_greater(eig.eigenvectors, a, b);
    });

    GammaDecomposition dec;
    dec.rank = positive.size();
    dec.n0 = n - dec.rank;
    dec.phis = ComplexMatrix(n, dec.rank);
    for (std::size_t j = 0; j < dec.rank; ++j) {
        dec.gammas.push_back(eig.eigenvalues[positive[j]]);
        for (std::size_t i = 0; i < n; ++i) dec.phis(i, j) = eig.eigenvectors(i, positive[j]);
    }
    return dec;
}

DecayOperator build_B(const GammaDecomposition& dec, std::size_t d_f,
                      const std::optional<ComplexMatrix>& custom)
{
    if (d_f < dec.rank) {
        throw DimensionError("decay space too small: need dim H_f >= r, got d_f = " +
                             std::to_string(d_f) + " < r = " + std::to_string(dec.rank));
    }
    DecayOperator out;
    if (custom) {
        require_shape(*custom, d_f, dec.rank, "b_coeffs");
        linalg::require_finite(*custom, "b_coeffs");
        std::vector<Complex> target(dec.gammas.begin(), dec.gammas.end());
        const ComplexMatrix gram = linalg::adjoint(*custom) * *custom;
        const double residual = linalg::frobenius_norm(gram - ComplexMatrix::diagonal(target));
        const double largest = dec.gammas.empty() ? 0.0 : dec.gammas.front();
        if (residual > 1e-8 * std::max(1.0, largest)) {
            throw ConstraintError("b_coeffs violate sum_k conj(b_ki) b_kj = delta_ij gamma_j (residual " +
                                  std::to_string(residual) + ")");
        }
        out.b_coeffs = *custom;
    } else {
        out.b_coeffs = ComplexMatrix(d_f, dec.rank);
        for (std::size_t j = 0; j < dec.rank; ++j) out.b_coeffs(j, j) = std::sqrt(dec.gammas[j]);
    }
    // B = sum_kj b_kj |f_k><phi_j|
    out.B = dec.rank == 0 ? ComplexMatrix(d_f, dec.phis.rows())
                          : out.b_coeffs * linalg::adjoint(dec.phis);
    return out;
}

EnlargedModel embed_operators(const SystemSpec& spec, const DecayOperator& decay)
{
    require_shape(spec.H, spec.d_s, spec.d_s, "H");
    require_shape(decay.B, spec.d_f, spec.d_s, "B");

    EnlargedModel m;
    m.d_s = spec.d_s;
    m.d_f = spec.d_f;
    m.d_tot = spec.d_s + spec.d_f;
    m.calH = ComplexMatrix(m.d_tot, m.d_tot);
    m.calH.set_block(0, 0, spec.H);
    for (const auto& a : spec.lindblad) {
        require_shape(a, spec.d_s, spec.d_s, "Lindblad operator");
        ComplexMatrix embedded(m.d_tot, m.d_tot);
        embedded.set_block(0, 0, a);
        m.calA.push_back(std::move(embedded));
    }
    m.calB = ComplexMatrix(m.d_tot, m.d_tot);
    m.calB.set_block(m.d_s, 0, decay.B);
    return m;
}

ComplexMatrix effective_hamiltonian(const SystemSpec& spec)
{
    return spec.H - (0.5 * kI) * spec.Gamma;
}

Liouvillian lindblad_generator(const ComplexMatrix& hamiltonian, const std::vector<ComplexMatrix>& jumps)
{
    if (!hamiltonian.is_square()) {
        throw DimensionError("Hamiltonian has shape " + dims(hamiltonian) + ", expected square");
    }
    const std::size_t d = hamiltonian.rows();
    const ComplexMatrix id = ComplexMatrix::identity(d);

    Liouvillian out;
    out.d = d;
    out.L = -kI * (linalg::kron(id, hamiltonian) - linalg::kron(linalg::transpose(hamiltonian), id));
    for (const auto& k : jumps) {
        require_shape(k, d, d, "jump operator");
        add_jump_terms(out.L, k, id);
    }
    return out;
}

Liouvillian assemble_liouvillian(const ComplexMatrix& calH, const std::vector<ComplexMatrix>& calA,
                                 const ComplexMatrix& calB)
{
    std::vector<ComplexMatrix> jumps = calA;
    jumps.push_back(calB);
    return lindblad_generator(calH, jumps);
}

Liouvillian assemble_liouvillian(const EnlargedModel& model)
{
    return assemble_liouvillian(model.calH, model.calA, model.calB);
}

Liouvillian assemble_liouvillian_wwa(const SystemSpec& spec)
{
    require_shape(spec.H, spec.d_s, spec.d_s, "H");
    require_shape(spec.Gamma, spec.d_s, spec.d_s, "Gamma");
    const ComplexMatrix heff = effective_hamiltonian(spec);
    const ComplexMatrix id = ComplexMatrix::identity(spec.d_s);

    Liouvillian out;
    out.d = spec.d_s;
    out.L = -kI * linalg::kron(id, heff) + kI * linalg::kron(linalg::conjugate(heff), id);
    for (const auto& a : spec.lindblad) {
        require_shape(a, spec.d_s, spec.d_s, "Lindblad operator");
        add_jump_terms(out.L, a, id);
    }
    return out;
}

} // namespace opendecay::model
