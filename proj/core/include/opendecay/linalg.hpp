// linalg.hpp: Dense complex matrices and the handful of factorizations the
// simulator needs (Hermitian eigensolver, matrix exponential, Kronecker/vec).

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace opendecay::linalg {

using Complex = std::complex<double>;

// Row-major dense complex matrix. Zero-sized extents are allowed so that
// rank-0 factors (e.g. an empty eigenvector block) have a representation.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const Complex> values);
    static ComplexMatrix diagonal(std::initializer_list<Complex> values);
    // Column vector (n x 1).
    static ComplexMatrix column(std::span<const Complex> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<Complex> entries() noexcept { return data_; }
    std::span<const Complex> entries() const noexcept { return data_; }

    // Copy of the sub-block starting at (row, col).
    ComplexMatrix block(std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) const;
    // Overwrite the sub-block starting at (row, col) with `src`.
    void set_block(std::size_t row, std::size_t col, const ComplexMatrix& src);

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(Complex s) noexcept;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix m);
ComplexMatrix operator*(Complex s, ComplexMatrix m);
ComplexMatrix operator*(ComplexMatrix m, Complex s);
// Matrix product; throws DimensionError when inner extents differ.
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix transpose(const ComplexMatrix& m);
ComplexMatrix conjugate(const ComplexMatrix& m);

Complex trace(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
// Max absolute row sum.
double inf_norm(const ComplexMatrix& m);
// ||m - m^dagger||_F.
double hermiticity_defect(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m) noexcept;
// Throws NumericalError naming `what` when any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);
// (m + m^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// (A (x) B)[(i*p + k), (j*q + l)] = A[i][j] * B[k][l], B of shape p x q.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Column-stacking vectorization: vec([[a,b],[c,d]]) = (a,c,b,d)^T.
ComplexMatrix vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexMatrix& v, std::size_t rows, std::size_t cols);

// Solve A X = B by LU with partial pivoting. Throws NumericalError if A is singular.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
    std::vector<double> eigenvalues; // ascending
    ComplexMatrix eigenvectors;      // orthonormal columns
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input must satisfy ||M - M^dagger||_F <= tol * ||M||_F, otherwise
/// NotHermitianError is thrown; the Hermitian part of M is what gets
/// diagonalized. Eigenvalues come out ascending. Each eigenvector is
/// phase-fixed so that its largest-magnitude component (first one on ties)
/// is real and positive.
HermitianEigen hermitian_eig(const ComplexMatrix& m, double tol = 1e-10);

/// Smallest eigenvalue of a Hermitian matrix (tolerance 1e-10 as above).
double min_eigenvalue_hermitian(const ComplexMatrix& m);

/// Matrix exponential: diagonal Pade(6,6) approximant with scaling and
/// squaring. The squaring count s is the smallest with ||M||_inf / 2^s <= 0.5.
ComplexMatrix expm(const ComplexMatrix& m);

} // namespace opendecay::linalg
