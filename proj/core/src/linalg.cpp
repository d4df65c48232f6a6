// linalg.cpp: Dense complex matrix kernels

#include "opendecay/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "opendecay/errors.hpp"

namespace opendecay::linalg {

namespace {

std::string shape(const ComplexMatrix& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
    }
}

void require_square(const ComplexMatrix& m, const char* op)
{
    if (!m.is_square()) {
        throw DimensionError(std::string(op) + ": expected a square matrix, got " + shape(m));
    }
}

double offdiag_norm(const ComplexMatrix& a)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += std::norm(a(i, j));
        }
    }
    return std::sqrt(sum);
}

// Rotate columns p,q of `m` by the 2x2 unitary [[jpp, jpq], [jqp, jqq]].
void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q,
                    Complex jpp, Complex jpq, Complex jqp, Complex jqq)
{
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const Complex mkp = m(k, p);
        const Complex mkq = m(k, q);
        m(k, p) = mkp * jpp + mkq * jqp;
        m(k, q) = mkp * jpq + mkq * jqq;
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0})
{
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("ComplexMatrix: " + std::to_string(data_.size()) +
                             " entries supplied for shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size())
{
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw DimensionError("ComplexMatrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> values)
{
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<Complex> values)
{
    return diagonal(std::span<const Complex>(values.begin(), values.size()));
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> values)
{
    return ComplexMatrix(values.size(), 1, std::vector<Complex>(values.begin(), values.end()));
}

ComplexMatrix ComplexMatrix::block(std::size_t row, std::size_t col, std::size_t rows,
                                   std::size_t cols) const
{
    if (row + rows > rows_ || col + cols > cols_) {
        throw DimensionError("block: window exceeds matrix of shape " + shape(*this));
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(row + i, col + j);
    }
    return out;
}

void ComplexMatrix::set_block(std::size_t row, std::size_t col, const ComplexMatrix& src)
{
    if (row + src.rows() > rows_ || col + src.cols() > cols_) {
        throw DimensionError("set_block: " + shape(src) + " block does not fit into " + shape(*this));
    }
    for (std::size_t i = 0; i < src.rows(); ++i) {
        for (std::size_t j = 0; j < src.cols(); ++j) (*this)(row + i, col + j) = src(i, j);
    }
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs)
{
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs)
{
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) noexcept
{
    for (auto& x : data_) x *= s;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator-(ComplexMatrix m) { return m *= -1.0; }
ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions differ (" + shape(a) + " * " + shape(b) + ")");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b; }

ComplexMatrix adjoint(const ComplexMatrix& m)
{
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    }
    return out;
}

ComplexMatrix transpose(const ComplexMatrix& m)
{
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    }
    return out;
}

ComplexMatrix conjugate(const ComplexMatrix& m)
{
    ComplexMatrix out = m;
    for (auto& x : out.entries()) x = std::conj(x);
    return out;
}

Complex trace(const ComplexMatrix& m)
{
    require_square(m, "trace");
    Complex t{};
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

double frobenius_norm(const ComplexMatrix& m)
{
    double sum = 0.0;
    for (const auto& x : m.entries()) sum += std::norm(x);
    return std::sqrt(sum);
}

double inf_norm(const ComplexMatrix& m)
{
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

double hermiticity_defect(const ComplexMatrix& m)
{
    require_square(m, "hermiticity_defect");
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) sum += std::norm(m(i, j) - std::conj(m(j, i)));
    }
    return std::sqrt(sum);
}

bool all_finite(const ComplexMatrix& m) noexcept
{
    return std::all_of(m.entries().begin(), m.entries().end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

void require_finite(const ComplexMatrix& m, const char* what)
{
    if (!all_finite(m)) throw NumericalError(std::string(what) + ": non-finite entry");
}

ComplexMatrix hermitian_part(const ComplexMatrix& m)
{
    require_square(m, "hermitian_part");
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const std::size_t p = b.rows();
    const std::size_t q = b.cols();
    ComplexMatrix out(a.rows() * p, a.cols() * q);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t k = 0; k < p; ++k) {
                for (std::size_t l = 0; l < q; ++l) out(i * p + k, j * q + l) = aij * b(k, l);
            }
        }
    }
    return out;
}

ComplexMatrix vec(const ComplexMatrix& m)
{
    ComplexMatrix v(m.size(), 1);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) v(j * m.rows() + i, 0) = m(i, j);
    }
    return v;
}

ComplexMatrix unvec(const ComplexMatrix& v, std::size_t rows, std::size_t cols)
{
    if (v.size() != rows * cols || (v.cols() != 1 && v.rows() != 1)) {
        throw DimensionError("unvec: vector of shape " + shape(v) + " cannot be reshaped to " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    ComplexMatrix m(rows, cols);
    const auto flat = v.entries();
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = flat[j * rows + i];
    }
    return m;
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_square(a, "solve");
    if (a.rows() != b.rows()) {
        throw DimensionError("solve: right-hand side " + shape(b) + " incompatible with " + shape(a));
    }
    const std::size_t n = a.rows();
    ComplexMatrix lu = a;
    ComplexMatrix x = b;
    const double scale = std::max(inf_norm(a), 1e-300);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                pivot = i;
            }
        }
        if (best <= 1e-300 * scale || best == 0.0) throw NumericalError("solve: singular matrix");
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
            for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(pivot, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = lu(i, k) / lu(k, k);
            if (f == Complex{}) continue;
            lu(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            Complex s = x(kk, j);
            for (std::size_t c = kk + 1; c < n; ++c) s -= lu(kk, c) * x(c, j);
            x(kk, j) = s / lu(kk, kk);
        }
    }
    return x;
}

HermitianEigen hermitian_eig(const ComplexMatrix& m, double tol)
{
    require_square(m, "hermitian_eig");
    require_finite(m, "hermitian_eig");
    const double norm = frobenius_norm(m);
    const double defect = hermiticity_defect(m);
    if (defect > tol * norm) {
        throw NotHermitianError("hermitian_eig: ||M - M^dagger||_F = " + std::to_string(defect) +
                                " exceeds tolerance");
    }

    const std::size_t n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

    constexpr int kMaxSweeps = 100;
    const double target = 1e-14 * norm;
    for (int sweep = 0; sweep < kMaxSweeps && norm > 0.0; ++sweep) {
        if (offdiag_norm(a) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double mag = std::abs(b);
                if (mag == 0.0) continue;
                const Complex phase = b / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // J = [[c, s e], [-s conj(e), c]];  A <- J^dagger A J,  V <- V J
                const Complex jpp = c;
                const Complex jpq = s * phase;
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c;
                rotate_columns(a, p, q, jpp, jpq, jqp, jqq);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                rotate_columns(v, p, q, jpp, jpq, jqp, jqq);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    HermitianEigen out;
    out.eigenvalues.reserve(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.eigenvalues.push_back(a(src, src).real());
        std::size_t lead = 0;
        double lead_mag = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > lead_mag) {
                lead_mag = std::abs(v(i, src));
                lead = i;
            }
        }
        const Complex fix = lead_mag > 0.0 ? std::conj(v(lead, src)) / lead_mag : Complex{1.0};
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, src) * fix;
        out.eigenvectors(lead, k) = std::abs(out.eigenvectors(lead, k));
    }
    return out;
}

double min_eigenvalue_hermitian(const ComplexMatrix& m)
{
    const auto eig = hermitian_eig(m, 1e-10);
    return eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
}

ComplexMatrix expm(const ComplexMatrix& m)
{
    require_square(m, "expm");
    require_finite(m, "expm");
    const std::size_t n = m.rows();
    if (n == 0) return m;

    const double norm = inf_norm(m);
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const ComplexMatrix x = std::ldexp(1.0, -squarings) * m;

    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!), q = 6
    constexpr int q = 6;
    std::array<double, q + 1> c{};
    c[0] = 1.0;
    for (int k = 1; k <= q; ++k) c[k] = c[k - 1] * (q - k + 1) / (k * (2.0 * q - k + 1));

    const ComplexMatrix id = ComplexMatrix::identity(n);
    const ComplexMatrix x2 = x * x;
    const ComplexMatrix x4 = x2 * x2;
    const ComplexMatrix x6 = x4 * x2;
    const ComplexMatrix odd = x * (c[1] * id + c[3] * x2 + c[5] * x4);
    const ComplexMatrix even = c[0] * id + c[2] * x2 + c[4] * x4 + c[6] * x6;

    ComplexMatrix result = solve(even - odd, even + odd);
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

} // namespace opendecay::linalg
