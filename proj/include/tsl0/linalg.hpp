#ifndef TSL0_LINALG_HPP
#define TSL0_LINALG_HPP

// Minimal self-contained dense linear algebra: matrix multiply, SPD solve via
// Cholesky, right pseudoinverse of wide full-row-rank matrices, and seeded
// Gaussian sampling. No BLAS/LAPACK dependency; Gram matrices in this library
// stay small enough (a few hundred rows in all shipped experiments) that an
// unblocked Cholesky is plenty.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tsl0/errors.hpp"
#include "tsl0/tensor.hpp"

namespace tsl0 {

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows)
        throw dimension_error("matmul: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                              " times " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
    DenseMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

/// Solves g * S = rhs for symmetric positive definite g by Cholesky
/// factorization. A pivot at or below 1e-12 times the largest diagonal entry
/// means the Gram matrix is numerically singular (the dictionary it came from
/// lacks full row rank).
inline DenseMatrix solve_spd(const DenseMatrix& g, const DenseMatrix& rhs) {
    const std::size_t n = g.rows;
    if (g.cols != n) throw dimension_error("solve_spd: matrix must be square");
    if (rhs.rows != n)
        throw dimension_error("solve_spd: rhs has " + std::to_string(rhs.rows) +
                              " rows, expected " + std::to_string(n));

    double max_abs = 0.0, max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diag = std::max(max_diag, std::fabs(g(i, i)));
        for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::fabs(g(i, j)));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(g(i, j) - g(j, i)) > 1e-10 * std::max(1.0, max_abs))
                throw std::invalid_argument("solve_spd: matrix is not symmetric");

    // Lower Cholesky factor, in place.
    DenseMatrix l = g;
    const double pivot_tol = 1e-12 * max_diag;
    for (std::size_t j = 0; j < n; ++j) {
        double d = l(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= pivot_tol)
            throw singular_gram_error("solve_spd: singular Gram matrix (pivot " +
                                      std::to_string(d) + " at row " + std::to_string(j) + ")");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }

    // L z = rhs, then L^T s = z, column by column.
    DenseMatrix s = rhs;
    for (std::size_t c = 0; c < rhs.cols; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = s(i, c);
            for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * s(k, c);
            s(i, c) = v / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double v = s(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * s(k, c);
            s(ii, c) = v / l(ii, ii);
        }
    }
    return s;
}

/// Right pseudoinverse of a wide full-row-rank matrix:
/// pinv = A^T (A A^T)^{-1}, so A * pinv = I.
struct PseudoInverse {
    std::size_t rows = 0;  ///< source matrix row count (m)
    std::size_t cols = 0;  ///< source matrix column count (n)
    DenseMatrix pinv;      ///< n x m
};

inline PseudoInverse right_pinv(const DenseMatrix& a) {
    if (a.rows > a.cols)
        throw dimension_error("right_pinv: matrix must be wide or square (rows <= cols)");
    DenseMatrix gram(a.rows, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = i; j < a.rows; ++j) {
            double s = 0.0;
            const double* ri = a.data.data() + i * a.cols;
            const double* rj = a.data.data() + j * a.cols;
            for (std::size_t k = 0; k < a.cols; ++k) s += ri[k] * rj[k];
            gram(i, j) = s;
            gram(j, i) = s;
        }
    DenseMatrix gram_inv = solve_spd(gram, DenseMatrix::identity(a.rows));
    return PseudoInverse{a.rows, a.cols, matmul(transpose(a), gram_inv)};
}

/// Deterministic random source. mt19937_64 plus an explicit Marsaglia polar
/// transform, so streams are identical across platforms for a given seed
/// (std::normal_distribution is implementation-defined and would not be).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, bound), unbiased via rejection.
    std::size_t uniform_index(std::size_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
        const std::uint64_t b = bound;
        const std::uint64_t limit = UINT64_MAX - ((UINT64_MAX % b + 1) % b);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x > limit);
        return static_cast<std::size_t>(x % b);
    }

    /// One standard normal sample.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// i.i.d. standard normal entries, filled in row-major order.
inline DenseMatrix gaussian_matrix(SeededRng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    for (double& v : m.data) v = rng.gaussian();
    return m;
}

/// i.i.d. standard normal entries, filled in storage order.
inline DenseTensor gaussian_tensor(SeededRng& rng, const Shape& shape) {
    DenseTensor x(shape);
    for (double& v : x.data) v = rng.gaussian();
    return x;
}

}  // namespace tsl0

#endif  // TSL0_LINALG_HPP
