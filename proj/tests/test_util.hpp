#ifndef TSL0_TEST_UTIL_HPP
#define TSL0_TEST_UTIL_HPP

// Shared helpers for the test suites: multi-index arithmetic, random inputs,
// error metrics, and brute-force reference implementations ("oracles") kept
// deliberately independent of the library's production code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "tsl0/linalg.hpp"
#include "tsl0/tensor.hpp"

namespace tsl0::test {

using Index = std::vector<std::size_t>;

// Multi-index of a flat offset under last-index-fastest order.
inline Index unflatten(std::size_t idx, const Shape& shape) {
    Index ix(shape.size());
    for (std::size_t d = shape.size(); d-- > 0;) {
        ix[d] = idx % shape[d];
        idx /= shape[d];
    }
    return ix;
}

inline std::size_t flatten(const Index& ix, const Shape& shape) {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < shape.size(); ++d) idx = idx * shape[d] + ix[d];
    return idx;
}

inline std::size_t total(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

inline DenseTensor random_tensor(SeededRng& rng, const Shape& shape) {
    return gaussian_tensor(rng, shape);
}

inline DenseMatrix random_matrix(SeededRng& rng, std::size_t rows, std::size_t cols) {
    return gaussian_matrix(rng, rows, cols);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double rel_fro_err(const DenseTensor& got, const DenseTensor& want) {
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got.data[i] - want.data[i];
        err += d * d;
        ref += want.data[i] * want.data[i];
    }
    if (ref == 0.0) return std::sqrt(err);
    return std::sqrt(err / ref);
}

// Reference d-mode product straight from the elementwise definition:
// out[j1..i_d..jD] = sum_{j_d} x[j1..j_d..jD] * a(i_d, j_d).
inline DenseTensor mode_product_oracle(const DenseTensor& x, const DenseMatrix& a,
                                       std::size_t mode) {
    Shape out_shape = x.shape;
    out_shape[mode - 1] = a.rows;
    DenseTensor out(out_shape);
    for (std::size_t oi = 0; oi < out.size(); ++oi) {
        Index ix = unflatten(oi, out_shape);
        double s = 0.0;
        for (std::size_t j = 0; j < x.shape[mode - 1]; ++j) {
            Index src = ix;
            src[mode - 1] = j;
            s += x.data[flatten(src, x.shape)] * a(ix[mode - 1], j);
        }
        out.data[oi] = s;
    }
    return out;
}

// Reference multi-mode product as the fully expanded nested sum:
// y[i1..iD] = sum over all (j1..jD) of x[j1..jD] * prod_d a_d(i_d, j_d).
inline DenseTensor multi_mode_oracle(const DenseTensor& x, const std::vector<DenseMatrix>& mats) {
    Shape out_shape(x.order());
    for (std::size_t d = 0; d < mats.size(); ++d) out_shape[d] = mats[d].rows;
    DenseTensor out(out_shape);
    for (std::size_t oi = 0; oi < out.size(); ++oi) {
        const Index iy = unflatten(oi, out_shape);
        double s = 0.0;
        for (std::size_t xi = 0; xi < x.size(); ++xi) {
            const Index jx = unflatten(xi, x.shape);
            double coef = x.data[xi];
            for (std::size_t d = 0; d < mats.size(); ++d) coef *= mats[d](iy[d], jx[d]);
            s += coef;
        }
        out.data[oi] = s;
    }
    return out;
}

// Test-local least squares on a column subset (independent of the library
// solve path): solves the s x s normal equations by Gauss elimination.
inline std::optional<std::vector<double>> subset_least_squares(
    const DenseMatrix& a, const std::vector<double>& y, const std::vector<std::size_t>& cols) {
    const std::size_t s = cols.size();
    std::vector<double> g(s * (s + 1));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < a.rows; ++r) dot += a(r, cols[i]) * a(r, cols[j]);
            g[i * (s + 1) + j] = dot;
        }
        double dot = 0.0;
        for (std::size_t r = 0; r < a.rows; ++r) dot += a(r, cols[i]) * y[r];
        g[i * (s + 1) + s] = dot;
    }
    for (std::size_t p = 0; p < s; ++p) {
        std::size_t piv = p;
        for (std::size_t i = p + 1; i < s; ++i)
            if (std::fabs(g[i * (s + 1) + p]) > std::fabs(g[piv * (s + 1) + p])) piv = i;
        if (std::fabs(g[piv * (s + 1) + p]) < 1e-12) return std::nullopt;
        for (std::size_t c = 0; c <= s; ++c) std::swap(g[p * (s + 1) + c], g[piv * (s + 1) + c]);
        for (std::size_t i = 0; i < s; ++i) {
            if (i == p) continue;
            const double f = g[i * (s + 1) + p] / g[p * (s + 1) + p];
            for (std::size_t c = p; c <= s; ++c) g[i * (s + 1) + c] -= f * g[p * (s + 1) + c];
        }
    }
    std::vector<double> x(s);
    for (std::size_t i = 0; i < s; ++i) x[i] = g[i * (s + 1) + s] / g[i * (s + 1) + i];
    return x;
}

// Smallest support (by exhaustive enumeration, sizes 1..k_max) on which y is
// exactly representable; empty support for y = 0; nullopt when none fits.
inline std::optional<std::vector<std::size_t>> l0_bruteforce(const DenseMatrix& a,
                                                             const std::vector<double>& y,
                                                             std::size_t k_max, double tol) {
    double ynorm = 0.0;
    for (double v : y) ynorm += v * v;
    ynorm = std::sqrt(ynorm);
    if (ynorm <= tol) return std::vector<std::size_t>{};

    for (std::size_t s = 1; s <= k_max; ++s) {
        std::vector<std::size_t> idx(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
        while (true) {
            auto coeffs = subset_least_squares(a, y, idx);
            if (coeffs) {
                std::vector<double> r = y;
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t row = 0; row < a.rows; ++row)
                        r[row] -= (*coeffs)[i] * a(row, idx[i]);
                double rnorm = 0.0;
                for (double v : r) rnorm += v * v;
                if (std::sqrt(rnorm) <= tol * std::max(1.0, ynorm)) return idx;
            }
            std::size_t i = s;
            bool advanced = false;
            while (i-- > 0) {
                if (idx[i] + (s - i) < a.cols) {
                    ++idx[i];
                    for (std::size_t k2 = i + 1; k2 < s; ++k2) idx[k2] = idx[k2 - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
    }
    return std::nullopt;
}

inline std::vector<std::size_t> top_k_support(const DenseTensor& x, std::size_t k) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(x.data[a]) > std::fabs(x.data[b]);
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace tsl0::test

#endif  // TSL0_TEST_UTIL_HPP
