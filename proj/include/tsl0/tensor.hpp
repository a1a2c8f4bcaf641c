#ifndef TSL0_TENSOR_HPP
#define TSL0_TENSOR_HPP

// Dense D-dimensional tensors and the multilinear operations built on them:
// mode-d matricization/folding, d-mode products, vectorization and Kronecker
// products.
//
// Storage convention (used everywhere in this library): entries are laid out
// lexicographically with the LAST index varying fastest. Under this order
//   vec(X x_1 A1 x_2 A2 ... x_D AD) = (A1 (x) A2 (x) ... (x) AD) vec(X),
// i.e. the Kronecker factors appear in mode order.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsl0/errors.hpp"

namespace tsl0 {

using Shape = std::vector<std::size_t>;

/// Largest matrix (in elements) that kronecker/kron_chain will materialize
/// unless the caller overrides the cap. Flattened multi-mode dictionaries grow
/// exponentially with the tensor order, so refusing early beats an OOM kill.
inline constexpr std::size_t kDefaultElementCap = 100'000'000;

namespace detail {

inline std::string shape_to_string(const Shape& shape) {
    std::string s;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) s += 'x';
        s += std::to_string(shape[i]);
    }
    return s;
}

inline std::size_t checked_element_count(const Shape& shape, const char* what) {
    if (shape.empty())
        throw dimension_error(std::string(what) + ": tensor order must be at least 1");
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0)
            throw dimension_error(std::string(what) + ": every extent must be positive, got shape " +
                                  shape_to_string(shape));
        if (n > static_cast<std::size_t>(-1) / e)
            throw dimension_error(std::string(what) + ": element count overflows for shape " +
                                  shape_to_string(shape));
        n *= e;
    }
    return n;
}

inline std::string u128_to_string(unsigned __int128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

}  // namespace detail

/// Dense D-dimensional real tensor. `data[()]` holds prod(shape) scalars,
/// last index fastest.
struct DenseTensor {
    Shape shape;
    std::vector<double> data;

    DenseTensor() = default;

    explicit DenseTensor(Shape s)
        : shape(std::move(s)), data(detail::checked_element_count(shape, "DenseTensor"), 0.0) {}

    DenseTensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (detail::checked_element_count(shape, "DenseTensor") != data.size())
            throw dimension_error("DenseTensor: data length " + std::to_string(data.size()) +
                                  " does not match shape " + detail::shape_to_string(shape));
    }

    std::size_t order() const { return shape.size(); }
    std::size_t size() const { return data.size(); }

    double operator[](std::size_t i) const { return data[i]; }
    double& operator[](std::size_t i) { return data[i]; }
};

/// Dense row-major matrix.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;

    DenseMatrix(std::size_t r, std::size_t c)
        : rows(r), cols(c), data(detail::checked_element_count({r, c}, "DenseMatrix"), 0.0) {}

    DenseMatrix(std::size_t r, std::size_t c, std::vector<double> d)
        : rows(r), cols(c), data(std::move(d)) {
        if (detail::checked_element_count({r, c}, "DenseMatrix") != data.size())
            throw dimension_error("DenseMatrix: data length " + std::to_string(data.size()) +
                                  " does not match " + std::to_string(r) + "x" + std::to_string(c));
    }

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

namespace detail {

// Splits a shape around 1-based mode d into (lead, n_d, trail) where lead is
// the product of the extents before d and trail the product after. With
// last-index-fastest storage the flat offset of (p, j, s) is (p*n_d + j)*trail + s.
struct ModeSplit {
    std::size_t lead;
    std::size_t n;
    std::size_t trail;
};

inline ModeSplit mode_split(const Shape& shape, std::size_t mode, const char* what) {
    if (mode < 1 || mode > shape.size())
        throw dimension_error(std::string(what) + ": mode " + std::to_string(mode) +
                              " out of range 1.." + std::to_string(shape.size()));
    ModeSplit ms{1, shape[mode - 1], 1};
    for (std::size_t k = 0; k + 1 < mode; ++k) ms.lead *= shape[k];
    for (std::size_t k = mode; k < shape.size(); ++k) ms.trail *= shape[k];
    return ms;
}

}  // namespace detail

/// Mode-d matricization: rows indexed by j_d, columns lexicographic over the
/// remaining indices (last fastest).
inline DenseMatrix mode_matricize(const DenseTensor& x, std::size_t mode) {
    const auto ms = detail::mode_split(x.shape, mode, "mode_matricize");
    DenseMatrix m(ms.n, ms.lead * ms.trail);
    for (std::size_t p = 0; p < ms.lead; ++p)
        for (std::size_t j = 0; j < ms.n; ++j) {
            const double* src = x.data.data() + (p * ms.n + j) * ms.trail;
            double* dst = m.data.data() + j * m.cols + p * ms.trail;
            for (std::size_t s = 0; s < ms.trail; ++s) dst[s] = src[s];
        }
    return m;
}

/// Inverse of mode_matricize for the given target shape.
inline DenseTensor mode_fold(const DenseMatrix& m, std::size_t mode, const Shape& shape) {
    const auto ms = detail::mode_split(shape, mode, "mode_fold");
    if (m.rows != ms.n || m.cols != ms.lead * ms.trail)
        throw dimension_error("mode_fold: matrix " + std::to_string(m.rows) + "x" +
                              std::to_string(m.cols) + " does not match mode " +
                              std::to_string(mode) + " of shape " +
                              detail::shape_to_string(shape));
    DenseTensor x(shape);
    for (std::size_t p = 0; p < ms.lead; ++p)
        for (std::size_t j = 0; j < ms.n; ++j) {
            const double* src = m.data.data() + j * m.cols + p * ms.trail;
            double* dst = x.data.data() + (p * ms.n + j) * ms.trail;
            for (std::size_t s = 0; s < ms.trail; ++s) dst[s] = src[s];
        }
    return x;
}

/// d-mode product x x_d a: contracts index d of x with the columns of a.
/// Equivalent to folding a * mode_matricize(x, d) back along mode d.
inline DenseTensor mode_product(const DenseTensor& x, const DenseMatrix& a, std::size_t mode) {
    const auto ms = detail::mode_split(x.shape, mode, "mode_product");
    if (a.cols != ms.n)
        throw dimension_error("mode_product: matrix has " + std::to_string(a.cols) +
                              " columns but mode " + std::to_string(mode) + " extent is " +
                              std::to_string(ms.n));
    Shape out_shape = x.shape;
    out_shape[mode - 1] = a.rows;
    DenseTensor out(out_shape);
    // out[(p*R + i)*trail + s] = sum_j a(i,j) * x[(p*n + j)*trail + s]
    for (std::size_t p = 0; p < ms.lead; ++p)
        for (std::size_t j = 0; j < ms.n; ++j) {
            const double* src = x.data.data() + (p * ms.n + j) * ms.trail;
            for (std::size_t i = 0; i < a.rows; ++i) {
                const double coef = a(i, j);
                if (coef == 0.0) continue;
                double* dst = out.data.data() + (p * a.rows + i) * ms.trail;
                for (std::size_t s = 0; s < ms.trail; ++s) dst[s] += coef * src[s];
            }
        }
    return out;
}

/// Applies one matrix per mode: x x_1 mats[0] x_2 mats[1] ... x_D mats[D-1].
/// The per-mode products commute, so the application order is immaterial.
inline DenseTensor multi_mode_product(const DenseTensor& x, const std::vector<DenseMatrix>& mats) {
    if (mats.size() != x.order())
        throw dimension_error("multi_mode_product: got " + std::to_string(mats.size()) +
                              " matrices for a tensor of order " + std::to_string(x.order()));
    for (std::size_t d = 0; d < mats.size(); ++d)
        if (mats[d].cols != x.shape[d])
            throw dimension_error("multi_mode_product: mode " + std::to_string(d + 1) +
                                  " expects " + std::to_string(x.shape[d]) + " columns, matrix has " +
                                  std::to_string(mats[d].cols));
    DenseTensor out = x;
    for (std::size_t d = 0; d < mats.size(); ++d) out = mode_product(out, mats[d], d + 1);
    return out;
}

/// Entries in storage order (last index fastest).
inline std::vector<double> vectorize(const DenseTensor& x) { return x.data; }

inline DenseTensor tensorize(std::vector<double> v, const Shape& shape) {
    return DenseTensor(shape, std::move(v));
}

/// Same data, new extents; element counts must agree.
inline DenseTensor reshape(const DenseTensor& x, const Shape& shape) {
    if (detail::checked_element_count(shape, "reshape") != x.size())
        throw dimension_error("reshape: shape " + detail::shape_to_string(shape) +
                              " does not hold " + std::to_string(x.size()) + " elements");
    return DenseTensor(shape, x.data);
}

namespace detail {

inline void enforce_element_cap(unsigned __int128 rows, unsigned __int128 cols, std::size_t cap,
                                const char* what) {
    const unsigned __int128 elems = rows * cols;
    if (elems > cap)
        throw element_cap_error(std::string(what) + ": refusing to materialize " +
                                    u128_to_string(rows) + "x" + u128_to_string(cols) + " (" +
                                    u128_to_string(elems) + " elements, cap " +
                                    std::to_string(cap) + ")",
                                u128_to_string(elems));
}

}  // namespace detail

/// Kronecker product a (x) b.
inline DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b,
                             std::size_t cap = kDefaultElementCap) {
    detail::enforce_element_cap(static_cast<unsigned __int128>(a.rows) * b.rows,
                                static_cast<unsigned __int128>(a.cols) * b.cols, cap, "kronecker");
    DenseMatrix out(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t i1 = 0; i1 < a.rows; ++i1)
        for (std::size_t j1 = 0; j1 < a.cols; ++j1) {
            const double v = a(i1, j1);
            if (v == 0.0) continue;
            for (std::size_t i2 = 0; i2 < b.rows; ++i2) {
                double* dst = out.data.data() + (i1 * b.rows + i2) * out.cols + j1 * b.cols;
                const double* src = b.data.data() + i2 * b.cols;
                for (std::size_t j2 = 0; j2 < b.cols; ++j2) dst[j2] = v * src[j2];
            }
        }
    return out;
}

/// Left fold of kronecker over the list: mats[0] (x) mats[1] (x) ...
/// The final size is cap-checked before any intermediate is built.
inline DenseMatrix kron_chain(const std::vector<DenseMatrix>& mats,
                              std::size_t cap = kDefaultElementCap) {
    if (mats.empty()) throw dimension_error("kron_chain: empty matrix list");
    unsigned __int128 rows = 1, cols = 1;
    for (const auto& m : mats) {
        rows *= m.rows;
        cols *= m.cols;
    }
    detail::enforce_element_cap(rows, cols, cap, "kron_chain");
    DenseMatrix out = mats.front();
    for (std::size_t i = 1; i < mats.size(); ++i) out = kronecker(out, mats[i], cap);
    return out;
}

inline double frobenius_norm_sq(const DenseTensor& x) {
    double s = 0.0;
    for (double v : x.data) s += v * v;
    return s;
}

inline double frobenius_norm_sq(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

inline double abs_max(const DenseTensor& x) {
    double m = 0.0;
    for (double v : x.data) m = std::max(m, std::fabs(v));
    return m;
}

/// Number of entries with |value| > tol.
inline std::size_t count_nonzero(const DenseTensor& x, double tol = 0.0) {
    if (tol < 0.0) throw std::invalid_argument("count_nonzero: tol must be nonnegative");
    std::size_t n = 0;
    for (double v : x.data) n += std::fabs(v) > tol ? 1 : 0;
    return n;
}

}  // namespace tsl0

#endif  // TSL0_TENSOR_HPP
