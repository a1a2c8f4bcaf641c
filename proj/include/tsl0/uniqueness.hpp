#ifndef TSL0_UNIQUENESS_HPP
#define TSL0_UNIQUENESS_HPP

// Uniqueness-condition analysis for multi-mode sparse recovery: mutual
// coherence, brute-force spark, the coherence-based spark lower bound, and
// the sparsity checks they imply for a set of per-mode dictionaries.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tsl0/errors.hpp"
#include "tsl0/tensor.hpp"

namespace tsl0 {

/// Default column cap for spark_bruteforce; subset enumeration is exponential.
inline constexpr std::size_t kDefaultSparkColumnCap = 20;

/// Mutual coherence: max over column pairs of |<a_i, a_j>| / (||a_i|| ||a_j||).
inline double coherence(const DenseMatrix& a) {
    if (a.cols < 2) throw std::invalid_argument("coherence: need at least 2 columns");
    std::vector<double> norms(a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) norms[j] += a(i, j) * a(i, j);
    for (std::size_t j = 0; j < a.cols; ++j) {
        if (norms[j] == 0.0)
            throw std::invalid_argument("coherence: column " + std::to_string(j + 1) +
                                        " is zero, coherence undefined");
        norms[j] = std::sqrt(norms[j]);
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < a.cols; ++i)
        for (std::size_t j = i + 1; j < a.cols; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < a.rows; ++r) dot += a(r, i) * a(r, j);
            mu = std::max(mu, std::fabs(dot) / (norms[i] * norms[j]));
        }
    return std::min(mu, 1.0);
}

namespace detail {

// Rank of the column subset via Gaussian elimination with partial pivoting.
// `tol` is the absolute pivot threshold.
inline std::size_t subset_rank(const DenseMatrix& a, const std::vector<std::size_t>& cols,
                               double tol) {
    const std::size_t m = a.rows, s = cols.size();
    std::vector<double> w(m * s);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < s; ++j) w[i * s + j] = a(i, cols[j]);

    std::size_t rank = 0;
    for (std::size_t j = 0; j < s && rank < m; ++j) {
        std::size_t piv = rank;
        double best = std::fabs(w[rank * s + j]);
        for (std::size_t i = rank + 1; i < m; ++i) {
            const double v = std::fabs(w[i * s + j]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= tol) continue;
        if (piv != rank)
            for (std::size_t k = 0; k < s; ++k) std::swap(w[piv * s + k], w[rank * s + k]);
        const double p = w[rank * s + j];
        for (std::size_t i = rank + 1; i < m; ++i) {
            const double f = w[i * s + j] / p;
            if (f == 0.0) continue;
            for (std::size_t k = j; k < s; ++k) w[i * s + k] -= f * w[rank * s + k];
        }
        ++rank;
    }
    return rank;
}

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t s = idx.size();
    std::size_t i = s;
    while (i-- > 0) {
        if (idx[i] + (s - i) < n) {
            ++idx[i];
            for (std::size_t k = i + 1; k < s; ++k) idx[k] = idx[k - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Spark: the smallest number of linearly dependent columns, found by
/// exhaustive subset enumeration. Dependence is rank < subset size under a
/// pivot tolerance of 1e-10 * max|entry|. Returns cols+1 when every subset is
/// independent (possible only for matrices with at least as many rows as
/// columns). Throws when the matrix has more than `max_cols` columns.
inline std::size_t spark_bruteforce(const DenseMatrix& a,
                                    std::size_t max_cols = kDefaultSparkColumnCap) {
    if (a.cols > max_cols)
        throw std::invalid_argument("spark_bruteforce: " + std::to_string(a.cols) +
                                    " columns exceed enumeration cap " + std::to_string(max_cols));
    double max_abs = 0.0;
    for (double v : a.data) max_abs = std::max(max_abs, std::fabs(v));
    const double tol = 1e-10 * max_abs;

    for (std::size_t s = 1; s <= a.cols; ++s) {
        if (s > a.rows) return s;  // any subset larger than the row count is dependent
        std::vector<std::size_t> idx(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
        do {
            if (detail::subset_rank(a, idx, tol) < s) return s;
        } while (detail::next_combination(idx, a.cols));
    }
    return a.cols + 1;  // full column rank
}

/// Coherence-based spark lower bound 1 + 1/mu. Infinite (unbounded) for
/// orthogonal columns, where mu = 0.
inline double spark_coherence_bound(const DenseMatrix& a) {
    const double mu = coherence(a);
    if (mu == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 + 1.0 / mu;
}

/// Coherence of the flattened Kronecker dictionary: the max over the per-mode
/// coherences. Equals coherence(kron_chain(dicts)) without materializing it.
inline double kron_coherence(const std::vector<DenseMatrix>& dicts) {
    if (dicts.empty()) throw std::invalid_argument("kron_coherence: empty dictionary list");
    double mu = 0.0;
    for (const auto& a : dicts) mu = std::max(mu, coherence(a));
    return mu;
}

/// Upper bound on the spark of the flattened Kronecker dictionary: the min
/// over the per-mode sparks.
inline std::size_t kron_spark_bound(const std::vector<DenseMatrix>& dicts,
                                    std::size_t max_cols = kDefaultSparkColumnCap) {
    if (dicts.empty()) throw std::invalid_argument("kron_spark_bound: empty dictionary list");
    std::size_t s = std::numeric_limits<std::size_t>::max();
    for (const auto& a : dicts) s = std::min(s, spark_bruteforce(a, max_cols));
    return s;
}

/// Outcome of the three sparsity criteria for a candidate nonzero count k.
struct UniquenessVerdict {
    std::size_t k = 0;

    /// Coherence criterion (strict): k < (1 + 1/max_d mu(A_d)) / 2.
    /// Infinite when every per-mode coherence is zero.
    double coherence_bound = 0.0;
    bool passes_coherence = false;

    /// Spark criterion (non-strict): 2k <= min_d Spark(A_d). Absent when any
    /// dictionary exceeds the brute-force column cap.
    std::optional<std::size_t> min_spark;
    std::optional<bool> passes_spark;

    /// Random-dictionary sparsity boundary (non-strict): k <= (1/2)^D * prod_d
    /// Spark(A_d), with Spark(A_d) replaced by the row count M_d when sparks
    /// were not computed. An empirical bound for randomly placed supports, not
    /// a reconstruction guarantee.
    double eq31_bound = 0.0;
    bool eq31_uses_row_counts = false;
    bool passes_eq31 = false;
};

inline UniquenessVerdict uniqueness_check(std::size_t k, const std::vector<DenseMatrix>& dicts,
                                          std::size_t max_cols = kDefaultSparkColumnCap) {
    if (dicts.empty()) throw std::invalid_argument("uniqueness_check: empty dictionary list");
    UniquenessVerdict v;
    v.k = k;

    const double mu = kron_coherence(dicts);
    v.coherence_bound =
        mu == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 * (1.0 + 1.0 / mu);
    v.passes_coherence = static_cast<double>(k) < v.coherence_bound;

    bool sparks_computable = true;
    for (const auto& a : dicts) sparks_computable = sparks_computable && a.cols <= max_cols;

    double eq31 = 1.0;
    if (sparks_computable) {
        std::size_t min_spark = std::numeric_limits<std::size_t>::max();
        for (const auto& a : dicts) {
            const std::size_t s = spark_bruteforce(a, max_cols);
            min_spark = std::min(min_spark, s);
            eq31 *= 0.5 * static_cast<double>(s);
        }
        v.min_spark = min_spark;
        v.passes_spark = 2 * k <= min_spark;
    } else {
        for (const auto& a : dicts) eq31 *= 0.5 * static_cast<double>(a.rows);
        v.eq31_uses_row_counts = true;
    }
    v.eq31_bound = eq31;
    v.passes_eq31 = static_cast<double>(k) <= eq31;
    return v;
}

}  // namespace tsl0

#endif  // TSL0_UNIQUENESS_HPP
