#ifndef TSL0_SOLVER_HPP
#define TSL0_SOLVER_HPP

// Smoothed-l0 recovery of sparse tensors from multi-mode compressed
// measurements y = x x_1 A1 ... x_D AD with wide dictionaries A_d.
//
// The zero norm is replaced by the Gaussian surrogate
//   F_sigma(x) = prod(N_d) - sum exp(-x_i^2 / (2 sigma^2)),
// minimized by steepest descent over a geometrically decreasing sigma
// schedule; every inner step is pulled back onto the measurement constraint
// through cached right pseudoinverses (always in the noiseless variant, only
// on budget violation in the noisy one).

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsl0/errors.hpp"
#include "tsl0/linalg.hpp"
#include "tsl0/tensor.hpp"

namespace tsl0 {

/// The D dictionary matrices of a multi-mode measurement, with their right
/// pseudoinverses cached at construction. Square (invertible) dictionaries are
/// accepted alongside wide ones so that degenerate modes, such as a trailing
/// 1x1 identity, can express lower-dimensional problems.
struct DictionarySet {
    std::vector<DenseMatrix> dicts;
    std::vector<DenseMatrix> pinvs;  ///< pinvs[d] is N_d x M_d, dicts[d] * pinvs[d] = I

    explicit DictionarySet(std::vector<DenseMatrix> ds) : dicts(std::move(ds)) {
        if (dicts.empty()) throw dimension_error("DictionarySet: need at least one dictionary");
        pinvs.reserve(dicts.size());
        for (const auto& a : dicts) {
            if (a.rows > a.cols)
                throw dimension_error("DictionarySet: dictionary is tall (" +
                                      std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                      "), rows must not exceed columns");
            pinvs.push_back(right_pinv(a).pinv);
        }
    }

    /// Pre-factored variant: callers supply pseudoinverses they already know
    /// (e.g. the Kronecker product of per-mode pseudoinverses for a flattened
    /// problem). No residual check is performed here.
    DictionarySet(std::vector<DenseMatrix> ds, std::vector<DenseMatrix> pre_pinvs)
        : dicts(std::move(ds)), pinvs(std::move(pre_pinvs)) {
        if (dicts.empty()) throw dimension_error("DictionarySet: need at least one dictionary");
        if (dicts.size() != pinvs.size())
            throw dimension_error("DictionarySet: dictionary/pseudoinverse count mismatch");
        for (std::size_t d = 0; d < dicts.size(); ++d)
            if (pinvs[d].rows != dicts[d].cols || pinvs[d].cols != dicts[d].rows)
                throw dimension_error("DictionarySet: pseudoinverse " + std::to_string(d + 1) +
                                      " has wrong dimensions");
    }

    std::size_t order() const { return dicts.size(); }

    Shape measurement_shape() const {
        Shape s(dicts.size());
        for (std::size_t d = 0; d < dicts.size(); ++d) s[d] = dicts[d].rows;
        return s;
    }

    Shape signal_shape() const {
        Shape s(dicts.size());
        for (std::size_t d = 0; d < dicts.size(); ++d) s[d] = dicts[d].cols;
        return s;
    }
};

struct SolverConfig {
    double sigma_min = 0.004;
    double sigma_decay = 0.9;
    int inner_iters = 5;  ///< L, steepest-descent steps per sigma stage
    double step_mu = 0.5;
    double epsilon = 0.01;  ///< residual-energy budget of the noisy variant
    bool noisy = false;
    /// Schedule start; when unset, 2 * max|initial iterate| is used.
    std::optional<double> sigma_initial;

    void validate() const {
        if (!(sigma_min > 0.0)) throw std::invalid_argument("SolverConfig: sigma_min must be > 0");
        if (!(sigma_decay > 0.0) || !(sigma_decay < 1.0))
            throw std::invalid_argument("SolverConfig: sigma_decay must be in (0,1)");
        if (inner_iters < 1) throw std::invalid_argument("SolverConfig: inner_iters must be >= 1");
        if (!(step_mu > 0.0)) throw std::invalid_argument("SolverConfig: step_mu must be > 0");
        if (epsilon < 0.0) throw std::invalid_argument("SolverConfig: epsilon must be >= 0");
        if (sigma_initial && !(*sigma_initial > 0.0))
            throw std::invalid_argument("SolverConfig: sigma_initial must be > 0");
    }
};

struct RecoveryReport {
    DenseTensor x_hat;
    std::vector<double> sigma_trace;  ///< strictly decreasing, ends at sigma_min
    std::size_t outer_stages = 0;
    double residual_energy = 0.0;  ///< final squared Frobenius measurement residual
    double elapsed_seconds = 0.0;
};

/// Smoothed zero-norm estimate F_sigma(x); approaches the nonzero count as
/// sigma tends to 0.
inline double smoothed_norm(const DenseTensor& x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("smoothed_norm: sigma must be > 0");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    double s = 0.0;
    for (double v : x.data) s += std::exp(-v * v * inv);
    return static_cast<double>(x.size()) - s;
}

/// Steepest-descent direction of the smoothed norm, scaled by sigma^2:
/// delta_i = x_i * exp(-x_i^2 / (2 sigma^2)).
inline DenseTensor smoothed_norm_delta(const DenseTensor& x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("smoothed_norm_delta: sigma must be > 0");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    DenseTensor d(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) d.data[i] = x.data[i] * std::exp(-x.data[i] * x.data[i] * inv);
    return d;
}

namespace detail {

inline void check_measurement_shape(const DenseTensor& y, const DictionarySet& dicts,
                                    const char* what) {
    const Shape expect = dicts.measurement_shape();
    if (y.shape != expect)
        throw dimension_error(std::string(what) + ": measurement shape " +
                              shape_to_string(y.shape) + " does not match dictionary rows " +
                              shape_to_string(expect));
}

}  // namespace detail

/// Minimum-energy feasible point y x_1 pinv(A1) ... x_D pinv(AD); the least
/// squares solution, and the sigma -> infinity limit of the descent.
inline DenseTensor initialize(const DenseTensor& y, const DictionarySet& dicts) {
    detail::check_measurement_shape(y, dicts, "initialize");
    return multi_mode_product(y, dicts.pinvs);
}

/// Projection onto the feasible set {x : x x_1 A1 ... = y}: the residual
/// r = y - x x_1 A1 ... is mapped back through the pseudoinverses and added.
/// A feasible x comes back unchanged.
inline DenseTensor project(const DenseTensor& x, const DenseTensor& y, const DictionarySet& dicts) {
    detail::check_measurement_shape(y, dicts, "project");
    DenseTensor r = multi_mode_product(x, dicts.dicts);
    for (std::size_t i = 0; i < r.size(); ++i) r.data[i] = y.data[i] - r.data[i];
    DenseTensor corr = multi_mode_product(r, dicts.pinvs);
    DenseTensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += corr.data[i];
    return out;
}

/// Full graduated recovery. Starts from the least squares iterate, then for
/// each sigma in the geometric schedule runs `inner_iters` steepest-descent
/// steps on the smoothed norm, each followed by a feasibility projection
/// (unconditional in noiseless mode; only when the residual energy exceeds
/// `epsilon` in noisy mode). The stage count is fixed entirely by the
/// schedule, which keeps timing comparisons across dimensions meaningful.
inline RecoveryReport recover(const DenseTensor& y, const DictionarySet& dicts,
                              const SolverConfig& cfg = {}) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    DenseTensor x = initialize(y, dicts);

    double sigma_start = cfg.sigma_initial ? *cfg.sigma_initial : 2.0 * abs_max(x);
    std::vector<double> schedule;
    for (double s = sigma_start; s > cfg.sigma_min; s *= cfg.sigma_decay) schedule.push_back(s);
    schedule.push_back(cfg.sigma_min);

    DenseTensor residual(y.shape);
    for (double sigma : schedule) {
        const double inv = 1.0 / (2.0 * sigma * sigma);
        for (int l = 0; l < cfg.inner_iters; ++l) {
            for (double& v : x.data) v -= cfg.step_mu * v * std::exp(-v * v * inv);

            DenseTensor yhat = multi_mode_product(x, dicts.dicts);
            double energy = 0.0;
            for (std::size_t i = 0; i < residual.size(); ++i) {
                residual.data[i] = y.data[i] - yhat.data[i];
                energy += residual.data[i] * residual.data[i];
            }
            if (!cfg.noisy || energy > cfg.epsilon) {
                DenseTensor corr = multi_mode_product(residual, dicts.pinvs);
                for (std::size_t i = 0; i < x.size(); ++i) x.data[i] += corr.data[i];
            }
        }
    }

    RecoveryReport report;
    report.sigma_trace = std::move(schedule);
    report.outer_stages = report.sigma_trace.size();
    DenseTensor yhat = multi_mode_product(x, dicts.dicts);
    double energy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y.data[i] - yhat.data[i];
        energy += r * r;
    }
    report.residual_energy = energy;
    report.x_hat = std::move(x);
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// 20 log10(||x_true|| / ||x_true - x_hat||), capped at 300 dB.
inline double snr_db(const DenseTensor& x_true, const DenseTensor& x_hat) {
    if (x_true.shape != x_hat.shape) throw dimension_error("snr_db: shape mismatch");
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < x_true.size(); ++i) {
        sig += x_true.data[i] * x_true.data[i];
        const double d = x_true.data[i] - x_hat.data[i];
        err += d * d;
    }
    if (sig == 0.0) throw std::invalid_argument("snr_db: x_true is identically zero");
    if (err == 0.0) return 300.0;
    return std::min(300.0, 10.0 * std::log10(sig / err));
}

}  // namespace tsl0

#endif  // TSL0_SOLVER_HPP
