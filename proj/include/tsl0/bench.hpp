#ifndef TSL0_BENCH_HPP
#define TSL0_BENCH_HPP

// Benchmark harness: random instance generation, flattened equivalent
// problems, and the three shipped experiments (recovery quality at fixed
// sparsity, phase-transition sweep, dimensionality timing comparison), all
// emitting deterministic CSV.
//
// Reproducibility contract: every trial owns a SeededRng whose seed is a pure
// function of (master seed, experiment id, point index, trial index), so runs
// are byte-identical apart from measured runtimes, regardless of threading.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "tsl0/errors.hpp"
#include "tsl0/io.hpp"
#include "tsl0/linalg.hpp"
#include "tsl0/solver.hpp"
#include "tsl0/tensor.hpp"
#include "tsl0/uniqueness.hpp"

namespace tsl0 {

// ---------------------------------------------------------------------------
// Seed derivation

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-trial seed: a pure function of the coordinates, stable across runs and
/// platforms.
inline std::uint64_t trial_seed(std::uint64_t master, std::string_view experiment,
                                std::uint64_t point_index, std::uint64_t trial_index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the experiment id
    for (char c : experiment) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = splitmix64(master ^ h);
    s = splitmix64(s ^ point_index);
    s = splitmix64(s ^ trial_index);
    return s;
}

// ---------------------------------------------------------------------------
// Instance generation

/// Measurement SNR the default noise level is calibrated to.
inline constexpr double kDefaultMeasurementSnrDb = 60.0;

struct Instance {
    DenseTensor x_true;
    DictionarySet dicts;
    DenseTensor y;
    double noise_std = 0.0;  ///< per-element std actually applied
};

/// Draws a random instance: i.i.d. standard Gaussian wide dictionaries, k
/// standard Gaussian values at distinct uniform positions, and optional
/// i.i.d. Gaussian noise on every measurement entry. When `noise_std` is
/// empty, the std is derived per instance so that the measurement SNR equals
/// kDefaultMeasurementSnrDb. Draw order is fixed: dictionaries in mode order,
/// then support positions, then support values, then noise.
inline Instance generate_instance(SeededRng& rng, const Shape& x_shape, const Shape& y_shape,
                                  std::size_t k, std::optional<double> noise_std = std::nullopt) {
    if (x_shape.size() != y_shape.size())
        throw dimension_error("generate_instance: x and y orders differ");
    for (std::size_t d = 0; d < x_shape.size(); ++d)
        if (y_shape[d] >= x_shape[d])
            throw dimension_error("generate_instance: mode " + std::to_string(d + 1) +
                                  " measurement extent must be smaller than the signal extent");
    const std::size_t total_x = detail::checked_element_count(x_shape, "generate_instance");
    if (k > total_x)
        throw std::invalid_argument("generate_instance: k = " + std::to_string(k) +
                                    " exceeds the " + std::to_string(total_x) +
                                    " signal entries");
    if (noise_std && *noise_std < 0.0)
        throw std::invalid_argument("generate_instance: noise_std must be nonnegative");

    std::vector<DenseMatrix> mats;
    mats.reserve(x_shape.size());
    for (std::size_t d = 0; d < x_shape.size(); ++d)
        mats.push_back(gaussian_matrix(rng, y_shape[d], x_shape[d]));
    DictionarySet dicts(std::move(mats));

    DenseTensor x_true(x_shape);
    if (k > 0) {
        // Partial Fisher-Yates: first k slots become the support.
        std::vector<std::size_t> positions(total_x);
        for (std::size_t i = 0; i < total_x; ++i) positions[i] = i;
        for (std::size_t i = 0; i < k; ++i)
            std::swap(positions[i], positions[i + rng.uniform_index(total_x - i)]);
        for (std::size_t i = 0; i < k; ++i) x_true.data[positions[i]] = rng.gaussian();
    }

    DenseTensor y = multi_mode_product(x_true, dicts.dicts);
    double std_used;
    if (noise_std) {
        std_used = *noise_std;
    } else {
        const double signal_norm = std::sqrt(frobenius_norm_sq(y));
        std_used = signal_norm * std::pow(10.0, -kDefaultMeasurementSnrDb / 20.0) /
                   std::sqrt(static_cast<double>(y.size()));
    }
    if (std_used > 0.0)
        for (double& v : y.data) v += std_used * rng.gaussian();

    return Instance{std::move(x_true), std::move(dicts), std::move(y), std_used};
}

// ---------------------------------------------------------------------------
// Equivalent flattened problems

struct EquivalentProblem {
    DenseTensor y;
    DictionarySet dicts;
    Shape x_shape;  ///< unknown shape of the flattened problem
};

/// One-dimensional equivalent: the Kronecker chain of all dictionaries acting
/// on the vectorized unknowns. The pseudoinverse of the chain is the chain of
/// the cached pseudoinverses, so it is reused rather than refactored.
inline EquivalentProblem build_flat1d(const DenseTensor& y, const DictionarySet& dicts,
                                      std::size_t cap = kDefaultElementCap) {
    DenseMatrix flat = kron_chain(dicts.dicts, cap);
    DenseMatrix flat_pinv = kron_chain(dicts.pinvs, cap);
    Shape x_shape{flat.cols};
    DenseTensor y1 = reshape(y, Shape{y.size()});
    return EquivalentProblem{std::move(y1),
                             DictionarySet({std::move(flat)}, {std::move(flat_pinv)}),
                             std::move(x_shape)};
}

/// Two-dimensional equivalent of a three-mode problem: mode 1 keeps its
/// dictionary, modes 2 and 3 merge into one Kronecker factor, and the
/// operands reshape to N1 x (N2 N3) / M1 x (M2 M3). Solutions map back to the
/// original shape by reshape, exactly.
inline EquivalentProblem build_flat2d(const DenseTensor& y, const DictionarySet& dicts,
                                      std::size_t cap = kDefaultElementCap) {
    if (dicts.order() != 3)
        throw dimension_error("build_flat2d: defined for three-mode problems only");
    DenseMatrix a23 = kronecker(dicts.dicts[1], dicts.dicts[2], cap);
    DenseMatrix p23 = kronecker(dicts.pinvs[1], dicts.pinvs[2], cap);
    const Shape xs = dicts.signal_shape();
    Shape x_shape{xs[0], xs[1] * xs[2]};
    DenseTensor y2 = reshape(y, Shape{y.shape[0], y.shape[1] * y.shape[2]});
    return EquivalentProblem{
        std::move(y2),
        DictionarySet({dicts.dicts[0], std::move(a23)}, {dicts.pinvs[0], std::move(p23)}),
        std::move(x_shape)};
}

// ---------------------------------------------------------------------------
// Trial records and CSV

struct TrialRecord {
    std::string experiment;
    std::string method;  ///< tensor-<D> | flat-2d | flat-1d
    std::size_t d = 0;
    Shape shape_x;
    Shape shape_y;
    std::size_t k = 0;
    double k_over_m = 0.0;
    std::uint64_t seed = 0;
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    double runtime_s = std::numeric_limits<double>::quiet_NaN();
    double residual_energy = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

namespace detail {

inline std::string csv_double(double v) {
    if (std::isnan(v)) return "nan";
    return format_scalar(v);
}

inline std::string csv_sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace detail

inline std::string trial_csv_header() {
    return "experiment,method,D,shape_x,shape_y,K,K_over_M,seed,snr_db,runtime_s,"
           "residual_energy,status";
}

inline std::string to_csv_row(const TrialRecord& r) {
    std::string row;
    row += r.experiment;
    row += ',';
    row += r.method;
    row += ',';
    row += std::to_string(r.d);
    row += ',';
    row += detail::shape_to_string(r.shape_x);
    row += ',';
    row += detail::shape_to_string(r.shape_y);
    row += ',';
    row += std::to_string(r.k);
    row += ',';
    row += detail::csv_double(r.k_over_m);
    row += ',';
    row += std::to_string(r.seed);
    row += ',';
    row += detail::csv_double(r.snr_db);
    row += ',';
    row += detail::csv_double(r.runtime_s);
    row += ',';
    row += detail::csv_double(r.residual_energy);
    row += ',';
    row += detail::csv_sanitize(r.status);
    return row;
}

inline void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open for writing");
    out << trial_csv_header() << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
    if (!out) throw io_error(path + ": write failed");
}

// ---------------------------------------------------------------------------
// Experiment specification

struct ExperimentSpec {
    std::uint64_t master_seed = 1;
    int trials = 20;  ///< trials per point
    SolverConfig solver = noisy_defaults();
    std::optional<double> noise_std;  ///< empty: calibrate to kDefaultMeasurementSnrDb
    std::string out_dir;              ///< empty: no files written
    std::size_t element_cap = kDefaultElementCap;
    bool parallel = false;
    unsigned threads = 0;  ///< 0: hardware concurrency

    /// Sparsity sweep of the phase-transition experiment, as K/M ratios.
    std::vector<double> sweep_ratios = default_sweep_ratios();
    /// Per-mode signal extents of the timing experiment.
    std::vector<std::size_t> timing_sizes = {10, 20, 30, 40, 50};

    static SolverConfig noisy_defaults() {
        SolverConfig cfg;
        cfg.noisy = true;
        return cfg;
    }

    static std::vector<double> default_sweep_ratios() {
        std::vector<double> r;
        for (int i = 1; i <= 28; ++i) r.push_back(0.025 * i);
        return r;
    }

    unsigned worker_count() const {
        if (!parallel) return 1;
        if (threads > 0) return threads;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? hc : 1;
    }
};

namespace detail {

// Runs fn(0..n-1), either inline or on a small worker pool. Any exception is
// rethrown on the caller thread after all workers finish.
inline void run_indexed(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        std::size_t i;
        while ((i = next.fetch_add(1)) < n && !failed.load()) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline void ensure_out_dir(const std::string& out_dir) {
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
}

inline std::string out_path(const std::string& out_dir, const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-trial executor shared by the quality and sweep experiments

/// Generates one instance from `seed`, recovers it, and reports the trial.
/// Failures become a status string, never an exception. When tensor output
/// pointers are given, the true and recovered tensors are copied out.
inline TrialRecord run_tensor_trial(const std::string& experiment, const std::string& method,
                                    const Shape& x_shape, const Shape& y_shape, std::size_t k,
                                    std::uint64_t seed, const SolverConfig& cfg,
                                    std::optional<double> noise_std,
                                    DenseTensor* x_true_out = nullptr,
                                    DenseTensor* x_hat_out = nullptr) {
    TrialRecord rec;
    rec.experiment = experiment;
    rec.method = method;
    rec.d = x_shape.size();
    rec.shape_x = x_shape;
    rec.shape_y = y_shape;
    rec.k = k;
    rec.seed = seed;
    const double m_total =
        static_cast<double>(detail::checked_element_count(y_shape, "run_tensor_trial"));
    rec.k_over_m = static_cast<double>(k) / m_total;
    try {
        SeededRng rng(seed);
        Instance inst = generate_instance(rng, x_shape, y_shape, k, noise_std);
        RecoveryReport rep = recover(inst.y, inst.dicts, cfg);
        rec.runtime_s = rep.elapsed_seconds;
        rec.residual_energy = rep.residual_energy;
        if (k > 0) rec.snr_db = snr_db(inst.x_true, rep.x_hat);
        if (x_true_out) *x_true_out = inst.x_true;
        if (x_hat_out) *x_hat_out = rep.x_hat;
    } catch (const std::exception& e) {
        rec.status = std::string("error: ") + e.what();
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Simulation 1: fixed-sparsity recovery quality (2-D and 3-D cases)

struct Sim1Case {
    std::string id;
    std::string method;
    Shape x_shape;
    Shape y_shape;
    std::size_t k;
};

inline const std::vector<Sim1Case>& sim1_cases() {
    static const std::vector<Sim1Case> cases = {
        {"sim1-2d", "tensor-2", {50, 50}, {30, 30}, 150},
        {"sim1-3d", "tensor-3", {20, 20, 20}, {12, 12, 12}, 100},
    };
    return cases;
}

/// Runs both fixed-sparsity cases. Trial 0 of each case additionally writes
/// the true and recovered tensors plus a value-pair scatter CSV for plotting.
inline std::vector<TrialRecord> run_sim1(const ExperimentSpec& spec) {
    const auto& cases = sim1_cases();
    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    std::vector<TrialRecord> records(cases.size() * trials);
    detail::ensure_out_dir(spec.out_dir);

    detail::run_indexed(records.size(), spec.worker_count(), [&](std::size_t idx) {
        const std::size_t ci = idx / trials, ti = idx % trials;
        const Sim1Case& c = cases[ci];
        const std::uint64_t seed = trial_seed(spec.master_seed, c.id, 0, ti);
        const bool keep = ti == 0 && !spec.out_dir.empty();
        DenseTensor x_true, x_hat;
        records[idx] = run_tensor_trial(c.id, c.method, c.x_shape, c.y_shape, c.k, seed,
                                        spec.solver, spec.noise_std, keep ? &x_true : nullptr,
                                        keep ? &x_hat : nullptr);
        if (keep && records[idx].status == "ok") {
            write_tensor_file(detail::out_path(spec.out_dir, c.id + "_true.txt"), x_true);
            write_tensor_file(detail::out_path(spec.out_dir, c.id + "_recovered.txt"), x_hat);
            std::ofstream scatter(detail::out_path(spec.out_dir, c.id + "_scatter.csv"));
            scatter << "index,true_value,recovered_value\n";
            for (std::size_t i = 0; i < x_true.size(); ++i)
                scatter << i << ',' << detail::csv_double(x_true.data[i]) << ','
                        << detail::csv_double(x_hat.data[i]) << '\n';
        }
    });

    if (!spec.out_dir.empty())
        write_trials_csv(detail::out_path(spec.out_dir, "sim1_trials.csv"), records);
    return records;
}

// ---------------------------------------------------------------------------
// Simulation 2: phase-transition sweep over K/M for D in {1, 2, 3}

struct Sim2Setup {
    std::size_t d;
    Shape x_shape;
    Shape y_shape;
};

inline const std::vector<Sim2Setup>& sim2_setups() {
    static const std::vector<Sim2Setup> setups = {
        {1, {200}, {120}},
        {2, {20, 20}, {12, 12}},
        {3, {20, 20, 20}, {12, 12, 12}},
    };
    return setups;
}

struct SweepPoint {
    std::size_t d = 0;
    std::size_t k = 0;
    std::size_t m = 0;
    double k_over_m = 0.0;
    double mean_snr_db = std::numeric_limits<double>::quiet_NaN();
    int ok_trials = 0;
};

struct Sim2Result {
    std::vector<TrialRecord> records;
    std::vector<SweepPoint> summary;
};

inline Sim2Result run_sim2(const ExperimentSpec& spec) {
    struct Point {
        std::size_t setup;
        std::size_t k;
        std::size_t global_index;
    };
    const auto& setups = sim2_setups();
    std::vector<Point> points;
    for (std::size_t si = 0; si < setups.size(); ++si) {
        const std::size_t m =
            detail::checked_element_count(setups[si].y_shape, "run_sim2");
        const std::size_t total_x =
            detail::checked_element_count(setups[si].x_shape, "run_sim2");
        for (std::size_t ri = 0; ri < spec.sweep_ratios.size(); ++ri) {
            const auto k = static_cast<std::size_t>(
                std::llround(spec.sweep_ratios[ri] * static_cast<double>(m)));
            if (k > total_x) continue;
            points.push_back({si, k, si * spec.sweep_ratios.size() + ri});
        }
    }

    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    Sim2Result result;
    result.records.resize(points.size() * trials);

    detail::run_indexed(result.records.size(), spec.worker_count(), [&](std::size_t idx) {
        const std::size_t pi = idx / trials, ti = idx % trials;
        const Point& p = points[pi];
        const Sim2Setup& s = setups[p.setup];
        const std::uint64_t seed = trial_seed(spec.master_seed, "sim2", p.global_index, ti);
        result.records[idx] =
            run_tensor_trial("sim2", "tensor-" + std::to_string(s.d), s.x_shape, s.y_shape, p.k,
                             seed, spec.solver, spec.noise_std);
    });

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const Sim2Setup& s = setups[points[pi].setup];
        SweepPoint sp;
        sp.d = s.d;
        sp.k = points[pi].k;
        sp.m = detail::checked_element_count(s.y_shape, "run_sim2");
        sp.k_over_m = static_cast<double>(sp.k) / static_cast<double>(sp.m);
        double sum = 0.0;
        for (std::size_t ti = 0; ti < trials; ++ti) {
            const TrialRecord& r = result.records[pi * trials + ti];
            if (r.status == "ok" && !std::isnan(r.snr_db)) {
                sum += r.snr_db;
                ++sp.ok_trials;
            }
        }
        if (sp.ok_trials > 0) sp.mean_snr_db = sum / sp.ok_trials;
        result.summary.push_back(sp);
    }

    if (!spec.out_dir.empty()) {
        detail::ensure_out_dir(spec.out_dir);
        write_trials_csv(detail::out_path(spec.out_dir, "sim2_trials.csv"), result.records);
        std::ofstream out(detail::out_path(spec.out_dir, "sim2_summary.csv"));
        out << "D,K,M,K_over_M,mean_snr_db,ok_trials\n";
        for (const auto& sp : result.summary)
            out << sp.d << ',' << sp.k << ',' << sp.m << ',' << detail::csv_double(sp.k_over_m)
                << ',' << detail::csv_double(sp.mean_snr_db) << ',' << sp.ok_trials << '\n';
    }
    return result;
}

/// First sweep ratio (ascending) at which the mean SNR of dimension `d` drops
/// below `snr_threshold_db`; empty when the curve never collapses.
inline std::optional<double> collapse_ratio(const std::vector<SweepPoint>& summary, std::size_t d,
                                            double snr_threshold_db = 20.0) {
    std::vector<const SweepPoint*> pts;
    for (const auto& sp : summary)
        if (sp.d == d) pts.push_back(&sp);
    std::sort(pts.begin(), pts.end(),
              [](const SweepPoint* a, const SweepPoint* b) { return a->k_over_m < b->k_over_m; });
    for (const SweepPoint* sp : pts)
        if (!std::isnan(sp->mean_snr_db) && sp->mean_snr_db < snr_threshold_db)
            return sp->k_over_m;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simulation 3: timing of direct tensor recovery vs flattened equivalents

struct TimingPoint {
    std::size_t extent = 0;   ///< per-mode signal extent
    std::size_t n_total = 0;  ///< extent^3
    std::string method;
    double mean_runtime_s = std::numeric_limits<double>::quiet_NaN();
    bool capped = false;
    int ok_trials = 0;
};

struct Sim3Result {
    std::vector<TrialRecord> records;
    std::vector<TimingPoint> summary;
};

inline Sim3Result run_sim3(const ExperimentSpec& spec) {
    const auto& sizes = spec.timing_sizes;
    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    static const std::vector<std::string> methods = {"tensor-3", "flat-2d", "flat-1d"};

    Sim3Result result;
    result.records.resize(sizes.size() * trials * methods.size());

    detail::run_indexed(sizes.size() * trials, spec.worker_count(), [&](std::size_t task) {
        const std::size_t pi = task / trials, ti = task % trials;
        const std::size_t nx = sizes[pi];
        const Shape x_shape{nx, nx, nx};
        const Shape y_shape{nx / 2, nx / 2, nx / 2};
        const std::size_t k = (nx / 5) * (nx / 5) * (nx / 5);
        const std::uint64_t seed = trial_seed(spec.master_seed, "sim3", pi, ti);
        const double m_total = static_cast<double>(y_shape[0] * y_shape[1] * y_shape[2]);

        TrialRecord base;
        base.experiment = "sim3";
        base.shape_x = x_shape;
        base.shape_y = y_shape;
        base.k = k;
        base.k_over_m = static_cast<double>(k) / m_total;
        base.seed = seed;

        auto slot = [&](std::size_t mi) -> TrialRecord& {
            return result.records[(pi * trials + ti) * methods.size() + mi];
        };
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            slot(mi) = base;
            slot(mi).method = methods[mi];
            slot(mi).d = mi == 0 ? 3 : (mi == 1 ? 2 : 1);
        }

        std::optional<Instance> inst;
        SolverConfig cfg = spec.solver;
        try {
            SeededRng rng(seed);
            inst = generate_instance(rng, x_shape, y_shape, k, spec.noise_std);
            // One shared schedule start keeps the three methods on identical
            // iteration counts; otherwise timings would not be comparable.
            if (!cfg.sigma_initial)
                cfg.sigma_initial = 2.0 * abs_max(initialize(inst->y, inst->dicts));
            if (!(*cfg.sigma_initial > 0.0)) cfg.sigma_initial = cfg.sigma_min;
        } catch (const std::exception& e) {
            for (std::size_t mi = 0; mi < methods.size(); ++mi)
                slot(mi).status = std::string("error: ") + e.what();
            return;
        }

        auto record_run = [&](std::size_t mi, const DenseTensor& y, const DictionarySet& dicts,
                              const Shape& back_shape) {
            TrialRecord& rec = slot(mi);
            try {
                RecoveryReport rep = recover(y, dicts, cfg);
                rec.runtime_s = rep.elapsed_seconds;
                rec.residual_energy = rep.residual_energy;
                if (k > 0) rec.snr_db = snr_db(inst->x_true, reshape(rep.x_hat, back_shape));
            } catch (const std::exception& e) {
                rec.status = std::string("error: ") + e.what();
            }
        };

        record_run(0, inst->y, inst->dicts, x_shape);
        for (std::size_t mi = 1; mi < methods.size(); ++mi) {
            try {
                EquivalentProblem p = mi == 1 ? build_flat2d(inst->y, inst->dicts, spec.element_cap)
                                              : build_flat1d(inst->y, inst->dicts, spec.element_cap);
                record_run(mi, p.y, p.dicts, x_shape);
            } catch (const element_cap_error& e) {
                slot(mi).status = "capped";
                slot(mi).residual_energy = std::numeric_limits<double>::quiet_NaN();
            } catch (const std::exception& e) {
                slot(mi).status = std::string("error: ") + e.what();
            }
        }
    });

    for (std::size_t pi = 0; pi < sizes.size(); ++pi)
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            TimingPoint tp;
            tp.extent = sizes[pi];
            tp.n_total = sizes[pi] * sizes[pi] * sizes[pi];
            tp.method = methods[mi];
            double sum = 0.0;
            for (std::size_t ti = 0; ti < trials; ++ti) {
                const TrialRecord& r = result.records[(pi * trials + ti) * methods.size() + mi];
                if (r.status == "capped") tp.capped = true;
                if (r.status == "ok" && !std::isnan(r.runtime_s)) {
                    sum += r.runtime_s;
                    ++tp.ok_trials;
                }
            }
            if (tp.ok_trials > 0) tp.mean_runtime_s = sum / tp.ok_trials;
            result.summary.push_back(tp);
        }

    if (!spec.out_dir.empty()) {
        detail::ensure_out_dir(spec.out_dir);
        write_trials_csv(detail::out_path(spec.out_dir, "sim3_trials.csv"), result.records);
        std::ofstream out(detail::out_path(spec.out_dir, "sim3_summary.csv"));
        out << "extent,N_total,method,mean_runtime_s,capped,ok_trials\n";
        for (const auto& tp : result.summary)
            out << tp.extent << ',' << tp.n_total << ',' << tp.method << ','
                << detail::csv_double(tp.mean_runtime_s) << ',' << (tp.capped ? 1 : 0) << ','
                << tp.ok_trials << '\n';
    }
    return result;
}

// ---------------------------------------------------------------------------
// Uniqueness analysis report

inline std::string run_analyze(const std::vector<DenseMatrix>& dicts, std::size_t k,
                               std::size_t max_cols = kDefaultSparkColumnCap) {
    const UniquenessVerdict v = uniqueness_check(k, dicts, max_cols);
    std::ostringstream out;
    out << "dictionaries: " << dicts.size() << '\n';
    for (std::size_t d = 0; d < dicts.size(); ++d) {
        out << "  A[" << (d + 1) << "]: " << dicts[d].rows << 'x' << dicts[d].cols
            << "  coherence=" << coherence(dicts[d]);
        if (dicts[d].cols <= max_cols)
            out << "  spark=" << spark_bruteforce(dicts[d], max_cols);
        else
            out << "  spark=not computed (columns exceed cap " << max_cols << ")";
        out << '\n';
    }
    out << "k: " << v.k << '\n';

    out << "coherence criterion   k < (1 + 1/mu)/2 = ";
    if (std::isinf(v.coherence_bound))
        out << "unbounded";
    else
        out << v.coherence_bound;
    out << "  ->  " << (v.passes_coherence ? "PASS" : "FAIL") << '\n';

    out << "spark criterion       2k <= min spark";
    if (v.min_spark)
        out << " = " << *v.min_spark << "  ->  " << (*v.passes_spark ? "PASS" : "FAIL") << '\n';
    else
        out << "  ->  not computed (columns exceed cap " << max_cols << ")\n";

    out << "random-support bound  k <= (1/2)^D * prod spark = " << v.eq31_bound;
    if (v.eq31_uses_row_counts) out << " (sparks taken as the dictionary row counts)";
    out << "  ->  " << (v.passes_eq31 ? "PASS" : "FAIL")
        << "  [empirical boundary for random supports, not a guarantee]" << '\n';
    return out.str();
}

}  // namespace tsl0

#endif  // TSL0_BENCH_HPP
