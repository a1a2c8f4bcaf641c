// Command-line front end: runs the three shipped experiments, recovers a
// sparse tensor from measurement/dictionary files, and reports uniqueness
// criteria for a dictionary set.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure
// (singular Gram matrix), 3 element cap exceeded.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsl0/tsl0.hpp"

namespace {

struct CommonOptions {
    std::uint64_t seed = 1;
    int trials = 20;
    std::string out_dir = "out";
    double sigma_min = 0.004;
    double sigma_decay = 0.9;
    double step_mu = 0.5;
    int inner_iters = 5;
    double epsilon = 0.01;
    double sigma_initial = 0.0;  // 0: derive from the initial iterate
    double noise_std = -1.0;     // <0: calibrate to 60 dB measurement SNR
    std::size_t cap_elements = tsl0::kDefaultElementCap;
    bool parallel = false;
    unsigned threads = 0;
    bool noiseless = false;
};

void add_solver_options(CLI::App& sub, CommonOptions& opt) {
    sub.add_option("--sigma-min", opt.sigma_min, "Final smoothing width");
    sub.add_option("--sigma-decay", opt.sigma_decay, "Geometric decay of the smoothing width");
    sub.add_option("--mu", opt.step_mu, "Steepest-descent step size");
    sub.add_option("--inner-iters", opt.inner_iters, "Descent steps per smoothing stage");
    sub.add_option("--epsilon", opt.epsilon, "Residual-energy budget of the noisy variant");
    sub.add_option("--sigma-initial", opt.sigma_initial,
                   "Schedule start (0 = twice the largest initial-iterate entry)");
    sub.add_flag("--noiseless", opt.noiseless,
                 "Project on every iteration instead of on budget violation");
}

void add_experiment_options(CLI::App& sub, CommonOptions& opt) {
    sub.add_option("--seed", opt.seed, "Master seed");
    sub.add_option("--trials", opt.trials, "Trials per experiment point")
        ->check(CLI::PositiveNumber);
    sub.add_option("--out", opt.out_dir, "Output directory for CSV and tensor files");
    sub.add_option("--noise-std", opt.noise_std,
                   "Per-element measurement noise std (negative = calibrate to 60 dB)");
    sub.add_option("--cap-elements", opt.cap_elements,
                   "Largest flattened dictionary, in elements");
    sub.add_flag("--parallel", opt.parallel, "Run trials on all hardware threads");
    sub.add_option("--threads", opt.threads, "Worker count for --parallel (0 = hardware)");
    add_solver_options(sub, opt);
    sub.set_config("--config")->description("Flat key=value file; flags override it");
}

tsl0::ExperimentSpec to_spec(const CommonOptions& opt) {
    tsl0::ExperimentSpec spec;
    spec.master_seed = opt.seed;
    spec.trials = opt.trials;
    spec.out_dir = opt.out_dir;
    spec.element_cap = opt.cap_elements;
    spec.parallel = opt.parallel;
    spec.threads = opt.threads;
    spec.solver.sigma_min = opt.sigma_min;
    spec.solver.sigma_decay = opt.sigma_decay;
    spec.solver.step_mu = opt.step_mu;
    spec.solver.inner_iters = opt.inner_iters;
    spec.solver.epsilon = opt.epsilon;
    spec.solver.noisy = !opt.noiseless;
    if (opt.sigma_initial > 0.0) spec.solver.sigma_initial = opt.sigma_initial;
    if (opt.noise_std >= 0.0) spec.noise_std = opt.noise_std;
    spec.solver.validate();
    return spec;
}

int run_sim1_cmd(const CommonOptions& opt) {
    auto records = tsl0::run_sim1(to_spec(opt));
    double sum2 = 0, sum3 = 0;
    int n2 = 0, n3 = 0;
    for (const auto& r : records) {
        if (r.status != "ok" || std::isnan(r.snr_db)) continue;
        if (r.experiment == "sim1-2d") {
            sum2 += r.snr_db;
            ++n2;
        } else {
            sum3 += r.snr_db;
            ++n3;
        }
    }
    if (n2) std::printf("sim1-2d: mean SNR %.2f dB over %d trials\n", sum2 / n2, n2);
    if (n3) std::printf("sim1-3d: mean SNR %.2f dB over %d trials\n", sum3 / n3, n3);
    std::printf("wrote %s/sim1_trials.csv\n", opt.out_dir.c_str());
    return 0;
}

int run_sim2_cmd(const CommonOptions& opt) {
    tsl0::Sim2Result res = tsl0::run_sim2(to_spec(opt));
    for (std::size_t d : {1u, 2u, 3u}) {
        auto c = tsl0::collapse_ratio(res.summary, d);
        if (c)
            std::printf("D=%zu: mean SNR first drops below 20 dB at K/M = %.4f\n", d, *c);
        else
            std::printf("D=%zu: mean SNR stays above 20 dB over the sweep\n", d);
    }
    std::printf("wrote %s/sim2_trials.csv and sim2_summary.csv\n", opt.out_dir.c_str());
    return 0;
}

int run_sim3_cmd(const CommonOptions& opt, const std::vector<std::size_t>& sizes) {
    tsl0::ExperimentSpec spec = to_spec(opt);
    if (!sizes.empty()) spec.timing_sizes = sizes;
    tsl0::Sim3Result res = tsl0::run_sim3(spec);
    for (const auto& tp : res.summary) {
        if (tp.capped)
            std::printf("N=%6zu  %-8s  capped (flattened dictionary above %zu elements)\n",
                        tp.n_total, tp.method.c_str(), spec.element_cap);
        else
            std::printf("N=%6zu  %-8s  mean runtime %.4f s\n", tp.n_total, tp.method.c_str(),
                        tp.mean_runtime_s);
    }
    std::printf("wrote %s/sim3_trials.csv and sim3_summary.csv\n", opt.out_dir.c_str());
    return 0;
}

int run_recover_cmd(const CommonOptions& opt, const std::string& y_path,
                    const std::vector<std::string>& dict_paths) {
    tsl0::DenseTensor y = tsl0::read_tensor_file(y_path);
    std::vector<tsl0::DenseMatrix> mats;
    mats.reserve(dict_paths.size());
    for (const auto& p : dict_paths) mats.push_back(tsl0::read_matrix_file(p));
    tsl0::DictionarySet dicts(std::move(mats));

    tsl0::SolverConfig cfg = to_spec(opt).solver;
    tsl0::RecoveryReport rep = tsl0::recover(y, dicts, cfg);

    std::filesystem::create_directories(opt.out_dir);
    const std::string out_path = (std::filesystem::path(opt.out_dir) / "x_hat.txt").string();
    tsl0::write_tensor_file(out_path, rep.x_hat);
    std::printf("recovered tensor: %s\n", out_path.c_str());
    std::printf("stages %zu, final residual energy %.6g, %.3f s\n", rep.outer_stages,
                rep.residual_energy, rep.elapsed_seconds);
    return 0;
}

int run_analyze_cmd(const CommonOptions& opt, std::size_t k,
                    const std::vector<std::string>& dict_paths,
                    const std::vector<std::string>& gen_sizes, std::size_t spark_cap) {
    std::vector<tsl0::DenseMatrix> dicts;
    if (!dict_paths.empty()) {
        for (const auto& p : dict_paths) dicts.push_back(tsl0::read_matrix_file(p));
    } else {
        tsl0::SeededRng rng(opt.seed);
        for (const auto& s : gen_sizes) {
            const auto x = s.find('x');
            if (x == std::string::npos)
                throw CLI::ValidationError("--gen", "expected ROWSxCOLS, got '" + s + "'");
            const long rows = std::stol(s.substr(0, x));
            const long cols = std::stol(s.substr(x + 1));
            if (rows < 1 || cols < 1)
                throw CLI::ValidationError("--gen", "extents must be positive in '" + s + "'");
            dicts.push_back(tsl0::gaussian_matrix(rng, static_cast<std::size_t>(rows),
                                                  static_cast<std::size_t>(cols)));
        }
    }
    if (dicts.empty())
        throw CLI::ValidationError("analyze", "provide dictionary files or --gen sizes");

    const std::string report = tsl0::run_analyze(dicts, k, spark_cap);
    std::fputs(report.c_str(), stdout);
    if (!opt.out_dir.empty() && opt.out_dir != "-") {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream out(std::filesystem::path(opt.out_dir) / "analyze.txt");
        out << report;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse tensor recovery via smoothed-l0 descent: experiments and tools"};
    app.require_subcommand(1);

    CommonOptions opt;

    CLI::App* sim1 = app.add_subcommand("sim1", "Fixed-sparsity recovery quality (2-D and 3-D)");
    add_experiment_options(*sim1, opt);

    CLI::App* sim2 = app.add_subcommand("sim2", "Phase-transition sweep over K/M for D = 1, 2, 3");
    add_experiment_options(*sim2, opt);

    CLI::App* sim3 =
        app.add_subcommand("sim3", "Timing: direct 3-D recovery vs flattened equivalents");
    add_experiment_options(*sim3, opt);
    std::vector<std::size_t> sim3_sizes;
    sim3->add_option("--nx", sim3_sizes, "Per-mode signal extents to time (repeatable)");

    CLI::App* recover_cmd = app.add_subcommand("recover", "Recover a sparse tensor from files");
    std::string y_path;
    std::vector<std::string> dict_paths;
    recover_cmd->add_option("measurements", y_path, "Measurement tensor file")->required();
    recover_cmd->add_option("dictionaries", dict_paths, "One matrix file per mode")->required();
    recover_cmd->add_option("--out", opt.out_dir, "Output directory for x_hat.txt");
    add_solver_options(*recover_cmd, opt);
    recover_cmd->set_config("--config")->description("Flat key=value file; flags override it");

    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Uniqueness criteria for a dictionary set");
    std::size_t analyze_k = 0;
    std::vector<std::string> analyze_dicts;
    std::vector<std::string> gen_sizes;
    std::size_t spark_cap = tsl0::kDefaultSparkColumnCap;
    analyze_cmd->add_option("--k", analyze_k, "Sparsity level to test")->required();
    analyze_cmd->add_option("dictionaries", analyze_dicts, "Matrix files, one per mode");
    analyze_cmd->add_option("--gen", gen_sizes,
                            "Generate Gaussian dictionaries instead, e.g. --gen 12x20");
    analyze_cmd->add_option("--seed", opt.seed, "Seed for --gen");
    analyze_cmd->add_option("--spark-cap", spark_cap,
                            "Column cap for brute-force spark enumeration");
    analyze_cmd->add_option("--out", opt.out_dir, "Directory for analyze.txt ('-' = stdout only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim1->parsed()) return run_sim1_cmd(opt);
        if (sim2->parsed()) return run_sim2_cmd(opt);
        if (sim3->parsed()) return run_sim3_cmd(opt, sim3_sizes);
        if (recover_cmd->parsed()) return run_recover_cmd(opt, y_path, dict_paths);
        if (analyze_cmd->parsed())
            return run_analyze_cmd(opt, analyze_k, analyze_dicts, gen_sizes, spark_cap);
    } catch (const tsl0::singular_gram_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const tsl0::element_cap_error& e) {
        std::cerr << "element cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
