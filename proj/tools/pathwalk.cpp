#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "pathwalk/analysis.hpp"
#include "pathwalk/dynamics.hpp"
#include "pathwalk/errors.hpp"
#include "pathwalk/models/barkley.hpp"
#include "pathwalk/models/brownian.hpp"
#include "pathwalk/models/kdv.hpp"
#include "pathwalk/models/ou.hpp"
#include "pathwalk/observables.hpp"
#include "pathwalk/run_config.hpp"

namespace fs = std::filesystem;
using namespace pathwalk;

namespace {

int cmd_sample(const std::string& config_path) {
    const RunConfig cfg = load_run_config(config_path);
    const ExperimentResult result = run_experiment(cfg);
    long accepted = 0, total = 0;
    for (const auto& s : result.per_chain) {
        accepted += s.accepted;
        total += s.total();
    }
    std::cout << "chains: " << result.per_chain.size() << "\n"
              << "retained samples: " << result.retained << "\n"
              << "acceptance rate: "
              << (total > 0 ? static_cast<double>(accepted) / total : 0.0) << "\n"
              << "step size used: " << result.step_used << "\n"
              << "outputs in: " << cfg.output_dir << "\n";
    return 0;
}

// Desk-scale dimension-compatible pairs for the full gradient sweep.
struct GradCase {
    std::string label;
    std::unique_ptr<Model> model;
    std::unique_ptr<Observable> obs;
    int n_t;
};

std::vector<GradCase> gradcheck_matrix() {
    std::vector<GradCase> cases;
    cases.push_back({"brownian1 + endpoint", brownian_model(1), endpoint_observable(0), 32});
    cases.push_back({"brownian1 + power_mean(1)", brownian_model(1), power_mean_observable(1.0), 32});
    cases.push_back({"brownian1 + power_mean(2.5)", brownian_model(1), power_mean_observable(2.5), 32});
    cases.push_back({"brownian1 + range", brownian_model(1), range_observable(), 32});
    cases.push_back({"brownian2 + levy_area", brownian_model(2), levy_area_observable(), 16});
    cases.push_back({"brownian2 + endpoint(1)", brownian_model(2), endpoint_observable(1), 16});
    cases.push_back({"ou + power_mean(1)", ou_model(0.1), power_mean_observable(1.0), 32});
    cases.push_back({"ou + power_mean(3)", ou_model(0.1), power_mean_observable(3.0), 32});
    cases.push_back({"ou + range", ou_model(0.1), range_observable(), 32});
    const SpatialGrid kgrid = make_spatial_grid(40.0, 32);
    cases.push_back({"kdv + endpoint(0)", kdv_model(kgrid, 0.05, 0.01), endpoint_observable(0), 16});
    const SpatialGrid bgrid = make_spatial_grid(50.0, 16);
    cases.push_back({"barkley + turbulent_mass", barkley_model(bgrid, BarkleyParams{}),
                     integrated_mass_observable(bgrid), 16});
    return cases;
}

int cmd_gradcheck(const std::string& config_path, bool all, double tol) {
    RandomStream rng(2024);
    bool ok = true;
    std::cout << std::scientific << std::setprecision(3);
    if (all) {
        for (auto& c : gradcheck_matrix()) {
            const GradientCheckReport report =
                gradient_check(*c.model, *c.obs, 5, make_grid(1.0, c.n_t), rng);
            const bool pass = report.all_finite && report.max_rel_error <= tol;
            ok = ok && pass;
            std::cout << (pass ? "[ok]   " : "[FAIL] ") << c.label
                      << "  max rel err = " << report.max_rel_error << "\n";
        }
    } else {
        const RunConfig cfg = load_run_config(config_path);
        const auto model = build_model(cfg);
        const auto obs = build_observable(cfg);
        obs->validate_state_dim(model->state_dim());
        const int n_t = std::min<long>(cfg.steps, 32);
        const GradientCheckReport report =
            gradient_check(*model, *obs, 5, make_grid(cfg.horizon, n_t), rng);
        const bool pass = report.all_finite && report.max_rel_error <= tol;
        ok = pass;
        std::cout << (pass ? "[ok]   " : "[FAIL] ") << cfg.model_name << " + "
                  << cfg.observable_name << "  max rel err = " << report.max_rel_error << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_initpoint(const std::string& config_path) {
    const RunConfig cfg = load_run_config(config_path);
    const auto model = build_model(cfg);
    const auto obs = build_observable(cfg);
    validate_run(cfg, *model, *obs);
    RandomStream rng(cfg.sampler.seed);
    const InitialPoint init =
        find_initial_point(*model, *obs, cfg.grid(), cfg.sampler.z_target, rng,
                           cfg.sampler.resolved_newton_tol(), 500);
    std::cout << std::setprecision(12) << "F value: " << init.point.f_value << "\n"
              << "residual: " << std::abs(init.point.f_value - cfg.sampler.z_target) << "\n"
              << "gradient norm: " << init.point.normal_norm << "\n"
              << "iterations: " << init.iterations << "\n";
    return 0;
}

int cmd_analyze(const std::string& samples_path, bool range_cdf, const std::string& hist_col,
                int bins, const std::string& rotate_out) {
    const SampleTable table = read_samples_csv(samples_path);
    std::cout << "samples: " << table.rows.size() << ", columns:";
    for (const auto& c : table.columns) std::cout << " " << c;
    std::cout << "\n";

    if (range_cdf) {
        const std::vector<double> values = table.column("F_value");
        const EmpiricalCdf ecdf(values);
        const double ks =
            ks_distance(ecdf, [](double x) { return analytic_range_cdf(x, 100); });
        std::cout << "KS distance to analytic range CDF (k_max=100): " << ks << "\n";
    }
    if (!hist_col.empty()) {
        const std::vector<double> values = table.column(hist_col);
        const int nbins = bins > 0 ? bins : freedman_diaconis_bins(values);
        const Histogram h = histogram(values, nbins);
        const double width = (h.hi - h.lo) / nbins;
        std::cout << "histogram of " << hist_col << " (" << nbins << " bins)\n";
        for (int b = 0; b < nbins; ++b)
            std::cout << h.lo + b * width << "," << h.lo + (b + 1) * width << ","
                      << h.counts[b] << "\n";
    }
    if (!rotate_out.empty()) {
        const fs::path dir = fs::path(samples_path).parent_path();
        auto paths = read_paths_bin((dir / "paths.bin").string(), (dir / "paths.json").string());
        if (paths.empty() || paths.front().cols() != 2)
            throw std::invalid_argument("--rotate-paths needs recorded planar paths");
        // rotate each path so its endpoint lands on the positive x-axis
        for (auto& p : paths) {
            const double x = p(p.rows() - 1, 0), y = p(p.rows() - 1, 1);
            const double r = std::hypot(x, y);
            if (r == 0.0) continue;
            const double c = x / r, s = y / r;
            for (int i = 0; i < p.rows(); ++i) {
                const double a = p(i, 0), b = p(i, 1);
                p(i, 0) = c * a + s * b;
                p(i, 1) = -s * a + c * b;
            }
        }
        write_paths_bin(rotate_out, rotate_out + ".json", paths);
        std::cout << "rotated " << paths.size() << " paths -> " << rotate_out << "\n";
    }
    return 0;
}

int cmd_bench_scaling(const std::string& config_path) {
    const RunConfig cfg = load_run_config(config_path);
    const std::vector<ProposalSpec> proposals = {
        {"pcn_flat", ProposalKind::PcnFlat, cfg.sampler.beta},
        {"tangent_rw", ProposalKind::TangentRandomWalk, cfg.sampler.step},
    };
    const std::vector<int> n_t_list = {100, 1000, 10000};
    const auto table = acceptance_scaling_benchmark(proposals, n_t_list,
                                                    cfg.sampler.chain_length, cfg.sampler.seed);
    std::cout << "proposal,N_t,acceptance_rate\n";
    for (const auto& cell : table)
        std::cout << cell.proposal << "," << cell.n_t << "," << cell.acceptance_rate << "\n";
    if (!cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        std::ofstream out(fs::path(cfg.output_dir) / "scaling.csv");
        out << "proposal,N_t,acceptance_rate\n";
        for (const auto& cell : table)
            out << cell.proposal << "," << cell.n_t << "," << cell.acceptance_rate << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathwalk: sampling of conditioned stochastic (partial) differential equations"};
    app.require_subcommand(1);

    std::string config_path, samples_path, hist_col, rotate_out;
    bool gradcheck_all = false, range_cdf = false;
    double gradcheck_tol = 1e-5;
    int bins = 0;

    auto* sample = app.add_subcommand("sample", "run conditioned chains from a config file");
    sample->add_option("config", config_path, "TOML run configuration")->required();

    auto* gradcheck = app.add_subcommand("gradcheck", "compare adjoint and finite-difference gradients");
    gradcheck->add_option("config", config_path, "TOML run configuration");
    gradcheck->add_flag("--all", gradcheck_all, "sweep all registered model/observable pairs");
    gradcheck->add_option("--tol", gradcheck_tol, "pass threshold")->capture_default_str();

    auto* initpoint = app.add_subcommand("initpoint", "find a point on the constraint manifold");
    initpoint->add_option("config", config_path, "TOML run configuration")->required();

    auto* analyze = app.add_subcommand("analyze", "post-process a samples file");
    analyze->add_option("samples", samples_path, "samples.csv written by `sample`")->required();
    analyze->add_flag("--range-cdf", range_cdf, "KS distance of F_value against the bridge range CDF");
    analyze->add_option("--histogram", hist_col, "column to histogram");
    analyze->add_option("--bins", bins, "bin count (0 = Freedman-Diaconis)");
    analyze->add_option("--rotate-paths", rotate_out,
                        "rotate recorded planar paths so endpoints lie on the x-axis; output file");

    auto* bench = app.add_subcommand("bench-scaling", "acceptance scaling on the flat bridge manifold");
    bench->add_option("config", config_path, "TOML run configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(sample)) return cmd_sample(config_path);
        if (app.got_subcommand(gradcheck)) {
            if (!gradcheck_all && config_path.empty()) {
                std::cerr << "gradcheck needs a config file or --all\n";
                return 2;
            }
            return cmd_gradcheck(config_path, gradcheck_all, gradcheck_tol);
        }
        if (app.got_subcommand(initpoint)) return cmd_initpoint(config_path);
        if (app.got_subcommand(analyze))
            return cmd_analyze(samples_path, range_cdf, hist_col, bins, rotate_out);
        if (app.got_subcommand(bench)) return cmd_bench_scaling(config_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
