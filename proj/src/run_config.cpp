#include "pathwalk/run_config.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <thread>

#include "pathwalk/dynamics.hpp"
#include "pathwalk/models/brownian.hpp"
#include "pathwalk/models/kdv.hpp"
#include "pathwalk/models/ou.hpp"
#include "pathwalk/observables.hpp"

namespace pathwalk {

namespace {

// Wraps one config table; every read marks its key as consumed so that
// done() can reject leftovers.
class TableReader {
  public:
    TableReader(const toml::Document& doc, const std::string& name) : name_(name) {
        const auto it = doc.tables.find(name);
        if (it == doc.tables.end())
            throw std::invalid_argument("config is missing the [" + name + "] table");
        table_ = &it->second;
    }

    bool has(const std::string& key) const { return table_->count(key) > 0; }

    double number(const std::string& key) {
        return require(key).as_number();
    }
    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }
    long integer(const std::string& key) {
        const toml::Value& v = require(key);
        if (v.kind != toml::Value::Kind::Integer)
            throw std::invalid_argument("[" + name_ + "] " + key + " must be an integer");
        return static_cast<long>(v.int_v);
    }
    long integer(const std::string& key, long fallback) {
        return has(key) ? integer(key) : fallback;
    }
    std::string str(const std::string& key) {
        const toml::Value& v = require(key);
        if (v.kind != toml::Value::Kind::String)
            throw std::invalid_argument("[" + name_ + "] " + key + " must be a string");
        return v.string_v;
    }
    std::string str(const std::string& key, const std::string& fallback) {
        return has(key) ? str(key) : fallback;
    }
    std::vector<std::string> string_array(const std::string& key) {
        const toml::Value& v = require(key);
        if (v.kind != toml::Value::Kind::Array)
            throw std::invalid_argument("[" + name_ + "] " + key + " must be an array");
        std::vector<std::string> out;
        for (const auto& item : v.array_v) {
            if (item.kind != toml::Value::Kind::String)
                throw std::invalid_argument("[" + name_ + "] " + key +
                                            " must be an array of strings");
            out.push_back(item.string_v);
        }
        return out;
    }
    // step accepts a number or the string "auto"
    bool is_string(const std::string& key) const {
        const auto it = table_->find(key);
        return it != table_->end() && it->second.kind == toml::Value::Kind::String;
    }

    void done() const {
        for (const auto& [key, value] : *table_)
            if (!consumed_.count(key))
                throw std::invalid_argument("unknown key '" + key + "' in [" + name_ + "]");
    }

  private:
    const toml::Value& require(const std::string& key) {
        const auto it = table_->find(key);
        if (it == table_->end())
            throw std::invalid_argument("[" + name_ + "] is missing required key '" + key + "'");
        consumed_.insert(key);
        return it->second;
    }

    const toml::Table* table_;
    std::string name_;
    std::set<std::string> consumed_;
};

}  // namespace

RunConfig run_config_from_document(const toml::Document& doc) {
    for (const auto& [table, _] : doc.tables)
        if (table != "model" && table != "observable" && table != "sampler" && table != "output")
            throw std::invalid_argument("unknown config table [" + table + "]");

    RunConfig cfg;

    TableReader model(doc, "model");
    cfg.model_name = model.str("name");
    cfg.horizon = model.number("T");
    cfg.steps = model.integer("N_t");
    if (cfg.model_name == "brownian") {
        cfg.brownian_dim = static_cast<int>(model.integer("n", 1));
    } else if (cfg.model_name == "ou") {
        cfg.ou_epsilon = model.number("epsilon");
    } else if (cfg.model_name == "kdv") {
        cfg.kdv_length = model.number("L", cfg.kdv_length);
        cfg.kdv_points = static_cast<int>(model.integer("N_x", cfg.kdv_points));
        cfg.kdv_kappa = model.number("kappa", cfg.kdv_kappa);
        cfg.kdv_alpha = model.number("alpha_diff", cfg.kdv_alpha);
    } else if (cfg.model_name == "barkley") {
        cfg.barkley_length = model.number("L", cfg.barkley_length);
        cfg.barkley_points = static_cast<int>(model.integer("N_x", cfg.barkley_points));
        cfg.barkley.r = model.number("r", cfg.barkley.r);
        cfg.barkley.sigma_noise = model.number("sigma", cfg.barkley.sigma_noise);
        cfg.barkley.zeta = model.number("zeta", cfg.barkley.zeta);
        cfg.barkley.delta = model.number("delta", cfg.barkley.delta);
        cfg.barkley.eps_u = model.number("eps_u", cfg.barkley.eps_u);
        cfg.barkley.kappa_b = model.number("kappa_b", cfg.barkley.kappa_b);
        cfg.barkley.u0 = model.number("U0", cfg.barkley.u0);
        cfg.barkley.ubar = model.number("Ubar", cfg.barkley.ubar);
        cfg.barkley.diff = model.number("D", cfg.barkley.diff);
        cfg.barkley_relax_time = model.number("relax_time", cfg.barkley_relax_time);
    } else {
        throw std::invalid_argument("unknown model '" + cfg.model_name + "'");
    }
    model.done();

    TableReader obs(doc, "observable");
    cfg.observable_name = obs.str("name");
    if (cfg.observable_name == "endpoint") {
        cfg.endpoint_component = static_cast<int>(obs.integer("component", 0));
    } else if (cfg.observable_name == "power_mean") {
        cfg.power_alpha = obs.number("alpha");
    } else if (cfg.observable_name != "levy_area" && cfg.observable_name != "range" &&
               cfg.observable_name != "turbulent_mass") {
        throw std::invalid_argument("unknown observable '" + cfg.observable_name + "'");
    }
    obs.done();

    TableReader sampler(doc, "sampler");
    cfg.sampler.z_target = sampler.number("z_target");
    const std::string proposal = sampler.str("proposal", "tangent_rw");
    if (proposal == "tangent_rw")
        cfg.sampler.proposal = ProposalKind::TangentRandomWalk;
    else if (proposal == "pcn_flat")
        cfg.sampler.proposal = ProposalKind::PcnFlat;
    else
        throw std::invalid_argument("unknown proposal '" + proposal + "'");
    if (sampler.has("step")) {
        if (sampler.is_string("step")) {
            if (sampler.str("step") != "auto")
                throw std::invalid_argument("[sampler] step must be a number or \"auto\"");
            cfg.step_auto = true;
            cfg.sampler.step = 0.1;  // tuning start
        } else {
            cfg.sampler.step = sampler.number("step");
        }
    }
    cfg.sampler.beta = sampler.number("beta", cfg.sampler.beta);
    cfg.sampler.newton_tol = sampler.number("newton_tol", 0.0);
    cfg.sampler.newton_maxiter =
        static_cast<int>(sampler.integer("newton_maxiter", cfg.sampler.newton_maxiter));
    cfg.sampler.reversibility_tol =
        sampler.number("reversibility_tol", cfg.sampler.reversibility_tol);
    cfg.sampler.chain_length = sampler.integer("chain_length");
    cfg.sampler.burn_in = sampler.integer("burn_in", 0);
    cfg.sampler.thin = sampler.integer("thin", 1);
    cfg.sampler.seed = static_cast<std::uint64_t>(sampler.integer("seed", 1));
    sampler.done();

    TableReader output(doc, "output");
    cfg.output_dir = output.str("directory", "");
    cfg.chains = static_cast<int>(output.integer("chains", 1));
    if (output.has("record")) {
        for (const std::string& item : output.string_array("record")) {
            if (item == "endpoint")
                cfg.record.endpoint = true;
            else if (item == "full_path")
                cfg.record.full_path = true;
            else if (item == "observable_trace")
                cfg.record.observable_trace = true;
            else
                throw std::invalid_argument("unknown record option '" + item + "'");
        }
    }
    output.done();

    if (cfg.chains < 1) throw std::invalid_argument("[output] chains must be >= 1");
    cfg.sampler.validate();
    cfg.grid();  // validates T and N_t
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_document(toml::parse_file(path));
}

std::unique_ptr<Model> build_model(const RunConfig& cfg) {
    if (cfg.model_name == "brownian") return brownian_model(cfg.brownian_dim);
    if (cfg.model_name == "ou") return ou_model(cfg.ou_epsilon);
    if (cfg.model_name == "kdv")
        return kdv_model(make_spatial_grid(cfg.kdv_length, cfg.kdv_points), cfg.kdv_kappa,
                         cfg.kdv_alpha);
    if (cfg.model_name == "barkley") {
        const SpatialGrid grid = make_spatial_grid(cfg.barkley_length, cfg.barkley_points);
        auto raw = barkley_model(grid, cfg.barkley);
        if (cfg.barkley_relax_time <= 0.0) return raw;
        // settle the analytic bump into a physical puff with a noise-free run
        const auto* bk = static_cast<const BarkleyModel*>(raw.get());
        const double dt = std::min(bk->stable_dt(), cfg.grid().dt);
        const int steps = std::max(1, static_cast<int>(std::ceil(cfg.barkley_relax_time / dt)));
        NoiseVector z;
        z.grid = make_grid(cfg.barkley_relax_time, steps);
        z.values = Eigen::MatrixXd::Zero(steps, raw->noise_dim());
        const StatePath relaxed = integrate_forward(*raw, z);
        return barkley_model(grid, cfg.barkley, relaxed.final_state());
    }
    throw std::invalid_argument("unknown model '" + cfg.model_name + "'");
}

std::unique_ptr<Observable> build_observable(const RunConfig& cfg) {
    if (cfg.observable_name == "endpoint") return endpoint_observable(cfg.endpoint_component);
    if (cfg.observable_name == "power_mean") return power_mean_observable(cfg.power_alpha);
    if (cfg.observable_name == "levy_area") return levy_area_observable();
    if (cfg.observable_name == "range") return range_observable();
    if (cfg.observable_name == "turbulent_mass") {
        if (cfg.model_name != "barkley")
            throw std::invalid_argument(
                "turbulent_mass observable requires the barkley model layout");
        return integrated_mass_observable(
            make_spatial_grid(cfg.barkley_length, cfg.barkley_points));
    }
    throw std::invalid_argument("unknown observable '" + cfg.observable_name + "'");
}

void validate_run(const RunConfig& cfg, const Model& model, const Observable& obs) {
    obs.validate_state_dim(model.state_dim());
    cfg.sampler.validate();
    if (cfg.sampler.proposal == ProposalKind::PcnFlat &&
        !(model.affine_flow() && obs.linear()))
        throw std::domain_error(
            "pcn_flat proposal requires an affine model with a linear observable");
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    if (cfg.output_dir.empty())
        throw std::invalid_argument("[output] directory is required for sampling runs");

    const auto model = build_model(cfg);
    const auto obs = build_observable(cfg);
    validate_run(cfg, *model, *obs);

    ExperimentResult result;
    result.seed = cfg.sampler.seed;
    if (const char* env_seed = std::getenv("PATHWALK_SEED"))
        result.seed = std::strtoull(env_seed, nullptr, 10);

    int max_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env_threads = std::getenv("PATHWALK_THREADS"))
        max_threads = std::max(1, std::atoi(env_threads));
    const int workers = std::clamp(cfg.chains, 1, std::max(1, max_threads));

    SamplerConfig scfg = cfg.sampler;
    scfg.seed = result.seed;
    RandomStream root(result.seed);
    if (cfg.step_auto && scfg.proposal == ProposalKind::TangentRandomWalk) {
        RandomStream tune_rng = root.spawn(0xfffe);
        scfg.step = tune_step_size(*model, *obs, cfg.grid(), scfg, tune_rng);
    }
    result.step_used = scfg.step;

    SampleWriter writer(cfg.output_dir, cfg.record, model->state_dim(),
                        static_cast<int>(cfg.steps) + 1);
    result.per_chain.resize(cfg.chains);

    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int chain = next.fetch_add(1);
            if (chain >= cfg.chains) return;
            RandomStream rng = root.spawn(static_cast<std::uint64_t>(chain));
            const ChainResult run = run_chain(
                *model, *obs, cfg.grid(), scfg, rng,
                [&, chain](long step, const ManifoldPoint& point) {
                    writer.append(chain, step, point, *obs);
                });
            result.per_chain[chain] = run.stats;
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    writer.finalize();
    result.retained = writer.rows();
    write_stats_json((std::filesystem::path(cfg.output_dir) / "stats.json").string(),
                     result.per_chain, result.seed);
    return result;
}

}  // namespace pathwalk
