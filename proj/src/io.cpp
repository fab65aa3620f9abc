#include "pathwalk/io.hpp"

#include <bit>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "binary path output assumes a little-endian host");

namespace pathwalk {

namespace fs = std::filesystem;

SampleWriter::SampleWriter(const std::string& directory, const RecordOptions& record,
                           int state_dim, int path_rows)
    : record_(record), directory_(directory), state_dim_(state_dim), path_rows_(path_rows) {
    fs::create_directories(directory);
    csv_.open(fs::path(directory) / "samples.csv");
    if (!csv_) throw std::runtime_error("cannot open samples.csv in " + directory);
    csv_ << "chain,step,F_value";
    if (record_.endpoint)
        for (int j = 0; j < state_dim_; ++j) csv_ << ",endpoint_" << j;
    csv_ << "\n";
    csv_ << std::setprecision(17);

    if (record_.full_path) {
        paths_.open(fs::path(directory) / "paths.bin", std::ios::binary);
        if (!paths_) throw std::runtime_error("cannot open paths.bin in " + directory);
    }
    if (record_.observable_trace) {
        traces_.open(fs::path(directory) / "traces.bin", std::ios::binary);
        if (!traces_) throw std::runtime_error("cannot open traces.bin in " + directory);
    }
}

SampleWriter::~SampleWriter() {
    try {
        finalize();
    } catch (...) {
    }
}

void SampleWriter::append(int chain, long step, const ManifoldPoint& point,
                          const Observable& obs) {
    std::lock_guard<std::mutex> lock(mutex_);
    csv_ << chain << ',' << step << ',' << point.f_value;
    if (record_.endpoint) {
        const Eigen::VectorXd end = point.path.final_state();
        for (int j = 0; j < end.size(); ++j) csv_ << ',' << end[j];
    }
    csv_ << '\n';
    if (record_.full_path) {
        // row-major (step, component) order
        for (int i = 0; i < point.path.states.rows(); ++i)
            for (int j = 0; j < point.path.states.cols(); ++j) {
                const double v = point.path.states(i, j);
                paths_.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
    }
    if (record_.observable_trace) {
        const Eigen::VectorXd tr = obs.trace(point.path);
        for (int i = 0; i < tr.size(); ++i) {
            const double v = tr[i];
            traces_.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    }
    ++rows_;
}

void SampleWriter::finalize() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (finalized_) return;
    finalized_ = true;
    csv_.close();
    if (record_.full_path) {
        paths_.close();
        nlohmann::json sidecar;
        sidecar["N_t"] = path_rows_ - 1;
        sidecar["n"] = state_dim_;
        sidecar["count"] = rows_;
        std::ofstream out(fs::path(directory_) / "paths.json");
        out << sidecar.dump(2) << "\n";
    }
    if (record_.observable_trace) {
        traces_.close();
        nlohmann::json sidecar;
        sidecar["len"] = path_rows_;
        sidecar["count"] = rows_;
        std::ofstream out(fs::path(directory_) / "traces.json");
        out << sidecar.dump(2) << "\n";
    }
}

int SampleTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> SampleTable::column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw std::invalid_argument("samples file has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

SampleTable read_samples_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open samples file: " + file);
    SampleTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty samples file: " + file);
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() != table.columns.size())
            throw std::invalid_argument("ragged row in samples file: " + file);
        table.rows.push_back(std::move(values));
    }
    return table;
}

std::vector<Eigen::MatrixXd> read_paths_bin(const std::string& bin_file,
                                            const std::string& sidecar_file) {
    std::ifstream sc(sidecar_file);
    if (!sc) throw std::invalid_argument("cannot open sidecar: " + sidecar_file);
    nlohmann::json sidecar = nlohmann::json::parse(sc);
    const long n_t = sidecar.at("N_t").get<long>();
    const long n = sidecar.at("n").get<long>();
    const long count = sidecar.at("count").get<long>();

    std::ifstream in(bin_file, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open paths file: " + bin_file);
    std::vector<Eigen::MatrixXd> paths;
    paths.reserve(count);
    for (long k = 0; k < count; ++k) {
        Eigen::MatrixXd m(n_t + 1, n);
        for (long i = 0; i <= n_t; ++i)
            for (long j = 0; j < n; ++j) {
                double v;
                in.read(reinterpret_cast<char*>(&v), sizeof(double));
                if (!in) throw std::invalid_argument("paths file truncated: " + bin_file);
                m(i, j) = v;
            }
        paths.push_back(std::move(m));
    }
    return paths;
}

void write_paths_bin(const std::string& bin_file, const std::string& sidecar_file,
                     const std::vector<Eigen::MatrixXd>& paths) {
    std::ofstream out(bin_file, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + bin_file);
    for (const auto& m : paths)
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                const double v = m(i, j);
                out.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
    nlohmann::json sidecar;
    sidecar["N_t"] = paths.empty() ? 0 : paths.front().rows() - 1;
    sidecar["n"] = paths.empty() ? 0 : paths.front().cols();
    sidecar["count"] = paths.size();
    std::ofstream sc(sidecar_file);
    sc << sidecar.dump(2) << "\n";
}

void write_stats_json(const std::string& file, const std::vector<ChainStats>& per_chain,
                      std::uint64_t seed) {
    ChainStats agg;
    double newton_weighted = 0.0;
    for (const auto& s : per_chain) {
        agg.accepted += s.accepted;
        agg.mh_reject += s.mh_reject;
        agg.newton_fail_forward += s.newton_fail_forward;
        agg.reversibility_fail += s.reversibility_fail;
        agg.blow_up += s.blow_up;
        agg.wall_seconds = std::max(agg.wall_seconds, s.wall_seconds);
        newton_weighted += s.mean_newton_iters * static_cast<double>(s.total());
    }
    const long total = agg.total();
    agg.acceptance_rate = total > 0 ? static_cast<double>(agg.accepted) / total : 0.0;
    agg.mean_newton_iters = total > 0 ? newton_weighted / total : 0.0;

    nlohmann::json j;
    j["acceptance_rate"] = agg.acceptance_rate;
    j["reject_newton"] = agg.newton_fail_forward;
    j["reject_reversibility"] = agg.reversibility_fail;
    j["reject_mh"] = agg.mh_reject;
    j["blow_up"] = agg.blow_up;
    j["mean_newton_iters"] = agg.mean_newton_iters;
    j["wall_seconds"] = agg.wall_seconds;
    j["seed"] = seed;
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& s : per_chain) {
        nlohmann::json c;
        c["accepted"] = s.accepted;
        c["reject_newton"] = s.newton_fail_forward;
        c["reject_reversibility"] = s.reversibility_fail;
        c["reject_mh"] = s.mh_reject;
        c["blow_up"] = s.blow_up;
        c["acceptance_rate"] = s.acceptance_rate;
        c["mean_newton_iters"] = s.mean_newton_iters;
        c["wall_seconds"] = s.wall_seconds;
        chains.push_back(c);
    }
    j["chains"] = chains;

    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open stats file: " + file);
    out << j.dump(2) << "\n";
}

}  // namespace pathwalk
