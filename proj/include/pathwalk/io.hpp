#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "pathwalk/observable.hpp"
#include "pathwalk/sampler.hpp"

namespace pathwalk {

struct RecordOptions {
    bool endpoint = false;          // final state as CSV columns
    bool full_path = false;         // paths.bin + paths.json sidecar
    bool observable_trace = false;  // traces.bin + traces.json sidecar
};

// Serialized sink for retained samples from concurrently running chains.
// CSV header is chain,step,F_value[,endpoint_0..]; binary files hold
// little-endian float64 in row-major (step, component) order.
class SampleWriter {
  public:
    SampleWriter(const std::string& directory, const RecordOptions& record, int state_dim,
                 int path_rows);
    ~SampleWriter();

    void append(int chain, long step, const ManifoldPoint& point, const Observable& obs);
    void finalize();  // flush and write sidecars
    long rows() const { return rows_; }

  private:
    std::mutex mutex_;
    std::ofstream csv_;
    std::ofstream paths_;
    std::ofstream traces_;
    RecordOptions record_;
    std::string directory_;
    int state_dim_ = 0;
    int path_rows_ = 0;
    long rows_ = 0;
    bool finalized_ = false;
};

struct SampleTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
    std::vector<double> column(const std::string& name) const;
};

SampleTable read_samples_csv(const std::string& file);

// Reads paths.bin using its JSON sidecar; each entry is (path_rows x n).
std::vector<Eigen::MatrixXd> read_paths_bin(const std::string& bin_file,
                                            const std::string& sidecar_file);

void write_paths_bin(const std::string& bin_file, const std::string& sidecar_file,
                     const std::vector<Eigen::MatrixXd>& paths);

void write_stats_json(const std::string& file, const std::vector<ChainStats>& per_chain,
                      std::uint64_t seed);

}  // namespace pathwalk
