#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anneal/analysis.hpp"
#include "anneal/observables.hpp"

namespace anneal {

inline constexpr const char* code_version = "0.3.0";

struct ModelConfig {
    std::string kind = "regular";  // regular | chain | complete | square-lattice
    std::vector<int> sizes;
    int degree = 3;
    int realizations = 1;
    std::string coupling = "antiferro";  // antiferro | ferro | gaussian
    double field = 1.0;
};

struct ProtocolConfig {
    std::string mode = "hamiltonian";  // hamiltonian | simulation-time | thermal
    std::vector<double> velocities;    // explicit list; empty -> factors * v0 * N^-alpha
    double v0 = 1.0;
    double alpha = 0.0;
    std::vector<double> schedule_factors{1.0};
    double s_start = 0.0;
    double s_end = 0.5;
    double power = 1.0;
    int tau_points = 64;
    double t_start = 0.0;  // thermal mode; 0 -> 2*T_c(3-regular)
    double t_end = 0.0;    // thermal mode; 0 -> T_c(3-regular)
    std::string update = "cluster";  // cluster | local | metropolis | swendsen-wang
};

struct SamplingConfig {
    long sweeps = 2000;
    long therm_sweeps = -1;
    int repeats = 1;  // simulation-time / thermal quench repetitions per job
    double autocorr_threshold = 50.0;
};

struct ExecutionConfig {
    int workers = 0;  // 0: hardware concurrency
    std::uint64_t master_seed = 1;
    std::string out_dir = "runs";
};

struct ExperimentConfig {
    ModelConfig model;
    ProtocolConfig protocol;
    SamplingConfig sampling;
    ExecutionConfig execution;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    std::uint64_t hash() const;
    // returns problems; empty means valid
    std::vector<std::string> validate() const;
    std::vector<double> velocities_for(int n_sites) const;
};

// One job = (size, realization, velocity); the derived seeds depend only on
// the master seed and these indices, never on scheduling.
struct JobSpec {
    int size_index = 0;
    int n_sites = 0;
    int realization = 0;
    int velocity_index = 0;
    double velocity = 0.0;
    std::uint64_t graph_seed = 0;
    std::uint64_t run_seed = 0;
    std::string key;
};

std::vector<JobSpec> enumerate_jobs(const ExperimentConfig& config);

struct EnsembleStatus {
    long completed = 0;
    long skipped = 0;
    std::vector<std::string> failed_keys;
    bool ok() const { return failed_keys.empty(); }
};

// Executes all jobs not already present in the records file (idempotent
// resume), appending one JSON record per line as jobs complete.
EnsembleStatus run_ensemble(const ExperimentConfig& config, const std::string& records_path);

nlohmann::json series_to_json(const ObservableSeries& series);
ObservableSeries series_from_json(const nlohmann::json& j);

std::vector<ObservableSeries> load_records(const std::string& path);
// job keys already present in a records file
std::vector<std::string> existing_job_keys(const std::string& path);

// --- analysis drivers ---------------------------------------------------------

struct AnalysisOutputs {
    nlohmann::json report;
    std::string table_csv;  // plot-ready (x, y, err) rows with commented header
};

struct CollapseCommand {
    std::string observable = "q2";  // q2 | mz2
    double at = std::numeric_limits<double>::quiet_NaN();  // s or T; NaN -> final point
    CollapseOptions options;
    int bootstrap = 200;
    std::uint64_t bootstrap_seed = 1;
};

AnalysisOutputs analyze_collapse(std::span<const ObservableSeries> records,
                                 const CollapseCommand& cmd);

struct CrossingsCommand {
    int delta_n = 64;
    int bootstrap = 200;
    std::uint64_t bootstrap_seed = 1;
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    bool extrapolate = true;
};

AnalysisOutputs analyze_crossings(std::span<const ObservableSeries> records,
                                  const CrossingsCommand& cmd);

struct SlopeCommand {
    CollapseCommand collapse;
    double expected_x = 0.0;
    double expected_x_err = 0.0;
    double alpha_check = 0.0;  // >0: verify alpha > fitted k a posteriori
};

AnalysisOutputs analyze_slope(std::span<const ObservableSeries> records, const SlopeCommand& cmd);

// Runs fn(i) for i in [0, count) on `workers` threads (0: hardware).
void parallel_for(long count, int workers, const std::function<void(long)>& fn);

}  // namespace anneal
