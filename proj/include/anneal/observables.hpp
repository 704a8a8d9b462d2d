#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace anneal {

// Edwards-Anderson overlap (1/N) sum_i s_i(1) s_i(2) of two replicas.
double overlap_q(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

double magnetization(std::span<const std::int8_t> spins);

// U = (3 - q4/q2^2)/2. Throws std::domain_error when q2_mean <= 0
// (degenerate statistics).
double binder(double q2_mean, double q4_mean);

// Logarithmic binning accumulator: error bars from the plateau of the
// bin-level error estimates, which absorbs autocorrelations.
class BinnedAccumulator {
public:
    void add(double x);
    long count() const { return count_; }
    double mean() const;
    // plain i.i.d. standard error of the mean (level-0)
    double naive_error() const;
    // autocorrelation-aware error: max over bin levels with >= min_bins bins
    double error(int min_bins = 16) const;
    // integrated autocorrelation time implied by error()/naive_error()
    double tau_int(int min_bins = 16) const;

private:
    struct Level {
        double partial_sum = 0.0;
        int partial_count = 0;
        double sum_means = 0.0;
        double sum_sq_means = 0.0;
        long bins = 0;
    };
    std::vector<Level> levels_;
    long count_ = 0;
    double sum_ = 0.0;
};

struct SeriesPoint {
    int tau = 0;          // measurement slot (quantum) or sweep index (thermal)
    double s_or_t = 0.0;  // s value (quantum) or temperature (thermal)
    double q2 = 0.0, q2_err = 0.0;
    double q4 = 0.0, q4_err = 0.0;
    double mz2 = 0.0, mz2_err = 0.0;
    long n_samples = 0;
};

// Per-run observable record; one per (graph realization, velocity, seed).
struct ObservableSeries {
    std::string protocol_kind;  // "hamiltonian", "simulation-time", "thermal"
    std::uint64_t graph_hash = 0;
    int n_sites = 0;
    double velocity = 0.0;
    int m = 0;
    double power = 1.0;
    std::string update_kind;  // "cluster", "local", "metropolis", "swendsen-wang"
    std::uint64_t seed = 0;
    int realization = 0;
    double max_tau_int = 0.0;
    bool autocorr_flagged = false;
    std::vector<SeriesPoint> points;
};

// Validates the statistical sanity of a series (q2, q4 in [0,1] up to noise,
// q4 >= q2^2 - tolerance, errors >= 0); returns list of violations.
std::vector<std::string> validate_series(const ObservableSeries& s, double tolerance = 1e-9);

struct AveragedPoint {
    int tau = 0;
    double s_or_t = 0.0;
    double q2 = 0.0, q2_err = 0.0;
    double q4 = 0.0, q4_err = 0.0;
    double mz2 = 0.0, mz2_err = 0.0;
    int realizations = 0;
};

// Disorder average over runs sharing (N, velocity, protocol kind).
// Combined error per point: sqrt(var_between/k + mean(var_within)/k).
// Throws std::invalid_argument on an empty or inconsistent group.
std::vector<AveragedPoint> disorder_average(std::span<const ObservableSeries> group);

// Binder cumulant of disorder-averaged moments (ratio of averages).
std::vector<std::pair<double, double>> binder_curve(std::span<const AveragedPoint> pts);

}  // namespace anneal
