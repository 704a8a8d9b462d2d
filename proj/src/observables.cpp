#include "anneal/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace anneal {

double overlap_q(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("overlap_q: length mismatch");
    long acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<int>(a[i]) * static_cast<int>(b[i]);
    return static_cast<double>(acc) / static_cast<double>(a.size());
}

double magnetization(std::span<const std::int8_t> spins) {
    long acc = 0;
    for (std::int8_t s : spins) acc += s;
    return static_cast<double>(acc) / static_cast<double>(spins.size());
}

double binder(double q2_mean, double q4_mean) {
    if (q2_mean <= 0.0) throw std::domain_error("binder: q2_mean must be > 0");
    return 0.5 * (3.0 - q4_mean / (q2_mean * q2_mean));
}

void BinnedAccumulator::add(double x) {
    ++count_;
    sum_ += x;
    double bin_sum = x;  // complete bin of size 2^lvl as we ascend
    for (std::size_t lvl = 0; lvl < 62; ++lvl) {
        if (lvl == levels_.size()) levels_.push_back({});
        Level& L = levels_[lvl];
        const double bin_mean = bin_sum / static_cast<double>(1LL << lvl);
        L.sum_means += bin_mean;
        L.sum_sq_means += bin_mean * bin_mean;
        ++L.bins;
        if (L.partial_count == 0) {
            L.partial_sum = bin_sum;
            L.partial_count = 1;
            break;
        }
        bin_sum += L.partial_sum;
        L.partial_sum = 0.0;
        L.partial_count = 0;
    }
}

double BinnedAccumulator::mean() const { return count_ > 0 ? sum_ / count_ : 0.0; }

static double level_error(double sum_means, double sum_sq_means, long bins) {
    if (bins < 2) return 0.0;
    double mean = sum_means / bins;
    double var = (sum_sq_means / bins - mean * mean) * bins / (bins - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / bins);
}

double BinnedAccumulator::naive_error() const {
    if (levels_.empty()) return 0.0;
    return level_error(levels_[0].sum_means, levels_[0].sum_sq_means, levels_[0].bins);
}

double BinnedAccumulator::error(int min_bins) const {
    double best = 0.0;
    for (const Level& L : levels_) {
        if (L.bins < min_bins) break;
        best = std::max(best, level_error(L.sum_means, L.sum_sq_means, L.bins));
    }
    return best > 0.0 ? best : naive_error();
}

double BinnedAccumulator::tau_int(int min_bins) const {
    double e0 = naive_error();
    if (e0 <= 0.0) return 0.5;
    double e = error(min_bins);
    double ratio = e / e0;
    return 0.5 * ratio * ratio;
}

std::vector<std::string> validate_series(const ObservableSeries& s, double tolerance) {
    std::vector<std::string> bad;
    for (const SeriesPoint& p : s.points) {
        auto at = [&](const char* what) {
            return std::string(what) + " at tau=" + std::to_string(p.tau);
        };
        if (p.q2 < -tolerance || p.q2 > 1.0 + tolerance) bad.push_back(at("q2 out of [0,1]"));
        if (p.q4 < -tolerance || p.q4 > 1.0 + tolerance) bad.push_back(at("q4 out of [0,1]"));
        double slack = 3.0 * (p.q4_err + 2.0 * std::abs(p.q2) * p.q2_err) + tolerance;
        if (p.q4 < p.q2 * p.q2 - slack) bad.push_back(at("q4 < q2^2 beyond tolerance"));
        if (p.q2_err < 0 || p.q4_err < 0 || p.mz2_err < 0) bad.push_back(at("negative error"));
    }
    return bad;
}

std::vector<AveragedPoint> disorder_average(std::span<const ObservableSeries> group) {
    if (group.empty()) throw std::invalid_argument("disorder_average: empty group");
    const ObservableSeries& ref = group.front();
    const std::size_t npts = ref.points.size();
    for (const ObservableSeries& s : group) {
        if (s.n_sites != ref.n_sites || s.points.size() != npts ||
            s.protocol_kind != ref.protocol_kind)
            throw std::invalid_argument("disorder_average: inconsistent group");
    }
    const double k = static_cast<double>(group.size());
    std::vector<AveragedPoint> out(npts);
    for (std::size_t t = 0; t < npts; ++t) {
        AveragedPoint& a = out[t];
        a.tau = ref.points[t].tau;
        a.s_or_t = ref.points[t].s_or_t;
        a.realizations = static_cast<int>(group.size());
        auto combine = [&](auto mem, auto err_mem, double& mean_out, double& err_out) {
            double mean = 0.0, var_within = 0.0;
            for (const ObservableSeries& s : group) {
                mean += s.points[t].*mem;
                double e = s.points[t].*err_mem;
                var_within += e * e;
            }
            mean /= k;
            var_within /= k;
            double var_between = 0.0;
            for (const ObservableSeries& s : group) {
                double d = s.points[t].*mem - mean;
                var_between += d * d;
            }
            var_between = group.size() > 1 ? var_between / (k - 1.0) : 0.0;
            mean_out = mean;
            err_out = std::sqrt(var_between / k + var_within / k);
        };
        combine(&SeriesPoint::q2, &SeriesPoint::q2_err, a.q2, a.q2_err);
        combine(&SeriesPoint::q4, &SeriesPoint::q4_err, a.q4, a.q4_err);
        combine(&SeriesPoint::mz2, &SeriesPoint::mz2_err, a.mz2, a.mz2_err);
    }
    return out;
}

std::vector<std::pair<double, double>> binder_curve(std::span<const AveragedPoint> pts) {
    std::vector<std::pair<double, double>> out;
    out.reserve(pts.size());
    for (const AveragedPoint& p : pts) out.emplace_back(p.s_or_t, binder(p.q2, p.q4));
    return out;
}

}  // namespace anneal
