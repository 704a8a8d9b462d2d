#include "anneal/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "anneal/rng.hpp"

namespace anneal {

double nu_prime_from(double nu, double d) { return nu * d; }
double nu_from_primed(double nu_prime, double d) { return nu_prime / d; }
double z_prime_from(double z, double d) { return z / d; }
double z_from_primed(double z_prime, double d) { return z_prime * d; }

double kz_slope(const ExponentSet& e) {
    const double denom = e.kz_exponent();
    if (denom == 0.0 || e.nu_prime == 0.0) throw std::domain_error("kz_slope: zero denominator");
    return (1.0 - 2.0 * e.beta / e.nu_prime) / denom;
}

double schedule_velocity(double n_sites, double alpha, double v0) {
    return v0 * std::pow(n_sites, -alpha);
}

namespace constants {
const double t_c_3regular = -2.0 / std::log(1.0 - 2.0 / (1.0 + std::sqrt(2.0)));
ExponentSet classical_3regular() { return {1.0, 3.0, 2.0 / 3.0, 1.0, 6}; }
ExponentSet mean_field_transverse_field() { return {1.0, 2.0, 0.25, 1.0, 8}; }
Measured measured_quantum_3regular() { return {0.43, 0.02, 1.34, 0.11}; }
Measured measured_fully_connected() { return {0.47, 0.03, 0.83, 0.12}; }
const double s_c_3regular = 0.3565;
const double s_c_3regular_err = 0.0012;
const double chain_beta = 0.125;
const double chain_nu = 1.0;
const double chain_z_hamiltonian = 1.0;
const double chain_z_local_sim = 2.17;
const double chain_z_cluster_sim = 0.30;
const double crossing_alpha = 17.0 / 12.0;
}  // namespace constants

// --- weighted polynomial least squares ---------------------------------------

namespace {

struct PolyFit {
    Eigen::VectorXd coeffs;
    double chi2 = 0.0;
    int n_used = 0;
};

PolyFit weighted_poly_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w, int degree) {
    const int n = static_cast<int>(x.size());
    const int p = degree + 1;
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        double t = 1.0;
        for (int j = 0; j < p; ++j) {
            design(i, j) = w[i] * t;
            t *= x[i];
        }
        rhs(i) = w[i] * y[i];
    }
    PolyFit fit;
    fit.coeffs = design.colPivHouseholderQr().solve(rhs);
    fit.chi2 = (design * fit.coeffs - rhs).squaredNorm();
    fit.n_used = n;
    return fit;
}

double poly_eval(const Eigen::VectorXd& coeffs, double t) {
    double acc = 0.0;
    for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) acc = acc * t + coeffs[j];
    return acc;
}

struct ScaledData {
    std::vector<double> x, y, w;  // normalized abscissa, log-ordinate, weights
    std::vector<int> index;       // original point index
    double center = 0.0, scale = 1.0;
};

ScaledData scale_points(std::span<const CollapsePoint> pts, double b, double k,
                        const CollapseWindow& window, const std::set<int>& excluded) {
    ScaledData d;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        if (excluded.count(i)) continue;
        const CollapsePoint& p = pts[i];
        const double x = std::log(p.velocity) + k * std::log(p.n_sites);
        if (x < window.lo || x > window.hi) continue;
        const double y = std::log(p.value) + b * std::log(p.n_sites);
        const double sigma = p.error > 0 ? p.error / p.value : 1e-6;
        d.x.push_back(x);
        d.y.push_back(y);
        d.w.push_back(1.0 / sigma);
        d.index.push_back(i);
    }
    if (d.x.empty()) return d;
    const auto [lo, hi] = std::minmax_element(d.x.begin(), d.x.end());
    d.center = 0.5 * (*lo + *hi);
    d.scale = std::max(0.5 * (*hi - *lo), 1e-12);
    for (double& v : d.x) v = (v - d.center) / d.scale;
    return d;
}

double collapse_chi2(std::span<const CollapsePoint> pts, double b, double k, int degree,
                     const CollapseWindow& window, const std::set<int>& excluded) {
    ScaledData d = scale_points(pts, b, k, window, excluded);
    const int n = static_cast<int>(d.x.size());
    if (n < degree + 2) return std::numeric_limits<double>::infinity();
    PolyFit fit = weighted_poly_fit(d.x, d.y, d.w, degree);
    const int dof = n - (degree + 1);
    return fit.chi2 / std::max(1, dof);
}

// golden-section refinement of a 1d slice
template <class Fn>
double golden_min(Fn&& f, double lo, double hi, int iters = 40) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

void validate_collapse_input(std::span<const CollapsePoint> pts) {
    std::map<double, int> velocities_per_n;
    for (const CollapsePoint& p : pts) {
        if (!(p.value > 0.0) || !(p.velocity > 0.0) || !(p.n_sites > 0.0))
            throw std::invalid_argument("collapse_fit: points must have positive N, v, value");
        ++velocities_per_n[p.n_sites];
    }
    if (velocities_per_n.size() < 3)
        throw std::invalid_argument("collapse_fit: need >= 3 distinct system sizes");
    for (auto& [n, cnt] : velocities_per_n)
        if (cnt < 4) throw std::invalid_argument("collapse_fit: need >= 4 velocities per size");
}

}  // namespace

double CollapseResult::master_curve(double x) const {
    return poly_eval(coeffs, (x - x_center) / x_scale);
}

CollapseResult collapse_fit(std::span<const CollapsePoint> points, const CollapseOptions& opts) {
    validate_collapse_input(points);
    std::set<int> excluded;

    auto pick_degree = [&](double b, double k) -> int {
        if (opts.degree > 0) return opts.degree;
        // leave-one-out cross-validation among degrees 3..7 at fixed exponents
        ScaledData d = scale_points(points, b, k, opts.window, excluded);
        const int n = static_cast<int>(d.x.size());
        int best_deg = 5;
        double best_cv = std::numeric_limits<double>::infinity();
        for (int deg = 3; deg <= 7; ++deg) {
            if (n < deg + 3) break;
            double cv = 0.0;
            for (int leave = 0; leave < n; ++leave) {
                std::vector<double> x, y, w;
                for (int i = 0; i < n; ++i) {
                    if (i == leave) continue;
                    x.push_back(d.x[i]);
                    y.push_back(d.y[i]);
                    w.push_back(d.w[i]);
                }
                PolyFit fit = weighted_poly_fit(x, y, w, deg);
                const double resid = (poly_eval(fit.coeffs, d.x[leave]) - d.y[leave]) * d.w[leave];
                cv += resid * resid;
            }
            if (cv < best_cv) {
                best_cv = cv;
                best_deg = deg;
            }
        }
        return best_deg;
    };

    int degree = opts.degree > 0 ? opts.degree : 5;
    auto chi2_of = [&](double b, double k) {
        return collapse_chi2(points, b, k, degree, opts.window, excluded);
    };

    auto optimize = [&]() -> std::pair<double, double> {
        double best_b = opts.fix_b ? opts.b_fixed : opts.b_min;
        double best_k = opts.fix_k ? opts.k_fixed : opts.k_min;
        double best = std::numeric_limits<double>::infinity();
        const int gp = std::max(5, opts.grid_points);
        std::vector<double> bs, ks;
        if (opts.fix_b)
            bs = {opts.b_fixed};
        else
            for (int i = 0; i < gp; ++i)
                bs.push_back(opts.b_min + (opts.b_max - opts.b_min) * i / (gp - 1.0));
        if (opts.fix_k)
            ks = {opts.k_fixed};
        else
            for (int i = 0; i < gp; ++i)
                ks.push_back(opts.k_min + (opts.k_max - opts.k_min) * i / (gp - 1.0));
        for (double b : bs)
            for (double k : ks) {
                const double c = chi2_of(b, k);
                if (c < best) {
                    best = c;
                    best_b = b;
                    best_k = k;
                }
            }
        // coordinate refinement with shrinking brackets
        double db = opts.fix_b ? 0.0 : (opts.b_max - opts.b_min) / (gp - 1.0);
        double dk = opts.fix_k ? 0.0 : (opts.k_max - opts.k_min) / (gp - 1.0);
        for (int round = 0; round < 6; ++round) {
            if (!opts.fix_b) {
                const double lo = std::max(opts.b_min, best_b - db);
                const double hi = std::min(opts.b_max, best_b + db);
                best_b = golden_min([&](double b) { return chi2_of(b, best_k); }, lo, hi);
            }
            if (!opts.fix_k) {
                const double lo = std::max(opts.k_min, best_k - dk);
                const double hi = std::min(opts.k_max, best_k + dk);
                best_k = golden_min([&](double k) { return chi2_of(best_b, k); }, lo, hi);
            }
            db *= 0.4;
            dk *= 0.4;
        }
        return {best_b, best_k};
    };

    auto [b, k] = optimize();
    if (opts.degree == 0) {
        degree = pick_degree(b, k);
        std::tie(b, k) = optimize();
    }

    // high-velocity exclusion: drop top-x points whose residuals exceed 3 sigma
    if (opts.auto_exclude_high_v) {
        const std::size_t max_excluded = points.size() / 4;
        for (std::size_t pass = 0; pass < max_excluded; ++pass) {
            ScaledData d = scale_points(points, b, k, opts.window, excluded);
            if (static_cast<int>(d.x.size()) < degree + 3) break;
            PolyFit fit = weighted_poly_fit(d.x, d.y, d.w, degree);
            int worst = -1;
            double worst_x = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < d.x.size(); ++i) {
                if (d.x[i] > worst_x) {
                    worst_x = d.x[i];
                    worst = static_cast<int>(i);
                }
            }
            const double resid = std::abs(poly_eval(fit.coeffs, d.x[worst]) - d.y[worst]) * d.w[worst];
            if (resid <= 3.0) break;
            excluded.insert(d.index[worst]);
            std::tie(b, k) = optimize();
        }
    }

    CollapseResult result;
    result.b = b;
    result.k = k;
    result.degree = degree;
    result.window = opts.window;
    result.excluded.assign(excluded.begin(), excluded.end());
    ScaledData d = scale_points(points, b, k, opts.window, excluded);
    result.points_used = static_cast<int>(d.x.size());
    if (result.points_used < degree + 2) {
        result.converged = false;
        return result;
    }
    PolyFit fit = weighted_poly_fit(d.x, d.y, d.w, degree);
    result.coeffs = fit.coeffs;
    result.x_center = d.center;
    result.x_scale = d.scale;
    int params = degree + 1 + (opts.fix_b ? 0 : 1) + (opts.fix_k ? 0 : 1);
    result.chi2_dof = fit.chi2 / std::max(1, result.points_used - params);
    return result;
}

CollapseResult collapse_fit_bootstrap(std::span<const CollapsePoint> points,
                                      const CollapseOptions& opts,
                                      std::span<const std::vector<CollapsePoint>> resamples) {
    CollapseResult base = collapse_fit(points, opts);
    std::vector<double> bs, ks;
    for (const auto& sample : resamples) {
        try {
            CollapseResult r = collapse_fit(sample, opts);
            if (r.converged) {
                bs.push_back(r.b);
                ks.push_back(r.k);
            }
        } catch (const std::invalid_argument&) {
            continue;  // degenerate resample
        }
    }
    auto stddev = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return std::sqrt(acc / (v.size() - 1.0));
    };
    base.b_err = stddev(bs);
    base.k_err = stddev(ks);
    return base;
}

std::vector<std::vector<CollapsePoint>> parametric_resamples(
    std::span<const CollapsePoint> points, int count, std::uint64_t seed) {
    std::vector<std::vector<CollapsePoint>> out;
    out.reserve(count);
    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < count; ++r) {
        std::vector<CollapsePoint> sample(points.begin(), points.end());
        for (CollapsePoint& p : sample) {
            p.value += gauss(rng) * p.error;
            if (p.value <= 0.0) p.value = 1e-12;  // keep log defined
        }
        out.push_back(std::move(sample));
    }
    return out;
}

SlopeCheck verify_slope(std::span<const CollapsePoint> points, const CollapseResult& fit,
                        double expected_x, double expected_x_err, CollapseWindow window) {
    std::set<int> excluded(fit.excluded.begin(), fit.excluded.end());
    // raw (unscaled) collapsed coordinates
    std::vector<double> xs, ys, ws;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        if (excluded.count(i)) continue;
        const CollapsePoint& p = points[i];
        const double x = std::log(p.velocity) + fit.k * std::log(p.n_sites);
        if (x < fit.window.lo || x > fit.window.hi) continue;
        xs.push_back(x);
        ys.push_back(std::log(p.value) + fit.b * std::log(p.n_sites));
        ws.push_back(p.error > 0 ? p.value / p.error : 1e6);
    }
    if (xs.size() < 3) throw std::invalid_argument("verify_slope: window too small");
    if (std::isinf(window.lo) && std::isinf(window.hi)) {
        // default: upper half of the retained x range (the power-law regime)
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        window.lo = 0.5 * (*lo + *hi);
        window.hi = *hi + 1.0;
    }
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < window.lo || xs[i] > window.hi) continue;
        x.push_back(xs[i]);
        y.push_back(ys[i]);
        w.push_back(ws[i]);
    }
    SlopeCheck check;
    check.window = window;
    check.points_used = static_cast<int>(x.size());
    if (check.points_used < 3) throw std::invalid_argument("verify_slope: window too small");
    PolyFit line = weighted_poly_fit(x, y, w, 1);
    check.slope = -line.coeffs[1];
    // 1-sigma slope error from the weighted normal equations
    double sw = 0, swx = 0, swxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w[i] * w[i];
        sw += wi;
        swx += wi * x[i];
        swxx += wi * x[i] * x[i];
    }
    const double det = sw * swxx - swx * swx;
    check.slope_err = det > 0 ? std::sqrt(sw / det) : 0.0;
    check.expected = expected_x;
    const double joint = std::sqrt(check.slope_err * check.slope_err +
                                   expected_x_err * expected_x_err);
    check.agrees = std::abs(check.slope - expected_x) <= 2.0 * std::max(joint, 1e-12);
    return check;
}

// --- crossings ----------------------------------------------------------------

namespace {

// natural cubic spline through (x_i, y_i), x ascending
struct Spline {
    std::vector<double> x, y, m;  // second derivatives

    void build(std::span<const CurvePoint> pts) {
        const int n = static_cast<int>(pts.size());
        x.resize(n);
        y.resize(n);
        for (int i = 0; i < n; ++i) {
            x[i] = pts[i].x;
            y[i] = pts[i].y;
            if (i > 0 && !(x[i] > x[i - 1]))
                throw std::invalid_argument("crossing_point: curve x must be strictly increasing");
        }
        m.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        for (int i = 1; i < n - 1; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            a[i] = h0;
            b[i] = 2.0 * (h0 + h1);
            c[i] = h1;
            d[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for (int i = 2; i < n - 1; ++i) {
            const double f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            d[i] -= f * d[i - 1];
        }
        for (int i = n - 2; i >= 1; --i) m[i] = (d[i] - c[i] * (i + 1 < n - 1 ? m[i + 1] : 0.0)) / b[i];
    }

    double eval(double t) const {
        const int n = static_cast<int>(x.size());
        int i = static_cast<int>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
        i = std::clamp(i, 0, n - 2);
        const double h = x[i + 1] - x[i];
        const double u = (t - x[i]) / h;
        const double v = 1.0 - u;
        return v * y[i] + u * y[i + 1] +
               h * h / 6.0 * ((v * v * v - v) * m[i] + (u * u * u - u) * m[i + 1]);
    }
};

}  // namespace

CrossingResult crossing_point(std::span<const CurvePoint> a, std::span<const CurvePoint> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("crossing_point: curves need >= 2 points");
    const double lo = std::max(a.front().x, b.front().x);
    const double hi = std::min(a.back().x, b.back().x);
    if (!(hi > lo)) throw std::invalid_argument("crossing_point: no overlapping range");
    Spline sa, sb;
    sa.build(a);
    sb.build(b);
    auto diff = [&](double t) { return sa.eval(t) - sb.eval(t); };

    CrossingResult result;
    const int scan = 512;
    // identical curves: no unique crossing
    double max_abs_diff = 0.0, max_abs_y = 0.0;
    for (int i = 0; i <= scan; ++i) {
        const double t = lo + (hi - lo) * i / scan;
        max_abs_diff = std::max(max_abs_diff, std::abs(diff(t)));
        max_abs_y = std::max(max_abs_y, std::abs(sa.eval(t)));
    }
    if (max_abs_diff < 1e-12 * (1.0 + max_abs_y)) {
        result.ambiguous = true;
        return result;
    }
    double prev_t = lo, prev_d = diff(lo);
    for (int i = 1; i <= scan; ++i) {
        const double t = lo + (hi - lo) * i / scan;
        const double dv = diff(t);
        if (prev_d == 0.0) result.roots.push_back(prev_t);
        else if ((prev_d < 0.0) != (dv < 0.0)) {
            double x0 = prev_t, x1 = t, d0 = prev_d;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (x0 + x1);
                const double dm = diff(mid);
                if ((dm < 0.0) == (d0 < 0.0)) {
                    x0 = mid;
                    d0 = dm;
                } else {
                    x1 = mid;
                }
            }
            result.roots.push_back(0.5 * (x0 + x1));
        }
        prev_t = t;
        prev_d = dv;
    }
    result.ambiguous = result.roots.size() > 1;
    return result;
}

CrossingEstimate crossing_with_error(std::span<const CurvePoint> a, std::span<const CurvePoint> b,
                                     int resamples, std::uint64_t seed) {
    CrossingEstimate est;
    CrossingResult base = crossing_point(a, b);
    if (base.roots.empty()) return est;
    est.found = true;
    est.ambiguous = base.ambiguous;
    est.x_star = base.roots.front();

    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> roots;
    std::vector<CurvePoint> ra(a.begin(), a.end()), rb(b.begin(), b.end());
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < ra.size(); ++i) ra[i].y = a[i].y + gauss(rng) * a[i].err;
        for (std::size_t i = 0; i < rb.size(); ++i) rb[i].y = b[i].y + gauss(rng) * b[i].err;
        CrossingResult cr = crossing_point(ra, rb);
        if (!cr.roots.empty()) {
            // take the root closest to the base estimate
            double best = cr.roots.front();
            for (double t : cr.roots)
                if (std::abs(t - est.x_star) < std::abs(best - est.x_star)) best = t;
            roots.push_back(best);
        }
    }
    if (roots.size() >= 2) {
        double mean = 0.0;
        for (double t : roots) mean += t;
        mean /= roots.size();
        double acc = 0.0;
        for (double t : roots) acc += (t - mean) * (t - mean);
        est.err = std::sqrt(acc / (roots.size() - 1.0));
    }
    return est;
}

PowerLawExtrapolation extrapolate_sc(std::span<const CrossingPoint> crossings, int resamples,
                                     std::uint64_t seed) {
    if (crossings.size() < 3)
        throw std::invalid_argument("extrapolate_sc: need >= 3 crossings");

    auto fit_fixed_omega = [](std::span<const CrossingPoint> pts, double omega, double& x_c,
                              double& amp) {
        // weighted linear LS for x*(N) = x_c + amp * N^-omega
        double s_w = 0, s_wu = 0, s_wuu = 0, s_wy = 0, s_wuy = 0;
        for (const CrossingPoint& p : pts) {
            const double w = p.err > 0 ? 1.0 / (p.err * p.err) : 1.0;
            const double u = std::pow(p.n_sites, -omega);
            s_w += w;
            s_wu += w * u;
            s_wuu += w * u * u;
            s_wy += w * p.x_star;
            s_wuy += w * u * p.x_star;
        }
        const double det = s_w * s_wuu - s_wu * s_wu;
        if (std::abs(det) < 1e-30) {
            x_c = s_wy / s_w;
            amp = 0.0;
        } else {
            x_c = (s_wuu * s_wy - s_wu * s_wuy) / det;
            amp = (s_w * s_wuy - s_wu * s_wy) / det;
        }
        double chi2 = 0.0;
        for (const CrossingPoint& p : pts) {
            const double w = p.err > 0 ? 1.0 / (p.err * p.err) : 1.0;
            const double r = p.x_star - x_c - amp * std::pow(p.n_sites, -omega);
            chi2 += w * r * r;
        }
        return chi2;
    };

    auto solve = [&](std::span<const CrossingPoint> pts) {
        PowerLawExtrapolation res;
        double best_chi2 = std::numeric_limits<double>::infinity();
        for (double o = 0.1; o <= 4.0; o += 0.05) {
            double xc, amp;
            const double c = fit_fixed_omega(pts, o, xc, amp);
            if (c < best_chi2) {
                best_chi2 = c;
                res.omega = o;
            }
        }
        res.omega = golden_min(
            [&](double o) {
                double xc, amp;
                return fit_fixed_omega(pts, o, xc, amp);
            },
            std::max(0.02, res.omega - 0.05), std::min(6.0, res.omega + 0.05));
        double xc, amp;
        const double chi2 = fit_fixed_omega(pts, res.omega, xc, amp);
        res.x_c = xc;
        res.amplitude = amp;
        res.chi2_dof = chi2 / std::max<std::size_t>(1, pts.size() - 3);
        // flat chi2 in omega (constant crossings) leaves omega unconstrained
        double xc2 = 0.0, amp2 = 0.0;
        const double chi2_alt =
            fit_fixed_omega(pts, std::min(6.0, res.omega * 2.0 + 0.5), xc2, amp2);
        res.omega_unconstrained = std::abs(chi2_alt - chi2) < 1e-9 * std::max(1.0, chi2) ||
                                  std::abs(amp) < 1e-12;
        return res;
    };

    PowerLawExtrapolation base = solve(crossings);
    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> xcs;
    std::vector<CrossingPoint> sample(crossings.begin(), crossings.end());
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < sample.size(); ++i)
            sample[i].x_star = crossings[i].x_star + gauss(rng) * crossings[i].err;
        xcs.push_back(solve(sample).x_c);
    }
    if (xcs.size() >= 2) {
        double mean = 0.0;
        for (double v : xcs) mean += v;
        mean /= xcs.size();
        double acc = 0.0;
        for (double v : xcs) acc += (v - mean) * (v - mean);
        base.x_c_err = std::sqrt(acc / (xcs.size() - 1.0));
    }
    return base;
}

}  // namespace anneal
