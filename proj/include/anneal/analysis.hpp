#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace anneal {

// --- exponent bookkeeping ---------------------------------------------------

// Primed exponents are the computational currency on random graphs:
// nu' = nu*d, z' = z/d, with d = d_u used only when converting for reports.
struct ExponentSet {
    double beta = 1.0;
    double nu_prime = 1.0;
    double z_prime = 1.0;
    double r = 1.0;  // quench power
    int d_u = 0;     // 0: no finite-dimensional interpretation

    double beta_over_nu_prime() const { return beta / nu_prime; }
    // k = z'*r + 1/nu': exponent of the characteristic velocity N^-k
    double kz_exponent() const { return z_prime * r + 1.0 / nu_prime; }
};

double nu_prime_from(double nu, double d);
double nu_from_primed(double nu_prime, double d);
double z_prime_from(double z, double d);
double z_from_primed(double z_prime, double d);

// Asymptotic log-log slope of the collapsed master curve,
// x = (1 - 2*beta/nu') / (z'*r + 1/nu').
double kz_slope(const ExponentSet& e);

// v = v0 * N^-alpha
double schedule_velocity(double n_sites, double alpha, double v0);

// Reference constants used in tests and reports.
namespace constants {
// classical antiferromagnet on 3-regular graphs
extern const double t_c_3regular;          // -2/ln[1 - 2/(1+sqrt(2))]
ExponentSet classical_3regular();          // beta=1, nu'=3, z'=2/3 (d_u=6)
ExponentSet mean_field_transverse_field(); // beta=1, nu'=2, z'=1/4 (d_u=8)
// measured values with uncertainties: {value, error}
struct Measured {
    double beta_over_nu_prime, beta_over_nu_prime_err;
    double kz, kz_err;
};
Measured measured_quantum_3regular();   // 0.43(2), 1.34(11)
Measured measured_fully_connected();    // 0.47(3), 0.83(12)
extern const double s_c_3regular;       // 0.3565
extern const double s_c_3regular_err;   // 0.0012
// periodic chain in a transverse field (d=2 classical Ising statics)
extern const double chain_beta;         // 1/8
extern const double chain_nu;           // 1
extern const double chain_z_hamiltonian;    // 1
extern const double chain_z_local_sim;      // 2.17
extern const double chain_z_cluster_sim;    // 0.30
extern const double crossing_alpha;     // 17/12 schedule exponent
}  // namespace constants

// --- data collapse ----------------------------------------------------------

struct CollapsePoint {
    double n_sites = 0;
    double velocity = 0;
    double value = 0;   // observable, > 0
    double error = 0;
};

struct CollapseWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct CollapseOptions {
    double power = 1.0;  // quench power r (interpretation only)
    int degree = 0;      // master-curve degree; 0 selects by cross-validation in {3..7}
    CollapseWindow window;  // in x = ln(v*N^k)
    bool fix_b = false;
    double b_fixed = 0.0;
    bool fix_k = false;
    double k_fixed = 0.0;
    double b_min = 0.0, b_max = 2.0;
    double k_min = 0.05, k_max = 4.0;
    int grid_points = 25;
    bool auto_exclude_high_v = true;  // drop high-x points with >3 sigma residuals
};

struct CollapseResult {
    double b = 0.0;       // 2*beta/nu'
    double k = 0.0;       // z'*r + 1/nu'
    double b_err = 0.0;
    double k_err = 0.0;
    Eigen::VectorXd coeffs;  // polynomial in t = (x - x_center)/x_scale
    double x_center = 0.0, x_scale = 1.0;
    int degree = 5;
    double chi2_dof = 0.0;
    CollapseWindow window;
    std::vector<int> excluded;  // indices dropped by the high-velocity rule
    int points_used = 0;
    bool converged = true;

    double master_curve(double x) const;  // value of the fitted polynomial
};

// Minimizes chi^2 of ln(y*N^b) against a polynomial in ln(v*N^k); coarse
// exponent grid followed by coordinate refinement. Throws
// std::invalid_argument on insufficient data (< 3 sizes or < 4 velocities
// per size).
CollapseResult collapse_fit(std::span<const CollapsePoint> points, const CollapseOptions& opts);

// Fit per resampled point set; fills b_err/k_err of the base fit.
CollapseResult collapse_fit_bootstrap(std::span<const CollapsePoint> points,
                                      const CollapseOptions& opts,
                                      std::span<const std::vector<CollapsePoint>> resamples);

// Gaussian perturbation of point values by their errors (for parametric
// bootstrap and synthetic tests).
std::vector<std::vector<CollapsePoint>> parametric_resamples(
    std::span<const CollapsePoint> points, int count, std::uint64_t seed);

// --- master-curve slope check -----------------------------------------------

struct SlopeCheck {
    double slope = 0.0;       // -d ln f / d ln x over the window (reported positive)
    double slope_err = 0.0;
    double expected = 0.0;    // kz_slope value
    bool agrees = false;      // within joint 2 sigma
    int points_used = 0;
    CollapseWindow window;
};

// Straight-line fit to the collapsed data in log-log space over the
// power-law window; compares against Eq.-(8)-style expectation.
// Window defaults to the upper half of the retained x range.
SlopeCheck verify_slope(std::span<const CollapsePoint> points, const CollapseResult& fit,
                        double expected_x, double expected_x_err = 0.0,
                        CollapseWindow window = {});

// --- Binder crossings and extrapolation --------------------------------------

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
};

struct CrossingResult {
    std::vector<double> roots;
    bool ambiguous = false;  // more than one sign change
};

// Roots of (A - B)(x) over the overlapping x range via cubic-spline
// interpolation and bisection. Curves must be sorted in x.
CrossingResult crossing_point(std::span<const CurvePoint> a, std::span<const CurvePoint> b);

struct CrossingEstimate {
    double x_star = 0.0;
    double err = 0.0;
    bool found = false;
    bool ambiguous = false;
};

// Crossing with parametric-bootstrap error from the curve error bars.
CrossingEstimate crossing_with_error(std::span<const CurvePoint> a, std::span<const CurvePoint> b,
                                     int resamples = 200, std::uint64_t seed = 1);

struct CrossingPoint {
    double n_sites = 0.0;
    double x_star = 0.0;
    double err = 0.0;
};

struct PowerLawExtrapolation {
    double x_c = 0.0;     // extrapolated crossing value
    double x_c_err = 0.0;
    double amplitude = 0.0;
    double omega = 0.0;
    double chi2_dof = 0.0;
    bool omega_unconstrained = false;
};

// Weighted fit of x*(N) = x_c + c*N^-omega with bootstrap errors.
// Requires >= 3 crossings.
PowerLawExtrapolation extrapolate_sc(std::span<const CrossingPoint> crossings,
                                     int resamples = 200, std::uint64_t seed = 1);

}  // namespace anneal
