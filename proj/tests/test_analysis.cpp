#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "anneal/analysis.hpp"
#include "anneal/rng.hpp"

using namespace anneal;

namespace {

// exact scaling law y = N^-b0 * f(v*N^k0) with a smooth crossover f
std::vector<CollapsePoint> synthetic_points(double b0, double k0, double noise,
                                            std::uint64_t seed, double slope = 1.0 / 3.0) {
    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<CollapsePoint> pts;
    for (double n : {16.0, 32.0, 64.0, 128.0}) {
        for (double x = 0.1; x < 120.0; x *= 2.2) {
            CollapsePoint p;
            p.n_sites = n;
            p.velocity = x / std::pow(n, k0);
            const double f = std::pow(1.0 + x, -slope);
            p.value = std::pow(n, -b0) * f;
            p.error = std::max(noise * p.value, 1e-12);
            if (noise > 0) p.value += gauss(rng) * p.error;
            pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("exponent bookkeeping and constants") {
    CHECK(constants::t_c_3regular == doctest::Approx(1.134593).epsilon(1e-6));

    ExponentSet cls = constants::classical_3regular();
    CHECK(cls.kz_exponent() == doctest::Approx(1.0));
    CHECK(kz_slope(cls) == doctest::Approx(1.0 / 3.0));

    ExponentSet mf = constants::mean_field_transverse_field();
    CHECK(mf.kz_exponent() == doctest::Approx(0.75));
    CHECK(mf.beta_over_nu_prime() == doctest::Approx(0.5));

    // chain with Hamiltonian dynamics: z=1, nu=1, beta=1/8, d=1
    ExponentSet chain{constants::chain_beta, nu_prime_from(constants::chain_nu, 1.0),
                      z_prime_from(constants::chain_z_hamiltonian, 1.0), 1.0, 0};
    CHECK(chain.kz_exponent() == doctest::Approx(2.0));
    CHECK(kz_slope(chain) == doctest::Approx(0.375));

    // fitted quantum 3-regular values
    ExponentSet q3{0.43, 1.0, 1.34 - 1.0, 1.0, 0};  // beta/nu'=0.43 via nu'=1 trick
    CHECK(kz_slope(q3) == doctest::Approx((1.0 - 2.0 * 0.43) / 1.34).epsilon(1e-12));
    CHECK((1.0 - 2.0 * 0.43) / 1.34 == doctest::Approx(0.104478).epsilon(1e-4));

    auto meas = constants::measured_quantum_3regular();
    CHECK(meas.beta_over_nu_prime == 0.43);
    CHECK(meas.kz == 1.34);
    auto fc = constants::measured_fully_connected();
    CHECK(fc.beta_over_nu_prime == 0.47);
    CHECK(fc.kz == 0.83);
    CHECK(constants::s_c_3regular == 0.3565);
    CHECK(constants::crossing_alpha == doctest::Approx(17.0 / 12.0));

    SUBCASE("conversion round trips") {
        for (double d : {1.0, 2.0, 6.0, 8.0}) {
            CHECK(nu_from_primed(nu_prime_from(0.63, d), d) == doctest::Approx(0.63));
            CHECK(z_from_primed(z_prime_from(2.17, d), d) == doctest::Approx(2.17));
        }
    }
}

TEST_CASE("schedule velocity") {
    CHECK(schedule_velocity(64, 17.0 / 12.0, 1.0) == doctest::Approx(2.7621e-3).epsilon(1e-4));
    CHECK(schedule_velocity(64, 0.0, 0.37) == doctest::Approx(0.37));
    // a posteriori rule: alpha exceeds the measured KZ exponent
    CHECK(17.0 / 12.0 > 1.34);
}

TEST_CASE("collapse recovers planted exponents") {
    auto pts = synthetic_points(0.5, 1.5, 0.004, 9);
    CollapseOptions opts;
    opts.degree = 5;
    CollapseResult fit = collapse_fit(pts, opts);
    REQUIRE(fit.converged);
    CHECK(std::abs(fit.b - 0.5) < 0.01 * 0.5 + 0.01);
    CHECK(std::abs(fit.k - 1.5) < 0.01 * 1.5 + 0.015);

    SUBCASE("bootstrap errors bracket the truth") {
        auto sets = parametric_resamples(pts, 60, 4);
        CollapseResult boot = collapse_fit_bootstrap(pts, opts, sets);
        CHECK(boot.b_err > 0.0);
        CHECK(boot.k_err > 0.0);
        CHECK(std::abs(boot.b - 0.5) < 4.0 * boot.b_err + 0.01);
        CHECK(std::abs(boot.k - 1.5) < 4.0 * boot.k_err + 0.02);
    }
    SUBCASE("fixing one exponent still recovers the other") {
        CollapseOptions fixed = opts;
        fixed.fix_b = true;
        fixed.b_fixed = 0.5;
        CollapseResult f2 = collapse_fit(pts, fixed);
        CHECK(f2.b == 0.5);
        CHECK(std::abs(f2.k - 1.5) < 0.02);
    }
    SUBCASE("noise-free self-consistency at 1%") {
        auto clean = synthetic_points(0.5, 1.5, 0.0, 1);
        for (auto& p : clean) p.error = 1e-4 * p.value;
        CollapseResult f3 = collapse_fit(clean, opts);
        CHECK(std::abs(f3.b - 0.5) < 0.005);
        CHECK(std::abs(f3.k - 1.5) < 0.015);
    }
}

TEST_CASE("collapse input validation") {
    CollapseOptions opts;
    std::vector<CollapsePoint> two_sizes;
    for (double n : {16.0, 32.0})
        for (double v : {0.1, 0.2, 0.4, 0.8})
            two_sizes.push_back({n, v, 0.5, 0.01});
    CHECK_THROWS_AS(collapse_fit(two_sizes, opts), std::invalid_argument);

    std::vector<CollapsePoint> three_velocities;
    for (double n : {16.0, 32.0, 64.0})
        for (double v : {0.1, 0.2, 0.4})
            three_velocities.push_back({n, v, 0.5, 0.01});
    CHECK_THROWS_AS(collapse_fit(three_velocities, opts), std::invalid_argument);

    std::vector<CollapsePoint> negative = synthetic_points(0.5, 1.5, 0.0, 1);
    negative[0].value = -1.0;
    CHECK_THROWS_AS(collapse_fit(negative, opts), std::invalid_argument);
}

TEST_CASE("collapse self-consistency on refitted master-curve data") {
    auto pts = synthetic_points(0.5, 1.5, 0.004, 10);
    CollapseOptions opts;
    opts.degree = 5;
    CollapseResult fit = collapse_fit(pts, opts);
    // regenerate data from the fitted master curve and refit
    std::vector<CollapsePoint> regen = pts;
    for (CollapsePoint& p : regen) {
        const double x = std::log(p.velocity) + fit.k * std::log(p.n_sites);
        p.value = std::exp(fit.master_curve(x) - fit.b * std::log(p.n_sites));
        p.error = 0.002 * p.value;
    }
    CollapseResult refit = collapse_fit(regen, opts);
    CHECK(std::abs(refit.b - fit.b) < 0.02);
    CHECK(std::abs(refit.k - fit.k) < 0.03);
}

TEST_CASE("slope verification") {
    SUBCASE("pure power law is recovered to machine precision") {
        std::vector<CollapsePoint> pts;
        for (double n : {16.0, 32.0, 64.0}) {
            for (double x = 1.0; x < 300.0; x *= 2.0) {
                CollapsePoint p;
                p.n_sites = n;
                p.velocity = x / std::pow(n, 1.0);
                p.value = std::pow(n, -2.0 / 3.0) * std::pow(x, -1.0 / 3.0);
                p.error = 1e-9 * p.value;
                pts.push_back(p);
            }
        }
        CollapseOptions opts;
        opts.fix_b = true;
        opts.b_fixed = 2.0 / 3.0;
        opts.fix_k = true;
        opts.k_fixed = 1.0;
        opts.degree = 3;
        CollapseResult fit = collapse_fit(pts, opts);
        SlopeCheck check = verify_slope(pts, fit, kz_slope(constants::classical_3regular()));
        CHECK(check.slope == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
        CHECK(check.agrees);
    }
    SUBCASE("high-velocity saturation points are excluded and the slope survives") {
        auto rng = make_engine(12);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<CollapsePoint> pts;
        for (double n : {16.0, 32.0, 64.0, 128.0}) {
            for (double x = 1.0; x < 300.0; x *= 2.0) {
                CollapsePoint p;
                p.n_sites = n;
                p.velocity = x / n;
                p.value = std::pow(n, -2.0 / 3.0) * std::pow(x, -1.0 / 3.0);
                p.error = 0.002 * p.value;
                p.value += gauss(rng) * p.error;
                pts.push_back(p);
            }
        }
        // deliberate saturation: size-independent plateau at very high velocity
        for (double n : {16.0, 32.0, 64.0, 128.0}) {
            CollapsePoint p;
            p.n_sites = n;
            p.velocity = 3000.0 / std::pow(n, 1.0);
            p.value = 0.02;  // far off the master curve
            p.error = 0.0005;
            pts.push_back(p);
        }
        CollapseOptions opts;
        opts.fix_b = true;
        opts.b_fixed = 2.0 / 3.0;
        opts.fix_k = true;
        opts.k_fixed = 1.0;
        opts.degree = 5;
        CollapseResult fit = collapse_fit(pts, opts);
        CHECK(fit.excluded.size() >= 3);
        SlopeCheck check = verify_slope(pts, fit, 1.0 / 3.0, 0.0);
        CHECK(std::abs(check.slope - 1.0 / 3.0) < 0.05);
    }
}

TEST_CASE("crossing point extraction") {
    auto make_curve = [](auto fn, double err = 0.0) {
        std::vector<CurvePoint> c;
        for (double x = 0.0; x <= 1.0; x += 0.05) c.push_back({x, fn(x), err});
        return c;
    };
    SUBCASE("linear curves cross where algebra says") {
        auto a = make_curve([](double s) { return s; });
        auto b = make_curve([](double s) { return 2.0 * s - 0.1; });
        CrossingResult r = crossing_point(a, b);
        REQUIRE(r.roots.size() == 1);
        CHECK(r.roots[0] == doctest::Approx(0.1).epsilon(1e-6));
        CHECK_FALSE(r.ambiguous);

        SUBCASE("symmetric under argument swap") {
            CrossingResult rs = crossing_point(b, a);
            REQUIRE(rs.roots.size() == 1);
            CHECK(rs.roots[0] == doctest::Approx(r.roots[0]).epsilon(1e-9));
        }
    }
    SUBCASE("identical curves have no unique crossing") {
        auto a = make_curve([](double s) { return 0.3 + 0.1 * s; });
        CrossingResult r = crossing_point(a, a);
        CHECK(r.roots.empty());
        CHECK(r.ambiguous);
    }
    SUBCASE("multiple crossings are all reported and flagged") {
        auto a = make_curve([](double s) { return std::sin(12.0 * s); });
        auto b = make_curve([](double) { return 0.0; });
        CrossingResult r = crossing_point(a, b);
        CHECK(r.roots.size() > 1);
        CHECK(r.ambiguous);
    }
    SUBCASE("bootstrap errors from noisy curves") {
        auto a = make_curve([](double s) { return s; }, 0.01);
        auto b = make_curve([](double s) { return 2.0 * s - 0.1; }, 0.01);
        CrossingEstimate est = crossing_with_error(a, b, 200, 3);
        REQUIRE(est.found);
        CHECK(est.err > 0.0);
        CHECK(std::abs(est.x_star - 0.1) < 4.0 * est.err);
    }
}

TEST_CASE("power-law extrapolation of crossings") {
    SUBCASE("exact recovery of s*(N) = 0.35 + 1/N") {
        std::vector<CrossingPoint> pts;
        for (double n : {64.0, 128.0, 192.0, 256.0})
            pts.push_back({n, 0.35 + 1.0 / n, 1e-5});
        PowerLawExtrapolation ext = extrapolate_sc(pts, 50, 2);
        CHECK(ext.x_c == doctest::Approx(0.35).epsilon(1e-4));
        CHECK(ext.omega == doctest::Approx(1.0).epsilon(0.05));
        CHECK_FALSE(ext.omega_unconstrained);
    }
    SUBCASE("constant crossings flag omega as unconstrained") {
        std::vector<CrossingPoint> pts;
        for (double n : {64.0, 128.0, 192.0}) pts.push_back({n, 0.42, 1e-6});
        PowerLawExtrapolation ext = extrapolate_sc(pts, 50, 2);
        CHECK(ext.x_c == doctest::Approx(0.42).epsilon(1e-6));
        CHECK(ext.omega_unconstrained);
    }
    SUBCASE("too few crossings rejected") {
        std::vector<CrossingPoint> pts{{64.0, 0.4, 0.01}, {128.0, 0.39, 0.01}};
        CHECK_THROWS_AS(extrapolate_sc(pts, 10, 1), std::invalid_argument);
    }
}
