#include <doctest.h>

#include <stdexcept>

#include <chrono>
#include <ctime>
#include <cmath>

#include "anneal/oracle.hpp"
#include "anneal/qmc.hpp"
#include "anneal/rng.hpp"

using namespace anneal;

namespace {

CouplingGraph single_edge(double coupling) {
    CouplingGraph g;
    g.n = 2;
    g.kind = GraphKind::complete;
    g.edges = {{0, 1, coupling}};
    return g;
}

bool same_configuration(const OperatorString& a, const OperatorString& b) {
    if (a.string_length() != b.string_length()) return false;
    if (a.right_boundary() != b.right_boundary()) return false;
    for (int p = 0; p < a.string_length(); ++p) {
        if (a.slot(p).kind != b.slot(p).kind || a.slot(p).index != b.slot(p).index) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("protocol construction") {
    auto p = QuenchProtocol::hamiltonian(64, 0.0, 0.5, 0.001, 1.0, 16);
    // m = round(N * ds / v), velocity recomputed so s_m = s_end exactly
    CHECK(p.m == 32000);
    CHECK(p.s_at(p.m) == doctest::Approx(0.5));
    CHECK(p.s_at(0) == doctest::Approx(0.0));
    CHECK(p.velocity == doctest::Approx(64.0 * 0.5 / p.m));
    CHECK(p.tau_grid.front() == 0);
    CHECK(p.tau_grid.back() == p.m);
    // palindromic slot schedule
    CHECK(p.slot_s(1) == doctest::Approx(p.slot_s(2 * p.m)));
    CHECK(p.slot_s(p.m) == doctest::Approx(p.slot_s(p.m + 1)));

    CHECK_THROWS_AS(QuenchProtocol::hamiltonian(8, 0.5, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(QuenchProtocol::hamiltonian(8, 0.0, 0.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(QuenchProtocol::simulation_time(8, 0.0, 0.1), std::invalid_argument);

    auto sim = QuenchProtocol::simulation_time(8, 0.5, 0.01);
    CHECK(sim.m == 4 * 64);
    CHECK(sim.tau_grid == std::vector<int>{sim.m});
    // m >= 1 even for huge velocity
    CHECK(QuenchProtocol::hamiltonian(4, 0.0, 0.5, 100.0).m == 1);
}

TEST_CASE("initial configuration is deterministic and legal") {
    ModelSpec model = make_model(generate_regular_graph(6, 3, 9), 1.0);
    auto protocol = QuenchProtocol::hamiltonian(6, 0.0, 0.5, 0.05, 1.0, 8);
    OperatorString a(model, protocol, 42);
    OperatorString b(model, protocol, 42);
    CHECK(same_configuration(a, b));
    CHECK(a.legal_configuration());
    OperatorString c(model, protocol, 43);
    CHECK_FALSE(same_configuration(a, c));

    SUBCASE("m=1, n=2: one-slot string, boundaries equal with no flips") {
        ModelSpec tiny = make_model(single_edge(1.0), 1.0);
        auto p1 = QuenchProtocol::hamiltonian(2, 0.0, 0.5, 10.0);
        REQUIRE(p1.m == 1);
        OperatorString s(tiny, p1, 7);
        CHECK(s.legal_configuration());
        CHECK(s.left_boundary() == s.right_boundary());
    }
}

TEST_CASE("sweeps preserve legality and positive weight") {
    ModelSpec model = make_model(generate_regular_graph(6, 3, 5), 1.0);
    auto protocol = QuenchProtocol::hamiltonian(6, 0.0, 1.0, 0.1, 1.0, 8);  // includes s = 1 slot
    OperatorString state(model, protocol, 3);
    for (int k = 0; k < 200; ++k) {
        state.sweep(k % 2 ? UpdateKind::cluster : UpdateKind::local);
        REQUIRE(state.legal_configuration());
    }
    CHECK(std::isfinite(state.log_weight()));
}

TEST_CASE("s=0 string holds only site operators") {
    ModelSpec model = make_model(make_chain(4), 1.0);
    auto protocol = QuenchProtocol::simulation_time(4, 0.5, 0.1);
    OperatorString state(model, protocol, 1);
    state.set_uniform_s(0.0);
    for (int k = 0; k < 10; ++k) state.sweep(UpdateKind::cluster);
    for (int p = 0; p < state.string_length(); ++p)
        CHECK(state.slot(p).kind != OperatorString::Slot::Kind::bond);
}

TEST_CASE("cluster update decorrelates free spins at s=0") {
    // with no bonds every segment flips independently: boundary magnetization
    // averages to zero
    ModelSpec model = make_model(make_chain(8), 1.0);
    auto protocol = QuenchProtocol::simulation_time(8, 0.5, 0.1);
    OperatorString state(model, protocol, 2);
    state.set_uniform_s(0.0);
    double acc = 0.0;
    const int sweeps = 4000;
    for (int k = 0; k < sweeps; ++k) {
        state.sweep(UpdateKind::cluster);
        double m = 0.0;
        for (std::int8_t s : state.right_boundary()) m += s;
        acc += m / 8.0;
    }
    CHECK(std::abs(acc / sweeps) < 5.0 / std::sqrt(double(sweeps)));
}

TEST_CASE("measurement API") {
    ModelSpec model = make_model(generate_regular_graph(6, 3, 5), 1.0);
    auto protocol = QuenchProtocol::hamiltonian(6, 0.0, 0.5, 0.05, 1.0, 8);
    ReplicaPair pair(model, protocol, 77);
    std::vector<int> bad{protocol.m + 1};
    CHECK_THROWS_AS(measure(pair, bad), std::out_of_range);
    std::vector<int> bad2{-1};
    CHECK_THROWS_AS(measure(pair, bad2), std::out_of_range);

    auto samples = measure(pair, protocol.tau_grid);
    REQUIRE(samples.size() == protocol.tau_grid.size());
    for (const auto& s : samples) {
        CHECK(s.q2 >= 0.0);
        CHECK(s.q2 <= 1.0);
        CHECK(s.q4 <= s.q2 + 1e-12);  // |q| <= 1 pointwise
        CHECK(s.mz2 >= 0.0);
    }

    SUBCASE("swapping replicas leaves pair samples invariant") {
        ReplicaPair p2(model, protocol, 77);
        std::swap(p2.first, p2.second);
        auto swapped = measure(p2, protocol.tau_grid);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            CHECK(samples[i].q2 == doctest::Approx(swapped[i].q2));
            CHECK(samples[i].q4 == doctest::Approx(swapped[i].q4));
            CHECK(samples[i].mz2 == doctest::Approx(swapped[i].mz2));
        }
    }
}

TEST_CASE("run_quench at m=1 stays near uncorrelated overlap") {
    ModelSpec model = make_model(generate_regular_graph(8, 3, 11), 1.0);
    auto protocol = QuenchProtocol::hamiltonian(8, 0.0, 0.5, 100.0, 1.0, 1);
    REQUIRE(protocol.m == 1);
    SamplingPlan plan;
    plan.sweeps = 20000;
    plan.therm_sweeps = 100;
    ObservableSeries series = run_quench(model, protocol, plan, 13);
    const double oracle_q2 =
        oracle::exact_asymmetric_expectation(model, protocol, oracle::Observable::q2, 1);
    CHECK(std::abs(oracle_q2 - 1.0 / 8.0) < 0.15 / 8.0);  // no evolution possible
    const SeriesPoint& last = series.points.back();
    CHECK(std::abs(last.q2 - oracle_q2) < 3.5 * last.q2_err);
}

TEST_CASE("simulation-time quench limits") {
    // one-sweep quench: essentially the s=0 state, far below the critical
    // equilibrium magnetization (~6.4/N at N=16); the uncorrelated floor is 1/N
    ModelSpec model = make_model(make_chain(16), 1.0);
    for (UpdateKind update : {UpdateKind::cluster, UpdateKind::local}) {
        CAPTURE(to_string(update));
        BinnedAccumulator acc;
        for (int rep = 0; rep < 200; ++rep) {
            auto sample =
                run_simulation_time_quench(model, 0.5, 0.6, update, child_seed(99, rep));
            CHECK(sample.sweeps_used == 1);
            CHECK(sample.s_final == doctest::Approx(0.5));
            acc.add(sample.mz2);
        }
        CHECK(acc.mean() < 3.0 / 16.0);
        CHECK(acc.mean() > 1.0 / 16.0 - 4.0 * acc.error());
    }
}

TEST_CASE("run_quench rejects simulation-time protocols") {
    ModelSpec model = make_model(make_chain(4), 1.0);
    auto protocol = QuenchProtocol::simulation_time(4, 0.5, 0.1);
    SamplingPlan plan;
    CHECK_THROWS_AS(run_quench(model, protocol, plan, 1), std::invalid_argument);
}

TEST_CASE("sweep cost scales with the string length") {
    ModelSpec model = make_model(make_chain(16), 1.0);
    auto time_per_sweep = [&](int m_target, int sweeps) {
        auto protocol = QuenchProtocol::hamiltonian(16, 0.0, 0.5, 16.0 * 0.5 / m_target, 1.0, 4);
        REQUIRE(protocol.m == m_target);
        OperatorString state(model, protocol, 5);
        for (int k = 0; k < 3; ++k) state.sweep(UpdateKind::cluster);  // warm up
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const std::clock_t t0 = std::clock();
            for (int k = 0; k < sweeps; ++k) state.sweep(UpdateKind::cluster);
            const std::clock_t t1 = std::clock();
            best = std::min(best, double(t1 - t0) / CLOCKS_PER_SEC / sweeps);
        }
        return best;
    };
    // CPU time, batch sizes sized for clock granularity
    const double small = time_per_sweep(1 << 12, 600);
    const double large = time_per_sweep(1 << 16, 40);
    CHECK(large / small > 4.0);    // 16x the slots should cost clearly more
    CHECK(large / small < 64.0);   // and not explode superlinearly
}
