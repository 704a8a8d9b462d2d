#include "anneal/classical.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "anneal/rng.hpp"

namespace anneal {

namespace {

struct Adjacency {
    std::vector<std::int32_t> offset;
    std::vector<std::int32_t> neighbor;
    std::vector<double> coupling;

    void build(const CouplingGraph& g) {
        offset.assign(g.n + 1, 0);
        for (const Edge& e : g.edges) {
            ++offset[e.i + 1];
            ++offset[e.j + 1];
        }
        for (int i = 0; i < g.n; ++i) offset[i + 1] += offset[i];
        neighbor.resize(offset[g.n]);
        coupling.resize(offset[g.n]);
        std::vector<std::int32_t> cursor(offset.begin(), offset.end() - 1);
        for (const Edge& e : g.edges) {
            neighbor[cursor[e.i]] = e.j;
            coupling[cursor[e.i]++] = e.coupling;
            neighbor[cursor[e.j]] = e.i;
            coupling[cursor[e.j]++] = e.coupling;
        }
    }
};

double u01(std::mt19937_64& rng) { return (rng() >> 11) * (1.0 / 9007199254740992.0); }

void metropolis_pass(std::span<std::int8_t> spins, const Adjacency& adj, int n,
                     double temperature, std::mt19937_64& rng, double* energy) {
    const double inv_t = 1.0 / temperature;
    for (int attempt = 0; attempt < n; ++attempt) {
        const int i = static_cast<int>(rng() % n);
        double local = 0.0;
        for (int k = adj.offset[i]; k < adj.offset[i + 1]; ++k)
            local += adj.coupling[k] * spins[adj.neighbor[k]];
        const double delta = -2.0 * spins[i] * local;
        if (delta <= 0.0 || u01(rng) < std::exp(-delta * inv_t)) {
            spins[i] = static_cast<std::int8_t>(-spins[i]);
            if (energy) *energy += delta;
        }
    }
}

void swendsen_wang_pass(std::span<std::int8_t> spins, const CouplingGraph& graph,
                        double temperature, std::mt19937_64& rng) {
    const int n = graph.n;
    static thread_local std::vector<std::int32_t> parent, size;
    parent.resize(n);
    size.assign(n, 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Edge& e : graph.edges) {
        // satisfied: J*s_i*s_j < 0 (energy-lowering bond)
        if (e.coupling * spins[e.i] * spins[e.j] >= 0.0) continue;
        const double p = 1.0 - std::exp(-2.0 * std::abs(e.coupling) / temperature);
        if (u01(rng) >= p) continue;
        int a = find(e.i), b = find(e.j);
        if (a == b) continue;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
    static thread_local std::vector<std::uint8_t> flip;
    flip.resize(n);
    for (int i = 0; i < n; ++i)
        if (parent[i] == i) flip[i] = static_cast<std::uint8_t>(rng() & 1);
    for (int i = 0; i < n; ++i)
        if (flip[find(i)]) spins[i] = static_cast<std::int8_t>(-spins[i]);
}

}  // namespace

void metropolis_sweep(std::span<std::int8_t> spins, const CouplingGraph& graph,
                      double temperature, std::mt19937_64& rng, double* energy) {
    if (temperature <= 0.0) throw std::invalid_argument("metropolis_sweep: T must be > 0");
    if (static_cast<int>(spins.size()) != graph.n)
        throw std::invalid_argument("metropolis_sweep: spin count mismatch");
    static thread_local Adjacency adj;
    adj.build(graph);
    metropolis_pass(spins, adj, graph.n, temperature, rng, energy);
}

void swendsen_wang_sweep(std::span<std::int8_t> spins, const CouplingGraph& graph,
                         double temperature, std::mt19937_64& rng) {
    if (temperature <= 0.0) throw std::invalid_argument("swendsen_wang_sweep: T must be > 0");
    if (static_cast<int>(spins.size()) != graph.n)
        throw std::invalid_argument("swendsen_wang_sweep: spin count mismatch");
    swendsen_wang_pass(spins, graph, temperature, rng);
}

ObservableSeries run_thermal_quench(const CouplingGraph& graph, const ThermalProtocol& protocol,
                                    const ThermalPlan& plan, std::uint64_t seed) {
    if (!(protocol.t_start > protocol.t_end && protocol.t_end > 0.0))
        throw std::invalid_argument("run_thermal_quench: need T_start > T_end > 0");
    const int n = graph.n;
    const long equil = plan.equilibration_sweeps >= 0 ? plan.equilibration_sweeps
                                                      : std::max(100L, 10L * n);
    const std::vector<int> grid = protocol.measure_grid();
    const int total_sweeps = protocol.sweeps();
    const bool use_sw = protocol.update == ThermalProtocol::Update::swendsen_wang;
    Adjacency adj;
    adj.build(graph);

    std::vector<BinnedAccumulator> acc_q2(grid.size()), acc_q4(grid.size()), acc_mz2(grid.size());
    for (int rep = 0; rep < std::max(1, plan.repeats); ++rep) {
        auto rng_a = make_engine(child_seed(seed, 2 * rep + 1));
        auto rng_b = make_engine(child_seed(seed, 2 * rep + 2));
        std::vector<std::int8_t> spins_a(n), spins_b(n);
        for (int i = 0; i < n; ++i) spins_a[i] = (rng_a() & 1) ? std::int8_t{1} : std::int8_t{-1};
        for (int i = 0; i < n; ++i) spins_b[i] = (rng_b() & 1) ? std::int8_t{1} : std::int8_t{-1};

        auto one_sweep = [&](std::vector<std::int8_t>& spins, std::mt19937_64& rng, double t) {
            if (use_sw)
                swendsen_wang_pass(spins, graph, t, rng);
            else
                metropolis_pass(spins, adj, n, t, rng, nullptr);
        };
        for (long k = 0; k < equil; ++k) {
            one_sweep(spins_a, rng_a, protocol.t_start);
            one_sweep(spins_b, rng_b, protocol.t_start);
        }
        std::size_t g = 0;
        for (int sweep = 1; sweep <= total_sweeps; ++sweep) {
            const double t = protocol.t_at(sweep);
            one_sweep(spins_a, rng_a, t);
            one_sweep(spins_b, rng_b, t);
            while (g < grid.size() && grid[g] == sweep) {
                const double q = overlap_q(spins_a, spins_b);
                const double ma = magnetization(spins_a);
                const double mb = magnetization(spins_b);
                acc_q2[g].add(q * q);
                acc_q4[g].add(q * q * q * q);
                acc_mz2[g].add(0.5 * (ma * ma + mb * mb));
                ++g;
            }
        }
    }

    ObservableSeries series;
    series.protocol_kind = "thermal";
    series.graph_hash = graph_hash(graph);
    series.n_sites = n;
    series.velocity = protocol.velocity;
    series.m = total_sweeps;
    series.update_kind = use_sw ? "swendsen-wang" : "metropolis";
    series.seed = seed;
    series.points.resize(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
        SeriesPoint& p = series.points[t];
        p.tau = grid[t];
        p.s_or_t = protocol.t_at(grid[t]);
        p.q2 = acc_q2[t].mean();
        p.q2_err = acc_q2[t].error();
        p.q4 = acc_q4[t].mean();
        p.q4_err = acc_q4[t].error();
        p.mz2 = acc_mz2[t].mean();
        p.mz2_err = acc_mz2[t].error();
        p.n_samples = acc_q2[t].count();
    }
    return series;
}

}  // namespace anneal
