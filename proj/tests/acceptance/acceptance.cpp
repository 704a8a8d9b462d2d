// Acceptance suite: runs each shipping criterion end to end against pinned
// tolerances and prints one PASS/FAIL line per criterion. Ensembles are
// cached as JSONL under the work directory, so reruns only verify.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "anneal/analysis.hpp"
#include "anneal/classical.hpp"
#include "anneal/ensemble.hpp"
#include "anneal/graph.hpp"
#include "anneal/observables.hpp"
#include "anneal/oracle.hpp"
#include "anneal/qmc.hpp"
#include "anneal/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anneal;

namespace {

fs::path g_work = "acceptance_work";
int g_workers = 0;

struct CriterionResult {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok: " : "FAIL: ") + what);
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// --- cached fixed-instance quench runs -----------------------------------------

std::vector<ObservableSeries> fixed_instance_runs(const CouplingGraph& graph,
                                                  const QuenchProtocol& protocol,
                                                  const SamplingPlan& plan, int count,
                                                  std::uint64_t seed0, const std::string& name) {
    const fs::path path = g_work / (name + ".jsonl");
    std::map<int, ObservableSeries> have;
    if (fs::exists(path)) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                json j = json::parse(line);
                have[j.at("realization").get<int>()] = series_from_json(j);
            } catch (const json::parse_error&) {
            }
        }
    }
    std::vector<int> missing;
    for (int r = 0; r < count; ++r)
        if (!have.count(r)) missing.push_back(r);
    if (!missing.empty()) {
        fs::create_directories(g_work);
        std::ofstream out(path, std::ios::app);
        std::mutex io;
        ModelSpec model = make_model(graph, 1.0);
        parallel_for(static_cast<long>(missing.size()), g_workers, [&](long i) {
            const int r = missing[i];
            ObservableSeries s = run_quench(model, protocol, plan, child_seed(seed0, r));
            s.realization = r;
            json rec = series_to_json(s);
            std::lock_guard<std::mutex> lock(io);
            out << rec.dump() << "\n";
            out.flush();
            have[r] = std::move(s);
        });
    }
    std::vector<ObservableSeries> result;
    for (int r = 0; r < count; ++r) result.push_back(have.at(r));
    return result;
}

std::vector<ObservableSeries> ensemble_runs(ExperimentConfig config, const std::string& name) {
    config.execution.out_dir = (g_work / name).string();
    config.execution.workers = g_workers;
    const std::string records = (g_work / name / "records.jsonl").string();
    EnsembleStatus status = run_ensemble(config, records);
    if (!status.ok())
        throw std::runtime_error(name + ": " + std::to_string(status.failed_keys.size()) +
                                 " job(s) failed");
    return load_records(records);
}

// =============================================================================
// criterion 1: sampler vs dense oracle on fixed instances
// =============================================================================

CriterionResult criterion1() {
    CriterionResult res;
    struct Instance {
        const char* label;
        CouplingGraph graph;
    };
    const Instance instances[] = {
        {"regular3_n6", generate_regular_graph(6, 3, 1)},
        {"chain_n8", make_chain(8)},
    };
    for (const auto& inst : instances) {
        ModelSpec model = make_model(inst.graph, 1.0);
        const double velocity = inst.graph.n * 0.5 / 64.0;
        auto protocol = QuenchProtocol::hamiltonian(inst.graph.n, 0.0, 0.5, velocity, 1.0, 16);
        auto exact = oracle::exact_asymmetric_expectations(model, protocol);

        SamplingPlan plan;
        plan.sweeps = 60000;
        plan.therm_sweeps = 500;
        auto runs = fixed_instance_runs(inst.graph, protocol, plan, 6, 1001,
                                        std::string("c1_") + inst.label);
        auto avg = disorder_average(runs);

        double worst_z = 0.0, worst_rel_sigma = 0.0, worst_rel_err = 0.0;
        for (std::size_t t = 0; t < exact.size(); ++t) {
            auto record = [&](double mc, double err, double truth) {
                if (truth <= 0.0) return;
                worst_z = std::max(worst_z, std::abs(mc - truth) / std::max(err, 1e-12));
                worst_rel_sigma = std::max(worst_rel_sigma, err / truth);
                worst_rel_err = std::max(worst_rel_err, std::abs(mc - truth) / truth);
            };
            record(avg[t].q2, avg[t].q2_err, exact[t].q2);
            record(avg[t].mz2, avg[t].mz2_err, exact[t].mz2);
        }
        res.require(worst_z <= 3.0, std::string(inst.label) + ": all tau within 3 sigma (worst z = " +
                                        fmt(worst_z, 3) + ")");
        res.require(worst_rel_err < 0.02, std::string(inst.label) + ": relative error < 2% (worst " +
                                              fmt(100 * worst_rel_err, 3) + "%)");
        res.require(worst_rel_sigma < 0.02 / 3.0,
                    std::string(inst.label) + ": sigma small enough (worst rel sigma " +
                        fmt(100 * worst_rel_sigma, 3) + "%)");
    }
    return res;
}

// =============================================================================
// criterion 2: trivial limits
// =============================================================================

CriterionResult criterion2() {
    CriterionResult res;
    for (int n : {16, 64, 256}) {
        CouplingGraph graph = generate_regular_graph(n, 3, 42 + n);
        // modest velocity; tau = 0 sits exactly at s = 0
        auto protocol = QuenchProtocol::hamiltonian(n, 0.0, 0.5, n * 0.5 / 256.0, 1.0, 8);
        SamplingPlan plan;
        plan.sweeps = 20000;
        plan.therm_sweeps = 200;
        auto runs = fixed_instance_runs(graph, protocol, plan, 2, 2001,
                                        "c2_regular_n" + std::to_string(n));
        auto avg = disorder_average(runs);
        const SeriesPoint& p0 = runs[0].points.front();
        if (p0.tau != 0) throw std::logic_error("grid must include tau = 0");
        const double q2 = avg.front().q2;
        const double err = avg.front().q2_err;
        const double target = 1.0 / n;
        res.require(std::abs(q2 - target) <= 3.0 * err,
                    "N=" + std::to_string(n) + ": q2(s=0) = " + fmt(q2) + " +- " + fmt(err) +
                        " vs 1/N = " + fmt(target) + " within 3 sigma");
    }
    const double u_gauss = binder(0.37, 3.0 * 0.37 * 0.37);
    res.require(u_gauss == 0.0, "Binder U of gaussian moments = " + fmt(u_gauss) + " (exactly 0)");
    const double u_ordered = binder(1.0, 1.0);
    res.require(u_ordered == 1.0, "Binder U of perfect order = " + fmt(u_ordered) + " (exactly 1)");
    return res;
}

// =============================================================================
// shared chain dataset for criteria 3 and 4
// =============================================================================

std::vector<ObservableSeries> chain_kz_records() {
    ExperimentConfig c;
    c.model.kind = "chain";
    c.model.sizes = {16, 32, 64};
    c.model.realizations = 8;
    c.protocol.mode = "hamiltonian";
    c.protocol.v0 = 1.0;
    c.protocol.alpha = 2.0;  // grid placement only; the fit is free to disagree
    c.protocol.schedule_factors = {0.5, 1, 2, 4, 8, 16, 32};
    c.protocol.s_start = 0.0;
    c.protocol.s_end = 0.5;
    c.protocol.tau_points = 16;
    c.sampling.sweeps = 2000;
    c.sampling.therm_sweeps = 400;
    c.execution.master_seed = 3001;
    return ensemble_runs(c, "chain_kz");
}

// =============================================================================
// criterion 3: equilibrium critical scaling of the chain
// =============================================================================

CriterionResult criterion3() {
    CriterionResult res;
    auto records = chain_kz_records();
    // slow quenches: the lowest velocity column, v = 0.5 * N^-2
    std::map<int, std::vector<ObservableSeries>> groups;
    for (auto& s : records) {
        const double x = s.velocity * s.n_sites * s.n_sites;
        if (std::abs(x - 0.5) < 1e-6) groups[s.n_sites].push_back(s);
    }
    std::vector<double> scaled;
    for (auto& [n, group] : groups) {
        auto avg = disorder_average(group);
        const double mz2 = avg.back().mz2;
        const double err = avg.back().mz2_err;
        const double value = mz2 * std::pow(n, 0.25);
        scaled.push_back(value);
        res.require(err / mz2 < 0.02, "N=" + std::to_string(n) + ": mz2*N^{1/4} = " + fmt(value) +
                                          " (rel err " + fmt(100 * err / mz2, 2) + "%)");
    }
    double mean = 0.0;
    for (double v : scaled) mean += v;
    mean /= scaled.size();
    double worst = 0.0;
    for (double v : scaled) worst = std::max(worst, std::abs(v / mean - 1.0));
    res.require(scaled.size() == 3 && worst <= 0.05,
                "mz2*N^{1/4} constant across N within 5% (worst deviation " +
                    fmt(100 * worst, 3) + "%)");
    return res;
}

// =============================================================================
// criterion 4: Hamiltonian-dynamics KZ exponent of the chain
// =============================================================================

CriterionResult criterion4() {
    CriterionResult res;
    auto records = chain_kz_records();
    CollapseCommand cmd;
    cmd.observable = "mz2";
    cmd.bootstrap = 100;
    cmd.options.fix_b = true;
    cmd.options.b_fixed = 0.25;  // 2*beta/nu with beta=1/8, nu=1
    cmd.options.degree = 5;
    cmd.options.k_min = 0.5;
    cmd.options.k_max = 3.5;
    AnalysisOutputs out = analyze_collapse(records, cmd);
    const double k = out.report["b"].is_null() ? 0.0 : out.report["k"].get<double>();
    const double k_err = out.report["k_err"].get<double>();
    res.require(std::abs(k - 2.0) <= 0.2,
                "k = z + 1/nu = " + fmt(k) + " +- " + fmt(k_err) + " vs 2.0 (tolerance 0.2)");
    return res;
}

// =============================================================================
// criterion 5: simulation-time dynamics of the chain
// =============================================================================

CriterionResult criterion5(bool local) {
    CriterionResult res;
    ExperimentConfig c;
    c.model.kind = "chain";
    c.protocol.mode = "simulation-time";
    c.protocol.s_end = 0.5;
    c.protocol.update = local ? "local" : "cluster";
    if (local) {
        // keep velocities below the high-velocity crossover: x = v*N^3.17 in [1.2, 9.6]
        c.model.sizes = {8, 12, 16, 20};
        c.protocol.alpha = 3.17;
        c.protocol.v0 = 1.2;
        c.protocol.schedule_factors = {1, 2, 4, 8};
    } else {
        c.model.sizes = {32, 64, 128};
        c.protocol.alpha = 1.30;
        c.protocol.v0 = 0.5;
        c.protocol.schedule_factors = {1, 2, 4, 8};
    }
    c.model.realizations = 4;
    c.sampling.repeats = 100;
    c.execution.master_seed = local ? 5001 : 5002;
    auto records = ensemble_runs(c, local ? "simtime_local" : "simtime_cluster");

    CollapseCommand cmd;
    cmd.observable = "mz2";
    cmd.bootstrap = 100;
    cmd.options.fix_b = true;
    cmd.options.b_fixed = 0.25;  // fixed beta=1/8, nu=1
    cmd.options.degree = 4;
    cmd.options.k_min = 0.3;
    cmd.options.k_max = 5.0;
    AnalysisOutputs out = analyze_collapse(records, cmd);
    const double k = out.report["k"].get<double>();
    const double k_err = out.report["k_err"].get<double>();
    const double z = k - 1.0;  // k = z + 1/nu, nu = 1
    if (local) {
        // reduced sizes: widened tolerance per the shipping criteria
        res.require(std::abs(z - 2.17) <= 0.3, "local updates: z = " + fmt(z) + " +- " +
                                                   fmt(k_err) + " vs 2.17 (tolerance 0.3)");
    } else {
        res.require(std::abs(z - 0.30) <= 0.10, "cluster updates: z = " + fmt(z) + " +- " +
                                                    fmt(k_err) + " vs 0.30 (tolerance 0.10)");
    }
    return res;
}

// =============================================================================
// criterion 6: classical 3-regular baseline
// =============================================================================

CriterionResult criterion6() {
    CriterionResult res;
    const double t_c = constants::t_c_3regular;

    // Binder-crossing estimate of T_c from thermal quenches
    ExperimentConfig cross;
    cross.model.kind = "regular";
    cross.model.degree = 3;
    cross.model.sizes = {64, 128, 256};
    cross.model.realizations = 500;
    cross.protocol.mode = "thermal";
    cross.protocol.update = "metropolis";
    cross.protocol.alpha = 1.25;  // exceeds the classical KZ exponent z'+1/nu' = 1
    cross.protocol.v0 = 0.6;
    cross.protocol.t_start = 2.0 * t_c;
    cross.protocol.t_end = 0.75 * t_c;
    cross.protocol.tau_points = 64;
    cross.sampling.repeats = 2;
    cross.execution.master_seed = 6001;
    auto cross_records = ensemble_runs(cross, "classical_crossing");

    CrossingsCommand ccmd;
    ccmd.delta_n = 0;  // consecutive sizes
    ccmd.bootstrap = 200;
    ccmd.x_min = 0.8 * t_c;
    ccmd.x_max = 1.6 * t_c;
    AnalysisOutputs cout_ = analyze_crossings(cross_records, ccmd);
    double t_estimate = 0.0, t_err = 0.0;
    bool found = false;
    for (const auto& row : cout_.report["crossings"]) {
        if (row["found"].get<bool>()) {
            t_estimate = row["x_star"].get<double>();  // largest pair wins (rows sorted by n)
            t_err = row["err"].get<double>();
            found = true;
        }
    }
    res.require(found, "Binder crossing found");
    if (found)
        res.require(std::abs(t_estimate - t_c) <= 0.02 * t_c,
                    "T_c estimate " + fmt(t_estimate) + " +- " + fmt(t_err) + " within 2% of " +
                        fmt(t_c, 7));

    // thermal-quench collapse at T_c
    ExperimentConfig col;
    col.model.kind = "regular";
    col.model.degree = 3;
    col.model.sizes = {64, 128, 256};
    col.model.realizations = 500;
    col.protocol.mode = "thermal";
    col.protocol.update = "metropolis";
    col.protocol.alpha = 1.0;  // z' + 1/nu' = 1 for grid placement
    col.protocol.v0 = 0.5;
    col.protocol.schedule_factors = {0.5, 1, 2, 4, 8, 16, 32};
    col.protocol.t_start = 2.0 * t_c;
    col.protocol.t_end = t_c;
    col.protocol.tau_points = 8;
    col.sampling.repeats = 2;
    col.execution.master_seed = 6002;
    auto col_records = ensemble_runs(col, "classical_collapse");

    CollapseCommand kcmd;
    kcmd.observable = "q2";
    kcmd.bootstrap = 100;
    kcmd.options.fix_b = true;
    kcmd.options.b_fixed = 2.0 / 3.0;  // 2*beta/nu' with beta=1, nu'=3
    kcmd.options.degree = 4;
    kcmd.options.k_min = 0.3;
    kcmd.options.k_max = 2.5;
    AnalysisOutputs kout = analyze_collapse(col_records, kcmd);
    const double k = kout.report["k"].get<double>();
    const double k_err = kout.report["k_err"].get<double>();
    res.require(std::abs(k - 1.0) <= 0.15,
                "z' + 1/nu' = " + fmt(k) + " +- " + fmt(k_err) + " vs 1.0 (tolerance 0.15)");

    SlopeCommand scmd;
    scmd.collapse = kcmd;
    scmd.expected_x = kz_slope(constants::classical_3regular());
    AnalysisOutputs sout = analyze_slope(col_records, scmd);
    const double slope = sout.report["slope"].get<double>();
    res.require(std::abs(slope - 1.0 / 3.0) <= 0.05,
                "master-curve slope " + fmt(slope) + " vs 1/3 (tolerance 0.05)");
    return res;
}

// =============================================================================
// criterion 7 (stretch): quantum 3-regular glass
// =============================================================================

CriterionResult criterion7() {
    CriterionResult res;

    // crossing runs: alpha = 17/12 schedules past s_c
    ExperimentConfig cross;
    cross.model.kind = "regular";
    cross.model.degree = 3;
    cross.model.sizes = {64, 128, 192, 256};
    cross.model.realizations = 1000;
    cross.protocol.mode = "hamiltonian";
    cross.protocol.alpha = 17.0 / 12.0;
    cross.protocol.v0 = 1.0;
    cross.protocol.s_start = 0.0;
    cross.protocol.s_end = 0.55;  // past s_c = 0.3565
    cross.protocol.tau_points = 48;
    cross.sampling.sweeps = 60;
    cross.sampling.therm_sweeps = 60;
    cross.execution.master_seed = 7001;
    auto cross_records = ensemble_runs(cross, "quantum_crossing");

    CrossingsCommand ccmd;
    ccmd.delta_n = 64;  // (64,128), (128,192), (192,256)
    ccmd.bootstrap = 200;
    ccmd.x_min = 0.25;
    ccmd.x_max = 0.5;
    AnalysisOutputs cout_ = analyze_crossings(cross_records, ccmd);
    res.require(cout_.report.contains("extrapolation"), "crossings extrapolated");
    if (cout_.report.contains("extrapolation")) {
        const double s_c = cout_.report["extrapolation"]["x_c"].get<double>();
        const double s_err = cout_.report["extrapolation"]["x_c_err"].get<double>();
        res.require(s_c >= 0.34 && s_c <= 0.375,
                    "extrapolated s_c = " + fmt(s_c) + " +- " + fmt(s_err) + " in [0.34, 0.375]");
    }

    // collapse runs: quenches to s_c
    ExperimentConfig col;
    col.model.kind = "regular";
    col.model.degree = 3;
    col.model.sizes = {64, 128, 192, 256};
    col.model.realizations = 1000;
    col.protocol.mode = "hamiltonian";
    col.protocol.alpha = 1.34;  // grid placement at the expected KZ exponent
    col.protocol.v0 = 1.0;
    col.protocol.schedule_factors = {0.5, 1, 2, 4, 8, 16};
    col.protocol.s_start = 0.0;
    col.protocol.s_end = constants::s_c_3regular;
    col.protocol.tau_points = 4;
    col.sampling.sweeps = 60;
    col.sampling.therm_sweeps = 60;
    col.execution.master_seed = 7002;
    auto col_records = ensemble_runs(col, "quantum_collapse");

    CollapseCommand kcmd;
    kcmd.observable = "q2";
    kcmd.bootstrap = 100;
    kcmd.options.degree = 4;
    kcmd.options.b_min = 0.3;
    kcmd.options.b_max = 1.6;
    kcmd.options.k_min = 0.5;
    kcmd.options.k_max = 2.5;
    AnalysisOutputs kout = analyze_collapse(col_records, kcmd);
    const double b = kout.report["b"].get<double>();
    const double b_err = kout.report["b_err"].get<double>();
    const double k = kout.report["k"].get<double>();
    const double k_err = kout.report["k_err"].get<double>();
    res.require(std::abs(b - 0.86) <= 0.10,
                "b = 2*beta/nu' = " + fmt(b) + " +- " + fmt(b_err) + " vs 0.86 (tolerance 0.10)");
    res.require(std::abs(k - 1.34) <= 0.25,
                "k = z' + 1/nu' = " + fmt(k) + " +- " + fmt(k_err) + " vs 1.34 (tolerance 0.25)");
    return res;
}

// =============================================================================
// criterion 8: always-on property suite
// =============================================================================

CriterionResult criterion8() {
    CriterionResult res;

    // (a) strictly positive weights and propagation closure through sweeps
    {
        ModelSpec model = make_model(generate_regular_graph(8, 3, 5), 1.0);
        auto protocol = QuenchProtocol::hamiltonian(8, 0.0, 1.0, 0.2, 1.0, 8);
        OperatorString state(model, protocol, 17);
        bool all_legal = true;
        for (int k = 0; k < 400; ++k) {
            state.sweep(k % 2 ? UpdateKind::cluster : UpdateKind::local);
            all_legal = all_legal && state.legal_configuration();
        }
        const double lw = state.log_weight();  // throws on any nonpositive weight
        res.require(all_legal && std::isfinite(lw),
                    "no nonpositive weight sampled; propagation closed after every sweep");
    }

    // (b) fixed-s stationary distribution vs exhaustive enumeration (n=2, m=2)
    {
        CouplingGraph g;
        g.n = 2;
        g.kind = GraphKind::complete;
        g.edges = {{0, 1, 1.0}};
        ModelSpec model = make_model(g, 1.0);
        auto protocol = QuenchProtocol::hamiltonian(2, 0.0, 0.8, 0.8, 1.0, 2);
        double worst_tv = 0.0;
        for (UpdateKind update : {UpdateKind::cluster, UpdateKind::local}) {
            OperatorString state(model, protocol, 29);
            Eigen::VectorXd counts[4];
            for (int p = 0; p < 4; ++p) counts[p] = Eigen::VectorXd::Zero(5);
            const long sweeps = 400000;
            for (long k = 0; k < sweeps; ++k) {
                state.sweep(update);
                for (int p = 0; p < 4; ++p) {
                    const auto& op = state.slot(p);
                    int id = op.kind == OperatorString::Slot::Kind::bond ? op.index
                             : op.kind == OperatorString::Slot::Kind::site_const
                                 ? 1 + op.index
                                 : 3 + op.index;
                    counts[p][id] += 1.0;
                }
            }
            for (int p = 0; p < 4; ++p) {
                Eigen::VectorXd exact =
                    oracle::exact_slot_type_distribution(model, protocol, p + 1);
                const double tv = 0.5 * (counts[p] / double(sweeps) - exact).cwiseAbs().sum();
                worst_tv = std::max(worst_tv, tv);
            }
        }
        res.require(worst_tv < 0.01, "fixed-s stationary distribution TV = " + fmt(worst_tv, 3) +
                                         " < 0.01 vs enumeration");
    }

    // (c) fixed-T classical stationary distribution vs enumeration (n=4)
    {
        CouplingGraph chain = make_chain(4);
        const double t = 1.2;
        auto rng = make_engine(31);
        std::vector<std::int8_t> spins(4, 1);
        for (int k = 0; k < 1000; ++k) metropolis_sweep(spins, chain, t, rng);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(16);
        const long sweeps = 400000;
        for (long k = 0; k < sweeps; ++k) {
            metropolis_sweep(spins, chain, t, rng);
            long z = 0;
            for (int i = 0; i < 4; ++i)
                if (spins[i] < 0) z |= 1L << i;
            counts[z] += 1.0;
        }
        Eigen::VectorXd boltzmann(16);
        for (long z = 0; z < 16; ++z) {
            std::vector<std::int8_t> cfg(4);
            for (int i = 0; i < 4; ++i) cfg[i] = ((z >> i) & 1) ? -1 : 1;
            boltzmann[z] = std::exp(-classical_energy(chain, cfg) / t);
        }
        boltzmann /= boltzmann.sum();
        const double tv = 0.5 * (counts / double(sweeps) - boltzmann).cwiseAbs().sum();
        res.require(tv < 0.01, "fixed-T stationary distribution TV = " + fmt(tv, 3) +
                                   " < 0.01 vs enumeration");
    }

    // (d) ensemble determinism and resume idempotence
    {
        ExperimentConfig c;
        c.model.kind = "chain";
        c.model.sizes = {8};
        c.model.realizations = 2;
        c.protocol.mode = "hamiltonian";
        c.protocol.velocities = {0.5, 1.0};
        c.protocol.s_end = 0.5;
        c.protocol.tau_points = 4;
        c.sampling.sweeps = 40;
        c.sampling.therm_sweeps = 10;
        c.execution.master_seed = 8001;
        const fs::path dir_a = g_work / "c8_determinism_a";
        const fs::path dir_b = g_work / "c8_determinism_b";
        fs::remove_all(dir_a);
        fs::remove_all(dir_b);
        c.execution.workers = 1;
        c.execution.out_dir = dir_a.string();
        run_ensemble(c, (dir_a / "records.jsonl").string());
        EnsembleStatus again = run_ensemble(c, (dir_a / "records.jsonl").string());
        c.execution.workers = 2;
        c.execution.out_dir = dir_b.string();
        run_ensemble(c, (dir_b / "records.jsonl").string());
        auto payload = [](const fs::path& p) {
            std::set<std::string> lines;
            for (auto& s : load_records((p / "records.jsonl").string()))
                lines.insert(series_to_json(s).dump());
            return lines;
        };
        res.require(again.completed == 0 && again.skipped == 4,
                    "rerun executes nothing (idempotent resume)");
        res.require(payload(dir_a) == payload(dir_b),
                    "1-worker and 2-worker runs produce identical physics payloads");
    }

    // (e) exponent conversion round trips
    {
        bool ok = true;
        for (double d : {1.0, 2.0, 6.0, 8.0})
            for (double v : {0.25, 0.63, 1.0, 3.0}) {
                ok = ok && std::abs(nu_from_primed(nu_prime_from(v, d), d) - v) < 1e-12;
                ok = ok && std::abs(z_from_primed(z_prime_from(v, d), d) - v) < 1e-12;
            }
        res.require(ok, "exponent conversions round-trip exactly");
    }
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 8};
    std::string work = "acceptance_work";
    bool stretch = false;
    app.add_option("--criterion", criteria, "criteria to run (default: 1-6, 8)");
    app.add_option("--work", work, "work/cache directory");
    app.add_option("--workers", g_workers, "worker threads (0: all cores)");
    app.add_flag("--stretch", stretch, "include the long-running criterion 7");
    CLI11_PARSE(app, argc, argv);
    g_work = work;
    fs::create_directories(g_work);
    if (stretch && std::find(criteria.begin(), criteria.end(), 7) == criteria.end())
        criteria.push_back(7);

    int failures = 0;
    for (int id : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult result;
        std::string label;
        try {
            switch (id) {
                case 1: label = "oracle equivalence"; result = criterion1(); break;
                case 2: label = "trivial limits"; result = criterion2(); break;
                case 3: label = "chain equilibrium critical scaling"; result = criterion3(); break;
                case 4: label = "chain Hamiltonian-dynamics KZ exponent"; result = criterion4(); break;
                case 5: {
                    label = "simulation-time dynamics (local + cluster)";
                    result = criterion5(true);
                    CriterionResult cluster = criterion5(false);
                    result.pass = result.pass && cluster.pass;
                    result.notes.insert(result.notes.end(), cluster.notes.begin(),
                                        cluster.notes.end());
                    break;
                }
                case 51: label = "simulation-time dynamics (local)"; result = criterion5(true); break;
                case 52: label = "simulation-time dynamics (cluster)"; result = criterion5(false); break;
                case 6: label = "classical 3-regular baseline"; result = criterion6(); break;
                case 7: label = "quantum 3-regular glass (stretch)"; result = criterion7(); break;
                case 8: label = "property suite"; result = criterion8(); break;
                default:
                    std::cerr << "unknown criterion " << id << "\n";
                    return 2;
            }
        } catch (const std::exception& e) {
            result.pass = false;
            result.notes.push_back(std::string("exception: ") + e.what());
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const int display_id = id > 50 ? 5 : id;
        std::cout << (result.pass ? "PASS" : "FAIL") << " criterion " << display_id << " ("
                  << label << ") [" << fmt(dt, 3) << " s]\n";
        for (const auto& note : result.notes) std::cout << "      " << note << "\n";
        if (!result.pass) ++failures;
        std::cout.flush();
    }
    return failures == 0 ? 0 : 1;
}
