#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "anneal/ensemble.hpp"
#include "anneal/graph.hpp"
#include "anneal/oracle.hpp"
#include "anneal/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_config_error(const std::string& msg) {
    std::cerr << "config error: " << msg << "\n";
    return 2;
}

void write_file(const fs::path& path, const std::string& content) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

std::vector<anneal::ObservableSeries> load_all(const std::vector<std::string>& files) {
    std::vector<anneal::ObservableSeries> records;
    for (const auto& f : files) {
        auto part = anneal::load_records(f);
        records.insert(records.end(), part.begin(), part.end());
    }
    return records;
}

int cmd_gen_graphs(const std::string& kind, const std::vector<int>& sizes, int degree, int count,
                   std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    json manifest;
    manifest["kind"] = kind;
    manifest["seed"] = seed;
    json entries = json::array();
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        for (int r = 0; r < count; ++r) {
            const std::uint64_t graph_seed =
                anneal::child_seed(anneal::child_seed(seed, 0x10000 + si), r);
            anneal::CouplingGraph g;
            if (kind == "chain") g = anneal::make_chain(sizes[si]);
            else if (kind == "regular") g = anneal::generate_regular_graph(sizes[si], degree, graph_seed);
            else if (kind == "complete") g = anneal::make_complete(sizes[si], anneal::CouplingModel::gaussian, graph_seed);
            else if (kind == "square-lattice") g = anneal::make_square_lattice(sizes[si]);
            else return exit_config_error("unknown kind: " + kind);
            char name[64];
            std::snprintf(name, sizeof name, "graph_n%d_r%03d.txt", sizes[si], r);
            const std::string text = anneal::serialize_graph(g);
            write_file(fs::path(out_dir) / name, text);
            char hash[20];
            std::snprintf(hash, sizeof hash, "0x%016llx",
                          static_cast<unsigned long long>(anneal::graph_hash(g)));
            entries.push_back({{"file", name}, {"n", sizes[si]}, {"hash", hash}});
        }
    }
    manifest["graphs"] = entries;
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2));
    std::cout << "wrote " << entries.size() << " graph files to " << out_dir << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_override, int workers_override,
            std::uint64_t seed_override, bool have_seed) {
    json j;
    try {
        std::ifstream in(config_path);
        if (!in) return exit_config_error("cannot open " + config_path);
        in >> j;
    } catch (const std::exception& e) {
        return exit_config_error(e.what());
    }
    anneal::ExperimentConfig config;
    try {
        config = anneal::ExperimentConfig::from_json(j);
    } catch (const std::exception& e) {
        return exit_config_error(e.what());
    }
    if (!out_override.empty()) config.execution.out_dir = out_override;
    if (workers_override > 0) config.execution.workers = workers_override;
    if (have_seed) config.execution.master_seed = seed_override;

    const std::string records = (fs::path(config.execution.out_dir) / "records.jsonl").string();
    try {
        anneal::EnsembleStatus status = anneal::run_ensemble(config, records);
        std::cout << "completed " << status.completed << " job(s), skipped " << status.skipped
                  << " already-present job(s)\n";
        if (!status.ok()) {
            std::cerr << status.failed_keys.size() << " job(s) failed:\n";
            for (const auto& k : status.failed_keys) std::cerr << "  " << k << "\n";
            return 1;
        }
    } catch (const std::invalid_argument& e) {
        return exit_config_error(e.what());
    }
    std::cout << "records: " << records << "\n";
    return 0;
}

void write_outputs(const anneal::AnalysisOutputs& out, const std::string& prefix) {
    write_file(prefix + "_report.json", out.report.dump(2));
    write_file(prefix + "_table.csv", out.table_csv);
    std::cout << out.report.dump(2) << "\n";
    std::cout << "wrote " << prefix << "_report.json and " << prefix << "_table.csv\n";
}

int cmd_fixtures(const std::string& out_dir) {
    fs::create_directories(out_dir);
    struct Instance {
        const char* name;
        anneal::CouplingGraph graph;
    };
    std::vector<Instance> instances;
    instances.push_back({"regular3_n6", anneal::generate_regular_graph(6, 3, 1)});
    instances.push_back({"chain_n8", anneal::make_chain(8)});
    for (const auto& inst : instances) {
        anneal::ModelSpec model = anneal::make_model(inst.graph);
        const double velocity = inst.graph.n * 0.5 / 64.0;  // m = 64
        auto protocol = anneal::QuenchProtocol::hamiltonian(inst.graph.n, 0.0, 0.5, velocity, 1.0, 16);
        auto points = anneal::oracle::exact_asymmetric_expectations(model, protocol);
        json fixture;
        fixture["name"] = inst.name;
        fixture["graph"] = anneal::serialize_graph(inst.graph);
        char hash[20];
        std::snprintf(hash, sizeof hash, "0x%016llx",
                      static_cast<unsigned long long>(anneal::graph_hash(inst.graph)));
        fixture["graph_hash"] = hash;
        fixture["protocol"] = {{"s_start", 0.0}, {"s_end", 0.5}, {"velocity", protocol.velocity},
                               {"m", protocol.m},  {"power", 1.0}};
        fixture["columns"] = {"tau", "s", "q2", "q4", "mz2"};
        json rows = json::array();
        for (const auto& p : points) rows.push_back({p.tau, p.s, p.q2, p.q4, p.mz2});
        fixture["points"] = rows;
        const std::string path = (fs::path(out_dir) / (std::string(inst.name) + ".json")).string();
        write_file(path, fixture.dump(2));
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"annealing dynamics laboratory: quench ensembles and scaling analysis"};
    app.require_subcommand(1);

    // gen-graphs
    auto* gen = app.add_subcommand("gen-graphs", "generate coupling graphs");
    std::string gen_kind = "regular";
    std::vector<int> gen_sizes;
    int gen_degree = 3, gen_count = 1;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "graphs";
    gen->add_option("--kind", gen_kind, "chain|regular|complete|square-lattice");
    gen->add_option("--sizes", gen_sizes, "system sizes")->required();
    gen->add_option("--degree", gen_degree, "regular graph degree");
    gen->add_option("--count", gen_count, "realizations per size");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output directory");

    // run
    auto* run = app.add_subcommand("run", "run a quench ensemble from a JSON config");
    std::string run_config, run_out;
    int run_workers = 0;
    std::uint64_t run_seed = 0;
    run->add_option("--config", run_config, "experiment config JSON")->required();
    run->add_option("--out", run_out, "output directory override");
    run->add_option("--workers", run_workers, "worker threads override");
    auto* run_seed_opt = run->add_option("--seed", run_seed, "master seed override");

    // shared analysis options
    auto add_analysis_inputs = [](CLI::App* sub, std::vector<std::string>& files,
                                  std::string& out_prefix) {
        sub->add_option("--records", files, "records.jsonl file(s)")->required();
        sub->add_option("--out", out_prefix, "output path prefix")->required();
    };

    // analyze-collapse
    auto* col = app.add_subcommand("analyze-collapse", "optimal data collapse");
    std::vector<std::string> col_files;
    std::string col_out, col_obs = "q2";
    double col_at = std::numeric_limits<double>::quiet_NaN();
    double col_fix_b = -1, col_fix_k = -1, col_power = 1.0;
    int col_degree = 0, col_boot = 200;
    std::uint64_t col_seed = 1;
    add_analysis_inputs(col, col_files, col_out);
    col->add_option("--observable", col_obs, "q2|mz2");
    col->add_option("--at", col_at, "s or T at which to read the observable (default: final)");
    col->add_option("--fix-b", col_fix_b, "fix b = 2*beta/nu'");
    col->add_option("--fix-k", col_fix_k, "fix k = z'*r + 1/nu'");
    col->add_option("--degree", col_degree, "master curve degree (0: cross-validate)");
    col->add_option("--power", col_power, "quench power r");
    col->add_option("--bootstrap", col_boot, "bootstrap resamples");
    col->add_option("--seed", col_seed, "bootstrap seed");

    // analyze-crossings
    auto* cro = app.add_subcommand("analyze-crossings", "Binder cumulant crossings");
    std::vector<std::string> cro_files;
    std::string cro_out;
    int cro_delta = 64, cro_boot = 200;
    double cro_xmin = -std::numeric_limits<double>::infinity();
    double cro_xmax = std::numeric_limits<double>::infinity();
    std::uint64_t cro_seed = 1;
    add_analysis_inputs(cro, cro_files, cro_out);
    cro->add_option("--delta-n", cro_delta, "crossing partner offset");
    cro->add_option("--bootstrap", cro_boot, "bootstrap resamples");
    cro->add_option("--x-min", cro_xmin, "curve window minimum");
    cro->add_option("--x-max", cro_xmax, "curve window maximum");
    cro->add_option("--seed", cro_seed, "bootstrap seed");

    // analyze-slope
    auto* slo = app.add_subcommand("analyze-slope", "master-curve slope check");
    std::vector<std::string> slo_files;
    std::string slo_out, slo_obs = "q2";
    double slo_at = std::numeric_limits<double>::quiet_NaN();
    double slo_fix_b = -1, slo_fix_k = -1;
    double slo_expected = 0.0, slo_expected_err = 0.0, slo_alpha = 0.0;
    int slo_boot = 200;
    add_analysis_inputs(slo, slo_files, slo_out);
    slo->add_option("--observable", slo_obs, "q2|mz2");
    slo->add_option("--at", slo_at, "s or T at which to read the observable");
    slo->add_option("--fix-b", slo_fix_b, "fix b");
    slo->add_option("--fix-k", slo_fix_k, "fix k");
    slo->add_option("--expected-x", slo_expected, "expected log-log slope")->required();
    slo->add_option("--expected-x-err", slo_expected_err, "its uncertainty");
    slo->add_option("--alpha", slo_alpha, "a posteriori check: alpha must exceed fitted k");
    slo->add_option("--bootstrap", slo_boot, "bootstrap resamples");

    // fixtures
    auto* fix = app.add_subcommand("fixtures", "regenerate exact reference fixtures");
    std::string fix_out = "tests/fixtures";
    fix->add_option("--out", fix_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_graphs(gen_kind, gen_sizes, gen_degree, gen_count, gen_seed, gen_out);
        if (run->parsed())
            return cmd_run(run_config, run_out, run_workers, run_seed, run_seed_opt->count() > 0);
        if (col->parsed()) {
            anneal::CollapseCommand cmd;
            cmd.observable = col_obs;
            cmd.at = col_at;
            cmd.bootstrap = col_boot;
            cmd.bootstrap_seed = col_seed;
            cmd.options.power = col_power;
            cmd.options.degree = col_degree;
            if (col_fix_b >= 0) {
                cmd.options.fix_b = true;
                cmd.options.b_fixed = col_fix_b;
            }
            if (col_fix_k >= 0) {
                cmd.options.fix_k = true;
                cmd.options.k_fixed = col_fix_k;
            }
            auto out = anneal::analyze_collapse(load_all(col_files), cmd);
            write_outputs(out, col_out);
            return 0;
        }
        if (cro->parsed()) {
            anneal::CrossingsCommand cmd;
            cmd.delta_n = cro_delta;
            cmd.bootstrap = cro_boot;
            cmd.bootstrap_seed = cro_seed;
            cmd.x_min = cro_xmin;
            cmd.x_max = cro_xmax;
            auto out = anneal::analyze_crossings(load_all(cro_files), cmd);
            write_outputs(out, cro_out);
            return 0;
        }
        if (slo->parsed()) {
            anneal::SlopeCommand cmd;
            cmd.collapse.observable = slo_obs;
            cmd.collapse.at = slo_at;
            cmd.collapse.bootstrap = slo_boot;
            if (slo_fix_b >= 0) {
                cmd.collapse.options.fix_b = true;
                cmd.collapse.options.b_fixed = slo_fix_b;
            }
            if (slo_fix_k >= 0) {
                cmd.collapse.options.fix_k = true;
                cmd.collapse.options.k_fixed = slo_fix_k;
            }
            cmd.expected_x = slo_expected;
            cmd.expected_x_err = slo_expected_err;
            cmd.alpha_check = slo_alpha;
            auto out = anneal::analyze_slope(load_all(slo_files), cmd);
            write_outputs(out, slo_out);
            return 0;
        }
        if (fix->parsed()) return cmd_fixtures(fix_out);
    } catch (const std::invalid_argument& e) {
        return exit_config_error(e.what());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
