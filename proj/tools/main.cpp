#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "clusterfx/analysis.hpp"
#include "clusterfx/sim.hpp"
#include "oracle_check.hpp"

namespace fs = std::filesystem;

namespace {

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("CLUSTERFX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;  // auto
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw clusterfx::Error("cannot write " + path.string());
    out << content;
}

int cmd_analyze(const std::string& input, double alpha, const std::string& transform,
                bool json, const std::string& out_path) {
    clusterfx::AnalysisOptions options;
    options.alpha = alpha;
    if (transform == "identity") options.transform = clusterfx::CiTransform::Identity;
    else if (transform == "logit") options.transform = clusterfx::CiTransform::Logit;
    else throw clusterfx::Error("unknown transform '" + transform + "' (identity|logit)");

    const clusterfx::StudyData data = clusterfx::load_csv(input);
    const clusterfx::AnalysisReport report = clusterfx::analyze(data, options);
    const std::string rendered = json ? clusterfx::to_json(report) : clusterfx::to_text(report);
    if (out_path.empty()) {
        std::cout << rendered;
        if (json) std::cout << "\n";
    } else {
        write_file(out_path, json ? rendered + "\n" : rendered);
    }
    return 0;
}

// The published grid: two allocations, three correlation triples, two
// variance pairs, two cluster-size caps, three families. Correlation
// settings that are infeasible for the compound-symmetry structure are
// reported as rejected rather than silently skipped.
int cmd_simulate_preset(const fs::path& out_dir, int runs, std::uint64_t seed, double alpha,
                        int threads) {
    const std::array<std::array<int, 3>, 2> allocations = {{{5, 10, 5}, {10, 5, 5}}};
    const std::array<std::array<double, 3>, 3> rhos = {
        {{0.9, 0.9, 0.1}, {0.1, 0.1, 0.9}, {0.1, 0.9, 0.9}}};
    const std::array<std::array<double, 2>, 2> sigmas = {{{1.0, 1.0}, {1.0, 5.0}}};
    const std::array<int, 2> m_values = {3, 6};
    const std::array<clusterfx::Family, 3> families = {clusterfx::Family::DiscretizedNormal,
                                                       clusterfx::Family::LogNormal,
                                                       clusterfx::Family::Cauchy};

    std::string csv =
        "n_c,n_1,n_2,rho1,rho2,rho12,sigma2_pre,sigma2_post,M,"
        "normal_I,normal_T,normal_IxT,lognormal_I,lognormal_T,lognormal_IxT,"
        "cauchy_I,cauchy_T,cauchy_IxT\n";
    std::string json = "[";
    bool first_row = true;
    char buf[256];

    for (const auto& alloc : allocations) {
        for (const auto& rho : rhos) {
            for (const auto& sigma2 : sigmas) {
                for (int m : m_values) {
                    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%g,%g,%g,%g,%g,%d", alloc[0],
                                  alloc[1], alloc[2], rho[0], rho[1], rho[2], sigma2[0],
                                  sigma2[1], m);
                    csv += buf;
                    if (!first_row) json += ",";
                    first_row = false;
                    std::snprintf(buf, sizeof(buf),
                                  "{\"n_c\":%d,\"n_1\":%d,\"n_2\":%d,\"rho\":[%g,%g,%g],"
                                  "\"sigma2\":[%g,%g],\"M\":%d,\"cells\":[",
                                  alloc[0], alloc[1], alloc[2], rho[0], rho[1], rho[2],
                                  sigma2[0], sigma2[1], m);
                    json += buf;
                    bool first_cell = true;
                    for (clusterfx::Family family : families) {
                        clusterfx::SimulationConfig cfg;
                        cfg.family = family;
                        cfg.n_complete = alloc[0];
                        cfg.n_pre = alloc[1];
                        cfg.n_post = alloc[2];
                        cfg.rho = rho;
                        cfg.sigma2 = sigma2;
                        cfg.max_cluster_size = m;
                        cfg.runs = runs;
                        cfg.alpha = alpha;
                        cfg.seed = seed;
                        if (!first_cell) json += ",";
                        first_cell = false;
                        try {
                            const clusterfx::SimulationReport rep =
                                clusterfx::run_experiment(cfg, threads);
                            std::snprintf(buf, sizeof(buf), ",%.1f,%.1f,%.1f",
                                          rep.effects[0].rate_pct, rep.effects[1].rate_pct,
                                          rep.effects[2].rate_pct);
                            csv += buf;
                            std::snprintf(buf, sizeof(buf),
                                          "{\"family\":\"%s\",\"rates\":[%.17g,%.17g,%.17g]}",
                                          clusterfx::family_name(family),
                                          rep.effects[0].rate_pct, rep.effects[1].rate_pct,
                                          rep.effects[2].rate_pct);
                            json += buf;
                        } catch (const clusterfx::NotPsdError&) {
                            csv += ",NotPSD,NotPSD,NotPSD";
                            std::snprintf(buf, sizeof(buf),
                                          "{\"family\":\"%s\",\"error\":\"NotPSD\"}",
                                          clusterfx::family_name(family));
                            json += buf;
                        }
                    }
                    csv += "\n";
                    json += "]}";
                }
            }
        }
    }
    json += "]\n";
    write_file(out_dir / "table3.csv", csv);
    write_file(out_dir / "table3.json", json);
    std::cout << "wrote " << (out_dir / "table3.csv").string() << " and table3.json\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir_s, int threads,
                 const std::string& preset, int runs_override, long long seed_override,
                 double alpha) {
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);
    const int n_threads = resolve_threads(threads);

    if (!preset.empty()) {
        if (preset != "table3") throw clusterfx::Error("unknown preset '" + preset + "'");
        const int runs = runs_override > 0 ? runs_override : 1000;
        const std::uint64_t seed =
            seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : 20240101ULL;
        return cmd_simulate_preset(out_dir, runs, seed, alpha, n_threads);
    }

    if (config_path.empty()) throw clusterfx::Error("a config file or --preset is required");
    clusterfx::SimulationConfig cfg = clusterfx::load_config(config_path);
    if (runs_override > 0) {
        cfg.runs = runs_override;
        cfg.validate_or_throw();
    }
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    const clusterfx::SimulationReport report = clusterfx::run_experiment(cfg, n_threads);
    write_file(out_dir / "report.csv", clusterfx::report_csv(report));
    write_file(out_dir / "report.json", clusterfx::report_json(report, cfg) + "\n");
    for (const auto& row : report.effects) {
        std::printf("%-13s rejection %6.2f%%  (mc se %.2f, runs %d)\n", row.effect.c_str(),
                    row.rate_pct, row.mc_se_pct, report.runs);
    }
    std::cout << "wrote " << (out_dir / "report.csv").string() << " and report.json\n";
    return 0;
}

int cmd_oracle_check(int n_datasets, std::uint64_t seed) {
    const cfx_test::OracleCheckResult result = cfx_test::run_oracle_check(n_datasets, seed);
    std::printf("datasets checked:            %d\n", result.datasets);
    std::printf("max |w_fast - w_oracle|:     %.3e  (tolerance %.0e)\n", result.max_w_deviation,
                cfx_test::OracleCheckResult::w_tolerance);
    std::printf("max |V_fast - V_oracle|:     %.3e  (tolerance %.0e)\n", result.max_v_deviation,
                cfx_test::OracleCheckResult::v_tolerance);
    std::printf("%s\n", result.pass() ? "PASS" : "FAIL");
    return result.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric relative effects for clustered pre-post factorial designs"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Analyze a dataset in CSV form");
    std::string input;
    double alpha = 0.05;
    std::string transform = "logit";
    bool as_json = false, as_text = false;
    std::string out_path;
    analyze->add_option("input", input, "CSV file (group,cluster,period,visit,value)")
        ->required();
    analyze->add_option("--alpha", alpha, "significance level")->check(CLI::Range(1e-6, 0.5));
    analyze->add_option("--transform", transform, "CI transform: logit|identity");
    analyze->add_flag("--json", as_json, "emit the JSON report");
    analyze->add_flag("--text", as_text, "emit the text report (default)");
    analyze->add_option("--out", out_path, "write the report to a file instead of stdout");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
    std::string config_path, out_dir, preset;
    int threads = 0, runs_override = 0;
    long long seed_override = -1;
    double sim_alpha = 0.05;
    simulate->add_option("config", config_path, "simulation config file");
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--threads", threads,
                         "worker threads (default: CLUSTERFX_THREADS or all cores)");
    simulate->add_option("--preset", preset, "run a published grid: table3");
    simulate->add_option("--runs", runs_override, "override the replication count");
    simulate->add_option("--seed", seed_override, "override the seed");
    simulate->add_option("--alpha", sim_alpha, "significance level for presets");

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check",
                                      "Compare fast estimators against brute-force oracles");
    int n_datasets = 25;
    long long oracle_seed = 20240817;
    oracle->add_option("--n", n_datasets, "number of random datasets")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) {
            if (as_json && as_text) throw clusterfx::Error("choose one of --json / --text");
            return cmd_analyze(input, alpha, transform, as_json, out_path);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(config_path, out_dir, threads, preset, runs_override,
                                seed_override, sim_alpha);
        }
        if (app.got_subcommand(oracle)) {
            return cmd_oracle_check(n_datasets, static_cast<std::uint64_t>(oracle_seed));
        }
    } catch (const clusterfx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
