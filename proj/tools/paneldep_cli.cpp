// paneldep: cross-sectional dependence tests for fixed-effects panels.
//
//   paneldep test --input panel.csv --alpha 0.05 --k-convention include-intercept --out report.txt
//   paneldep simulate --config grid.cfg --seed 42 --out sim.txt
//   paneldep trace-probe --config grid.cfg --seed 42 --out probe.txt
//
// PANELDEP_THREADS overrides the worker count (default: available parallelism).

#include <paneldep/paneldep.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace paneldep;

unsigned threads_from_env() {
    const char* v = std::getenv("PANELDEP_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (*end != '\0' || n == 0 || n > 4096) throw ConfigError(fmt::format("PANELDEP_THREADS must be a positive integer, got '{}'", v));
    return static_cast<unsigned>(n);
}

// Writes to a temporary sibling and renames, so a failed run never leaves a
// partial report at the target path.
void write_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw std::runtime_error("failed writing " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move report to " + path);
}

int cmd_test(const std::string& input, double alpha, KConvention conv, const std::string& out_path) {
    const LabeledPanel panel = read_panel_csv_labeled(input);
    const Index k = k_for(conv, panel.data.regressors());
    const auto results = run_all_tests(panel.data, static_cast<double>(k), alpha);
    std::ostringstream doc;
    write_test_report(doc, {input, panel.data.units(), panel.data.periods(), k, conv, alpha}, results);
    write_atomically(out_path, doc.str());
    return 0;
}

int cmd_simulate(const std::string& config, std::uint64_t seed, const std::string& out_path) {
    const SimulationGrid grid = read_grid(config);
    const unsigned threads = threads_from_env();
    std::vector<McReport> reports;
    reports.reserve(grid.cells.size());
    for (const auto& cell : grid.cells) reports.push_back(run_experiment(cell, grid.replications, grid.alpha, seed, threads));
    std::ostringstream doc;
    write_simulation_report(doc, grid, seed, reports);
    write_atomically(out_path, doc.str());
    return 0;
}

int cmd_trace_probe(const std::string& config, std::uint64_t seed, const std::string& out_path) {
    const SimulationGrid grid = read_grid(config);
    const unsigned threads = threads_from_env();
    std::vector<std::vector<TraceGap>> gaps;
    for (const auto& cell : grid.cells) gaps.push_back(trace_gap_probe(cell, grid.replications, seed, threads));
    std::ostringstream doc;
    write_probe_report(doc, grid, seed, gaps);
    write_atomically(out_path, doc.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-sectional dependence tests for large fixed-effects panels"};
    app.require_subcommand(1);

    std::string input;
    std::string out_path;
    double alpha = 0.05;
    std::string conv_name = "include-intercept";
    const std::map<std::string, KConvention> conventions = {{"include-intercept", KConvention::IncludeIntercept},
                                                            {"regressors-only", KConvention::RegressorsOnly}};
    auto* test = app.add_subcommand("test", "Run all seven tests on a panel CSV");
    test->add_option("--input", input, "CSV with columns unit,time,y,x1..xk")->required()->check(CLI::ExistingFile);
    test->add_option("--alpha", alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
    test->add_option("--k-convention", conv_name, "include-intercept (k = kx + 1) or regressors-only (k = kx)")
        ->check(CLI::IsMember({"include-intercept", "regressors-only"}));
    test->add_option("--out", out_path, "Report path")->required();

    std::string config;
    std::uint64_t seed = 0;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Empirical size/power over a grid of designs");
    simulate->add_option("--config", config, "Grid file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", seed, "Master seed")->required();
    simulate->add_option("--out", sim_out, "Report path")->required();

    std::string probe_config;
    std::uint64_t probe_seed = 0;
    std::string probe_out;
    auto* probe = app.add_subcommand("trace-probe", "Gap between residual- and error-based trace powers");
    probe->add_option("--config", probe_config, "Grid file (null alternative only)")->required()->check(CLI::ExistingFile);
    probe->add_option("--seed", probe_seed, "Master seed")->required();
    probe->add_option("--out", probe_out, "Report path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed()) {
            if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
            return cmd_test(input, alpha, conventions.at(conv_name), out_path);
        }
        if (simulate->parsed()) return cmd_simulate(config, seed, sim_out);
        if (probe->parsed()) return cmd_trace_probe(probe_config, probe_seed, probe_out);
    } catch (const std::exception& e) {
        std::cerr << "paneldep: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
