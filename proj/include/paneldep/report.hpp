#pragma once

// Plain-text reports. A report is a `key = value` header, then `[section]`
// blocks. Test reports carry one section per test; simulation and probe
// reports carry a `[rows]` table whose first line names the columns.
// Reals use the shortest form that reads back exactly, so reruns compare byte
// for byte.

#include <paneldep/cd_tests.hpp>
#include <paneldep/config.hpp>
#include <paneldep/montecarlo.hpp>

#include <fmt/format.h>

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace paneldep {

inline std::string format_real(double v) { return fmt::format("{}", v); }

inline std::string describe(const NullDistribution& d) {
    if (d.kind == NullDistribution::Kind::ChiSquare) return fmt::format("chisq({})", format_real(d.df));
    return "normal";
}

enum class KConvention { IncludeIntercept, RegressorsOnly };

inline std::string_view to_string(KConvention c) {
    return c == KConvention::IncludeIntercept ? "include_intercept" : "regressors_only";
}

/// k used in T - k and kappa for a panel with kx regressors.
inline Index k_for(KConvention c, Index kx) { return c == KConvention::IncludeIntercept ? kx + 1 : kx; }

struct TestReportHeader {
    std::string input;
    Index n = 0;
    Index T = 0;
    Index k = 0;
    KConvention k_convention = KConvention::IncludeIntercept;
    double alpha = 0.05;
};

inline void write_test_report(std::ostream& out, const TestReportHeader& h, const std::vector<TestResult>& results) {
    out << "format = paneldep-test/1\n";
    out << "input = " << h.input << '\n';
    out << "n = " << h.n << '\n';
    out << "T = " << h.T << '\n';
    out << "k = " << h.k << '\n';
    out << "k_convention = " << to_string(h.k_convention) << '\n';
    out << "alpha = " << format_real(h.alpha) << '\n';
    out << "tests = " << results.size() << '\n';
    for (const auto& r : results) {
        out << '\n' << '[' << to_string(r.test_name) << "]\n";
        out << "statistic = " << format_real(r.statistic) << '\n';
        out << "null = " << describe(r.null_dist) << '\n';
        out << "p_value = " << format_real(r.p_value) << '\n';
        out << "tail = " << to_string(r.tail) << '\n';
        out << "reject = " << (r.reject ? "true" : "false") << '\n';
    }
}

inline std::string alternative_h(const DgpConfig& c) {
    return c.alternative.kind == Alternative::Kind::Dense ? format_real(c.alternative.h) : "-";
}

inline void write_grid_header(std::ostream& out, std::string_view format, const SimulationGrid& grid,
                              std::uint64_t seed) {
    out << "format = " << format << '\n';
    out << "seed = " << seed << '\n';
    out << "replications = " << grid.replications << '\n';
    out << "alpha = " << format_real(grid.alpha) << '\n';
    out << "cells = " << grid.cells.size() << '\n';
}

inline void write_simulation_report(std::ostream& out, const SimulationGrid& grid, std::uint64_t seed,
                                    const std::vector<McReport>& reports) {
    write_grid_header(out, "paneldep-simulate/1", grid, seed);
    out << "\n[rows]\n";
    out << "cell n T k errors slopes alternative h excluded test rate mc_se\n";
    for (std::size_t c = 0; c < reports.size(); ++c) {
        const McReport& r = reports[c];
        const DgpConfig& cfg = r.config;
        for (TestName t : kAllTests) {
            out << fmt::format("{} {} {} {} {} {} {} {} {} {} {} {}\n", c + 1, cfg.n, cfg.T, cfg.k,
                               to_string(cfg.error_dist), to_string(cfg.slope_mode), to_string(cfg.alternative.kind),
                               alternative_h(cfg), r.excluded, to_string(t), format_real(r.rejection_rate.at(t)),
                               format_real(r.mc_se.at(t)));
        }
    }
}

inline void write_probe_report(std::ostream& out, const SimulationGrid& grid, std::uint64_t seed,
                               const std::vector<std::vector<TraceGap>>& gaps) {
    write_grid_header(out, "paneldep-trace-probe/1", grid, seed);
    out << "\n[summary]\n";
    out << "cell n T k errors median_gap2 median_gap4\n";
    for (std::size_t c = 0; c < gaps.size(); ++c) {
        std::vector<double> g2;
        std::vector<double> g4;
        for (const auto& g : gaps[c]) {
            g2.push_back(g.gap2);
            g4.push_back(g.gap4);
        }
        const DgpConfig& cfg = grid.cells[c];
        out << fmt::format("{} {} {} {} {} {} {}\n", c + 1, cfg.n, cfg.T, cfg.k, to_string(cfg.error_dist),
                           format_real(median(g2)), format_real(median(g4)));
    }
    out << "\n[rows]\n";
    out << "cell replication gap2 gap4\n";
    for (std::size_t c = 0; c < gaps.size(); ++c)
        for (std::size_t i = 0; i < gaps[c].size(); ++i)
            out << fmt::format("{} {} {} {}\n", c + 1, i, format_real(gaps[c][i].gap2), format_real(gaps[c][i].gap4));
}

// ---------------------------------------------------------------------------

/// Generic reader for the report layout, used by tests and downstream tools.
struct ReportDocument {
    struct Section {
        std::string name;
        std::map<std::string, std::string> values;
        std::vector<std::vector<std::string>> table; ///< first row holds the column names
    };

    std::map<std::string, std::string> header;
    std::vector<Section> sections;

    const Section* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline ReportDocument parse_report(std::istream& in) {
    ReportDocument doc;
    std::string line;
    ReportDocument::Section* current = nullptr;
    while (std::getline(in, line)) {
        const std::string body = detail::strip(line);
        if (body.empty()) continue;
        if (body.front() == '[' && body.back() == ']') {
            doc.sections.push_back({body.substr(1, body.size() - 2), {}, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = body.find(" = ");
        if (eq != std::string::npos && (current == nullptr || current->table.empty())) {
            auto& target = current ? current->values : doc.header;
            target[body.substr(0, eq)] = body.substr(eq + 3);
            continue;
        }
        if (current == nullptr) throw ParseError("report: unexpected line outside a section: " + body);
        std::istringstream words(body);
        std::vector<std::string> row;
        for (std::string w; words >> w;) row.push_back(w);
        current->table.push_back(std::move(row));
    }
    return doc;
}

} // namespace paneldep
