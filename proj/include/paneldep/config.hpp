#pragma once

// Simulation grid files: flat `key = value` lines, `#` comments. List-valued
// keys take comma-separated values and the grid is the cross product of the
// declared axes. `h` applies to the dense alternative only.
//
//   replications = 2000
//   alpha = 0.05
//   n = 50, 100
//   T = 100
//   k = 2
//   errors = normal            # normal | student_t7 | chisq5
//   slopes = fixed             # fixed | heterogeneous
//   alternative = null, dense  # null | dense | sparse | less_sparse
//   h = 1, 2, 3
//   burn_in = 50
//   ar_coef = 0.6
//   scaled_alternative_noise = false
//
// Cells are expanded in the order errors > slopes > k > T > n > alternative > h
// (leftmost outermost).

#include <paneldep/dgp.hpp>
#include <paneldep/errors.hpp>

#include <fmt/format.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace paneldep {

struct SimulationGrid {
    std::uint32_t replications = 0;
    double alpha = 0.05;
    std::vector<DgpConfig> cells;
};

namespace detail {

struct GridField {
    std::size_t line = 0;
    std::vector<std::string> values;
};

inline std::string strip(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(strip(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

class GridReader {
  public:
    GridReader(std::map<std::string, GridField> fields, std::string source)
        : fields_(std::move(fields)), source_(std::move(source)) {}

    bool has(const std::string& key) const { return fields_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = fields_.find(key);
        if (it == fields_.end()) throw ConfigError(fmt::format("{}: field '{}': {}", source_, key, what));
        throw ConfigError(fmt::format("{}:{}: field '{}': {}", source_, it->second.line, key, what));
    }

    const std::vector<std::string>& values(const std::string& key) const { return fields_.at(key).values; }

    std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> fallback) const {
        if (!has(key)) return fallback;
        std::vector<std::int64_t> out;
        for (const auto& v : values(key)) {
            std::int64_t x = 0;
            const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || p != v.data() + v.size()) fail(key, "'" + v + "' is not an integer");
            out.push_back(x);
        }
        return out;
    }

    std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const auto& v : values(key)) {
            double x = 0;
            const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || p != v.data() + v.size()) fail(key, "'" + v + "' is not a number");
            out.push_back(x);
        }
        return out;
    }

    template <class T>
    T scalar(const std::vector<T>& xs, const std::string& key) const {
        if (xs.size() != 1) fail(key, "expects a single value");
        return xs.front();
    }

    std::vector<std::string> words(const std::string& key, std::vector<std::string> fallback) const {
        return has(key) ? values(key) : fallback;
    }

  private:
    std::map<std::string, GridField> fields_;
    std::string source_;
};

} // namespace detail

inline SimulationGrid parse_grid(std::istream& in, const std::string& source = "<config>") {
    static const std::set<std::string> known = {"replications", "alpha", "n", "T", "k", "errors", "slopes",
                                                "alternative", "h", "burn_in", "ar_coef", "scaled_alternative_noise"};
    std::map<std::string, detail::GridField> fields;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        if (detail::strip(body).empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
        const std::string key = detail::strip(body.substr(0, eq));
        if (!known.count(key)) throw ConfigError(fmt::format("{}:{}: unknown field '{}'", source, line_no, key));
        if (fields.count(key)) throw ConfigError(fmt::format("{}:{}: field '{}' given twice", source, line_no, key));
        auto values = detail::split_list(body.substr(eq + 1));
        for (const auto& v : values)
            if (v.empty()) throw ConfigError(fmt::format("{}:{}: field '{}' has an empty value", source, line_no, key));
        fields[key] = {line_no, std::move(values)};
    }

    const detail::GridReader rd(std::move(fields), source);
    for (const char* required : {"replications", "n", "T"})
        if (!rd.has(required)) rd.fail(required, "is required");

    SimulationGrid grid;
    const auto reps = rd.scalar(rd.integers("replications", {}), "replications");
    if (reps < 1 || reps > 0xFFFFFFFFll) rd.fail("replications", "must be a positive count");
    grid.replications = static_cast<std::uint32_t>(reps);
    grid.alpha = rd.scalar(rd.reals("alpha", {0.05}), "alpha");
    if (!(grid.alpha > 0.0 && grid.alpha < 1.0)) rd.fail("alpha", "must lie in (0, 1)");

    const auto ns = rd.integers("n", {});
    const auto ts = rd.integers("T", {});
    const auto ks = rd.integers("k", {2});
    const auto burn_in = rd.scalar(rd.integers("burn_in", {50}), "burn_in");
    const auto ar_coef = rd.scalar(rd.reals("ar_coef", {0.6}), "ar_coef");
    const auto scaled_word = rd.scalar(rd.words("scaled_alternative_noise", {"false"}), "scaled_alternative_noise");
    if (scaled_word != "true" && scaled_word != "false") rd.fail("scaled_alternative_noise", "must be true or false");

    std::vector<ErrorDist> dists;
    for (const auto& w : rd.words("errors", {"normal"})) {
        if (w == "normal") dists.push_back(ErrorDist::Normal);
        else if (w == "student_t7") dists.push_back(ErrorDist::StudentT7);
        else if (w == "chisq5") dists.push_back(ErrorDist::ChiSq5);
        else rd.fail("errors", "unknown error law '" + w + "'");
    }
    std::vector<SlopeMode> slopes;
    for (const auto& w : rd.words("slopes", {"fixed"})) {
        if (w == "fixed") slopes.push_back(SlopeMode::FixedEffects);
        else if (w == "heterogeneous") slopes.push_back(SlopeMode::Heterogeneous);
        else rd.fail("slopes", "unknown slope mode '" + w + "'");
    }
    std::vector<Alternative::Kind> kinds;
    for (const auto& w : rd.words("alternative", {"null"})) {
        if (w == "null") kinds.push_back(Alternative::Kind::Null);
        else if (w == "dense") kinds.push_back(Alternative::Kind::Dense);
        else if (w == "sparse") kinds.push_back(Alternative::Kind::Sparse);
        else if (w == "less_sparse") kinds.push_back(Alternative::Kind::LessSparse);
        else rd.fail("alternative", "unknown alternative '" + w + "'");
    }
    const bool has_dense = std::find(kinds.begin(), kinds.end(), Alternative::Kind::Dense) != kinds.end();
    const auto hs = rd.reals("h", {});
    if (has_dense && hs.empty()) rd.fail("h", "is required for the dense alternative");
    if (!has_dense && !hs.empty()) rd.fail("h", "only applies to the dense alternative");

    for (auto dist : dists)
        for (auto slope : slopes)
            for (auto k : ks)
                for (auto t : ts)
                    for (auto n : ns)
                        for (auto kind : kinds) {
                            std::vector<Alternative> alts;
                            if (kind == Alternative::Kind::Dense)
                                for (double h : hs) alts.push_back(Alternative::dense(h));
                            else
                                alts.push_back({kind, 0.0});
                            for (const auto& alt : alts) {
                                DgpConfig cfg;
                                cfg.n = n;
                                cfg.T = t;
                                cfg.k = k;
                                cfg.error_dist = dist;
                                cfg.slope_mode = slope;
                                cfg.alternative = alt;
                                cfg.burn_in = burn_in;
                                cfg.ar_coef = ar_coef;
                                cfg.scaled_alternative_noise = scaled_word == "true";
                                try {
                                    cfg.validate();
                                } catch (const ConfigError& e) {
                                    throw ConfigError(fmt::format("{}: cell n={} T={} k={}: {}", source, n, t, k,
                                                                  e.what()));
                                }
                                if (t - k <= 2)
                                    throw ConfigError(
                                        fmt::format("{}: cell n={} T={} k={}: need T - k > 2", source, n, t, k));
                                grid.cells.push_back(cfg);
                            }
                        }
    return grid;
}

inline SimulationGrid read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse_grid(in, path);
}

} // namespace paneldep
