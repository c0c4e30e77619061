#pragma once

// Panel CSV ingestion: header `unit,time,y,x1,...,xk`, one row per (unit, time).

#include <paneldep/errors.hpp>
#include <paneldep/panel.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace paneldep {

/// A panel plus the unit labels and time values it was read with.
struct LabeledPanel {
    PanelData data;
    std::vector<std::string> units;
    std::vector<std::int64_t> times;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Integer-looking labels sort numerically, everything else lexically after them.
inline bool unit_less(const std::string& a, const std::string& b) {
    std::int64_t ia = 0;
    std::int64_t ib = 0;
    const bool na = parse_int(a, ia);
    const bool nb = parse_int(b, ib);
    if (na && nb) return ia < ib;
    if (na != nb) return na;
    return a < b;
}

struct UnitOrder {
    bool operator()(const std::string& a, const std::string& b) const { return unit_less(a, b); }
};

} // namespace detail

inline LabeledPanel parse_panel_csv(std::istream& in, std::string_view source = "<input>") {
    std::string line;
    std::size_t line_no = 0;
    auto where = [&](std::size_t ln) { return fmt::format("{}:{}", source, ln); };

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        for (auto c : detail::split_commas(line)) header.emplace_back(c);
        break;
    }
    if (header.empty()) throw ParseError(fmt::format("{}: missing header row", source));
    if (header.size() < 3 || header[0] != "unit" || header[1] != "time" || header[2] != "y")
        throw ParseError(fmt::format("{}: header must start with unit,time,y", where(line_no)));
    const std::size_t kx = header.size() - 3;
    for (std::size_t l = 0; l < kx; ++l)
        if (header[3 + l] != fmt::format("x{}", l + 1))
            throw ParseError(fmt::format("{}: expected column x{} but found '{}'", where(line_no), l + 1, header[3 + l]));

    struct Row {
        double y;
        std::vector<double> x;
    };
    std::map<std::string, std::map<std::int64_t, Row>, detail::UnitOrder> cells;
    std::set<std::int64_t> all_times;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto parts = detail::split_commas(line);
        if (parts.size() != header.size())
            throw ParseError(fmt::format("{}: expected {} columns, found {}", where(line_no), header.size(), parts.size()));
        std::string unit(parts[0]);
        if (unit.empty()) throw ParseError(fmt::format("{}: column 'unit' is empty", where(line_no)));
        std::int64_t time = 0;
        if (!detail::parse_int(parts[1], time))
            throw ParseError(fmt::format("{}: column 'time' is not an integer: '{}'", where(line_no), parts[1]));
        Row row{};
        row.x.resize(kx);
        for (std::size_t c = 2; c < parts.size(); ++c) {
            double v = 0.0;
            if (!detail::parse_double(parts[c], v) || !std::isfinite(v))
                throw ParseError(fmt::format("{}: column '{}' is not a finite number: '{}'", where(line_no), header[c],
                                             parts[c]));
            if (c == 2)
                row.y = v;
            else
                row.x[c - 3] = v;
        }
        auto& per_unit = cells[unit];
        if (!per_unit.emplace(time, std::move(row)).second)
            throw DuplicateRow(fmt::format("{}: duplicate row for unit '{}' time {}", where(line_no), unit, time));
        all_times.insert(time);
    }
    if (cells.empty()) throw ParseError(fmt::format("{}: no data rows", source));

    for (const auto& [unit, per_unit] : cells) {
        if (per_unit.size() != all_times.size()) {
            for (auto t : all_times)
                if (!per_unit.count(t))
                    throw UnbalancedPanel(fmt::format("{}: unit '{}' has no row for time {}", source, unit, t));
        }
    }

    LabeledPanel out;
    const auto n = static_cast<Index>(cells.size());
    const auto T = static_cast<Index>(all_times.size());
    out.times.assign(all_times.begin(), all_times.end());
    out.data.y.resize(n, T);
    out.data.x.assign(kx, Matrix(n, T));
    Index i = 0;
    for (const auto& [unit, per_unit] : cells) {
        out.units.push_back(unit);
        Index t = 0;
        for (const auto& [time, row] : per_unit) {
            out.data.y(i, t) = row.y;
            for (std::size_t l = 0; l < kx; ++l) out.data.x[l](i, t) = row.x[l];
            ++t;
        }
        ++i;
    }
    out.data.validate();
    return out;
}

inline LabeledPanel read_panel_csv_labeled(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_panel_csv(in, path);
}

/// Rows are ordered by (unit, time); the panel must be balanced.
inline PanelData read_panel_csv(const std::string& path) { return read_panel_csv_labeled(path).data; }

/// Writes values in shortest round-trip form; labels default to 1..n and 1..T.
inline void write_panel_csv(std::ostream& out, const PanelData& data, std::vector<std::string> units = {},
                            std::vector<std::int64_t> times = {}) {
    const Index n = data.units();
    const Index T = data.periods();
    if (units.empty())
        for (Index i = 0; i < n; ++i) units.push_back(std::to_string(i + 1));
    if (times.empty())
        for (Index t = 0; t < T; ++t) times.push_back(t + 1);
    if (static_cast<Index>(units.size()) != n || static_cast<Index>(times.size()) != T)
        throw std::invalid_argument("write_panel_csv: label count does not match panel dimensions");

    out << "unit,time,y";
    for (Index l = 0; l < data.regressors(); ++l) out << ",x" << (l + 1);
    out << '\n';
    for (Index i = 0; i < n; ++i) {
        for (Index t = 0; t < T; ++t) {
            out << units[static_cast<std::size_t>(i)] << ',' << times[static_cast<std::size_t>(t)] << ','
                << fmt::format("{}", data.y(i, t));
            for (Index l = 0; l < data.regressors(); ++l) out << ',' << fmt::format("{}", data.x[l](i, t));
            out << '\n';
        }
    }
}

inline void write_panel_csv(const std::string& path, const PanelData& data, std::vector<std::string> units = {},
                            std::vector<std::int64_t> times = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_panel_csv(out, data, std::move(units), std::move(times));
}

} // namespace paneldep
