// Acceptance suite. Detail lines are indented; each criterion ends with one
// PASS/FAIL line. The run exits 0 once every criterion has been evaluated;
// with --strict the exit status is the number of failed criteria.

#include <paneldep/paneldep.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string_view>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace paneldep;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 2026;
constexpr std::uint32_t kReps = 2000;
constexpr double kAlpha = 0.05;

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    if (!ok) ++failures;
    fmt::print("{} criterion {}: {}\n", ok ? "PASS" : "FAIL", id, what);
    std::fflush(stdout);
}

void detail(const std::string& line) {
    fmt::print("    {}\n", line);
    std::fflush(stdout);
}

DgpConfig cell(Index n, Index T, Alternative alt = Alternative::null()) {
    DgpConfig cfg;
    cfg.n = n;
    cfg.T = T;
    cfg.k = 2;
    cfg.alternative = alt;
    return cfg;
}

// Runs are cached so criteria sharing a design do not recompute it.
std::map<std::string, std::vector<ReplicationOutcome>> cache;

const std::vector<ReplicationOutcome>& outcomes(const DgpConfig& cfg) {
    const std::string key =
        fmt::format("{} {} {} {} {} {}", cfg.n, cfg.T, to_string(cfg.alternative.kind), cfg.alternative.h,
                    to_string(cfg.slope_mode), to_string(cfg.error_dist));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, simulate_outcomes(cfg, kReps, kAlpha, kSeed, 0)).first;
    return it->second;
}

McReport report(const DgpConfig& cfg) { return tally(cfg, outcomes(cfg), kAlpha, kSeed); }

std::mt19937_64 oracle_rng(7);

Matrix gaussian(Index rows, Index cols) {
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = z(oracle_rng);
    return m;
}

// Correlations by explicit loops, without the library's matrix path.
Matrix correlation_by_loops(const Matrix& e) {
    const Index n = e.rows();
    const Index T = e.cols();
    Matrix r(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            double sij = 0.0, sii = 0.0, sjj = 0.0;
            for (Index t = 0; t < T; ++t) {
                sij += e(i, t) * e(j, t);
                sii += e(i, t) * e(i, t);
                sjj += e(j, t) * e(j, t);
            }
            r(i, j) = sij / std::sqrt(sii * sjj);
        }
    return r;
}

// ---------------------------------------------------------------------------

void size_reproduction() {
    struct Cell {
        Index T, n;
        std::map<TestName, double> reference; // percent
    };
    const std::vector<Cell> cells = {
        {50, 50, {{TestName::LM_E, 5.00}, {TestName::PET, 5.25}, {TestName::LM_ADJ, 5.20}, {TestName::CD, 5.45}}},
        {50, 100, {{TestName::LM_E, 5.05}, {TestName::PET, 5.65}, {TestName::LM_ADJ, 5.15}, {TestName::CD, 4.95}}},
        {100, 50, {{TestName::LM_E, 5.45}, {TestName::PET, 4.80}, {TestName::LM_ADJ, 5.75}, {TestName::CD, 4.45}}},
        {100, 100, {{TestName::LM_E, 5.00}, {TestName::PET, 4.70}, {TestName::LM_ADJ, 5.05}, {TestName::CD, 5.50}}},
    };
    bool ok = true;
    for (const auto& c : cells) {
        const McReport r = report(cell(c.n, c.T));
        auto targets = c.reference;
        targets[TestName::LM_BC] = 5.00; // no published cell; nominal level
        for (const auto& [t, target] : targets) {
            const double got = 100.0 * r.rejection_rate.at(t);
            const bool pass = std::abs(got - target) <= 1.5;
            ok = ok && pass;
            detail(fmt::format("{} T={} n={} {:<7} size {:5.2f}% target {:5.2f}% (excluded {})", pass ? "ok  " : "MISS",
                               c.T, c.n, to_string(t), got, target, r.excluded));
        }
    }
    verdict(1, ok, "null sizes within 1.5pp of reference (2000 reps, Normal, k=2)");
}

void dense_power() {
    bool ok = true;
    const McReport h2 = report(cell(50, 100, Alternative::dense(2.0)));
    const double pet = h2.rejection_rate.at(TestName::PET);
    const double lme = h2.rejection_rate.at(TestName::LM_E);
    const bool pet_ok = std::abs(pet - 0.9375) <= 0.04;
    const bool lme_ok = std::abs(lme - 0.8445) <= 0.04;
    detail(fmt::format("{} PET  h=2 power {:.4f} target 0.9375 +- 0.04", pet_ok ? "ok  " : "MISS", pet));
    detail(fmt::format("{} LM_E h=2 power {:.4f} target 0.8445 +- 0.04", lme_ok ? "ok  " : "MISS", lme));
    ok = pet_ok && lme_ok;
    for (double h : {1.0, 2.0, 3.0, 4.0}) {
        const double cd = report(cell(50, 100, Alternative::dense(h))).rejection_rate.at(TestName::CD);
        const bool pass = cd < 0.10;
        ok = ok && pass;
        detail(fmt::format("{} CD   h={} power {:.4f} < 0.10", pass ? "ok  " : "MISS", h, cd));
    }
    verdict(2, ok, "dense power at n=50, T=100");
}

void enhancement_ordering() {
    bool ok = true;
    for (Index n : {50, 100})
        for (double h : {1.0, 2.0}) {
            const McReport r = report(cell(n, 100, Alternative::dense(h)));
            const double gain = r.rejection_rate.at(TestName::PET) - r.rejection_rate.at(TestName::LM_E);
            const bool pass = gain >= 0.05;
            ok = ok && pass;
            detail(fmt::format("{} dense n={} T=100 h={}: PET {:.4f} LM_E {:.4f} gain {:+.4f} (need >= 0.05)",
                               pass ? "ok  " : "MISS", n, h, r.rejection_rate.at(TestName::PET),
                               r.rejection_rate.at(TestName::LM_E), gain));
        }
    for (auto alt : {Alternative::sparse(), Alternative::less_sparse()})
        for (Index T : {50, 100})
            for (Index n : {50, 100, 200}) {
                const McReport r = report(cell(n, T, alt));
                const double pet = r.rejection_rate.at(TestName::PET);
                const double lme = r.rejection_rate.at(TestName::LM_E);
                const double floor = lme - 2.0 * r.mc_se.at(TestName::LM_E);
                const bool pass = pet >= floor;
                ok = ok && pass;
                detail(fmt::format("{} {:<11} T={} n={}: PET {:.4f} LM_E {:.4f} floor {:.4f}", pass ? "ok  " : "MISS",
                                   to_string(alt.kind), T, n, pet, lme, floor));
            }
    verdict(3, ok, "PET enhances LM_E under dense factors and does not lose under sparse ones");
}

void null_distribution() {
    const auto& out = outcomes(cell(100, 100));
    bool ok = true;
    for (TestName t : {TestName::LM_E, TestName::PET}) {
        const auto sample = statistic_sample(out, t);
        const KsResult ks = ks_test_standard_normal(sample);
        const bool pass = ks.p_value > 0.01;
        ok = ok && pass;
        detail(fmt::format("{} {:<5} KS D={:.4f} p={:.4f} over {} replications", pass ? "ok  " : "MISS", to_string(t),
                           ks.statistic, ks.p_value, sample.size()));
    }
    verdict(4, ok, "null statistics at n=T=100 are standard normal (KS p > 0.01)");
}

void oracle_equivalences() {
    double worst2 = 0.0, worst4 = 0.0, worst_proj = 0.0;
    std::uniform_int_distribution<Index> small_n(2, 50);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = small_n(oracle_rng);
        const Matrix e = gaussian(n, n + 10);
        const CorrSummary cs = summarize_residuals(detail::demean_rows(e));
        const Matrix r = correlation_by_loops(detail::demean_rows(e));
        double sum_sq = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (i != j) sum_sq += r(i, j) * r(i, j);
        worst2 = std::max(worst2, std::abs(cs.trace_r2 - (sum_sq + n)) / (sum_sq + n));
    }
    std::uniform_int_distribution<Index> tiny_n(2, 8);
    for (int rep = 0; rep < 100; ++rep) {
        const Index n = tiny_n(oracle_rng);
        const Matrix e = detail::demean_rows(gaussian(n, 12));
        const CorrSummary cs = summarize_residuals(e);
        const Matrix r = correlation_by_loops(e);
        double quad = 0.0;
        for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b)
                for (Index c = 0; c < n; ++c)
                    for (Index d = 0; d < n; ++d) quad += r(a, b) * r(b, c) * r(c, d) * r(d, a);
        worst4 = std::max(worst4, std::abs(cs.trace_r4 - quad) / quad);
    }
    std::uniform_int_distribution<Index> periods(6, 12);
    for (int rep = 0; rep < 100; ++rep) {
        const Index T = periods(oracle_rng);
        PanelData d;
        d.y = gaussian(3, T);
        d.x = {gaussian(3, T)};
        const CenteredPanel cp = center_panel(d);
        for (Index r = 0; r < 3; ++r)
            for (Index s = 0; s < 3; ++s) {
                if (r == s) continue;
                const UnitDesign a = unit_design(cp, r);
                const UnitDesign b = unit_design(cp, s);
                const ProjectorTraces fast = projector_traces(a, b);
                const Matrix I = Matrix::Identity(T, T);
                const Matrix& xr = a.rows();
                const Matrix& xs = b.rows();
                const Matrix mr = I - xr.transpose() * (xr * xr.transpose()).inverse() * xr;
                const Matrix ms = I - xs.transpose() * (xs * xs.transpose()).inverse() * xs;
                const Matrix p = mr * ms;
                worst_proj = std::max({worst_proj, std::abs(fast.tr_mm - p.trace()), std::abs(fast.tr_mm2 - (p * p).trace())});
            }
    }
    detail(fmt::format("trace of R^2 vs pair sum: worst relative error {:.3e} (tol 1e-8)", worst2));
    detail(fmt::format("trace of R^4 vs quadruple sum: worst relative error {:.3e} (tol 1e-8)", worst4));
    detail(fmt::format("reduced projector traces vs T x T construction: worst error {:.3e} (tol 1e-9)", worst_proj));
    verdict(5, worst2 <= 1e-8 && worst4 <= 1e-8 && worst_proj <= 1e-9, "oracle equivalences");
}

void algebraic_identities() {
    std::uniform_int_distribution<Index> dim(2, 5000);
    int mean_mismatch = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Index n = dim(oracle_rng);
        const Index T = std::max<Index>(dim(oracle_rng), 4);
        const TestConstants tc = test_constants(n, T, 2.0);
        if (tc.mu_rmt != tc.mu_lm_e) ++mean_mismatch;
    }
    double worst_bridge = 0.0;
    std::uniform_int_distribution<Index> nn(2, 120);
    for (int rep = 0; rep < 200; ++rep) {
        const Index n = nn(oracle_rng);
        const Index T = nn(oracle_rng) + 5;
        const CorrSummary cs = summarize_residuals(detail::demean_rows(gaussian(n, T)));
        const TestConstants tc = test_constants(n, T, 2.0);
        const double nd = static_cast<double>(n);
        const double c = tc.c_T;
        const double ltilde = (static_cast<double>(T) * cs.sum_rho2 - nd * (nd - 1.0)) / (2.0 * nd);
        const double lhs = (cs.trace_r2 - tc.mu_lm_e) / (2.0 * c);
        worst_bridge = std::max(worst_bridge, std::abs(lhs - (ltilde - c / 2.0)));
    }
    detail(fmt::format("RMT mean vs LM_E mean: {} mismatches over 1000 (n, T) pairs", mean_mismatch));
    detail(fmt::format("bridge identity: worst absolute error {:.3e} over 200 summaries (tol 1e-10)", worst_bridge));
    verdict(6, mean_mismatch == 0 && worst_bridge <= 1e-10, "algebraic identities");
}

void trace_probe() {
    std::vector<double> g2, g4;
    for (Index n : {50, 100, 200}) {
        DgpConfig cfg = cell(n, n);
        std::vector<double> a, b;
        for (const auto& g : trace_gap_probe(cfg, 200, kSeed, 0)) {
            a.push_back(g.gap2);
            b.push_back(g.gap4);
        }
        g2.push_back(median(a));
        g4.push_back(median(b));
        detail(fmt::format("n=T={}: median gap2 {:.5f} median gap4 {:.5f}", n, g2.back(), g4.back()));
    }
    const bool ok = g2[0] > g2[1] && g2[1] > g2[2] && g4[0] > g4[1] && g4[1] > g4[2];
    verdict(7, ok, "trace gaps shrink as the panel grows");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism() {
    const fs::path dir = fs::temp_directory_path() / fmt::format("paneldep_acceptance_{}", std::random_device{}());
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "grid.cfg");
        cfg << "replications = 200\nn = 30, 60\nT = 40\nalternative = null, dense, sparse\nh = 2\n";
    }
    auto run = [&](int threads, const std::string& out) {
        const std::string cmd = fmt::format("PANELDEP_THREADS={} \"{}\" simulate --config \"{}\" --seed {} --out \"{}\"",
                                            threads, PANELDEP_CLI, (dir / "grid.cfg").string(), kSeed,
                                            (dir / out).string());
        return std::system(cmd.c_str());
    };
    const int a = run(8, "eight.txt");
    const int b = run(1, "one.txt");
    const std::string ra = slurp(dir / "eight.txt");
    const std::string rb = slurp(dir / "one.txt");
    fs::remove_all(dir);
    const bool ok = a == 0 && b == 0 && !ra.empty() && ra == rb;
    detail(fmt::format("exit codes {} / {}, report sizes {} / {} bytes, identical: {}", a, b, ra.size(), rb.size(),
                       ra == rb ? "yes" : "no"));
    verdict(8, ok, "simulate output is byte-identical at 8 and 1 threads");
}

void heterogeneous_sizes() {
    // Supplementary, not a numbered criterion: sizes stay near nominal when
    // slopes vary across units.
    bool ok = true;
    for (Index T : {50, 100})
        for (Index n : {50, 100, 200}) {
            DgpConfig cfg = cell(n, T);
            cfg.slope_mode = SlopeMode::Heterogeneous;
            const McReport r = report(cfg);
            std::string row = fmt::format("T={} n={}:", T, n);
            for (TestName t : {TestName::LM_E, TestName::PET, TestName::LM_ADJ, TestName::CD}) {
                const double p = r.rejection_rate.at(t);
                ok = ok && p >= 0.03 && p <= 0.07;
                row += fmt::format(" {} {:.2f}%", to_string(t), 100.0 * p);
            }
            detail(row);
        }
    fmt::print("{} supplementary: heterogeneous-slope sizes within [3%, 7%]\n", ok ? "PASS" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string_view(argv[1]) == "--strict";
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    fmt::print("acceptance: seed {}, {} replications per cell, alpha {}, {} worker(s)\n", kSeed, kReps, kAlpha,
               resolve_threads(0));
    size_reproduction();
    dense_power();
    enhancement_ordering();
    null_distribution();
    oracle_equivalences();
    algebraic_identities();
    trace_probe();
    determinism();
    heterogeneous_sizes();
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    fmt::print("acceptance: {} criterion failure(s), {:.0f}s\n", failures, secs);
    return strict ? std::min(failures, 100) : 0;
}
