#pragma once

// Monte Carlo size/power experiments and trace-gap probes.
//
// Every replication is a pure function of (config, seed, replication index).
// Workers write into per-replication slots and the tally runs afterwards in
// index order, so reports are bit-identical for any thread count.

#include <paneldep/cd_tests.hpp>
#include <paneldep/corr.hpp>
#include <paneldep/dgp.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <thread>
#include <vector>

namespace paneldep {

/// Resolves a requested worker count; 0 means available parallelism.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by a body is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Statistics of one replication, or nothing when the fit failed.
struct ReplicationOutcome {
    std::optional<std::vector<TestResult>> results;
};

/// Draws replication `index` and runs the full battery with k = config.k.
inline ReplicationOutcome run_replication(const DgpConfig& cfg, double alpha, std::uint64_t seed,
                                          std::uint32_t index) {
    const SimulatedPanel sp = gen_panel(cfg, seed, index);
    try {
        return {run_all_tests(sp.data, static_cast<double>(cfg.k), alpha)};
    } catch (const SingularDesign&) {
    } catch (const DegenerateUnit&) {
    } catch (const SingularUnitDesign&) {
    } catch (const NonpositiveVariance&) {
    }
    return {};
}

struct McReport {
    DgpConfig config;
    std::uint32_t replications = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::uint32_t excluded = 0; ///< replications whose fit failed
    std::map<TestName, double> rejection_rate;
    std::map<TestName, double> mc_se;
};

/// Binomial Monte Carlo standard error sqrt(p(1-p)/reps).
inline double binomial_se(double rate, std::uint32_t reps) {
    return reps == 0 ? 0.0 : std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

/// Per-replication outcomes in index order.
inline std::vector<ReplicationOutcome> simulate_outcomes(const DgpConfig& cfg, std::uint32_t replications,
                                                         double alpha, std::uint64_t seed, unsigned threads = 0) {
    cfg.validate();
    std::vector<ReplicationOutcome> out(replications);
    parallel_for(replications, threads,
                 [&](std::size_t i) { out[i] = run_replication(cfg, alpha, seed, static_cast<std::uint32_t>(i)); });
    return out;
}

inline McReport tally(const DgpConfig& cfg, const std::vector<ReplicationOutcome>& outcomes, double alpha,
                      std::uint64_t seed) {
    McReport rep;
    rep.config = cfg;
    rep.replications = static_cast<std::uint32_t>(outcomes.size());
    rep.alpha = alpha;
    rep.seed = seed;
    std::map<TestName, std::uint32_t> rejects;
    for (TestName t : kAllTests) rejects[t] = 0;
    for (const auto& o : outcomes) {
        if (!o.results) {
            ++rep.excluded;
            continue;
        }
        for (const auto& r : *o.results)
            if (r.reject) ++rejects[r.test_name];
    }
    const std::uint32_t used = rep.replications - rep.excluded;
    for (TestName t : kAllTests) {
        const double rate = used == 0 ? 0.0 : static_cast<double>(rejects[t]) / static_cast<double>(used);
        rep.rejection_rate[t] = rate;
        rep.mc_se[t] = binomial_se(rate, used);
    }
    return rep;
}

inline McReport run_experiment(const DgpConfig& cfg, std::uint32_t replications, double alpha, std::uint64_t seed,
                               unsigned threads = 0) {
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    return tally(cfg, simulate_outcomes(cfg, replications, alpha, seed, threads), alpha, seed);
}

/// Statistic values of one test across replications, skipping excluded ones.
inline std::vector<double> statistic_sample(const std::vector<ReplicationOutcome>& outcomes, TestName name) {
    std::vector<double> xs;
    xs.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (!o.results) continue;
        for (const auto& r : *o.results)
            if (r.test_name == name) xs.push_back(r.statistic);
    }
    return xs;
}

// ---------------------------------------------------------------------------

struct TraceGap {
    double gap2 = 0.0; ///< |tr(R_hat^2) - tr(R^2)|
    double gap4 = 0.0; ///< |tr(R_hat^4) - tr(R^4)|
};

/// Compares the residual-based correlation matrix with the one built from the
/// centered true errors. With `use_true_beta` the residuals are formed with the
/// true slopes, which makes both matrices coincide.
inline TraceGap trace_gap(const DgpConfig& cfg, std::uint64_t seed, std::uint32_t index, bool use_true_beta = false) {
    const SimulatedPanel sp = gen_panel(cfg, seed, index);
    const CenteredPanel cp = center_panel(sp.data);
    Matrix residuals;
    if (use_true_beta) {
        residuals = cp.y;
        for (Index l = 0; l < cp.regressors(); ++l)
            residuals -= sp.slopes.row(l).transpose().asDiagonal() * cp.x[l];
    } else {
        residuals = fit_pooled_ols(cp).residuals;
    }
    const CorrSummary est = summarize_residuals(residuals);
    const CorrSummary truth = summarize_residuals(detail::demean_rows(sp.errors));
    return {std::abs(est.trace_r2 - truth.trace_r2), std::abs(est.trace_r4 - truth.trace_r4)};
}

inline std::vector<TraceGap> trace_gap_probe(const DgpConfig& cfg, std::uint32_t replications, std::uint64_t seed,
                                             unsigned threads = 0, bool use_true_beta = false) {
    cfg.validate();
    if (!cfg.alternative.is_null()) throw ConfigError("trace_gap_probe runs under the null only");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    std::vector<TraceGap> gaps(replications);
    parallel_for(replications, threads, [&](std::size_t i) {
        gaps[i] = trace_gap(cfg, seed, static_cast<std::uint32_t>(i), use_true_beta);
    });
    return gaps;
}

/// Median of a copy of xs (mean of the two middle values for even sizes).
inline double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    const double upper = xs[mid];
    if (xs.size() % 2 == 1) return upper;
    return 0.5 * (upper + *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid)));
}

} // namespace paneldep
