#pragma once

// Simulation designs: fixed-effects panel with AR(1) regressors, three
// standardized error laws, and single-factor alternatives (dense, sparse,
// less sparse). Heterogeneous slopes are available as a variant.
//
// Draw order inside a replication is fixed. Each piece owns a stream:
//   Regressors   : tau^2 for every (l, i), then the AR paths (burn-in first)
//   Errors       : sigma_i^2 for every unit (when scaled), then eps_it row by row
//   Factor       : loadings lambda_i, then factors f_t
//   FixedEffects : mu_i
//   Slopes       : beta_li (heterogeneous mode only)

#include <paneldep/errors.hpp>
#include <paneldep/panel.hpp>
#include <paneldep/rng.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace paneldep {

enum class ErrorDist { Normal, StudentT7, ChiSq5 };
enum class SlopeMode { FixedEffects, Heterogeneous };

inline std::string_view to_string(ErrorDist d) {
    switch (d) {
    case ErrorDist::Normal: return "normal";
    case ErrorDist::StudentT7: return "student_t7";
    case ErrorDist::ChiSq5: return "chisq5";
    }
    return "?";
}

inline std::string_view to_string(SlopeMode m) { return m == SlopeMode::Heterogeneous ? "heterogeneous" : "fixed"; }

struct Alternative {
    enum class Kind { Null, Dense, Sparse, LessSparse } kind = Kind::Null;
    double h = 0.0; ///< dense strength, sum of squared loadings on average

    static Alternative null() { return {}; }
    static Alternative dense(double h) { return {Kind::Dense, h}; }
    static Alternative sparse() { return {Kind::Sparse, 0.0}; }
    static Alternative less_sparse() { return {Kind::LessSparse, 0.0}; }

    bool is_null() const { return kind == Kind::Null; }
};

inline std::string_view to_string(Alternative::Kind k) {
    switch (k) {
    case Alternative::Kind::Null: return "null";
    case Alternative::Kind::Dense: return "dense";
    case Alternative::Kind::Sparse: return "sparse";
    case Alternative::Kind::LessSparse: return "less_sparse";
    }
    return "?";
}

struct DgpConfig {
    Index n = 50;
    Index T = 50;
    Index k = 2; ///< regressors including the intercept
    ErrorDist error_dist = ErrorDist::Normal;
    SlopeMode slope_mode = SlopeMode::FixedEffects;
    Alternative alternative;
    Index burn_in = 50;
    double ar_coef = 0.6;
    /// Under an alternative, scale the idiosyncratic part by sigma_i as in the
    /// null. Off by default: the factor then competes with unit-variance noise.
    bool scaled_alternative_noise = false;

    void validate() const {
        if (n < 2) throw ConfigError("n must be >= 2");
        if (k < 1) throw ConfigError("k must be >= 1");
        if (T < k + 1) throw ConfigError("T must be >= k + 1");
        if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
        if (!(std::abs(ar_coef) < 1.0)) throw ConfigError("ar_coef must lie in (-1, 1)");
        if (alternative.kind == Alternative::Kind::Dense && !(alternative.h > 0.0))
            throw ConfigError("dense alternative needs h > 0");
    }
};

/// Largest m with m^den <= n^num, i.e. floor(n^(num/den)) without rounding
/// trouble at exact powers.
inline Index floor_rational_power(Index n, int num, int den) {
    auto ipow = [](unsigned __int128 b, int e) {
        unsigned __int128 r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    };
    const unsigned __int128 target = ipow(static_cast<unsigned __int128>(n), num);
    auto m = static_cast<Index>(std::floor(std::pow(static_cast<double>(n), static_cast<double>(num) / den)));
    while (m > 0 && ipow(static_cast<unsigned __int128>(m), den) > target) --m;
    while (ipow(static_cast<unsigned __int128>(m + 1), den) <= target) ++m;
    return m;
}

/// Number of units carrying a nonzero loading under the sparse designs.
inline Index loaded_units(Index n, Alternative::Kind kind) {
    switch (kind) {
    case Alternative::Kind::Sparse: return floor_rational_power(n, 3, 10);
    case Alternative::Kind::LessSparse: return floor_rational_power(n, 1, 2);
    case Alternative::Kind::Dense: return n;
    case Alternative::Kind::Null: return 0;
    }
    return 0;
}

/// k - 1 AR(1) regressor slices: x_t = a x_{t-1} + sigma u_t from x = 0,
/// sigma^2 = tau^2 / (1 - a^2), tau^2 ~ chi2(6)/6, u ~ N(0,1). The first
/// burn_in steps are discarded.
template <class Rng>
std::vector<Matrix> gen_regressors(Rng& rng, Index n, Index T, Index k, Index burn_in, double ar_coef) {
    if (k < 2) throw std::invalid_argument("gen_regressors: need k >= 2");
    const Index kx = k - 1;
    std::chi_squared_distribution<double> chi6(6.0);
    Matrix sigma(kx, n);
    for (Index l = 0; l < kx; ++l)
        for (Index i = 0; i < n; ++i) sigma(l, i) = std::sqrt(chi6(rng) / 6.0 / (1.0 - ar_coef * ar_coef));

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Matrix> x(static_cast<std::size_t>(kx), Matrix(n, T));
    for (Index l = 0; l < kx; ++l) {
        for (Index i = 0; i < n; ++i) {
            double v = 0.0;
            for (Index t = 0; t < burn_in; ++t) v = ar_coef * v + sigma(l, i) * normal(rng);
            for (Index t = 0; t < T; ++t) {
                v = ar_coef * v + sigma(l, i) * normal(rng);
                x[l](i, t) = v;
            }
        }
    }
    return x;
}

/// One standardized innovation (mean 0, variance 1) from the chosen law.
template <class Rng>
class StandardizedDraw {
  public:
    explicit StandardizedDraw(ErrorDist dist) : dist_(dist) {}

    double operator()(Rng& rng) {
        switch (dist_) {
        case ErrorDist::Normal: return normal_(rng);
        case ErrorDist::StudentT7: return student_(rng) / std::sqrt(7.0 / 5.0);
        case ErrorDist::ChiSq5: return (chi5_(rng) - 5.0) / std::sqrt(10.0);
        }
        return 0.0;
    }

  private:
    ErrorDist dist_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_{7.0};
    std::chi_squared_distribution<double> chi5_{5.0};
};

/// n x T standardized innovations, optionally scaled per unit by sigma_i with
/// sigma_i^2 ~ chi2(2)/2 (drawn first, one per unit).
template <class Rng>
Matrix gen_errors(Rng& rng, Index n, Index T, ErrorDist dist, bool scaled) {
    Vector sigma = Vector::Ones(n);
    if (scaled) {
        std::chi_squared_distribution<double> chi2(2.0);
        for (Index i = 0; i < n; ++i) sigma(i) = std::sqrt(chi2(rng) / 2.0);
    }
    StandardizedDraw<Rng> eps(dist);
    Matrix e(n, T);
    for (Index i = 0; i < n; ++i)
        for (Index t = 0; t < T; ++t) e(i, t) = sigma(i) * eps(rng);
    return e;
}

/// Null errors v_it = sigma_i eps_it with sigma_i^2 ~ chi2(2)/2.
template <class Rng>
Matrix gen_errors_null(Rng& rng, Index n, Index T, ErrorDist dist) {
    return gen_errors(rng, n, T, dist, true);
}

/// Factor loadings. Dense(h): U[-b, b], b = sqrt(3h/n). Sparse / LessSparse:
/// U(0.5, 1.5) on the first floor(n^0.3) / floor(n^0.5) units, zero elsewhere.
template <class Rng>
Vector gen_loadings(Rng& rng, Index n, const Alternative& alt) {
    Vector lambda = Vector::Zero(n);
    switch (alt.kind) {
    case Alternative::Kind::Null: throw std::invalid_argument("gen_loadings: null alternative has no loadings");
    case Alternative::Kind::Dense: {
        const double b = std::sqrt(3.0 * alt.h / static_cast<double>(n));
        std::uniform_real_distribution<double> u(-b, b);
        for (Index i = 0; i < n; ++i) lambda(i) = u(rng);
        break;
    }
    case Alternative::Kind::Sparse:
    case Alternative::Kind::LessSparse: {
        std::uniform_real_distribution<double> u(0.5, 1.5);
        const Index m = loaded_units(n, alt.kind);
        for (Index i = 0; i < m; ++i) lambda(i) = u(rng);
        break;
    }
    }
    return lambda;
}

/// A generated panel together with the latent pieces the probes need.
struct SimulatedPanel {
    PanelData data;
    Matrix errors;   ///< v_it, n x T
    Matrix slopes;   ///< (k-1) x n true slopes per unit
    Vector loadings; ///< empty under the null
};

/// y_it = 1 + sum_l x_lit beta_l + mu_i + v_it with beta_l = l (l = 2..k) or
/// beta_li ~ N(1, 0.04) in heterogeneous mode, mu_i ~ N(1, 1). Under an
/// alternative v_it = lambda_i f_t + eps_it with f_t ~ N(0, 1) and eps_it of unit
/// variance (or sigma_i eps_it with scaled_alternative_noise).
inline SimulatedPanel gen_panel(const DgpConfig& cfg, std::uint64_t seed, std::uint32_t replication) {
    cfg.validate();
    const Index n = cfg.n;
    const Index T = cfg.T;
    const Index kx = cfg.k - 1;

    SimulatedPanel sp;
    if (kx > 0) {
        PhiloxStream rx(seed, replication, StreamRole::Regressors);
        sp.data.x = gen_regressors(rx, n, T, cfg.k, cfg.burn_in, cfg.ar_coef);
    }

    PhiloxStream re(seed, replication, StreamRole::Errors);
    sp.errors = gen_errors(re, n, T, cfg.error_dist, cfg.alternative.is_null() || cfg.scaled_alternative_noise);

    if (!cfg.alternative.is_null()) {
        PhiloxStream rf(seed, replication, StreamRole::Factor);
        sp.loadings = gen_loadings(rf, n, cfg.alternative);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector f(T);
        for (Index t = 0; t < T; ++t) f(t) = normal(rf);
        sp.errors.noalias() += sp.loadings * f.transpose();
    }

    PhiloxStream rm(seed, replication, StreamRole::FixedEffects);
    std::normal_distribution<double> mu_dist(1.0, 1.0);
    Vector mu(n);
    for (Index i = 0; i < n; ++i) mu(i) = mu_dist(rm);

    sp.slopes.resize(kx, n);
    if (cfg.slope_mode == SlopeMode::Heterogeneous) {
        PhiloxStream rs(seed, replication, StreamRole::Slopes);
        std::normal_distribution<double> beta_dist(1.0, 0.2);
        for (Index l = 0; l < kx; ++l)
            for (Index i = 0; i < n; ++i) sp.slopes(l, i) = beta_dist(rs);
    } else {
        for (Index l = 0; l < kx; ++l) sp.slopes.row(l).setConstant(static_cast<double>(l + 2));
    }

    sp.data.y = sp.errors;
    sp.data.y.colwise() += (mu.array() + 1.0).matrix();
    for (Index l = 0; l < kx; ++l) sp.data.y += sp.slopes.row(l).transpose().asDiagonal() * sp.data.x[l];
    return sp;
}

} // namespace paneldep
