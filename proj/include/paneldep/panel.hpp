#pragma once

// Fixed-effects panel model: within transformation and pooled OLS.

#include <paneldep/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace paneldep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Balanced panel: outcome y (n x T) and k_x regressor slices, each n x T.
/// Rows are units, columns are time periods.
struct PanelData {
    Matrix y;
    std::vector<Matrix> x;

    Index units() const { return y.rows(); }
    Index periods() const { return y.cols(); }
    Index regressors() const { return static_cast<Index>(x.size()); }

    /// Throws InvalidPanel unless n >= 2, T >= k_x + 2, every slice is n x T
    /// and every value is finite.
    void validate() const {
        const Index n = units();
        const Index t = periods();
        if (n < 2) throw InvalidPanel("panel needs at least 2 units, got " + std::to_string(n));
        if (t < regressors() + 2)
            throw InvalidPanel("panel needs T >= k_x + 2 (T=" + std::to_string(t) +
                               ", k_x=" + std::to_string(regressors()) + ")");
        if (!y.allFinite()) throw InvalidPanel("outcome contains non-finite values");
        for (std::size_t l = 0; l < x.size(); ++l) {
            if (x[l].rows() != n || x[l].cols() != t)
                throw InvalidPanel("regressor " + std::to_string(l + 1) + " is not n x T");
            if (!x[l].allFinite())
                throw InvalidPanel("regressor " + std::to_string(l + 1) + " contains non-finite values");
        }
    }
};

/// Time-demeaned panel; each row of y and of every regressor slice has zero mean.
struct CenteredPanel {
    Matrix y;
    std::vector<Matrix> x;

    Index units() const { return y.rows(); }
    Index periods() const { return y.cols(); }
    Index regressors() const { return static_cast<Index>(x.size()); }
};

struct RegressionFit {
    Vector beta;
    Matrix residuals; ///< n x T, residuals = y_tilde - sum_l beta_l x_tilde_l
    Matrix gram;      ///< k_x x k_x pooled Gram matrix of the centered regressors
};

namespace detail {

inline Matrix demean_rows(const Matrix& m) {
    const Vector means = m.rowwise().mean();
    return m.colwise() - means;
}

} // namespace detail

inline CenteredPanel center_panel(const PanelData& data) {
    data.validate();
    CenteredPanel cp;
    cp.y = detail::demean_rows(data.y);
    cp.x.reserve(data.x.size());
    for (const auto& slice : data.x) cp.x.push_back(detail::demean_rows(slice));
    return cp;
}

/// Pooled OLS on the centered panel. The intercept and the unit effects are
/// absorbed by the centering and never estimated.
///
/// Throws SingularDesign when the smallest eigenvalue of the pooled Gram
/// matrix is below 1e-12 times the largest.
inline RegressionFit fit_pooled_ols(const CenteredPanel& cp) {
    const Index kx = cp.regressors();
    RegressionFit fit;
    fit.gram.resize(kx, kx);
    Vector rhs(kx);
    for (Index a = 0; a < kx; ++a) {
        rhs(a) = cp.x[a].cwiseProduct(cp.y).sum();
        for (Index b = 0; b <= a; ++b) {
            const double g = cp.x[a].cwiseProduct(cp.x[b]).sum();
            fit.gram(a, b) = g;
            fit.gram(b, a) = g;
        }
    }

    fit.residuals = cp.y;
    if (kx == 0) {
        fit.beta.resize(0);
        return fit;
    }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi)
        throw SingularDesign("pooled Gram matrix is numerically singular (collinear or constant regressors)");

    Eigen::LLT<Matrix> llt(fit.gram);
    if (llt.info() != Eigen::Success) throw SingularDesign("pooled Gram matrix is not positive definite");
    fit.beta = llt.solve(rhs);
    for (Index l = 0; l < kx; ++l) fit.residuals -= fit.beta(l) * cp.x[l];
    return fit;
}

} // namespace paneldep
