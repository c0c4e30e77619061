#pragma once

// Residual covariance / correlation matrices and their trace powers.

#include <paneldep/errors.hpp>
#include <paneldep/panel.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace paneldep {

/// Correlation matrix of the residual rows together with the sums every
/// test statistic is built from. Off-diagonal sums run over ordered pairs
/// r != s, so each unordered pair is counted twice.
struct CorrSummary {
    Index n = 0;
    Index T = 0;
    Vector diag_var;
    Matrix corr;
    double sum_rho = 0.0;
    double sum_rho2 = 0.0;
    double trace_r2 = 0.0;
    double trace_r4 = 0.0;
};

namespace detail {

inline void check_diagonal(const Vector& diag) {
    const double scale = diag.cwiseAbs().maxCoeff();
    for (Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0) || diag(i) < 1e-14 * scale)
            throw DegenerateUnit("unit " + std::to_string(i + 1) +
                                 " has a numerically zero residual series");
    }
}

} // namespace detail

/// S = (1/T) sum_t v_t v_t' with the divisor exactly T.
inline Matrix residual_covariance(const Matrix& residuals) {
    if (residuals.rows() < 2) throw InvalidPanel("covariance needs at least 2 units");
    if (residuals.cols() < 1) throw InvalidPanel("covariance needs at least 1 period");
    Matrix cov = Matrix::Zero(residuals.rows(), residuals.rows());
    cov.selfadjointView<Eigen::Lower>().rankUpdate(residuals, 1.0 / static_cast<double>(residuals.cols()));
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    detail::check_diagonal(cov.diagonal());
    return cov;
}

/// R = D^{-1/2} S D^{-1/2}. tr(R^4) is taken from the product R^2 * R^2
/// (as the squared Frobenius norm of the symmetric R^2), never from sum rho^4.
inline CorrSummary correlation_summary(const Matrix& cov, Index periods) {
    const Index n = cov.rows();
    if (n < 2 || cov.cols() != n) throw InvalidPanel("covariance must be square with n >= 2");
    detail::check_diagonal(cov.diagonal());

    CorrSummary cs;
    cs.n = n;
    cs.T = periods;
    cs.diag_var = cov.diagonal();
    const Vector inv_sd = cs.diag_var.cwiseSqrt().cwiseInverse();
    cs.corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    for (Index i = 0; i < n; ++i) {
        cs.corr(i, i) = 1.0;
        for (Index j = 0; j < i; ++j) {
            const double r = std::clamp(0.5 * (cs.corr(i, j) + cs.corr(j, i)), -1.0, 1.0);
            cs.corr(i, j) = r;
            cs.corr(j, i) = r;
        }
    }

    double s1 = 0.0;
    double s2 = 0.0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) {
            const double r = cs.corr(i, j);
            s1 += r;
            s2 += r * r;
        }
    }
    cs.sum_rho = 2.0 * s1;
    cs.sum_rho2 = 2.0 * s2;

    Matrix r2 = Matrix::Zero(n, n);
    r2.selfadjointView<Eigen::Lower>().rankUpdate(cs.corr);
    r2.triangularView<Eigen::StrictlyUpper>() = r2.transpose();
    cs.trace_r2 = r2.trace();
    cs.trace_r4 = r2.squaredNorm();
    return cs;
}

/// Convenience: residual matrix straight to its correlation summary.
inline CorrSummary summarize_residuals(const Matrix& residuals) {
    return correlation_summary(residual_covariance(residuals), residuals.cols());
}

} // namespace paneldep
