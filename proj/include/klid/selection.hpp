// Gaussian Kullback-Leibler divergence between posterior and prior parameter
// summaries, the relative parameter error metric, and winner selection
// across identification runs.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace klid {

struct GaussianSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// KL values for a single identification run, one entry per processed step.
struct KlTrace {
    int set_index = 0;
    std::vector<double> values;
    bool failed = false;

    double final_value() const {
        if (failed || values.empty()) return std::numeric_limits<double>::infinity();
        return values.back();
    }
};

struct SelectionReport {
    std::vector<KlTrace> kl_traces;
    std::vector<std::vector<double>> er_traces;  ///< filled by the runner
    int winner_set = -1;
    std::string tie_note;
};

struct SelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Cholesky factor of a symmetric PD matrix; throws with the offending
/// eigenvalue when the factorization fails.
inline Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& W, const char* label) {
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success) {
        const double min_eig =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W).eigenvalues().minCoeff();
        throw std::runtime_error(std::string(label) +
                                 " covariance is not positive definite (min eigenvalue " +
                                 std::to_string(min_eig) + ")");
    }
    return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/**
 * @brief D_KL(posterior || prior) between two Gaussians:
 *        1/2 [ln(det W_I / det W_II) - d + tr(W_I^{-1} W_II)
 *             + (E_I - E_II)^T W_I^{-1} (E_I - E_II)],
 *        with I = prior and II = posterior.
 *
 * Log-determinants and solves go through Cholesky factors for stability.
 */
inline double gaussian_kl(const GaussianSummary& prior, const GaussianSummary& posterior) {
    const Eigen::Index d = prior.mean.size();
    if (posterior.mean.size() != d || prior.cov.rows() != d || prior.cov.cols() != d ||
        posterior.cov.rows() != d || posterior.cov.cols() != d)
        throw std::invalid_argument("gaussian_kl dimension mismatch");
    const auto llt_prior = detail::checked_llt(prior.cov, "prior");
    const auto llt_post = detail::checked_llt(posterior.cov, "posterior");
    const double log_det_ratio = detail::log_det_from_llt(llt_prior) -
                                 detail::log_det_from_llt(llt_post);
    const double trace_term = llt_prior.solve(posterior.cov).trace();
    const Eigen::VectorXd diff = prior.mean - posterior.mean;
    const double quad = diff.dot(llt_prior.solve(diff));
    return 0.5 * (log_det_ratio - static_cast<double>(d) + trace_term + quad);
}

/**
 * @brief Sample covariance of a parameter history (rows = steps) plus a
 *        1e-8 I ridge; a window of fewer than two samples yields the ridge
 *        alone.
 *
 * Used to summarize runs whose filter covariance does not include the
 * parameters.
 */
inline Eigen::MatrixXd sample_covariance_with_ridge(const Eigen::MatrixXd& theta_history,
                                                    double ridge = 1e-8) {
    const Eigen::Index n = theta_history.rows();
    const Eigen::Index d = theta_history.cols();
    Eigen::MatrixXd W = ridge * Eigen::MatrixXd::Identity(d, d);
    if (n >= 2) {
        const Eigen::RowVectorXd mean = theta_history.colwise().mean();
        const Eigen::MatrixXd centered = theta_history.rowwise() - mean;
        W += (centered.transpose() * centered) / static_cast<double>(n - 1);
    }
    return W;
}

/// Relative parameter error: sum_j |(theta_j - theta_j^true) / theta_j^true|.
inline double error_metric(const Eigen::VectorXd& theta_est, const Eigen::VectorXd& theta_true) {
    if (theta_est.size() != theta_true.size())
        throw std::invalid_argument("error_metric dimension mismatch");
    if ((theta_true.array() == 0.0).any())
        throw std::invalid_argument("error_metric requires nonzero true parameters");
    return ((theta_est - theta_true).array() / theta_true.array()).abs().sum();
}

/**
 * @brief Pick the run whose final-step KL divergence is least.
 *
 * Failed runs are excluded; ties go to the lowest set index; every trace is
 * kept in the report. Throws SelectionError when no run completed.
 */
inline SelectionReport select_best(const std::vector<KlTrace>& traces) {
    if (traces.empty()) throw SelectionError("no identification runs to select from");
    SelectionReport report;
    report.kl_traces = traces;
    double best = std::numeric_limits<double>::infinity();
    bool tie = false;
    for (const auto& trace : traces) {
        const double v = trace.final_value();
        if (!std::isfinite(v)) continue;
        if (v < best) {
            best = v;
            report.winner_set = trace.set_index;
            tie = false;
        } else if (v == best) {
            tie = true;
        }
    }
    if (report.winner_set < 0) throw SelectionError("all identification runs failed");
    if (tie)
        report.tie_note = "tie on final KL resolved to lowest set index " +
                          std::to_string(report.winner_set);
    return report;
}

}  // namespace klid
