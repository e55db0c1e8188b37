// Shared estimation plumbing: input knowledge model, run traces, and
// jittered Cholesky factorization.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "klid/chain_model.hpp"
#include "klid/errors.hpp"
#include "klid/selection.hpp"

namespace klid {

/**
 * @brief Which input rows must be estimated, and the prescribed values of
 *        the remaining (known) rows at every sample.
 *
 * known_values may be empty, meaning all known rows carry zero force.
 */
struct InputModel {
    std::vector<bool> unknown;     ///< size n; true = estimate this row
    Eigen::MatrixXd known_values;  ///< (samples x n) or empty for all-zero

    static InputModel all_unknown(int n) { return {std::vector<bool>(n, true), {}}; }
    static InputModel unknown_at(int n, const std::vector<int>& dofs_1based) {
        InputModel im{std::vector<bool>(n, false), {}};
        for (int d : dofs_1based) {
            if (d < 1 || d > n) throw std::invalid_argument("input DOF index out of range");
            im.unknown[static_cast<size_t>(d - 1)] = true;
        }
        return im;
    }

    /// Overwrite the known rows of u with their prescribed step-k values.
    Eigen::VectorXd replace_known_rows(const Eigen::VectorXd& u, int k) const {
        Eigen::VectorXd out = u;
        for (Eigen::Index i = 0; i < u.size(); ++i)
            if (!unknown[static_cast<size_t>(i)])
                out(i) = known_values.size() == 0 ? 0.0 : known_values(k, i);
        return out;
    }
};

/// Per-step traces of one identification run plus its KL summaries.
struct EstimatorRun {
    int set_index = 0;
    bool failed = false;
    int failure_step = -1;
    std::string failure_reason;

    Eigen::VectorXd time;
    Eigen::MatrixXd states;  ///< posterior [x; v] per sample row
    Eigen::MatrixXd thetas;  ///< posterior parameter estimates per sample row
    Eigen::MatrixXd inputs;  ///< estimated input u^e per sample row
    std::vector<double> kl;
    std::vector<double> er;
    std::vector<double> rho_norm;  ///< residual norms; empty for runs without them

    GaussianSummary prior;      ///< the set's initial parameter distribution
    GaussianSummary posterior;  ///< final-step posterior parameter summary

    KlTrace kl_trace() const {
        KlTrace trace;
        trace.set_index = set_index;
        trace.values = kl;
        trace.failed = failed;
        return trace;
    }
};

namespace detail {

/**
 * @brief Lower Cholesky factor of a nearly-PSD matrix.
 *
 * On factorization failure, jitter starting at 1e-12 I and escalating by 10x
 * up to 1e-6 I is added; running out of jitter raises DivergenceError.
 */
inline Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& P, int step) {
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(P.rows(), P.cols());
    for (double jitter = 1e-12; jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
        llt.compute(P + jitter * I);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw DivergenceError(step, "covariance not positive definite after maximum jitter");
}

inline void require_finite(const Eigen::MatrixXd& m, int step, const char* what) {
    if (!m.allFinite()) throw DivergenceError(step, std::string(what) + " is not finite");
}

}  // namespace detail

}  // namespace klid
