// Residual-based Kalman filter: linear KF on displacement/velocity
// pseudo-measurements, input recovery from the equation of motion, and
// regularized Gauss-Newton parameter corrections.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "klid/chain_model.hpp"
#include "klid/errors.hpp"
#include "klid/estimator_common.hpp"
#include "klid/pseudo.hpp"
#include "klid/selection.hpp"
#include "klid/simulation.hpp"
#include "klid/state_space.hpp"

namespace klid {

struct RkfConfig {
    double lambda2 = 5e-2;  ///< Gauss-Newton regularization, > 0
    double mu = 5e-3;       ///< convergence scaling in the step damping, >= 0
    Eigen::MatrixXd Qd;     ///< 2n x 2n process covariance
    Eigen::MatrixXd Rd;     ///< 2m x 2m pseudo-measurement covariance
    Eigen::VectorXd z0;     ///< initial dynamic state (2n)
    Eigen::MatrixXd P0;     ///< 2n x 2n initial covariance
    Eigen::VectorXd theta0; ///< initial parameter guess (p)
    Eigen::VectorXd u0;     ///< initial input estimate (n)
    InputModel input;
    DetrendConfig detrend;
    Discretization discretization = Discretization::kTaylor2;
};

/**
 * @brief Selection matrix mapping the dynamic state to the stacked
 *        displacement-then-velocity pseudo-measurement vector.
 *
 * Row order: displacements at the instrumented DOFs in ascending DOF order,
 * then the matching velocities.
 */
inline Eigen::MatrixXd build_observation_matrix(int n, const std::vector<int>& instrumented) {
    if (instrumented.empty())
        throw std::invalid_argument("at least one instrumented DOF is required");
    const int m = static_cast<int>(instrumented.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * m, 2 * n);
    for (int i = 0; i < m; ++i) {
        const int d = instrumented[static_cast<size_t>(i)];
        if (d < 1 || d > n) throw std::invalid_argument("instrumented DOF index out of range");
        H(i, d - 1) = 1.0;
        H(m + i, n + d - 1) = 1.0;
    }
    return H;
}

/**
 * @brief One linear KF step on the pseudo-measurements.
 *
 * Predict with the discrete model, then correct with gain
 * J = P H^T (R_d + H P H^T)^{-1}; the posterior covariance is symmetrized.
 */
inline void kf_step(Eigen::VectorXd& z, Eigen::MatrixXd& P, const Eigen::VectorXd& u_prev,
                    const DiscreteStateSpace& d, const Eigen::MatrixXd& H,
                    const Eigen::VectorXd& y_pseudo, const Eigen::MatrixXd& Qd,
                    const Eigen::MatrixXd& Rd, int step = -1) {
    z = d.Ad * z + d.Bd * u_prev;
    P = d.Ad * P * d.Ad.transpose() + Qd;

    const Eigen::MatrixXd N = Rd + H * P * H.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(N);
    if (llt.info() != Eigen::Success)
        throw DivergenceError(step, "pseudo-measurement residual covariance is singular");
    const Eigen::MatrixXd J = llt.solve(H * P.transpose()).transpose();

    z += J * (y_pseudo - H * z);
    P = (Eigen::MatrixXd::Identity(P.rows(), P.cols()) - J * H) * P;
    P = 0.5 * (P + P.transpose()).eval();
}

/**
 * @brief Regularized Gauss-Newton parameter correction:
 *        dtheta = [U^T U + lambda^2 I]^{-1} U^T rho, damped by e^{-mu ||rho||}.
 */
inline Eigen::VectorXd parameter_update(const Eigen::VectorXd& theta_prev,
                                        const Eigen::MatrixXd& U, const Eigen::VectorXd& rho,
                                        double lambda2, double mu) {
    if (!(lambda2 > 0.0)) throw std::invalid_argument("lambda2 must be positive");
    if (mu < 0.0) throw std::invalid_argument("mu must be non-negative");
    const Eigen::MatrixXd normal =
        U.transpose() * U + lambda2 * Eigen::MatrixXd::Identity(U.cols(), U.cols());
    const Eigen::VectorXd dtheta = normal.ldlt().solve(U.transpose() * rho);
    return theta_prev + dtheta * std::exp(-mu * rho.norm());
}

/// Online mean/scatter accumulator whose covariance matches the batch
/// sample covariance (divisor count - 1) plus the ridge.
class RunningCovariance {
public:
    explicit RunningCovariance(int dim)
        : count_(0), mean_(Eigen::VectorXd::Zero(dim)),
          scatter_(Eigen::MatrixXd::Zero(dim, dim)) {}

    void add(const Eigen::VectorXd& x) {
        ++count_;
        const Eigen::VectorXd delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        scatter_.noalias() += delta * (x - mean_).transpose();
    }

    Eigen::MatrixXd covariance(double ridge = 1e-8) const {
        Eigen::MatrixXd W = ridge * Eigen::MatrixXd::Identity(mean_.size(), mean_.size());
        if (count_ >= 2) W += scatter_ / static_cast<double>(count_ - 1);
        return 0.5 * (W + W.transpose());
    }

private:
    long count_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd scatter_;
};

/**
 * @brief Run the residual-based filter over a measurement record.
 *
 * Per step: rediscretize with the latest parameters, KF predict/update on the
 * integrated pseudo-measurements, recover the input from the equation of
 * motion at the posterior state, and correct the parameters from the residual
 * left at the known-input rows. The KL posterior summary uses the
 * accumulated sample covariance of the parameter trace plus a 1e-8 ridge.
 */
inline EstimatorRun rkf_run(const ChainModel& model, const RkfConfig& cfg,
                            const MeasurementSet& meas, int set_index = 0) {
    const int n = model.dof();
    const int p = model.param_count();
    const int m = static_cast<int>(meas.instrumented_dofs.size());
    const int samples = meas.samples();

    if (cfg.z0.size() != 2 * n) throw std::invalid_argument("z0 length must be 2n");
    if (cfg.theta0.size() != p) throw std::invalid_argument("theta0 length must be p");
    if (cfg.u0.size() != n) throw std::invalid_argument("u0 length must be n");
    if (cfg.Qd.rows() != 2 * n || cfg.Qd.cols() != 2 * n)
        throw std::invalid_argument("Qd must be 2n square");
    if (cfg.Rd.rows() != 2 * m || cfg.Rd.cols() != 2 * m)
        throw std::invalid_argument("Rd must be 2m square for m instrumented DOFs");
    if (cfg.P0.rows() != 2 * n || cfg.P0.cols() != 2 * n)
        throw std::invalid_argument("P0 must be 2n square");
    if (static_cast<int>(cfg.input.unknown.size()) != n)
        throw std::invalid_argument("input model must cover all DOFs");
    if (model.cubic)
        throw std::invalid_argument("the residual-based filter supports linear chains only");

    const Eigen::MatrixXd H = build_observation_matrix(n, meas.instrumented_dofs);

    EstimatorRun run;
    run.set_index = set_index;
    run.time = meas.truth.time;
    run.states.setZero(samples, 2 * n);
    run.thetas.setZero(samples, p);
    run.inputs.setZero(samples, n);
    run.kl.reserve(static_cast<size_t>(samples));
    run.er.reserve(static_cast<size_t>(samples));
    run.rho_norm.reserve(static_cast<size_t>(samples));
    run.prior = GaussianSummary{cfg.theta0, Eigen::MatrixXd::Identity(p, p)};

    Eigen::MatrixXd disp(samples, m), vel(samples, m);
    for (int c = 0; c < m; ++c) {
        const PseudoSeries ps = integrate_stream(meas.accel.col(c), meas.dt, cfg.detrend);
        vel.col(c) = ps.velocity;
        disp.col(c) = ps.displacement;
    }

    Eigen::VectorXd z = cfg.z0;
    Eigen::MatrixXd P = cfg.P0;
    Eigen::VectorXd theta = cfg.theta0;
    Eigen::VectorXd u_e = cfg.input.replace_known_rows(cfg.u0, 0);
    Eigen::VectorXd prior_accel = Eigen::VectorXd::Zero(n);
    RunningCovariance theta_cov(p);

    const auto record = [&](int k, double rho) {
        theta_cov.add(theta);
        run.states.row(k) = z.transpose();
        run.thetas.row(k) = theta.transpose();
        run.inputs.row(k) = u_e.transpose();
        run.rho_norm.push_back(rho);
        run.posterior = GaussianSummary{theta, theta_cov.covariance()};
        run.kl.push_back(gaussian_kl(run.prior, run.posterior));
        run.er.push_back(error_metric(theta, meas.truth.theta_true.row(k).transpose()));
    };
    record(0, 0.0);

    try {
        for (int k = 1; k < samples; ++k) {
            const DiscreteStateSpace d =
                discretize(continuous_state_space(model, theta), meas.dt, cfg.discretization);

            Eigen::VectorXd y_pseudo(2 * m);
            y_pseudo << disp.row(k).transpose(), vel.row(k).transpose();
            kf_step(z, P, u_e, d, H, y_pseudo, cfg.Qd, cfg.Rd, k);

            const Eigen::VectorXd accel_full = substitute_unmeasured_accelerations(
                meas.accel.row(k).transpose(), meas.instrumented_dofs, prior_accel);
            const Eigen::VectorXd u_raw = input_from_motion(model, theta, accel_full, z);
            u_e = cfg.input.replace_known_rows(u_raw, k);

            const Eigen::VectorXd rho = u_e - u_raw;
            // Only rows backed by a measured acceleration and a known input carry
            // information about the parameters: elsewhere the residual is either
            // identically replaced (unknown input) or model-implied (no sensor).
            // Masking those sensitivity rows keeps the normal equations from
            // leaking the informative residual into unobserved directions.
            Eigen::MatrixXd U = sensitivity_matrix(model, z, theta);
            for (int i = 0; i < n; ++i) {
                const bool measured = std::find(meas.instrumented_dofs.begin(),
                                                meas.instrumented_dofs.end(),
                                                i + 1) != meas.instrumented_dofs.end();
                if (cfg.input.unknown[static_cast<size_t>(i)] || !measured) U.row(i).setZero();
            }
            theta = parameter_update(theta, U, rho, cfg.lambda2, cfg.mu);

            detail::require_finite(z, k, "dynamic state");
            detail::require_finite(P, k, "state covariance");
            detail::require_finite(theta, k, "parameter estimate");

            prior_accel = acceleration(model, theta, z, u_e);
            record(k, rho.norm());
        }
    } catch (const DivergenceError& e) {
        run.failed = true;
        run.failure_step = e.step;
        run.failure_reason = e.what();
    }
    return run;
}

}  // namespace klid
