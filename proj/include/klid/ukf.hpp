// Unscented Kalman filter on the augmented state [x; v; theta] performing
// joint input, parameter, and state estimation from acceleration records.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "klid/chain_model.hpp"
#include "klid/errors.hpp"
#include "klid/estimator_common.hpp"
#include "klid/pseudo.hpp"
#include "klid/selection.hpp"
#include "klid/simulation.hpp"

namespace klid {

struct UkfConfig {
    double alpha = 1e-2;  ///< sigma-point spread, in [1e-4, 1]
    double beta = 2.0;    ///< prior-knowledge constant (2 = Gaussian)
    double kappa = 0.0;   ///< secondary scaling (0 or 3 - L)
    Eigen::MatrixXd Q;    ///< L x L process covariance
    Eigen::MatrixXd R;    ///< 3m x 3m measurement covariance
    Eigen::MatrixXd P0;   ///< L x L initial covariance
    Eigen::VectorXd z0;   ///< initial augmented state [x; v; theta]
    Eigen::VectorXd u0;   ///< initial input estimate (n)
    InputModel input;
    DetrendConfig detrend;  ///< drift control for the observed pseudo-series
};

/// Initial covariance used across scenarios: loose unit prior on parameters,
/// tigher prior on the at-rest dynamic states.
inline Eigen::MatrixXd default_ukf_p0(int n, int p) {
    Eigen::MatrixXd P0 = Eigen::MatrixXd::Identity(2 * n + p, 2 * n + p);
    P0.topLeftCorner(2 * n, 2 * n) *= 1e-2;
    return P0;
}

struct SigmaPoints {
    Eigen::MatrixXd points;  ///< L x (2L+1); column 0 is the mean
    Eigen::VectorXd wm;
    Eigen::VectorXd wc;
};

/**
 * @brief Scaled sigma-point set for (z, P) with lambda = alpha^2 (L+kappa) - L.
 *
 * Columns 1..L add, and columns L+1..2L subtract, the scaled Cholesky
 * columns of P. Weighted mean reconstructs z exactly; weighted covariance
 * with wc reconstructs P.
 */
inline SigmaPoints sigma_points(const Eigen::VectorXd& z, const Eigen::MatrixXd& P, double alpha,
                                double beta, double kappa, int step = -1) {
    const int L = static_cast<int>(z.size());
    const double lambda = alpha * alpha * (L + kappa) - L;
    const double scale = std::sqrt(static_cast<double>(L) + lambda);
    const Eigen::MatrixXd chol = detail::cholesky_with_jitter(P, step);

    SigmaPoints sp;
    sp.points.resize(L, 2 * L + 1);
    sp.points.col(0) = z;
    for (int i = 0; i < L; ++i) {
        sp.points.col(1 + i) = z + scale * chol.col(i);
        sp.points.col(1 + L + i) = z - scale * chol.col(i);
    }
    sp.wm = Eigen::VectorXd::Constant(2 * L + 1, 1.0 / (2.0 * (L + lambda)));
    sp.wc = sp.wm;
    sp.wm(0) = lambda / (L + lambda);
    sp.wc(0) = sp.wm(0) + (1.0 - alpha * alpha + beta);
    return sp;
}

namespace detail {

/// One forward-Euler step of the augmented process model; parameter rows
/// pass through unchanged.
inline Eigen::VectorXd propagate_point(const ChainModel& model, const Eigen::VectorXd& point,
                                       const Eigen::VectorXd& u, double dt) {
    const int n = model.dof();
    const int p = model.param_count();
    const Eigen::VectorXd state = point.head(2 * n);
    const Eigen::VectorXd theta = point.tail(p);
    Eigen::VectorXd out(point.size());
    out.head(n) = state.head(n) + dt * state.segment(n, n);
    out.segment(n, n) = state.segment(n, n) + dt * acceleration(model, theta, state, u);
    out.tail(p) = theta;
    return out;
}

/// Observation: [accelerations; displacements; velocities] at the
/// instrumented DOFs, accelerations via the equation of motion.
inline Eigen::VectorXd observe_point(const ChainModel& model, const Eigen::VectorXd& point,
                                     const Eigen::VectorXd& u,
                                     const std::vector<int>& instrumented) {
    const int n = model.dof();
    const Eigen::VectorXd state = point.head(2 * n);
    const Eigen::VectorXd theta = point.tail(model.param_count());
    const Eigen::VectorXd a = acceleration(model, theta, state, u);
    const int m = static_cast<int>(instrumented.size());
    Eigen::VectorXd y(3 * m);
    for (int i = 0; i < m; ++i) {
        const int d = instrumented[static_cast<size_t>(i)] - 1;
        y(i) = a(d);
        y(m + i) = state(d);
        y(2 * m + i) = state(n + d);
    }
    return y;
}

}  // namespace detail

/**
 * @brief Run the unscented filter over a measurement record.
 *
 * Per step: sigma points, Euler propagation with the prior corrected input,
 * model-based input prediction with known rows replaced, measurement update
 * against [accel; displacement pseudo; velocity pseudo], and a final input
 * correction at the posterior state. Divergence marks the run failed instead
 * of propagating.
 */
inline EstimatorRun ukf_run(const ChainModel& model, const UkfConfig& cfg,
                            const MeasurementSet& meas, int set_index = 0) {
    const int n = model.dof();
    const int p = model.param_count();
    const int L = 2 * n + p;
    const int m = static_cast<int>(meas.instrumented_dofs.size());
    const int samples = meas.samples();

    if (cfg.alpha < 1e-4 || cfg.alpha > 1.0)
        throw std::invalid_argument("alpha must be within [1e-4, 1]");
    if (cfg.z0.size() != L) throw std::invalid_argument("z0 length must be 2n + p");
    if (cfg.u0.size() != n) throw std::invalid_argument("u0 length must be n");
    if (cfg.Q.rows() != L || cfg.Q.cols() != L)
        throw std::invalid_argument("Q must be (2n + p) square");
    if (cfg.R.rows() != 3 * m || cfg.R.cols() != 3 * m)
        throw std::invalid_argument("R must be 3m square for m instrumented DOFs");
    if (cfg.P0.rows() != L || cfg.P0.cols() != L)
        throw std::invalid_argument("P0 must be (2n + p) square");
    if (static_cast<int>(cfg.input.unknown.size()) != n)
        throw std::invalid_argument("input model must cover all DOFs");

    EstimatorRun run;
    run.set_index = set_index;
    run.time = meas.truth.time;
    run.states.setZero(samples, 2 * n);
    run.thetas.setZero(samples, p);
    run.inputs.setZero(samples, n);
    run.kl.reserve(static_cast<size_t>(samples));
    run.er.reserve(static_cast<size_t>(samples));
    run.prior = GaussianSummary{cfg.z0.tail(p), Eigen::MatrixXd::Identity(p, p)};

    // pseudo-measurement series per instrumented channel
    Eigen::MatrixXd disp(samples, m), vel(samples, m);
    for (int c = 0; c < m; ++c) {
        const PseudoSeries ps = integrate_stream(meas.accel.col(c), meas.dt, cfg.detrend);
        vel.col(c) = ps.velocity;
        disp.col(c) = ps.displacement;
    }

    Eigen::VectorXd z = cfg.z0;
    Eigen::MatrixXd P = cfg.P0;
    Eigen::VectorXd u_e = cfg.input.replace_known_rows(cfg.u0, 0);
    Eigen::VectorXd prior_accel = Eigen::VectorXd::Zero(n);

    const auto record = [&](int k) {
        run.states.row(k) = z.head(2 * n).transpose();
        run.thetas.row(k) = z.tail(p).transpose();
        run.inputs.row(k) = u_e.transpose();
        run.posterior = GaussianSummary{z.tail(p), P.bottomRightCorner(p, p)};
        run.kl.push_back(gaussian_kl(run.prior, run.posterior));
        run.er.push_back(error_metric(z.tail(p), meas.truth.theta_true.row(k).transpose()));
    };
    record(0);

    try {
        for (int k = 1; k < samples; ++k) {
            const SigmaPoints sp = sigma_points(z, P, cfg.alpha, cfg.beta, cfg.kappa, k);

            Eigen::MatrixXd Zp(L, 2 * L + 1);
            for (int i = 0; i < 2 * L + 1; ++i)
                Zp.col(i) = detail::propagate_point(model, sp.points.col(i), u_e, meas.dt);
            const Eigen::VectorXd z_p = Zp * sp.wm;

            Eigen::MatrixXd P_p = cfg.Q;
            for (int i = 0; i < 2 * L + 1; ++i) {
                const Eigen::VectorXd dz = Zp.col(i) - z_p;
                P_p.noalias() += sp.wc(i) * dz * dz.transpose();
            }

            const Eigen::VectorXd accel_full = substitute_unmeasured_accelerations(
                meas.accel.row(k).transpose(), meas.instrumented_dofs, prior_accel);
            Eigen::VectorXd u_p = input_from_motion(model, z_p.tail(p), accel_full,
                                                    z_p.head(2 * n));
            u_p = cfg.input.replace_known_rows(u_p, k);

            Eigen::MatrixXd Y(3 * m, 2 * L + 1);
            for (int i = 0; i < 2 * L + 1; ++i)
                Y.col(i) = detail::observe_point(model, Zp.col(i), u_p, meas.instrumented_dofs);
            const Eigen::VectorXd y_hat = Y * sp.wm;

            Eigen::MatrixXd P_m = cfg.R;
            Eigen::MatrixXd P_s = Eigen::MatrixXd::Zero(L, 3 * m);
            for (int i = 0; i < 2 * L + 1; ++i) {
                const Eigen::VectorXd dz = Zp.col(i) - z_p;
                const Eigen::VectorXd dy = Y.col(i) - y_hat;
                P_m.noalias() += sp.wc(i) * dy * dy.transpose();
                P_s.noalias() += sp.wc(i) * dz * dy.transpose();
            }

            Eigen::LLT<Eigen::MatrixXd> llt(P_m);
            if (llt.info() != Eigen::Success)
                throw DivergenceError(k, "innovation covariance is singular");
            const Eigen::MatrixXd K = llt.solve(P_s.transpose()).transpose();

            Eigen::VectorXd y_m(3 * m);
            y_m << meas.accel.row(k).transpose(), disp.row(k).transpose(),
                vel.row(k).transpose();

            z = z_p + K * (y_m - y_hat);
            P = P_p - P_s * K.transpose();
            P = 0.5 * (P + P.transpose()).eval();

            detail::require_finite(z, k, "augmented state");
            detail::require_finite(P, k, "state covariance");

            u_e = input_from_motion(model, z.tail(p), accel_full, z.head(2 * n));
            u_e = cfg.input.replace_known_rows(u_e, k);
            prior_accel = acceleration(model, z.tail(p), z.head(2 * n), u_e);

            record(k);
        }
    } catch (const DivergenceError& e) {
        run.failed = true;
        run.failure_step = e.step;
        run.failure_reason = e.what();
    }
    return run;
}

}  // namespace klid
