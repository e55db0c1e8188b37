// Pseudo-measurements: causal double integration of acceleration channels
// with selectable drift control, plus acceleration substitution for
// uninstrumented DOFs.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace klid {

enum class DetrendPolicy {
    kNone,
    kLinear,    ///< subtract a least-squares line fit on a trailing window
    kHighPass,  ///< one-pole causal high-pass with cutoff f_c
};

struct DetrendConfig {
    DetrendPolicy policy = DetrendPolicy::kLinear;
    double window = 5.0;      ///< seconds, trailing fit window (linear policy)
    double cutoff_hz = 0.05;  ///< high-pass cutoff (high-pass policy)
};

namespace detail {

/// Cumulative trapezoid with explicit initial value.
inline Eigen::VectorXd cumtrapz(const Eigen::VectorXd& f, double dt, double initial) {
    Eigen::VectorXd out(f.size());
    if (f.size() == 0) return out;
    out(0) = initial;
    for (int k = 1; k < f.size(); ++k) out(k) = out(k - 1) + 0.5 * dt * (f(k - 1) + f(k));
    return out;
}

/// Subtract, at each sample, the value of a line fit to the trailing window.
inline Eigen::VectorXd detrend_linear(const Eigen::VectorXd& s, double dt, double window) {
    const int n = static_cast<int>(s.size());
    const int w = std::max(1, static_cast<int>(std::llround(window / dt)) + 1);
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
        const int lo = std::max(0, k - w + 1);
        const int m = k - lo + 1;
        if (m < 3) {
            out(k) = 0.0;  // fit degenerate or exact, trend equals signal
            continue;
        }
        // least-squares line over indices lo..k, evaluated at k
        double sum_t = 0.0, sum_tt = 0.0, sum_y = 0.0, sum_ty = 0.0;
        for (int j = lo; j <= k; ++j) {
            const double t = static_cast<double>(j - lo);
            sum_t += t;
            sum_tt += t * t;
            sum_y += s(j);
            sum_ty += t * s(j);
        }
        const double denom = m * sum_tt - sum_t * sum_t;
        const double b = (m * sum_ty - sum_t * sum_y) / denom;
        const double a = (sum_y - b * sum_t) / m;
        out(k) = s(k) - (a + b * static_cast<double>(k - lo));
    }
    return out;
}

/// y_k = alpha (y_{k-1} + s_k - s_{k-1}), alpha = RC/(RC + dt), RC = 1/(2 pi f_c).
inline Eigen::VectorXd detrend_highpass(const Eigen::VectorXd& s, double dt, double cutoff_hz) {
    const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
    const double alpha = rc / (rc + dt);
    Eigen::VectorXd out(s.size());
    if (s.size() == 0) return out;
    out(0) = s(0);
    for (int k = 1; k < s.size(); ++k) out(k) = alpha * (out(k - 1) + s(k) - s(k - 1));
    return out;
}

inline Eigen::VectorXd apply_detrend(const Eigen::VectorXd& s, double dt,
                                     const DetrendConfig& cfg) {
    switch (cfg.policy) {
        case DetrendPolicy::kNone:
            return s;
        case DetrendPolicy::kLinear:
            if (!(cfg.window > 0.0))
                throw std::invalid_argument("detrend window must be positive");
            return detrend_linear(s, dt, cfg.window);
        case DetrendPolicy::kHighPass:
            if (!(cfg.cutoff_hz > 0.0))
                throw std::invalid_argument("high-pass cutoff must be positive");
            return detrend_highpass(s, dt, cfg.cutoff_hz);
    }
    throw std::invalid_argument("unknown detrend policy");
}

}  // namespace detail

struct PseudoSeries {
    Eigen::VectorXd velocity;
    Eigen::VectorXd displacement;
};

/**
 * @brief Integrate one acceleration channel into velocity and displacement
 *        pseudo-measurement series.
 *
 * Cumulative trapezoid is applied once for velocity and again for
 * displacement; the drift-control policy is applied to each integrated
 * series before it feeds the next stage. All policies are causal.
 */
inline PseudoSeries integrate_stream(const Eigen::VectorXd& accel, double dt,
                                     const DetrendConfig& cfg = {}, double v0 = 0.0,
                                     double x0 = 0.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    PseudoSeries out;
    out.velocity = detail::apply_detrend(detail::cumtrapz(accel, dt, v0), dt, cfg);
    out.displacement = detail::apply_detrend(detail::cumtrapz(out.velocity, dt, x0), dt, cfg);
    return out;
}

/**
 * @brief Fill a full acceleration vector from partial measurements.
 *
 * Instrumented rows take the measured values; the rest take the prior-step
 * estimated accelerations (zeros at a cold start).
 */
inline Eigen::VectorXd substitute_unmeasured_accelerations(
    const Eigen::VectorXd& measured, const std::vector<int>& instrumented_dofs_1based,
    const Eigen::VectorXd& prior_estimated_accel) {
    if (measured.size() != static_cast<Eigen::Index>(instrumented_dofs_1based.size()))
        throw std::invalid_argument("measured vector length must match instrumented DOF count");
    Eigen::VectorXd out = prior_estimated_accel;
    for (size_t i = 0; i < instrumented_dofs_1based.size(); ++i) {
        const int d = instrumented_dofs_1based[i];
        if (d < 1 || d > prior_estimated_accel.size())
            throw std::invalid_argument("instrumented DOF index out of range");
        out(d - 1) = measured(static_cast<Eigen::Index>(i));
    }
    return out;
}

}  // namespace klid
