// Truth simulation: RK4 integration of a chain model under configurable
// excitation, damage events that rescale the true parameters mid-run, and
// RMS-proportional measurement noise.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "klid/chain_model.hpp"
#include "klid/errors.hpp"

namespace klid {

// ---------------------------------------------------------------------------
// deterministic seed derivation
// ---------------------------------------------------------------------------

/// splitmix64 stream element; distinct streams stay decorrelated for any seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
    std::uint64_t z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace streams {
constexpr std::uint64_t kProcessNoise = 0;
constexpr std::uint64_t kMeasurementNoise = 1;
constexpr std::uint64_t kScenario = 2;
}  // namespace streams

// ---------------------------------------------------------------------------
// excitation
// ---------------------------------------------------------------------------

/// a * sin(omega t + phase) applied at one DOF (1-based).
struct HarmonicInput {
    int dof = 1;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

/// Rectangular pulse of the given amplitude over [start, start + duration).
struct PulseInput {
    int dof = 1;
    double amplitude = 0.0;
    double start = 0.0;
    double duration = 0.0;
};

/// Gaussian force, redrawn each measurement step and held constant across
/// the integrator stages of that step.
struct WhiteNoiseInput {
    int dof = 1;
    double mean = 0.0;
    double variance = 0.0;
};

/// Multiply selected true parameters by `factor` from `time` onward.
/// An empty index list applies the factor to every parameter.
struct DamageEvent {
    double time = 0.0;
    double factor = 1.0;
    std::vector<int> param_indices;  ///< 0-based into the parameter layout
};

struct ExcitationConfig {
    std::vector<HarmonicInput> harmonics;
    std::vector<PulseInput> pulses;
    std::vector<WhiteNoiseInput> white_noise;
};

/// Deterministic part of the input at time t.
inline Eigen::VectorXd deterministic_input(const ExcitationConfig& ex, int n, double t) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (const auto& h : ex.harmonics)
        u(h.dof - 1) += h.amplitude * std::sin(h.omega * t + h.phase);
    for (const auto& p : ex.pulses)
        if (t >= p.start && t < p.start + p.duration) u(p.dof - 1) += p.amplitude;
    return u;
}

// ---------------------------------------------------------------------------
// truth simulation
// ---------------------------------------------------------------------------

struct SimulationConfig {
    double dt = 0.0;
    double duration = 0.0;
    Eigen::VectorXd initial_state;  ///< empty means zero
    ExcitationConfig excitation;
    std::vector<DamageEvent> damage_events;  ///< applied in time order
};

/// Row k of each field corresponds to sample time k * dt, k = 0..N.
struct SimulationResult {
    Eigen::VectorXd time;
    Eigen::MatrixXd states;         ///< (N+1) x 2n, [x; v] per row
    Eigen::MatrixXd accelerations;  ///< (N+1) x n, equation-of-motion values
    Eigen::MatrixXd inputs;         ///< (N+1) x n, input at sample time k
    Eigen::MatrixXd theta_true;     ///< (N+1) x p, parameters in force at each sample
};

namespace detail {

inline Eigen::VectorXd rk4_step(const ChainModel& model, const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& z, double t, double dt,
                                const ExcitationConfig& ex, const Eigen::VectorXd& noise0,
                                const Eigen::VectorXd& noise1) {
    const int n = model.dof();
    const auto f = [&](double tau, const Eigen::VectorXd& state) {
        // Stochastic input is linearly interpolated between its per-sample
        // draws so the recorded accelerations stay consistent with the
        // trapezoidal double integration applied downstream.
        const double w = (tau - t) / dt;
        return continuous_dynamics(model, theta, state,
                                   deterministic_input(ex, n, tau) + (1.0 - w) * noise0 +
                                       w * noise1);
    };
    const Eigen::VectorXd k1 = f(t, z);
    const Eigen::VectorXd k2 = f(t + dt / 2.0, z + (dt / 2.0) * k1);
    const Eigen::VectorXd k3 = f(t + dt / 2.0, z + (dt / 2.0) * k2);
    const Eigen::VectorXd k4 = f(t + dt, z + dt * k3);
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/**
 * @brief Integrate the chain model with RK4 and record states, inputs,
 *        accelerations and the active true parameters at every sample.
 *
 * The stochastic input component is redrawn once per measurement step and
 * linearly interpolated between consecutive draws across RK4 stages;
 * deterministic components are evaluated at stage times. Damage events
 * rescale the true parameters at the first sample at or
 * after their event time; the state itself is continuous across events.
 */
inline SimulationResult simulate(const ChainModel& model, const Eigen::VectorXd& theta0,
                                 const SimulationConfig& cfg, std::uint64_t seed) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulation dt must be positive");
    if (!(cfg.duration > 0.0)) throw std::invalid_argument("simulation duration must be positive");
    const int n = model.dof();
    const int p = model.param_count();
    if (theta0.size() != p) throw std::invalid_argument("true parameter vector has wrong length");
    for (const auto& h : cfg.excitation.harmonics)
        if (h.dof < 1 || h.dof > n) throw std::invalid_argument("harmonic input DOF out of range");
    for (const auto& pu : cfg.excitation.pulses) {
        if (pu.dof < 1 || pu.dof > n) throw std::invalid_argument("pulse input DOF out of range");
        if (!(pu.duration > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    }
    for (const auto& w : cfg.excitation.white_noise) {
        if (w.dof < 1 || w.dof > n)
            throw std::invalid_argument("white noise input DOF out of range");
        if (w.variance < 0.0) throw std::invalid_argument("white noise variance must be >= 0");
    }
    for (const auto& ev : cfg.damage_events) {
        if (!(ev.factor > 0.0)) throw std::invalid_argument("damage factor must be positive");
        if (ev.time < 0.0 || ev.time > cfg.duration)
            throw std::invalid_argument("damage time outside the simulation horizon");
        for (int idx : ev.param_indices)
            if (idx < 0 || idx >= p)
                throw std::invalid_argument("damage parameter index out of range");
    }

    const int steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
    if (steps < 1) throw std::invalid_argument("duration shorter than one step");

    std::vector<DamageEvent> events = cfg.damage_events;
    std::stable_sort(events.begin(), events.end(),
                     [](const DamageEvent& a, const DamageEvent& b) { return a.time < b.time; });

    std::mt19937_64 rng(derive_stream_seed(seed, streams::kProcessNoise));
    std::normal_distribution<double> gauss(0.0, 1.0);

    SimulationResult out;
    out.time.resize(steps + 1);
    out.states.resize(steps + 1, 2 * n);
    out.accelerations.resize(steps + 1, n);
    out.inputs.resize(steps + 1, n);
    out.theta_true.resize(steps + 1, p);

    Eigen::VectorXd z = cfg.initial_state.size() == 0 ? Eigen::VectorXd::Zero(2 * n)
                                                      : cfg.initial_state;
    if (z.size() != 2 * n) throw std::invalid_argument("initial state has wrong length");

    std::vector<Eigen::VectorXd> noise(static_cast<size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        noise[static_cast<size_t>(k)] = Eigen::VectorXd::Zero(n);
        for (const auto& w : cfg.excitation.white_noise)
            noise[static_cast<size_t>(k)](w.dof - 1) += w.mean + std::sqrt(w.variance) * gauss(rng);
    }

    Eigen::VectorXd theta = theta0;
    size_t next_event = 0;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * cfg.dt;
        while (next_event < events.size() && events[next_event].time <= t + 1e-12) {
            const auto& ev = events[next_event];
            if (ev.param_indices.empty()) {
                theta *= ev.factor;
            } else {
                for (int idx : ev.param_indices) theta(idx) *= ev.factor;
            }
            ++next_event;
        }
        const Eigen::VectorXd u =
            deterministic_input(cfg.excitation, n, t) + noise[static_cast<size_t>(k)];

        if (!z.allFinite()) throw DivergenceError(k, "simulated state is not finite");

        out.time(k) = t;
        out.states.row(k) = z.transpose();
        out.inputs.row(k) = u.transpose();
        out.accelerations.row(k) = acceleration(model, theta, z, u).transpose();
        out.theta_true.row(k) = theta.transpose();

        if (k < steps)
            z = detail::rk4_step(model, theta, z, t, cfg.dt, cfg.excitation,
                                 noise[static_cast<size_t>(k)], noise[static_cast<size_t>(k) + 1]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// measurements
// ---------------------------------------------------------------------------

struct NoisyChannels {
    Eigen::MatrixXd data;
    Eigen::VectorXd noise_std;        ///< per-channel standard deviation applied
    std::vector<bool> zero_channels;  ///< channels left untouched because their RMS is zero
};

/**
 * @brief Add iid Gaussian noise with per-channel std = ratio * RMS(channel).
 *
 * Channels whose RMS is exactly zero are returned unchanged and flagged.
 */
inline NoisyChannels add_noise(const Eigen::MatrixXd& clean, double ratio, std::uint64_t seed) {
    if (ratio < 0.0) throw std::invalid_argument("noise ratio must be non-negative");
    std::mt19937_64 rng(derive_stream_seed(seed, streams::kMeasurementNoise));
    std::normal_distribution<double> gauss(0.0, 1.0);
    NoisyChannels out;
    out.data = clean;
    out.noise_std = Eigen::VectorXd::Zero(clean.cols());
    out.zero_channels.assign(static_cast<size_t>(clean.cols()), false);
    for (int c = 0; c < clean.cols(); ++c) {
        const double rms =
            std::sqrt(clean.col(c).squaredNorm() / static_cast<double>(clean.rows()));
        if (rms == 0.0) {
            out.zero_channels[static_cast<size_t>(c)] = true;
            continue;
        }
        const double sd = ratio * rms;
        out.noise_std(c) = sd;
        if (ratio > 0.0)
            for (int r = 0; r < clean.rows(); ++r) out.data(r, c) += sd * gauss(rng);
    }
    return out;
}

/// Sensor record handed to the estimators; ground truth retained for scoring.
struct MeasurementSet {
    double dt = 0.0;
    std::vector<int> instrumented_dofs;  ///< 1-based, unique, ascending
    Eigen::MatrixXd accel;               ///< (N+1) x m noisy accelerations
    SimulationResult truth;
    Eigen::VectorXd noise_std;
    std::vector<bool> zero_channels;

    int samples() const { return static_cast<int>(accel.rows()); }
};

/// Extract instrumented acceleration channels and contaminate them per channel.
inline MeasurementSet make_measurements(const SimulationResult& truth, double dt,
                                        const std::vector<int>& instrumented_dofs, double ratio,
                                        std::uint64_t seed) {
    if (instrumented_dofs.empty())
        throw std::invalid_argument("at least one instrumented DOF is required");
    const int n = static_cast<int>(truth.accelerations.cols());
    std::vector<int> dofs = instrumented_dofs;
    std::sort(dofs.begin(), dofs.end());
    if (std::adjacent_find(dofs.begin(), dofs.end()) != dofs.end())
        throw std::invalid_argument("instrumented DOF indices must be unique");
    for (int d : dofs)
        if (d < 1 || d > n) throw std::invalid_argument("instrumented DOF index out of range");

    Eigen::MatrixXd clean(truth.accelerations.rows(), static_cast<Eigen::Index>(dofs.size()));
    for (size_t i = 0; i < dofs.size(); ++i)
        clean.col(static_cast<Eigen::Index>(i)) = truth.accelerations.col(dofs[i] - 1);
    auto noisy = add_noise(clean, ratio, seed);

    MeasurementSet out;
    out.dt = dt;
    out.instrumented_dofs = dofs;
    out.accel = std::move(noisy.data);
    out.truth = truth;
    out.noise_std = std::move(noisy.noise_std);
    out.zero_channels = std::move(noisy.zero_channels);
    return out;
}

}  // namespace klid
