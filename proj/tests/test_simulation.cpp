// Ground-truth simulation: integrator accuracy, excitation handling, damage
// events, and measurement-noise calibration.

#include <gtest/gtest.h>

#include <klid/chain_model.hpp>
#include <klid/simulation.hpp>

#include <cmath>

using namespace klid;

namespace {

Eigen::VectorXd make_vector(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

const Eigen::VectorXd kThetaChain3 = make_vector({9.0, 11.0, 13.0, 0.25, 0.5, 0.75});

SimulationConfig basic_config(double duration) {
    SimulationConfig cfg;
    cfg.dt = 0.01;
    cfg.duration = duration;
    return cfg;
}

}  // namespace

// =============================================================================
// Integrator accuracy
// =============================================================================

TEST(Simulation, ZeroScheduleStaysAtRest) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const SimulationResult out = simulate(model, kThetaChain3, basic_config(2.0), 1);
    EXPECT_EQ(out.states.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.accelerations.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.inputs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulation, UndampedSdofTracksClosedForm) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(1));
    SimulationConfig cfg = basic_config(30.0);
    cfg.initial_state = make_vector({1.0, 0.0});
    const SimulationResult out = simulate(model, make_vector({9.0, 0.0}), cfg, 1);

    double worst = 0.0;
    for (int k = 0; k < out.time.size(); ++k)
        worst = std::max(worst, std::abs(out.states(k, 0) - std::cos(3.0 * out.time(k))));
    EXPECT_LE(worst, 1e-6);
}

TEST(Simulation, StatesZeroBeforePulseArrives) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig cfg = basic_config(8.0);
    cfg.excitation.pulses.push_back({3, 100.0, 5.0, 0.01});
    const SimulationResult out = simulate(model, kThetaChain3, cfg, 1);
    for (int k = 0; k < out.time.size(); ++k) {
        if (out.time(k) >= 5.0) break;
        EXPECT_EQ(out.states.row(k).cwiseAbs().maxCoeff(), 0.0) << "at t=" << out.time(k);
    }
    EXPECT_GT(out.states.bottomRows(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulation, GlobalErrorIsFourthOrder) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const Eigen::VectorXd z0 = make_vector({0.3, -0.2, 0.5, 0.0, 0.1, -0.4});

    const auto end_state = [&](double dt) {
        SimulationConfig cfg;
        cfg.dt = dt;
        cfg.duration = 5.0;
        cfg.initial_state = z0;
        const SimulationResult out = simulate(model, kThetaChain3, cfg, 1);
        return Eigen::VectorXd(out.states.bottomRows(1).transpose());
    };

    const Eigen::VectorXd reference = end_state(0.01 / 16.0);
    const double coarse = (end_state(0.01) - reference).norm();
    const double fine = (end_state(0.005) - reference).norm();
    EXPECT_GE(coarse / fine, 12.0);  // fourth order: ideal ratio 16
}

TEST(Simulation, UndampedEnergyConserved) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const Eigen::VectorXd theta = make_vector({9.0, 11.0, 13.0, 0.0, 0.0, 0.0});
    SimulationConfig cfg = basic_config(30.0);
    cfg.initial_state = make_vector({0.5, -0.3, 0.2, 0.0, 0.0, 0.0});
    const SimulationResult out = simulate(model, theta, cfg, 1);

    const auto mats = assemble(model, theta);
    const auto energy = [&](int k) {
        const Eigen::VectorXd x = out.states.row(k).head(3).transpose();
        const Eigen::VectorXd v = out.states.row(k).tail(3).transpose();
        return 0.5 * v.dot(mats.M * v) + 0.5 * x.dot(mats.K * x);
    };
    const double e0 = energy(0);
    double worst = 0.0;
    for (int k = 0; k < out.time.size(); ++k)
        worst = std::max(worst, std::abs(energy(k) - e0) / e0);
    EXPECT_LE(worst, 1e-3);
}

// =============================================================================
// Damage events
// =============================================================================

TEST(Simulation, DamageEventSwitchesParametersContinuously) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig undamaged = basic_config(10.0);
    undamaged.excitation.white_noise.push_back({3, 0.0, 4.0});
    SimulationConfig damaged = undamaged;
    damaged.damage_events.push_back({5.0, 0.5, {0, 1, 2}});

    const SimulationResult a = simulate(model, kThetaChain3, undamaged, 9);
    const SimulationResult b = simulate(model, kThetaChain3, damaged, 9);

    const int event_step = 500;  // t = 5.0 s
    // identical trajectory up to and including the event sample (state
    // continuity: the event rescales parameters, not states)
    EXPECT_EQ((a.states.topRows(event_step + 1) - b.states.topRows(event_step + 1))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0);
    EXPECT_GT((a.states.bottomRows(100) - b.states.bottomRows(100)).cwiseAbs().maxCoeff(), 0.0);

    // the recorded true parameters switch exactly at the event sample
    EXPECT_EQ(b.theta_true.row(event_step - 1)(0), 9.0);
    EXPECT_EQ(b.theta_true.row(event_step)(0), 4.5);
    EXPECT_EQ(b.theta_true.row(event_step)(3), 0.25);  // damping untouched
}

TEST(Simulation, DamageValidation) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig cfg = basic_config(10.0);
    cfg.damage_events.push_back({50.0, 0.5, {}});  // beyond the horizon
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);
    cfg.damage_events = {{5.0, 0.5, {17}}};  // bad parameter index
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);
}

// =============================================================================
// Measurement noise
// =============================================================================

TEST(Noise, EmpiricalRatioWithinTwoPercent) {
    const int samples = 300000;
    const Eigen::MatrixXd clean = Eigen::MatrixXd::Ones(samples, 1);  // unit-RMS channel

    for (double ratio : {0.05, 0.20}) {
        const NoisyChannels noisy = add_noise(clean, ratio, 123);
        const double empirical =
            std::sqrt((noisy.data - clean).squaredNorm() / static_cast<double>(samples));
        EXPECT_GE(empirical, 0.98 * ratio) << "ratio " << ratio;
        EXPECT_LE(empirical, 1.02 * ratio) << "ratio " << ratio;
        EXPECT_DOUBLE_EQ(noisy.noise_std(0), ratio);
    }
}

TEST(Noise, ZeroRatioIsExactAndZeroChannelsAreFlagged) {
    Eigen::MatrixXd clean = Eigen::MatrixXd::Random(100, 2);
    clean.col(1).setZero();

    const NoisyChannels untouched = add_noise(clean, 0.0, 3);
    EXPECT_EQ((untouched.data - clean).cwiseAbs().maxCoeff(), 0.0);

    const NoisyChannels noisy = add_noise(clean, 0.1, 3);
    EXPECT_GT((noisy.data.col(0) - clean.col(0)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((noisy.data.col(1) - clean.col(1)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_FALSE(noisy.zero_channels[0]);
    EXPECT_TRUE(noisy.zero_channels[1]);

    EXPECT_THROW(add_noise(clean, -0.1, 3), std::invalid_argument);
}

// =============================================================================
// Measurement extraction
// =============================================================================

TEST(Measurements, ChannelsSelectedAndOrdered) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig cfg = basic_config(3.0);
    cfg.excitation.pulses.push_back({3, 100.0, 1.0, 0.01});
    const SimulationResult truth = simulate(model, kThetaChain3, cfg, 5);

    const MeasurementSet meas = make_measurements(truth, cfg.dt, {3, 2}, 0.0, 5);
    ASSERT_EQ(meas.instrumented_dofs.size(), 2u);
    EXPECT_EQ(meas.instrumented_dofs[0], 2);  // sorted ascending
    EXPECT_EQ(meas.instrumented_dofs[1], 3);
    EXPECT_EQ((meas.accel.col(0) - truth.accelerations.col(1)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((meas.accel.col(1) - truth.accelerations.col(2)).cwiseAbs().maxCoeff(), 0.0);

    EXPECT_THROW(make_measurements(truth, cfg.dt, {}, 0.05, 5), std::invalid_argument);
    EXPECT_THROW(make_measurements(truth, cfg.dt, {2, 2}, 0.05, 5), std::invalid_argument);
    EXPECT_THROW(make_measurements(truth, cfg.dt, {4}, 0.05, 5), std::invalid_argument);
}

TEST(Measurements, SeedContract) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig cfg = basic_config(3.0);
    cfg.excitation.white_noise.push_back({3, 0.0, 4.0});

    const SimulationResult t1 = simulate(model, kThetaChain3, cfg, 11);
    const SimulationResult t2 = simulate(model, kThetaChain3, cfg, 11);
    const SimulationResult t3 = simulate(model, kThetaChain3, cfg, 12);
    EXPECT_EQ((t1.states - t2.states).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT((t1.states - t3.states).cwiseAbs().maxCoeff(), 0.0);

    // same truth, different measurement-noise realizations per seed
    const MeasurementSet m1 = make_measurements(t1, cfg.dt, {1, 2, 3}, 0.05, 21);
    const MeasurementSet m2 = make_measurements(t1, cfg.dt, {1, 2, 3}, 0.05, 21);
    const MeasurementSet m3 = make_measurements(t1, cfg.dt, {1, 2, 3}, 0.05, 22);
    EXPECT_EQ((m1.accel - m2.accel).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT((m1.accel - m3.accel).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((m1.truth.states - m3.truth.states).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulation, InputValidation) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    SimulationConfig cfg = basic_config(2.0);
    cfg.excitation.pulses.push_back({4, 100.0, 1.0, 0.01});
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);

    cfg.excitation.pulses = {{3, 100.0, 1.0, 0.0}};
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);

    cfg.excitation.pulses.clear();
    cfg.excitation.white_noise.push_back({3, 0.0, -1.0});
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);

    cfg.excitation.white_noise.clear();
    cfg.dt = 0.0;
    EXPECT_THROW(simulate(model, kThetaChain3, cfg, 1), std::invalid_argument);
}
