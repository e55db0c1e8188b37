// Continuous state-space assembly and its discrete-time approximations.

#include <gtest/gtest.h>

#include <klid/chain_model.hpp>
#include <klid/state_space.hpp>

#include <random>

#include "oracles.hpp"

using namespace klid;

namespace {

Eigen::VectorXd make_vector(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

const Eigen::VectorXd kThetaChain3 = make_vector({9.0, 11.0, 13.0, 0.25, 0.5, 0.75});

}  // namespace

TEST(StateSpace, ContinuousBlocksMatchDefinition) {
    const ChainModel model = ChainModel::linear(make_vector({1.0, 2.0, 4.0}));
    const StateSpace ss = continuous_state_space(model, kThetaChain3);
    const auto mats = assemble(model, kThetaChain3);
    const Eigen::MatrixXd minv = model.masses.cwiseInverse().asDiagonal();

    EXPECT_EQ(ss.A.topLeftCorner(3, 3).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((ss.A.topRightCorner(3, 3) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(),
              0.0);
    EXPECT_LE((ss.A.bottomLeftCorner(3, 3) + minv * mats.K).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((ss.A.bottomRightCorner(3, 3) + minv * mats.C).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(ss.B.topRows(3).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((ss.B.bottomRows(3) - minv).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StateSpace, MatchesContinuousDynamicsOnLinearModel) {
    std::mt19937_64 rng(3);
    const ChainModel model = ChainModel::linear(make_vector({1.0, 2.0, 4.0}));
    const StateSpace ss = continuous_state_space(model, kThetaChain3);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd z = oracles::random_vector(6, rng);
        const Eigen::VectorXd u = oracles::random_vector(3, rng, 5.0);
        const Eigen::VectorXd dz = continuous_dynamics(model, kThetaChain3, z, u);
        EXPECT_LE((ss.A * z + ss.B * u - dz).norm(), 1e-12 * (1.0 + dz.norm()));
    }
}

TEST(Discretization, ZeroSystemMatrixGivesIdentity) {
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(4, 4);
    ss.B = Eigen::MatrixXd::Random(4, 2);
    const DiscreteStateSpace d = discretize(ss, 0.01);
    EXPECT_EQ((d.Ad - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((d.Bd - 0.01 * ss.B).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Discretization, SdofTaylorCloseToMatrixExponential) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(1));
    const StateSpace ss = continuous_state_space(model, make_vector({9.0, 0.25}));
    const double dt = 0.01;
    const DiscreteStateSpace d = discretize(ss, dt, Discretization::kTaylor2);
    const Eigen::MatrixXd exact = oracles::expm_taylor(dt * ss.A);
    EXPECT_LE((d.Ad - exact).norm(), 1e-6);
}

TEST(Discretization, BenchmarkChainSpectralRadiusBelowOne) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const StateSpace ss = continuous_state_space(model, kThetaChain3);
    const DiscreteStateSpace d = discretize(ss, 0.01);
    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(d.Ad).eigenvalues();
    EXPECT_LT(eigs.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Discretization, TaylorErrorIsThirdOrder) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const StateSpace ss = continuous_state_space(model, kThetaChain3);
    const auto error_at = [&](double dt) {
        const DiscreteStateSpace d = discretize(ss, dt, Discretization::kTaylor2);
        return (d.Ad - oracles::expm_taylor(dt * ss.A)).norm();
    };
    const double coarse = error_at(0.01);
    const double fine = error_at(0.005);
    EXPECT_GE(coarse / fine, 6.0);  // third-order local truncation: ideal ratio 8
    EXPECT_LE(coarse, 1e-4);
}

TEST(Discretization, ExactModeMatchesOracle) {
    const ChainModel model = ChainModel::linear(Eigen::VectorXd::Ones(3));
    const StateSpace ss = continuous_state_space(model, kThetaChain3);
    const DiscreteStateSpace d = discretize(ss, 0.01, Discretization::kExact);
    EXPECT_LE((d.Ad - oracles::expm_taylor(0.01 * ss.A)).norm(), 1e-10);
}

TEST(Discretization, RejectsNonPositiveStep) {
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(2, 2);
    ss.B = Eigen::MatrixXd::Zero(2, 1);
    EXPECT_THROW(discretize(ss, 0.0), std::invalid_argument);
    EXPECT_THROW(discretize(ss, -0.01), std::invalid_argument);
}
