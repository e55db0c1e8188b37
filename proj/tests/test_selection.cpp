// Gaussian KL divergence, the relative parameter error metric, parameter-
// history covariance summaries, and winner selection across runs.

#include <gtest/gtest.h>

#include <klid/selection.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace klid;

namespace {

GaussianSummary summary(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    return GaussianSummary{mean, cov};
}

Eigen::VectorXd make_vector(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

}  // namespace

// =============================================================================
// KL divergence
// =============================================================================

TEST(GaussianKl, PinnedScalarValue) {
    // unit variances, means one apart: D = 1/2
    const GaussianSummary prior = summary(Eigen::VectorXd::Zero(1),
                                          Eigen::MatrixXd::Identity(1, 1));
    const GaussianSummary posterior = summary(Eigen::VectorXd::Ones(1),
                                              Eigen::MatrixXd::Identity(1, 1));
    EXPECT_NEAR(gaussian_kl(prior, posterior), 0.5, 1e-12);
}

TEST(GaussianKl, PinnedTwoDimensionalValue) {
    const GaussianSummary prior = summary(Eigen::VectorXd::Zero(2),
                                          Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd w(2, 2);
    w << 2.0, 0.0, 0.0, 0.5;
    const GaussianSummary posterior = summary(make_vector({1.0, -1.0}), w);
    // 1/2 [ln(1/(2*0.5)) - 2 + (2 + 0.5) + (1 + 1)] = 1.25
    const double kl = gaussian_kl(prior, posterior);
    EXPECT_NEAR(kl, 1.25, 1e-12);
    EXPECT_NEAR(kl,
                oracles::kl_by_quadrature(prior.mean, prior.cov, posterior.mean, posterior.cov,
                                          12),
                1e-9);
}

TEST(GaussianKl, MatchesQuadratureOracle) {
    std::mt19937_64 rng(20240517);
    for (int d = 1; d <= 3; ++d) {
        for (int trial = 0; trial < 20; ++trial) {
            const GaussianSummary prior =
                summary(oracles::random_vector(d, rng), oracles::random_spd(d, rng));
            const GaussianSummary posterior =
                summary(oracles::random_vector(d, rng), oracles::random_spd(d, rng));
            const double kl = gaussian_kl(prior, posterior);
            const double oracle = oracles::kl_by_quadrature(prior.mean, prior.cov,
                                                            posterior.mean, posterior.cov, 12);
            EXPECT_LE(std::abs(kl - oracle) / std::max(std::abs(oracle), 1e-12), 1e-6)
                << "d=" << d << " trial=" << trial;
        }
    }
}

TEST(GaussianKl, IdenticalSummariesGiveZero) {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 4; ++d) {
        const GaussianSummary q = summary(oracles::random_vector(d, rng),
                                          oracles::random_spd(d, rng));
        EXPECT_LE(std::abs(gaussian_kl(q, q)), 1e-12);
    }
}

TEST(GaussianKl, NonNegativeOnRandomPairs) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + trial % 3;
        const GaussianSummary prior =
            summary(oracles::random_vector(d, rng), oracles::random_spd(d, rng));
        const GaussianSummary posterior =
            summary(oracles::random_vector(d, rng), oracles::random_spd(d, rng));
        EXPECT_GE(gaussian_kl(prior, posterior), -1e-10) << "trial=" << trial;
    }
}

TEST(GaussianKl, IsAsymmetric) {
    // N(0,1) against N(0,4): the two orderings disagree
    const GaussianSummary narrow = summary(Eigen::VectorXd::Zero(1),
                                           Eigen::MatrixXd::Identity(1, 1));
    const GaussianSummary wide = summary(Eigen::VectorXd::Zero(1),
                                         4.0 * Eigen::MatrixXd::Identity(1, 1));
    const double forward = gaussian_kl(narrow, wide);   // 1/2 (3 - ln 4)
    const double backward = gaussian_kl(wide, narrow);  // 1/2 (ln 4 - 3/4)
    EXPECT_NEAR(forward, 0.5 * (3.0 - std::log(4.0)), 1e-12);
    EXPECT_NEAR(backward, 0.5 * (std::log(4.0) - 0.75), 1e-12);
    EXPECT_GT(std::abs(forward - backward), 0.1);
}

TEST(GaussianKl, RejectsBadInputs) {
    const GaussianSummary q = summary(Eigen::VectorXd::Zero(2),
                                      Eigen::MatrixXd::Identity(2, 2));
    const GaussianSummary mismatched = summary(Eigen::VectorXd::Zero(3),
                                               Eigen::MatrixXd::Identity(3, 3));
    EXPECT_THROW(gaussian_kl(q, mismatched), std::invalid_argument);

    GaussianSummary indefinite = q;
    indefinite.cov(0, 0) = -1.0;
    EXPECT_THROW(gaussian_kl(indefinite, q), std::runtime_error);
}

// =============================================================================
// Relative parameter error
// =============================================================================

TEST(ErrorMetric, PinnedValues) {
    const Eigen::VectorXd truth = make_vector({9.0, 11.0, 13.0, 0.25, 0.5, 0.75});
    EXPECT_EQ(error_metric(truth, truth), 0.0);
    EXPECT_NEAR(error_metric(0.75 * truth, truth), 1.5, 1e-12);
    EXPECT_NEAR(error_metric(1.5 * truth, truth), 3.0, 1e-12);
    EXPECT_NEAR(error_metric(make_vector({1.0, 5.0}), make_vector({2.0, 4.0})), 0.75, 1e-12);
}

TEST(ErrorMetric, RejectsBadInputs) {
    EXPECT_THROW(error_metric(make_vector({1.0}), make_vector({1.0, 2.0})),
                 std::invalid_argument);
    EXPECT_THROW(error_metric(make_vector({1.0, 2.0}), make_vector({1.0, 0.0})),
                 std::invalid_argument);
}

// =============================================================================
// Parameter-history covariance
// =============================================================================

TEST(SampleCovariance, ConstantHistoryYieldsRidgeAlone) {
    const Eigen::MatrixXd history = Eigen::RowVector3d(9.0, 11.0, 13.0).replicate(50, 1);
    const Eigen::MatrixXd w = sample_covariance_with_ridge(history);
    EXPECT_LE((w - 1e-8 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-20);
}

TEST(SampleCovariance, RecoversPopulationCovariance) {
    std::mt19937_64 rng(42);
    const int d = 3, n = 10000;
    const Eigen::MatrixXd sigma = oracles::random_spd(d, rng, 0.5);
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
    Eigen::MatrixXd history(n, d);
    for (int k = 0; k < n; ++k)
        history.row(k) = (l * oracles::random_vector(d, rng)).transpose();
    const Eigen::MatrixXd w = sample_covariance_with_ridge(history);
    EXPECT_LE((w - sigma).norm() / sigma.norm(), 0.10);
}

TEST(SampleCovariance, MatchesBatchFormula) {
    std::mt19937_64 rng(3);
    Eigen::MatrixXd history(40, 2);
    for (int k = 0; k < history.rows(); ++k)
        history.row(k) = oracles::random_vector(2, rng).transpose();
    const Eigen::RowVectorXd mean = history.colwise().mean();
    const Eigen::MatrixXd centered = history.rowwise() - mean;
    const Eigen::MatrixXd batch =
        (centered.transpose() * centered) / (history.rows() - 1.0) +
        1e-8 * Eigen::MatrixXd::Identity(2, 2);
    EXPECT_LE((sample_covariance_with_ridge(history) - batch).cwiseAbs().maxCoeff(), 1e-10);
}

// =============================================================================
// Winner selection
// =============================================================================

namespace {

KlTrace make_trace(int set_index, std::vector<double> values, bool failed = false) {
    KlTrace t;
    t.set_index = set_index;
    t.values = std::move(values);
    t.failed = failed;
    return t;
}

}  // namespace

TEST(SelectBest, SingleCompletedTraceWins) {
    const SelectionReport report = select_best({make_trace(2, {4.0, 3.0, 2.5})});
    EXPECT_EQ(report.winner_set, 2);
    EXPECT_TRUE(report.tie_note.empty());
}

TEST(SelectBest, LowestFinalKlWins) {
    const SelectionReport report = select_best({
        make_trace(1, {1.0, 0.9}),
        make_trace(2, {5.0, 0.2}),
        make_trace(3, {0.5, 0.6}),
    });
    EXPECT_EQ(report.winner_set, 2);
    EXPECT_EQ(report.kl_traces.size(), 3u);
}

TEST(SelectBest, TieResolvesToLowerIndexWithNote) {
    const SelectionReport report = select_best({
        make_trace(1, {9.0, 0.7}),
        make_trace(2, {1.0, 0.7}),
    });
    EXPECT_EQ(report.winner_set, 1);
    EXPECT_FALSE(report.tie_note.empty());
}

TEST(SelectBest, FailedRunsAreExcluded) {
    const SelectionReport report = select_best({
        make_trace(1, {0.01}, /*failed=*/true),  // would win were it not failed
        make_trace(2, {3.0}),
    });
    EXPECT_EQ(report.winner_set, 2);
}

TEST(SelectBest, ThrowsWhenNothingCompleted) {
    EXPECT_THROW(select_best({}), SelectionError);
    EXPECT_THROW(select_best({make_trace(1, {1.0}, true), make_trace(2, {}, false)}),
                 SelectionError);
}

TEST(SelectBest, WinnerInvariantUnderCommonRescaling) {
    std::vector<KlTrace> traces = {
        make_trace(1, {1.0, 0.9}),
        make_trace(2, {5.0, 0.2}),
        make_trace(3, {0.5, 0.6}),
    };
    const int baseline = select_best(traces).winner_set;
    for (auto& trace : traces)
        for (double& v : trace.values) v *= 3.7;
    EXPECT_EQ(select_best(traces).winner_set, baseline);
}

TEST(KlTraceBehavior, FinalValueHandlesFailureAndEmpty) {
    EXPECT_EQ(make_trace(1, {2.0, 1.0}).final_value(), 1.0);
    EXPECT_TRUE(std::isinf(make_trace(1, {2.0, 1.0}, true).final_value()));
    EXPECT_TRUE(std::isinf(make_trace(1, {}).final_value()));
}
