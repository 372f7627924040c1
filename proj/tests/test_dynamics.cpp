#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace cofuse;
constexpr double pi = std::numbers::pi;

namespace {

// Direct evaluation of the displayed constant-turn matrix, independent of the library's
// small-angle handling.
Eigen::Matrix4d reference_f(double w) {
    Eigen::Matrix4d f;
    f << 1, std::sin(w) / w, 0, -(1 - std::cos(w)) / w,
         0, std::cos(w), 0, -std::sin(w),
         0, (1 - std::cos(w)) / w, 1, std::sin(w) / w,
         0, std::sin(w), 0, std::cos(w);
    return f;
}

} // namespace

TEST(CtMatrix, ZeroTurnIsConstantVelocity) {
    Eigen::Matrix4d cv;
    cv << 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1;
    EXPECT_TRUE(ct_matrix(0.0).isApprox(cv, 1e-15));
}

TEST(CtMatrix, HalfTurn) {
    Eigen::Matrix4d expect;
    expect << 1, 0, 0, -2 / pi, 0, -1, 0, 0, 0, 2 / pi, 1, 0, 0, 0, 0, -1;
    EXPECT_LT((ct_matrix(pi) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CtMatrix, QuarterTurnFirstRow) {
    const auto f = ct_matrix(pi / 2);
    EXPECT_NEAR(f(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(f(0, 1), 2 / pi, 1e-15);
    EXPECT_NEAR(f(0, 2), 0.0, 1e-15);
    EXPECT_NEAR(f(0, 3), -2 / pi, 1e-15);
}

TEST(CtMatrix, MatchesDisplayedFormAwayFromZero) {
    for (double w : {-3.0, -1.0, -1e-3, 1e-6, 0.2, 2.5}) EXPECT_LT((ct_matrix(w) - reference_f(w)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CtMatrix, ContinuousAtZero) {
    EXPECT_LT((ct_matrix(1e-9) - ct_matrix(0.0)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((ct_matrix(-1e-9) - ct_matrix(0.0)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(CtMatrix, UnitDeterminantOverGrid) {
    for (int i = -200; i <= 200; ++i) {
        const double w = pi * i / 200.0;
        EXPECT_NEAR(ct_matrix(w).determinant(), 1.0, 1e-10) << "w=" << w;
    }
}

// Two periods turning pi/2 each trace the same arc as one period turning pi at twice the
// per-period displacement.
TEST(CtMatrix, TwoQuarterTurnsMakeAHalfTurn) {
    const Eigen::Matrix4d d = Eigen::Vector4d(1, 2, 1, 2).asDiagonal();
    const Eigen::Matrix4d two = ct_matrix(pi / 2) * ct_matrix(pi / 2);
    EXPECT_LT((two - d.inverse() * ct_matrix(pi) * d).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CtTransition, StraightLineAdvancesOneStep) {
    CtModelParams p;
    Rng rng(1);
    const KinematicState x{0, 0, 10, 0, 0};
    const auto y = ct_transition(x, p, false, rng);
    EXPECT_NEAR(y.px, 1.0, 1e-12);
    EXPECT_NEAR(y.py, 0.0, 1e-12);
    EXPECT_NEAR(y.vx, 10.0, 1e-12);
}

TEST(CtTransition, MeanMatchesMatrixInFoldedUnits) {
    const double dt = 0.1;
    const KinematicState x{3, -2, 7, 4, 1.3};
    const auto y = ct_mean(x, dt);
    const Eigen::Vector4d v{x.px, x.vx * dt, x.py, x.vy * dt};
    const Eigen::Vector4d w = ct_matrix(x.omega * dt) * v;
    EXPECT_NEAR(y.px, w(0), 1e-12);
    EXPECT_NEAR(y.vx * dt, w(1), 1e-12);
    EXPECT_NEAR(y.py, w(2), 1e-12);
    EXPECT_NEAR(y.vy * dt, w(3), 1e-12);
}

TEST(CtTransition, NoiselessPreservesSpeed) {
    CtModelParams p;
    Rng rng(2);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 1000; ++i) {
        const KinematicState x{u(rng), u(rng), u(rng), u(rng), u(rng) / 10};
        EXPECT_NEAR(ct_transition(x, p, false, rng).speed(), x.speed(), 1e-9);
    }
}

TEST(CtTransition, NoiseCovarianceMatchesQ) {
    CtModelParams p;
    Rng rng(11);
    const KinematicState x{5, 5, 3, -2, 0.4};
    const auto m = ct_mean(x, p.dt);
    const int n = 10000;
    Eigen::Matrix<double, 5, 5> cov = Eigen::Matrix<double, 5, 5>::Zero();
    for (int i = 0; i < n; ++i) {
        const auto y = ct_transition(x, p, true, rng);
        Eigen::Matrix<double, 5, 1> d;
        d << y.px - m.px, y.vx - m.vx, y.py - m.py, y.vy - m.vy, y.omega - m.omega;
        cov += d * d.transpose();
    }
    cov /= n;
    const auto q = process_covariance(p);
    EXPECT_LT((cov - q).norm() / q.norm(), 0.10);
}

TEST(Likelihood, PeakValue) {
    SensorModel s;
    s.node = 4;
    const Measurement z{1.0, 2.0, 1, 4};
    EXPECT_NEAR(measurement_likelihood(z, {1.0, 2.0, 0, 0, 0}, s), 1.0 / (2 * pi), 1e-15);
}

TEST(Likelihood, ThreeSigmaRatio) {
    SensorModel s;
    s.node = 4;
    const Measurement z{3.0, 0.0, 1, 4};
    const double peak = 1.0 / (2 * pi);
    EXPECT_NEAR(measurement_likelihood(z, {0, 0, 0, 0, 0}, s), peak * std::exp(-4.5), 1e-15);
}

TEST(Likelihood, SymmetricInDisplacement) {
    SensorModel s;
    s.node = 1;
    const KinematicState x{0, 0, 0, 0, 0};
    EXPECT_DOUBLE_EQ(measurement_likelihood({1.7, -0.4, 1, 1}, x, s), measurement_likelihood({-1.7, 0.4, 1, 1}, x, s));
}

TEST(Likelihood, RejectsForeignMeasurement) {
    SensorModel s;
    s.node = 1;
    EXPECT_THROW(measurement_likelihood({0, 0, 1, 2}, {}, s), PreconditionError);
}

TEST(Detection, MobileRadarRange) {
    SensorModel s;
    s.range = 50;
    s.detection_prob = 0.95;
    const Eigen::Vector2d c{0, 0};
    EXPECT_DOUBLE_EQ(detection_probability({49, 0, 0, 0, 0}, s, c), 0.95);
    EXPECT_DOUBLE_EQ(detection_probability({51, 0, 0, 0, 0}, s, c), 0.0);
}

TEST(Detection, StationaryRadarRange) {
    SensorModel s;
    s.range = 120;
    s.detection_prob = 0.95;
    const Eigen::Vector2d c{100, 100};
    EXPECT_DOUBLE_EQ(detection_probability({100, 219, 0, 0, 0}, s, c), 0.95);
}

TEST(Detection, ExactlyZeroOutsideDisc) {
    SensorModel s;
    s.range = 10;
    s.detection_prob = 1.0;
    const Eigen::Vector2d c{0, 0};
    Rng rng(4);
    std::uniform_real_distribution<double> ang(0, 2 * pi), r(10.0 + 1e-9, 100);
    for (int i = 0; i < 1000; ++i) {
        const double a = ang(rng), d = r(rng);
        EXPECT_EQ(detection_probability({d * std::cos(a), d * std::sin(a), 0, 0, 0}, s, c), 0.0);
    }
}
