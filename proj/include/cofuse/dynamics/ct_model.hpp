#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"
#include "cofuse/core/random.hpp"
#include "cofuse/dynamics/state.hpp"

namespace cofuse {

/// Constant-turn motion model parameters.
struct CtModelParams {
    double sigma_accel = 15.0;                       ///< m/s^2
    double sigma_turn = 30.0 * std::numbers::pi / 180.0; ///< rad/s per second
    double dt = 0.1;                                 ///< s
    double survival_prob = 0.99;

    void validate() const {
        if (!(dt > 0.0)) throw PreconditionError("CtModelParams: dt must be positive");
        if (!(sigma_accel >= 0.0) || !(sigma_turn >= 0.0))
            throw PreconditionError("CtModelParams: noise standard deviations must be non-negative");
        if (!(survival_prob >= 0.0 && survival_prob <= 1.0))
            throw PreconditionError("CtModelParams: survival_prob must lie in [0,1]");
    }
};

namespace detail {

// Below this |turn| the closed forms lose precision; switch to series.
inline constexpr double kSmallTurn = 1e-8;

/// sin(t)/t and (1 - cos(t))/t.
inline void turn_coefficients(double t, double& sin_over, double& versin_over) {
    if (std::abs(t) < kSmallTurn) {
        const double t2 = t * t;
        sin_over = 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
        versin_over = t / 2.0 - t * t2 / 24.0 + t * t2 * t2 / 720.0 - t * t2 * t2 * t2 / 40320.0;
    } else {
        sin_over = std::sin(t) / t;
        versin_over = (1.0 - std::cos(t)) / t;
    }
}

} // namespace detail

/// Constant-turn transition matrix acting on [px, ux, py, uy], where u = v * dt is the
/// displacement per sampling period and `turn` is the turn angle per sampling period.
inline Eigen::Matrix4d ct_matrix(double turn) {
    double a = 0.0;
    double b = 0.0;
    detail::turn_coefficients(turn, a, b);
    const double c = std::cos(turn);
    const double s = std::sin(turn);
    Eigen::Matrix4d f;
    // clang-format off
    f << 1.0, a,   0.0, -b,
         0.0, c,   0.0, -s,
         0.0, b,   1.0,  a,
         0.0, s,   0.0,  c;
    // clang-format on
    return f;
}

/// Process noise covariance in physical units, ordered [px, vx, py, vy, omega].
inline Eigen::Matrix<double, 5, 5> process_covariance(const CtModelParams& p) {
    Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
    g(0, 0) = 0.5 * p.dt * p.dt;
    g(1, 0) = p.dt;
    g(2, 1) = 0.5 * p.dt * p.dt;
    g(3, 1) = p.dt;
    Eigen::Matrix<double, 5, 5> q = Eigen::Matrix<double, 5, 5>::Zero();
    q.topLeftCorner<4, 4>() = p.sigma_accel * p.sigma_accel * g * g.transpose();
    q(4, 4) = p.sigma_turn * p.sigma_turn * p.dt * p.dt;
    return q;
}

/// Noise-free constant-turn step: m(x) = [F(omega*dt) x, omega].
inline KinematicState ct_mean(const KinematicState& x, double dt) {
    double a = 0.0;
    double b = 0.0;
    const double turn = x.omega * dt;
    detail::turn_coefficients(turn, a, b);
    const double c = std::cos(turn);
    const double s = std::sin(turn);
    const double ux = x.vx * dt;
    const double uy = x.vy * dt;
    KinematicState out;
    out.px = x.px + a * ux - b * uy;
    out.py = x.py + b * ux + a * uy;
    out.vx = (c * ux - s * uy) / dt;
    out.vy = (s * ux + c * uy) / dt;
    out.omega = x.omega;
    return out;
}

/// One constant-turn transition, optionally perturbed by process noise drawn from
/// process_covariance(params).
inline KinematicState ct_transition(const KinematicState& x, const CtModelParams& params, bool noisy, Rng& rng) {
    KinematicState out = ct_mean(x, params.dt);
    if (noisy) {
        std::normal_distribution<double> n01(0.0, 1.0);
        const double ax = params.sigma_accel * n01(rng);
        const double ay = params.sigma_accel * n01(rng);
        const double half_dt2 = 0.5 * params.dt * params.dt;
        out.px += half_dt2 * ax;
        out.vx += params.dt * ax;
        out.py += half_dt2 * ay;
        out.vy += params.dt * ay;
        out.omega += params.sigma_turn * params.dt * n01(rng);
    }
    return out;
}

} // namespace cofuse
