// Continuous state-space form of a chain model and its discretization.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

#include "klid/chain_model.hpp"

namespace klid {

struct StateSpace {
    Eigen::MatrixXd A;  ///< 2n x 2n
    Eigen::MatrixXd B;  ///< 2n x n
};

/// A = [0 I; -M^{-1}K -M^{-1}C], B = [0; M^{-1}] from the linear part of the model.
inline StateSpace continuous_state_space(const ChainModel& model, const Eigen::VectorXd& theta) {
    const int n = model.dof();
    const auto mats = assemble(model, theta);
    const Eigen::VectorXd minv = model.masses.cwiseInverse();
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.A.topRightCorner(n, n).setIdentity();
    ss.A.bottomLeftCorner(n, n) = -(minv.asDiagonal() * mats.K);
    ss.A.bottomRightCorner(n, n) = -(minv.asDiagonal() * mats.C);
    ss.B = Eigen::MatrixXd::Zero(2 * n, n);
    ss.B.bottomRows(n) = minv.asDiagonal();
    return ss;
}

enum class Discretization {
    kTaylor2,  ///< A_d = I + dt A + dt^2/2 A^2 (default)
    kExact,    ///< A_d = expm(dt A)
};

struct DiscreteStateSpace {
    Eigen::MatrixXd Ad;
    Eigen::MatrixXd Bd;
};

/// Zero-order-hold style discretization with B_d = dt B in both modes.
inline DiscreteStateSpace discretize(const StateSpace& ss, double dt,
                                     Discretization mode = Discretization::kTaylor2) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    DiscreteStateSpace d;
    switch (mode) {
        case Discretization::kTaylor2: {
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(ss.A.rows(), ss.A.cols());
            d.Ad = I + dt * ss.A + (dt * dt / 2.0) * (ss.A * ss.A);
            break;
        }
        case Discretization::kExact:
            d.Ad = (dt * ss.A).exp();
            break;
    }
    d.Bd = dt * ss.B;
    return d;
}

}  // namespace klid
