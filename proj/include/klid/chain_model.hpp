// Chain model definitions: mass/damping/stiffness assembly, equation of
// motion, input recovery and parameter sensitivities for n-DOF shear chains.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace klid {

/**
 * @brief Parametric n-DOF mass-spring-damper chain.
 *
 * Masses are known and fixed; stiffness and damping coefficients (and the
 * cubic coefficients of the hardening variant) form the identifiable
 * parameter vector, ordered [k_1..k_n, c_1..c_n] with the cubic terms
 * [eps_1..eps_n] appended when present.
 */
struct ChainModel {
    Eigen::VectorXd masses;  ///< diagonal mass entries, strictly positive
    bool cubic = false;      ///< cubic inter-storey springs present

    int dof() const { return static_cast<int>(masses.size()); }
    int state_dim() const { return 2 * dof(); }
    int param_count() const { return (cubic ? 3 : 2) * dof(); }

    static ChainModel linear(const Eigen::VectorXd& masses) {
        validate_masses(masses);
        return ChainModel{masses, false};
    }
    static ChainModel with_cubic(const Eigen::VectorXd& masses) {
        validate_masses(masses);
        return ChainModel{masses, true};
    }

private:
    static void validate_masses(const Eigen::VectorXd& m) {
        if (m.size() < 1) throw std::invalid_argument("chain model needs at least one DOF");
        if ((m.array() <= 0.0).any())
            throw std::invalid_argument("chain model masses must be strictly positive");
    }
};

/// Parameter layout helpers. theta = [k; c] or [k; c; eps].
inline int stiffness_index(int spring) { return spring; }
inline int damping_index(const ChainModel& model, int damper) { return model.dof() + damper; }
inline int cubic_index(const ChainModel& model, int spring) { return 2 * model.dof() + spring; }

struct AssembledMatrices {
    Eigen::MatrixXd M;
    Eigen::MatrixXd C;
    Eigen::MatrixXd K;
    Eigen::MatrixXd E;  ///< cubic coefficient matrix; 0x0 for linear models
};

namespace detail {

/// Tridiagonal chain pattern: coefficient j couples DOFs j-1 and j.
inline Eigen::MatrixXd chain_matrix(const Eigen::VectorXd& coeff) {
    const int n = static_cast<int>(coeff.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        out(i, i) = coeff(i) + (i + 1 < n ? coeff(i + 1) : 0.0);
        if (i + 1 < n) {
            out(i, i + 1) = -coeff(i + 1);
            out(i + 1, i) = -coeff(i + 1);
        }
    }
    return out;
}

/// Relative displacements d_i = x_i - x_{i-1} with x_0 = 0.
inline Eigen::VectorXd relative_displacements(const Eigen::VectorXd& x) {
    Eigen::VectorXd d = x;
    for (int i = static_cast<int>(x.size()) - 1; i > 0; --i) d(i) -= x(i - 1);
    return d;
}

}  // namespace detail

/**
 * @brief Assemble M, C, K (and E for the cubic variant) from a parameter
 *        vector laid out as [k_1..k_n, c_1..c_n (, eps_1..eps_n)].
 *
 * Any finite theta is accepted; physical plausibility is not enforced so
 * estimators may explore transiently non-physical values.
 */
inline AssembledMatrices assemble(const ChainModel& model, const Eigen::VectorXd& theta) {
    const int n = model.dof();
    if (theta.size() != model.param_count())
        throw std::invalid_argument("parameter vector length " + std::to_string(theta.size()) +
                                    " does not match model layout (" +
                                    std::to_string(model.param_count()) + ")");
    AssembledMatrices out;
    out.M = model.masses.asDiagonal();
    out.K = detail::chain_matrix(theta.segment(0, n));
    out.C = detail::chain_matrix(theta.segment(n, n));
    if (model.cubic) {
        out.E = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            out.E(i, i) = theta(2 * n + i);
            if (i + 1 < n) out.E(i, i + 1) = -theta(2 * n + i + 1);
        }
    } else {
        out.E = Eigen::MatrixXd();
    }
    return out;
}

/// Restoring force K x + C v (+ E d^3) for state z = [x; v].
inline Eigen::VectorXd restoring_force(const ChainModel& model, const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& z) {
    const int n = model.dof();
    const auto mats = assemble(model, theta);
    Eigen::VectorXd f = mats.K * z.head(n) + mats.C * z.segment(n, n);
    if (model.cubic) {
        const Eigen::VectorXd d = detail::relative_displacements(z.head(n));
        f += mats.E * d.array().cube().matrix();
    }
    return f;
}

/// Accelerations implied by the equation of motion: M^{-1}(u - C v - K x - E d^3).
inline Eigen::VectorXd acceleration(const ChainModel& model, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
    return (u - restoring_force(model, theta, z)).cwiseQuotient(model.masses);
}

/// State derivative [v; M^{-1}(u - C v - K x - E d^3)].
inline Eigen::VectorXd continuous_dynamics(const ChainModel& model, const Eigen::VectorXd& theta,
                                           const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
    const int n = model.dof();
    Eigen::VectorXd dz(2 * n);
    dz.head(n) = z.segment(n, n);
    dz.tail(n) = acceleration(model, theta, z, u);
    return dz;
}

/**
 * @brief Recover the input from measured accelerations and a state estimate:
 *        u = M a + C v + K x (+ E d^3).
 *
 * Rows with known inputs are handled separately; see KnownInputs.
 */
inline Eigen::VectorXd input_from_motion(const ChainModel& model, const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& accel, const Eigen::VectorXd& z) {
    return model.masses.cwiseProduct(accel) + restoring_force(model, theta, z);
}

/**
 * @brief Which input rows are unknown (to be estimated) and the known values
 *        of the remaining rows.
 *
 * Known rows default to zero; non-zero prescribed inputs can be supplied as a
 * full-length vector whose known rows are read.
 */
struct KnownInputs {
    std::vector<bool> unknown;  ///< size n; true where the input must be estimated

    static KnownInputs all_unknown(int n) { return {std::vector<bool>(n, true)}; }
    static KnownInputs unknown_at(int n, const std::vector<int>& dofs_1based) {
        KnownInputs ki{std::vector<bool>(n, false)};
        for (int d : dofs_1based) {
            if (d < 1 || d > n) throw std::invalid_argument("input DOF index out of range");
            ki.unknown[static_cast<size_t>(d - 1)] = true;
        }
        return ki;
    }

    /// Overwrite the known rows of u with their prescribed values.
    Eigen::VectorXd apply(const Eigen::VectorXd& u,
                          const Eigen::VectorXd* known_values = nullptr) const {
        Eigen::VectorXd out = u;
        for (int i = 0; i < u.size(); ++i)
            if (!unknown[static_cast<size_t>(i)])
                out(i) = known_values ? (*known_values)(i) : 0.0;
        return out;
    }
};

/**
 * @brief Sensitivity of the model restoring force, U = M^{-1} d([K C] z + E d^3)/dtheta.
 *
 * For the linear chain the entries are displacement and velocity differences;
 * the cubic block holds the cubed relative displacements. Column layout
 * matches the parameter vector.
 */
inline Eigen::MatrixXd sensitivity_matrix(const ChainModel& model, const Eigen::VectorXd& z,
                                          const Eigen::VectorXd& theta) {
    (void)theta;  // the force is linear in theta, so U depends on z only
    const int n = model.dof();
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, model.param_count());
    const auto x = z.head(n);
    const auto v = z.segment(n, n);
    // spring/damper j couples rows j-1 and j (0-based: rows j-1, j for coefficient j>=1)
    for (int j = 0; j < n; ++j) {
        if (j == 0) {
            U(0, stiffness_index(0)) = x(0);
            U(0, damping_index(model, 0)) = v(0);
        } else {
            U(j - 1, stiffness_index(j)) = x(j - 1) - x(j);
            U(j, stiffness_index(j)) = x(j) - x(j - 1);
            U(j - 1, damping_index(model, j)) = v(j - 1) - v(j);
            U(j, damping_index(model, j)) = v(j) - v(j - 1);
        }
    }
    if (model.cubic) {
        const Eigen::VectorXd d = detail::relative_displacements(x);
        for (int j = 0; j < n; ++j) {
            const double dj3 = d(j) * d(j) * d(j);
            U(j, cubic_index(model, j)) = dj3;
            if (j > 0) U(j - 1, cubic_index(model, j)) = -dj3;
        }
    }
    return U.array().colwise() / model.masses.array();
}

}  // namespace klid
