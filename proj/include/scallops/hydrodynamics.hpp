#pragma once

#include "scallops/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace scallops {

using Mat2 = Eigen::Matrix2d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat62 = Eigen::Matrix<double, 6, 2>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Resistive-force-theory drag operator for a link with unit direction e:
/// C_perp I + (C_par - C_perp) e e^T. Throws std::invalid_argument if |e| != 1.
Mat2 rft_operator(const Vec2& e, double c_par, double c_perp);

/// Hydrodynamic force per unit length on link j of scallop i at arclength s,
/// including the interaction with link j of the other scallop.
Vec2 force_density(const SystemState& state, const StateRates& rates, const ScallopPairParams& params, int i,
                   int j, double s);

/// Torque per unit length about hinge i: (x_i^(j)(s) - x_i) x f_i^(j)(s).
double torque_density(const SystemState& state, const StateRates& rates, const ScallopPairParams& params,
                      int i, int j, double s);

/// Integrated force/torque coefficients of scallop i.
///
/// A, b, alpha give the force on scallop i per unit hinge velocity, rotation rate and
/// shape rate; d couples the torque to the other scallop's translation. omega_coef,
/// varpi and beta are the torque coefficients (varpi and beta are symmetric in i).
struct LinkBlocks {
    Mat2 A = Mat2::Zero();
    Vec2 b = Vec2::Zero();
    Vec2 alpha = Vec2::Zero();
    Vec2 d = Vec2::Zero();
    double omega_coef = 0.0;
    double varpi = 0.0;
    double beta = 0.0;
};

LinkBlocks link_blocks(const SystemState& state, const ScallopPairParams& params, int i);

/// Resistance system R (x1, y1, theta1, x2, y2, theta2) and shape coupling Phi (sigma1, sigma2)
/// such that force/torque balance reads R qdot + Phi sigmadot = 0.
struct ResistanceAssembly {
    Mat6 R = Mat6::Zero();
    Mat62 Phi = Mat62::Zero();
    double det_R = 0.0;
    double lambda_used = 0.0;

    /// 1e-12 * scale^6 with scale the geometric mean of |diag R|.
    double singularity_floor() const;
    bool is_singular() const { return !(std::abs(det_R) >= singularity_floor()); }
};

/// Throws std::domain_error when any block is non-finite.
ResistanceAssembly assemble(const SystemState& state, const ScallopPairParams& params);

/// Total force and torque (F1, T1, F2, T2) = -(R qdot + Phi sigmadot) / Lambda.
Vec6 generalized_forces(const ResistanceAssembly& assembly, const StateRates& rates, double big_lambda);

}  // namespace scallops
