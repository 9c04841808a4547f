#include "scallops/hydrodynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace scallops {

Mat2 rft_operator(const Vec2& e, double c_par, double c_perp) {
    if (std::abs(e.norm() - 1.0) > 1e-9) throw std::invalid_argument("RFT operator needs a unit direction");
    return c_perp * Mat2::Identity() + (c_par - c_perp) * (e * e.transpose());
}

Vec2 force_density(const SystemState& state, const StateRates& rates, const ScallopPairParams& params, int i,
                   int j, double s) {
    check_index(i, "scallop");
    check_index(j, "link");
    const int other = 3 - i;
    const double lambda = params.lambda();
    const double big_lambda = params.big_lambda();

    const Mat2 J_self = rft_operator(link_direction(state, i, j), params.c_par(), params.c_perp());
    const Mat2 J_other = rft_operator(link_direction(state, other, j), params.c_par(), params.c_perp());
    const Vec2 v_self = point_velocity(state, rates, params, i, j, s);
    const Vec2 v_other = point_velocity(state, rates, params, other, j, s);

    return (-1.0 / big_lambda) * (J_self * v_self) + (lambda / big_lambda) * (J_other * v_other);
}

double torque_density(const SystemState& state, const StateRates& rates, const ScallopPairParams& params,
                      int i, int j, double s) {
    const Vec2 arm = s * link_direction(state, i, j);
    return cross(arm, force_density(state, rates, params, i, j, s));
}

LinkBlocks link_blocks(const SystemState& state, const ScallopPairParams& params, int i) {
    check_index(i, "scallop");
    const int other = 3 - i;
    const double L = params.link_length();
    const double c_par = params.c_par();
    const double c_perp = params.c_perp();

    const Vec2 e1 = link_direction(state, i, 1);
    const Vec2 e2 = link_direction(state, i, 2);
    const Vec2 f1 = link_direction(state, other, 1);
    const Vec2 f2 = link_direction(state, other, 2);

    LinkBlocks blocks;
    blocks.A = L * (2.0 * c_perp * Mat2::Identity() +
                    (c_par - c_perp) * (e1 * e1.transpose() + e2 * e2.transpose()));
    blocks.b = 0.5 * L * L * c_perp * perp(e1 + e2);
    blocks.alpha = 0.5 * L * L * c_perp * perp(e2);
    blocks.d = 0.5 * L * L * (c_par - c_perp) * (perp(e1).dot(f1) * f1 + perp(e2).dot(f2) * f2) + blocks.b;

    const double third = L * L * L * c_perp / 3.0;
    blocks.omega_coef = 2.0 * third;
    blocks.varpi = third * (e1.dot(f1) + e2.dot(f2));
    blocks.beta = third * e2.dot(f2);
    return blocks;
}

double ResistanceAssembly::singularity_floor() const {
    double log_sum = 0.0;
    for (int k = 0; k < 6; ++k) log_sum += std::log(std::abs(R(k, k)));
    // scale^6 = exp(sum of logs) since scale is the geometric mean of the six diagonal entries
    return 1e-12 * std::exp(log_sum);
}

ResistanceAssembly assemble(const SystemState& state, const ScallopPairParams& params) {
    const double lambda = params.lambda();
    if (!(lambda >= 0.0 && lambda < 1.0)) throw std::domain_error("lambda outside [0, 1)");

    const LinkBlocks s1 = link_blocks(state, params, 1);
    const LinkBlocks s2 = link_blocks(state, params, 2);
    const double omega = s1.omega_coef;
    const double varpi = s1.varpi;
    const double beta = s1.beta;

    ResistanceAssembly out;
    out.lambda_used = lambda;
    Mat6& R = out.R;

    R.block<2, 2>(0, 0) = s1.A;
    R.block<2, 1>(0, 2) = s1.b;
    R.block<1, 2>(2, 0) = s1.b.transpose();
    R(2, 2) = omega;

    R.block<2, 2>(3, 3) = s2.A;
    R.block<2, 1>(3, 5) = s2.b;
    R.block<1, 2>(5, 3) = s2.b.transpose();
    R(5, 5) = omega;

    // force rows reuse A, b of the other scallop; torque rows use d and varpi
    R.block<2, 2>(0, 3) = -lambda * s2.A;
    R.block<2, 1>(0, 5) = -lambda * s2.b;
    R.block<1, 2>(2, 3) = -lambda * s1.d.transpose();
    R(2, 5) = -lambda * varpi;

    R.block<2, 2>(3, 0) = -lambda * s1.A;
    R.block<2, 1>(3, 2) = -lambda * s1.b;
    R.block<1, 2>(5, 0) = -lambda * s2.d.transpose();
    R(5, 2) = -lambda * varpi;

    Mat62& Phi = out.Phi;
    Phi.block<2, 1>(0, 0) = s1.alpha;
    Phi(2, 0) = 0.5 * omega;
    Phi.block<2, 1>(3, 0) = -lambda * s1.alpha;
    Phi(5, 0) = -lambda * beta;

    Phi.block<2, 1>(0, 1) = -lambda * s2.alpha;
    Phi(2, 1) = -lambda * beta;
    Phi.block<2, 1>(3, 1) = s2.alpha;
    Phi(5, 1) = 0.5 * omega;

    if (!R.allFinite() || !Phi.allFinite()) throw std::domain_error("non-finite resistance block");
    out.det_R = R.partialPivLu().determinant();
    return out;
}

Vec6 generalized_forces(const ResistanceAssembly& assembly, const StateRates& rates, double big_lambda) {
    const StateVector q = rates.to_vector();
    return -(assembly.R * q.head<6>() + assembly.Phi * q.tail<2>()) / big_lambda;
}

}  // namespace scallops
